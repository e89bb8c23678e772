#include <charconv>

#include "netobs/measure/parse.hpp"

namespace netobs::measure {

namespace {

// Shortest representation that round-trips through parse.
std::string fmt_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string fmt_value(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Ident: return v.text;
        case Value::Kind::Number: return fmt_double(v.number);
        case Value::Kind::String: return quote(v.text);
        case Value::Kind::Duration: return fmt_double(v.number) + "s";
        case Value::Kind::Struct: return v.text;
    }
    return "";
}

std::string fmt_args(const std::vector<Arg>& args) {
    std::string out;
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        if (!args[i].key.empty()) out += args[i].key + "=";
        out += fmt_value(args[i].value);
    }
    return out;
}

std::string fmt_term(const AggTerm& t) {
    std::string out;
    if (t.is_age) {
        out = t.var + ".age " + to_string(t.cmp) + " " + fmt_double(t.threshold) + "s";
        return out;
    }
    out = std::string(to_string(t.func)) + "(" + t.var;
    if (t.window_s) out += ", '" + fmt_double(*t.window_s) + "s'";
    out += ") ";
    out += to_string(t.cmp);
    out += " " + fmt_double(t.threshold);
    return out;
}

// Parenthesize only where precedence (not > and > or) requires it.
std::string fmt_expr(const BoolExpr& e, int parent_level) {
    int level = 0;
    std::string out;
    switch (e.kind) {
        case BoolExpr::Kind::Term:
            return fmt_term(e.term);
        case BoolExpr::Kind::Not: {
            level = 2;
            out = "not " + fmt_expr(*e.children[0], level);
            break;
        }
        case BoolExpr::Kind::And: {
            level = 1;
            for (size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += " and ";
                out += fmt_expr(*e.children[i], level);
            }
            break;
        }
        case BoolExpr::Kind::Or: {
            level = 0;
            for (size_t i = 0; i < e.children.size(); ++i) {
                if (i) out += " or ";
                out += fmt_expr(*e.children[i], level);
            }
            break;
        }
    }
    if (level < parent_level) return "(" + out + ")";
    return out;
}

std::string fmt_trigger(const ReactionDecl& r) {
    switch (r.trigger) {
        case TriggerKind::Transition: return r.from_zone + "->" + r.to_zone;
        case TriggerKind::Enter: return "->" + r.to_zone;
        case TriggerKind::Leave: return r.from_zone + "->";
        case TriggerKind::While: return "in " + r.to_zone;
    }
    return "";
}

} // namespace

std::string serialize(const MeasureSpec& spec) {
    std::string out = "measurement {\n";
    for (const auto& m : spec.measurements)
        out += "  " + m.var + " = " + m.metric + "(" + fmt_args(m.args) + ");\n";
    out += "} zones {\n";
    for (const auto& z : spec.zones)
        out += "  " + z.name + " = " + fmt_expr(*z.predicate, 0) + ";\n";
    out += "} reaction {\n";
    for (const auto& r : spec.reactions)
        out += "  " + fmt_trigger(r) + ": " + r.action + "(" + fmt_args(r.args) + ");\n";
    out += "}\n";
    return out;
}

} // namespace netobs::measure
