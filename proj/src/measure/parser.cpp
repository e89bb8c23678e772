#include "netobs/measure/parse.hpp"

#include <unordered_set>

#include "netobs/measure/lexer.hpp"

namespace netobs::measure {

BoolExprPtr BoolExpr::make_term(AggTerm t) {
    auto e = std::make_shared<BoolExpr>();
    e->kind = Kind::Term;
    e->term = std::move(t);
    return e;
}

BoolExprPtr BoolExpr::make(Kind k, std::vector<BoolExprPtr> kids) {
    auto e = std::make_shared<BoolExpr>();
    e->kind = k;
    e->children = std::move(kids);
    return e;
}

bool equal(const BoolExpr& a, const BoolExpr& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == BoolExpr::Kind::Term) return a.term == b.term;
    if (a.children.size() != b.children.size()) return false;
    for (size_t i = 0; i < a.children.size(); ++i)
        if (!equal(*a.children[i], *b.children[i])) return false;
    return true;
}

const MeasurementDecl* MeasureSpec::find_measurement(const std::string& var) const {
    for (const auto& m : measurements)
        if (m.var == var) return &m;
    return nullptr;
}

const ZoneDecl* MeasureSpec::find_zone(const std::string& name) const {
    for (const auto& z : zones)
        if (z.name == name) return &z;
    return nullptr;
}

std::vector<const AggTerm*> MeasureSpec::all_terms() const {
    std::vector<const AggTerm*> out;
    auto walk = [&](auto&& self, const BoolExpr& e) -> void {
        if (e.kind == BoolExpr::Kind::Term) {
            out.push_back(&e.term);
            return;
        }
        for (const auto& c : e.children) self(self, *c);
    };
    for (const auto& z : zones)
        if (z.predicate) walk(walk, *z.predicate);
    return out;
}

const char* to_string(AggFunc f) {
    switch (f) {
        case AggFunc::Avg: return "Avg";
        case AggFunc::Min: return "Min";
        case AggFunc::Max: return "Max";
        case AggFunc::Sum: return "Sum";
        case AggFunc::Count: return "Count";
        case AggFunc::Last: return "Last";
    }
    return "?";
}

const char* to_string(Cmp c) {
    switch (c) {
        case Cmp::Lt: return "<";
        case Cmp::Gt: return ">";
        case Cmp::Le: return "<=";
        case Cmp::Ge: return ">=";
        case Cmp::Eq: return "==";
        case Cmp::Ne: return "!=";
    }
    return "?";
}

std::string SemanticError::message() const {
    switch (kind) {
        case Kind::UnknownMetricRef:
            return "unknown metric variable '" + name + "'";
        case Kind::UnknownZoneRef:
            return "unknown zone '" + name + "'";
        case Kind::DuplicateName:
            return "duplicate name '" + name + "'";
    }
    return "";
}

std::string format_diagnostic(const std::string& file, SourcePos pos,
                              const std::string& message) {
    return file + ":" + std::to_string(pos.line) + ":" + std::to_string(pos.col) +
           ": " + message;
}

namespace {

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    MeasureSpec parse_program() {
        MeasureSpec spec;
        expect_section({"measurement", "measurements"});
        expect(Token::Kind::LBrace);
        while (!at(Token::Kind::RBrace)) spec.measurements.push_back(parse_mdecl());
        expect(Token::Kind::RBrace);

        expect_section({"zones", "zone"});
        expect(Token::Kind::LBrace);
        while (!at(Token::Kind::RBrace)) spec.zones.push_back(parse_zdecl());
        expect(Token::Kind::RBrace);

        expect_section({"reaction", "reactions", "action", "actions"});
        expect(Token::Kind::LBrace);
        while (!at(Token::Kind::RBrace)) spec.reactions.push_back(parse_rdecl());
        expect(Token::Kind::RBrace);

        expect(Token::Kind::End);
        return spec;
    }

private:
    std::vector<Token> toks_;
    size_t i_ = 0;

    const Token& cur() const { return toks_[i_]; }
    const Token& peek(size_t n = 1) const {
        return toks_[std::min(i_ + n, toks_.size() - 1)];
    }
    bool at(Token::Kind k) const { return cur().kind == k; }
    Token take() { return toks_[i_++]; }

    [[noreturn]] void fail(const std::string& expected) {
        throw SyntaxError(cur().pos, "expected " + expected + ", found " +
                                         token_name(cur().kind) +
                                         (cur().text.empty() ? "" : " '" + cur().text + "'"));
    }

    Token expect(Token::Kind k) {
        if (!at(k)) fail(token_name(k));
        return take();
    }

    void expect_section(std::initializer_list<const char*> names) {
        if (at(Token::Kind::Ident))
            for (const char* n : names)
                if (cur().text == n) { take(); return; }
        fail(std::string("section keyword '") + *names.begin() + "'");
    }

    MeasurementDecl parse_mdecl() {
        MeasurementDecl m;
        Token var = expect(Token::Kind::Ident);
        m.var = var.text;
        m.pos = var.pos;
        expect(Token::Kind::Assign);
        m.metric = expect(Token::Kind::Ident).text;
        expect(Token::Kind::LParen);
        if (!at(Token::Kind::RParen)) {
            m.args.push_back(parse_arg());
            while (at(Token::Kind::Comma)) { take(); m.args.push_back(parse_arg()); }
        }
        expect(Token::Kind::RParen);
        expect(Token::Kind::Semi);
        return m;
    }

    Arg parse_arg() {
        Arg a;
        if (at(Token::Kind::Ident) && peek().kind == Token::Kind::Assign) {
            a.key = take().text;
            take();  // '='
        }
        a.value = parse_value();
        return a;
    }

    Value parse_value() {
        Value v;
        switch (cur().kind) {
            case Token::Kind::Ident:
                v.kind = Value::Kind::Ident;
                v.text = take().text;
                return v;
            case Token::Kind::Number:
                v.kind = Value::Kind::Number;
                v.number = take().number;
                return v;
            case Token::Kind::Percent: {
                Token t = take();
                v.kind = Value::Kind::Number;
                v.number = t.number / 100.0;
                return v;
            }
            case Token::Kind::String:
                v.kind = Value::Kind::String;
                v.text = take().text;
                return v;
            case Token::Kind::Duration: {
                Token t = take();
                v.kind = Value::Kind::Duration;
                v.number = t.number;
                v.text = t.text;
                return v;
            }
            case Token::Kind::LBrace:
                return parse_struct_literal();
            default:
                fail("argument value");
        }
    }

    // Balanced-brace literal ({'users':'int'}); kept as canonical text.
    Value parse_struct_literal() {
        Value v;
        v.kind = Value::Kind::Struct;
        std::string text;
        int depth = 0;
        do {
            const Token& t = cur();
            if (t.kind == Token::Kind::End) fail("'}'");
            if (t.kind == Token::Kind::LBrace) ++depth;
            if (t.kind == Token::Kind::RBrace) --depth;
            if (t.kind == Token::Kind::String)
                text += "'" + t.text + "'";
            else
                text += t.text;
            take();
        } while (depth > 0);
        v.text = text;
        return v;
    }

    ZoneDecl parse_zdecl() {
        ZoneDecl z;
        Token name = expect(Token::Kind::Ident);
        z.name = name.text;
        z.pos = name.pos;
        expect(Token::Kind::Assign);
        z.predicate = parse_or();
        expect(Token::Kind::Semi);
        return z;
    }

    // Precedence: not > and > or.
    BoolExprPtr parse_or() {
        auto left = parse_and();
        if (!(at(Token::Kind::Ident) && cur().text == "or")) return left;
        std::vector<BoolExprPtr> kids{left};
        while (at(Token::Kind::Ident) && cur().text == "or") {
            take();
            kids.push_back(parse_and());
        }
        return BoolExpr::make(BoolExpr::Kind::Or, std::move(kids));
    }

    BoolExprPtr parse_and() {
        auto left = parse_unary();
        if (!(at(Token::Kind::Ident) && cur().text == "and")) return left;
        std::vector<BoolExprPtr> kids{left};
        while (at(Token::Kind::Ident) && cur().text == "and") {
            take();
            kids.push_back(parse_unary());
        }
        return BoolExpr::make(BoolExpr::Kind::And, std::move(kids));
    }

    BoolExprPtr parse_unary() {
        if (at(Token::Kind::Ident) && cur().text == "not") {
            take();
            return BoolExpr::make(BoolExpr::Kind::Not, {parse_unary()});
        }
        if (at(Token::Kind::LParen)) {
            take();
            auto e = parse_or();
            expect(Token::Kind::RParen);
            return e;
        }
        return BoolExpr::make_term(parse_term());
    }

    static bool agg_func_from(const std::string& name, AggFunc& out) {
        if (name == "Avg") { out = AggFunc::Avg; return true; }
        if (name == "Min") { out = AggFunc::Min; return true; }
        if (name == "Max") { out = AggFunc::Max; return true; }
        if (name == "Sum") { out = AggFunc::Sum; return true; }
        if (name == "Count") { out = AggFunc::Count; return true; }
        if (name == "Last") { out = AggFunc::Last; return true; }
        return false;
    }

    Cmp parse_cmp() {
        switch (cur().kind) {
            case Token::Kind::CmpLt: take(); return Cmp::Lt;
            case Token::Kind::CmpGt: take(); return Cmp::Gt;
            case Token::Kind::CmpLe: take(); return Cmp::Le;
            case Token::Kind::CmpGe: take(); return Cmp::Ge;
            case Token::Kind::CmpEq: take(); return Cmp::Eq;
            case Token::Kind::CmpNe: take(); return Cmp::Ne;
            default: fail("comparison operator");
        }
    }

    double parse_window() {
        if (at(Token::Kind::String)) {
            Token t = take();
            return parse_duration(t.text, t.pos);
        }
        if (at(Token::Kind::Duration)) return take().number;
        fail("window duration");
    }

    AggTerm parse_term() {
        AggTerm t;
        Token head = expect(Token::Kind::Ident);
        t.pos = head.pos;
        AggFunc func;
        if (at(Token::Kind::LParen) && agg_func_from(head.text, func)) {
            t.func = func;
            take();  // '('
            t.var = expect(Token::Kind::Ident).text;
            if (func != AggFunc::Last) {
                expect(Token::Kind::Comma);
                t.window_s = parse_window();
            }
            expect(Token::Kind::RParen);
            t.cmp = parse_cmp();
            t.threshold = parse_threshold();
            return t;
        }
        if (at(Token::Kind::Dot)) {
            take();
            Token field = expect(Token::Kind::Ident);
            if (field.text != "age")
                throw SyntaxError(field.pos, "only the '.age' accessor is supported");
            t.var = head.text;
            t.is_age = true;
            t.cmp = parse_cmp();
            t.threshold = parse_age_threshold();
            return t;
        }
        fail("aggregate call or '.age' accessor");
    }

    double parse_threshold() {
        if (at(Token::Kind::Number)) return take().number;
        if (at(Token::Kind::Percent)) return take().number / 100.0;
        fail("threshold number");
    }

    double parse_age_threshold() {
        if (at(Token::Kind::Duration)) return take().number;
        if (at(Token::Kind::String)) {
            Token t = take();
            return parse_duration(t.text, t.pos);
        }
        if (at(Token::Kind::Number)) return take().number;  // bare seconds
        fail("age threshold duration");
    }

    ReactionDecl parse_rdecl() {
        ReactionDecl r;
        r.pos = cur().pos;
        if (at(Token::Kind::Arrow)) {
            take();
            r.trigger = TriggerKind::Enter;
            r.to_zone = expect(Token::Kind::Ident).text;
        } else if (at(Token::Kind::Ident) && cur().text == "in" &&
                   peek().kind == Token::Kind::Ident) {
            take();
            r.trigger = TriggerKind::While;
            r.to_zone = expect(Token::Kind::Ident).text;
        } else {
            r.from_zone = expect(Token::Kind::Ident).text;
            expect(Token::Kind::Arrow);
            if (at(Token::Kind::Ident)) {
                r.trigger = TriggerKind::Transition;
                r.to_zone = take().text;
            } else {
                r.trigger = TriggerKind::Leave;
            }
        }
        if (at(Token::Kind::Colon) || at(Token::Kind::Assign)) take();
        else fail("':' or '='");
        r.action = expect(Token::Kind::Ident).text;
        expect(Token::Kind::LParen);
        if (!at(Token::Kind::RParen)) {
            r.args.push_back(parse_arg());
            while (at(Token::Kind::Comma)) { take(); r.args.push_back(parse_arg()); }
        }
        expect(Token::Kind::RParen);
        expect(Token::Kind::Semi);
        return r;
    }
};

void validate(const MeasureSpec& spec, std::vector<SemanticError>& errors) {
    std::unordered_set<std::string> vars;
    for (const auto& m : spec.measurements) {
        if (!vars.insert(m.var).second)
            errors.push_back({SemanticError::Kind::DuplicateName, m.var, m.pos});
    }
    std::unordered_set<std::string> zone_names;
    for (const auto& z : spec.zones) {
        if (!zone_names.insert(z.name).second)
            errors.push_back({SemanticError::Kind::DuplicateName, z.name, z.pos});
    }
    for (const AggTerm* t : spec.all_terms()) {
        if (!vars.count(t->var))
            errors.push_back({SemanticError::Kind::UnknownMetricRef, t->var, t->pos});
    }
    for (const auto& r : spec.reactions) {
        if (!r.from_zone.empty() && !zone_names.count(r.from_zone))
            errors.push_back({SemanticError::Kind::UnknownZoneRef, r.from_zone, r.pos});
        if (!r.to_zone.empty() && !zone_names.count(r.to_zone))
            errors.push_back({SemanticError::Kind::UnknownZoneRef, r.to_zone, r.pos});
    }
}

} // namespace

ParseResult parse(const std::string& text) {
    ParseResult result;
    Parser p(lex(text));
    result.spec = p.parse_program();
    validate(result.spec, result.errors);
    return result;
}

} // namespace netobs::measure
