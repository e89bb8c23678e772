#include "netobs/datalog/datalog.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace netobs::datalog {

std::string Value::str() const {
    if (!is_num) return sym;
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, num);
    (void)ec;
    return std::string(buf, ptr);
}

void Database::add(const std::string& pred, Tuple tuple) {
    auto& rel = rels_[pred];
    if (rel.seen.insert(tuple).second) rel.rows.push_back(std::move(tuple));
}

void Database::add_facts(const std::vector<nffg::Fact>& facts) {
    for (const auto& f : facts) {
        Tuple t;
        t.reserve(f.args.size());
        for (const auto& a : f.args) t.push_back(Value::symbol(a));
        add(f.pred, std::move(t));
    }
}

bool Database::contains(const std::string& pred, const Tuple& tuple) const {
    auto it = rels_.find(pred);
    return it != rels_.end() && it->second.seen.count(tuple);
}

const std::vector<Tuple>& Database::rows(const std::string& pred) const {
    static const std::vector<Tuple> empty;
    auto it = rels_.find(pred);
    return it == rels_.end() ? empty : it->second.rows;
}

std::vector<std::string> Database::predicates() const {
    std::vector<std::string> out;
    out.reserve(rels_.size());
    for (const auto& [name, rel] : rels_) {
        (void)rel;
        out.push_back(name);
    }
    return out;
}

std::size_t Database::size() const {
    std::size_t n = 0;
    for (const auto& [name, rel] : rels_) {
        (void)name;
        n += rel.rows.size();
    }
    return n;
}

// ---------------------------------------------------------------------------
// Rule text parsing

namespace {

struct TextCursor {
    const std::string& s;
    size_t i = 0;

    void skip_ws() {
        while (i < s.size() && std::isspace((unsigned char)s[i])) ++i;
    }
    bool eat(char c) {
        skip_ws();
        if (i < s.size() && s[i] == c) { ++i; return true; }
        return false;
    }
    bool eat(const char* lit) {
        skip_ws();
        size_t n = std::strlen(lit);
        if (s.compare(i, n, lit) == 0) { i += n; return true; }
        return false;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
};

bool name_char(char c) {
    return std::isalnum((unsigned char)c) || c == '_' || c == '-' || c == '.';
}

std::string read_name(TextCursor& cur) {
    cur.skip_ws();
    std::string out;
    while (cur.i < cur.s.size() && name_char(cur.s[cur.i])) out.push_back(cur.s[cur.i++]);
    if (out.empty()) throw ParseError("expected a name near '" + cur.s.substr(cur.i, 12) + "'");
    return out;
}

Term read_term(TextCursor& cur) {
    cur.skip_ws();
    if (cur.i < cur.s.size() && cur.s[cur.i] == '\'') {
        ++cur.i;
        std::string lit;
        while (cur.i < cur.s.size() && cur.s[cur.i] != '\'') lit.push_back(cur.s[cur.i++]);
        if (cur.i >= cur.s.size()) throw ParseError("unterminated quoted constant");
        ++cur.i;
        return Term::constant(Value::symbol(lit));
    }
    if (cur.i < cur.s.size() &&
        (std::isdigit((unsigned char)cur.s[cur.i]) ||
         (cur.s[cur.i] == '-' && cur.i + 1 < cur.s.size() &&
          std::isdigit((unsigned char)cur.s[cur.i + 1])))) {
        size_t start = cur.i;
        if (cur.s[cur.i] == '-') ++cur.i;
        while (cur.i < cur.s.size() &&
               (std::isdigit((unsigned char)cur.s[cur.i]) || cur.s[cur.i] == '.' ||
                cur.s[cur.i] == 'e' || cur.s[cur.i] == 'E' || cur.s[cur.i] == '+'))
            ++cur.i;
        return Term::constant(Value::number(std::stod(cur.s.substr(start, cur.i - start))));
    }
    std::string name = read_name(cur);
    if (std::isupper((unsigned char)name[0])) return Term::variable(name);
    return Term::constant(Value::symbol(name));
}

Atom read_atom(TextCursor& cur) {
    Atom a;
    a.pred = read_name(cur);
    if (!cur.eat('(')) throw ParseError("expected '(' after predicate '" + a.pred + "'");
    if (!cur.eat(')')) {
        a.terms.push_back(read_term(cur));
        while (cur.eat(',')) a.terms.push_back(read_term(cur));
        if (!cur.eat(')')) throw ParseError("expected ')' in atom '" + a.pred + "'");
    }
    return a;
}

void check_safe(const Rule& rule) {
    std::unordered_set<std::string> body_vars;
    for (const auto& atom : rule.body)
        for (const auto& t : atom.terms)
            if (t.is_var) body_vars.insert(t.var);
    for (const auto& t : rule.head.terms)
        if (t.is_var && !body_vars.count(t.var))
            throw UnsafeRule("head variable '" + t.var + "' not bound in body of '" +
                             rule.head.pred + "'");
}

} // namespace

Atom parse_atom(const std::string& text) {
    TextCursor cur{text};
    Atom a = read_atom(cur);
    cur.eat('.');
    if (!cur.done()) throw ParseError("trailing input after atom");
    return a;
}

std::vector<Rule> parse_rules(const std::string& text) {
    std::vector<Rule> rules;
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        TextCursor cur{line};
        if (cur.done()) continue;
        Rule r;
        r.head = read_atom(cur);
        if (cur.eat(":-") || cur.eat("<-")) {
            r.body.push_back(read_atom(cur));
            while (cur.eat(',') || cur.eat(';')) r.body.push_back(read_atom(cur));
        }
        cur.eat('.');
        if (!cur.done())
            throw ParseError("trailing input in rule '" + line + "'");
        check_safe(r);
        rules.push_back(std::move(r));
    }
    return rules;
}

// ---------------------------------------------------------------------------
// Semi-naive evaluation

namespace {

using Bindings = std::unordered_map<std::string, Value>;

bool unify(const Atom& atom, const Tuple& row, Bindings& env,
           std::vector<std::string>& bound_here) {
    if (atom.terms.size() != row.size()) return false;
    for (size_t i = 0; i < row.size(); ++i) {
        const Term& t = atom.terms[i];
        if (!t.is_var) {
            if (!(t.val == row[i])) return false;
            continue;
        }
        auto it = env.find(t.var);
        if (it != env.end()) {
            if (!(it->second == row[i])) return false;
        } else {
            env.emplace(t.var, row[i]);
            bound_here.push_back(t.var);
        }
    }
    return true;
}

void unbind(Bindings& env, const std::vector<std::string>& names) {
    for (const auto& n : names) env.erase(n);
}

// Builtin function atoms: numeric arithmetic fn_add/_sub/_mul/_div and
// fn_min/_max bind their final argument; comparisons filter.
bool eval_builtin(const Atom& atom, Bindings& env,
                  std::vector<std::string>& bound_here) {
    auto value_of = [&](const Term& t) -> const Value* {
        if (!t.is_var) return &t.val;
        auto it = env.find(t.var);
        return it == env.end() ? nullptr : &it->second;
    };
    auto need_num = [&](const Term& t) -> double {
        const Value* v = value_of(t);
        if (!v) throw UnsafeRule("builtin '" + atom.pred + "' input not bound");
        if (!v->is_num) throw UnsafeRule("builtin '" + atom.pred + "' needs a number");
        return v->num;
    };
    auto bind_or_check = [&](const Term& t, const Value& result) {
        if (!t.is_var) return t.val == result;
        auto it = env.find(t.var);
        if (it != env.end()) return it->second == result;
        env.emplace(t.var, result);
        bound_here.push_back(t.var);
        return true;
    };
    auto arity = [&](size_t n) {
        if (atom.terms.size() != n)
            throw UnsafeRule("builtin '" + atom.pred + "' expects " +
                             std::to_string(n) + " arguments");
    };

    const std::string& f = atom.pred;
    if (f == "fn_add" || f == "fn_sub" || f == "fn_mul" || f == "fn_div" ||
        f == "fn_min" || f == "fn_max") {
        arity(3);
        double a = need_num(atom.terms[0]);
        double b = need_num(atom.terms[1]);
        double r = 0;
        if (f == "fn_add") r = a + b;
        else if (f == "fn_sub") r = a - b;
        else if (f == "fn_mul") r = a * b;
        else if (f == "fn_div") r = a / b;
        else if (f == "fn_min") r = std::min(a, b);
        else r = std::max(a, b);
        return bind_or_check(atom.terms[2], Value::number(r));
    }
    if (f == "fn_lt" || f == "fn_le" || f == "fn_gt" || f == "fn_ge") {
        arity(2);
        double a = need_num(atom.terms[0]);
        double b = need_num(atom.terms[1]);
        if (f == "fn_lt") return a < b;
        if (f == "fn_le") return a <= b;
        if (f == "fn_gt") return a > b;
        return a >= b;
    }
    if (f == "fn_eq" || f == "fn_ne") {
        arity(2);
        const Value* a = value_of(atom.terms[0]);
        const Value* b = value_of(atom.terms[1]);
        if (!a || !b) throw UnsafeRule("builtin '" + f + "' inputs not bound");
        bool eq = *a == *b;
        return f == "fn_eq" ? eq : !eq;
    }
    throw UnsafeRule("unknown builtin '" + f + "'");
}

struct EvalState {
    Database db;
    std::unordered_map<std::string, std::vector<Tuple>> delta;
    std::unordered_set<std::string> idb;  // predicates any rule derives
};

// Joins the rule body left to right; `delta_pos` forces one body atom to
// range over the last iteration's new tuples only.
void fire_rule(EvalState& st, const Rule& rule, int delta_pos,
               std::vector<std::pair<std::string, Tuple>>& out) {
    Bindings env;
    std::function<void(size_t)> walk = [&](size_t idx) {
        if (idx == rule.body.size()) {
            Tuple t;
            t.reserve(rule.head.terms.size());
            for (const auto& term : rule.head.terms) {
                if (term.is_var) {
                    auto it = env.find(term.var);
                    if (it == env.end())
                        throw UnsafeRule("head variable '" + term.var + "' unbound");
                    t.push_back(it->second);
                } else {
                    t.push_back(term.val);
                }
            }
            out.emplace_back(rule.head.pred, std::move(t));
            return;
        }
        const Atom& atom = rule.body[idx];
        if (atom.is_builtin()) {
            std::vector<std::string> bound;
            if (eval_builtin(atom, env, bound)) walk(idx + 1);
            unbind(env, bound);
            return;
        }
        const std::vector<Tuple>* rows;
        if ((int)idx == delta_pos) {
            auto it = st.delta.find(atom.pred);
            rows = it == st.delta.end() ? nullptr : &it->second;
        } else {
            rows = &st.db.rows(atom.pred);
        }
        if (!rows) return;
        for (const Tuple& row : *rows) {
            std::vector<std::string> bound;
            if (unify(atom, row, env, bound)) walk(idx + 1);
            unbind(env, bound);
        }
    };
    walk(0);
}

} // namespace

Database eval_all(const std::vector<Rule>& program, const Database& facts,
                  const EvalOptions& opts) {
    for (const auto& r : program) {
        std::unordered_set<std::string> body_vars;
        for (const auto& atom : r.body)
            for (const auto& t : atom.terms)
                if (t.is_var) body_vars.insert(t.var);
        for (const auto& t : r.head.terms)
            if (t.is_var && !body_vars.count(t.var))
                throw UnsafeRule("head variable '" + t.var + "' not bound");
    }

    EvalState st;
    st.db = facts;
    for (const auto& r : program) st.idb.insert(r.head.pred);

    // Round 0: every rule over the base facts.
    std::vector<std::pair<std::string, Tuple>> produced;
    for (const auto& r : program) fire_rule(st, r, -1, produced);

    std::size_t iterations = 0;
    for (;;) {
        std::unordered_map<std::string, std::vector<Tuple>> fresh;
        for (auto& [pred, tuple] : produced) {
            if (!st.db.contains(pred, tuple)) {
                st.db.add(pred, tuple);
                fresh[pred].push_back(tuple);
            }
        }
        produced.clear();
        if (fresh.empty()) break;
        if (++iterations > opts.max_iterations) throw NonTermination(opts.max_iterations);
        st.delta = std::move(fresh);

        for (const auto& r : program) {
            for (size_t j = 0; j < r.body.size(); ++j) {
                const Atom& atom = r.body[j];
                if (atom.is_builtin() || !st.idb.count(atom.pred)) continue;
                if (!st.delta.count(atom.pred)) continue;
                fire_rule(st, r, (int)j, produced);
            }
        }
    }
    return st.db;
}

std::vector<Tuple> match(const Database& db, const Atom& query) {
    std::vector<Tuple> out;
    for (const Tuple& row : db.rows(query.pred)) {
        Bindings env;
        std::vector<std::string> bound;
        if (unify(query, row, env, bound)) out.push_back(row);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<Tuple> eval(const std::vector<Rule>& program, const Database& facts,
                        const Atom& query, const EvalOptions& opts) {
    Database db = eval_all(program, facts, opts);
    return match(db, query);
}

} // namespace netobs::datalog
