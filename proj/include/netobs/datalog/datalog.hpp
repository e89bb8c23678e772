#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "netobs/nffg/nffg.hpp"

namespace netobs::datalog {

/// Ground value: constant symbol or number.
struct Value {
    bool is_num = false;
    double num = 0;
    std::string sym;

    static Value number(double d) { return {true, d, {}}; }
    static Value symbol(std::string s) { return {false, 0, std::move(s)}; }

    bool operator==(const Value& o) const {
        if (is_num != o.is_num) return false;
        return is_num ? num == o.num : sym == o.sym;
    }
    bool operator<(const Value& o) const {
        if (is_num != o.is_num) return is_num < o.is_num;
        return is_num ? num < o.num : sym < o.sym;
    }
    std::string str() const;
};

using Tuple = std::vector<Value>;

/// Variable (upper-case) or constant argument of an atom.
struct Term {
    bool is_var = false;
    std::string var;
    Value val;

    static Term variable(std::string name) { return {true, std::move(name), {}}; }
    static Term constant(Value v) { return {false, {}, std::move(v)}; }
};

struct Atom {
    std::string pred;
    std::vector<Term> terms;
    bool is_builtin() const { return pred.rfind("fn_", 0) == 0; }
};

struct Rule {
    Atom head;
    std::vector<Atom> body;
};

class UnsafeRule : public std::runtime_error {
public:
    explicit UnsafeRule(const std::string& why)
        : std::runtime_error("unsafe rule: " + why) {}
};
class NonTermination : public std::runtime_error {
public:
    explicit NonTermination(std::size_t cap)
        : std::runtime_error("evaluation exceeded " + std::to_string(cap) +
                             " iterations") {}
};
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& why)
        : std::runtime_error("rule parse error: " + why) {}
};

/// Parse rule text, one rule per line: `h(X,Y) :- p(X,Z), q(Z,Y).`
/// Comma and semicolon both separate body literals; `#` comments.
/// Upper-case initial = variable; quote constants that look like
/// variables ('SAP1'). Bare numbers are numeric constants.
std::vector<Rule> parse_rules(const std::string& text);

Atom parse_atom(const std::string& text);

struct EvalOptions {
    std::size_t max_iterations = 10000;
};

/// Extensional + derived fact store for one evaluation.
class Database {
public:
    void add(const std::string& pred, Tuple tuple);
    void add_facts(const std::vector<nffg::Fact>& facts);

    bool contains(const std::string& pred, const Tuple& tuple) const;
    const std::vector<Tuple>& rows(const std::string& pred) const;
    std::vector<std::string> predicates() const;
    std::size_t size() const;

private:
    struct Relation {
        std::vector<Tuple> rows;
        std::set<Tuple> seen;
    };
    std::map<std::string, Relation> rels_;
};

/// Least-fixed-point evaluation (semi-naive, bottom-up). Derived facts
/// are added to a copy of `facts`; the returned tuples are the matches
/// of `query` (order-independent set, sorted).
std::vector<Tuple> eval(const std::vector<Rule>& program, const Database& facts,
                        const Atom& query, const EvalOptions& opts = {});

/// Run the fixed point and return the whole database (facts + derived).
Database eval_all(const std::vector<Rule>& program, const Database& facts,
                  const EvalOptions& opts = {});

/// Matches of a ground/pattern atom against a database.
std::vector<Tuple> match(const Database& db, const Atom& query);

} // namespace netobs::datalog
