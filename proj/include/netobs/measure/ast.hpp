#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace netobs::measure {

struct SourcePos {
    int line = 0;
    int col = 0;
};

/// Argument value in a measurement or action call.
struct Value {
    enum class Kind { Ident, Number, String, Duration, Struct };
    Kind kind = Kind::Ident;
    std::string text;   // ident / string body / raw struct literal
    double number = 0;  // Number value, or Duration in seconds

    bool operator==(const Value& o) const {
        if (kind != o.kind) return false;
        if (kind == Kind::Number || kind == Kind::Duration)
            return number == o.number;
        return text == o.text;
    }
};

/// `ident` or `key=value` argument.
struct Arg {
    std::string key;  // empty for positional
    Value value;
    bool operator==(const Arg&) const = default;
};

struct MeasurementDecl {
    std::string var;
    std::string metric;
    std::vector<Arg> args;
    SourcePos pos;

    bool operator==(const MeasurementDecl& o) const {
        return var == o.var && metric == o.metric && args == o.args;
    }
};

enum class AggFunc { Avg, Min, Max, Sum, Count, Last };
enum class Cmp { Lt, Gt, Le, Ge, Eq, Ne };

const char* to_string(AggFunc f);
const char* to_string(Cmp c);

/// One comparison leaf: `Avg(m1, '300s') > 10.0` or `m1.age > 30s`.
struct AggTerm {
    AggFunc func = AggFunc::Last;
    std::string var;
    bool is_age = false;              // var.age form; func ignored
    std::optional<double> window_s;   // required for Avg/Min/Max/Sum/Count
    Cmp cmp = Cmp::Gt;
    double threshold = 0;             // percentages normalized to fractions
    SourcePos pos;

    bool operator==(const AggTerm& o) const {
        return func == o.func && var == o.var && is_age == o.is_age &&
               window_s == o.window_s && cmp == o.cmp && threshold == o.threshold;
    }
};

struct BoolExpr;
using BoolExprPtr = std::shared_ptr<BoolExpr>;

struct BoolExpr {
    enum class Kind { Term, And, Or, Not };
    Kind kind = Kind::Term;
    AggTerm term;              // Kind::Term
    std::vector<BoolExprPtr> children;  // And/Or: >=2, Not: 1

    static BoolExprPtr make_term(AggTerm t);
    static BoolExprPtr make(Kind k, std::vector<BoolExprPtr> kids);
};

bool equal(const BoolExpr& a, const BoolExpr& b);

struct ZoneDecl {
    std::string name;
    BoolExprPtr predicate;
    SourcePos pos;

    bool operator==(const ZoneDecl& o) const {
        return name == o.name && predicate && o.predicate &&
               equal(*predicate, *o.predicate);
    }
};

enum class TriggerKind { Transition, Enter, Leave, While };

struct ReactionDecl {
    TriggerKind trigger = TriggerKind::Transition;
    std::string from_zone;  // Transition, Leave
    std::string to_zone;    // Transition, Enter; While uses to_zone
    std::string action;
    std::vector<Arg> args;
    SourcePos pos;

    bool operator==(const ReactionDecl& o) const {
        return trigger == o.trigger && from_zone == o.from_zone &&
               to_zone == o.to_zone && action == o.action && args == o.args;
    }
};

struct MeasureSpec {
    std::vector<MeasurementDecl> measurements;
    std::vector<ZoneDecl> zones;
    std::vector<ReactionDecl> reactions;

    bool operator==(const MeasureSpec&) const = default;

    const MeasurementDecl* find_measurement(const std::string& var) const;
    const ZoneDecl* find_zone(const std::string& name) const;

    /// All AggTerm leaves under every zone predicate.
    std::vector<const AggTerm*> all_terms() const;
};

} // namespace netobs::measure
