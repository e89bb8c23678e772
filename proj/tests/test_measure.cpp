#include <doctest.h>

#include <fstream>
#include <sstream>

#include "netobs/measure/bind.hpp"
#include "netobs/measure/parse.hpp"

using namespace netobs::measure;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(NETOBS_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("figure-24 style program parses into the expected shape") {
    auto result = parse(fixture("figure24.measure"));
    REQUIRE(result.ok());
    const MeasureSpec& spec = result.spec;
    REQUIRE(spec.measurements.size() == 2);
    CHECK(spec.measurements[0].var == "m1");
    CHECK(spec.measurements[0].metric == "oneway_latency");
    REQUIRE(spec.measurements[0].args.size() == 2);
    CHECK(spec.measurements[0].args[0].value.text == "SAP1");
    CHECK(spec.measurements[1].var == "m2");

    REQUIRE(spec.zones.size() == 4);
    CHECK(spec.zones[0].name == "z1");
    REQUIRE(spec.zones[0].predicate->kind == BoolExpr::Kind::Term);
    const AggTerm& t1 = spec.zones[0].predicate->term;
    CHECK(t1.func == AggFunc::Avg);
    CHECK(t1.var == "m1");
    CHECK(*t1.window_s == 300.0);
    CHECK(t1.cmp == Cmp::Gt);
    CHECK(t1.threshold == 10.0);

    // percentage literal normalized to a fraction
    const AggTerm& t3 = spec.zones[2].predicate->term;
    CHECK(*t3.window_s == 60.0);
    CHECK(t3.threshold == doctest::Approx(0.9));

    REQUIRE(spec.reactions.size() == 2);
    CHECK(spec.reactions[0].trigger == TriggerKind::Transition);
    CHECK(spec.reactions[0].from_zone == "z3");
    CHECK(spec.reactions[0].to_zone == "z4");
    CHECK(spec.reactions[0].action == "Publish");
    REQUIRE(spec.reactions[0].args.size() == 2);
    CHECK(spec.reactions[0].args[0].key == "topic");
    CHECK(spec.reactions[0].args[1].value.text == "Warning CPU");
}

TEST_CASE("liveness program with age accessor and section aliases parses") {
    auto result = parse(fixture("liveness.measure"));
    REQUIRE(result.ok());
    const MeasureSpec& spec = result.spec;
    REQUIRE(spec.measurements.size() == 1);
    CHECK(spec.measurements[0].metric == "fromVNF");
    REQUIRE(spec.measurements[0].args.size() == 2);
    CHECK(spec.measurements[0].args[1].value.kind == Value::Kind::Struct);

    REQUIRE(spec.zones.size() == 2);
    CHECK(spec.zones[0].predicate->term.is_age);
    CHECK(spec.zones[0].predicate->term.threshold == 30.0);

    REQUIRE(spec.reactions.size() == 1);
    CHECK(spec.reactions[0].trigger == TriggerKind::Transition);
    CHECK(spec.reactions[0].from_zone == "z2");
    CHECK(spec.reactions[0].to_zone == "z1");
}

TEST_CASE("empty sections give an empty spec") {
    auto result = parse("measurement { } zones { } reaction { }");
    REQUIRE(result.ok());
    CHECK(result.spec.measurements.empty());
    CHECK(result.spec.zones.empty());
    CHECK(result.spec.reactions.empty());
}

TEST_CASE("unknown metric variable is a collected semantic error") {
    auto result = parse(fixture("bad_ref.measure"));
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].kind == SemanticError::Kind::UnknownMetricRef);
    CHECK(result.errors[0].name == "mX");
}

TEST_CASE("unknown zone in a reaction is a collected semantic error") {
    auto result = parse(
        "measurement { m = f(); } zones { z = Last(m) > 1; } "
        "reaction { z->zz: Publish(topic=t); }");
    REQUIRE(result.errors.size() == 1);
    CHECK(result.errors[0].kind == SemanticError::Kind::UnknownZoneRef);
    CHECK(result.errors[0].name == "zz");
}

TEST_CASE("duplicate names are collected") {
    auto r1 = parse("measurement { m = f(); m = g(); } zones { } reaction { }");
    REQUIRE(r1.errors.size() == 1);
    CHECK(r1.errors[0].kind == SemanticError::Kind::DuplicateName);

    auto r2 = parse(
        "measurement { m = f(); } "
        "zones { z = Last(m) > 1; z = Last(m) < 1; } reaction { }");
    REQUIRE(r2.errors.size() == 1);
    CHECK(r2.errors[0].name == "z");
}

TEST_CASE("round trip: parse(serialize(s)) == s on the corpus") {
    for (const char* file : {"figure24.measure", "liveness.measure",
                             "elastic_router.measure"}) {
        auto first = parse(fixture(file));
        REQUIRE(first.ok());
        std::string canonical = serialize(first.spec);
        auto second = parse(canonical);
        REQUIRE(second.ok());
        CHECK(first.spec == second.spec);
        // serialization is a fixed point
        CHECK(serialize(second.spec) == canonical);
    }
}

TEST_CASE("canonical serialization rewrites windows in seconds") {
    auto result = parse(
        "measurement { m = f(); } zones { z = Avg(m, '5 minutes') > 1; } reaction { }");
    REQUIRE(result.ok());
    CHECK(serialize(result.spec).find("'300s'") != std::string::npos);
}

TEST_CASE("percentage and fraction thresholds are the same AggTerm") {
    auto pct = parse("measurement { m = f(); } zones { z = Avg(m, '60s') > 90%; } reaction { }");
    auto frac = parse("measurement { m = f(); } zones { z = Avg(m, '60s') > 0.9; } reaction { }");
    REQUIRE(pct.ok());
    REQUIRE(frac.ok());
    CHECK(pct.spec == frac.spec);
}

TEST_CASE("zero or negative windows are rejected at parse time") {
    CHECK_THROWS_AS(
        parse("measurement { m = f(); } zones { z = Avg(m, '0s') > 1; } reaction { }"),
        SyntaxError);
    CHECK_THROWS_AS(
        parse("measurement { m = f(); } zones { z = Avg(m, '-5s') > 1; } reaction { }"),
        SyntaxError);
}

TEST_CASE("duration units cover ms through hours") {
    auto r = parse(
        "measurement { m = f(); } zones {"
        " a = Avg(m, 10ms) > 1; b = Avg(m, '2 m') > 1;"
        " c = Avg(m, '1 hour') > 1; d = Avg(m, 45s) > 1; } reaction { }");
    REQUIRE(r.ok());
    CHECK(*r.spec.zones[0].predicate->term.window_s == doctest::Approx(0.01));
    CHECK(*r.spec.zones[1].predicate->term.window_s == doctest::Approx(120));
    CHECK(*r.spec.zones[2].predicate->term.window_s == doctest::Approx(3600));
    CHECK(*r.spec.zones[3].predicate->term.window_s == doctest::Approx(45));
}

TEST_CASE("boolean combinators with not > and > or precedence") {
    auto r = parse(
        "measurement { m = f(); n = g(); } zones {"
        " z = Last(m) > 1 and Last(n) > 2 or not Last(m) < 0; } reaction { }");
    REQUIRE(r.ok());
    const BoolExpr& top = *r.spec.zones[0].predicate;
    REQUIRE(top.kind == BoolExpr::Kind::Or);
    REQUIRE(top.children.size() == 2);
    CHECK(top.children[0]->kind == BoolExpr::Kind::And);
    CHECK(top.children[1]->kind == BoolExpr::Kind::Not);
}

TEST_CASE("syntax errors carry line and column") {
    try {
        parse("measurement {\n  m1 = ;\n} zones { } reaction { }");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.pos().line == 2);
        CHECK(e.pos().col > 1);
        CHECK(format_diagnostic("f.measure", e.pos(), e.what()).rfind("f.measure:2:", 0) == 0);
    }
}

TEST_CASE("enter, leave and while reaction spellings") {
    auto r = parse(
        "measurement { m = f(); } zones { z = Last(m) > 1; } reaction {"
        " ->z: Publish(topic=a); z->: Log(msg=\"left\"); in z: Log(msg=\"still\"); }");
    REQUIRE(r.ok());
    REQUIRE(r.spec.reactions.size() == 3);
    CHECK(r.spec.reactions[0].trigger == TriggerKind::Enter);
    CHECK(r.spec.reactions[1].trigger == TriggerKind::Leave);
    CHECK(r.spec.reactions[2].trigger == TriggerKind::While);
}

TEST_CASE("binding resolves positional identifiers against entity ids") {
    auto spec = parse(fixture("figure24.measure")).spec;

    SUBCASE("all present") {
        auto report = bind(spec, {"SAP1", "SAP2", "FW1"});
        CHECK(report.unresolved.empty());
        CHECK(report.resolved.size() == 3);
    }
    SUBCASE("empty graph leaves every name unresolved") {
        auto report = bind(spec, {});
        CHECK(report.resolved.empty());
        REQUIRE(report.unresolved.size() == 3);
    }
    SUBCASE("key=value arguments are not bound") {
        auto kv = parse(
            "measurement { m = f(level=high, n=3); } zones { } reaction { }");
        REQUIRE(kv.ok());
        auto report = bind(kv.spec, {});
        CHECK(report.resolved.empty());
        CHECK(report.unresolved.empty());
    }
}
