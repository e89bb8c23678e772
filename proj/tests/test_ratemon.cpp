#include <doctest.h>

#include <cmath>

#include "netobs/ratemon/ratemon.hpp"
#include "netobs/stats/rng.hpp"

using namespace netobs::ratemon;
using netobs::stats::Rng;

TEST_CASE("moment counter accumulates raw sums") {
    MomentCounter c;
    c.update(100);
    CHECK(c.s1_acc == 100);
    CHECK(c.s2_acc == 10000);
    CHECK(c.n == 1);

    MomentCounter d;
    d.update(50);
    d.update(150);
    CHECK(d.s1_acc == 200);
    CHECK(d.s2_acc == 25000);
    CHECK(d.n == 2);

    CHECK_THROWS_AS(c.update(-1.0), std::invalid_argument);
}

TEST_CASE("moment sanity: n * s2 >= s1^2 over random updates") {
    Rng rng(31);
    MomentCounter c;
    for (int i = 0; i < 5000; ++i) {
        c.update(rng.lognormal(3.0, 0.7));
        CHECK((double)c.n * c.s2_acc >= c.s1_acc * c.s1_acc * (1.0 - 1e-12));
    }
}

TEST_CASE("fit of a constant stream is a point mass") {
    MomentCounter c;
    for (int i = 0; i < 3; ++i) c.update(100);
    auto model = fit(c);
    CHECK(model.sigma == 0.0);
    CHECK(model.mu == doctest::Approx(4.605170185988092).epsilon(1e-12));
}

TEST_CASE("fit matches the closed-form worked example") {
    // m1 = 100, m2 = 12100: sigma^2 = ln 1.21, mu = ln 100 - sigma^2/2
    MomentCounter c;
    c.s1_acc = 200.0;
    c.s2_acc = 24200.0;
    c.n = 2;
    auto model = fit(c);
    CHECK(model.sigma * model.sigma == doctest::Approx(0.1906203596086497).epsilon(1e-12));
    CHECK(model.mu == doctest::Approx(4.509860006183767).epsilon(1e-12));
}

TEST_CASE("fit rejects degenerate inputs") {
    MomentCounter c;
    CHECK_THROWS_AS(fit(c), InsufficientSamples);
    c.update(0);
    c.update(0);
    CHECK_THROWS_AS(fit(c), NonPositiveMean);
}

TEST_CASE("fit recovers the parameters of a seeded log-normal stream") {
    Rng rng(424242);
    const double mu0 = 4.5, sigma0 = 0.4;
    MomentCounter c;
    for (int i = 0; i < 100000; ++i) c.update(rng.lognormal(mu0, sigma0));
    auto model = fit(c);
    CHECK(std::fabs(model.mu - mu0) < 0.02);
    CHECK(std::fabs(model.sigma - sigma0) < 0.02);
}

TEST_CASE("risk evaluates the exceedance probability") {
    SUBCASE("degenerate model is a step function") {
        LogNormalModel m{std::log(100.0), 0.0, 10};
        CHECK(risk(m, 200) == 0.0);
        CHECK(risk(m, 50) == 1.0);
        CHECK(risk(m, 100) == 0.5);
    }
    SUBCASE("worked example") {
        LogNormalModel m{4.509860006183767, 0.4366009157212679, 2};
        CHECK(risk(m, 200) == doctest::Approx(0.03546702230436544).epsilon(1e-9));
    }
    SUBCASE("median symmetry") {
        LogNormalModel m{3.2, 0.8, 10};
        CHECK(risk(m, std::exp(3.2)) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("monotonicity in level and in mu") {
        LogNormalModel m{4.0, 0.5, 10};
        double last = 1.1;
        for (double level = 10; level < 500; level *= 1.3) {
            double r = risk(m, level);
            CHECK(r < last);
            last = r;
        }
        LogNormalModel hi{4.2, 0.5, 10};
        CHECK(risk(hi, 100.0) > risk(m, 100.0));
    }
}

TEST_CASE("next_interval endpoints and the worked mid-point") {
    ScalingPolicy p;
    p.lb = 0.01;
    p.hb = 300;
    p.zeta = 1.8;
    CHECK(next_interval(0.0, p) == doctest::Approx(300.0).epsilon(1e-12));
    CHECK(next_interval(1.0, p) == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(next_interval(0.5, p) ==
          doctest::Approx(0.01469734485144637).epsilon(1e-12));
}

TEST_CASE("next_interval is strictly decreasing with exact endpoints") {
    Rng rng(777);
    for (int trial = 0; trial < 100; ++trial) {
        ScalingPolicy p;
        p.lb = rng.uniform(1e-3, 1.0);
        p.hb = p.lb * rng.uniform(10.0, 1000.0);
        p.zeta = rng.uniform(0.5, 5.0);
        CHECK(std::fabs(next_interval(0.0, p) - p.hb) < 1e-9);
        CHECK(std::fabs(next_interval(1.0, p) - p.lb) < 1e-9);
        double prev = next_interval(0.0, p);
        for (int i = 1; i <= 50; ++i) {
            double r = (double)i / 50.0;
            double t = next_interval(r, p);
            CHECK(t < prev);
            prev = t;
        }
    }
}

TEST_CASE("detector stays asleep on low traffic and alarms under load") {
    ScalingPolicy p;
    p.lb = 0.01;
    p.hb = 30;
    p.zeta = 1.8;
    p.capacity = 1e9;
    p.alarm_threshold = 0.01;
    Rng rng(5150);

    SUBCASE("10 percent of capacity: no alarms, interval converges to hb") {
        RateDetector det(p);
        double mu = std::log(0.1 * p.capacity) - 0.25 * 0.25 / 2;
        int estimates = 0;
        for (int i = 0; i < 300; ++i) {
            auto r = det.step(rng.lognormal(mu, 0.25));
            if (r.estimated) {
                ++estimates;
                CHECK(!r.alarm);
            }
        }
        CHECK(estimates == 10);
        CHECK(det.interval_s() == doctest::Approx(p.hb).epsilon(1e-6));
    }

    SUBCASE("sustained overload alarms and shortens the interval") {
        RateDetector det(p);
        double mu = std::log(1.2 * p.capacity) - 0.25 * 0.25 / 2;
        bool alarmed = false;
        for (int i = 0; i < 60 && !alarmed; ++i) {
            auto r = det.step(rng.lognormal(mu, 0.25));
            if (r.estimated && r.alarm) alarmed = true;
        }
        CHECK(alarmed);
        CHECK(det.interval_s() < 0.1);
    }
}

TEST_CASE("detector resets its counter each estimation period") {
    ScalingPolicy p;
    p.samples_per_estimate = 5;
    RateDetector det(p);
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 4; ++i) CHECK(!det.step(100).estimated);
        CHECK(det.step(100).estimated);
    }
}
