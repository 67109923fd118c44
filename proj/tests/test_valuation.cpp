#include <doctest.h>

#include <cmath>
#include <random>

#include "qlr/error.hpp"
#include "qlr/valuation.hpp"

using namespace qlr;

namespace {

Interval iv(double a, double b) { return Interval::bounded(a, b); }

std::vector<Region> sample_intervals() {
    std::vector<Region> out;
    const double ends[] = {-1.0, 0.0, 0.5, 1.0, 2.0, 3.0};
    for (double lo : ends)
        for (double hi : ends)
            if (lo <= hi) out.push_back(iv(lo, hi));
    return out;
}

} // namespace

TEST_CASE("interval metric and diameter") {
    CHECK(uMetric(3, 1) == iv(1, 3));
    CHECK(uMetric(2, 2) == Interval::point(2));
    CHECK(diam(iv(-1, 2)) == 3.0);
    CHECK(diam(Interval::full()) == kInf);
    CHECK_THROWS_AS(diam(Interval::empty()), DomainError);
}

TEST_CASE("regions merge overlapping parts") {
    Region r = Region::of({iv(2, 3), iv(0, 1), iv(0.5, 1.5)});
    REQUIRE(r.parts().size() == 2);
    CHECK(r.parts()[0] == iv(0, 1.5));
    CHECK(lebesgue(r) == 2.5);
    CHECK(r.hull() == iv(0, 3));
    CHECK(region_subset(iv(0, 1), r));
    CHECK_FALSE(region_subset(iv(1, 2.5), r));
}

TEST_CASE("join valuations and their partial metrics") {
    auto D = diamValuation();
    auto L = lebesgueValuation();
    CHECK(inducedPartialMetric(D, iv(0, 1), iv(2, 3)) == 3.0);
    CHECK(inducedPartialMetric(L, iv(0, 1), iv(2, 3)) == 2.0);
    CHECK(inducedPartialMetric(D, iv(0, 1), iv(0, 1)) == 1.0);
    // submodularity is tight on overlapping intervals: 3 <= 2 + (2 - 1)
    auto a = iv(0, 2), b = iv(1, 3);
    CHECK(D.F(D.join(a, b)) == 3.0);
    CHECK(D.F(a) + (D.F(b) - D.F(D.meet(a, b))) == 3.0);

    auto s = sample_intervals();
    CHECK(checkJoinValuation(D, s).all_passed());
    std::vector<Region> u = s;
    u.push_back(Region::of({iv(0, 1), iv(2, 3)}));
    u.push_back(Region::of({iv(-1, 0), iv(0.5, 2)}));
    CHECK(checkJoinValuation(L, u).all_passed());

    CHECK(quotientEquiv(D, iv(0, 1), iv(0, 1)));
    CHECK_FALSE(quotientEquiv(D, iv(0, 1), iv(1, 2)));
}

TEST_CASE("partial metric triangle of the diameter valuation") {
    auto D = diamValuation();
    auto s = sample_intervals();
    for (const auto& a : s)
        for (const auto& b : s)
            for (const auto& c : s) {
                double lhs = inducedPartialMetric(D, a, b);
                double rhs = inducedPartialMetric(D, a, c) + inducedPartialMetric(D, c, b) - inducedPartialMetric(D, c, c);
                CHECK(lhs <= rhs + 1e-12);
            }
}

TEST_CASE("dual join valuations") {
    auto D = dualFromJoin(diamValuation());
    CHECK(D.D(iv(0, 1), iv(0, 3)) == 2.0);
    CHECK(D.D(iv(0, 3), iv(0, 1)) == 0.0);
    CHECK(dualMetric(D, iv(0, 1), iv(2, 3)) == 4.0);
    CHECK(dualEquiv(D, iv(0, 1), iv(0, 1)));
    CHECK_FALSE(dualEquiv(D, iv(0, 1), iv(0, 2)));
    CHECK(checkDualJoinValuation(D, sample_intervals()).all_passed());
}

TEST_CASE("lifted interval distances") {
    auto sin = [](double x) { return std::sin(x); };
    auto id = [](double x) { return x; };
    CHECK(liftedP(sin, id, 0.0, iv(-0.1, 0.1)) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(liftedP(sin, id, 0.0, Interval::full()) == kInf);
    CHECK(liftedP(id, id, 5.0, iv(4, 5)) == 1.0);

    // m = 2p(f,g) - p(f,f) - p(g,g) is a pseudo-metric on sampled functions
    std::vector<RealFn> fs = {sin, id, [](double x) { return x * x; }, [](double x) { return std::cos(3 * x); },
                              [](double) { return 0.4; }};
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int k = 0; k < 10; ++k) {
        double x = u(rng), lo = u(rng), hi = lo + std::abs(u(rng));
        Interval I = iv(lo, hi);
        for (const auto& f : fs) {
            CHECK(liftedM(f, f, x, I, 201) == doctest::Approx(0.0));
            for (const auto& g : fs) {
                CHECK(liftedM(f, g, x, I, 201) == doctest::Approx(liftedM(g, f, x, I, 201)));
                CHECK(liftedM(f, g, x, I, 201) >= -1e-12);
            }
        }
    }
}
