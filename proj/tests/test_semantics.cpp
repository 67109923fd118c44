#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qlr/corpus.hpp"
#include "qlr/error.hpp"
#include "qlr/quantale.hpp"
#include "qlr/semantics.hpp"
#include "qlr/suites.hpp"

using namespace qlr;

namespace {

ValueP val(const std::string& src) { return denote(parse_term(src)); }

double at(const ValueP& f, double x) { return as_real(apply_fn(f, real_value(x))); }

double dist1(const ValueP& f, const ValueP& g, double x, double r, std::size_t grid = kDefaultGrid) {
    Probe p[] = {{x, r}};
    return distD(f, g, p, grid);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kUnary[] = {"\\x:Real. sin x", "\\x:Real. x", "\\x:Real. mul x x", "\\x:Real. abs (add x -0.5)",
                        "\\x:Real. cos (mul 2.0 x)", "\\x:Real. max x (mul 0.5 x)"};

} // namespace

TEST_CASE("evaluation") {
    CHECK(as_real(val("(\\x:Real. add x 1.0) 2.0")) == 3.0);
    CHECK(to_string(val("(1.0, 2.0)")) == "(1.0, 2.0)");
    CHECK(at(val("\\x:Real. sin x"), 0.0) == 0.0);
    CHECK(at(val("(\\f:Real->Real. \\x:Real. f (f x)) (\\y:Real. mul y 3.0)"), 0.5) == 4.5);
    CHECK_THROWS_AS(val("y"), DomainError);
}

TEST_CASE("sampled distances against the grid oracle") {
    auto sin = val("\\x:Real. sin x"), id = val("\\x:Real. x");
    CHECK(dist1(sin, sin, 0.0, 0.1) == doctest::Approx(std::sin(0.1)).epsilon(1e-12));
    CHECK(dist1(sin, sin, 0.0, 0.1) == doctest::Approx(0.0998334166468).epsilon(1e-10));
    CHECK(dist1(sin, id, 0.0, std::numbers::pi / 2) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-12));
    auto fs = [](double x) { return std::sin(x); };
    auto fi = [](double x) { return x; };
    for (double x : {-1.0, 0.0, 0.4, 2.0})
        for (double r : {0.0, 0.1, 1.0})
            CHECK(dist1(sin, id, x, r) == doctest::Approx(oracle::grid_sup(fs, fi, x, r)).epsilon(1e-6));
    Probe inf[] = {{0.0, kInf}};
    CHECK_THROWS_AS(distD(sin, id, inf), DomainError);
}

TEST_CASE("grid refinement never lowers the sampled distance") {
    for (const char* a : kUnary)
        for (const char* b : kUnary) {
            auto f = val(a), g = val(b);
            for (double x : {-0.7, 0.0, 1.3})
                for (double r : {0.05, 0.5, 1.5})
                    for (std::size_t n : {3, 11, 101}) CHECK(dist1(f, g, x, r, n) <= dist1(f, g, x, r, 2 * n - 1));
        }
}

TEST_CASE("the function distance satisfies the plain triangle law") {
    for (const char* a : kUnary)
        for (const char* b : kUnary)
            for (const char* c : kUnary) {
                auto f = val(a), g = val(b), h = val(c);
                for (double x : {-0.7, 0.0, 1.3})
                    for (double r : {0.0, 0.3, 1.0})
                        CHECK(dist1(f, g, x, r, 201) <= dist1(f, h, x, r, 201) + dist1(h, g, x, r, 201) + 1e-12);
            }
}

TEST_CASE("derivatives bound the variation of open terms") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1, 1);
    const char* bodies[] = {"sin x", "mul x x", "add (sin x) (cos x)", "abs (mul 3.0 x)", "max x (min x 0.5)",
                            "(\\y:Real. mul y (sin y)) (add x 1.0)"};
    for (const char* b : bodies) {
        auto t = parse_term(b);
        for (double x : {-1.5, 0.0, 0.8})
            for (double a : {0.0, 0.05, 0.4}) {
                SemEnv env{{"x", real_value(x), real_diff(a), nullptr}};
                double bound = as_real(derivQ(t, env));
                double fx = as_real(denote(t, env));
                for (int k = 0; k < 200; ++k) {
                    SemEnv e2{{"x", real_value(x + a * u(rng)), nullptr, nullptr}};
                    CHECK(std::abs(as_real(denote(t, e2)) - fx) <= bound + 1e-12);
                }
            }
    }
}

TEST_CASE("beta steps preserve both components on a few corpus terms") {
    for (const auto& e : soundness_corpus()) {
        if (e.name != "twice-sin" && e.name != "pair-sum" && e.name != "sin-cos-product") continue;
        auto t = parse_term(e.source);
        auto ty = typecheck(t);
        auto u = *beta_step(t);
        for (std::size_t p = 0; p < 16; ++p) {
            auto a = observe(denote(t), ty, p), b = observe(denote(u), ty, p);
            auto da = observe(derivQ(t), ty, p), db = observe(derivQ(u), ty, p);
            for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
            for (std::size_t i = 0; i < da.size(); ++i) CHECK(da[i] == doctest::Approx(db[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("reflexive self-distance is zero and the Q self-distance is below the derivative") {
    auto t = parse_term("\\x:Real. mul (sin x) x");
    auto ty = typecheck(t);
    auto v = denote(t);
    auto self = distance_diff(v, v, ty, false, 401);
    auto selfr = distance_diff(v, v, ty, true, 401);
    auto dt = derivQ(t);
    for (std::size_t p = 0; p < 32; ++p) {
        CHECK(observe(selfr, ty, p)[0] == 0.0);
        CHECK(observe(self, ty, p)[0] <= observe(dt, ty, p)[0] + 1e-12);
    }
    CHECK_THROWS_AS(distance_diff(v, v, parse_type("(Real -> Real) -> Real")), UnsupportedOperation);
}

TEST_CASE("contextual bounds") {
    auto sin = parse_term("\\x:Real. sin x"), id = parse_term("\\x:Real. x");
    auto at0 = contextualityBound(parse_term("[] 0.0"), sin, id);
    CHECK(at0.actual == 0.0);
    CHECK(at0.holds());
    auto b = contextualityBound(parse_term("[] x"), sin, id, {{"x", 0.0, 0.1}});
    CHECK(b.bound == doctest::Approx(0.1).epsilon(1e-9));
    CHECK(b.bound <= 0.2);
    CHECK(b.holds());
    auto br = contextualityBound(parse_term("[] x"), sin, id, {{"x", 0.0, 0.1}}, Model::Qr);
    CHECK(br.holds());
    auto sq = contextualityBound(parse_term("mul ([] x) 2.0"), sin, id, {{"x", 0.5, 0.2}});
    CHECK(sq.holds());
    CHECK_THROWS_AS(contextualityBound(parse_term("[] 0.0"), parse_term("\\x:Real. \\y:Real. x"),
                                       parse_term("\\x:Real. \\y:Real. y")),
                    TypeError);
    CHECK_THROWS_AS(contextualityBound(parse_term("[] 0.0"), sin, parse_term("(1.0, 2.0)")), TypeError);
}

TEST_CASE("figure 1 rows") {
    auto cmp = [](char which, double r) {
        auto F = fig1_functions(which);
        auto row = reproduceFig1(which, 0.0, r);
        CHECK(row.d_fg == doctest::Approx(oracle::grid_sup(F.f, F.g, 0.0, r)).epsilon(1e-6));
        CHECK(row.d_hh == doctest::Approx(oracle::grid_sup(F.h, F.h, 0.0, r)).epsilon(1e-6));
        return row;
    };
    auto a0 = cmp('a', 0.0), a2 = cmp('a', 2.0), b0 = cmp('b', 0.0), b2 = cmp('b', 2.0);
    CHECK_FALSE(a0.violated);
    CHECK(a2.violated);
    CHECK_FALSE(b0.violated);
    CHECK(b2.violated);
    const double c2 = std::cos(2.0);
    CHECK(a2.d_fg == doctest::Approx(1.95 - 0.8 * c2).epsilon(1e-9));
    CHECK(a2.d_fh == doctest::Approx(1.15).epsilon(1e-9));
    CHECK(a2.d_hh == doctest::Approx(0.8 - 0.8 * c2).epsilon(1e-9));
    CHECK(b2.d_fg == doctest::Approx(2.3).epsilon(1e-9));
    CHECK(b2.d_fh == 0.0);
    auto j = to_json(a2);
    CHECK(j["violated"] == true);
    CHECK(j.contains("d_hg"));
}

TEST_CASE("figure 1 CSV matches the golden file") {
    CHECK(fig1_golden_csv() == read_file(std::string(QLR_TEST_DIR) + "/golden/fig1.csv"));
    auto csv = fig1_golden_csv();
    CHECK(csv.rfind("# qlr-fig1 v1 figure=a distance=d\nx,r,d_fg,d_fh,d_hg,d_hh,violated\n", 0) == 0);
}

TEST_CASE("non-additivity of the derivative") {
    auto w = nonAdditivityWitness();
    CHECK(w.f1 == 1.0);
    CHECK(w.f2 == 4.0);
    CHECK(w.g1 == 2.0);
    CHECK(w.g2 == 2.0);
    CHECK(w.superadditive());
    CHECK(w.subadditive());
}
