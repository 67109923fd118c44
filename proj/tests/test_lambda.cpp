#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qlr/error.hpp"
#include "qlr/lambda.hpp"

using namespace qlr;

namespace {

std::string type_of(const std::string& src) { return to_string(typecheck(parse_term(src))); }

TermP nf(const std::string& src, Strategy s = Strategy::NormalOrder) { return normalize(parse_term(src), s).term; }

// Random well-typed closed terms of type Real built from redex-rich shapes.
TermP random_real_term(std::mt19937_64& rng, int depth, std::vector<std::string>& scope) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 6);
    std::uniform_int_distribution<int> small(-3, 3);
    switch (pick(rng)) {
    case 0:
        return mk_const(small(rng));
    case 1:
        if (!scope.empty()) return mk_var(scope[std::uniform_int_distribution<std::size_t>(0, scope.size() - 1)(rng)]);
        return mk_const(small(rng) * 0.5);
    case 2: {
        std::string x = "x" + std::to_string(scope.size());
        scope.push_back(x);
        auto body = random_real_term(rng, depth - 1, scope);
        scope.pop_back();
        return mk_app(mk_lam(x, real_type(), body), random_real_term(rng, depth - 1, scope));
    }
    case 3:
        return mk_app(mk_prim(lookup_primitive("sin")), random_real_term(rng, depth - 1, scope));
    case 4:
        return mk_apps(mk_prim(lookup_primitive("add")),
                       {random_real_term(rng, depth - 1, scope), random_real_term(rng, depth - 1, scope)});
    case 5:
        return mk_proj(1, mk_pair(random_real_term(rng, depth - 1, scope), random_real_term(rng, depth - 1, scope)));
    default: {
        // (\f:Real->Real. f e) (\y:Real. e')
        std::string y = "y" + std::to_string(scope.size());
        scope.push_back(y);
        auto inner = random_real_term(rng, depth - 1, scope);
        scope.pop_back();
        auto fn = mk_lam("f", arrow_type(real_type(), real_type()),
                         mk_app(mk_var("f"), random_real_term(rng, depth - 1, scope)));
        return mk_app(fn, mk_lam(y, real_type(), inner));
    }
    }
}

} // namespace

TEST_CASE("parser accepts the documented shapes") {
    CHECK(type_of("\\x:Real. sin x") == "Real -> Real");
    CHECK(type_of("fst (3.0, \\y:Real. y)") == "Real");
    CHECK(type_of("\\f:Real->Real. f 0.0") == "(Real -> Real) -> Real");
    CHECK(type_of("\\p:Real*Real. add (fst p) (snd p)") == "Real * Real -> Real");
    CHECK(type_of("affine[2.0,1.0]") == "Real -> Real");
    CHECK(type_of("mul") == "Real -> Real -> Real");
    CHECK(type_of("-- comment\n(1.0, -2.5e1) -- trailing") == "Real * Real");
    CHECK(to_string(parse_type("Real -> Real -> Real")) == "Real -> Real -> Real");
    CHECK(to_string(parse_type("(Real -> Real) * Real")) == "(Real -> Real) * Real");
}

TEST_CASE("binders shadow primitive names") {
    auto t = parse_term("\\sin:Real. sin");
    CHECK(t->a->kind == Term::Kind::Var);
    CHECK(type_of("\\sin:Real. sin") == "Real -> Real");
}

TEST_CASE("syntax errors carry positions") {
    try {
        parse_term("\\x:Real.\n  (x, ");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 7);
    }
    CHECK_THROWS_AS(parse_term("affine 1.0"), SyntaxError); // missing parameters
    CHECK_THROWS_AS(parse_term("x $"), SyntaxError);
    CHECK_THROWS_AS(parse_type("Real ->"), SyntaxError);
}

TEST_CASE("type errors") {
    try {
        typecheck(parse_term("\\x:Real. x x"));
        FAIL("expected a type error");
    } catch (const TypeError& e) {
        CHECK(e.line() == 1);
        CHECK(e.column() == 10);
    }
    CHECK_THROWS_AS(typecheck(parse_term("fst 1.0")), TypeError);
    CHECK_THROWS_AS(typecheck(parse_term("sin (1.0, 2.0)")), TypeError);
    CHECK_THROWS_AS(typecheck(parse_term("y")), TypeError);
    CHECK_THROWS_AS(typecheck(parse_term("[] 0.0")), TypeError);
    CHECK(to_string(typecheck(parse_term("[] 0.0"), {}, arrow_type(real_type(), real_type()))) == "Real");
}

TEST_CASE("printing round-trips up to alpha") {
    for (const char* src : {"\\x:Real. sin x", "fst (3.0, \\y:Real. y)", "(\\f:Real->Real. f 0.0) (\\z:Real. z)",
                            "\\p:Real*Real. add (fst p) (snd p)", "affine[-2.0,0.5] (mul 1.0 2.0)",
                            "\\g:(Real->Real)->Real. g (\\u:Real. cos u)", "[] (snd (1.0, 2.0))"}) {
        auto t = parse_term(src);
        CAPTURE(src);
        CHECK(alpha_equal(parse_term(to_string(t)), t));
    }
    CHECK(to_string(parse_term("(\\x:Real. x) 1.0")) == "(\\x:Real. x) 1.0");
}

TEST_CASE("alpha equivalence") {
    CHECK(alpha_equal(parse_term("\\x:Real. \\y:Real. add x y"), parse_term("\\a:Real. \\b:Real. add a b")));
    CHECK_FALSE(alpha_equal(parse_term("\\x:Real. \\y:Real. x"), parse_term("\\x:Real. \\y:Real. y")));
    CHECK_FALSE(alpha_equal(parse_term("\\x:Real. z"), parse_term("\\x:Real. w")));
    CHECK_FALSE(alpha_equal(parse_term("\\x:Real. x"), parse_term("\\x:Real*Real. x")));
}

TEST_CASE("reduction examples") {
    CHECK(alpha_equal(nf("sin 0.0"), mk_const(0.0)));
    CHECK(alpha_equal(nf("fst (3.0, \\y:Real. y)"), mk_const(3.0)));
    CHECK(alpha_equal(nf("(\\f:Real->Real. f 0.0) (\\z:Real. add z 1.0)"), mk_const(1.0)));
    CHECK(alpha_equal(nf("affine[2.0,1.0] 3.0"), mk_const(7.0)));
    CHECK(alpha_equal(nf("mul (add 1.0 2.0) (abs -2.0)"), mk_const(6.0)));
    // delta waits for constant arguments
    auto open = nf("\\x:Real. sin x");
    CHECK(alpha_equal(open, parse_term("\\x:Real. sin x")));
    CHECK_FALSE(beta_step(parse_term("add 1.0")).has_value());
}

TEST_CASE("substitution avoids capture") {
    auto t = substitute(parse_term("\\y:Real. add x y"), "x", mk_var("y"));
    CHECK(alpha_equal(t, parse_term("\\z:Real. add y z")));
    auto r = nf("(\\x:Real. \\y:Real. add x y) y");
    CHECK(alpha_equal(r, parse_term("\\w:Real. add y w")));
}

TEST_CASE("contexts capture") {
    auto ctx = parse_term("\\y:Real. []");
    auto plugged = plug_context(ctx, mk_var("y"));
    CHECK(alpha_equal(plugged, parse_term("\\y:Real. y")));
    CHECK(to_string(plug_context(parse_term("[] 0.0"), parse_term("\\x:Real. sin x"))) == "(\\x:Real. sin x) 0.0");
}

TEST_CASE("normal forms agree across strategies and normalize is idempotent") {
    std::mt19937_64 rng(17);
    int reducible = 0;
    for (int i = 0; i < 300; ++i) {
        std::vector<std::string> scope;
        auto t = random_real_term(rng, 4, scope);
        REQUIRE(type_equal(typecheck(t), real_type()));
        auto a = normalize(t, Strategy::NormalOrder);
        auto b = normalize(t, Strategy::Innermost);
        CAPTURE(to_string(t));
        CHECK(alpha_equal(a.term, b.term));
        CHECK(normalize(a.term).steps == 0);
        CHECK(a.term->kind == Term::Kind::Const);
        reducible += a.steps >= 2;
    }
    CHECK(reducible > 100);
}

TEST_CASE("subject reduction along every step") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        std::vector<std::string> scope{"v"};
        auto body = random_real_term(rng, 4, scope);
        auto t = mk_lam("v", real_type(), body);
        auto ty = typecheck(t);
        for (auto s : {Strategy::NormalOrder, Strategy::Innermost}) {
            auto cur = t;
            while (auto next = beta_step(cur, s)) {
                cur = *next;
                REQUIRE(type_equal(typecheck(cur), ty));
            }
        }
    }
}

TEST_CASE("primitive moduli bound the variation and are tight at box corners") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> x(-4, 4), a(0, 2), u(-1, 1);
    for (const auto& name : primitive_names()) {
        auto p = name == "affine" ? lookup_primitive(name, {-1.5, 0.25}) : lookup_primitive(name);
        for (int i = 0; i < 200; ++i) {
            std::vector<double> pt(p->arity), al(p->arity), q(p->arity);
            for (std::size_t k = 0; k < p->arity; ++k) {
                pt[k] = x(rng);
                al[k] = a(rng);
            }
            double m = p->modulus(pt, al), fx = p->eval(pt), seen = 0;
            for (int j = 0; j < 50; ++j) {
                for (std::size_t k = 0; k < p->arity; ++k) q[k] = pt[k] + al[k] * u(rng);
                seen = std::max(seen, std::abs(p->eval(q) - fx));
            }
            CAPTURE(name);
            CHECK(seen <= m + 1e-12);
        }
    }
    auto sin = lookup_primitive("sin");
    double x0[] = {0.0}, r[] = {0.1};
    CHECK(sin->modulus(x0, r) == doctest::Approx(std::sin(0.1)).epsilon(1e-15));
    double top[] = {std::numbers::pi / 2}, wide[] = {1.0};
    CHECK(sin->modulus(top, wide) == doctest::Approx(1 - std::cos(1.0)));
    auto mul = lookup_primitive("mul");
    double xy[] = {2.0, -3.0}, ab[] = {0.5, 0.25};
    CHECK(mul->modulus(xy, ab) == doctest::Approx(2 * 0.25 + 3 * 0.5 + 0.5 * 0.25));
}

TEST_CASE("Lipschitz data holds within the declared radius") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> x(-3, 3), u(-1, 1);
    for (const auto& name : primitive_names()) {
        auto p = name == "affine" ? lookup_primitive(name, {2.0, 1.0}) : lookup_primitive(name);
        for (int i = 0; i < 200; ++i) {
            std::vector<double> c(p->arity), y(p->arity), z(p->arity);
            for (auto& v : c) v = x(rng);
            auto lip = p->lip(c);
            double rad = std::min(lip.radius, 2.0) / std::sqrt(double(p->arity));
            for (std::size_t k = 0; k < p->arity; ++k) {
                y[k] = c[k] + rad * u(rng);
                z[k] = c[k] + rad * u(rng);
            }
            double dist = 0;
            for (std::size_t k = 0; k < p->arity; ++k) dist += (y[k] - z[k]) * (y[k] - z[k]);
            CAPTURE(name);
            CHECK(std::abs(p->eval(y) - p->eval(z)) <= lip.constant * std::sqrt(dist) + 1e-12);
        }
    }
    CHECK(lookup_primitive("affine", {-2.0, 5.0})->lip(std::vector<double>{0.0}).constant == 2.0);
    CHECK_THROWS_AS(lookup_primitive("sin", {1.0}), StructuralError);
    CHECK_THROWS_AS(lookup_primitive("tan"), StructuralError);
}
