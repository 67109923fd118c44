#include <doctest.h>

#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "qlr/error.hpp"
#include "qlr/finite_qlr.hpp"

using namespace qlr;

namespace {

QuantaleElem I(std::uint32_t i) { return QuantaleElem::index(i); }

std::vector<QuantaleElem> idx(std::initializer_list<std::uint32_t> xs) {
    std::vector<QuantaleElem> out;
    for (auto x : xs) out.push_back(I(x));
    return out;
}

FiniteQlr golden_x() {
    return make_space(QuantaleDesc::trunc_chain(3), {"p", "q", "r"}, idx({0, 1, 3, 1, 0, 2, 2, 4, 0}));
}
FiniteQlr golden_y() { return make_space(QuantaleDesc::trunc_chain(3), {"u", "v"}, idx({0, 2, 1, 0})); }

FiniteQlr random_space(std::mt19937_64& rng, const QuantaleDesc& q, std::size_t n, bool reflexive) {
    auto fq = tabulate(q);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(fq->size()) - 1);
    std::vector<Ix> d(n * n);
    for (auto& v : d) v = static_cast<Ix>(pick(rng));
    if (reflexive)
        for (std::size_t i = 0; i < n; ++i) d[i * n + i] = fq->zero();
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    return FiniteQlr(names, fq, d);
}

// Chains store elements by rank, so join is max on indices.
int chain_derivative(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f, std::size_t x, int alpha) {
    int best = 0;
    for (std::size_t y = 0; y < X.size(); ++y)
        if (static_cast<int>(X(x, y)) <= alpha) best = std::max(best, static_cast<int>(Y(f[x], f[y])));
    return best;
}

int chain_exp(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f, const FnTable& g, std::size_t x, int alpha) {
    int best = 0;
    for (std::size_t y = 0; y < X.size(); ++y)
        if (static_cast<int>(X(x, y)) <= alpha)
            best = std::max({best, static_cast<int>(Y(f[x], g[y])), static_cast<int>(Y(f[x], f[y]))});
    return best;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Symmetric matrices only, upper triangle in row-major order as the digits.
void for_each_symmetric(const std::shared_ptr<const FiniteQuantale>& q, std::size_t n,
                        const std::function<void(const FiniteQlr&)>& visit) {
    std::vector<std::pair<std::size_t, std::size_t>> cells;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) cells.emplace_back(i, j);
    std::vector<Ix> digit(cells.size(), 0);
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    while (true) {
        std::vector<Ix> d(n * n);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            d[cells[c].first * n + cells[c].second] = digit[c];
            d[cells[c].second * n + cells[c].first] = digit[c];
        }
        visit(FiniteQlr(names, q, d));
        std::size_t c = cells.size();
        while (c-- > 0) {
            if (++digit[c] < q->size()) break;
            digit[c] = 0;
        }
        if (c == static_cast<std::size_t>(-1)) return;
    }
}

} // namespace

TEST_CASE("derivative on the three-point chain instance") {
    FiniteQlr X = golden_x(), Y = golden_y();
    FnTable f{0, 1, 1};
    auto D = derivative(X, Y, f);
    for (std::size_t x = 0; x < 3; ++x)
        for (int a = 0; a <= 4; ++a) CHECK(D[x * 5 + a] == chain_derivative(X, Y, f, x, a));
    CHECK(format_derivative(X, Y, D) == read_file(QLR_TEST_DIR "/golden/derivative_chain3.txt"));
    CHECK(is_valid_map(X, Y, {f, D}));
}

TEST_CASE("identity and constant maps") {
    std::mt19937_64 rng(11);
    for (int it = 0; it < 50; ++it) {
        FiniteQlr X = random_space(rng, QuantaleDesc::trunc_chain(3), 1 + it % 3, it % 2 == 0);
        FnTable id(X.size());
        for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
        auto D = derivative(X, X, id);
        for (std::size_t x = 0; x < X.size(); ++x)
            for (Ix a = 0; a < X.qsize(); ++a) {
                CHECK(X.base().leq(D[x * X.qsize() + a], a));
                // equality wherever alpha is attained as a distance from x
                for (std::size_t y = 0; y < X.size(); ++y)
                    if (X(x, y) == a) CHECK(D[x * X.qsize() + a] == a);
            }
        FiniteQlr Y = random_space(rng, QuantaleDesc::trunc_chain(2), 3, true);
        auto Dc = derivative(X, Y, FnTable(X.size(), 1));
        for (Ix v : Dc) CHECK(v == Y.base().zero());
    }
    // on a single point the identity derivative forgets every unattained alpha
    FiniteQlr one = make_space(QuantaleDesc::trunc_chain(3), {"*"}, idx({0}));
    CHECK(derivative(one, one, {0})[3] == 0);
}

TEST_CASE("derivative is the least valid table") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 20; ++it) {
        FiniteQlr X = random_space(rng, QuantaleDesc::trunc_chain(1), 2, it % 3 != 0);
        FiniteQlr Y = random_space(rng, QuantaleDesc::trunc_chain(1), 2, it % 2 == 0);
        for (const auto& f : all_functions(2, 2)) {
            auto D = derivative(X, Y, f);
            REQUIRE(D.size() == 6);
            // every table below D (entrywise) other than D itself is invalid
            std::vector<Ix> phi(6, 0);
            for (int code = 0; code < 729; ++code) {
                int c = code;
                bool below = true;
                for (auto& v : phi) {
                    v = static_cast<Ix>(c % 3);
                    c /= 3;
                }
                for (std::size_t k = 0; k < 6; ++k) below = below && phi[k] <= D[k];
                if (!below || phi == D) continue;
                CHECK_FALSE(is_valid_map(X, Y, {f, phi}));
            }
        }
    }
}

TEST_CASE("map validity reports the violated entry") {
    FiniteQlr X = golden_x(), Y = golden_y();
    FiniteQlrMap m{{0, 1, 1}, derivative(X, Y, {0, 1, 1})};
    m.deriv[1] = 1; // p at alpha=1 needs b(u,v)=2
    auto v = map_violation(X, Y, m);
    REQUIRE(v);
    CHECK(v->find("x=p y=q alpha=1") != std::string::npos);
    CHECK_THROWS_AS(derivative(X, Y, {0, 1}), StructuralError);
}

TEST_CASE("exponentials") {
    FiniteQlr X = discrete_space(2), Y = discrete_space(3);
    FiniteQlr E = expQ(X, Y);
    CHECK(E.size() == 9);
    CHECK(E.width() == 2 * 2);

    std::mt19937_64 rng(3);
    for (int it = 0; it < 30; ++it) {
        FiniteQlr A = random_space(rng, QuantaleDesc::trunc_chain(2), 1 + it % 3, true);
        FiniteQlr B = random_space(rng, QuantaleDesc::trunc_chain(3), 1 + (it / 3) % 3, true);
        FiniteQlr EA = expQ(A, B), ER = expQr(A, B);
        auto fns = all_functions(A.size(), B.size());
        for (std::size_t i = 0; i < fns.size(); ++i) {
            auto D = derivative(A, B, fns[i]);
            CHECK(std::vector<Ix>(EA.at(i, i).begin(), EA.at(i, i).end()) == D);
            for (Ix v : ER.at(i, i)) CHECK(v == B.base().zero());
            for (std::size_t j = 0; j < fns.size(); ++j) {
                auto row = EA.at(i, j);
                for (std::size_t x = 0; x < A.size(); ++x)
                    for (int a = 0; a < 4; ++a)
                        CHECK(row[x * 4 + a] == chain_exp(A, B, fns[i], fns[j], x, a));
                CHECK(distanceViaHfg(A, B, fns[i], fns[j]) == std::vector<Ix>(row.begin(), row.end()));
            }
        }
    }
    FiniteQlr nonrefl = make_space(QuantaleDesc::trunc_chain(2), {"a"}, idx({1}));
    CHECK_THROWS_AS(expQr(nonrefl, discrete_space(2)), ContractError);
    CHECK_THROWS_AS(expQ(discrete_space(5), discrete_space(2)), UnsupportedOperation);
}

TEST_CASE("self-distance vanishes exactly on constant maps over separated codomains") {
    std::mt19937_64 rng(21);
    int separated_seen = 0;
    for (int it = 0; it < 200; ++it) {
        FiniteQlr A = random_space(rng, QuantaleDesc::trunc_chain(2), 1 + it % 3, it % 2 == 0);
        FiniteQlr B = random_space(rng, QuantaleDesc::trunc_chain(2), 1 + (it / 2) % 3, true);
        if (!checkAxioms(B, {"separated"}).all_passed()) continue;
        ++separated_seen;
        for (const auto& f : all_functions(A.size(), B.size())) {
            auto d = exp_distance(A, B, f, f);
            bool zero = std::all_of(d.begin(), d.end(), [&](Ix v) { return v == B.base().zero(); });
            bool constant = std::all_of(f.begin(), f.end(), [&](std::size_t v) { return v == f[0]; });
            CHECK(zero == constant);
        }
    }
    CHECK(separated_seen > 50);
    // without separation a non-constant map can have zero self-distance
    FiniteQlr glued = make_space(QuantaleDesc::trunc_chain(2), {"u", "v"}, idx({0, 0, 0, 0}));
    auto d = exp_distance(discrete_space(2), glued, {0, 1}, {0, 1});
    CHECK(std::all_of(d.begin(), d.end(), [](Ix v) { return v == 0; }));
}

TEST_CASE("products") {
    FiniteQlr X = golden_x();
    FiniteQlr P = productQlr(unit_space(), X);
    REQUIRE(P.size() == X.size());
    for (std::size_t x = 0; x < X.size(); ++x)
        for (std::size_t y = 0; y < X.size(); ++y) {
            CHECK(P.elem(x, y).items()[0] == I(0));
            CHECK(P.elem(x, y).items()[1] == X.elem(x, y));
        }
    FiniteQlr A = make_space(QuantaleDesc::trunc_chain(2), {"a0", "a1"}, idx({0, 1, 2, 0}));
    FiniteQlr B = make_space(QuantaleDesc::discrete_two(), {"b0", "b1"}, idx({0, 1, 1, 0}));
    FiniteQlr AB = productQlr(A, B);
    CHECK(AB.carrier()[1] == "(a0,b1)");
    CHECK(AB.elem(1, 2) == QuantaleElem::tuple({I(1), I(1)}));
    CHECK(AB.elem(2, 1) == QuantaleElem::tuple({I(2), I(1)}));
}

TEST_CASE("curry and uncurry in Q") {
    auto q = QuantaleDesc::trunc_chain(1);
    std::mt19937_64 rng(8);
    for (int it = 0; it < 40; ++it) {
        FiniteQlr Z = random_space(rng, q, 1 + it % 2, true);
        FiniteQlr X = random_space(rng, q, 1 + (it / 2) % 2, it % 3 == 0);
        FiniteQlr Y = random_space(rng, q, 2, it % 5 != 0);
        FiniteQlr ZX = productQlr(Z, X);
        for (const auto& f : all_functions(ZX.size(), Y.size())) {
            FiniteQlrMap m{f, derivative(ZX, Y, f)};
            FiniteQlrMap c = curryQ(Z, X, Y, m);
            CHECK(is_valid_map(Z, expQ(X, Y), c));
            CHECK(uncurryQ(Z, X, Y, c) == m);
        }
    }
    FiniteQlr X = discrete_space(2);
    CHECK_THROWS_AS(curryQ(discrete_space(1), X, X, {{0, 1}, std::vector<Ix>(8, 0)}), ContractError);
}

TEST_CASE("curry leaves the hom-set when the parameter space is not reflexive") {
    auto q = QuantaleDesc::trunc_chain(1);
    // c(z0,z0) = 1 while c(z0,z1) = 0
    FiniteQlr Z = make_space(q, {"z0", "z1"}, idx({1, 0, 0, 0}));
    FiniteQlr X = discrete_space(2, q);
    FiniteQlr Y = discrete_space(2, q);
    FiniteQlr ZX = productQlr(Z, X);
    FnTable f{0, 1, 0, 0};
    FiniteQlrMap m{f, derivative(ZX, Y, f)};
    auto v = map_violation(Z, expQ(X, Y), curryQ(Z, X, Y, m));
    REQUIRE(v);
    CHECK(v->find("x=z0 y=z1 alpha=0") != std::string::npos);
}

TEST_CASE("curry and uncurry in the reflexive category") {
    auto q = QuantaleDesc::trunc_chain(2);
    std::mt19937_64 rng(9);
    for (int it = 0; it < 30; ++it) {
        FiniteQlr Z = random_space(rng, q, 1 + it % 2, true);
        FiniteQlr X = random_space(rng, q, 2, true);
        FiniteQlr Y = random_space(rng, q, 2, true);
        FiniteQlr ZX = productQlr(Z, X);
        for (const auto& f : all_functions(ZX.size(), Y.size())) {
            FiniteQlrMap m{f, derivative(ZX, Y, f)};
            FiniteQlrMap c = curryQr(Z, X, Y, m);
            CHECK(is_valid_map(Z, expQr(X, Y), c));
            CHECK(uncurryQr(Z, X, Y, c) == m); // beta
        }
    }
}

TEST_CASE("eta fails in the reflexive category for derivatives below the self-distance") {
    auto q = QuantaleDesc::trunc_chain(2);
    FiniteQlr Z = unit_space();
    FiniteQlr X = make_space(q, {"x0", "x1"}, idx({0, 1, 1, 0}));
    FiniteQlr Y = make_space(q, {"y0", "y1"}, idx({0, 1, 1, 0}));
    FnTable g{0, 1};
    std::size_t gi = function_index(g, 2);
    // psi = D(g) itself, which is a valid derivative for g : 1 -> Y^X
    auto Dg = derivative(X, Y, g);
    std::vector<Ix> psi(Z.qsize() * Dg.size());
    for (std::size_t c = 0; c < Z.qsize(); ++c) std::copy(Dg.begin(), Dg.end(), psi.begin() + c * Dg.size());
    FiniteQlrMap m{{gi}, psi};
    REQUIRE(is_valid_map(Z, expQr(X, Y), m));
    FiniteQlrMap back = curryQr(Z, X, Y, uncurryQr(Z, X, Y, m));
    CHECK(back.fn == m.fn);
    CHECK(back.deriv != m.deriv);
    CHECK(back.deriv[1] == 0); // probe x0@1 drops from 1 to 0
    CHECK(m.deriv[1] == 1);
}

TEST_CASE("distance via the auxiliary map on constant functions") {
    FiniteQlr X = golden_x(), Y = golden_y();
    auto d = distanceViaHfg(X, Y, {0, 0, 0}, {1, 1, 1});
    for (Ix v : d) CHECK(v == 2); // b(u,v) = 2 on every probe, since a(x,x) = 0
}

TEST_CASE("axiom checks") {
    FiniteQlr disc = discrete_space(2);
    CHECK(checkAxioms(disc, {"reflexive", "symmetric", "separated", "transitive"}).all_passed());
    CHECK_THROWS_AS(checkAxioms(disc, {"bogus"}), StructuralError);
    CHECK_THROWS_AS(checkAxioms(make_space(QuantaleDesc::powerset_zmod(2), {"a"}, idx({1})), {"partialMetric"}),
                    UnsupportedOperation);

    // the first witness in carrier order
    FiniteQlr X = make_space(QuantaleDesc::trunc_chain(4), {"a", "b", "c"}, idx({0, 1, 4, 1, 0, 1, 1, 1, 0}));
    LawReport r = checkAxioms(X, {"transitive", "symmetric", "hyperRelaxed", "ultraMetric"});
    CHECK(r.find("transitive")->witness == "x=a y=b z=c: a(x,z) = 4 exceeds 2");
    CHECK_FALSE(r.passed("symmetric"));
    CHECK(r.find("symmetric")->witness == "x=a y=c: a(x,y) = 4, a(y,x) = 1");
    CHECK(r.find("transitive")->checked == 27);

    // interval partial metric p([r,s],[r',s']) = max(s,s') - min(r,r') on [0,1], [1,2], [2,3]
    FiniteQlr P = make_space(QuantaleDesc::trunc_chain(8), {"[0,1]", "[1,2]", "[2,3]"},
                             idx({1, 2, 3, 2, 1, 2, 3, 2, 1}));
    CHECK(checkAxioms(P, {"symmetric", "separated", "partialMetric"}).all_passed());
    CHECK_FALSE(checkAxioms(P, {"reflexive"}).all_passed());
}

TEST_CASE("induced metric") {
    FiniteQlr P = make_space(QuantaleDesc::trunc_chain(8), {"[0,1]", "[1,2]", "[2,3]"},
                             idx({1, 2, 3, 2, 1, 2, 3, 2, 1}));
    FiniteQlr M = inducedMetric(P);
    CHECK(M(0, 2) == 4);
    CHECK(M(0, 1) == 2);
    for (std::size_t x = 0; x < 3; ++x) CHECK(M(x, x) == 0);

    // random partial metrics over chain:5, filtered from random matrices
    std::mt19937_64 rng(17);
    int found = 0;
    oracle::Chain ch{5};
    for (int it = 0; it < 20000 && found < 40; ++it) {
        std::size_t n = 2 + it % 2;
        FiniteQlr S = random_space(rng, QuantaleDesc::trunc_chain(5), n, false);
        if (!checkAxioms(S, {"symmetric", "separated", "partialMetric"}).all_passed()) continue;
        ++found;
        FiniteQlr A = inducedMetric(S);
        CHECK(checkAxioms(A, {"reflexive", "symmetric", "separated", "transitive"}).all_passed());
        for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) {
                int axy = S(x, y);
                CHECK(A(x, y) == ch.plus(ch.residual(axy, S(x, x)), ch.residual(axy, S(y, y))));
            }
    }
    CHECK(found >= 40);
    CHECK_THROWS_AS(inducedMetric(make_space(QuantaleDesc::trunc_chain(3), {"a", "b"}, idx({0, 1, 2, 0}))),
                    ContractError);
}

TEST_CASE("partial metric exponentials over a non-idempotent chain") {
    auto q = tabulate(QuantaleDesc::trunc_chain(4));
    std::vector<FiniteQlr> spaces;
    for (std::size_t n = 1; n <= 3; ++n)
        for_each_symmetric(q, n, [&](const FiniteQlr& S) {
            if (checkAxioms(S, {"partialMetric"}).all_passed()) spaces.push_back(S);
        });
    // the first pair, in enumeration order, whose exponential breaks the triangle law
    std::string witness;
    for (const auto& A : spaces) {
        for (const auto& B : spaces) {
            if (A.size() > 2) continue;
            LawReport r = checkAxioms(expQ(A, B), {"partialMetric"});
            if (!r.all_passed() && r.results[0].witness.find("exceeds") != std::string::npos) {
                witness = r.results[0].witness;
                break;
            }
        }
        if (!witness.empty()) break;
    }
    CHECK(witness == "x=a.b y=b.a z=a.c: a(x,z) = <1,1,1,1,1,1,2,2,2,2,2,2> exceeds <2,2,2,2,2,2,1,1,1,1,1,1>");
}

TEST_CASE("ultra-metric exponentials over a finite locale") {
    auto q = tabulate(QuantaleDesc::max_chain(2));
    std::vector<FiniteQlr> ultra, partial;
    for (std::size_t n = 1; n <= 2; ++n)
        for_each_space(q, n, [&](const FiniteQlr& S) {
            if (checkAxioms(S, {"reflexive", "symmetric", "ultraMetric"}).all_passed()) ultra.push_back(S);
            if (checkAxioms(S, {"symmetric", "partialUltraMetric"}).all_passed()) partial.push_back(S);
        });
    for (const auto& A : ultra)
        for (const auto& B : ultra) {
            CHECK(checkAxioms(expQ(A, B), {"ultraMetric"}).all_passed());
            CHECK(checkAxioms(expQr(A, B), {"reflexive", "ultraMetric"}).all_passed());
        }
    for (const auto& A : partial)
        for (const auto& B : partial) CHECK(checkAxioms(expQ(A, B), {"partialUltraMetric"}).all_passed());
}

TEST_CASE("symmetric exponentials") {
    auto m2 = QuantaleDesc::max_chain(2);
    FiniteQlr X = make_space(m2, {"a", "b"}, idx({0, 1, 1, 0}));
    FiniteQlr Y = make_space(m2, {"u", "v"}, idx({0, 2, 2, 0}));
    CHECK(checkSymmetricExp(X, Y).symmetric);

    FiniteQlr one = make_space(m2, {"*"}, idx({0}));
    CHECK(checkSymmetricExp(one, Y).symmetric);

    auto c3 = QuantaleDesc::trunc_chain(3);
    FiniteQlr Xc = make_space(c3, {"a", "b"}, idx({0, 1, 1, 0}));
    FiniteQlr Yc = make_space(c3, {"u", "v", "w"}, idx({0, 1, 2, 1, 0, 1, 2, 1, 0}));
    SymmetryResult r = checkSymmetricExp(Xc, Yc);
    CHECK_FALSE(r.symmetric);
    CHECK_FALSE(r.witness.empty());

    CHECK_THROWS_AS(checkSymmetricExp(make_space(c3, {"a", "b"}, idx({0, 1, 2, 0})), Yc), ContractError);
}

TEST_CASE("derivative laws on small reflexive instances") {
    auto q = QuantaleDesc::trunc_chain(2);
    std::mt19937_64 rng(4);
    bool strict_seen = false;
    for (int it = 0; it < 20; ++it) {
        FiniteQlr X = random_space(rng, q, 2, true), Y = random_space(rng, q, 2, true),
                  Z = random_space(rng, q, 2, true);
        LawReport r = checkDerivativeLaws(X, Y, Z);
        INFO(format_text(r));
        CHECK(r.passed("D3"));
        CHECK(r.passed("D4"));
        CHECK(r.passed("D5"));
        CHECK(r.passed("D6"));
        strict_seen = strict_seen || r.find("D4")->note.find("strict") != std::string::npos;
    }
    CHECK(strict_seen);
}

TEST_CASE("literal identity law fails on unattained distances") {
    FiniteQlr X = make_space(QuantaleDesc::trunc_chain(3), {"*"}, idx({0}));
    LawReport r = checkDerivativeLaws(X, X, X);
    CHECK_FALSE(r.passed("D1"));
    CHECK(r.find("D1")->witness == "x=* alpha=1: D(id)(x,alpha) = 0");
    CHECK_FALSE(r.passed("D2"));
}

TEST_CASE("lax currying law fails on a non-reflexive parameter space") {
    auto q = QuantaleDesc::trunc_chain(1);
    FiniteQlr X = make_space(q, {"z0", "z1"}, idx({1, 0, 0, 0}));
    FiniteQlr Y = discrete_space(2, q);
    LawReport r = checkDerivativeLaws(X, Y, Y);
    CHECK_FALSE(r.passed("D5"));
    CHECK(r.passed("D6"));
}

TEST_CASE("text format round trip") {
    std::istringstream in("# demo\nquantale chain:3\npoints p q r\ndeclare reflexive\n0 1 3\n1 0 2\n2 inf 0\n");
    FiniteQlr X = read_qlr(in);
    CHECK(X.dist() == golden_x().dist());
    CHECK(X.declared == std::vector<std::string>{"reflexive"});
    std::ostringstream out;
    write_qlr(out, X);
    std::istringstream again(out.str());
    CHECK(read_qlr(again).dist() == X.dist());

    std::istringstream bad("quantale chain:3\npoints a b\n0 1\n1\n");
    try {
        read_qlr(bad);
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 4);
    }
    std::istringstream bad_elem("quantale chain:3\npoints a\n7\n");
    CHECK_THROWS_AS(read_qlr(bad_elem), SyntaxError);
}
