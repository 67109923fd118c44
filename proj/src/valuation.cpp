#include <algorithm>
#include <cmath>

#include "qlr/error.hpp"
#include "qlr/valuation.hpp"

namespace qlr {

Region::Region(Interval i) {
    if (!i.is_empty()) parts_.push_back(i);
}

Region Region::of(std::vector<Interval> parts) {
    Region r;
    std::erase_if(parts, [](const Interval& i) { return i.is_empty(); });
    if (std::any_of(parts.begin(), parts.end(), [](const Interval& i) { return i.is_full(); })) {
        r.parts_.push_back(Interval::full());
        return r;
    }
    std::sort(parts.begin(), parts.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    for (const auto& p : parts) {
        if (!r.parts_.empty() && p.lo <= r.parts_.back().hi)
            r.parts_.back().hi = std::max(r.parts_.back().hi, p.hi);
        else
            r.parts_.push_back(p);
    }
    return r;
}

Interval Region::as_interval() const {
    if (parts_.size() > 1) throw StructuralError("region " + to_string(*this) + " is not a single interval");
    return parts_.empty() ? Interval::empty() : parts_.front();
}

Interval Region::hull() const {
    Interval h = Interval::empty();
    for (const auto& p : parts_) h = qlr::hull(h, p);
    return h;
}

Region region_union(const Region& a, const Region& b) {
    auto parts = a.parts();
    parts.insert(parts.end(), b.parts().begin(), b.parts().end());
    return Region::of(std::move(parts));
}

Region region_intersect(const Region& a, const Region& b) {
    std::vector<Interval> parts;
    for (const auto& p : a.parts())
        for (const auto& q : b.parts()) parts.push_back(intersect(p, q));
    return Region::of(std::move(parts));
}

bool region_subset(const Region& a, const Region& b) {
    return std::all_of(a.parts().begin(), a.parts().end(), [&](const Interval& p) {
        return std::any_of(b.parts().begin(), b.parts().end(), [&](const Interval& q) { return contains(q, p); });
    });
}

std::string to_string(const Region& r) {
    if (r.empty()) return "empty";
    std::string s;
    for (const auto& p : r.parts()) s += (s.empty() ? "" : " u ") + to_string(p);
    return s;
}

double lebesgue(const Region& r) {
    double s = 0;
    for (const auto& p : r.parts()) s += p.width();
    return s;
}

Interval uMetric(double x, double y) { return Interval::bounded(std::min(x, y), std::max(x, y)); }

double diam(const Interval& i) {
    if (i.is_empty()) throw DomainError("diam is undefined on the empty interval");
    return i.width();
}

Region JoinValuation::join(const Region& a, const Region& b) const {
    if (lattice == Lattice::Unions) return region_union(a, b);
    return hull(a.as_interval(), b.as_interval());
}

Region JoinValuation::meet(const Region& a, const Region& b) const {
    if (lattice == Lattice::Unions) return region_intersect(a, b);
    return intersect(a.as_interval(), b.as_interval());
}

bool JoinValuation::leq(const Region& a, const Region& b) const {
    if (lattice == Lattice::Unions) return region_subset(a, b);
    return contains(b.as_interval(), a.as_interval());
}

JoinValuation diamValuation() {
    return {"diam", JoinValuation::Lattice::Intervals, [](const Region& r) { return diam(r.as_interval()); }};
}

JoinValuation lebesgueValuation() {
    return {"lebesgue", JoinValuation::Lattice::Unions, [](const Region& r) { return lebesgue(r); }};
}

double inducedPartialMetric(const JoinValuation& V, const Region& a, const Region& b) { return V.F(V.join(a, b)); }

namespace {

bool same(double a, double b, double tol) { return a == b || std::abs(a - b) <= tol; }

// Lawvere residual b -o a = max(0, b - a), with inf -o inf = 0.
double lawvere_residual(double b, double a) { return b <= a ? 0.0 : b - a; }

} // namespace

bool quotientEquiv(const JoinValuation& V, const Region& a, const Region& b, double tol) {
    return (V.leq(a, b) || V.leq(b, a)) && same(V.F(a), V.F(b), tol);
}

DualJoinValuation dualFromJoin(const JoinValuation& V) {
    return {V.name + "'", V, [F = V.F](const Region& a, const Region& b) { return lawvere_residual(F(b), F(a)); }};
}

double dualMetric(const DualJoinValuation& D, const Region& a, const Region& b) {
    return D.D(a, D.base.join(a, b)) + D.D(b, D.base.join(b, a));
}

bool dualEquiv(const DualJoinValuation& D, const Region& a, const Region& b, double tol) {
    return (D.base.leq(a, b) || D.base.leq(b, a)) && D.D(a, D.base.join(a, b)) <= tol &&
           D.D(b, D.base.join(b, a)) <= tol;
}

LawReport checkJoinValuation(const JoinValuation& V, std::span<const Region> samples, double tol) {
    LawReport rep;
    rep.subject = "join-valuation " + V.name;
    LawTally mono(rep.add("monotone"));
    LawTally sub(rep.add("submodular"));
    for (const auto& a : samples)
        for (const auto& b : samples) {
            if (V.leq(a, b))
                mono.check(V.F(a) <= V.F(b) + tol, [&] { return to_string(a) + " <= " + to_string(b); });
            auto m = V.meet(a, b);
            if (m.empty()) continue;
            double lhs = V.F(V.join(a, b));
            double rhs = V.F(a) + lawvere_residual(V.F(b), V.F(m));
            sub.check(lhs <= rhs + tol, [&] {
                return "a=" + to_string(a) + " b=" + to_string(b) + ": " + fmt_real(lhs) + " > " + fmt_real(rhs);
            });
        }
    return rep;
}

LawReport checkDualJoinValuation(const DualJoinValuation& D, std::span<const Region> samples, double tol) {
    LawReport rep;
    rep.subject = "dual join-valuation " + D.name;
    LawTally zero(rep.add("D(a,a) = 0"));
    LawTally mono(rep.add("monotone"));
    LawTally tri(rep.add("D(a, b v c) <= D(a,b) + D(b ^ c, c)"));
    const auto& L = D.base;
    for (const auto& a : samples) {
        zero.check(D.D(a, a) == 0, [&] { return to_string(a); });
        for (const auto& b : samples) {
            for (const auto& a2 : samples)
                for (const auto& b2 : samples)
                    if (L.leq(a2, a) && L.leq(b, b2))
                        mono.check(D.D(a, b) <= D.D(a2, b2) + tol, [&] {
                            return "D(" + to_string(a) + "," + to_string(b) + ") > D(" + to_string(a2) + "," +
                                   to_string(b2) + ")";
                        });
            for (const auto& c : samples) {
                auto m = L.meet(b, c);
                if (m.empty()) continue;
                double lhs = D.D(a, L.join(b, c)), rhs = D.D(a, b) + D.D(m, c);
                tri.check(lhs <= rhs + tol, [&] {
                    return "a=" + to_string(a) + " b=" + to_string(b) + " c=" + to_string(c) + ": " + fmt_real(lhs) +
                           " > " + fmt_real(rhs);
                });
            }
        }
    }
    return rep;
}

double liftedP(const RealFn& f, const RealFn& g, double x, const Interval& I, std::size_t grid) {
    Interval J = hull(Interval::point(x), I);
    if (J.is_full()) return kInf;
    double lo = kInf, hi = -kInf;
    std::size_t n = J.lo == J.hi || grid < 2 ? 1 : grid;
    for (std::size_t i = 0; i < n; ++i) {
        double y = n == 1 ? J.lo : J.lo + (J.hi - J.lo) * double(i) / double(n - 1);
        for (double v : {f(y), g(y)}) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    return hi - lo;
}

double liftedM(const RealFn& f, const RealFn& g, double x, const Interval& I, std::size_t grid) {
    return 2 * liftedP(f, g, x, I, grid) - liftedP(f, f, x, I, grid) - liftedP(g, g, x, I, grid);
}

} // namespace qlr
