#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "qlr/quantale.hpp"
#include "qlr/report.hpp"

namespace qlr {

// A finite union of closed intervals, kept sorted with overlapping parts merged.
class Region {
  public:
    Region() = default;
    Region(Interval i); // NOLINT: single intervals convert implicitly
    static Region of(std::vector<Interval> parts);

    const std::vector<Interval>& parts() const { return parts_; }
    bool empty() const { return parts_.empty(); }
    bool is_interval() const { return parts_.size() <= 1; }
    Interval as_interval() const; // Empty for the empty region
    Interval hull() const;

    friend bool operator==(const Region&, const Region&) = default;

  private:
    std::vector<Interval> parts_;
};

Region region_union(const Region& a, const Region& b);
Region region_intersect(const Region& a, const Region& b);
bool region_subset(const Region& a, const Region& b);
std::string to_string(const Region& r);
double lebesgue(const Region& r);

Interval uMetric(double x, double y);
double diam(const Interval& i); // DomainError on Empty

// F : L -> [0, inf]. The lattice is either intervals under hull (diam) or finite unions
// of intervals under union (Lebesgue); meets are intersections in both.
struct JoinValuation {
    enum class Lattice { Intervals, Unions };
    std::string name;
    Lattice lattice = Lattice::Intervals;
    std::function<double(const Region&)> F;

    Region join(const Region& a, const Region& b) const;
    Region meet(const Region& a, const Region& b) const;
    bool leq(const Region& a, const Region& b) const;
};

JoinValuation diamValuation();
JoinValuation lebesgueValuation();

// p_F(a,b) = F(a v b)
double inducedPartialMetric(const JoinValuation& V, const Region& a, const Region& b);
// Comparable with equal valuation.
bool quotientEquiv(const JoinValuation& V, const Region& a, const Region& b, double tol = 1e-12);

struct DualJoinValuation {
    std::string name;
    JoinValuation base; // lattice operations
    std::function<double(const Region&, const Region&)> D;
};

// F'(a,b) = F(b) -o F(a)
DualJoinValuation dualFromJoin(const JoinValuation& V);
// d(a,b) = D(a, a v b) + D(b, b v a)
double dualMetric(const DualJoinValuation& D, const Region& a, const Region& b);
bool dualEquiv(const DualJoinValuation& D, const Region& a, const Region& b, double tol = 1e-12);

LawReport checkJoinValuation(const JoinValuation& V, std::span<const Region> samples, double tol = 1e-9);
LawReport checkDualJoinValuation(const DualJoinValuation& D, std::span<const Region> samples, double tol = 1e-9);

using RealFn = std::function<double(double)>;

// diam of f({x} v I) u g({x} v I), sampled on a uniform grid; infinite for the full line.
double liftedP(const RealFn& f, const RealFn& g, double x, const Interval& I, std::size_t grid = 1001);
// 2p(f,g) - p(f,f) - p(g,g)
double liftedM(const RealFn& f, const RealFn& g, double x, const Interval& I, std::size_t grid = 1001);

} // namespace qlr
