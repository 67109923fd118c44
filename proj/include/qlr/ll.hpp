#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlr/finite_qlr.hpp"
#include "qlr/lambda.hpp"
#include "qlr/report.hpp"
#include "qlr/semantics.hpp"

namespace qlr {

// Finiteness filter of a quantale given by membership. For Lawvere it is [0, inf).
struct FinFilter {
    std::string name;
    std::function<bool(double)> contains;
};
FinFilter lawvere_filter();
LawReport check_filter(const FinFilter& f, std::span<const double> samples);

struct LLValue;
struct LLDiff;
using LLValueP = std::shared_ptr<const LLValue>;
using LLDiffP = std::shared_ptr<const LLDiff>;

struct LLValue {
    enum class Kind { Real, Pair, Arrow };
    Kind kind = Kind::Real;
    double real = 0;
    LLValueP first, second;
    std::function<LLValueP(const LLValueP&)> fn;
    // LL-constant family of fn, additive in the difference.
    std::function<LLDiffP(const LLValueP&, const LLDiffP&)> fam;
};

// At arrow type a difference depends on the argument only.
struct LLDiff {
    enum class Kind { Real, Pair, Table };
    Kind kind = Kind::Real;
    double real = 0;
    LLDiffP first, second;
    std::function<LLDiffP(const LLValueP&)> table;
};

LLValueP ll_real(double v);
LLValueP ll_pair(LLValueP a, LLValueP b);
LLValueP ll_arrow(std::function<LLValueP(const LLValueP&)> fn,
                  std::function<LLDiffP(const LLValueP&, const LLDiffP&)> fam);
LLDiffP ll_dreal(double v);
LLDiffP ll_dpair(LLDiffP a, LLDiffP b);
LLDiffP ll_table(std::function<LLDiffP(const LLValueP&)> t);
LLDiffP ll_zero(const TypeP& type);
LLDiffP ll_add(const LLDiffP& a, const LLDiffP& b);
LLValueP ll_call(const LLValueP& f, const LLValueP& x);
LLDiffP ll_fam(const LLValueP& f, const LLValueP& x, const LLDiffP& alpha);
LLDiffP ll_lookup(const LLDiffP& table, const LLValueP& x);
double as_real(const LLValueP& v);
double as_real(const LLDiffP& d);

struct LLBinding {
    std::string name;
    LLValueP value;
    LLDiffP diff;
    TypeP type;
};
using LLEnv = std::vector<LLBinding>;

LLValueP denoteLL(const TermP& t, const LLEnv& env = {});
LLDiffP derivLL(const TermP& t, const LLEnv& env = {});

// Smallest admissible radius seen by primitive families while active: each family
// invocation with difference a contributes radius / (arity * a).
class RadiusTrace {
  public:
    RadiusTrace();
    ~RadiusTrace();
    RadiusTrace(const RadiusTrace&) = delete;
    RadiusTrace& operator=(const RadiusTrace&) = delete;
    double delta() const { return delta_; }
    bool degenerate() const { return degenerate_; }
    std::string culprit() const { return culprit_; }
    static void record(const PrimitiveSpec& p, std::span<const double> args, double alpha);

  private:
    double delta_;
    bool degenerate_ = false;
    std::string culprit_;
    RadiusTrace* outer_;
};

// Flat first-order LL map Z x X -> Y over the reals and its curried form.
struct LLFlatMap {
    std::function<double(double, double)> f;
    std::function<double(double, double, double, double)> phi; // (z, x, zeta, alpha)
};
struct LLCurried {
    std::function<double(double, double)> g;                 // g(z)(x)
    std::function<double(double, double, double)> psi;       // lambda_0: (z, x, alpha)
    std::function<double(double, double, double)> chi;       // lambda_1: (z, zeta, x)
};
std::vector<double> ll_probe_points();
// Throws ContractError with a witness when phi is not additive on the probes.
LLCurried llCurry(const LLFlatMap& m);
LLFlatMap llUncurry(const LLCurried& c);

struct LipWitnessReport {
    std::vector<double> point;
    std::vector<double> alphas;
    double delta = 0;
    double bound = 0;
    double observed = 0;
    std::size_t samples = 0;
    bool passed() const { return observed <= bound + 1e-9; }
    double margin() const { return bound - observed; }
};
nlohmann::json to_json(const LipWitnessReport& r);

// t must be closed of type Real -> ... -> Real with one budget per argument.
LipWitnessReport checkLipValidity(const TermP& t, const std::vector<double>& point, const std::vector<double>& alphas,
                                  std::size_t samples = 4000, std::uint64_t seed = 1);

struct LocalBoundReport {
    bool in_regime = false;
    double delta_t = 0;
    double gate_distance = 0; // largest sampled a(t,u) on the probes
    double bound = 0;
    double actual = 0;
    std::string note;
    bool holds() const { return !in_regime || actual <= bound + 1e-9; }
};
nlohmann::json to_json(const LocalBoundReport& r);

// Probes for the gate are grid points of [-probe_radius, probe_radius] per argument of sigma.
LocalBoundReport localContextualityBound(const TermP& ctx, const TermP& t, const TermP& u,
                                         const std::vector<ContextInput>& inputs = {}, double probe_radius = 1.0,
                                         std::size_t grid = 201);

// Properties (1)-(6) checked extensionally on probe sets.
LawReport checkDLambdaProps();

// X / a for a finite pseudo-metric space.
FiniteQlr quotientSeparate(const FiniteQlr& X);

// Probe-based observations, as for the Q model.
LLValueP ll_probe_value(const TypeP& type, std::size_t p);
LLDiffP ll_probe_diff(const TypeP& type, std::size_t p);
std::vector<double> observe_ll(const LLValueP& v, const TypeP& type, std::size_t p);
std::vector<double> observe_ll(const LLDiffP& d, const TypeP& type, std::size_t p);
// Pointwise distance observations |f(x) - g(x)| along the same probes.
std::vector<double> ll_pointwise_distance(const LLValueP& a, const LLValueP& b, const TypeP& type, std::size_t p);

} // namespace qlr
