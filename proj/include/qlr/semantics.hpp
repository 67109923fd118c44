#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlr/lambda.hpp"

namespace qlr {

struct Value;
using ValueP = std::shared_ptr<const Value>;

struct Value {
    enum class Kind { Real, Pair, Closure };
    Kind kind = Kind::Real;
    double real = 0;
    ValueP first, second;
    std::function<ValueP(const ValueP&)> fn;
};

ValueP real_value(double v);
ValueP pair_value(ValueP a, ValueP b);
ValueP closure_value(std::function<ValueP(const ValueP&)> fn);
ValueP apply_fn(const ValueP& f, const ValueP& x);
ValueP function_value(std::function<double(double)> f);
double as_real(const ValueP& v);
std::string to_string(const ValueP& v);

// Elements of the difference quantale over a type.
struct Diff;
using DiffP = std::shared_ptr<const Diff>;

struct Diff {
    enum class Kind { Real, Pair, Fn };
    Kind kind = Kind::Real;
    double real = 0;
    DiffP first, second;
    std::function<DiffP(const ValueP&, const DiffP&)> fn;
};

DiffP real_diff(double v);
DiffP pair_diff(DiffP a, DiffP b);
DiffP fn_diff(std::function<DiffP(const ValueP&, const DiffP&)> fn);
DiffP apply_diff(const DiffP& d, const ValueP& x, const DiffP& alpha);
double as_real(const DiffP& d);
// Same shape, all zero.
DiffP zero_like(const DiffP& d);
DiffP join(const DiffP& a, const DiffP& b);
// Heyting residual a <= b, pointwise; on reals 0 when a <= b, a otherwise.
DiffP heyting_residual(const DiffP& a, const DiffP& b);

struct Binding {
    std::string name;
    ValueP value;
    DiffP diff;
    // Used in place of diff where the Q^r clauses freeze the context; zero when absent.
    DiffP self;
};
using SemEnv = std::vector<Binding>;

ValueP denote(const TermP& t, const SemEnv& env = {});
DiffP derivQ(const TermP& t, const SemEnv& env = {});
DiffP derivQr(const TermP& t, const SemEnv& env = {});

struct Probe {
    double x = 0;
    double radius = 0;
};

constexpr std::size_t kDefaultGrid = 1001;
std::vector<double> default_radii(); // 0, 0.1, 1, pi/2

// Sampled d^Q for values of type Real -> ... -> Real, one probe per argument.
double distD(const ValueP& f, const ValueP& g, std::span<const Probe> probes, std::size_t grid = kDefaultGrid);
// d if d exceeds the sampled D(f) by more than tol, 0 otherwise.
double distE(const ValueP& f, const ValueP& g, std::span<const Probe> probes, std::size_t grid = kDefaultGrid,
             double tol = 1e-12);
// Difference at a probe: Real diffs are read off, Fn diffs applied to (x, radius).
double diff_at(const DiffP& d, std::span<const Probe> probes);

// The distance a(f,g) as a difference, lazily sampled; first-order types only.
DiffP distance_diff(const ValueP& f, const ValueP& g, const TypeP& type, bool residual = false,
                    std::size_t grid = kDefaultGrid);

// A free Real variable of a context with its value and difference budget.
struct ContextInput {
    std::string name;
    double value = 0;
    double radius = 0;
};

struct BoundReport {
    double bound = 0;
    double actual = 0;
    bool holds() const { return actual <= bound + 1e-9; }
    double margin() const { return bound - actual; }
};

enum class Model { Q, Qr };

// bound = ||C||(x, budget, [t], a([t],[u])); actual is the sampled sup of |C[t](x) - C[u](x')|
// over inputs x' within the budget.
BoundReport contextualityBound(const TermP& ctx, const TermP& t, const TermP& u,
                               const std::vector<ContextInput>& inputs = {}, Model model = Model::Q,
                               std::size_t grid = kDefaultGrid);

struct Fig1Row {
    double x = 0, r = 0;
    double d_fg = 0, d_fh = 0, d_hg = 0, d_hh = 0;
    bool violated = false;
};
struct Fig1Functions {
    std::function<double(double)> f, g, h;
};
Fig1Functions fig1_functions(char which);
Fig1Row reproduceFig1(char which, double x, double r, std::size_t grid = kDefaultGrid);
std::string fig1_csv(char which, std::span<const Fig1Row> rows);
nlohmann::json to_json(const Fig1Row& row);

struct NonAdditivity {
    double f1 = 0, f2 = 0, g1 = 0, g2 = 0;
    bool superadditive() const { return f2 > 2 * f1; }
    bool subadditive() const { return g2 < 2 * g1; }
};
NonAdditivity nonAdditivityWitness(std::size_t grid = kDefaultGrid);

// Observations of a value or difference of the given type at probe index p, used to
// compare the semantics of a term and its reducts extensionally.
std::vector<double> observe(const ValueP& v, const TypeP& type, std::size_t p);
std::vector<double> observe(const DiffP& d, const TypeP& type, std::size_t p);
ValueP probe_value(const TypeP& type, std::size_t p);
DiffP probe_diff(const TypeP& type, std::size_t p);

} // namespace qlr
