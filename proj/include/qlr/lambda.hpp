#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qlr {

struct SimpleType;
using TypeP = std::shared_ptr<const SimpleType>;

struct SimpleType {
    enum class Kind { Real, Prod, Arrow };
    Kind kind = Kind::Real;
    TypeP left, right;
};

TypeP real_type();
TypeP prod_type(TypeP a, TypeP b);
TypeP arrow_type(TypeP a, TypeP b);
bool type_equal(const TypeP& a, const TypeP& b);
std::string to_string(const TypeP& t);
// Real -> ... -> Real with n arguments.
TypeP first_order_type(std::size_t arity);
// Arity n when t is Real^n -> Real (n may be 0), nullopt otherwise.
std::optional<std::size_t> first_order_arity(const TypeP& t);

struct LipInfo {
    double constant = 0;
    double radius = 0; // infinity for global bounds
};

struct PrimitiveSpec {
    std::string name;
    std::size_t arity = 1;
    std::vector<double> params;
    std::function<double(std::span<const double>)> eval;
    // Upper bound on |f(x) - f(y)| over |x_i - y_i| <= alpha_i.
    std::function<double(std::span<const double>, std::span<const double>)> modulus;
    // Euclidean Lipschitz constant valid on the ball of the given radius around x.
    std::function<LipInfo(std::span<const double>)> lip;

    std::string display() const;
};
using PrimP = std::shared_ptr<const PrimitiveSpec>;

// affine[a,b], add, mul, sin, cos, abs, min, max.
PrimP lookup_primitive(const std::string& name, const std::vector<double>& params = {});
bool is_primitive_name(const std::string& name);
const std::vector<std::string>& primitive_names();

struct Span {
    int line = 0;
    int col = 0;
};

struct Term;
using TermP = std::shared_ptr<const Term>;

struct Term {
    enum class Kind { Var, Lam, App, Pair, Proj, Const, Prim, Hole };
    Kind kind = Kind::Const;
    std::string name;  // Var, Lam binder
    TypeP annot;       // Lam binder type
    TermP a, b;        // Lam body in a; App fn/arg; Pair components; Proj operand in a
    int index = 0;     // Proj: 1 or 2
    double value = 0;  // Const
    PrimP prim;
    Span span;
};

TermP mk_var(std::string name, Span s = {});
TermP mk_lam(std::string name, TypeP ty, TermP body, Span s = {});
TermP mk_app(TermP f, TermP x, Span s = {});
TermP mk_pair(TermP a, TermP b, Span s = {});
TermP mk_proj(int index, TermP t, Span s = {});
TermP mk_const(double v, Span s = {});
TermP mk_prim(PrimP p, Span s = {});
TermP mk_hole(Span s = {});
// f x1 ... xn
TermP mk_apps(TermP f, const std::vector<TermP>& args);

TermP parse_term(const std::string& src);
TermP parse_file(const std::string& path);
// Accepts "Real -> Real", "Real * Real", ...
TypeP parse_type(const std::string& src);
std::string to_string(const TermP& t);

using TypeEnv = std::vector<std::pair<std::string, TypeP>>;
// A hole is given hole_type; without one a hole is a type error.
TypeP typecheck(const TermP& t, const TypeEnv& env = {}, const TypeP& hole_type = nullptr);

std::vector<std::string> free_vars(const TermP& t);
bool alpha_equal(const TermP& a, const TermP& b);
bool contains_hole(const TermP& t);
std::size_t term_size(const TermP& t);

// Capture-avoiding t[x := s].
TermP substitute(const TermP& t, const std::string& x, const TermP& s);

enum class Strategy { NormalOrder, Innermost };
// One step, nullopt on a normal form. The delta rule fires only on constant arguments.
enum class StepKind { Beta, Projection, Delta };
// One step of beta, projection or primitive (delta) reduction; `kind` receives which.
std::optional<TermP> beta_step(const TermP& t, Strategy s = Strategy::NormalOrder, StepKind* kind = nullptr);
struct Normalized {
    TermP term;
    std::size_t steps = 0;
    std::size_t beta_steps = 0;
};
Normalized normalize(const TermP& t, Strategy s = Strategy::NormalOrder, std::size_t max_steps = 100000);

// Literal replacement of the hole; binders of C may capture free variables of t.
TermP plug_context(const TermP& ctx, const TermP& t);

} // namespace qlr
