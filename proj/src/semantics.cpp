#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "qlr/error.hpp"
#include "qlr/report.hpp"
#include "qlr/semantics.hpp"

namespace qlr {

// ---------------------------------------------------------------- values and differences

ValueP real_value(double v) {
    auto p = std::make_shared<Value>();
    p->real = v;
    return p;
}

ValueP pair_value(ValueP a, ValueP b) {
    auto p = std::make_shared<Value>();
    p->kind = Value::Kind::Pair;
    p->first = std::move(a);
    p->second = std::move(b);
    return p;
}

ValueP closure_value(std::function<ValueP(const ValueP&)> fn) {
    auto p = std::make_shared<Value>();
    p->kind = Value::Kind::Closure;
    p->fn = std::move(fn);
    return p;
}

ValueP function_value(std::function<double(double)> f) {
    return closure_value([f = std::move(f)](const ValueP& x) { return real_value(f(as_real(x))); });
}

ValueP apply_fn(const ValueP& f, const ValueP& x) {
    if (f->kind != Value::Kind::Closure) throw StructuralError("applying a non-function value");
    return f->fn(x);
}

double as_real(const ValueP& v) {
    if (v->kind != Value::Kind::Real) throw StructuralError("expected a real value");
    return v->real;
}

std::string to_string(const ValueP& v) {
    switch (v->kind) {
    case Value::Kind::Real:
        return fmt_real(v->real);
    case Value::Kind::Pair:
        return "(" + to_string(v->first) + ", " + to_string(v->second) + ")";
    case Value::Kind::Closure:
        return "<function>";
    }
    return {};
}

DiffP real_diff(double v) {
    auto p = std::make_shared<Diff>();
    p->real = v;
    return p;
}

DiffP pair_diff(DiffP a, DiffP b) {
    auto p = std::make_shared<Diff>();
    p->kind = Diff::Kind::Pair;
    p->first = std::move(a);
    p->second = std::move(b);
    return p;
}

DiffP fn_diff(std::function<DiffP(const ValueP&, const DiffP&)> fn) {
    auto p = std::make_shared<Diff>();
    p->kind = Diff::Kind::Fn;
    p->fn = std::move(fn);
    return p;
}

DiffP apply_diff(const DiffP& d, const ValueP& x, const DiffP& alpha) {
    if (d->kind != Diff::Kind::Fn) throw StructuralError("applying a non-function difference");
    return d->fn(x, alpha);
}

double as_real(const DiffP& d) {
    if (d->kind != Diff::Kind::Real) throw StructuralError("expected a real difference");
    return d->real;
}

DiffP zero_like(const DiffP& d) {
    switch (d->kind) {
    case Diff::Kind::Real:
        return real_diff(0);
    case Diff::Kind::Pair:
        return pair_diff(zero_like(d->first), zero_like(d->second));
    case Diff::Kind::Fn:
        return fn_diff([d](const ValueP& x, const DiffP& a) { return zero_like(apply_diff(d, x, a)); });
    }
    return d;
}

namespace {

DiffP zip(const DiffP& a, const DiffP& b, double (*op)(double, double)) {
    if (a->kind != b->kind) throw StructuralError("differences of different shapes");
    switch (a->kind) {
    case Diff::Kind::Real:
        return real_diff(op(a->real, b->real));
    case Diff::Kind::Pair:
        return pair_diff(zip(a->first, b->first, op), zip(a->second, b->second, op));
    case Diff::Kind::Fn:
        return fn_diff([a, b, op](const ValueP& x, const DiffP& al) { return zip(apply_diff(a, x, al), apply_diff(b, x, al), op); });
    }
    return a;
}

double max2(double a, double b) { return std::max(a, b); }
double heyting(double a, double b) { return a <= b ? 0.0 : a; }

} // namespace

DiffP join(const DiffP& a, const DiffP& b) { return zip(a, b, max2); }
DiffP heyting_residual(const DiffP& a, const DiffP& b) { return zip(a, b, heyting); }

// ---------------------------------------------------------------- interpretation

namespace {

const Binding& lookup(const SemEnv& env, const std::string& name) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->name == name) return *it;
    throw DomainError("unbound variable " + name);
}

ValueP prim_value(const PrimP& p, std::vector<double> args) {
    if (args.size() == p->arity) return real_value(p->eval(args));
    return closure_value([p, args](const ValueP& x) {
        auto next = args;
        next.push_back(as_real(x));
        return prim_value(p, std::move(next));
    });
}

DiffP prim_diff(const PrimP& p, std::vector<double> args, std::vector<double> alphas) {
    if (args.size() == p->arity) return real_diff(p->modulus(args, alphas));
    return fn_diff([p, args, alphas](const ValueP& x, const DiffP& a) {
        auto na = args;
        auto nb = alphas;
        na.push_back(as_real(x));
        nb.push_back(as_real(a));
        return prim_diff(p, std::move(na), std::move(nb));
    });
}

SemEnv frozen(const SemEnv& env) {
    SemEnv out = env;
    for (auto& b : out) b.diff = b.self ? b.self : zero_like(b.diff);
    return out;
}

// Coarser than the reporting grid: these samples are rebuilt on every call of a Q^r derivative.
constexpr std::size_t kSelfGrid = 101;

DiffP self_distance(const ValueP& v, const TypeP& type) {
    auto n = first_order_arity(type);
    if (n && *n > 0) return distance_diff(v, v, type, false, kSelfGrid);
    return nullptr;
}

template <bool Residual>
DiffP deriv(const TermP& t, const SemEnv& env) {
    using K = Term::Kind;
    switch (t->kind) {
    case K::Var:
        return lookup(env, t->name).diff;
    case K::Const:
        return real_diff(0);
    case K::Prim:
        return prim_diff(t->prim, {}, {});
    case K::Hole:
        throw UnsupportedOperation("cannot interpret an unplugged context");
    case K::Pair:
        return pair_diff(deriv<Residual>(t->a, env), deriv<Residual>(t->b, env));
    case K::Proj: {
        auto d = deriv<Residual>(t->a, env);
        return t->index == 1 ? d->first : d->second;
    }
    case K::Lam:
        return fn_diff([t, env](const ValueP& v, const DiffP& beta) {
            SemEnv inner = env;
            inner.push_back({t->name, v, beta, Residual ? self_distance(v, t->annot) : nullptr});
            auto body = deriv<Residual>(t->a, inner);
            if constexpr (!Residual) {
                return body;
            } else {
                SemEnv still = frozen(env);
                still.push_back({t->name, v, beta, nullptr});
                return heyting_residual(body, deriv<Residual>(t->a, still));
            }
        });
    case K::App: {
        auto x = denote(t->b, env);
        auto dx = deriv<Residual>(t->b, env);
        auto r = apply_diff(deriv<Residual>(t->a, env), x, dx);
        if constexpr (Residual) r = join(r, apply_diff(deriv<Residual>(t->a, frozen(env)), x, dx));
        return r;
    }
    }
    throw StructuralError("malformed term");
}

} // namespace

ValueP denote(const TermP& t, const SemEnv& env) {
    using K = Term::Kind;
    switch (t->kind) {
    case K::Var:
        return lookup(env, t->name).value;
    case K::Const:
        return real_value(t->value);
    case K::Prim:
        return prim_value(t->prim, {});
    case K::Hole:
        throw UnsupportedOperation("cannot interpret an unplugged context");
    case K::Lam:
        return closure_value([t, env](const ValueP& v) {
            SemEnv inner = env;
            inner.push_back({t->name, v, nullptr, nullptr});
            return denote(t->a, inner);
        });
    case K::App:
        return apply_fn(denote(t->a, env), denote(t->b, env));
    case K::Pair:
        return pair_value(denote(t->a, env), denote(t->b, env));
    case K::Proj: {
        auto v = denote(t->a, env);
        return t->index == 1 ? v->first : v->second;
    }
    }
    throw StructuralError("malformed term");
}

DiffP derivQ(const TermP& t, const SemEnv& env) { return deriv<false>(t, env); }
DiffP derivQr(const TermP& t, const SemEnv& env) { return deriv<true>(t, env); }

// ---------------------------------------------------------------- sampled distances

std::vector<double> default_radii() { return {0.0, 0.1, 1.0, std::numbers::pi / 2}; }

namespace {

std::vector<double> grid_points(const Probe& p, std::size_t grid) {
    if (std::isinf(p.radius) || std::isnan(p.radius) || p.radius < 0)
        throw DomainError("probe radius must be finite and non-negative, got " + fmt_real(p.radius));
    if (p.radius == 0 || grid < 2) return {p.x};
    std::vector<double> ys(grid);
    for (std::size_t i = 0; i < grid; ++i)
        ys[i] = p.x - p.radius + 2.0 * p.radius * static_cast<double>(i) / static_cast<double>(grid - 1);
    return ys;
}

double dist_rec(const ValueP& f, const ValueP& g, std::span<const Probe> probes, std::size_t grid) {
    if (probes.empty()) return std::abs(as_real(f) - as_real(g));
    auto fx = apply_fn(f, real_value(probes[0].x));
    double best = 0;
    for (double y : grid_points(probes[0], grid)) {
        auto yv = real_value(y);
        auto fy = apply_fn(f, yv);
        best = std::max(best, dist_rec(fx, fy, probes.subspan(1), grid));
        if (g != f) best = std::max(best, dist_rec(fx, apply_fn(g, yv), probes.subspan(1), grid));
    }
    return best;
}

DiffP distance_level(ValueP f, ValueP g, std::size_t remaining, std::vector<Probe> acc, bool residual,
                     std::size_t grid) {
    if (remaining == 0) {
        double d = residual ? distE(f, g, acc, grid) : distD(f, g, acc, grid);
        return real_diff(d);
    }
    return fn_diff([=](const ValueP& x, const DiffP& a) {
        auto next = acc;
        next.push_back({as_real(x), as_real(a)});
        return distance_level(f, g, remaining - 1, std::move(next), residual, grid);
    });
}

} // namespace

double distD(const ValueP& f, const ValueP& g, std::span<const Probe> probes, std::size_t grid) {
    return dist_rec(f, g, probes, grid);
}

double distE(const ValueP& f, const ValueP& g, std::span<const Probe> probes, std::size_t grid, double tol) {
    double d = distD(f, g, probes, grid);
    double self = distD(f, f, probes, grid);
    return d > self + tol ? d : 0.0;
}

double diff_at(const DiffP& d, std::span<const Probe> probes) {
    if (probes.empty()) return as_real(d);
    return diff_at(apply_diff(d, real_value(probes[0].x), real_diff(probes[0].radius)), probes.subspan(1));
}

DiffP distance_diff(const ValueP& f, const ValueP& g, const TypeP& type, bool residual, std::size_t grid) {
    auto n = first_order_arity(type);
    if (!n) throw UnsupportedOperation("sampled distances need a type Real -> ... -> Real, got " + to_string(type));
    return distance_level(f, g, *n, {}, residual, grid);
}

// ---------------------------------------------------------------- contextual bounds

BoundReport contextualityBound(const TermP& ctx, const TermP& t, const TermP& u,
                               const std::vector<ContextInput>& inputs, Model model, std::size_t grid) {
    auto sigma = typecheck(t);
    auto tau = typecheck(u);
    if (!type_equal(sigma, tau))
        throw TypeError("compared terms have types " + to_string(sigma) + " and " + to_string(tau), u->span.line,
                        u->span.col);
    TypeEnv tenv;
    for (const auto& in : inputs) tenv.emplace_back(in.name, real_type());
    auto result = typecheck(ctx, tenv, sigma);
    if (result->kind != SimpleType::Kind::Real)
        throw TypeError("context has type " + to_string(result) + ", expected Real", ctx->span.line, ctx->span.col);

    const std::string hole = "[]";
    auto body = plug_context(ctx, mk_var(hole));
    auto vt = denote(t);
    auto vu = denote(u);
    bool residual = model == Model::Qr;

    SemEnv env;
    for (const auto& in : inputs) env.push_back({in.name, real_value(in.value), real_diff(in.radius), nullptr});
    env.push_back({hole, vt, distance_diff(vt, vu, sigma, residual, grid), residual ? self_distance(vt, sigma) : nullptr});

    BoundReport rep;
    rep.bound = as_real(residual ? derivQr(body, env) : derivQ(body, env));

    auto run = [&](const ValueP& hv, const std::vector<double>& xs) {
        SemEnv e;
        for (std::size_t i = 0; i < inputs.size(); ++i) e.push_back({inputs[i].name, real_value(xs[i]), nullptr, nullptr});
        e.push_back({hole, hv, nullptr, nullptr});
        return as_real(denote(body, e));
    };
    std::vector<double> centre;
    for (const auto& in : inputs) centre.push_back(in.value);
    double ct = run(vt, centre);
    rep.actual = std::abs(ct - run(vu, centre));
    if (!inputs.empty()) {
        // quasi-random points of the budget box, plus its corners along the first axis
        std::vector<double> xs(inputs.size());
        for (std::size_t k = 0; k < grid; ++k) {
            for (std::size_t i = 0; i < inputs.size(); ++i) {
                double s = inputs.size() == 1 ? (grid > 1 ? double(k) / double(grid - 1) : 0.5)
                                              : std::fmod(0.5 + double(k + 1) * std::sqrt(2.0 + double(i)), 1.0);
                xs[i] = inputs[i].value + inputs[i].radius * (2 * s - 1);
            }
            rep.actual = std::max(rep.actual, std::abs(ct - run(vu, xs)));
        }
    }
    return rep;
}

// ---------------------------------------------------------------- figure 1 and non-additivity

Fig1Functions fig1_functions(char which) {
    if (which == 'a')
        return {[](double) { return 0.3; }, [](double y) { return 2.25 - 0.8 * std::cos(y); },
                [](double y) { return 0.65 + 0.8 * std::cos(y); }};
    if (which == 'b') {
        // h sits at f(x + r) for x = 0, r = 2, so each h(y) is no farther from f(0) than f(2)
        const double level = 1.1 - 0.8 * std::cos(2.0);
        return {[](double y) { return 1.1 - 0.8 * std::cos(y); }, [](double y) { return 1.8 + 0.8 * std::cos(y); },
                [level](double) { return level; }};
    }
    throw DomainError(std::string("figure must be 'a' or 'b', got '") + which + "'");
}

Fig1Row reproduceFig1(char which, double x, double r, std::size_t grid) {
    auto fns = fig1_functions(which);
    auto f = function_value(fns.f), g = function_value(fns.g), h = function_value(fns.h);
    Probe p[] = {{x, r}};
    Fig1Row row{x, r};
    constexpr double tol = 1e-9;
    if (which == 'a') {
        row.d_fg = distD(f, g, p, grid);
        row.d_fh = distD(f, h, p, grid);
        row.d_hg = distD(h, g, p, grid);
        row.d_hh = distD(h, h, p, grid);
        row.violated = row.d_fg > row.d_fh + row.d_hg - row.d_hh + tol;
    } else {
        row.d_fg = distE(f, g, p, grid, tol);
        row.d_fh = distE(f, h, p, grid, tol);
        row.d_hg = distE(h, g, p, grid, tol);
        row.d_hh = distE(h, h, p, grid, tol);
        row.violated = row.d_fg > row.d_fh + row.d_hg + tol;
    }
    return row;
}

std::string fig1_csv(char which, std::span<const Fig1Row> rows) {
    std::string out = std::string("# qlr-fig1 v1 figure=") + which +
                      (which == 'a' ? " distance=d" : " distance=e") + "\n" + "x,r,d_fg,d_fh,d_hg,d_hh,violated\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%s\n", r.x, r.r, r.d_fg, r.d_fh, r.d_hg, r.d_hh,
                      r.violated ? "true" : "false");
        out += buf;
    }
    return out;
}

nlohmann::json to_json(const Fig1Row& r) {
    return {{"x", r.x},       {"r", r.r},       {"d_fg", r.d_fg},
            {"d_fh", r.d_fh}, {"d_hg", r.d_hg}, {"d_hh", r.d_hh},
            {"violated", r.violated}};
}

NonAdditivity nonAdditivityWitness(std::size_t grid) {
    auto f = function_value([](double x) { return std::abs(x) <= 1 ? x : 2 * x; });
    auto g = function_value([](double x) { return std::abs(x) <= 1 ? 2 * x : x; });
    auto D = [&](const ValueP& v, double r) {
        Probe p[] = {{0.0, r}};
        return distD(v, v, p, grid);
    };
    return {D(f, 1), D(f, 2), D(g, 1), D(g, 2)};
}

// ---------------------------------------------------------------- probes

namespace {

constexpr double kProbeReals[] = {-1.25, -0.5, 0.0, 0.3, 0.75, 1.1, 1.6, 2.4};
constexpr double kProbeDiffs[] = {0.0, 0.1, 0.5, 1.0};

double probe_fn(std::size_t k, double s) {
    switch (k % 4) {
    case 0:
        return std::sin(s);
    case 1:
        return 2 * s + 1;
    case 2:
        return 0.5 * s * s;
    default:
        return std::cos(s) - s;
    }
}

double first_obs(const std::vector<double>& v) { return v.empty() ? 0.0 : v.front(); }

} // namespace

ValueP probe_value(const TypeP& type, std::size_t p) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return real_value(kProbeReals[p % 8]);
    case SimpleType::Kind::Prod:
        return pair_value(probe_value(type->left, p), probe_value(type->right, p * 5 + 3));
    case SimpleType::Kind::Arrow: {
        auto dom = type->left, cod = type->right;
        if (cod->kind == SimpleType::Kind::Real)
            return closure_value([dom, p](const ValueP& v) { return real_value(probe_fn(p, first_obs(observe(v, dom, 0)))); });
        auto out = probe_value(cod, p + 1);
        return closure_value([out](const ValueP&) { return out; });
    }
    }
    return nullptr;
}

DiffP probe_diff(const TypeP& type, std::size_t p) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return real_diff(kProbeDiffs[(p / 8) % 4]);
    case SimpleType::Kind::Prod:
        return pair_diff(probe_diff(type->left, p), probe_diff(type->right, p * 5 + 3));
    case SimpleType::Kind::Arrow: {
        auto dom = type->left, cod = type->right;
        if (cod->kind == SimpleType::Kind::Real)
            return fn_diff([dom, p](const ValueP&, const DiffP& a) {
                return real_diff(0.5 * double(p % 3) + std::abs(first_obs(observe(a, dom, 0))));
            });
        auto out = probe_diff(cod, p + 1);
        return fn_diff([out](const ValueP&, const DiffP&) { return out; });
    }
    }
    return nullptr;
}

std::vector<double> observe(const ValueP& v, const TypeP& type, std::size_t p) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return {as_real(v)};
    case SimpleType::Kind::Prod: {
        auto a = observe(v->first, type->left, p);
        auto b = observe(v->second, type->right, p);
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }
    case SimpleType::Kind::Arrow:
        return observe(apply_fn(v, probe_value(type->left, p)), type->right, p + 1);
    }
    return {};
}

std::vector<double> observe(const DiffP& d, const TypeP& type, std::size_t p) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return {as_real(d)};
    case SimpleType::Kind::Prod: {
        auto a = observe(d->first, type->left, p);
        auto b = observe(d->second, type->right, p);
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }
    case SimpleType::Kind::Arrow:
        return observe(apply_diff(d, probe_value(type->left, p), probe_diff(type->left, p)), type->right, p + 1);
    }
    return {};
}

} // namespace qlr
