#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "qlr/error.hpp"
#include "qlr/ll.hpp"

namespace qlr {

namespace {
constexpr double kInfD = std::numeric_limits<double>::infinity();
constexpr double kDeltaCap = 1.0;
} // namespace

FinFilter lawvere_filter() {
    return {"[0,inf)", [](double a) { return a >= 0 && std::isfinite(a); }};
}

LawReport check_filter(const FinFilter& f, std::span<const double> samples) {
    LawReport rep;
    rep.subject = "finiteness filter " + f.name;
    LawTally down(rep.add("downward closed"));
    LawTally sum(rep.add("closed under +"));
    for (double a : samples)
        for (double b : samples) {
            if (f.contains(a) && b <= a)
                down.check(f.contains(b), [&] { return fmt_real(b) + " <= " + fmt_real(a) + " is outside"; });
            if (f.contains(a) && f.contains(b))
                sum.check(f.contains(a + b), [&] { return fmt_real(a) + " + " + fmt_real(b) + " is outside"; });
        }
    return rep;
}

// ---------------------------------------------------------------- values

LLValueP ll_real(double v) {
    auto p = std::make_shared<LLValue>();
    p->real = v;
    return p;
}

LLValueP ll_pair(LLValueP a, LLValueP b) {
    auto p = std::make_shared<LLValue>();
    p->kind = LLValue::Kind::Pair;
    p->first = std::move(a);
    p->second = std::move(b);
    return p;
}

LLValueP ll_arrow(std::function<LLValueP(const LLValueP&)> fn,
                  std::function<LLDiffP(const LLValueP&, const LLDiffP&)> fam) {
    auto p = std::make_shared<LLValue>();
    p->kind = LLValue::Kind::Arrow;
    p->fn = std::move(fn);
    p->fam = std::move(fam);
    return p;
}

LLDiffP ll_dreal(double v) {
    auto p = std::make_shared<LLDiff>();
    p->real = v;
    return p;
}

LLDiffP ll_dpair(LLDiffP a, LLDiffP b) {
    auto p = std::make_shared<LLDiff>();
    p->kind = LLDiff::Kind::Pair;
    p->first = std::move(a);
    p->second = std::move(b);
    return p;
}

LLDiffP ll_table(std::function<LLDiffP(const LLValueP&)> t) {
    auto p = std::make_shared<LLDiff>();
    p->kind = LLDiff::Kind::Table;
    p->table = std::move(t);
    return p;
}

LLDiffP ll_zero(const TypeP& type) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return ll_dreal(0);
    case SimpleType::Kind::Prod:
        return ll_dpair(ll_zero(type->left), ll_zero(type->right));
    case SimpleType::Kind::Arrow: {
        auto cod = type->right;
        return ll_table([cod](const LLValueP&) { return ll_zero(cod); });
    }
    }
    return nullptr;
}

LLDiffP ll_add(const LLDiffP& a, const LLDiffP& b) {
    if (a->kind != b->kind) throw StructuralError("adding differences of different shapes");
    switch (a->kind) {
    case LLDiff::Kind::Real:
        return ll_dreal(a->real + b->real);
    case LLDiff::Kind::Pair:
        return ll_dpair(ll_add(a->first, b->first), ll_add(a->second, b->second));
    case LLDiff::Kind::Table:
        return ll_table([a, b](const LLValueP& x) { return ll_add(ll_lookup(a, x), ll_lookup(b, x)); });
    }
    return a;
}

LLValueP ll_call(const LLValueP& f, const LLValueP& x) {
    if (f->kind != LLValue::Kind::Arrow) throw StructuralError("applying a non-function value");
    return f->fn(x);
}

LLDiffP ll_fam(const LLValueP& f, const LLValueP& x, const LLDiffP& alpha) {
    if (f->kind != LLValue::Kind::Arrow) throw StructuralError("family of a non-function value");
    return f->fam(x, alpha);
}

LLDiffP ll_lookup(const LLDiffP& table, const LLValueP& x) {
    if (table->kind != LLDiff::Kind::Table) throw StructuralError("looking up a non-table difference");
    return table->table(x);
}

double as_real(const LLValueP& v) {
    if (v->kind != LLValue::Kind::Real) throw StructuralError("expected a real value");
    return v->real;
}

double as_real(const LLDiffP& d) {
    if (d->kind != LLDiff::Kind::Real) throw StructuralError("expected a real difference");
    return d->real;
}

// ---------------------------------------------------------------- radius trace

namespace {
thread_local RadiusTrace* current_trace = nullptr;
}

RadiusTrace::RadiusTrace() : delta_(kInfD), outer_(current_trace) { current_trace = this; }

RadiusTrace::~RadiusTrace() {
    current_trace = outer_;
    if (outer_) {
        outer_->delta_ = std::min(outer_->delta_, delta_);
        if (degenerate_ && !outer_->degenerate_) {
            outer_->degenerate_ = true;
            outer_->culprit_ = culprit_;
        }
    }
}

void RadiusTrace::record(const PrimitiveSpec& p, std::span<const double> args, double alpha) {
    RadiusTrace* t = current_trace;
    if (!t) return;
    LipInfo lip = p.lip(args);
    if (!(lip.radius > 0)) {
        if (!t->degenerate_) {
            std::ostringstream os;
            os << p.display() << " at (";
            for (std::size_t i = 0; i < args.size(); ++i) os << (i ? ", " : "") << fmt_real(args[i]);
            os << ") has radius " << fmt_real(lip.radius);
            t->culprit_ = os.str();
        }
        t->degenerate_ = true;
        t->delta_ = 0;
        return;
    }
    if (alpha > 0 && std::isfinite(lip.radius))
        t->delta_ = std::min(t->delta_, lip.radius / (static_cast<double>(p.arity) * alpha));
}

// ---------------------------------------------------------------- interpretation

namespace {

const LLBinding& lookup(const LLEnv& env, const std::string& name) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->name == name) return *it;
    throw DomainError("unbound variable " + name);
}

// Lip(f)(args) * alpha once every argument is known; alpha is the difference of one argument.
LLDiffP prim_diff(const PrimP& p, std::vector<double> args, double alpha) {
    if (args.size() == p->arity) {
        RadiusTrace::record(*p, args, alpha);
        if (alpha == 0) return ll_dreal(0);
        return ll_dreal(p->lip(args).constant * alpha);
    }
    return ll_table([p, args, alpha](const LLValueP& x) {
        auto next = args;
        next.push_back(as_real(x));
        return prim_diff(p, std::move(next), alpha);
    });
}

LLValueP prim_value(const PrimP& p, std::vector<double> args) {
    if (args.size() == p->arity) return ll_real(p->eval(args));
    return ll_arrow(
        [p, args](const LLValueP& x) {
            auto next = args;
            next.push_back(as_real(x));
            return prim_value(p, std::move(next));
        },
        [p, args](const LLValueP& x, const LLDiffP& a) {
            auto next = args;
            next.push_back(as_real(x));
            return prim_diff(p, std::move(next), as_real(a));
        });
}

LLEnv frozen(const LLEnv& env) {
    LLEnv out = env;
    for (auto& b : out) b.diff = ll_zero(b.type);
    return out;
}

} // namespace

LLValueP denoteLL(const TermP& t, const LLEnv& env) {
    using K = Term::Kind;
    switch (t->kind) {
    case K::Var:
        return lookup(env, t->name).value;
    case K::Const:
        return ll_real(t->value);
    case K::Prim:
        return prim_value(t->prim, {});
    case K::Hole:
        throw UnsupportedOperation("cannot interpret an unplugged context");
    case K::Lam:
        return ll_arrow(
            [t, env](const LLValueP& v) {
                LLEnv inner = env;
                inner.push_back({t->name, v, nullptr, t->annot});
                return denoteLL(t->a, inner);
            },
            [t, env](const LLValueP& v, const LLDiffP& beta) {
                LLEnv inner = frozen(env);
                inner.push_back({t->name, v, beta, t->annot});
                return derivLL(t->a, inner);
            });
    case K::App:
        return ll_call(denoteLL(t->a, env), denoteLL(t->b, env));
    case K::Pair:
        return ll_pair(denoteLL(t->a, env), denoteLL(t->b, env));
    case K::Proj: {
        auto v = denoteLL(t->a, env);
        return t->index == 1 ? v->first : v->second;
    }
    }
    throw StructuralError("malformed term");
}

LLDiffP derivLL(const TermP& t, const LLEnv& env) {
    using K = Term::Kind;
    switch (t->kind) {
    case K::Var: {
        const auto& b = lookup(env, t->name);
        if (!b.diff) throw DomainError("variable " + t->name + " has no difference");
        return b.diff;
    }
    case K::Const:
        return ll_dreal(0);
    case K::Prim:
        return ll_zero(first_order_type(t->prim->arity));
    case K::Hole:
        throw UnsupportedOperation("cannot interpret an unplugged context");
    case K::Lam:
        return ll_table([t, env](const LLValueP& v) {
            LLEnv inner = env;
            inner.push_back({t->name, v, ll_zero(t->annot), t->annot});
            return derivLL(t->a, inner);
        });
    case K::App: {
        auto f = denoteLL(t->a, env);
        auto x = denoteLL(t->b, env);
        return ll_add(ll_lookup(derivLL(t->a, env), x), ll_fam(f, x, derivLL(t->b, env)));
    }
    case K::Pair:
        return ll_dpair(derivLL(t->a, env), derivLL(t->b, env));
    case K::Proj: {
        auto d = derivLL(t->a, env);
        return t->index == 1 ? d->first : d->second;
    }
    }
    throw StructuralError("malformed term");
}

// ---------------------------------------------------------------- currying

std::vector<double> ll_probe_points() { return {-2.0, -0.7, 0.0, 0.4, 1.3, 3.0}; }

LLCurried llCurry(const LLFlatMap& m) {
    const auto pts = ll_probe_points();
    const double diffs[] = {0.0, 0.1, 0.5, 2.0};
    for (double z : pts)
        for (double x : pts)
            for (double zeta : diffs)
                for (double alpha : diffs) {
                    double whole = m.phi(z, x, zeta, alpha);
                    double split = m.phi(z, x, zeta, 0) + m.phi(z, x, 0, alpha);
                    double zero = m.phi(z, x, 0, 0);
                    if (std::abs(whole - split) > 1e-9 * std::max(1.0, std::abs(whole)) || zero != 0) {
                        std::ostringstream os;
                        os << "family is not additive at z=" << fmt_real(z) << " x=" << fmt_real(x)
                           << " zeta=" << fmt_real(zeta) << " alpha=" << fmt_real(alpha) << ": " << fmt_real(whole)
                           << " vs " << fmt_real(split);
                        throw ContractError(os.str());
                    }
                }
    return {m.f, [phi = m.phi](double z, double x, double a) { return phi(z, x, 0, a); },
            [phi = m.phi](double z, double zeta, double x) { return phi(z, x, zeta, 0); }};
}

LLFlatMap llUncurry(const LLCurried& c) {
    return {c.g, [psi = c.psi, chi = c.chi](double z, double x, double zeta, double a) {
                return chi(z, zeta, x) + psi(z, x, a);
            }};
}

// ---------------------------------------------------------------- Lipschitz validity

nlohmann::json to_json(const LipWitnessReport& r) {
    return {{"point", r.point},       {"radius", r.delta},    {"alphas", r.alphas}, {"bound", r.bound},
            {"observed", r.observed}, {"margin", r.margin()}, {"samples", r.samples}};
}

namespace {

struct Applied {
    TermP body;
    std::vector<std::string> vars;
};

Applied apply_fresh(const TermP& t, std::size_t n) {
    Applied a{t, {}};
    auto fv = free_vars(t);
    for (std::size_t i = 0; i < n; ++i) {
        std::string v = "arg" + std::to_string(i);
        while (std::find(fv.begin(), fv.end(), v) != fv.end()) v += "'";
        a.vars.push_back(v);
        a.body = mk_app(a.body, mk_var(v));
    }
    return a;
}

LLEnv point_env(const Applied& a, std::span<const double> x, std::span<const double> alpha) {
    LLEnv env;
    for (std::size_t i = 0; i < a.vars.size(); ++i) env.push_back({a.vars[i], ll_real(x[i]), ll_dreal(alpha[i]), real_type()});
    return env;
}

} // namespace

LipWitnessReport checkLipValidity(const TermP& t, const std::vector<double>& point, const std::vector<double>& alphas,
                                  std::size_t samples, std::uint64_t seed) {
    auto ty = typecheck(t);
    if (!free_vars(t).empty()) throw ContractError("checkLipValidity needs a closed term");
    auto n = first_order_arity(ty);
    if (!n || *n == 0) throw UnsupportedOperation("checkLipValidity needs a type Real -> ... -> Real, got " + to_string(ty));
    if (point.size() != *n || alphas.size() != *n)
        throw ContractError("expected " + std::to_string(*n) + " coordinates and budgets");
    for (double a : alphas)
        if (!(a >= 0) || !std::isfinite(a)) throw DomainError("budgets must be finite and non-negative");

    auto app = apply_fresh(t, *n);
    LipWitnessReport rep;
    rep.point = point;
    rep.alphas = alphas;
    {
        RadiusTrace trace;
        std::vector<double> unit(*n, 1.0);
        derivLL(app.body, point_env(app, point, unit));
        if (trace.degenerate()) throw ContractError("no valid radius: " + trace.culprit());
        rep.delta = std::min(kDeltaCap, trace.delta());
    }
    rep.bound = as_real(derivLL(app.body, point_env(app, point, alphas)));

    auto value = [&](const std::vector<double>& x) {
        LLEnv env;
        for (std::size_t i = 0; i < *n; ++i) env.push_back({app.vars[i], ll_real(x[i]), nullptr, real_type()});
        return as_real(denoteLL(app.body, env));
    };
    auto norm = [](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return std::sqrt(s);
    };
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> y(*n), z(*n);
    auto consider = [&] {
        if (norm(y, point) > rep.delta || norm(z, point) > rep.delta) return;
        ++rep.samples;
        rep.observed = std::max(rep.observed, std::abs(value(y) - value(z)));
    };
    // symmetric pairs straddling the point first, then random ones
    for (std::size_t i = 0; i < *n; ++i) {
        y[i] = point[i] - alphas[i] / 2;
        z[i] = point[i] + alphas[i] / 2;
    }
    consider();
    for (std::size_t k = 0; k < samples; ++k) {
        for (std::size_t i = 0; i < *n; ++i) {
            y[i] = point[i] + rep.delta * u(rng) / std::sqrt(double(*n));
            double step = alphas[i] * (k % 2 ? 1.0 : u(rng));
            z[i] = y[i] + step;
        }
        consider();
    }
    return rep;
}

// ---------------------------------------------------------------- local contextuality

nlohmann::json to_json(const LocalBoundReport& r) {
    return {{"in_regime", r.in_regime}, {"delta", r.delta_t}, {"gate_distance", r.gate_distance},
            {"bound", r.bound},         {"observed", r.actual}, {"margin", r.bound - r.actual},
            {"note", r.note}};
}

namespace {

double eval_first_order(const LLValueP& f, std::span<const double> xs) {
    LLValueP v = f;
    for (double x : xs) v = ll_call(v, ll_real(x));
    return as_real(v);
}

LLDiffP distance_table(const LLValueP& f, const LLValueP& g, std::size_t remaining) {
    if (remaining == 0) return ll_dreal(std::abs(as_real(f) - as_real(g)));
    return ll_table([f, g, remaining](const LLValueP& x) { return distance_table(ll_call(f, x), ll_call(g, x), remaining - 1); });
}

} // namespace

LocalBoundReport localContextualityBound(const TermP& ctx, const TermP& t, const TermP& u,
                                         const std::vector<ContextInput>& inputs, double probe_radius,
                                         std::size_t grid) {
    auto sigma = typecheck(t);
    auto tau = typecheck(u);
    if (!type_equal(sigma, tau))
        throw TypeError("compared terms have types " + to_string(sigma) + " and " + to_string(tau), u->span.line,
                        u->span.col);
    auto n = first_order_arity(sigma);
    if (!n) throw UnsupportedOperation("local bounds need a type Real -> ... -> Real, got " + to_string(sigma));
    TypeEnv tenv;
    for (const auto& in : inputs) tenv.emplace_back(in.name, real_type());
    auto result = typecheck(ctx, tenv, sigma);
    if (result->kind != SimpleType::Kind::Real)
        throw TypeError("context has type " + to_string(result) + ", expected Real", ctx->span.line, ctx->span.col);

    const std::string hole = "[]";
    auto body = plug_context(ctx, mk_var(hole));
    auto vt = denoteLL(t);
    auto vu = denoteLL(u);

    LocalBoundReport rep;
    LLEnv env;
    for (const auto& in : inputs) env.push_back({in.name, ll_real(in.value), ll_dreal(in.radius), real_type()});
    env.push_back({hole, vt, distance_table(vt, vu, *n), sigma});
    {
        RadiusTrace trace;
        rep.bound = as_real(derivLL(body, env));
        if (trace.degenerate()) throw ContractError("no valid radius: " + trace.culprit());
        rep.delta_t = std::min(kDeltaCap, trace.delta());
    }

    // gate: a(t,u) <= delta_t at every probe
    std::vector<double> xs(*n);
    std::size_t total = 1;
    for (std::size_t i = 0; i < *n; ++i) total *= grid;
    for (std::size_t k = 0; k < total; ++k) {
        std::size_t rest = k;
        for (std::size_t i = 0; i < *n; ++i) {
            std::size_t j = rest % grid;
            rest /= grid;
            xs[i] = grid < 2 ? 0.0 : -probe_radius + 2 * probe_radius * double(j) / double(grid - 1);
        }
        rep.gate_distance = std::max(rep.gate_distance, std::abs(eval_first_order(vt, xs) - eval_first_order(vu, xs)));
    }
    rep.in_regime = rep.gate_distance <= rep.delta_t;
    if (!rep.in_regime) {
        rep.note = "out of local regime: a(t,u) reaches " + fmt_real(rep.gate_distance) + " > delta " +
                   fmt_real(rep.delta_t);
    }

    auto run = [&](const LLValueP& hv, const std::vector<double>& at) {
        LLEnv e;
        for (std::size_t i = 0; i < inputs.size(); ++i) e.push_back({inputs[i].name, ll_real(at[i]), nullptr, real_type()});
        e.push_back({hole, hv, nullptr, sigma});
        return as_real(denoteLL(body, e));
    };
    std::vector<double> centre;
    for (const auto& in : inputs) centre.push_back(in.value);
    double ct = run(vt, centre);
    rep.actual = std::abs(ct - run(vu, centre));
    if (!inputs.empty()) {
        std::vector<double> at(inputs.size());
        const std::size_t pts = 1001;
        for (std::size_t k = 0; k < pts; ++k) {
            for (std::size_t i = 0; i < inputs.size(); ++i) {
                double s = inputs.size() == 1 ? double(k) / double(pts - 1)
                                              : std::fmod(0.5 + double(k + 1) * std::sqrt(2.0 + double(i)), 1.0);
                at[i] = inputs[i].value + inputs[i].radius * (2 * s - 1);
            }
            rep.actual = std::max(rep.actual, std::abs(ct - run(vu, at)));
        }
    }
    return rep;
}

// ---------------------------------------------------------------- differential lambda-category properties

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

LLEnv env1(const std::string& x, double v, double a) { return {{x, ll_real(v), ll_dreal(a), real_type()}}; }

} // namespace

LawReport checkDLambdaProps() {
    LawReport rep;
    rep.subject = "LL derivative properties";
    const std::vector<TermP> unary = {
        parse_term("x"),
        parse_term("sin x"),
        parse_term("mul x x"),
        parse_term("add (sin x) (cos x)"),
        parse_term("affine[2.0,1.0] (abs x)"),
        parse_term("max x (mul 0.5 x)"),
        parse_term("(\\y:Real. mul y (sin y)) (add x 1.0)"),
    };
    const std::vector<TermP> binary = {
        parse_term("mul z x"),
        parse_term("add (sin z) x"),
        parse_term("min z (cos x)"),
        parse_term("mul (add z x) (sin (mul z x))"),
    };
    const double pts[] = {-1.2, 0.0, 0.7, 2.0};
    const double diffs[] = {0.0, 0.1, 0.5, 1.0};

    {
        LawTally t(rep.add("(1) identity and composition"));
        for (double v : pts)
            for (double a : diffs) {
                double d = as_real(derivLL(parse_term("x"), env1("x", v, a)));
                t.check(close(d, a), [&] { return "D(id)(" + fmt_real(v) + "," + fmt_real(a) + ") = " + fmt_real(d); });
                for (const auto& f : unary)
                    for (const auto& g : unary) {
                        auto comp = substitute(g, "x", f);
                        double lhs = as_real(derivLL(comp, env1("x", v, a)));
                        double fv = as_real(denoteLL(f, env1("x", v, a)));
                        double fd = as_real(derivLL(f, env1("x", v, a)));
                        double rhs = as_real(derivLL(g, env1("x", fv, fd)));
                        t.check(close(lhs, rhs), [&] {
                            return to_string(comp) + " at (" + fmt_real(v) + "," + fmt_real(a) + "): " + fmt_real(lhs) +
                                   " vs " + fmt_real(rhs);
                        });
                    }
            }
    }
    {
        LawTally t(rep.add("(2) additivity"));
        for (const auto& b : binary)
            for (double z : pts)
                for (double x : pts)
                    for (double a1 : diffs)
                        for (double a2 : diffs)
                            for (double b1 : diffs) {
                                auto at = [&](double za, double xa) {
                                    LLEnv e{{"z", ll_real(z), ll_dreal(za), real_type()},
                                            {"x", ll_real(x), ll_dreal(xa), real_type()}};
                                    return as_real(derivLL(b, e));
                                };
                                double lhs = at(a1 + b1, a2 + b1), rhs = at(a1, a2) + at(b1, b1);
                                t.check(close(lhs, rhs) && at(0, 0) == 0, [&] {
                                    return to_string(b) + " at z=" + fmt_real(z) + " x=" + fmt_real(x) + ": " +
                                           fmt_real(lhs) + " vs " + fmt_real(rhs);
                                });
                            }
    }
    {
        LawTally t(rep.add("(3) projections"));
        auto pt = prod_type(real_type(), real_type());
        for (double v : pts)
            for (double a : diffs)
                for (double b : diffs) {
                    LLEnv e{{"p", ll_pair(ll_real(v), ll_real(-v)), ll_dpair(ll_dreal(a), ll_dreal(b)), pt}};
                    double l = as_real(derivLL(parse_term("fst p"), e));
                    double r = as_real(derivLL(parse_term("snd p"), e));
                    t.check(l == a && r == b, [&] { return "projections give " + fmt_real(l) + ", " + fmt_real(r); });
                }
    }
    {
        LawTally t(rep.add("(4) pairing"));
        for (const auto& f : unary)
            for (const auto& g : unary)
                for (double v : pts)
                    for (double a : diffs) {
                        auto d = derivLL(mk_pair(f, g), env1("x", v, a));
                        double l = as_real(derivLL(f, env1("x", v, a)));
                        double r = as_real(derivLL(g, env1("x", v, a)));
                        t.check(as_real(d->first) == l && as_real(d->second) == r,
                                [&] { return to_string(mk_pair(f, g)) + " at " + fmt_real(v); });
                    }
    }
    {
        LawTally t(rep.add("(5) D-curry"));
        for (const auto& b : binary) {
            auto lam = mk_lam("x", real_type(), b);
            for (double z : pts)
                for (double zeta : diffs)
                    for (double x : pts) {
                        double lhs = as_real(ll_lookup(derivLL(lam, env1("z", z, zeta)), ll_real(x)));
                        LLEnv e{{"z", ll_real(z), ll_dreal(zeta), real_type()}, {"x", ll_real(x), ll_dreal(0), real_type()}};
                        double rhs = as_real(derivLL(b, e));
                        t.check(close(lhs, rhs), [&] {
                            return to_string(lam) + " at z=" + fmt_real(z) + " x=" + fmt_real(x) + ": " + fmt_real(lhs) +
                                   " vs " + fmt_real(rhs);
                        });
                    }
        }
    }
    {
        LawTally t(rep.add("(6) application"));
        for (const auto& b : binary)
            for (const auto& gx : unary) {
                auto h = mk_lam("x", real_type(), b); // h : Z -> (X -> Y)
                auto g = substitute(gx, "x", mk_var("z"));
                auto whole = mk_app(h, g);
                for (double z : pts)
                    for (double zeta : diffs) {
                        auto ez = env1("z", z, zeta);
                        double lhs = as_real(derivLL(whole, ez));
                        auto gz = denoteLL(g, ez);
                        double first = as_real(ll_lookup(derivLL(h, ez), gz));
                        LLEnv e{{"z", ll_real(z), ll_dreal(0), real_type()}, {"x", gz, derivLL(g, ez), real_type()}};
                        double second = as_real(derivLL(b, e));
                        t.check(close(lhs, first + second), [&] {
                            return to_string(whole) + " at z=" + fmt_real(z) + ": " + fmt_real(lhs) + " vs " +
                                   fmt_real(first + second);
                        });
                    }
            }
    }
    return rep;
}

// ---------------------------------------------------------------- separation quotient

FiniteQlr quotientSeparate(const FiniteQlr& X) {
    if (X.width() != 1) throw UnsupportedOperation("quotientSeparate works on width-1 spaces");
    auto axioms = checkAxioms(X, {"reflexive", "symmetric", "transitive"});
    for (const auto& r : axioms.results)
        if (!r.passed) throw ContractError("not a pseudo-metric, " + r.law + " fails: " + r.witness);
    const auto& q = X.base();
    const std::size_t n = X.size();
    std::vector<std::size_t> cls(n, n);
    std::vector<std::size_t> reps;
    for (std::size_t x = 0; x < n; ++x) {
        if (cls[x] != n) continue;
        cls[x] = reps.size();
        for (std::size_t y = x + 1; y < n; ++y)
            if (cls[y] == n && X(x, y) == q.zero()) cls[y] = reps.size();
        reps.push_back(x);
    }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            if (X(x, y) != X(reps[cls[x]], reps[cls[y]]))
                throw ContractError("distance depends on representatives: a(" + X.carrier()[x] + "," + X.carrier()[y] +
                                    ") differs from a(" + X.carrier()[reps[cls[x]]] + "," +
                                    X.carrier()[reps[cls[y]]] + ")");
    std::vector<std::string> labels(reps.size());
    for (std::size_t x = 0; x < n; ++x) labels[cls[x]] += (labels[cls[x]].empty() ? "" : "=") + X.carrier()[x];
    std::vector<Ix> dist;
    for (std::size_t a : reps)
        for (std::size_t b : reps) dist.push_back(X(a, b));
    return FiniteQlr(labels, X.base_ptr(), dist);
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

double probe_slope(std::size_t k, double s) {
    switch (k % 4) {
    case 0:
        return 1.0;
    case 1:
        return 2.0;
    case 2:
        return std::abs(s) + 1.0;
    default:
        return 2.0;
    }
}

double first(const std::vector<double>& v) { return v.empty() ? 0.0 : v.front(); }

} // namespace

LLValueP ll_probe_value(const TypeP& type, std::size_t p) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return ll_real(kProbeReals[p % 8]);
    case SimpleType::Kind::Prod:
        return ll_pair(ll_probe_value(type->left, p), ll_probe_value(type->right, p * 5 + 3));
    case SimpleType::Kind::Arrow: {
        auto dom = type->left, cod = type->right;
        if (cod->kind == SimpleType::Kind::Real)
            return ll_arrow(
                [dom, p](const LLValueP& v) { return ll_real(probe_fn(p, first(observe_ll(v, dom, 0)))); },
                [dom, p](const LLValueP& v, const LLDiffP& a) {
                    return ll_dreal(probe_slope(p, first(observe_ll(v, dom, 0))) * std::abs(first(observe_ll(a, dom, 0))));
                });
        auto out = ll_probe_value(cod, p + 1);
        return ll_arrow([out](const LLValueP&) { return out; }, [cod](const LLValueP&, const LLDiffP&) { return ll_zero(cod); });
    }
    }
    return nullptr;
}

LLDiffP ll_probe_diff(const TypeP& type, std::size_t p) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return ll_dreal(kProbeDiffs[(p / 8) % 4]);
    case SimpleType::Kind::Prod:
        return ll_dpair(ll_probe_diff(type->left, p), ll_probe_diff(type->right, p * 5 + 3));
    case SimpleType::Kind::Arrow: {
        auto dom = type->left, cod = type->right;
        if (cod->kind == SimpleType::Kind::Real)
            return ll_table([dom, p](const LLValueP& v) {
                return ll_dreal(0.25 * double(p % 3) * std::abs(first(observe_ll(v, dom, 0))));
            });
        auto out = ll_probe_diff(cod, p + 1);
        return ll_table([out](const LLValueP&) { return out; });
    }
    }
    return nullptr;
}

std::vector<double> observe_ll(const LLValueP& v, const TypeP& type, std::size_t p) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return {as_real(v)};
    case SimpleType::Kind::Prod: {
        auto a = observe_ll(v->first, type->left, p);
        auto b = observe_ll(v->second, type->right, p);
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }
    case SimpleType::Kind::Arrow: {
        auto x = ll_probe_value(type->left, p);
        auto a = observe_ll(ll_call(v, x), type->right, p + 1);
        auto b = observe_ll(ll_fam(v, x, ll_probe_diff(type->left, p)), type->right, p + 1);
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }
    }
    return {};
}

std::vector<double> observe_ll(const LLDiffP& d, const TypeP& type, std::size_t p) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return {as_real(d)};
    case SimpleType::Kind::Prod: {
        auto a = observe_ll(d->first, type->left, p);
        auto b = observe_ll(d->second, type->right, p);
        a.insert(a.end(), b.begin(), b.end());
        return a;
    }
    case SimpleType::Kind::Arrow:
        return observe_ll(ll_lookup(d, ll_probe_value(type->left, p)), type->right, p + 1);
    }
    return {};
}

std::vector<double> ll_pointwise_distance(const LLValueP& a, const LLValueP& b, const TypeP& type, std::size_t p) {
    switch (type->kind) {
    case SimpleType::Kind::Real:
        return {std::abs(as_real(a) - as_real(b))};
    case SimpleType::Kind::Prod: {
        auto l = ll_pointwise_distance(a->first, b->first, type->left, p);
        auto r = ll_pointwise_distance(a->second, b->second, type->right, p);
        l.insert(l.end(), r.begin(), r.end());
        return l;
    }
    case SimpleType::Kind::Arrow: {
        auto x = ll_probe_value(type->left, p);
        return ll_pointwise_distance(ll_call(a, x), ll_call(b, x), type->right, p + 1);
    }
    }
    return {};
}

} // namespace qlr
