#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qlr/error.hpp"
#include "qlr/lambda.hpp"
#include "qlr/report.hpp"

namespace qlr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Range {
    double lo, hi;
};

Range sin_range(double lo, double hi) {
    constexpr double two_pi = 2 * std::numbers::pi;
    if (!(hi - lo < two_pi)) return {-1, 1};
    double a = std::sin(lo), b = std::sin(hi);
    Range r{std::min(a, b), std::max(a, b)};
    auto hits = [&](double phase) {
        double k = std::ceil((lo - phase) / two_pi);
        return phase + k * two_pi <= hi;
    };
    if (hits(std::numbers::pi / 2)) r.hi = 1;
    if (hits(-std::numbers::pi / 2)) r.lo = -1;
    return r;
}

using RangeFn = std::function<Range(std::span<const Range>)>;

// Exact image of the box [x - alpha, x + alpha] compared with f(x).
auto modulus_from(RangeFn range, std::function<double(std::span<const double>)> eval) {
    return [range = std::move(range), eval = std::move(eval)](std::span<const double> x,
                                                              std::span<const double> alpha) {
        std::vector<Range> box(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (std::isinf(alpha[i])) return kInf;
            box[i] = {x[i] - alpha[i], x[i] + alpha[i]};
        }
        Range r = range(box);
        double v = eval(x);
        return std::max({r.hi - v, v - r.lo, 0.0});
    };
}

PrimP make(std::string name, std::size_t arity, std::vector<double> params,
           std::function<double(std::span<const double>)> eval, RangeFn range,
           std::function<LipInfo(std::span<const double>)> lip) {
    auto p = std::make_shared<PrimitiveSpec>();
    p->name = std::move(name);
    p->arity = arity;
    p->params = std::move(params);
    p->modulus = modulus_from(std::move(range), eval);
    p->eval = std::move(eval);
    p->lip = std::move(lip);
    return p;
}

LipInfo global(double c) { return {c, kInf}; }

} // namespace

std::string PrimitiveSpec::display() const {
    if (params.empty()) return name;
    std::string s = name + "[";
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (i) s += ",";
        s += fmt_real(params[i]);
    }
    return s + "]";
}

const std::vector<std::string>& primitive_names() {
    static const std::vector<std::string> names{"affine", "add", "mul", "sin", "cos", "abs", "min", "max"};
    return names;
}

bool is_primitive_name(const std::string& name) {
    const auto& n = primitive_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

PrimP lookup_primitive(const std::string& name, const std::vector<double>& params) {
    auto need = [&](std::size_t k) {
        if (params.size() != k)
            throw StructuralError("primitive " + name + " takes " + std::to_string(k) + " parameters, got " +
                                  std::to_string(params.size()));
    };
    if (name == "affine") {
        need(2);
        double a = params[0], b = params[1];
        return make(
            name, 1, params, [a, b](auto x) { return a * x[0] + b; },
            [a, b](auto r) {
                double u = a * r[0].lo + b, v = a * r[0].hi + b;
                return Range{std::min(u, v), std::max(u, v)};
            },
            [a](auto) { return global(std::abs(a)); });
    }
    need(0);
    if (name == "add")
        return make(
            name, 2, {}, [](auto x) { return x[0] + x[1]; },
            [](auto r) { return Range{r[0].lo + r[1].lo, r[0].hi + r[1].hi}; },
            [](auto) { return global(std::sqrt(2.0)); });
    if (name == "mul")
        return make(
            name, 2, {}, [](auto x) { return x[0] * x[1]; },
            [](auto r) {
                double c[] = {r[0].lo * r[1].lo, r[0].lo * r[1].hi, r[0].hi * r[1].lo, r[0].hi * r[1].hi};
                return Range{*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
            },
            // the gradient (y, x) has norm at most |x| + r on the ball of radius r
            [](auto x) { return LipInfo{std::hypot(x[0], x[1]) + 1.0, 1.0}; });
    if (name == "sin")
        return make(
            name, 1, {}, [](auto x) { return std::sin(x[0]); }, [](auto r) { return sin_range(r[0].lo, r[0].hi); },
            [](auto) { return global(1); });
    if (name == "cos")
        return make(
            name, 1, {}, [](auto x) { return std::cos(x[0]); },
            [](auto r) {
                constexpr double h = std::numbers::pi / 2;
                return sin_range(r[0].lo + h, r[0].hi + h);
            },
            [](auto) { return global(1); });
    if (name == "abs")
        return make(
            name, 1, {}, [](auto x) { return std::abs(x[0]); },
            [](auto r) {
                double a = std::abs(r[0].lo), b = std::abs(r[0].hi);
                if (r[0].lo <= 0 && r[0].hi >= 0) return Range{0, std::max(a, b)};
                return Range{std::min(a, b), std::max(a, b)};
            },
            [](auto) { return global(1); });
    if (name == "min")
        return make(
            name, 2, {}, [](auto x) { return std::min(x[0], x[1]); },
            [](auto r) { return Range{std::min(r[0].lo, r[1].lo), std::min(r[0].hi, r[1].hi)}; },
            [](auto) { return global(1); });
    if (name == "max")
        return make(
            name, 2, {}, [](auto x) { return std::max(x[0], x[1]); },
            [](auto r) { return Range{std::max(r[0].lo, r[1].lo), std::max(r[0].hi, r[1].hi)}; },
            [](auto) { return global(1); });
    throw StructuralError("unknown primitive " + name);
}

} // namespace qlr
