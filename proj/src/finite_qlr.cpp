#include "qlr/finite_qlr.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>

#include "qlr/error.hpp"

namespace qlr {

namespace {

std::string join_names(const std::vector<std::string>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? "," : "") + xs[i];
    return s + "]";
}

std::string fn_string(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f) {
    std::vector<std::string> parts;
    for (std::size_t x = 0; x < f.size(); ++x) parts.push_back(X.carrier()[x] + "->" + Y.carrier()[f[x]]);
    return join_names(parts);
}

void require_flat(const FiniteQlr& X, const char* what) {
    if (X.width() != 1) throw UnsupportedOperation(std::string(what) + " needs a space with scalar distances");
}

void require_fn(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f) {
    if (f.size() != X.size()) throw StructuralError("function table has the wrong length");
    for (auto v : f)
        if (v >= Y.size()) throw StructuralError("function table points outside the codomain");
}

bool row_leq(const FiniteQuantale& q, std::span<const Ix> a, std::span<const Ix> b) {
    for (std::size_t k = 0; k < a.size(); ++k)
        if (!q.leq(a[k], b[k])) return false;
    return true;
}

void row_join_into(const FiniteQuantale& q, std::span<Ix> acc, std::span<const Ix> b) {
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = q.join(acc[k], b[k]);
}

bool is_reflexive(const FiniteQlr& X, std::string* witness) {
    for (std::size_t x = 0; x < X.size(); ++x)
        for (Ix v : X.at(x, x))
            if (!X.base().leq(v, X.base().zero())) {
                if (witness) *witness = "a(" + X.carrier()[x] + "," + X.carrier()[x] + ") = " + row_string(X.base(), X.at(x, x));
                return false;
            }
    return true;
}

void require_reflexive(const FiniteQlr& X, const char* role) {
    std::string w;
    if (!is_reflexive(X, &w)) throw ContractError(std::string(role) + " is not reflexive: " + w);
}

FnTable decode_function(std::size_t index, std::size_t n, std::size_t m) {
    FnTable f(n);
    for (std::size_t i = n; i-- > 0;) {
        f[i] = index % m;
        index /= m;
    }
    return f;
}

std::size_t ipow(std::size_t b, std::size_t e, std::size_t limit) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) {
        if (r > limit / std::max<std::size_t>(b, 1)) return limit + 1;
        r *= b;
    }
    return r;
}

std::vector<std::string> exp_probes(const FiniteQlr& X, const FiniteQlr& Y) {
    std::vector<std::string> out;
    for (std::size_t x = 0; x < X.size(); ++x)
        for (Ix a = 0; a < X.qsize(); ++a) {
            std::string p = X.carrier()[x] + "@" + to_string(X.base().desc(), X.base().elem(a));
            if (Y.width() == 1) {
                out.push_back(p);
            } else {
                for (const auto& s : Y.probes()) out.push_back(p + "/" + s);
            }
        }
    return out;
}

void check_caps(const FiniteQlr& X, const FiniteQlr& Y, const Caps& caps) {
    require_flat(X, "the exponent");
    if (X.size() > caps.max_carrier || Y.size() > caps.max_carrier)
        throw UnsupportedOperation("carrier exceeds the exhaustive cap of " + std::to_string(caps.max_carrier));
    if (X.qsize() > caps.max_quantale || Y.qsize() > caps.max_quantale)
        throw UnsupportedOperation("quantale exceeds the exhaustive cap of " + std::to_string(caps.max_quantale));
    if (ipow(Y.size(), X.size(), 1u << 16) > (1u << 16)) throw UnsupportedOperation("function space too large");
}

std::vector<std::string> function_labels(const FiniteQlr& X, const FiniteQlr& Y) {
    std::vector<std::string> out;
    for (const auto& f : all_functions(X.size(), Y.size())) {
        std::string s;
        for (auto v : f) s += (s.empty() ? "" : ".") + Y.carrier()[v];
        out.push_back(s.empty() ? "*" : s);
    }
    return out;
}

FiniteQlr build_exp(const FiniteQlr& X, const FiniteQlr& Y, bool reflexive_variant) {
    auto fns = all_functions(X.size(), Y.size());
    std::size_t w = X.size() * X.qsize() * Y.width();
    std::vector<Ix> dist;
    dist.reserve(fns.size() * fns.size() * w);
    for (const auto& f : fns)
        for (const auto& g : fns) {
            auto row = reflexive_variant ? expr_distance(X, Y, f, g) : exp_distance(X, Y, f, g);
            dist.insert(dist.end(), row.begin(), row.end());
        }
    return FiniteQlr(function_labels(X, Y), Y.base_ptr(), std::move(dist), w, exp_probes(X, Y));
}

} // namespace

FiniteQlr::FiniteQlr(std::vector<std::string> carrier, std::shared_ptr<const FiniteQuantale> base,
                     std::vector<Ix> dist, std::size_t width, std::vector<std::string> probes)
    : carrier_(std::move(carrier)), base_(std::move(base)), width_(width), probes_(std::move(probes)),
      dist_(std::move(dist)) {
    if (!base_) throw StructuralError("space without a quantale");
    if (width_ == 0) throw StructuralError("zero-width distances");
    if (dist_.size() != carrier_.size() * carrier_.size() * width_)
        throw StructuralError("distance table is not total on the carrier");
    for (Ix v : dist_)
        if (v >= base_->size()) throw StructuralError("distance entry outside the quantale");
    if (width_ > 1 && probes_.size() != width_) {
        probes_.clear();
        for (std::size_t k = 0; k < width_; ++k) probes_.push_back(std::to_string(k));
    }
}

QuantaleDesc FiniteQlr::desc() const {
    if (width_ == 1) return base_->desc();
    return QuantaleDesc::pointwise(width_, base_->desc(), probes_);
}

QuantaleElem FiniteQlr::elem(std::size_t x, std::size_t y) const {
    if (width_ == 1) return base_->elem((*this)(x, y));
    std::vector<QuantaleElem> es;
    for (Ix v : at(x, y)) es.push_back(base_->elem(v));
    return QuantaleElem::table(std::move(es));
}

std::string row_string(const FiniteQuantale& q, std::span<const Ix> row) {
    if (row.size() == 1) return to_string(q.desc(), q.elem(row[0]));
    std::string s = "<";
    for (std::size_t k = 0; k < row.size(); ++k) s += (k ? "," : "") + to_string(q.desc(), q.elem(row[k]));
    return s + ">";
}

std::shared_ptr<const FiniteQuantale> tabulate(const QuantaleDesc& q) {
    static std::mutex mu;
    static std::map<std::string, std::shared_ptr<const FiniteQuantale>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = q.to_string();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto fq = std::make_shared<const FiniteQuantale>(q);
    cache.emplace(key, fq);
    return fq;
}

FiniteQlr make_space(const QuantaleDesc& q, std::vector<std::string> carrier, const std::vector<QuantaleElem>& dist) {
    auto fq = tabulate(q);
    std::vector<Ix> ix;
    ix.reserve(dist.size());
    for (const auto& e : dist) {
        require_member(q, e);
        ix.push_back(fq->index_of(e));
    }
    return FiniteQlr(std::move(carrier), fq, std::move(ix));
}

FiniteQlr discrete_space(std::size_t n, const QuantaleDesc& q) {
    auto fq = tabulate(q);
    std::vector<std::string> names;
    std::vector<Ix> d(n * n, fq->top());
    for (std::size_t i = 0; i < n; ++i) {
        names.push_back(std::to_string(i));
        d[i * n + i] = fq->zero();
    }
    return FiniteQlr(std::move(names), fq, std::move(d));
}

FiniteQlr unit_space() {
    auto fq = tabulate(QuantaleDesc::discrete_two());
    return FiniteQlr({"*"}, fq, {fq->zero()});
}

std::vector<FnTable> all_functions(std::size_t n, std::size_t m) {
    std::size_t count = ipow(m, n, 1u << 20);
    if (count > (1u << 20)) throw UnsupportedOperation("too many functions to enumerate");
    std::vector<FnTable> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(decode_function(i, n, m));
    return out;
}

std::size_t function_index(const FnTable& f, std::size_t m) {
    std::size_t r = 0;
    for (auto v : f) r = r * m + v;
    return r;
}

std::vector<Ix> derivative(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f) {
    require_flat(X, "a derivative");
    require_fn(X, Y, f);
    const auto& qx = X.base();
    const auto& qy = Y.base();
    std::size_t nq = X.qsize(), w = Y.width();
    std::vector<Ix> out(X.size() * nq * w, qy.bottom());
    for (std::size_t x = 0; x < X.size(); ++x)
        for (std::size_t y = 0; y < X.size(); ++y) {
            Ix axy = X(x, y);
            auto b = Y.at(f[x], f[y]);
            for (Ix a = 0; a < nq; ++a)
                if (qx.leq(axy, a)) row_join_into(qy, std::span<Ix>(out.data() + (x * nq + a) * w, w), b);
        }
    return out;
}

std::optional<std::string> map_violation(const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m) {
    require_flat(X, "a map check");
    require_fn(X, Y, m.fn);
    std::size_t nq = X.qsize(), w = Y.width();
    if (m.deriv.size() != X.size() * nq * w) throw StructuralError("derivative table has the wrong size");
    for (std::size_t x = 0; x < X.size(); ++x)
        for (std::size_t y = 0; y < X.size(); ++y)
            for (Ix a = 0; a < nq; ++a) {
                if (!X.base().leq(X(x, y), a)) continue;
                std::span<const Ix> phi(m.deriv.data() + (x * nq + a) * w, w);
                auto b = Y.at(m.fn[x], m.fn[y]);
                if (!row_leq(Y.base(), b, phi))
                    return "x=" + X.carrier()[x] + " y=" + X.carrier()[y] +
                           " alpha=" + to_string(X.base().desc(), X.base().elem(a)) + ": b(f x, f y) = " +
                           row_string(Y.base(), b) + " exceeds " + row_string(Y.base(), phi);
            }
    return std::nullopt;
}

std::vector<Ix> exp_distance(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f, const FnTable& g) {
    require_flat(X, "an exponential");
    require_fn(X, Y, f);
    require_fn(X, Y, g);
    const auto& qy = Y.base();
    std::size_t nq = X.qsize(), w = Y.width();
    std::vector<Ix> out(X.size() * nq * w, qy.bottom());
    for (std::size_t x = 0; x < X.size(); ++x)
        for (std::size_t y = 0; y < X.size(); ++y) {
            Ix axy = X(x, y);
            for (Ix a = 0; a < nq; ++a) {
                if (!X.base().leq(axy, a)) continue;
                std::span<Ix> acc(out.data() + (x * nq + a) * w, w);
                row_join_into(qy, acc, Y.at(f[x], g[y]));
                row_join_into(qy, acc, Y.at(f[x], f[y]));
            }
        }
    return out;
}

std::vector<Ix> expr_distance(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f, const FnTable& g) {
    if (!Y.base().has_heyting()) throw UnsupportedOperation("Q^r exponential over non-Heyting " + Y.base().desc().to_string());
    auto d = exp_distance(X, Y, f, g);
    auto df = derivative(X, Y, f);
    for (std::size_t k = 0; k < d.size(); ++k) d[k] = Y.base().heyting(d[k], df[k]);
    return d;
}

FiniteQlr expQ(const FiniteQlr& X, const FiniteQlr& Y, const Caps& caps) {
    check_caps(X, Y, caps);
    return build_exp(X, Y, false);
}

FiniteQlr expQr(const FiniteQlr& X, const FiniteQlr& Y, const Caps& caps) {
    check_caps(X, Y, caps);
    if (!Y.base().has_heyting()) throw UnsupportedOperation("Q^r exponential over non-Heyting " + Y.base().desc().to_string());
    require_reflexive(X, "exponent");
    require_reflexive(Y, "codomain");
    return build_exp(X, Y, true);
}

FiniteQlr productQlr(const FiniteQlr& X, const FiniteQlr& Y) {
    require_flat(X, "a product");
    require_flat(Y, "a product");
    auto fq = tabulate(QuantaleDesc::product({X.base().desc(), Y.base().desc()}));
    std::size_t nx = X.size(), ny = Y.size(), qy = Y.qsize();
    std::vector<std::string> names;
    for (const auto& a : X.carrier())
        for (const auto& b : Y.carrier()) names.push_back("(" + a + "," + b + ")");
    std::vector<Ix> d(nx * ny * nx * ny);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t y = 0; y < ny; ++y)
            for (std::size_t x2 = 0; x2 < nx; ++x2)
                for (std::size_t y2 = 0; y2 < ny; ++y2)
                    d[(x * ny + y) * nx * ny + x2 * ny + y2] = static_cast<Ix>(X(x, x2) * qy + Y(y, y2));
    return FiniteQlr(std::move(names), fq, std::move(d));
}

namespace {

void require_valid(const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m) {
    if (auto v = map_violation(X, Y, m)) throw ContractError("not a QLR map: " + *v);
}

Caps roomy() { return {64, FiniteQuantale::kMaxSize}; }

} // namespace

FiniteQlrMap curryQ(const FiniteQlr& Z, const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m) {
    require_valid(productQlr(Z, X), Y, m);
    std::size_t nz = Z.size(), nx = X.size(), qz = Z.qsize(), qx = X.qsize(), w = Y.width();
    std::size_t W = nx * qx * w;
    FiniteQlrMap out;
    out.fn.resize(nz);
    out.deriv.resize(nz * qz * W);
    for (std::size_t z = 0; z < nz; ++z) {
        FnTable fz(m.fn.begin() + z * nx, m.fn.begin() + (z + 1) * nx);
        out.fn[z] = function_index(fz, Y.size());
        for (std::size_t c = 0; c < qz; ++c)
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t a = 0; a < qx; ++a)
                    for (std::size_t k = 0; k < w; ++k)
                        out.deriv[(z * qz + c) * W + (x * qx + a) * w + k] =
                            m.deriv[((z * nx + x) * qz * qx + c * qx + a) * w + k];
    }
    return out;
}

FiniteQlrMap uncurryQ(const FiniteQlr& Z, const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m) {
    require_valid(Z, expQ(X, Y, roomy()), m);
    std::size_t nz = Z.size(), nx = X.size(), qz = Z.qsize(), qx = X.qsize(), w = Y.width();
    std::size_t W = nx * qx * w;
    FiniteQlrMap out;
    out.fn.resize(nz * nx);
    out.deriv.resize(nz * nx * qz * qx * w);
    for (std::size_t z = 0; z < nz; ++z) {
        FnTable g = decode_function(m.fn[z], nx, Y.size());
        for (std::size_t x = 0; x < nx; ++x) {
            out.fn[z * nx + x] = g[x];
            for (std::size_t c = 0; c < qz; ++c)
                for (std::size_t a = 0; a < qx; ++a)
                    for (std::size_t k = 0; k < w; ++k)
                        out.deriv[((z * nx + x) * qz * qx + c * qx + a) * w + k] =
                            m.deriv[(z * qz + c) * W + (x * qx + a) * w + k];
        }
    }
    return out;
}

FiniteQlrMap curryQr(const FiniteQlr& Z, const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m) {
    require_reflexive(Z, "parameter space");
    require_reflexive(X, "exponent");
    require_reflexive(Y, "codomain");
    FiniteQlrMap out = curryQ(Z, X, Y, m);
    std::size_t nx = X.size(), W = nx * X.qsize() * Y.width();
    for (std::size_t z = 0; z < Z.size(); ++z) {
        FnTable fz(m.fn.begin() + z * nx, m.fn.begin() + (z + 1) * nx);
        auto d = derivative(X, Y, fz);
        for (std::size_t c = 0; c < Z.qsize(); ++c)
            for (std::size_t p = 0; p < W; ++p) {
                Ix& v = out.deriv[(z * Z.qsize() + c) * W + p];
                v = Y.base().heyting(v, d[p]);
            }
    }
    return out;
}

FiniteQlrMap uncurryQr(const FiniteQlr& Z, const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m) {
    require_reflexive(Z, "parameter space");
    require_valid(Z, expQr(X, Y, roomy()), m);
    std::size_t nx = X.size(), qx = X.qsize(), qz = Z.qsize(), w = Y.width();
    FiniteQlrMap out;
    out.fn.resize(Z.size() * nx);
    out.deriv.resize(Z.size() * nx * qz * qx * w);
    for (std::size_t z = 0; z < Z.size(); ++z) {
        FnTable g = decode_function(m.fn[z], nx, Y.size());
        auto d = derivative(X, Y, g);
        for (std::size_t x = 0; x < nx; ++x) {
            out.fn[z * nx + x] = g[x];
            for (std::size_t c = 0; c < qz; ++c)
                for (std::size_t a = 0; a < qx; ++a)
                    for (std::size_t k = 0; k < w; ++k) {
                        std::size_t p = (x * qx + a) * w + k;
                        out.deriv[((z * nx + x) * qz * qx + c * qx + a) * w + k] =
                            Y.base().join(m.deriv[(z * qz + c) * nx * qx * w + p], d[p]);
                    }
        }
    }
    return out;
}

std::vector<Ix> distanceViaHfg(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f, const FnTable& g) {
    require_fn(X, Y, f);
    require_fn(X, Y, g);
    FiniteQlr two = discrete_space(2);
    FiniteQlr P = productQlr(two, X);
    std::size_t nx = X.size(), qx = X.qsize(), w = Y.width();
    FnTable h(2 * nx);
    for (std::size_t x = 0; x < nx; ++x) {
        h[x] = f[x];
        h[nx + x] = g[x];
    }
    auto D = derivative(P, Y, h);
    Ix inf = two.base().top();
    std::vector<Ix> out;
    out.reserve(nx * qx * w);
    for (std::size_t x = 0; x < nx; ++x)
        for (std::size_t a = 0; a < qx; ++a) {
            std::size_t probe = x * P.qsize() + inf * qx + a; // point <0,x>, element <inf,alpha>
            out.insert(out.end(), D.begin() + probe * w, D.begin() + (probe + 1) * w);
        }
    return out;
}

const std::vector<std::string>& axiom_names() {
    static const std::vector<std::string> names{"reflexive",     "symmetric",   "separated",
                                                "transitive",    "relaxed",     "hyperRelaxed",
                                                "partialMetric", "ultraMetric", "partialUltraMetric"};
    return names;
}

namespace {

struct RowOps {
    const FiniteQuantale& q;
    std::size_t w;

    bool leq(std::span<const Ix> a, std::span<const Ix> b) const { return row_leq(q, a, b); }
    bool eq(std::span<const Ix> a, std::span<const Ix> b) const { return std::equal(a.begin(), a.end(), b.begin()); }
    bool is_zero(std::span<const Ix> a) const {
        return std::all_of(a.begin(), a.end(), [&](Ix v) { return q.leq(v, q.zero()); });
    }
    // delta in D(alpha, beta)
    bool diagonal(std::span<const Ix> d, std::span<const Ix> a, std::span<const Ix> b) const {
        for (std::size_t k = 0; k < w; ++k) {
            if (q.plus(a[k], q.residual(d[k], a[k])) != d[k]) return false;
            if (q.plus(q.residual(d[k], b[k]), b[k]) != d[k]) return false;
        }
        return true;
    }
};

} // namespace

LawReport checkAxioms(const FiniteQlr& X, const std::vector<std::string>& axioms) {
    for (const auto& a : axioms)
        if (std::find(axiom_names().begin(), axiom_names().end(), a) == axiom_names().end())
            throw StructuralError("unknown axiom: " + a);
    auto wants = [&](const char* a) { return std::find(axioms.begin(), axioms.end(), a) != axioms.end(); };
    bool partial = wants("partialMetric") || wants("partialUltraMetric");
    if (partial && !X.base().desc().is_integral())
        throw UnsupportedOperation("partial metric axioms need an integral quantale, got " + X.base().desc().to_string());

    const FiniteQuantale& q = X.base();
    std::size_t w = X.width();
    RowOps ops{q, w};
    std::vector<Ix> bound(w);
    const auto& C = X.carrier();
    auto s = [&](std::span<const Ix> r) { return row_string(X.base(), r); };
    std::size_t n = X.size();
    LawReport rep;
    rep.subject = "axioms";

    for (const auto& name : axioms) {
        LawResult& res = rep.add(name);
        LawTally t(res);
        if (name == "reflexive") {
            for (std::size_t x = 0; x < n; ++x)
                t.check(ops.is_zero(X.at(x, x)), [&] { return "x=" + C[x] + ": a(x,x) = " + s(X.at(x, x)); });
        } else if (name == "symmetric") {
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y)
                    t.check(ops.eq(X.at(x, y), X.at(y, x)), [&] {
                        return "x=" + C[x] + " y=" + C[y] + ": a(x,y) = " + s(X.at(x, y)) + ", a(y,x) = " +
                               s(X.at(y, x));
                    });
        } else if (name == "separated") {
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y) {
                    if (x == y) continue;
                    bool collapse = partial ? ops.eq(X.at(x, y), X.at(x, x)) && ops.eq(X.at(x, y), X.at(y, y))
                                            : ops.is_zero(X.at(x, y)) && ops.is_zero(X.at(y, x));
                    t.check(!collapse, [&] { return "x=" + C[x] + " y=" + C[y] + ": distances do not separate"; });
                }
        } else if (name == "transitive" || name == "relaxed" || name == "ultraMetric" ||
                   name == "partialUltraMetric" || name == "partialMetric") {
            bool ultra = name == "ultraMetric" || name == "partialUltraMetric";
            bool pm = name == "partialMetric";
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y)
                    for (std::size_t z = 0; z < n; ++z) {
                        auto xy = X.at(x, y), yz = X.at(y, z), yy = X.at(y, y);
                        for (std::size_t k = 0; k < w; ++k)
                            bound[k] = ultra ? q.join(xy[k], yz[k])
                                       : pm  ? q.plus(xy[k], q.residual(yz[k], yy[k]))
                                             : q.plus(xy[k], yz[k]);
                        t.check(ops.leq(X.at(x, z), bound), [&] {
                            return "x=" + C[x] + " y=" + C[y] + " z=" + C[z] + ": a(x,z) = " + s(X.at(x, z)) +
                                   " exceeds " + s(bound);
                        });
                    }
            if (pm || name == "partialUltraMetric") {
                for (std::size_t x = 0; x < n; ++x)
                    for (std::size_t y = 0; y < n; ++y)
                        t.check(ops.diagonal(X.at(x, y), X.at(y, y), X.at(x, x)), [&] {
                            return "x=" + C[x] + " y=" + C[y] + ": a(x,y) = " + s(X.at(x, y)) + " is not in D(" +
                                   s(X.at(y, y)) + "," + s(X.at(x, x)) + ")";
                        });
            }
        } else if (name == "hyperRelaxed") {
            for (std::size_t x = 0; x < n; ++x)
                for (std::size_t y = 0; y < n; ++y)
                    for (std::size_t z = 0; z < n; ++z) {
                        auto xz = X.at(x, z), zz = X.at(z, z), zy = X.at(z, y);
                        for (std::size_t k = 0; k < w; ++k) bound[k] = q.plus(q.plus(xz[k], zz[k]), zy[k]);
                        t.check(ops.leq(X.at(x, y), bound), [&] {
                            return "x=" + C[x] + " y=" + C[y] + " z=" + C[z] + ": a(x,y) = " + s(X.at(x, y)) +
                                   " exceeds " + s(bound);
                        });
                    }
        }
    }
    return rep;
}

FiniteQlr inducedMetric(const FiniteQlr& X) {
    LawReport pre = checkAxioms(X, {"symmetric", "separated", "partialMetric"});
    for (const auto& r : pre.results)
        if (!r.passed) throw ContractError("not a separated symmetric partial metric (" + r.law + "): " + r.witness);
    const auto& q = X.base();
    std::size_t n = X.size(), w = X.width();
    std::vector<Ix> d(n * n * w);
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = 0; y < n; ++y)
            for (std::size_t k = 0; k < w; ++k) {
                Ix axy = X.at(x, y)[k];
                d[(x * n + y) * w + k] = q.plus(q.residual(axy, X.at(x, x)[k]), q.residual(axy, X.at(y, y)[k]));
            }
    return FiniteQlr(X.carrier(), X.base_ptr(), std::move(d), w, X.probes());
}

SymmetryResult checkSymmetricExp(const FiniteQlr& X, const FiniteQlr& Y) {
    for (const FiniteQlr* S : {&X, &Y}) {
        auto r = checkAxioms(*S, {"symmetric"});
        if (!r.all_passed()) throw ContractError("input space is not symmetric: " + r.results[0].witness);
    }
    auto fns = all_functions(X.size(), Y.size());
    auto probes = exp_probes(X, Y);
    SymmetryResult out;
    for (const auto& f : fns)
        for (const auto& g : fns) {
            auto a = exp_distance(X, Y, f, g), b = exp_distance(X, Y, g, f);
            for (std::size_t p = 0; p < a.size(); ++p)
                if (a[p] != b[p]) {
                    out.symmetric = false;
                    out.witness = "f=" + fn_string(X, Y, f) + " g=" + fn_string(X, Y, g) + " at " + probes[p] +
                                  ": d(f,g) = " + to_string(Y.base().desc(), Y.base().elem(a[p])) +
                                  ", d(g,f) = " + to_string(Y.base().desc(), Y.base().elem(b[p]));
                    return out;
                }
        }
    return out;
}

namespace {

// Calls visit on every function n -> m, or on `limit` random ones when there are more.
void for_maps(std::size_t n, std::size_t m, const DerivativeLawOptions& opts, std::mt19937_64& rng,
              LawResult& res, const std::function<void(const FnTable&)>& visit) {
    std::size_t count = ipow(m, n, opts.max_maps);
    if (count <= opts.max_maps) {
        for (std::size_t i = 0; i < count; ++i) visit(decode_function(i, n, m));
        return;
    }
    std::uniform_int_distribution<std::size_t> pick(0, m - 1);
    FnTable f(n);
    for (std::size_t i = 0; i < opts.max_maps; ++i) {
        for (auto& v : f) v = pick(rng);
        visit(f);
    }
    res.note = "sampled " + std::to_string(opts.max_maps) + " maps";
}

} // namespace

LawReport checkDerivativeLaws(const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlr& Z,
                              const DerivativeLawOptions& opts) {
    for (const FiniteQlr* S : {&X, &Y, &Z}) require_flat(*S, "derivative laws");
    std::mt19937_64 rng(opts.seed);
    LawReport rep;
    rep.subject = "derivative laws";
    auto el = [](const FiniteQlr& S, Ix a) { return to_string(S.base().desc(), S.base().elem(a)); };

    {
        LawResult& r = rep.add("D1");
        LawTally t(r);
        for (const FiniteQlr* S : {&X, &Y, &Z}) {
            FnTable id(S->size());
            for (std::size_t i = 0; i < id.size(); ++i) id[i] = i;
            auto D = derivative(*S, *S, id);
            for (std::size_t x = 0; x < S->size(); ++x)
                for (Ix a = 0; a < S->qsize(); ++a)
                    t.check(D[x * S->qsize() + a] == a, [&] {
                        return "x=" + S->carrier()[x] + " alpha=" + el(*S, a) +
                               ": D(id)(x,alpha) = " + el(*S, D[x * S->qsize() + a]);
                    });
        }
    }
    {
        LawResult& r = rep.add("D2");
        LawTally t(r);
        FiniteQlr P = productQlr(X, Y);
        FnTable p1(P.size()), p2(P.size());
        for (std::size_t i = 0; i < P.size(); ++i) {
            p1[i] = i / Y.size();
            p2[i] = i % Y.size();
        }
        auto D1 = derivative(P, X, p1), D2 = derivative(P, Y, p2);
        for (std::size_t i = 0; i < P.size(); ++i)
            for (std::size_t a = 0; a < X.qsize(); ++a)
                for (std::size_t b = 0; b < Y.qsize(); ++b) {
                    std::size_t c = a * Y.qsize() + b;
                    auto at = [&] { return "point " + P.carrier()[i] + " alpha=" + el(P, static_cast<Ix>(c)); };
                    t.check(D1[i * P.qsize() + c] == a,
                            [&] { return at() + ": D(pi1) = " + el(X, D1[i * P.qsize() + c]); });
                    t.check(D2[i * P.qsize() + c] == b,
                            [&] { return at() + ": D(pi2) = " + el(Y, D2[i * P.qsize() + c]); });
                }
    }
    {
        LawResult& r = rep.add("D3");
        LawTally t(r);
        FiniteQlr P = productQlr(Y, Z);
        auto gs = all_functions(X.size(), Z.size());
        for_maps(X.size(), Y.size(), {opts.max_maps / std::max<std::size_t>(gs.size(), 1) + 1, opts.seed}, rng, r,
                 [&](const FnTable& f) {
                     auto Df = derivative(X, Y, f);
                     for (const auto& g : gs) {
                         auto Dg = derivative(X, Z, g);
                         FnTable fg(X.size());
                         for (std::size_t x = 0; x < X.size(); ++x) fg[x] = f[x] * Z.size() + g[x];
                         auto Dfg = derivative(X, P, fg);
                         for (std::size_t p = 0; p < Dfg.size(); ++p)
                             t.check(Dfg[p] == Df[p] * Z.qsize() + Dg[p], [&] {
                                 return "f=" + fn_string(X, Y, f) + " g=" + fn_string(X, Z, g) + " at probe " +
                                        std::to_string(p) + ": D<f,g> = " + el(P, Dfg[p]);
                             });
                     }
                 });
    }
    {
        LawResult& r = rep.add("D4");
        LawTally t(r);
        bool strict = false;
        std::string strict_witness;
        auto gs = all_functions(Y.size(), Z.size());
        for_maps(X.size(), Y.size(), {opts.max_maps / std::max<std::size_t>(gs.size(), 1) + 1, opts.seed}, rng, r,
                 [&](const FnTable& f) {
                     auto Df = derivative(X, Y, f);
                     for (const auto& g : gs) {
                         auto Dg = derivative(Y, Z, g);
                         FnTable gf(X.size());
                         for (std::size_t x = 0; x < X.size(); ++x) gf[x] = g[f[x]];
                         auto Dgf = derivative(X, Z, gf);
                         for (std::size_t x = 0; x < X.size(); ++x)
                             for (Ix a = 0; a < X.qsize(); ++a) {
                                 Ix lhs = Dgf[x * X.qsize() + a];
                                 Ix rhs = Dg[f[x] * Y.qsize() + Df[x * X.qsize() + a]];
                                 auto w = [&] {
                                     return "f=" + fn_string(X, Y, f) + " g=" + fn_string(Y, Z, g) + " x=" +
                                            X.carrier()[x] + " alpha=" + el(X, a) + ": " + el(Z, lhs) + " vs " +
                                            el(Z, rhs);
                                 };
                                 t.check(Z.base().leq(lhs, rhs), w);
                                 if (!strict && lhs != rhs && Z.base().leq(lhs, rhs)) {
                                     strict = true;
                                     strict_witness = w();
                                 }
                             }
                     }
                 });
        if (strict) r.note += (r.note.empty() ? "" : "; ") + std::string("strict at ") + strict_witness;
    }
    FiniteQlr E = expQ(Y, Z, roomy());
    FiniteQlr XY = productQlr(X, Y);
    std::size_t W = Y.size() * Y.qsize();
    {
        LawResult& r = rep.add("D5");
        LawTally t(r);
        for_maps(X.size() * Y.size(), Z.size(), opts, rng, r, [&](const FnTable& f) {
            FnTable lf(X.size());
            for (std::size_t x = 0; x < X.size(); ++x)
                lf[x] = function_index(FnTable(f.begin() + x * Y.size(), f.begin() + (x + 1) * Y.size()), Z.size());
            auto Dlf = derivative(X, E, lf);
            auto Df = derivative(XY, Z, f);
            for (std::size_t x = 0; x < X.size(); ++x)
                for (std::size_t c = 0; c < X.qsize(); ++c)
                    for (std::size_t y = 0; y < Y.size(); ++y)
                        for (std::size_t a = 0; a < Y.qsize(); ++a) {
                            Ix lhs = Dlf[(x * X.qsize() + c) * W + y * Y.qsize() + a];
                            Ix rhs = Df[(x * Y.size() + y) * XY.qsize() + c * Y.qsize() + a];
                            t.check(Z.base().leq(lhs, rhs), [&] {
                                return "f=" + fn_string(XY, Z, f) + " x=" + X.carrier()[x] +
                                       " gamma=" + el(X, static_cast<Ix>(c)) + " probe " +
                                       E.probes()[y * Y.qsize() + a] + ": " + el(Z, lhs) + " vs " + el(Z, rhs);
                            });
                        }
        });
    }
    {
        LawResult& r = rep.add("D6");
        LawTally t(r);
        for_maps(X.size(), E.size(), opts, rng, r, [&](const FnTable& g) {
            FnTable ev(X.size() * Y.size());
            for (std::size_t x = 0; x < X.size(); ++x) {
                FnTable gx = decode_function(g[x], Y.size(), Z.size());
                for (std::size_t y = 0; y < Y.size(); ++y) ev[x * Y.size() + y] = gx[y];
            }
            auto Dev = derivative(XY, Z, ev);
            auto Dg = derivative(X, E, g);
            for (std::size_t x = 0; x < X.size(); ++x)
                for (std::size_t y = 0; y < Y.size(); ++y)
                    for (std::size_t c = 0; c < X.qsize(); ++c)
                        for (std::size_t a = 0; a < Y.qsize(); ++a) {
                            Ix lhs = Dev[(x * Y.size() + y) * XY.qsize() + c * Y.qsize() + a];
                            Ix rhs = Dg[(x * X.qsize() + c) * W + y * Y.qsize() + a];
                            t.check(Z.base().leq(lhs, rhs), [&] {
                                return "g=" + fn_string(X, E, g) + " point " + XY.carrier()[x * Y.size() + y] +
                                       " alpha=" + el(XY, static_cast<Ix>(c * Y.qsize() + a)) + ": " + el(Z, lhs) +
                                       " vs " + el(Z, rhs);
                            });
                        }
        });
    }
    return rep;
}

void for_each_space(const std::shared_ptr<const FiniteQuantale>& q, std::size_t n,
                    const std::function<void(const FiniteQlr&)>& visit) {
    std::size_t cells = n * n;
    std::size_t count = ipow(q->size(), cells, 1u << 24);
    if (count > (1u << 24)) throw UnsupportedOperation("too many spaces to enumerate");
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
    std::vector<Ix> d(cells, 0);
    for (std::size_t i = 0; i < count; ++i) {
        visit(FiniteQlr(names, q, d));
        for (std::size_t c = cells; c-- > 0;) {
            if (++d[c] < q->size()) break;
            d[c] = 0;
        }
    }
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::istringstream in(line);
    std::vector<std::string> out;
    std::string t;
    while (in >> t) out.push_back(t);
    return out;
}

} // namespace

FiniteQlr read_qlr(std::istream& in) {
    std::optional<QuantaleDesc> q;
    std::vector<std::string> points, declared;
    std::vector<QuantaleElem> dist;
    std::string line;
    int lineno = 0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto tok = tokens(line);
        if (tok.empty()) continue;
        try {
            if (tok[0] == "quantale") {
                if (tok.size() != 2) throw SyntaxError("expected 'quantale <descriptor>'", lineno, 1);
                q = parse_quantale(tok[1]);
            } else if (tok[0] == "points") {
                points.assign(tok.begin() + 1, tok.end());
                if (points.empty()) throw SyntaxError("empty carrier", lineno, 1);
            } else if (tok[0] == "declare") {
                declared.assign(tok.begin() + 1, tok.end());
            } else {
                if (!q || points.empty()) throw SyntaxError("distance row before 'quantale' and 'points'", lineno, 1);
                if (tok.size() != points.size())
                    throw SyntaxError("row has " + std::to_string(tok.size()) + " entries, expected " +
                                          std::to_string(points.size()),
                                      lineno, 1);
                for (const auto& t : tok) dist.push_back(parse_elem(*q, t));
                ++rows;
            }
        } catch (const StructuralError& e) {
            throw SyntaxError(e.what(), lineno, 1);
        }
    }
    if (!q) throw SyntaxError("missing 'quantale' line", lineno, 1);
    if (rows != points.size())
        throw SyntaxError("expected " + std::to_string(points.size()) + " distance rows, got " + std::to_string(rows),
                          lineno, 1);
    for (const auto& a : declared)
        if (std::find(axiom_names().begin(), axiom_names().end(), a) == axiom_names().end())
            throw SyntaxError("unknown declared axiom: " + a, lineno, 1);
    FiniteQlr X = make_space(*q, points, dist);
    X.declared = declared;
    return X;
}

FiniteQlr read_qlr_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open " + path);
    return read_qlr(in);
}

void write_qlr(std::ostream& out, const FiniteQlr& X) {
    out << "quantale " << X.desc().to_string() << "\npoints";
    for (const auto& p : X.carrier()) out << ' ' << p;
    out << '\n';
    if (!X.declared.empty()) {
        out << "declare";
        for (const auto& a : X.declared) out << ' ' << a;
        out << '\n';
    }
    QuantaleDesc d = X.desc();
    for (std::size_t x = 0; x < X.size(); ++x) {
        for (std::size_t y = 0; y < X.size(); ++y) out << (y ? " " : "") << to_string(d, X.elem(x, y));
        out << '\n';
    }
}

std::string format_derivative(const FiniteQlr& X, const FiniteQlr& Y, const std::vector<Ix>& deriv) {
    std::ostringstream out;
    std::size_t w = Y.width();
    for (std::size_t x = 0; x < X.size(); ++x)
        for (Ix a = 0; a < X.qsize(); ++a)
            out << X.carrier()[x] << ' ' << to_string(X.base().desc(), X.base().elem(a)) << ' '
                << row_string(Y.base(), std::span<const Ix>(deriv.data() + (x * X.qsize() + a) * w, w)) << '\n';
    return out.str();
}

} // namespace qlr
