#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qlr/quantale.hpp"
#include "qlr/report.hpp"

namespace qlr {

using Ix = FiniteQuantale::Ix;
using FnTable = std::vector<std::size_t>;

// A finite QLR. Each distance is a row of `width` base-quantale indices; width 1
// is an ordinary space, larger widths arise from exponentials, whose distances
// live in a pointwise quantale over a probe set.
class FiniteQlr {
  public:
    FiniteQlr() = default;
    FiniteQlr(std::vector<std::string> carrier, std::shared_ptr<const FiniteQuantale> base,
              std::vector<Ix> dist, std::size_t width = 1, std::vector<std::string> probes = {});

    std::size_t size() const { return carrier_.size(); }
    std::size_t width() const { return width_; }
    const std::vector<std::string>& carrier() const { return carrier_; }
    const std::vector<std::string>& probes() const { return probes_; }
    const FiniteQuantale& base() const { return *base_; }
    const std::shared_ptr<const FiniteQuantale>& base_ptr() const { return base_; }
    // Number of elements of the distance quantale; only meaningful for width 1.
    std::size_t qsize() const { return base_->size(); }

    std::span<const Ix> at(std::size_t x, std::size_t y) const {
        return {dist_.data() + (x * size() + y) * width_, width_};
    }
    Ix operator()(std::size_t x, std::size_t y) const { return dist_[(x * size() + y) * width_]; }
    const std::vector<Ix>& dist() const { return dist_; }

    QuantaleDesc desc() const;
    QuantaleElem elem(std::size_t x, std::size_t y) const;

    // Declared axioms, checked against the real ones by `verify`.
    std::vector<std::string> declared;

  private:
    std::vector<std::string> carrier_;
    std::shared_ptr<const FiniteQuantale> base_;
    std::size_t width_ = 1;
    std::vector<std::string> probes_;
    std::vector<Ix> dist_;
};

// fn maps carrier indices; deriv is indexed ((x * |Q_X| + alpha) * width_Y + k).
struct FiniteQlrMap {
    FnTable fn;
    std::vector<Ix> deriv;
    friend bool operator==(const FiniteQlrMap&, const FiniteQlrMap&) = default;
};

struct Caps {
    std::size_t max_carrier = 4;
    std::size_t max_quantale = 8;
};

std::shared_ptr<const FiniteQuantale> tabulate(const QuantaleDesc& q);

FiniteQlr make_space(const QuantaleDesc& q, std::vector<std::string> carrier,
                     const std::vector<QuantaleElem>& dist);
FiniteQlr discrete_space(std::size_t n, const QuantaleDesc& q = QuantaleDesc::discrete_two());
FiniteQlr unit_space();

// All functions n -> m, first argument as the most significant digit.
std::vector<FnTable> all_functions(std::size_t n, std::size_t m);
std::size_t function_index(const FnTable& f, std::size_t m);

std::vector<Ix> derivative(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f);
// Empty when valid, otherwise the first violated entry.
std::optional<std::string> map_violation(const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m);
inline bool is_valid_map(const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m) {
    return !map_violation(X, Y, m);
}

// d^Q(f,g) as a row over the probes (x, alpha) of X.
std::vector<Ix> exp_distance(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f, const FnTable& g);
std::vector<Ix> expr_distance(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f, const FnTable& g);

FiniteQlr expQ(const FiniteQlr& X, const FiniteQlr& Y, const Caps& caps = {});
FiniteQlr expQr(const FiniteQlr& X, const FiniteQlr& Y, const Caps& caps = {});
FiniteQlr productQlr(const FiniteQlr& X, const FiniteQlr& Y);

// Maps Z x X -> Y against maps Z -> Y^X.
FiniteQlrMap curryQ(const FiniteQlr& Z, const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m);
FiniteQlrMap uncurryQ(const FiniteQlr& Z, const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m);
FiniteQlrMap curryQr(const FiniteQlr& Z, const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m);
FiniteQlrMap uncurryQr(const FiniteQlr& Z, const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlrMap& m);

std::vector<Ix> distanceViaHfg(const FiniteQlr& X, const FiniteQlr& Y, const FnTable& f, const FnTable& g);

const std::vector<std::string>& axiom_names();
LawReport checkAxioms(const FiniteQlr& X, const std::vector<std::string>& axioms);

FiniteQlr inducedMetric(const FiniteQlr& X);

struct SymmetryResult {
    bool symmetric = true;
    std::string witness;
};
SymmetryResult checkSymmetricExp(const FiniteQlr& X, const FiniteQlr& Y);

struct DerivativeLawOptions {
    std::size_t max_maps = 20000; // per law; larger hom-sets are sampled
    std::uint64_t seed = 1;
};
// D1..D6 over X, Y, Z (all of width 1); D5 uses maps X x Y -> Z, D6 maps X -> Z^Y.
LawReport checkDerivativeLaws(const FiniteQlr& X, const FiniteQlr& Y, const FiniteQlr& Z,
                              const DerivativeLawOptions& opts = {});

// Every space of the given size over q, matrices in lexicographic order.
void for_each_space(const std::shared_ptr<const FiniteQuantale>& q, std::size_t n,
                    const std::function<void(const FiniteQlr&)>& visit);

// Plain-text matrix format.
FiniteQlr read_qlr(std::istream& in);
FiniteQlr read_qlr_file(const std::string& path);
void write_qlr(std::ostream& out, const FiniteQlr& X);
// One line per (x, alpha): "x alpha value".
std::string format_derivative(const FiniteQlr& X, const FiniteQlr& Y, const std::vector<Ix>& deriv);

std::string row_string(const FiniteQuantale& q, std::span<const Ix> row);

} // namespace qlr
