#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qlr/report.hpp"

namespace qlr {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kDefaultTol = 1e-9;

struct Interval {
    enum class Kind { Empty, Bounded, Full };
    Kind kind = Kind::Empty;
    double lo = 0.0;
    double hi = 0.0;

    static Interval empty() { return {}; }
    static Interval full() { return {Kind::Full, -kInf, kInf}; }
    static Interval bounded(double lo, double hi);
    static Interval point(double x) { return bounded(x, x); }

    bool is_empty() const { return kind == Kind::Empty; }
    bool is_full() const { return kind == Kind::Full; }
    bool is_bounded() const { return kind == Kind::Bounded; }
    double width() const; // DomainError on Empty

    friend bool operator==(const Interval&, const Interval&) = default;
};

Interval hull(const Interval& a, const Interval& b);
Interval intersect(const Interval& a, const Interval& b);
bool contains(const Interval& outer, const Interval& inner, double tol = 0.0);
std::string to_string(const Interval& i);

class QuantaleElem {
  public:
    struct Tuple {
        std::vector<QuantaleElem> items;
        friend bool operator==(const Tuple&, const Tuple&) = default;
    };
    struct Table {
        std::vector<QuantaleElem> entries;
        friend bool operator==(const Table&, const Table&) = default;
    };
    using Rep = std::variant<double, std::uint32_t, Tuple, Interval, Table>;

    QuantaleElem() : rep_(0.0) {}

    static QuantaleElem real(double v) { return QuantaleElem(Rep(v)); }
    static QuantaleElem index(std::uint32_t i) { return QuantaleElem(Rep(i)); }
    static QuantaleElem tuple(std::vector<QuantaleElem> items) {
        return QuantaleElem(Rep(Tuple{std::move(items)}));
    }
    static QuantaleElem interval(Interval i) { return QuantaleElem(Rep(i)); }
    static QuantaleElem table(std::vector<QuantaleElem> entries) {
        return QuantaleElem(Rep(Table{std::move(entries)}));
    }

    bool is_real() const { return std::holds_alternative<double>(rep_); }
    bool is_index() const { return std::holds_alternative<std::uint32_t>(rep_); }
    bool is_tuple() const { return std::holds_alternative<Tuple>(rep_); }
    bool is_interval() const { return std::holds_alternative<Interval>(rep_); }
    bool is_table() const { return std::holds_alternative<Table>(rep_); }

    double as_real() const;
    std::uint32_t as_index() const;
    const Interval& as_interval() const;
    const std::vector<QuantaleElem>& items() const;   // Tuple
    const std::vector<QuantaleElem>& entries() const; // Table
    const Rep& rep() const { return rep_; }

    friend bool operator==(const QuantaleElem&, const QuantaleElem&) = default;

  private:
    explicit QuantaleElem(Rep r) : rep_(std::move(r)) {}
    Rep rep_;
};

enum class QuantaleKind {
    Lawvere,        // [0,inf], +
    SupLocale,      // [0,inf], max
    TruncChain,     // {0..N,inf}, addition saturating above N
    MaxChain,       // {0..N,inf}, max
    DiscreteTwo,    // {0,inf}
    Product,
    Pointwise,      // functions on a finite probe set, componentwise
    PowersetMonoid, // subsets of Z/n under Minkowski sum
    IntervalLattice // closed intervals, hull as join; a lattice, not a quantale
};

class QuantaleDesc {
  public:
    static QuantaleDesc lawvere();
    static QuantaleDesc sup_locale();
    static QuantaleDesc trunc_chain(int n);
    static QuantaleDesc max_chain(int n);
    static QuantaleDesc discrete_two();
    static QuantaleDesc product(std::vector<QuantaleDesc> factors);
    static QuantaleDesc pointwise(std::size_t probes, QuantaleDesc base,
                                  std::vector<std::string> labels = {});
    static QuantaleDesc powerset_zmod(int n);
    static QuantaleDesc interval_lattice();

    QuantaleKind kind() const { return kind_; }
    int levels() const { return levels_; }
    const std::vector<QuantaleDesc>& factors() const { return factors_; }
    const QuantaleDesc& base() const; // Pointwise only
    std::size_t probe_count() const { return probes_; }
    const std::vector<std::string>& probe_labels() const { return labels_; }

    bool is_quantale() const;
    bool is_locale() const;
    bool is_heyting() const;
    bool is_integral() const;
    bool is_finite() const;
    bool is_total_order() const;
    // The strict form of the self-arrow property is declared on chains only.
    bool declares_star_star() const { return is_total_order(); }
    std::size_t cardinality() const; // finite kinds

    std::string to_string() const;

    friend bool operator==(const QuantaleDesc& a, const QuantaleDesc& b) {
        return a.kind_ == b.kind_ && a.levels_ == b.levels_ && a.probes_ == b.probes_ &&
               a.factors_ == b.factors_;
    }

  private:
    QuantaleKind kind_ = QuantaleKind::Lawvere;
    int levels_ = 0;
    std::size_t probes_ = 0;
    std::vector<QuantaleDesc> factors_;
    std::vector<std::string> labels_;
};

// Grammar: lawvere | sup | two | interval | chain:N | maxchain:N | powerset:zmodN
//          | product(Q,Q,...) | pointwise(K,Q)
QuantaleDesc parse_quantale(std::string_view text);

void require_member(const QuantaleDesc& q, const QuantaleElem& a);

QuantaleElem zero(const QuantaleDesc& q);
QuantaleElem bottom(const QuantaleDesc& q);
QuantaleElem top(const QuantaleDesc& q);

bool leq(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b,
         double tol = kDefaultTol);
bool equal(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b,
           double tol = kDefaultTol);
QuantaleElem plus(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b);
QuantaleElem join(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b);
QuantaleElem meet(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b);
QuantaleElem join(const QuantaleDesc& q, std::span<const QuantaleElem> set);
QuantaleElem meet(const QuantaleDesc& q, std::span<const QuantaleElem> set);

/// a ⊸ b: least d with b + d >= a.
QuantaleElem residual(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b);
/// a ⇐ b: least d with b ∨ d >= a.
QuantaleElem heyting_arrow(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b);

bool way_below_zero(const QuantaleDesc& q, const QuantaleElem& a);

bool diagonal_member(const QuantaleDesc& q, const QuantaleElem& delta, const QuantaleElem& alpha,
                     const QuantaleElem& beta, double tol = kDefaultTol);
QuantaleElem diagonal_compose(const QuantaleDesc& q, const QuantaleElem& eta,
                              const QuantaleElem& beta, const QuantaleElem& gamma);

std::vector<QuantaleElem> elements(const QuantaleDesc& q);
std::vector<QuantaleElem> sample_elements(const QuantaleDesc& q, std::size_t n,
                                          std::uint64_t seed);

std::string to_string(const QuantaleDesc& q, const QuantaleElem& a);
QuantaleElem parse_elem(const QuantaleDesc& q, std::string_view text);

/// A finite quantale with every operation tabulated over element indices.
class FiniteQuantale {
  public:
    using Ix = std::uint16_t;
    static constexpr std::size_t kMaxSize = 512;

    explicit FiniteQuantale(QuantaleDesc desc);

    const QuantaleDesc& desc() const { return desc_; }
    std::size_t size() const { return elems_.size(); }
    const QuantaleElem& elem(Ix i) const { return elems_[i]; }
    Ix index_of(const QuantaleElem& a) const;

    Ix plus(Ix a, Ix b) const { return plus_[a * size() + b]; }
    Ix join(Ix a, Ix b) const { return join_[a * size() + b]; }
    Ix meet(Ix a, Ix b) const { return meet_[a * size() + b]; }
    Ix residual(Ix a, Ix b) const { return residual_[a * size() + b]; }
    Ix heyting(Ix a, Ix b) const;
    bool leq(Ix a, Ix b) const { return leq_[a * size() + b] != 0; }
    bool has_heyting() const { return !heyting_.empty(); }

    Ix zero() const { return zero_; }
    Ix bottom() const { return bottom_; }
    Ix top() const { return top_; }

  private:
    QuantaleDesc desc_;
    std::vector<QuantaleElem> elems_;
    std::vector<Ix> plus_, join_, meet_, residual_, heyting_;
    std::vector<std::uint8_t> leq_;
    Ix zero_ = 0, bottom_ = 0, top_ = 0;
};

LawReport check_quantale_laws(const FiniteQuantale& q);
LawReport check_quantale_laws(const QuantaleDesc& q, const std::vector<QuantaleElem>& samples,
                              double tol = kDefaultTol);

} // namespace qlr
