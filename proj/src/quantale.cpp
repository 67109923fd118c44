#include "qlr/quantale.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "qlr/error.hpp"

namespace qlr {

// ---------------------------------------------------------------- intervals

Interval Interval::bounded(double lo, double hi) {
    if (!(lo <= hi)) throw StructuralError("interval with lo > hi: [" + fmt_real(lo) + "," + fmt_real(hi) + "]");
    if (std::isinf(lo) || std::isinf(hi)) {
        if (lo == -kInf && hi == kInf) return full();
        throw StructuralError("half-line intervals are not represented");
    }
    return {Kind::Bounded, lo, hi};
}

double Interval::width() const {
    switch (kind) {
    case Kind::Empty: throw DomainError("width of the empty interval");
    case Kind::Full: return kInf;
    case Kind::Bounded: return hi - lo;
    }
    return 0.0;
}

Interval hull(const Interval& a, const Interval& b) {
    if (a.is_empty()) return b;
    if (b.is_empty()) return a;
    if (a.is_full() || b.is_full()) return Interval::full();
    return Interval::bounded(std::min(a.lo, b.lo), std::max(a.hi, b.hi));
}

Interval intersect(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) return Interval::empty();
    if (a.is_full()) return b;
    if (b.is_full()) return a;
    double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
    if (lo > hi) return Interval::empty();
    return Interval::bounded(lo, hi);
}

bool contains(const Interval& outer, const Interval& inner, double tol) {
    if (inner.is_empty() || outer.is_full()) return true;
    if (outer.is_empty() || inner.is_full()) return false;
    return outer.lo <= inner.lo + tol && inner.hi <= outer.hi + tol;
}

std::string to_string(const Interval& i) {
    switch (i.kind) {
    case Interval::Kind::Empty: return "empty";
    case Interval::Kind::Full: return "full";
    case Interval::Kind::Bounded: return "[" + fmt_real(i.lo) + "," + fmt_real(i.hi) + "]";
    }
    return {};
}

// ---------------------------------------------------------------- elements

double QuantaleElem::as_real() const {
    if (auto p = std::get_if<double>(&rep_)) return *p;
    throw StructuralError("quantale element is not a real");
}

std::uint32_t QuantaleElem::as_index() const {
    if (auto p = std::get_if<std::uint32_t>(&rep_)) return *p;
    throw StructuralError("quantale element is not a finite index");
}

const Interval& QuantaleElem::as_interval() const {
    if (auto p = std::get_if<Interval>(&rep_)) return *p;
    throw StructuralError("quantale element is not an interval");
}

const std::vector<QuantaleElem>& QuantaleElem::items() const {
    if (auto p = std::get_if<Tuple>(&rep_)) return p->items;
    throw StructuralError("quantale element is not a tuple");
}

const std::vector<QuantaleElem>& QuantaleElem::entries() const {
    if (auto p = std::get_if<Table>(&rep_)) return p->entries;
    throw StructuralError("quantale element is not a probe table");
}

// ---------------------------------------------------------------- descriptors

QuantaleDesc QuantaleDesc::lawvere() { return {}; }

QuantaleDesc QuantaleDesc::sup_locale() {
    QuantaleDesc q;
    q.kind_ = QuantaleKind::SupLocale;
    return q;
}

QuantaleDesc QuantaleDesc::trunc_chain(int n) {
    if (n < 0) throw StructuralError("chain length must be non-negative");
    QuantaleDesc q;
    q.kind_ = QuantaleKind::TruncChain;
    q.levels_ = n;
    return q;
}

QuantaleDesc QuantaleDesc::max_chain(int n) {
    QuantaleDesc q = trunc_chain(n);
    q.kind_ = QuantaleKind::MaxChain;
    return q;
}

QuantaleDesc QuantaleDesc::discrete_two() {
    QuantaleDesc q;
    q.kind_ = QuantaleKind::DiscreteTwo;
    return q;
}

QuantaleDesc QuantaleDesc::product(std::vector<QuantaleDesc> factors) {
    if (factors.empty()) throw StructuralError("product of no quantales");
    QuantaleDesc q;
    q.kind_ = QuantaleKind::Product;
    q.factors_ = std::move(factors);
    return q;
}

QuantaleDesc QuantaleDesc::pointwise(std::size_t probes, QuantaleDesc base,
                                     std::vector<std::string> labels) {
    if (probes == 0) throw StructuralError("pointwise quantale needs at least one probe");
    if (!labels.empty() && labels.size() != probes)
        throw StructuralError("probe label count does not match probe count");
    QuantaleDesc q;
    q.kind_ = QuantaleKind::Pointwise;
    q.probes_ = probes;
    q.factors_.push_back(std::move(base));
    q.labels_ = std::move(labels);
    return q;
}

QuantaleDesc QuantaleDesc::powerset_zmod(int n) {
    if (n < 1 || n > 5) throw StructuralError("powerset quantale supports Z/n for 1 <= n <= 5");
    QuantaleDesc q;
    q.kind_ = QuantaleKind::PowersetMonoid;
    q.levels_ = n;
    return q;
}

QuantaleDesc QuantaleDesc::interval_lattice() {
    QuantaleDesc q;
    q.kind_ = QuantaleKind::IntervalLattice;
    return q;
}

const QuantaleDesc& QuantaleDesc::base() const {
    if (kind_ != QuantaleKind::Pointwise) throw StructuralError("base() on a non-pointwise quantale");
    return factors_.front();
}

namespace {

bool all_factors(const QuantaleDesc& q, bool (QuantaleDesc::*pred)() const) {
    return std::all_of(q.factors().begin(), q.factors().end(),
                       [&](const QuantaleDesc& f) { return (f.*pred)(); });
}

} // namespace

bool QuantaleDesc::is_quantale() const {
    switch (kind_) {
    case QuantaleKind::IntervalLattice: return false;
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return all_factors(*this, &QuantaleDesc::is_quantale);
    default: return true;
    }
}

bool QuantaleDesc::is_locale() const {
    switch (kind_) {
    case QuantaleKind::SupLocale:
    case QuantaleKind::MaxChain:
    case QuantaleKind::DiscreteTwo: return true;
    case QuantaleKind::TruncChain: return levels_ == 0;
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return all_factors(*this, &QuantaleDesc::is_locale);
    default: return false;
    }
}

bool QuantaleDesc::is_heyting() const {
    switch (kind_) {
    case QuantaleKind::IntervalLattice: return false;
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return all_factors(*this, &QuantaleDesc::is_heyting);
    default: return true;
    }
}

bool QuantaleDesc::is_integral() const {
    switch (kind_) {
    case QuantaleKind::PowersetMonoid: return levels_ == 1;
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return all_factors(*this, &QuantaleDesc::is_integral);
    default: return true;
    }
}

bool QuantaleDesc::is_finite() const {
    switch (kind_) {
    case QuantaleKind::TruncChain:
    case QuantaleKind::MaxChain:
    case QuantaleKind::DiscreteTwo:
    case QuantaleKind::PowersetMonoid: return true;
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return all_factors(*this, &QuantaleDesc::is_finite);
    default: return false;
    }
}

bool QuantaleDesc::is_total_order() const {
    switch (kind_) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale:
    case QuantaleKind::TruncChain:
    case QuantaleKind::MaxChain:
    case QuantaleKind::DiscreteTwo: return true;
    default: return false;
    }
}

std::size_t QuantaleDesc::cardinality() const {
    switch (kind_) {
    case QuantaleKind::TruncChain:
    case QuantaleKind::MaxChain: return static_cast<std::size_t>(levels_) + 2;
    case QuantaleKind::DiscreteTwo: return 2;
    case QuantaleKind::PowersetMonoid: return std::size_t{1} << levels_;
    case QuantaleKind::Product: {
        std::size_t n = 1;
        for (const auto& f : factors_) n *= f.cardinality();
        return n;
    }
    case QuantaleKind::Pointwise: {
        std::size_t n = 1, b = base().cardinality();
        for (std::size_t i = 0; i < probes_; ++i) {
            if (n > (std::size_t{1} << 40) / b) throw UnsupportedOperation("pointwise quantale too large to enumerate");
            n *= b;
        }
        return n;
    }
    default: throw UnsupportedOperation("cardinality of an infinite quantale: " + to_string());
    }
}

std::string QuantaleDesc::to_string() const {
    switch (kind_) {
    case QuantaleKind::Lawvere: return "lawvere";
    case QuantaleKind::SupLocale: return "sup";
    case QuantaleKind::TruncChain: return "chain:" + std::to_string(levels_);
    case QuantaleKind::MaxChain: return "maxchain:" + std::to_string(levels_);
    case QuantaleKind::DiscreteTwo: return "two";
    case QuantaleKind::PowersetMonoid: return "powerset:zmod" + std::to_string(levels_);
    case QuantaleKind::IntervalLattice: return "interval";
    case QuantaleKind::Product: {
        std::string s = "product(";
        for (std::size_t i = 0; i < factors_.size(); ++i) s += (i ? "," : "") + factors_[i].to_string();
        return s + ")";
    }
    case QuantaleKind::Pointwise:
        return "pointwise(" + std::to_string(probes_) + "," + base().to_string() + ")";
    }
    return {};
}

// ---------------------------------------------------------------- parsing

namespace {

class Cursor {
  public:
    explicit Cursor(std::string_view s) : s_(s) {}
    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool eat(char c) {
        skip_ws();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!eat(c)) fail(std::string("expected '") + c + "'");
    }
    std::string word() {
        skip_ws();
        std::size_t start = i_;
        while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '.' ||
                                  s_[i_] == '-' || s_[i_] == '+' || s_[i_] == '_'))
            ++i_;
        if (start == i_) fail("expected a token");
        return std::string(s_.substr(start, i_ - start));
    }
    bool done() {
        skip_ws();
        return i_ == s_.size();
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw StructuralError(why + " at offset " + std::to_string(i_) + " in '" + std::string(s_) + "'");
    }

  private:
    std::string_view s_;
    std::size_t i_ = 0;
};

int parse_int(const Cursor& c, const std::string& s) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) c.fail("bad integer '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        c.fail("bad integer '" + s + "'");
    }
}

double parse_double(const Cursor& c, const std::string& s) {
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) c.fail("bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        c.fail("bad number '" + s + "'");
    }
}

QuantaleDesc parse_desc(Cursor& c) {
    std::string head = c.word();
    std::string arg = c.eat(':') ? c.word() : "";
    if (head == "lawvere") return QuantaleDesc::lawvere();
    if (head == "sup") return QuantaleDesc::sup_locale();
    if (head == "two") return QuantaleDesc::discrete_two();
    if (head == "interval") return QuantaleDesc::interval_lattice();
    if (head == "chain") return QuantaleDesc::trunc_chain(parse_int(c, arg));
    if (head == "maxchain") return QuantaleDesc::max_chain(parse_int(c, arg));
    if (head == "powerset") {
        if (arg.rfind("zmod", 0) != 0) c.fail("powerset expects zmodN");
        return QuantaleDesc::powerset_zmod(parse_int(c, arg.substr(4)));
    }
    if (head == "product") {
        c.expect('(');
        std::vector<QuantaleDesc> fs;
        do fs.push_back(parse_desc(c));
        while (c.eat(','));
        c.expect(')');
        return QuantaleDesc::product(std::move(fs));
    }
    if (head == "pointwise") {
        c.expect('(');
        int k = parse_int(c, c.word());
        c.expect(',');
        QuantaleDesc b = parse_desc(c);
        c.expect(')');
        if (k <= 0) c.fail("probe count must be positive");
        return QuantaleDesc::pointwise(static_cast<std::size_t>(k), std::move(b));
    }
    c.fail("unknown quantale kind '" + head + "'");
}

std::uint32_t chain_top(const QuantaleDesc& q) {
    return q.kind() == QuantaleKind::DiscreteTwo ? 1u : static_cast<std::uint32_t>(q.levels()) + 1;
}

std::uint32_t full_mask(const QuantaleDesc& q) { return (1u << q.levels()) - 1; }

QuantaleElem parse_elem_at(const QuantaleDesc& q, Cursor& c) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale: {
        double v = parse_double(c, c.word());
        return QuantaleElem::real(v);
    }
    case QuantaleKind::TruncChain:
    case QuantaleKind::MaxChain:
    case QuantaleKind::DiscreteTwo: {
        std::string w = c.word();
        if (w == "inf") return QuantaleElem::index(chain_top(q));
        int v = parse_int(c, w);
        if (v < 0 || static_cast<std::uint32_t>(v) >= chain_top(q)) c.fail("chain element out of range");
        return QuantaleElem::index(static_cast<std::uint32_t>(v));
    }
    case QuantaleKind::PowersetMonoid: {
        c.expect('{');
        std::uint32_t mask = 0;
        if (!c.eat('}')) {
            do {
                int m = parse_int(c, c.word());
                if (m < 0 || m >= q.levels()) c.fail("monoid element out of range");
                mask |= 1u << m;
            } while (c.eat(','));
            c.expect('}');
        }
        return QuantaleElem::index(mask);
    }
    case QuantaleKind::IntervalLattice: {
        if (c.eat('[')) {
            double lo = parse_double(c, c.word());
            c.expect(',');
            double hi = parse_double(c, c.word());
            c.expect(']');
            return QuantaleElem::interval(Interval::bounded(lo, hi));
        }
        std::string w = c.word();
        if (w == "empty") return QuantaleElem::interval(Interval::empty());
        if (w == "full") return QuantaleElem::interval(Interval::full());
        c.fail("bad interval '" + w + "'");
    }
    case QuantaleKind::Product: {
        c.expect('(');
        std::vector<QuantaleElem> items;
        for (std::size_t i = 0; i < q.factors().size(); ++i) {
            if (i) c.expect(',');
            items.push_back(parse_elem_at(q.factors()[i], c));
        }
        c.expect(')');
        return QuantaleElem::tuple(std::move(items));
    }
    case QuantaleKind::Pointwise: {
        c.expect('<');
        std::vector<QuantaleElem> entries;
        for (std::size_t i = 0; i < q.probe_count(); ++i) {
            if (i) c.expect(',');
            entries.push_back(parse_elem_at(q.base(), c));
        }
        c.expect('>');
        return QuantaleElem::table(std::move(entries));
    }
    }
    c.fail("unreachable");
}

} // namespace

QuantaleDesc parse_quantale(std::string_view text) {
    Cursor c(text);
    QuantaleDesc q = parse_desc(c);
    if (!c.done()) c.fail("trailing input");
    return q;
}

QuantaleElem parse_elem(const QuantaleDesc& q, std::string_view text) {
    Cursor c(text);
    QuantaleElem a = parse_elem_at(q, c);
    if (!c.done()) c.fail("trailing input");
    require_member(q, a);
    return a;
}

std::string to_string(const QuantaleDesc& q, const QuantaleElem& a) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale: return fmt_real(a.as_real());
    case QuantaleKind::TruncChain:
    case QuantaleKind::MaxChain:
    case QuantaleKind::DiscreteTwo:
        return a.as_index() == chain_top(q) ? "inf" : std::to_string(a.as_index());
    case QuantaleKind::PowersetMonoid: {
        std::string s = "{";
        bool first = true;
        for (int m = 0; m < q.levels(); ++m)
            if (a.as_index() >> m & 1u) {
                s += (first ? "" : ",") + std::to_string(m);
                first = false;
            }
        return s + "}";
    }
    case QuantaleKind::IntervalLattice: return qlr::to_string(a.as_interval());
    case QuantaleKind::Product: {
        std::string s = "(";
        for (std::size_t i = 0; i < q.factors().size(); ++i)
            s += (i ? "," : "") + to_string(q.factors()[i], a.items()[i]);
        return s + ")";
    }
    case QuantaleKind::Pointwise: {
        std::string s = "<";
        for (std::size_t i = 0; i < q.probe_count(); ++i)
            s += (i ? "," : "") + to_string(q.base(), a.entries()[i]);
        return s + ">";
    }
    }
    return {};
}

// ---------------------------------------------------------------- membership

void require_member(const QuantaleDesc& q, const QuantaleElem& a) {
    auto bad = [&](const std::string& why) {
        throw StructuralError("element does not belong to " + q.to_string() + ": " + why);
    };
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale:
        if (!a.is_real()) bad("expected a real");
        if (!(a.as_real() >= 0.0)) bad("negative or NaN distance");
        return;
    case QuantaleKind::TruncChain:
    case QuantaleKind::MaxChain:
    case QuantaleKind::DiscreteTwo:
        if (!a.is_index()) bad("expected a chain index");
        if (a.as_index() > chain_top(q)) bad("index out of range");
        return;
    case QuantaleKind::PowersetMonoid:
        if (!a.is_index()) bad("expected a subset mask");
        if ((a.as_index() & ~full_mask(q)) != 0) bad("mask out of range");
        return;
    case QuantaleKind::IntervalLattice:
        if (!a.is_interval()) bad("expected an interval");
        return;
    case QuantaleKind::Product:
        if (!a.is_tuple() || a.items().size() != q.factors().size()) bad("tuple arity");
        for (std::size_t i = 0; i < q.factors().size(); ++i) require_member(q.factors()[i], a.items()[i]);
        return;
    case QuantaleKind::Pointwise:
        if (!a.is_table() || a.entries().size() != q.probe_count()) bad("probe table size");
        for (const auto& e : a.entries()) require_member(q.base(), e);
        return;
    }
}

// ---------------------------------------------------------------- operations

namespace {

template <typename F>
QuantaleElem componentwise(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b, F op) {
    if (q.kind() == QuantaleKind::Product) {
        const auto &xs = a.items(), &ys = b.items();
        if (xs.size() != q.factors().size() || ys.size() != q.factors().size())
            throw StructuralError("tuple arity mismatch for " + q.to_string());
        std::vector<QuantaleElem> out;
        out.reserve(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(op(q.factors()[i], xs[i], ys[i]));
        return QuantaleElem::tuple(std::move(out));
    }
    const auto &xs = a.entries(), &ys = b.entries();
    if (xs.size() != q.probe_count() || ys.size() != q.probe_count())
        throw StructuralError("probe table size mismatch for " + q.to_string());
    std::vector<QuantaleElem> out;
    out.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out.push_back(op(q.base(), xs[i], ys[i]));
    return QuantaleElem::table(std::move(out));
}

template <typename F>
QuantaleElem build(const QuantaleDesc& q, F leaf) {
    if (q.kind() == QuantaleKind::Product) {
        std::vector<QuantaleElem> out;
        for (const auto& f : q.factors()) out.push_back(leaf(f));
        return QuantaleElem::tuple(std::move(out));
    }
    return QuantaleElem::table(std::vector<QuantaleElem>(q.probe_count(), leaf(q.base())));
}

bool is_chain_kind(const QuantaleDesc& q) {
    return q.kind() == QuantaleKind::TruncChain || q.kind() == QuantaleKind::MaxChain ||
           q.kind() == QuantaleKind::DiscreteTwo;
}

std::uint32_t zmod_sum(int n, std::uint32_t a, std::uint32_t b) {
    std::uint32_t out = 0;
    for (int i = 0; i < n; ++i)
        if (a >> i & 1u)
            for (int j = 0; j < n; ++j)
                if (b >> j & 1u) out |= 1u << ((i + j) % n);
    return out;
}

} // namespace

QuantaleElem zero(const QuantaleDesc& q) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale: return QuantaleElem::real(0.0);
    case QuantaleKind::PowersetMonoid: return QuantaleElem::index(1u);
    case QuantaleKind::IntervalLattice: return QuantaleElem::interval(Interval::empty());
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return build(q, [](const QuantaleDesc& f) { return zero(f); });
    default: return QuantaleElem::index(0);
    }
}

QuantaleElem bottom(const QuantaleDesc& q) {
    switch (q.kind()) {
    case QuantaleKind::PowersetMonoid: return QuantaleElem::index(full_mask(q));
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return build(q, [](const QuantaleDesc& f) { return bottom(f); });
    default: return zero(q);
    }
}

QuantaleElem top(const QuantaleDesc& q) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale: return QuantaleElem::real(kInf);
    case QuantaleKind::PowersetMonoid: return QuantaleElem::index(0u);
    case QuantaleKind::IntervalLattice: return QuantaleElem::interval(Interval::full());
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return build(q, [](const QuantaleDesc& f) { return top(f); });
    default: return QuantaleElem::index(chain_top(q));
    }
}

bool leq(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b, double tol) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale: {
        double x = a.as_real(), y = b.as_real();
        if (y == kInf) return true;
        if (x == kInf) return false;
        return x <= y + tol;
    }
    case QuantaleKind::PowersetMonoid: return (a.as_index() & b.as_index()) == b.as_index();
    case QuantaleKind::IntervalLattice: return contains(b.as_interval(), a.as_interval(), tol);
    case QuantaleKind::Product: {
        const auto &xs = a.items(), &ys = b.items();
        if (xs.size() != q.factors().size() || ys.size() != xs.size())
            throw StructuralError("tuple arity mismatch for " + q.to_string());
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (!leq(q.factors()[i], xs[i], ys[i], tol)) return false;
        return true;
    }
    case QuantaleKind::Pointwise: {
        const auto &xs = a.entries(), &ys = b.entries();
        if (xs.size() != q.probe_count() || ys.size() != xs.size())
            throw StructuralError("probe table size mismatch for " + q.to_string());
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (!leq(q.base(), xs[i], ys[i], tol)) return false;
        return true;
    }
    default: return a.as_index() <= b.as_index();
    }
}

bool equal(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b, double tol) {
    return leq(q, a, b, tol) && leq(q, b, a, tol);
}

QuantaleElem plus(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere: return QuantaleElem::real(a.as_real() + b.as_real());
    case QuantaleKind::TruncChain: {
        std::uint32_t x = a.as_index(), y = b.as_index(), t = chain_top(q);
        if (x == t || y == t || x + y >= t) return QuantaleElem::index(t);
        return QuantaleElem::index(x + y);
    }
    case QuantaleKind::PowersetMonoid:
        return QuantaleElem::index(zmod_sum(q.levels(), a.as_index(), b.as_index()));
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return componentwise(q, a, b, [](auto& f, auto& x, auto& y) { return plus(f, x, y); });
    default: return join(q, a, b); // locales and the interval lattice
    }
}

QuantaleElem join(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale: return QuantaleElem::real(std::max(a.as_real(), b.as_real()));
    case QuantaleKind::PowersetMonoid: return QuantaleElem::index(a.as_index() & b.as_index());
    case QuantaleKind::IntervalLattice: return QuantaleElem::interval(hull(a.as_interval(), b.as_interval()));
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return componentwise(q, a, b, [](auto& f, auto& x, auto& y) { return join(f, x, y); });
    default: return QuantaleElem::index(std::max(a.as_index(), b.as_index()));
    }
}

QuantaleElem meet(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale: return QuantaleElem::real(std::min(a.as_real(), b.as_real()));
    case QuantaleKind::PowersetMonoid: return QuantaleElem::index(a.as_index() | b.as_index());
    case QuantaleKind::IntervalLattice:
        return QuantaleElem::interval(intersect(a.as_interval(), b.as_interval()));
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise: return componentwise(q, a, b, [](auto& f, auto& x, auto& y) { return meet(f, x, y); });
    default: return QuantaleElem::index(std::min(a.as_index(), b.as_index()));
    }
}

QuantaleElem join(const QuantaleDesc& q, std::span<const QuantaleElem> set) {
    QuantaleElem acc = bottom(q);
    for (const auto& a : set) acc = join(q, acc, a);
    return acc;
}

QuantaleElem meet(const QuantaleDesc& q, std::span<const QuantaleElem> set) {
    QuantaleElem acc = top(q);
    for (const auto& a : set) acc = meet(q, acc, a);
    return acc;
}

namespace {

// Least interval d with hull(b, d) containing a.
Interval interval_residual(const Interval& a, const Interval& b) {
    if (contains(b, a)) return Interval::empty();
    if (a.is_full() || b.is_empty()) return a;
    bool left = a.lo < b.lo, right = a.hi > b.hi;
    if (left && right) return a;
    return left ? Interval::point(a.lo) : Interval::point(a.hi);
}

} // namespace

QuantaleElem residual(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere: {
        double x = a.as_real(), y = b.as_real();
        if (x <= y) return QuantaleElem::real(0.0);
        if (x == kInf) return QuantaleElem::real(kInf);
        return QuantaleElem::real(x - y);
    }
    case QuantaleKind::TruncChain: {
        std::uint32_t x = a.as_index(), y = b.as_index(), t = chain_top(q);
        if (x <= y) return QuantaleElem::index(0);
        if (x < t) return QuantaleElem::index(x - y);
        // reaching inf needs y + d > N
        return QuantaleElem::index(y == 0 ? t : t - y);
    }
    case QuantaleKind::PowersetMonoid: {
        std::uint32_t out = 0;
        for (int m = 0; m < q.levels(); ++m) {
            std::uint32_t shifted = zmod_sum(q.levels(), b.as_index(), 1u << m);
            if ((shifted & ~a.as_index()) == 0) out |= 1u << m;
        }
        return QuantaleElem::index(out);
    }
    case QuantaleKind::IntervalLattice:
        return QuantaleElem::interval(interval_residual(a.as_interval(), b.as_interval()));
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise:
        return componentwise(q, a, b, [](auto& f, auto& x, auto& y) { return residual(f, x, y); });
    default: return heyting_arrow(q, a, b); // locales
    }
}

QuantaleElem heyting_arrow(const QuantaleDesc& q, const QuantaleElem& a, const QuantaleElem& b) {
    if (!q.is_heyting()) throw UnsupportedOperation("Heyting arrow on non-Heyting " + q.to_string());
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale:
        return a.as_real() <= b.as_real() ? QuantaleElem::real(0.0) : a;
    case QuantaleKind::PowersetMonoid:
        return QuantaleElem::index((a.as_index() | ~b.as_index()) & full_mask(q));
    case QuantaleKind::Product:
    case QuantaleKind::Pointwise:
        return componentwise(q, a, b, [](auto& f, auto& x, auto& y) { return heyting_arrow(f, x, y); });
    default: return a.as_index() <= b.as_index() ? QuantaleElem::index(0) : a;
    }
}

bool way_below_zero(const QuantaleDesc& q, const QuantaleElem& a) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale: return a.as_real() > 0.0;
    case QuantaleKind::Product:
        for (std::size_t i = 0; i < q.factors().size(); ++i)
            if (!way_below_zero(q.factors()[i], a.items()[i])) return false;
        return true;
    case QuantaleKind::Pointwise:
        for (const auto& e : a.entries())
            if (!way_below_zero(q.base(), e)) return false;
        return true;
    case QuantaleKind::TruncChain:
    case QuantaleKind::MaxChain:
    case QuantaleKind::DiscreteTwo: return a.as_index() > 0;
    default: throw UnsupportedOperation("way-below relation on " + q.to_string());
    }
}

bool diagonal_member(const QuantaleDesc& q, const QuantaleElem& delta, const QuantaleElem& alpha,
                     const QuantaleElem& beta, double tol) {
    if (!q.is_quantale()) return leq(q, join(q, alpha, beta), delta, tol);
    if (!q.is_integral()) throw UnsupportedOperation("diagonals need an integral quantale, got " + q.to_string());
    return equal(q, plus(q, alpha, residual(q, delta, alpha)), delta, tol) &&
           equal(q, plus(q, residual(q, delta, beta), beta), delta, tol);
}

QuantaleElem diagonal_compose(const QuantaleDesc& q, const QuantaleElem& eta, const QuantaleElem& beta,
                              const QuantaleElem& gamma) {
    if (!q.is_quantale()) return join(q, eta, gamma);
    if (!q.is_integral()) throw UnsupportedOperation("diagonals need an integral quantale, got " + q.to_string());
    return plus(q, eta, residual(q, gamma, beta));
}

// ---------------------------------------------------------------- enumeration

std::vector<QuantaleElem> elements(const QuantaleDesc& q) {
    std::size_t n = q.cardinality();
    if (n > FiniteQuantale::kMaxSize * 64) throw UnsupportedOperation("too many elements to enumerate in " + q.to_string());
    std::vector<QuantaleElem> out;
    out.reserve(n);
    if (is_chain_kind(q) || q.kind() == QuantaleKind::PowersetMonoid) {
        for (std::uint32_t i = 0; i < n; ++i) out.push_back(QuantaleElem::index(i));
        return out;
    }
    // mixed radix, first coordinate most significant
    std::vector<std::vector<QuantaleElem>> coords;
    if (q.kind() == QuantaleKind::Product)
        for (const auto& f : q.factors()) coords.push_back(elements(f));
    else
        coords.assign(q.probe_count(), elements(q.base()));
    std::vector<std::size_t> digit(coords.size(), 0);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<QuantaleElem> parts;
        parts.reserve(coords.size());
        for (std::size_t i = 0; i < coords.size(); ++i) parts.push_back(coords[i][digit[i]]);
        out.push_back(q.kind() == QuantaleKind::Product ? QuantaleElem::tuple(std::move(parts))
                                                        : QuantaleElem::table(std::move(parts)));
        for (std::size_t i = coords.size(); i-- > 0;) {
            if (++digit[i] < coords[i].size()) break;
            digit[i] = 0;
        }
    }
    return out;
}

namespace {

QuantaleElem random_elem(const QuantaleDesc& q, std::mt19937_64& rng) {
    switch (q.kind()) {
    case QuantaleKind::Lawvere:
    case QuantaleKind::SupLocale: {
        std::uniform_int_distribution<int> pick(0, 9);
        int p = pick(rng);
        if (p == 0) return QuantaleElem::real(0.0);
        if (p == 1) return QuantaleElem::real(kInf);
        if (p < 6) return QuantaleElem::real(std::uniform_int_distribution<int>(0, 80)(rng) * 0.25);
        return QuantaleElem::real(std::uniform_real_distribution<double>(0.0, 50.0)(rng));
    }
    case QuantaleKind::IntervalLattice: {
        std::uniform_int_distribution<int> pick(0, 11);
        int p = pick(rng);
        if (p == 0) return QuantaleElem::interval(Interval::empty());
        if (p == 1) return QuantaleElem::interval(Interval::full());
        double a = std::uniform_int_distribution<int>(-20, 20)(rng) * 0.5;
        double w = std::uniform_int_distribution<int>(0, 12)(rng) * 0.5;
        return QuantaleElem::interval(Interval::bounded(a, a + w));
    }
    case QuantaleKind::Product: {
        std::vector<QuantaleElem> items;
        for (const auto& f : q.factors()) items.push_back(random_elem(f, rng));
        return QuantaleElem::tuple(std::move(items));
    }
    case QuantaleKind::Pointwise: {
        std::vector<QuantaleElem> entries;
        for (std::size_t i = 0; i < q.probe_count(); ++i) entries.push_back(random_elem(q.base(), rng));
        return QuantaleElem::table(std::move(entries));
    }
    default: {
        auto n = static_cast<std::uint32_t>(q.cardinality());
        return QuantaleElem::index(std::uniform_int_distribution<std::uint32_t>(0, n - 1)(rng));
    }
    }
}

} // namespace

std::vector<QuantaleElem> sample_elements(const QuantaleDesc& q, std::size_t n, std::uint64_t seed) {
    if (q.is_finite() && q.cardinality() <= n) return elements(q);
    std::mt19937_64 rng(seed);
    std::vector<QuantaleElem> out{bottom(q), zero(q), top(q)};
    while (out.size() < n) out.push_back(random_elem(q, rng));
    out.resize(n);
    return out;
}

// ---------------------------------------------------------------- tabulation

FiniteQuantale::FiniteQuantale(QuantaleDesc desc) : desc_(std::move(desc)) {
    if (!desc_.is_finite()) throw UnsupportedOperation("tabulating an infinite quantale: " + desc_.to_string());
    if (desc_.cardinality() > kMaxSize)
        throw UnsupportedOperation("quantale too large to tabulate: " + desc_.to_string());
    elems_ = elements(desc_);
    std::size_t n = elems_.size();
    plus_.resize(n * n);
    join_.resize(n * n);
    meet_.resize(n * n);
    residual_.resize(n * n);
    leq_.resize(n * n);
    if (desc_.is_heyting()) heyting_.resize(n * n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            std::size_t k = a * n + b;
            plus_[k] = index_of(qlr::plus(desc_, elems_[a], elems_[b]));
            join_[k] = index_of(qlr::join(desc_, elems_[a], elems_[b]));
            meet_[k] = index_of(qlr::meet(desc_, elems_[a], elems_[b]));
            residual_[k] = index_of(qlr::residual(desc_, elems_[a], elems_[b]));
            leq_[k] = qlr::leq(desc_, elems_[a], elems_[b]) ? 1 : 0;
            if (!heyting_.empty()) heyting_[k] = index_of(qlr::heyting_arrow(desc_, elems_[a], elems_[b]));
        }
    zero_ = index_of(qlr::zero(desc_));
    bottom_ = index_of(qlr::bottom(desc_));
    top_ = index_of(qlr::top(desc_));
}

namespace {

std::size_t rank_of(const QuantaleDesc& q, const QuantaleElem& a) {
    if (is_chain_kind(q) || q.kind() == QuantaleKind::PowersetMonoid) return a.as_index();
    std::size_t r = 0;
    if (q.kind() == QuantaleKind::Product) {
        for (std::size_t i = 0; i < q.factors().size(); ++i)
            r = r * q.factors()[i].cardinality() + rank_of(q.factors()[i], a.items()[i]);
    } else {
        std::size_t b = q.base().cardinality();
        for (const auto& e : a.entries()) r = r * b + rank_of(q.base(), e);
    }
    return r;
}

} // namespace

FiniteQuantale::Ix FiniteQuantale::index_of(const QuantaleElem& a) const {
    require_member(desc_, a);
    return static_cast<Ix>(rank_of(desc_, a));
}

FiniteQuantale::Ix FiniteQuantale::heyting(Ix a, Ix b) const {
    if (heyting_.empty()) throw UnsupportedOperation("Heyting arrow on non-Heyting " + desc_.to_string());
    return heyting_[a * size() + b];
}

// ---------------------------------------------------------------- laws

namespace {

struct LawSet {
    LawReport report;
    LawResult *assoc, *comm, *unit, *mono, *distrib, *adj, *heyt, *star, *locale, *integral;

    explicit LawSet(const QuantaleDesc& q) {
        report.subject = "quantale " + q.to_string();
        report.results.reserve(10);
        assoc = &report.add("associativity");
        comm = &report.add("commutativity");
        unit = &report.add("unit");
        mono = &report.add("monotonicity");
        distrib = &report.add("distribution over meets");
        adj = &report.add("residual adjunction");
        heyt = q.is_heyting() ? &report.add("heyting adjunction") : nullptr;
        star = q.declares_star_star() ? &report.add("strict self-arrow property") : nullptr;
        locale = q.is_locale() ? &report.add("locale collapse") : nullptr;
        integral = q.is_integral() ? &report.add("integral unit") : nullptr;
    }
};

} // namespace

LawReport check_quantale_laws(const FiniteQuantale& q) {
    LawSet s(q.desc());
    const QuantaleDesc& d = q.desc();
    using Ix = FiniteQuantale::Ix;
    auto show = [&](std::initializer_list<Ix> xs) {
        std::string out;
        for (Ix x : xs) out += (out.empty() ? "" : ", ") + to_string(d, q.elem(x));
        return out;
    };
    LawTally assoc(*s.assoc), comm(*s.comm), unit(*s.unit), mono(*s.mono), distrib(*s.distrib),
        adj(*s.adj);
    const auto n = static_cast<Ix>(q.size());
    for (Ix a = 0; a < n; ++a) {
        unit.check(q.plus(a, q.zero()) == a, [&] { return show({a}); });
        distrib.check(q.plus(a, q.top()) == q.top(), [&] { return show({a}) + " with the empty meet"; });
        for (Ix b = 0; b < n; ++b) {
            comm.check(q.plus(a, b) == q.plus(b, a), [&] { return show({a, b}); });
            if (s.locale) LawTally(*s.locale).check(q.plus(a, b) == q.join(a, b), [&] { return show({a, b}); });
            if (s.star && q.leq(a, b) && a != b)
                LawTally(*s.star).check(q.leq(b, q.heyting(b, a)), [&] { return show({a, b}); });
            for (Ix c = 0; c < n; ++c) {
                assoc.check(q.plus(q.plus(a, b), c) == q.plus(a, q.plus(b, c)), [&] { return show({a, b, c}); });
                if (q.leq(a, b)) mono.check(q.leq(q.plus(a, c), q.plus(b, c)), [&] { return show({a, b, c}); });
                distrib.check(q.plus(a, q.meet(b, c)) == q.meet(q.plus(a, b), q.plus(a, c)), [&] { return show({a, b, c}); });
                // c plays the candidate d in "d >= a -o b iff d + b >= a"
                adj.check(q.leq(q.residual(a, b), c) == q.leq(a, q.plus(c, b)), [&] { return show({a, b, c}); });
                if (s.heyt)
                    LawTally(*s.heyt).check(q.leq(q.heyting(a, b), c) == q.leq(a, q.join(c, b)), [&] { return show({a, b, c}); });
            }
        }
    }
    if (s.integral) LawTally(*s.integral).check(q.zero() == q.bottom(), "zero is not bottom");
    return s.report;
}

LawReport check_quantale_laws(const QuantaleDesc& q, const std::vector<QuantaleElem>& samples, double tol) {
    if (samples.empty() && q.is_finite() && q.cardinality() <= FiniteQuantale::kMaxSize)
        return check_quantale_laws(FiniteQuantale(q));
    LawSet s(q);
    auto show = [&](std::initializer_list<const QuantaleElem*> xs) {
        std::string out;
        for (const auto* x : xs) out += (out.empty() ? "" : ", ") + to_string(q, *x);
        return out;
    };
    auto eq = [&](const QuantaleElem& a, const QuantaleElem& b) { return equal(q, a, b, tol); };
    auto le = [&](const QuantaleElem& a, const QuantaleElem& b) { return leq(q, a, b, tol); };
    LawTally assoc(*s.assoc), comm(*s.comm), unit(*s.unit), mono(*s.mono), distrib(*s.distrib),
        adj(*s.adj);
    const QuantaleElem z = zero(q), t = top(q);
    for (const auto& a : samples) {
        unit.check(eq(plus(q, a, z), a), [&] { return show({&a}); });
        distrib.check(eq(plus(q, a, t), t), [&] { return show({&a}) + " with the empty meet"; });
        for (const auto& b : samples) {
            comm.check(eq(plus(q, a, b), plus(q, b, a)), [&] { return show({&a, &b}); });
            if (s.locale) LawTally(*s.locale).check(eq(plus(q, a, b), join(q, a, b)), [&] { return show({&a, &b}); });
            if (s.star && le(a, b) && !eq(a, b))
                LawTally(*s.star).check(le(b, heyting_arrow(q, b, a)), [&] { return show({&a, &b}); });
            for (const auto& c : samples) {
                assoc.check(eq(plus(q, plus(q, a, b), c), plus(q, a, plus(q, b, c))), [&] { return show({&a, &b, &c}); });
                if (leq(q, a, b, 0.0)) mono.check(le(plus(q, a, c), plus(q, b, c)), [&] { return show({&a, &b, &c}); });
                distrib.check(eq(plus(q, a, meet(q, b, c)), meet(q, plus(q, a, b), plus(q, a, c))),
                              show({&a, &b, &c}));
                adj.check(le(residual(q, a, b), c) == le(a, plus(q, c, b)), [&] { return show({&a, &b, &c}); });
                if (s.heyt)
                    LawTally(*s.heyt).check(le(heyting_arrow(q, a, b), c) == le(a, join(q, c, b)),
                                            show({&a, &b, &c}));
            }
        }
    }
    if (s.integral) LawTally(*s.integral).check(eq(z, bottom(q)), "zero is not bottom");
    return s.report;
}

} // namespace qlr
