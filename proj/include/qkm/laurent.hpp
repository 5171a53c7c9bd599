#pragma once

#include "qkm/error.hpp"
#include "qkm/rational.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace qkm {

namespace detail {

// Integer-coefficient Laurent polynomial: exponents descending, no zero
// coefficients.  Used wherever elimination or gcd work can stay over Z[x]
// instead of paying rational normalization on every coefficient operation.
using ITerm = std::pair<long long, Int>;
using IPoly = std::vector<ITerm>;

// a*ca - b*cb*x^sh as a sparse merge.
inline IPoly ipoly_combine(const IPoly& a, const Int& ca, const IPoly& b, const Int& cb,
                           long long sh) {
  IPoly r;
  r.reserve(a.size() + b.size());
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    long long ea = a[i].first, eb = b[j].first + sh;
    if (ea > eb) {
      r.emplace_back(ea, a[i++].second * ca);
    } else if (ea < eb) {
      r.emplace_back(eb, -(b[j++].second * cb));
    } else {
      Int c = a[i++].second * ca - b[j++].second * cb;
      if (c != 0) r.emplace_back(ea, std::move(c));
    }
  }
  for (; i < a.size(); ++i) r.emplace_back(a[i].first, a[i].second * ca);
  for (; j < b.size(); ++j) r.emplace_back(b[j].first + sh, -(b[j].second * cb));
  return r;
}

inline IPoly ipoly_mul(const IPoly& a, const IPoly& b) {
  if (a.empty() || b.empty()) return {};
  if (a.size() == 1) {
    IPoly r;
    r.reserve(b.size());
    for (const auto& [e, c] : b) r.emplace_back(e + a[0].first, c * a[0].second);
    return r;
  }
  if (b.size() == 1) return ipoly_mul(b, a);
  std::map<long long, Int> acc;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) acc[ea + eb] += ca * cb;
  IPoly r;
  r.reserve(acc.size());
  for (auto it = acc.rbegin(); it != acc.rend(); ++it)
    if (it->second != 0) r.emplace_back(it->first, std::move(it->second));
  return r;
}

// Exact division with integer quotient coefficients demanded; x-powers are
// units, so quotient exponents may be any integers.
inline IPoly ipoly_exact_div(IPoly a, const IPoly& b) {
  if (b.empty()) fail(errc::internal, "integer Laurent division by zero");
  if (a.empty()) return a;
  if (b.size() == 1) {
    const Int& d = b[0].second;
    IPoly r;
    r.reserve(a.size());
    for (auto& [e, c] : a) {
      if (c % d != 0) fail(errc::internal, "inexact integer Laurent division");
      r.emplace_back(e - b[0].first, Int(c / d));
    }
    return r;
  }
  const Int& lb = b.front().second;
  const long long eb = b.front().first;
  // An exact quotient spans at most span(a) - span(b) + 1 terms.
  long long guard =
      (a.front().first - a.back().first) - (b.front().first - b.back().first) + 1;
  IPoly quo;
  while (!a.empty()) {
    if (--guard < 0 || a.front().second % lb != 0)
      fail(errc::internal, "inexact integer Laurent division");
    Int qc(a.front().second / lb);
    long long qe = a.front().first - eb;
    a = ipoly_combine(a, Int(1), b, qc, qe);
    quo.emplace_back(qe, std::move(qc));
  }
  return quo;
}

}  // namespace detail

// Laurent polynomial over Q in one variable x, exponents are plain integers.
// Terms are kept sorted by exponent descending with no zero coefficients;
// every routine below preserves that normal form.
class Laurent {
 public:
  using Term = std::pair<long long, Rat>;

  Laurent() = default;

  static Laurent zero() { return Laurent(); }

  static Laurent constant(const Rat& c) {
    Laurent p;
    if (c != 0) p.t_.emplace_back(0, c);
    return p;
  }

  static Laurent one() { return constant(Rat(1)); }

  static Laurent monomial(long long e, const Rat& c) {
    Laurent p;
    if (c != 0) p.t_.emplace_back(e, c);
    return p;
  }

  // Assemble from terms already in normal form (exponents strictly
  // descending, no zero coefficients).
  static Laurent from_terms(std::vector<Term> terms) {
    for (size_t t = 0; t < terms.size(); ++t)
      if (terms[t].second == 0 || (t > 0 && terms[t - 1].first <= terms[t].first))
        fail(errc::internal, "Laurent terms not in normal form");
    Laurent p;
    p.t_ = std::move(terms);
    return p;
  }

  const std::vector<Term>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  bool is_one() const { return t_.size() == 1 && t_[0].first == 0 && t_[0].second == 1; }

  bool is_monomial() const { return t_.size() == 1; }

  // Highest / lowest exponent; only meaningful on nonzero polynomials.
  long long high() const { return t_.front().first; }
  long long low() const { return t_.back().first; }
  const Rat& leading() const { return t_.front().second; }

  size_t support_size() const { return t_.size(); }

  bool operator==(const Laurent& o) const { return t_ == o.t_; }
  bool operator!=(const Laurent& o) const { return t_ != o.t_; }

  Laurent operator-() const {
    Laurent r(*this);
    for (auto& [e, c] : r.t_) c = -c;
    return r;
  }

  Laurent operator+(const Laurent& o) const {
    Laurent r;
    r.t_.reserve(t_.size() + o.t_.size());
    size_t i = 0, j = 0;
    while (i < t_.size() && j < o.t_.size()) {
      if (t_[i].first > o.t_[j].first) {
        r.t_.push_back(t_[i++]);
      } else if (t_[i].first < o.t_[j].first) {
        r.t_.push_back(o.t_[j++]);
      } else {
        Rat c = t_[i].second + o.t_[j].second;
        if (c != 0) r.t_.emplace_back(t_[i].first, c);
        ++i, ++j;
      }
    }
    for (; i < t_.size(); ++i) r.t_.push_back(t_[i]);
    for (; j < o.t_.size(); ++j) r.t_.push_back(o.t_[j]);
    return r;
  }

  Laurent operator-(const Laurent& o) const { return *this + (-o); }

  Laurent operator*(const Laurent& o) const {
    if (is_zero() || o.is_zero()) return Laurent();
    if (is_monomial()) return o.scaled_shifted(t_[0].second, t_[0].first);
    if (o.is_monomial()) return scaled_shifted(o.t_[0].second, o.t_[0].first);
    std::map<long long, Rat> acc;
    for (const auto& [ea, ca] : t_)
      for (const auto& [eb, cb] : o.t_) acc[ea + eb] += ca * cb;
    Laurent r;
    r.t_.reserve(acc.size());
    for (auto it = acc.rbegin(); it != acc.rend(); ++it)
      if (it->second != 0) r.t_.emplace_back(it->first, it->second);
    return r;
  }

  Laurent scaled(const Rat& c) const { return scaled_shifted(c, 0); }
  Laurent shifted(long long e) const { return scaled_shifted(Rat(1), e); }

  Laurent scaled_shifted(const Rat& c, long long e) const {
    Laurent r;
    if (c == 0) return r;
    r.t_.reserve(t_.size());
    for (const auto& [ee, cc] : t_) r.t_.emplace_back(ee + e, cc * c);
    return r;
  }

  // x -> x^{-1}; exponent order reverses.
  Laurent bar() const {
    Laurent r;
    r.t_.reserve(t_.size());
    for (auto it = t_.rbegin(); it != t_.rend(); ++it) r.t_.emplace_back(-it->first, it->second);
    return r;
  }

  // Substitute x -> x^m, m > 0 (exponent rescale; used for k promotion).
  Laurent stretched(long long m) const {
    Laurent r;
    r.t_.reserve(t_.size());
    for (const auto& [e, c] : t_) r.t_.emplace_back(e * m, c);
    return r;
  }

  // Long division by the leading term, valid whenever divisor != 0: ends with
  // rem = 0 or high(rem) < high(b).  Each step cancels the leading term, so
  // high(rem) strictly drops and the loop terminates.
  static void divmod(const Laurent& a, const Laurent& b, Laurent& quo, Laurent& rem) {
    if (b.is_zero()) fail(errc::internal, "Laurent division by zero");
    quo = Laurent();
    rem = a;
    while (!rem.is_zero() && rem.high() >= b.high()) {
      Laurent m = Laurent::monomial(rem.high() - b.high(), rem.leading() / b.leading());
      quo = quo + m;
      rem = rem - b * m;
    }
  }

  // Exact division in the Laurent ring: a = q * b with zero remainder
  // demanded.  Powers of x are units, so divide shifted copies and shift back.
  static Laurent exact_div(const Laurent& a, const Laurent& b) {
    if (a.is_zero()) return Laurent();
    if (b.is_zero()) fail(errc::internal, "Laurent division by zero");
    if (b.is_monomial()) return a.scaled_shifted(Rat(1) / b.leading(), -b.low());
    Laurent quo, rem;
    divmod(a.shifted(-a.low()), b.shifted(-b.low()), quo, rem);
    if (!rem.is_zero()) fail(errc::internal, "inexact Laurent division");
    return quo.shifted(a.low() - b.low());
  }

  // Monic gcd with lowest exponent 0.  gcd(0,0) = 0.  Runs a primitive
  // remainder sequence over integer coefficients: denominators are cleared up
  // front and every pseudo-remainder is stripped back to its primitive part,
  // so coefficient sizes stay near the subresultant bound instead of squaring
  // at each step the way a rational-coefficient Euclid does.
  static Laurent gcd(const Laurent& a, const Laurent& b) {
    if (a.is_zero()) return make_primitive(b);
    if (b.is_zero()) return make_primitive(a);
    if (a.is_monomial() || b.is_monomial()) return one();  // monomials are units
    IPoly x = int_form(a);
    IPoly y = int_form(b);
    if (x.front().first < y.front().first) std::swap(x, y);
    while (!y.empty() && y.front().first > 0) {
      IPoly r = pseudo_rem(std::move(x), y);
      x = std::move(y);
      y = int_reduce(std::move(r));
    }
    if (!y.empty()) return one();  // remainder chain hit a unit
    Laurent g;
    const Rat lead(x.front().second);
    g.t_.reserve(x.size());
    for (const auto& [e, c] : x) g.t_.emplace_back(e, Rat(c) / lead);
    return g;
  }

 private:
  using ITerm = detail::ITerm;
  using IPoly = detail::IPoly;

  static Laurent make_primitive(const Laurent& p) {
    if (p.is_zero()) return p;
    return p.scaled_shifted(Rat(1) / p.leading(), -p.low());
  }

  // Pseudo-remainder: each pass multiplies through by the divisor's leading
  // coefficient before cancelling, so no rational arithmetic appears.
  static IPoly pseudo_rem(IPoly r, const IPoly& y) {
    const Int& d = y.front().second;
    const long long dy = y.front().first;
    while (!r.empty() && r.front().first >= dy) {
      const Int lr = r.front().second;
      const long long sh = r.front().first - dy;
      r = detail::ipoly_combine(r, d, y, lr, sh);
    }
    return r;
  }

  // Shift the low exponent to 0 (x is a unit) and divide out integer content.
  static IPoly int_reduce(IPoly r) {
    if (r.empty()) return r;
    const long long low = r.back().first;
    if (low != 0)
      for (auto& [e, c] : r) e -= low;
    Int g = 0;
    for (const auto& [e, c] : r) {
      g = int_gcd(g, c);
      if (g == 1) break;
    }
    if (g != 1)
      for (auto& [e, c] : r) c /= g;
    return r;
  }

  static IPoly int_form(const Laurent& p) {
    Int L = 1;
    for (const auto& [e, c] : p.t_) L = int_lcm(L, denominator(c));
    IPoly r;
    r.reserve(p.t_.size());
    for (const auto& [e, c] : p.t_) r.emplace_back(e, Int(numerator(c) * (L / denominator(c))));
    return int_reduce(std::move(r));
  }

  std::vector<Term> t_;
};

}  // namespace qkm
