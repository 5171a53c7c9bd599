#pragma once

#include "qkm/error.hpp"
#include "qkm/laurent.hpp"
#include "qkm/rational.hpp"

#include <cctype>
#include <numeric>
#include <string>
#include <utility>

namespace qkm {

// Exact scalar field: rational functions in q^{1/k} with rational
// coefficients.  Exponents are stored as integer multiples of 1/k.
//
// Canonical form (maintained after every operation):
//   * zero is 0/1,
//   * num and den are coprime,
//   * den has lowest exponent 0 and leading coefficient 1,
// so structural equality of promoted operands is field equality.
class QScalar {
 public:
  QScalar() : k_(1), num_(), den_(Laurent::one()) {}

  explicit QScalar(long long n) : k_(1), num_(Laurent::constant(Rat(n))), den_(Laurent::one()) {}

  explicit QScalar(const Rat& c) : k_(1), num_(Laurent::constant(c)), den_(Laurent::one()) {}

  static QScalar zero() { return QScalar(); }
  static QScalar one() { return QScalar(1); }

  // q^{e_scaled/k}.
  static QScalar q_power_scaled(long long e_scaled, long long k) {
    QScalar s;
    s.k_ = k;
    s.num_ = Laurent::monomial(e_scaled, Rat(1));
    s.den_ = Laurent::one();
    return s;
  }

  // A Laurent polynomial in q^{1/k} viewed as a scalar.
  static QScalar from_laurent(Laurent p, long long k) {
    QScalar s;
    s.k_ = k;
    s.num_ = std::move(p);
    s.den_ = Laurent::one();
    return s;
  }

  // q^{e} for rational e; demands e in (1/k)Z.
  static QScalar q_power(const Rat& e, long long k) {
    Rat scaled = e * k;
    if (!rat_is_integer(scaled))
      fail(errc::exponent_not_in_lattice,
           "q exponent " + rat_string(e) + " not a multiple of 1/" + std::to_string(k));
    return q_power_scaled(static_cast<long long>(numerator(scaled)), k);
  }

  // [n]_{q^d} = (q^{dn} - q^{-dn}) / (q^d - q^{-d}), as its Laurent expansion.
  static QScalar quantum_integer(long long n, long long d) {
    if (n < 0) return -quantum_integer(-n, d);
    QScalar s;
    if (n == 0) return s;
    Laurent p;
    for (long long j = 0; j < n; ++j) p = p + Laurent::monomial(d * (n - 1 - 2 * j), Rat(1));
    s.num_ = p;
    s.den_ = Laurent::one();
    return s;
  }

  static QScalar quantum_factorial(long long n, long long d) {
    QScalar r = one();
    for (long long j = 2; j <= n; ++j) r = r * quantum_integer(j, d);
    return r;
  }

  // Gaussian binomial [n choose m]_{q^d}; exact division of factorials.
  static QScalar quantum_binomial(long long n, long long m, long long d) {
    if (m < 0 || m > n) return zero();
    return quantum_factorial(n, d) / (quantum_factorial(m, d) * quantum_factorial(n - m, d));
  }

  long long k() const { return k_; }
  const Laurent& num() const { return num_; }
  const Laurent& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_.is_one() && den_.is_one(); }
  bool is_laurent() const { return den_.is_one(); }

  size_t support_size() const { return num_.support_size() + den_.support_size(); }

  QScalar promoted(long long K) const {
    if (K == k_) return *this;
    if (K % k_ != 0) fail(errc::internal, "bad exponent-scale promotion");
    QScalar r;
    r.k_ = K;
    long long m = K / k_;
    r.num_ = num_.stretched(m);
    r.den_ = den_.stretched(m);
    return r;
  }

  friend QScalar operator+(const QScalar& a, const QScalar& b) {
    auto [x, y] = QScalar::aligned(a, b);
    return QScalar::make(x.num_ * y.den_ + y.num_ * x.den_, x.den_ * y.den_, x.k_);
  }

  friend QScalar operator-(const QScalar& a, const QScalar& b) {
    auto [x, y] = QScalar::aligned(a, b);
    return QScalar::make(x.num_ * y.den_ - y.num_ * x.den_, x.den_ * y.den_, x.k_);
  }

  friend QScalar operator*(const QScalar& a, const QScalar& b) {
    if (a.is_zero() || b.is_zero()) return QScalar();
    auto [x, y] = QScalar::aligned(a, b);
    return QScalar::make(x.num_ * y.num_, x.den_ * y.den_, x.k_);
  }

  friend QScalar operator/(const QScalar& a, const QScalar& b) {
    if (b.is_zero()) fail(errc::internal, "scalar division by zero");
    if (a.is_zero()) return QScalar();
    auto [x, y] = QScalar::aligned(a, b);
    return QScalar::make(x.num_ * y.den_, x.den_ * y.num_, x.k_);
  }

  QScalar operator-() const {
    QScalar r(*this);
    r.num_ = -r.num_;
    return r;
  }

  QScalar& operator+=(const QScalar& o) { return *this = *this + o; }
  QScalar& operator-=(const QScalar& o) { return *this = *this - o; }
  QScalar& operator*=(const QScalar& o) { return *this = *this * o; }
  QScalar& operator/=(const QScalar& o) { return *this = *this / o; }

  QScalar inverse() const {
    if (is_zero()) fail(errc::internal, "scalar division by zero");
    return QScalar::make(den_, num_, k_);
  }

  QScalar pow(long long p) const {
    if (p < 0) return inverse().pow(-p);
    QScalar r = one(), b = *this;
    while (p > 0) {
      if (p & 1) r = r * b;
      b = (p >>= 1) ? b * b : b;
    }
    return r;
  }

  // The bar automorphism q^{1/k} -> q^{-1/k}.
  QScalar bar() const { return QScalar::make(num_.bar(), den_.bar(), k_); }

  friend bool operator==(const QScalar& a, const QScalar& b) {
    auto [x, y] = QScalar::aligned(a, b);
    return x.num_ == y.num_ && x.den_ == y.den_;
  }
  friend bool operator!=(const QScalar& a, const QScalar& b) { return !(a == b); }

  std::string canonical_string() const {
    if (is_zero()) return "0";
    std::string ns = poly_string(num_, k_);
    if (den_.is_one()) return ns;
    if (num_.support_size() > 1) ns = "(" + ns + ")";
    return ns + "/(" + poly_string(den_, k_) + ")";
  }

  static QScalar parse(const std::string& text, long long k);

 private:
  // Rebuild canonical form from an arbitrary num/den pair.
  static QScalar make(Laurent num, Laurent den, long long k) {
    QScalar r;
    r.k_ = k;
    if (den.is_zero()) fail(errc::internal, "scalar with zero denominator");
    if (num.is_zero()) {
      r.den_ = Laurent::one();
      return r;
    }
    if (!den.is_monomial()) {
      Laurent g = Laurent::gcd(num, den);
      if (!g.is_one()) {
        num = Laurent::exact_div(num, g);
        den = Laurent::exact_div(den, g);
      }
    }
    // Shift den to lowest exponent 0 and make it monic; num absorbs both.
    long long sh = den.low();
    Rat lead = den.leading();
    r.num_ = num.scaled_shifted(Rat(1) / lead, -sh);
    r.den_ = den.scaled_shifted(Rat(1) / lead, -sh);
    return r;
  }

  static std::pair<QScalar, QScalar> aligned(const QScalar& a, const QScalar& b) {
    if (a.k_ == b.k_) return {a, b};
    long long K = std::lcm(a.k_, b.k_);
    return {a.promoted(K), b.promoted(K)};
  }

  static std::string exponent_string(long long e_scaled, long long k) {
    long long g = std::gcd(e_scaled < 0 ? -e_scaled : e_scaled, k);
    if (g == 0) g = 1;
    long long p = e_scaled / g, r = k / g;
    if (r == 1) return std::to_string(p);
    return std::to_string(p) + "/" + std::to_string(r);
  }

  static std::string poly_string(const Laurent& p, long long k) {
    std::string out;
    bool first = true;
    for (const auto& [e, c] : p.terms()) {
      bool neg = c < 0;
      Rat mag = neg ? Rat(-c) : c;
      std::string body;
      if (e == 0) {
        body = rat_string(mag);
      } else {
        std::string qp = (e == k) ? "q" : "q^{" + exponent_string(e, k) + "}";
        body = (mag == 1) ? qp : rat_string(mag) + "*" + qp;
      }
      if (first) {
        out = (neg ? "-" : "") + body;
        first = false;
      } else {
        out += (neg ? " - " : " + ") + body;
      }
    }
    return out;
  }

  long long k_;
  Laurent num_, den_;
};

namespace detail {

// Recursive-descent parser for the canonical_string grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('-'|'+')* primary
//   primary:= INT | 'q' ('^' exponent)? | '(' expr ')'
//   exponent := '{' INT ('/' INT)? '}' | INT   (signed)
class ScalarParser {
 public:
  ScalarParser(const std::string& s, long long k) : s_(s), k_(k) {}

  QScalar run() {
    QScalar v = expr();
    skip_ws();
    if (pos_ != s_.size()) fail(errc::parse_error, "trailing characters in scalar: " + s_);
    return v.promoted(std::lcm(v.k(), k_));
  }

 private:
  QScalar expr() {
    QScalar v = term();
    while (true) {
      skip_ws();
      if (peek() == '+') {
        ++pos_;
        v = v + term();
      } else if (peek() == '-') {
        ++pos_;
        v = v - term();
      } else {
        return v;
      }
    }
  }

  QScalar term() {
    QScalar v = unary();
    while (true) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        v = v * unary();
      } else if (peek() == '/') {
        ++pos_;
        v = v / unary();
      } else {
        return v;
      }
    }
  }

  QScalar unary() {
    skip_ws();
    bool neg = false;
    while (peek() == '-' || peek() == '+') {
      if (peek() == '-') neg = !neg;
      ++pos_;
      skip_ws();
    }
    QScalar v = primary();
    return neg ? -v : v;
  }

  QScalar primary() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      ++pos_;
      QScalar v = expr();
      expect(')');
      return v;
    }
    if (c == 'q') {
      ++pos_;
      skip_ws();
      if (peek() != '^') return QScalar::q_power_scaled(k_, k_);
      ++pos_;
      auto [p, r] = exponent();
      long long num = k_ * p;
      if (num % r != 0)
        fail(errc::exponent_not_in_lattice, "exponent " + std::to_string(p) + "/" +
                                                std::to_string(r) + " not a multiple of 1/" +
                                                std::to_string(k_));
      return QScalar::q_power_scaled(num / r, k_);
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return QScalar(Rat(Int(integer_digits())));
    fail(errc::parse_error, "unexpected character in scalar: " + s_);
  }

  std::pair<long long, long long> exponent() {
    skip_ws();
    bool braced = peek() == '{';
    if (braced) ++pos_;
    long long p = signed_int();
    long long r = 1;
    skip_ws();
    if (braced && peek() == '/') {
      ++pos_;
      r = signed_int();
      if (r <= 0) fail(errc::parse_error, "exponent denominator must be positive");
    }
    if (braced) expect('}');
    return {p, r};
  }

  long long signed_int() {
    skip_ws();
    bool neg = false;
    while (peek() == '-' || peek() == '+') {
      if (peek() == '-') neg = !neg;
      ++pos_;
    }
    std::string d = integer_digits();
    long long v = std::stoll(d);
    return neg ? -v : v;
  }

  std::string integer_digits() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) fail(errc::parse_error, "expected digits in scalar: " + s_);
    return s_.substr(start, pos_ - start);
  }

  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void expect(char c) {
    skip_ws();
    if (peek() != c) fail(errc::parse_error, std::string("expected '") + c + "' in scalar: " + s_);
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  const std::string& s_;
  long long k_;
  size_t pos_ = 0;
};

}  // namespace detail

inline QScalar QScalar::parse(const std::string& text, long long k) {
  return detail::ScalarParser(text, k).run();
}

}  // namespace qkm
