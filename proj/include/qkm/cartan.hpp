#pragma once

#include "qkm/error.hpp"
#include "qkm/qscalar.hpp"
#include "qkm/rational.hpp"

#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace qkm {

// Integral weights in fundamental-weight coordinates; entry i is <H_i, w>.
using Weight = std::vector<long long>;

inline Weight weight_add(const Weight& a, const Weight& b) {
  Weight r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Weight weight_sub(const Weight& a, const Weight& b) {
  Weight r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Weight weight_neg(const Weight& a) {
  Weight r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
  return r;
}

inline std::string weight_string(const Weight& w) {
  std::string s = "[";
  for (size_t i = 0; i < w.size(); ++i) s += (i ? "," : "") + std::to_string(w[i]);
  return s + "]";
}

// Symmetrizable Kac-Moody input data: a generalized Cartan matrix A with its
// minimal positive symmetrizers d, the inverse of A, the Gram matrix of the
// fundamental weights (ω_i, ω_j) = (D A^{-1})_{ij}, and the root-of-q order k.
// A must be invertible; affine data is rejected via SingularCartanMatrix.
class CartanDatum {
 public:
  explicit CartanDatum(std::vector<std::vector<long long>> a, std::string preset = "")
      : a_(std::move(a)), preset_(std::move(preset)) {
    validate_gcm();
    compute_symmetrizers();
    invert_matrix();
    compute_gram_and_k();
    finite_type_ = positive_definite();
  }

  static CartanDatum preset(const std::string& name) {
    if (name == "A1") return CartanDatum({{2}}, name);
    if (name == "A2") return CartanDatum({{2, -1}, {-1, 2}}, name);
    if (name == "A3") return CartanDatum({{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}}, name);
    if (name == "B2") return CartanDatum({{2, -1}, {-2, 2}}, name);
    if (name == "C2") return CartanDatum({{2, -2}, {-1, 2}}, name);
    if (name == "G2") return CartanDatum({{2, -1}, {-3, 2}}, name);
    fail(errc::parse_error, "unknown preset '" + name + "'");
  }

  static const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"A1", "A2", "A3", "B2", "C2", "G2"};
    return names;
  }

  size_t rank() const { return a_.size(); }
  const std::vector<std::vector<long long>>& matrix() const { return a_; }
  long long entry(size_t i, size_t j) const { return a_[i][j]; }
  const std::vector<long long>& symmetrizers() const { return d_; }
  long long d(size_t i) const { return d_[i]; }
  long long k() const { return k_; }
  bool finite_type() const { return finite_type_; }
  const std::string& preset_name() const { return preset_; }

  bool operator==(const CartanDatum& o) const { return a_ == o.a_; }
  bool operator!=(const CartanDatum& o) const { return !(*this == o); }

  void check_rank(const Weight& w) const {
    if (w.size() != rank())
      fail(errc::rank_mismatch, "weight " + weight_string(w) + " has " +
                                    std::to_string(w.size()) + " coordinates, rank is " +
                                    std::to_string(rank()));
  }

  bool dominant(const Weight& w) const {
    check_rank(w);
    for (long long c : w)
      if (c < 0) return false;
    return true;
  }

  // Simple root α_i as a weight: column i of A.
  Weight simple_root(size_t i) const {
    Weight r(rank());
    for (size_t j = 0; j < rank(); ++j) r[j] = a_[j][i];
    return r;
  }

  Weight rho() const { return Weight(rank(), 1); }

  const std::vector<std::vector<Rat>>& gram() const { return gram_; }

  Rat bilinear(const Weight& x, const Weight& y) const {
    check_rank(x);
    check_rank(y);
    Rat s = 0;
    for (size_t i = 0; i < rank(); ++i) {
      if (x[i] == 0) continue;
      Rat row = 0;
      for (size_t j = 0; j < rank(); ++j)
        if (y[j] != 0) row += gram_[i][j] * y[j];
      s += row * x[i];
    }
    return s;
  }

  // (w, α_i) = d_i * <H_i, w>; cheap special case used in coproduct assembly.
  Rat pair_with_root(const Weight& w, size_t i) const { return Rat(d_[i] * w[i]); }

  // q^{e}; e must land in (1/k)Z.
  QScalar q_power(const Rat& e) const { return QScalar::q_power(e, k_); }

  // q^{(w, α_i)}: always an integer power of q.
  QScalar q_root_pairing(const Weight& w, size_t i) const {
    return QScalar::q_power_scaled(d_[i] * w[i] * k_, k_);
  }

  QScalar q_i(size_t i) const { return QScalar::q_power_scaled(d_[i] * k_, k_); }

  // Coordinates of w in the simple-root basis (A^{-1} w), exact.
  std::vector<Rat> root_coords(const Weight& w) const {
    check_rank(w);
    std::vector<Rat> c(rank(), Rat(0));
    for (size_t i = 0; i < rank(); ++i)
      for (size_t j = 0; j < rank(); ++j)
        if (w[j] != 0) c[i] += ainv_[i][j] * w[j];
    return c;
  }

  // If w is a nonnegative integral combination of simple roots, its height.
  std::optional<long long> nonneg_root_height(const Weight& w) const {
    long long h = 0;
    for (const Rat& c : root_coords(w)) {
      if (!rat_is_integer(c) || c < 0) return std::nullopt;
      h += static_cast<long long>(numerator(c));
    }
    return h;
  }

  std::string label() const {
    if (!preset_.empty()) return preset_;
    std::string s = "[";
    for (size_t i = 0; i < rank(); ++i) {
      s += i ? ",[" : "[";
      for (size_t j = 0; j < rank(); ++j) s += (j ? "," : "") + std::to_string(a_[i][j]);
      s += "]";
    }
    return s + "]";
  }

 private:
  void validate_gcm() {
    size_t n = a_.size();
    if (n == 0) fail(errc::not_gcm, "empty matrix");
    for (size_t i = 0; i < n; ++i) {
      if (a_[i].size() != n) fail(errc::not_gcm, "matrix is not square");
      if (a_[i][i] != 2) fail(errc::not_gcm, "diagonal entry not 2 at index " + std::to_string(i));
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (a_[i][j] > 0)
          fail(errc::not_gcm, "positive off-diagonal entry at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
        if ((a_[i][j] == 0) != (a_[j][i] == 0))
          fail(errc::not_gcm, "zero pattern not symmetric at (" + std::to_string(i) + "," +
                                  std::to_string(j) + ")");
      }
    }
  }

  // Minimal positive integers d with d_i a_ij = d_j a_ji, found by propagating
  // ratios over each connected component of the Dynkin graph.
  void compute_symmetrizers() {
    size_t n = rank();
    std::vector<Rat> ratio(n, Rat(0));
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (size_t s = 0; s < n; ++s) {
      if (comp[s] >= 0) continue;
      int c = ncomp++;
      comp[s] = c;
      ratio[s] = 1;
      std::vector<size_t> stack = {s};
      while (!stack.empty()) {
        size_t i = stack.back();
        stack.pop_back();
        for (size_t j = 0; j < n; ++j) {
          if (i == j || a_[i][j] == 0) continue;
          Rat rj = ratio[i] * a_[i][j] / a_[j][i];
          if (comp[j] < 0) {
            comp[j] = c;
            ratio[j] = rj;
            stack.push_back(j);
          } else if (ratio[j] != rj) {
            fail(errc::not_symmetrizable, "no positive symmetrizers exist");
          }
        }
      }
    }
    // Scale each component to minimal positive integers.
    d_.assign(n, 1);
    for (int c = 0; c < ncomp; ++c) {
      Int l = 1;
      for (size_t i = 0; i < n; ++i)
        if (comp[i] == c) l = int_lcm(l, denominator(ratio[i]));
      Int g = 0;
      for (size_t i = 0; i < n; ++i)
        if (comp[i] == c) g = int_gcd(g, Int(numerator(ratio[i]) * l / denominator(ratio[i])));
      for (size_t i = 0; i < n; ++i)
        if (comp[i] == c)
          d_[i] = static_cast<long long>(Int(numerator(ratio[i]) * l / denominator(ratio[i]) / g));
    }
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (d_[i] * a_[i][j] != d_[j] * a_[j][i])
          fail(errc::not_symmetrizable, "no positive symmetrizers exist");
  }

  void invert_matrix() {
    size_t n = rank();
    std::vector<std::vector<Rat>> m(n, std::vector<Rat>(2 * n, Rat(0)));
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) m[i][j] = a_[i][j];
      m[i][n + i] = 1;
    }
    for (size_t col = 0; col < n; ++col) {
      size_t piv = col;
      while (piv < n && m[piv][col] == 0) ++piv;
      if (piv == n) fail(errc::singular_cartan_matrix, "Cartan matrix is not invertible");
      std::swap(m[col], m[piv]);
      Rat p = m[col][col];
      for (size_t j = 0; j < 2 * n; ++j) m[col][j] /= p;
      for (size_t i = 0; i < n; ++i) {
        if (i == col || m[i][col] == 0) continue;
        Rat f = m[i][col];
        for (size_t j = 0; j < 2 * n; ++j) m[i][j] -= f * m[col][j];
      }
    }
    ainv_.assign(n, std::vector<Rat>(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) ainv_[i][j] = m[i][n + j];
  }

  void compute_gram_and_k() {
    size_t n = rank();
    gram_.assign(n, std::vector<Rat>(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) gram_[i][j] = ainv_[i][j] * d_[i];
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j)
        if (gram_[i][j] != gram_[j][i]) fail(errc::internal, "Gram matrix not symmetric");
    Int l = 1;
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) l = int_lcm(l, denominator(gram_[i][j]));
    k_ = 2 * static_cast<long long>(l);
  }

  // DA positive definite (Sylvester on the symmetrized matrix) <=> finite type.
  bool positive_definite() const {
    size_t n = rank();
    std::vector<std::vector<Rat>> s(n, std::vector<Rat>(n));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) s[i][j] = Rat(d_[i] * a_[i][j]);
    for (size_t m = 1; m <= n; ++m) {
      std::vector<std::vector<Rat>> sub(m, std::vector<Rat>(m));
      for (size_t i = 0; i < m; ++i)
        for (size_t j = 0; j < m; ++j) sub[i][j] = s[i][j];
      Rat det = 1;
      for (size_t col = 0; col < m; ++col) {
        size_t piv = col;
        while (piv < m && sub[piv][col] == 0) ++piv;
        if (piv == m) return false;
        if (piv != col) {
          std::swap(sub[col], sub[piv]);
          det = -det;
        }
        det *= sub[col][col];
        for (size_t i = col + 1; i < m; ++i) {
          if (sub[i][col] == 0) continue;
          Rat f = sub[i][col] / sub[col][col];
          for (size_t j = col; j < m; ++j) sub[i][j] -= f * sub[col][j];
        }
      }
      if (det <= 0) return false;
    }
    return true;
  }

  std::vector<std::vector<long long>> a_;
  std::string preset_;
  std::vector<long long> d_;
  std::vector<std::vector<Rat>> ainv_;
  std::vector<std::vector<Rat>> gram_;
  long long k_ = 2;
  bool finite_type_ = false;
};

}  // namespace qkm
