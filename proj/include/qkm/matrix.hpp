#pragma once

#include "qkm/error.hpp"
#include "qkm/modular.hpp"
#include "qkm/qscalar.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>
#include <utility>
#include <vector>

namespace qkm {

// Dense matrix over QScalar.  The sizes in play are weight-space blocks, so
// everything stays simple and exact.
class QMatrix {
 public:
  QMatrix() : rows_(0), cols_(0) {}
  QMatrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols) {}

  static QMatrix identity(size_t n) {
    QMatrix m(n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = QScalar::one();
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }

  QScalar& at(size_t r, size_t c) { return a_[r * cols_ + c]; }
  const QScalar& at(size_t r, size_t c) const { return a_[r * cols_ + c]; }

  bool operator==(const QMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (size_t i = 0; i < a_.size(); ++i)
      if (a_[i] != o.a_[i]) return false;
    return true;
  }
  bool operator!=(const QMatrix& o) const { return !(*this == o); }

  bool is_zero() const {
    for (const auto& x : a_)
      if (!x.is_zero()) return false;
    return true;
  }

  QMatrix operator+(const QMatrix& o) const {
    check_same_shape(o);
    QMatrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] + o.a_[i];
    return r;
  }

  QMatrix operator-(const QMatrix& o) const {
    check_same_shape(o);
    QMatrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] - o.a_[i];
    return r;
  }

  QMatrix operator*(const QMatrix& o) const {
    if (cols_ != o.rows_) fail(errc::internal, "matrix shape mismatch in product");
    QMatrix r(rows_, o.cols_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t t = 0; t < cols_; ++t) {
        const QScalar& x = at(i, t);
        if (x.is_zero()) continue;
        for (size_t j = 0; j < o.cols_; ++j) {
          const QScalar& y = o.at(t, j);
          if (!y.is_zero()) r.at(i, j) += x * y;
        }
      }
    return r;
  }

  QMatrix scaled(const QScalar& c) const {
    QMatrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i] * c;
    return r;
  }

  // Entrywise bar automorphism.
  QMatrix bar() const {
    QMatrix r(rows_, cols_);
    for (size_t i = 0; i < a_.size(); ++i) r.a_[i] = a_[i].bar();
    return r;
  }

  QMatrix transposed() const {
    QMatrix r(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
  }

  std::vector<QScalar> apply(const std::vector<QScalar>& v) const {
    if (v.size() != cols_) fail(errc::internal, "matrix/vector shape mismatch");
    std::vector<QScalar> r(rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j)
        if (!at(i, j).is_zero() && !v[j].is_zero()) r[i] += at(i, j) * v[j];
    return r;
  }

  std::vector<QScalar> column(size_t c) const {
    std::vector<QScalar> v(rows_);
    for (size_t i = 0; i < rows_; ++i) v[i] = at(i, c);
    return v;
  }

  void set_column(size_t c, const std::vector<QScalar>& v) {
    if (v.size() != rows_) fail(errc::internal, "column shape mismatch");
    for (size_t i = 0; i < rows_; ++i) at(i, c) = v[i];
  }

  static QMatrix from_columns(size_t rows, const std::vector<std::vector<QScalar>>& cols) {
    QMatrix m(rows, cols.size());
    for (size_t c = 0; c < cols.size(); ++c) m.set_column(c, cols[c]);
    return m;
  }

  size_t rank() const;

  QMatrix inverse() const {
    if (rows_ != cols_) fail(errc::internal, "inverse of non-square matrix");
    size_t n = rows_;
    QMatrix m(*this);
    QMatrix inv = identity(n);
    for (size_t col = 0; col < n; ++col) {
      size_t best = n;
      size_t best_sz = 0;
      for (size_t i = col; i < n; ++i) {
        if (m.at(i, col).is_zero()) continue;
        size_t sz = m.at(i, col).support_size();
        if (best == n || sz < best_sz) best = i, best_sz = sz;
      }
      if (best == n) fail(errc::internal, "singular matrix in inverse");
      m.swap_rows(col, best);
      inv.swap_rows(col, best);
      QScalar p = m.at(col, col).inverse();
      m.scale_row(col, p);
      inv.scale_row(col, p);
      for (size_t i = 0; i < n; ++i) {
        if (i == col || m.at(i, col).is_zero()) continue;
        QScalar f = m.at(i, col);
        m.sub_scaled_row(i, col, f);
        inv.sub_scaled_row(i, col, f);
      }
    }
    return inv;
  }

 private:
  void check_same_shape(const QMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(errc::internal, "matrix shape mismatch");
  }

  void swap_rows(size_t i, size_t j) {
    if (i == j) return;
    for (size_t c = 0; c < cols_; ++c) std::swap(at(i, c), at(j, c));
  }

  void scale_row(size_t i, const QScalar& f) {
    for (size_t c = 0; c < cols_; ++c)
      if (!at(i, c).is_zero()) at(i, c) *= f;
  }

  void sub_scaled_row(size_t i, size_t j, const QScalar& f) {
    for (size_t c = 0; c < cols_; ++c)
      if (!at(j, c).is_zero()) at(i, c) -= f * at(j, c);
  }

  size_t rows_, cols_;
  std::vector<QScalar> a_;
};

// Reduced row echelon form.  Pivot columns come out in increasing order, so
// they are exactly the lexicographically greedy independent column set; a
// non-pivot column's entries in the pivot rows express it in terms of the
// earlier pivot columns of the original matrix.
struct RrefResult {
  QMatrix r;
  std::vector<size_t> pivot_cols;
  std::vector<long long> pivot_row_of_col;  // -1 for free columns
};

namespace detail {

// Fraction-free reduction: each row is scaled to integer-coefficient Laurent
// entries up front (row scaling leaves the reduced form unchanged), then a
// Bareiss-style Gauss-Jordan runs over Z[x] where every update divides
// exactly by the previous pivot, keeping entries minor-sized with no rational
// normalization anywhere in the loop.  Rows already holding a pivot keep one
// uniform scale because the update applies to them too (with a one-term
// rescale wherever the current pivot row is zero), so dividing each pivot row
// by its own final pivot value at the end — one scalar reduction per
// surviving entry — yields the canonical reduced form.  The reduced form and
// the pivot columns do not depend on pivot-row choices, so callers see the
// same result a fraction-field elimination produces.
inline RrefResult bareiss_rref(const QMatrix& in) {
  RrefResult out;
  size_t m = in.rows(), n = in.cols();
  out.pivot_row_of_col.assign(n, -1);
  long long K = 1;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) K = std::lcm(K, in.at(i, j).k());
  std::vector<std::vector<detail::IPoly>> w(m, std::vector<detail::IPoly>(n));
  for (size_t i = 0; i < m; ++i) {
    Laurent l = Laurent::one();
    std::vector<QScalar> row(n);
    for (size_t j = 0; j < n; ++j) {
      row[j] = in.at(i, j).promoted(K);
      const Laurent& d = row[j].den();
      if (!d.is_one()) l = Laurent::exact_div(l * d, Laurent::gcd(l, d));
    }
    QScalar clear = QScalar::from_laurent(l, K);
    std::vector<Laurent> cleared(n);
    Int L = 1;
    for (size_t j = 0; j < n; ++j) {
      QScalar v = row[j] * clear;
      if (!v.is_laurent()) fail(errc::internal, "denominator clearing failed");
      cleared[j] = v.num();
      for (const auto& [e, c] : cleared[j].terms()) L = int_lcm(L, denominator(c));
    }
    Int g = 0;
    for (size_t j = 0; j < n; ++j) {
      w[i][j].reserve(cleared[j].support_size());
      for (const auto& [e, c] : cleared[j].terms()) {
        Int ic = numerator(c) * (L / denominator(c));
        if (g != 1) g = int_gcd(g, ic);
        w[i][j].emplace_back(e, std::move(ic));
      }
    }
    if (g > 1)
      for (size_t j = 0; j < n; ++j)
        for (auto& [e, c] : w[i][j]) c /= g;
  }
  size_t row = 0;
  detail::IPoly prev{{0, Int(1)}};
  for (size_t col = 0; col < n && row < m; ++col) {
    size_t best = m;
    size_t best_sz = 0;
    for (size_t i = row; i < m; ++i) {
      if (w[i][col].empty()) continue;
      size_t sz = w[i][col].size();
      if (best == m || sz < best_sz) best = i, best_sz = sz;
    }
    if (best == m) continue;
    if (best != row) std::swap(w[best], w[row]);
    const detail::IPoly piv = w[row][col];
    const bool trivial_prev = prev.size() == 1 && prev[0].first == 0 && prev[0].second == 1;
    for (size_t i = 0; i < m; ++i) {
      if (i == row) continue;
      const detail::IPoly f = std::move(w[i][col]);
      w[i][col].clear();
      for (size_t j = 0; j < n; ++j) {
        if (j == col) continue;
        detail::IPoly& mij = w[i][j];
        const detail::IPoly& rj = w[row][j];
        if (f.empty() || rj.empty()) {
          if (mij.empty()) continue;
          mij = detail::ipoly_mul(piv, mij);
        } else if (mij.empty()) {
          mij = detail::ipoly_mul(f, rj);
          for (auto& [e, c] : mij) c = -c;
        } else {
          mij = detail::ipoly_combine(detail::ipoly_mul(piv, mij), Int(1),
                                      detail::ipoly_mul(f, rj), Int(1), 0);
        }
        if (!trivial_prev) mij = detail::ipoly_exact_div(std::move(mij), prev);
      }
    }
    out.pivot_row_of_col[col] = static_cast<long long>(row);
    out.pivot_cols.push_back(col);
    prev = piv;
    ++row;
  }
  auto as_scalar = [&](const detail::IPoly& p) {
    std::vector<Laurent::Term> terms;
    terms.reserve(p.size());
    for (const auto& [e, c] : p) terms.emplace_back(e, Rat(c));
    return QScalar::from_laurent(Laurent::from_terms(std::move(terms)), K);
  };
  QMatrix red(m, n);
  for (size_t t = 0; t < out.pivot_cols.size(); ++t) {
    const size_t ct = out.pivot_cols[t];
    const QScalar pinv = as_scalar(w[t][ct]).inverse();
    red.at(t, ct) = QScalar::one();
    for (size_t j = ct + 1; j < n; ++j)
      if (!w[t][j].empty()) red.at(t, j) = as_scalar(w[t][j]) * pinv;
  }
  out.r = std::move(red);
  return out;
}

// Reconstruct-and-certify reduction for large matrices.  The matrix is
// evaluated at random points over a 62-bit prime field, where elimination is
// cheap; the evaluations pin down the pivot columns and sample the reduced
// entries, which are recovered as rational functions by Cauchy interpolation
// and lifted back to rational coefficients (more primes are drawn only when a
// coefficient exceeds the single-prime lift bound).  The candidate is then
// certified exactly: a reduced-shape basis whose span provably contains every
// original row, together with one evaluation witnessing rank >= pivot count,
// is the reduced form, which is unique.  Any failure returns nullopt and the
// caller recomputes with the fraction-free elimination, so randomness only
// ever affects running time.
struct RrefReconstructor {
  static constexpr size_t kSpots = 8;
  static constexpr size_t kMaxPrimes = 3;

  const QMatrix& in;
  size_t m, n;
  long long K = 1;
  long long lo = 0, hi = 0;
  // Per entry: numerator/denominator terms, exponents on the common root
  // scale, coefficients rational.
  std::vector<std::vector<std::pair<long long, Rat>>> numt, dent;

  std::vector<size_t> pivots, frees;
  bool have_pattern = false;

  struct PrimeCtx {
    Fp f;
    bool ready = false;
    // Residue form of every entry: (power-table index, coefficient mod p).
    std::vector<std::vector<std::pair<size_t, u64>>> numr, denr;
    std::vector<u64> xs, sx;             // interpolation and spot points
    std::vector<std::vector<u64>> vals;  // per point, flattened r*|frees| values
    std::vector<u64> seen_hash;
    NewtonCtx newton;
  };
  std::vector<PrimeCtx> pc;

  explicit RrefReconstructor(const QMatrix& a) : in(a), m(a.rows()), n(a.cols()) {}

  bool prepare() {
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) K = std::lcm(K, in.at(i, j).k());
    numt.resize(m * n);
    dent.resize(m * n);
    bool any = false;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < n; ++j) {
        const QScalar& v = in.at(i, j);
        const long long s = K / v.k();
        auto& nt = numt[i * n + j];
        auto& dt = dent[i * n + j];
        for (const auto& [e, c] : v.num().terms()) nt.emplace_back(e * s, c);
        for (const auto& [e, c] : v.den().terms()) dt.emplace_back(e * s, c);
        for (const auto& [e, c] : nt) {
          if (!any) lo = hi = e, any = true;
          lo = std::min(lo, e), hi = std::max(hi, e);
        }
        for (const auto& [e, c] : dt) lo = std::min(lo, e), hi = std::max(hi, e);
      }
    return hi - lo <= 60000;
  }

  // Evaluate every entry at x = t; false when a denominator vanishes there.
  bool eval_matrix(PrimeCtx& ctx, u64 t, std::vector<u64>& pw, std::vector<u64>& v) const {
    const Fp& f = ctx.f;
    const size_t width = static_cast<size_t>(hi - lo + 1);
    pw.resize(width);
    u64 base = lo >= 0 ? f.pow(t, static_cast<u64>(lo)) : f.pow(f.inv(t), static_cast<u64>(-lo));
    for (size_t i = 0; i < width; ++i) {
      pw[i] = base;
      base = f.mul(base, t);
    }
    v.assign(m * n, 0);
    for (size_t s = 0; s < m * n; ++s) {
      u64 nv = 0, dv = 0;
      for (const auto& [idx, c] : ctx.numr[s]) nv = f.add(nv, f.mul(c, pw[idx]));
      for (const auto& [idx, c] : ctx.denr[s]) dv = f.add(dv, f.mul(c, pw[idx]));
      if (dv == 0) return false;
      v[s] = nv == 0 ? 0 : f.mul(nv, f.inv(dv));
    }
    return true;
  }

  // In-place Gauss-Jordan over F_p; returns pivot columns and leaves the
  // reduced rows in v.
  std::vector<size_t> eliminate(const Fp& f, std::vector<u64>& v) const {
    std::vector<size_t> piv;
    size_t row = 0;
    for (size_t col = 0; col < n && row < m; ++col) {
      size_t found = m;
      for (size_t i = row; i < m; ++i)
        if (v[i * n + col] != 0) {
          found = i;
          break;
        }
      if (found == m) continue;
      if (found != row)
        for (size_t j = 0; j < n; ++j) std::swap(v[row * n + j], v[found * n + j]);
      const u64 pi = f.inv(v[row * n + col]);
      v[row * n + col] = 1;
      for (size_t j = col + 1; j < n; ++j) v[row * n + j] = f.mul(v[row * n + j], pi);
      for (size_t i = 0; i < m; ++i) {
        if (i == row || v[i * n + col] == 0) continue;
        const u64 c = v[i * n + col];
        v[i * n + col] = 0;
        for (size_t j = col + 1; j < n; ++j)
          v[i * n + j] = f.sub(v[i * n + j], f.mul(c, v[row * n + j]));
      }
      piv.push_back(col);
      ++row;
    }
    return piv;
  }

  // True when `a` should replace `b` as the consensus pattern: evaluation can
  // only lose pivots, so more pivots — or earlier ones at equal count — is
  // closer to the exact pattern.
  static bool better_pattern(const std::vector<size_t>& a, const std::vector<size_t>& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }

  bool ensure_prime(size_t pi, size_t npoints) {
    if (pc.size() <= pi) pc.resize(pi + 1);
    PrimeCtx& ctx = pc[pi];
    if (ctx.ready && ctx.xs.size() == npoints) return true;
    ctx = PrimeCtx{};
    ctx.f = Fp{kModPrimes[pi]};
    const Fp& f = ctx.f;
    ctx.numr.resize(m * n);
    ctx.denr.resize(m * n);
    for (size_t s = 0; s < m * n; ++s) {
      for (const auto& [e, c] : numt[s]) {
        auto r = rat_mod_p(c, f);
        if (!r) return false;  // prime divides a coefficient denominator
        if (*r != 0) ctx.numr[s].emplace_back(static_cast<size_t>(e - lo), *r);
      }
      for (const auto& [e, c] : dent[s]) {
        auto r = rat_mod_p(c, f);
        if (!r) return false;
        if (*r != 0) ctx.denr[s].emplace_back(static_cast<size_t>(e - lo), *r);
      }
    }
    u64 seed = 0x5bd1e995u ^ (static_cast<u64>(m) << 32) ^ n ^ (static_cast<u64>(pi) << 48);
    std::unordered_set<u64> used;
    std::vector<size_t> pattern;
    bool have_local = false;
    std::vector<u64> pw, v;
    const size_t want = npoints + kSpots;
    size_t draws = 0;
    const size_t max_draws = 4 * want + 64;
    std::vector<u64> pts;
    std::vector<std::vector<u64>> vals;
    while (pts.size() < want && draws < max_draws) {
      ++draws;
      const u64 t = 2 + splitmix(seed) % (f.p - 3);
      if (!used.insert(t).second) continue;
      if (!eval_matrix(ctx, t, pw, v)) continue;
      std::vector<size_t> pat = eliminate(f, v);
      if (!have_local || better_pattern(pat, pattern)) {
        pattern = pat;
        have_local = true;
        pts.clear();
        vals.clear();
      }
      if (pat != pattern) continue;
      std::vector<u64> fv;
      fv.reserve(pattern.size() * (n - pattern.size()));
      std::vector<char> is_piv(n, 0);
      for (size_t c : pattern) is_piv[c] = 1;
      for (size_t t2 = 0; t2 < pattern.size(); ++t2)
        for (size_t j = 0; j < n; ++j)
          if (!is_piv[j]) fv.push_back(v[t2 * n + j]);
      pts.push_back(t);
      vals.push_back(std::move(fv));
    }
    if (pts.size() < want) return false;
    if (!have_pattern) {
      pivots = pattern;
      frees.clear();
      std::vector<char> is_piv(n, 0);
      for (size_t c : pivots) is_piv[c] = 1;
      for (size_t j = 0; j < n; ++j)
        if (!is_piv[j]) frees.push_back(j);
      have_pattern = true;
    } else if (pattern != pivots) {
      return false;  // primes disagree on the pattern: let the exact path decide
    }
    ctx.xs.assign(pts.begin(), pts.begin() + npoints);
    ctx.sx.assign(pts.begin() + npoints, pts.end());
    ctx.vals = std::move(vals);
    ctx.newton.build(f, ctx.xs);
    ctx.ready = true;
    return true;
  }

  // Lift one reconstructed slot through however many primes it takes.
  // Returns nullopt for "raise the point count", throws nothing; sets *abort
  // for unrecoverable disagreements.
  std::optional<QScalar> lift_slot(size_t slot, size_t npoints, bool* abort) {
    std::vector<FpRatFn> per_prime;
    std::vector<Fp> fields;
    for (size_t pi = 0; pi < kMaxPrimes; ++pi) {
      if (!ensure_prime(pi, npoints)) {
        *abort = true;
        return std::nullopt;
      }
      PrimeCtx& ctx = pc[pi];
      std::vector<u64> ys(npoints), sy(kSpots);
      for (size_t i = 0; i < npoints; ++i) ys[i] = ctx.vals[i][slot];
      for (size_t i = 0; i < kSpots; ++i) sy[i] = ctx.vals[npoints + i][slot];
      bool zero = true;
      for (u64 y : ys) zero = zero && y == 0;
      for (u64 y : sy) zero = zero && y == 0;
      if (zero) {
        if (pi == 0) return QScalar::zero();
        *abort = true;  // primes disagree about vanishing
        return std::nullopt;
      }
      auto rf = reconstruct_ratfn(ctx.newton, ys, ctx.sx, sy);
      if (!rf) return std::nullopt;  // degrees exceed this point budget
      if (pi > 0 && (rf->num.size() != per_prime[0].num.size() ||
                     rf->den.size() != per_prime[0].den.size())) {
        *abort = true;
        return std::nullopt;
      }
      per_prime.push_back(std::move(*rf));
      fields.push_back(ctx.f);
      auto lift_poly = [&](auto member) -> std::optional<Laurent> {
        const FpPoly& shape = per_prime[0].*member;
        std::vector<Laurent::Term> terms;
        std::vector<u64> residues(per_prime.size());
        for (size_t d = shape.size(); d-- > 0;) {
          for (size_t q = 0; q < per_prime.size(); ++q) residues[q] = (per_prime[q].*member)[d];
          auto c = lift_rational(residues, fields);
          if (!c) return std::nullopt;
          if (!c->is_zero()) terms.emplace_back(static_cast<long long>(d), std::move(*c));
        }
        return Laurent::from_terms(std::move(terms));
      };
      auto ln = lift_poly(&FpRatFn::num);
      if (!ln) continue;  // coefficient too large for these primes: add one
      auto ld = lift_poly(&FpRatFn::den);
      if (!ld) continue;
      if (ld->is_zero()) {
        *abort = true;
        return std::nullopt;
      }
      return QScalar::from_laurent(std::move(*ln), K) / QScalar::from_laurent(std::move(*ld), K);
    }
    *abort = true;  // persistent lift failure even with all primes
    return std::nullopt;
  }

  std::optional<RrefResult> run() {
    if (!prepare()) return std::nullopt;
    for (size_t npoints : {96u, 224u, 512u}) {
      if (!ensure_prime(0, npoints)) return std::nullopt;
      const size_t r = pivots.size();
      QMatrix red(m, n);
      for (size_t t = 0; t < r; ++t) red.at(t, pivots[t]) = QScalar::one();
      bool need_more = false, abort = false;
      for (size_t t = 0; t < r && !need_more && !abort; ++t)
        for (size_t u = 0; u < frees.size() && !need_more && !abort; ++u) {
          auto val = lift_slot(t * frees.size() + u, npoints, &abort);
          if (!val) {
            need_more = true;
            continue;
          }
          // The exact reduced form has zeros left of each pivot.
          if (frees[u] < pivots[t] && !val->is_zero()) return std::nullopt;
          red.at(t, frees[u]) = std::move(*val);
        }
      if (abort) return std::nullopt;
      if (need_more) continue;
      if (!certify(red)) return std::nullopt;
      RrefResult out;
      out.r = std::move(red);
      out.pivot_cols = pivots;
      out.pivot_row_of_col.assign(n, -1);
      for (size_t t = 0; t < r; ++t) out.pivot_row_of_col[pivots[t]] = static_cast<long long>(t);
      return out;
    }
    return std::nullopt;
  }

  // Exact certificate: every original row must be reproduced by its
  // pivot-column coordinates applied to the candidate rows.  Combined with
  // the shape of `red` and the rank witness from the evaluations, this forces
  // `red` to be the reduced form of `in`.
  bool certify(const QMatrix& red) const {
    const size_t r = pivots.size();
    for (size_t i = 0; i < m; ++i) {
      for (size_t u = 0; u < frees.size(); ++u) {
        const size_t j = frees[u];
        QScalar rhs;
        for (size_t t = 0; t < r; ++t) {
          const QScalar& c = in.at(i, pivots[t]);
          const QScalar& x = red.at(t, j);
          if (!c.is_zero() && !x.is_zero()) rhs += c * x;
        }
        if (rhs != in.at(i, j)) return false;
      }
    }
    return true;
  }
};

}  // namespace detail

// Reduced row echelon form: a reconstruct-and-certify fast path for large
// inputs with an exact fraction-free elimination as both the small-matrix
// route and the fallback.  Both compute the same canonical object, so the
// choice is invisible to callers.
inline RrefResult rref(const QMatrix& in) {
  if (in.rows() >= 8 && in.cols() >= 8) {
    detail::RrefReconstructor rec(in);
    if (auto fast = rec.run()) return std::move(*fast);
  }
  return detail::bareiss_rref(in);
}

inline size_t QMatrix::rank() const { return rref(*this).pivot_cols.size(); }

struct LinearSolveOutcome {
  bool consistent = true;
  size_t nullity = 0;
  std::vector<QScalar> particular;  // one solution when consistent (free vars = 0)
};

inline LinearSolveOutcome solve_linear_system(const QMatrix& A, const std::vector<QScalar>& b) {
  size_t m = A.rows(), n = A.cols();
  if (b.size() != m) fail(errc::internal, "solve shape mismatch");
  QMatrix w(m, n + 1);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < n; ++j) w.at(i, j) = A.at(i, j);
    w.at(i, n) = b[i];
  }
  RrefResult rr = rref(w);
  LinearSolveOutcome out;
  out.particular.assign(n, QScalar::zero());
  size_t npiv = 0;
  for (size_t col = 0; col < n; ++col)
    if (rr.pivot_row_of_col[col] >= 0) {
      out.particular[col] = rr.r.at(static_cast<size_t>(rr.pivot_row_of_col[col]), n);
      ++npiv;
    }
  out.consistent = rr.pivot_row_of_col[n] < 0;
  out.nullity = n - npiv;
  return out;
}

// Solve A * X = B where A has full column rank; any failure is a programming
// error at the call sites, hence InternalError.
inline QMatrix solve_columns(const QMatrix& A, const QMatrix& B) {
  size_t m = A.rows(), r = A.cols(), c = B.cols();
  if (B.rows() != m) fail(errc::internal, "solve shape mismatch");
  QMatrix w(m, r + c);
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = 0; j < r; ++j) w.at(i, j) = A.at(i, j);
    for (size_t j = 0; j < c; ++j) w.at(i, r + j) = B.at(i, j);
  }
  RrefResult rr = rref(w);
  for (size_t j = 0; j < r; ++j)
    if (rr.pivot_row_of_col[j] < 0) fail(errc::internal, "solve_columns: rank-deficient matrix");
  for (size_t j = 0; j < c; ++j)
    if (rr.pivot_row_of_col[r + j] >= 0) fail(errc::internal, "solve_columns: inconsistent system");
  QMatrix x(r, c);
  for (size_t j = 0; j < r; ++j) {
    size_t pr = static_cast<size_t>(rr.pivot_row_of_col[j]);
    for (size_t t = 0; t < c; ++t) x.at(j, t) = rr.r.at(pr, r + t);
  }
  return x;
}

// Fraction-free null-space computation.  Rows are cleared of denominators
// (kernel unchanged), then Bareiss elimination runs on Laurent entries with
// exact divisions only; pivot rows are chosen by least term support.
// Returns columns spanning ker(M).
inline std::vector<std::vector<QScalar>> kernel_columns(const QMatrix& M) {
  size_t m = M.rows(), n = M.cols();
  long long K = 1;
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < n; ++j) K = std::lcm(K, M.at(i, j).k());
  std::vector<std::vector<Laurent>> w(m, std::vector<Laurent>(n));
  for (size_t i = 0; i < m; ++i) {
    Laurent l = Laurent::one();
    std::vector<QScalar> row(n);
    for (size_t j = 0; j < n; ++j) {
      row[j] = M.at(i, j).promoted(K);
      const Laurent& d = row[j].den();
      if (!d.is_one()) l = Laurent::exact_div(l * d, Laurent::gcd(l, d));
    }
    QScalar clear = QScalar::from_laurent(l, K);
    for (size_t j = 0; j < n; ++j) {
      QScalar v = row[j] * clear;
      if (!v.is_laurent()) fail(errc::internal, "denominator clearing failed");
      w[i][j] = v.num();
    }
  }
  std::vector<bool> row_used(m, false);
  std::vector<long long> pivot_row_of_col(n, -1);
  std::vector<size_t> pivot_cols;
  Laurent prev_piv = Laurent::one();
  for (size_t col = 0; col < n; ++col) {
    size_t best = m;
    size_t best_sz = 0;
    for (size_t i = 0; i < m; ++i) {
      if (row_used[i] || w[i][col].is_zero()) continue;
      size_t sz = w[i][col].support_size();
      if (best == m || sz < best_sz) best = i, best_sz = sz;
    }
    if (best == m) continue;
    const Laurent piv = w[best][col];
    for (size_t i = 0; i < m; ++i) {
      if (i == best || row_used[i]) continue;
      for (size_t j = col + 1; j < n; ++j)
        w[i][j] = Laurent::exact_div(piv * w[i][j] - w[i][col] * w[best][j], prev_piv);
      w[i][col] = Laurent();
    }
    row_used[best] = true;
    pivot_row_of_col[col] = static_cast<long long>(best);
    pivot_cols.push_back(col);
    prev_piv = piv;
  }
  auto as_scalar = [&](const Laurent& l) { return QScalar::from_laurent(l, K); };
  std::vector<std::vector<QScalar>> out;
  for (size_t f = 0; f < n; ++f) {
    if (pivot_row_of_col[f] >= 0) continue;
    std::vector<QScalar> x(n, QScalar::zero());
    x[f] = QScalar::one();
    for (auto it = pivot_cols.rbegin(); it != pivot_cols.rend(); ++it) {
      size_t pc = *it;
      size_t pr = static_cast<size_t>(pivot_row_of_col[pc]);
      QScalar s;
      for (size_t j = pc + 1; j < n; ++j)
        if (!w[pr][j].is_zero() && !x[j].is_zero()) s += as_scalar(w[pr][j]) * x[j];
      x[pc] = -(s / as_scalar(w[pr][pc]));
    }
    out.push_back(std::move(x));
  }
  return out;
}

// Reduced column echelon form of `stacked`, scanning rows top-down; the same
// column operations are mirrored onto `carried` (same column count; may have
// zero rows).  Columns are reordered by pivot row ascending.  Requires the
// stacked columns to be independent.
inline void rcef_columns(QMatrix& stacked, QMatrix& carried) {
  size_t rows = stacked.rows(), ncols = stacked.cols();
  if (carried.cols() != ncols) fail(errc::internal, "rcef column mismatch");
  std::vector<long long> pivot_of_col(ncols, -1);
  size_t done = 0;
  for (size_t rr = 0; rr < rows && done < ncols; ++rr) {
    size_t pc = ncols;
    for (size_t c = 0; c < ncols; ++c)
      if (pivot_of_col[c] < 0 && !stacked.at(rr, c).is_zero()) {
        pc = c;
        break;
      }
    if (pc == ncols) continue;
    QScalar inv = stacked.at(rr, pc).inverse();
    for (size_t r = 0; r < rows; ++r)
      if (!stacked.at(r, pc).is_zero()) stacked.at(r, pc) *= inv;
    for (size_t r = 0; r < carried.rows(); ++r)
      if (!carried.at(r, pc).is_zero()) carried.at(r, pc) *= inv;
    for (size_t c = 0; c < ncols; ++c) {
      if (c == pc || stacked.at(rr, c).is_zero()) continue;
      QScalar f = stacked.at(rr, c);
      for (size_t r = 0; r < rows; ++r)
        if (!stacked.at(r, pc).is_zero()) stacked.at(r, c) -= f * stacked.at(r, pc);
      for (size_t r = 0; r < carried.rows(); ++r)
        if (!carried.at(r, pc).is_zero()) carried.at(r, c) -= f * carried.at(r, pc);
    }
    pivot_of_col[pc] = static_cast<long long>(rr);
    ++done;
  }
  if (done != ncols) fail(errc::internal, "rcef on dependent columns");
  std::vector<size_t> order(ncols);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return pivot_of_col[a] < pivot_of_col[b]; });
  QMatrix s2(stacked.rows(), ncols), c2(carried.rows(), ncols);
  for (size_t c = 0; c < ncols; ++c) {
    s2.set_column(c, stacked.column(order[c]));
    c2.set_column(c, carried.column(order[c]));
  }
  stacked = std::move(s2);
  carried = std::move(c2);
}

}  // namespace qkm
