#pragma once

#include "qkm/laurent.hpp"

#include <cstdint>
#include <optional>
#include <vector>

// Arithmetic modulo fixed 62-bit primes plus the reconstruction toolkit the
// linear-algebra fast path is built on: dense Newton interpolation through
// sampled values and Cauchy recovery of a rational function via the extended
// Euclidean algorithm.  Everything recovered here is re-verified exactly by
// the caller, so a wrong answer out of this file costs time, never
// correctness.

namespace qkm {
namespace detail {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

// Primes just below 2^62, largest first.
inline constexpr u64 kModPrimes[8] = {
    4611686018427387847ULL, 4611686018427387817ULL, 4611686018427387787ULL,
    4611686018427387761ULL, 4611686018427387751ULL, 4611686018427387737ULL,
    4611686018427387733ULL, 4611686018427387709ULL,
};

struct Fp {
  u64 p = 0;
  u64 add(u64 a, u64 b) const {
    const u64 s = a + b;
    return s >= p ? s - p : s;
  }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + (p - b); }
  u64 mul(u64 a, u64 b) const { return (u64)((u128)a * b % p); }
  u64 pow(u64 a, u64 e) const {
    u64 r = 1;
    a %= p;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }
  u64 inv(u64 a) const { return pow(a, p - 2); }
};

inline u64 splitmix(u64& s) {
  u64 z = (s += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline u64 int_mod_p(const Int& a, const Fp& f) {
  Int r = a % Int(f.p);
  if (r < 0) r += Int(f.p);
  return r.convert_to<u64>();
}

// Nullopt when the denominator vanishes mod p (the prime is unusable for
// this value).
inline std::optional<u64> rat_mod_p(const Rat& a, const Fp& f) {
  const u64 d = int_mod_p(denominator(a), f);
  if (d == 0) return std::nullopt;
  return f.mul(int_mod_p(numerator(a), f), f.inv(d));
}

// Coefficients ascending by degree, no trailing zeros; empty = zero.
using FpPoly = std::vector<u64>;

inline void fp_trim(FpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline u64 fp_eval(const FpPoly& a, u64 x, const Fp& f) {
  u64 r = 0;
  for (size_t i = a.size(); i-- > 0;) r = f.add(f.mul(r, x), a[i]);
  return r;
}

inline FpPoly fp_mul(const FpPoly& a, const FpPoly& b, const Fp& f) {
  if (a.empty() || b.empty()) return {};
  FpPoly out(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j)
      out[i + j] = f.add(out[i + j], f.mul(a[i], b[j]));
  }
  fp_trim(out);
  return out;
}

// a -= c * x^sh * b
inline void fp_submul(FpPoly& a, const FpPoly& b, u64 c, size_t sh, const Fp& f) {
  if (c == 0 || b.empty()) return;
  if (a.size() < b.size() + sh) a.resize(b.size() + sh, 0);
  for (size_t j = 0; j < b.size(); ++j)
    a[j + sh] = f.sub(a[j + sh], f.mul(c, b[j]));
  fp_trim(a);
}

// Shared per-(point set, prime) interpolation tables: pairwise-difference
// inverses for the divided-difference pass and the master polynomial
// prod (x - xs[i]) for the Euclidean stage.
struct NewtonCtx {
  Fp f;
  std::vector<u64> xs;
  std::vector<std::vector<u64>> inv_diff;  // [k][i] = 1/(xs[i] - xs[i-k])
  FpPoly master;

  void build(const Fp& field, std::vector<u64> pts) {
    f = field;
    xs = std::move(pts);
    const size_t n = xs.size();
    inv_diff.assign(n, {});
    for (size_t k = 1; k < n; ++k) {
      inv_diff[k].assign(n, 0);
      for (size_t i = k; i < n; ++i)
        inv_diff[k][i] = f.inv(f.sub(xs[i], xs[i - k]));
    }
    master.assign(1, 1);
    for (size_t i = 0; i < n; ++i) {
      // master *= (x - xs[i])
      FpPoly next(master.size() + 1, 0);
      for (size_t j = 0; j < master.size(); ++j) {
        next[j + 1] = f.add(next[j + 1], master[j]);
        next[j] = f.sub(next[j], f.mul(xs[i], master[j]));
      }
      master = std::move(next);
    }
    fp_trim(master);
  }

  // Monomial coefficients of the unique interpolant through (xs, ys).
  FpPoly interpolate(const std::vector<u64>& ys) const {
    const size_t n = xs.size();
    std::vector<u64> dd = ys;
    for (size_t k = 1; k < n; ++k)
      for (size_t i = n; i-- > k;)
        dd[i] = f.mul(f.sub(dd[i], dd[i - 1]), inv_diff[k][i]);
    FpPoly poly;
    for (size_t i = n; i-- > 0;) {
      // poly = poly * (x - xs[i]) + dd[i]
      FpPoly next(poly.size() + 1, 0);
      for (size_t j = 0; j < poly.size(); ++j) {
        next[j + 1] = f.add(next[j + 1], poly[j]);
        next[j] = f.sub(next[j], f.mul(xs[i], poly[j]));
      }
      if (next.empty()) next.assign(1, 0);
      next[0] = f.add(next[0], dd[i]);
      poly = std::move(next);
      fp_trim(poly);
    }
    return poly;
  }
};

struct FpRatFn {
  FpPoly num, den;  // den monic
};

// Cauchy reconstruction: walk the Euclidean sequence of (master, interpolant)
// and accept the first row whose num/den fits the degree budget and matches
// every spot sample.  The true function (if its degrees fit) appears as such
// a row; near-certainly no other row survives eight fresh evaluations.
inline std::optional<FpRatFn> reconstruct_ratfn(const NewtonCtx& ctx,
                                                const std::vector<u64>& ys,
                                                const std::vector<u64>& spot_x,
                                                const std::vector<u64>& spot_y) {
  const Fp& f = ctx.f;
  const size_t n = ctx.xs.size();
  FpPoly r0 = ctx.master, r1 = ctx.interpolate(ys);
  FpPoly v0, v1 = {1};
  while (!r1.empty()) {
    if (!v1.empty() && r1.size() + v1.size() <= n) {
      bool ok = true;
      for (size_t s = 0; s < spot_x.size() && ok; ++s) {
        const u64 dv = fp_eval(v1, spot_x[s], f);
        ok = dv != 0 && fp_eval(r1, spot_x[s], f) == f.mul(spot_y[s], dv);
      }
      if (ok) {
        const u64 il = f.inv(v1.back());
        FpRatFn out{r1, v1};
        for (u64& c : out.num) c = f.mul(c, il);
        for (u64& c : out.den) c = f.mul(c, il);
        return out;
      }
    }
    // (r0, r1) <- (r1, r0 mod r1), tracking v
    const u64 il = f.inv(r1.back());
    FpPoly rem = r0, vq = v0;
    while (rem.size() >= r1.size()) {
      const u64 c = f.mul(rem.back(), il);
      const size_t sh = rem.size() - r1.size();
      fp_submul(rem, r1, c, sh, f);
      fp_submul(vq, v1, c, sh, f);
    }
    r0 = std::move(r1);
    r1 = std::move(rem);
    v0 = std::move(v1);
    v1 = std::move(vq);
  }
  return std::nullopt;
}

// Residues (one per field) -> the unique small rational congruent to all of
// them: CRT to a single residue mod the product, then a half-extended Euclid
// stopped at the sqrt(P/2) bound.
inline std::optional<Rat> lift_rational(const std::vector<u64>& residues,
                                        const std::vector<Fp>& fields) {
  Int P(fields[0].p);
  Int C(residues[0]);
  for (size_t i = 1; i < fields.size(); ++i) {
    const Int pi(fields[i].p);
    Int delta = (Int(residues[i]) - C) % pi;
    if (delta < 0) delta += pi;
    const u64 minv = fields[i].inv(int_mod_p(P, fields[i]));
    C += P * ((delta * Int(minv)) % pi);
    P *= pi;
  }
  if (C == 0) return Rat(0);
  const Int B = boost::multiprecision::sqrt(Int(P / 2));
  Int r0 = P, r1 = C, t0 = 0, t1 = 1;
  while (r1 > B) {
    const Int q = r0 / r1;
    Int r2 = r0 - q * r1;
    Int t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  Int num = r1, den = t1;
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (den > B || int_gcd(num < 0 ? Int(-num) : num, den) != 1) return std::nullopt;
  return Rat(num) / Rat(den);
}

}  // namespace detail
}  // namespace qkm
