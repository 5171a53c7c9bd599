#pragma once

#include "qkm/theta.hpp"

#include <string>

namespace qkm {

// Per-block linear operator on a tensor product, tagged with how it was
// obtained.  Both derivations must agree; neither is ever defined in terms
// of the other.
struct RMatrixOperator {
  std::string provenance;  // "half-twist" | "oracle"
  std::vector<QMatrix> mats;
};

// Everything needed to apply the twisted bar machinery to a module: the bar
// operator itself plus, for tensor carriers, the generation bookkeeping the
// summand decomposition came from.
struct BarBundle {
  BarOperator bar;
  std::shared_ptr<Generation> gen;  // null for irreducible carriers
};

// Choice hooks for the independence check: rescale the bar fixed at each
// irreducible top, and tamper with singular bases during generation.
struct BarChoices {
  std::function<QScalar(const Rep&)> top_scale;  // may return 1
  SingularModifier singular_mod;
};

inline BarBundle make_bar(const Rep& rep, const BarChoices* choices = nullptr) {
  BarBundle out;
  if (rep.kind == RepKind::irreducible) {
    QScalar f = choices && choices->top_scale ? choices->top_scale(rep) : QScalar::one();
    out.bar = f.is_one() ? bar_irrep(rep) : bar_irrep_scaled(rep, f);
    return out;
  }
  BarBundle bl = make_bar(*rep.left, choices);
  BarBundle br = make_bar(*rep.right, choices);
  SingularModifier mod = choices ? choices->singular_mod : SingularModifier{};
  out.gen = std::make_shared<Generation>(generate(rep, mod));
  out.bar = bar_tensor(rep, bl.bar, br.bar, *out.gen, br.gen.get());
  return out;
}

// R = (Theta_L^{-1} (x) Theta_R^{-1}) o Theta_T.  The two semilinear factors
// compose to a linear operator: M = M_fact * bar(M_T) per block.
inline RMatrixOperator half_twist_r(const Rep& T, const BarBundle& bL, const BarBundle& bR,
                                    const Generation& gen) {
  BarOperator barT = bar_tensor(T, bL.bar, bR.bar, gen, bR.gen.get());
  ThetaOperator thT = theta_op(T, barT);
  ThetaOperator thL = theta_op(*T.left, bL.bar);
  ThetaOperator thR = theta_op(*T.right, bR.bar);
  RMatrixOperator R;
  R.provenance = "half-twist";
  for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
    QMatrix fact = factorwise_matrix(T, tb, thL.inv_mats, thR.inv_mats);
    R.mats.push_back(fact * thT.mats[tb].bar());
  }
  return R;
}

// Recompute with explicit choices at every level (used by the
// choice-independence check); null means the defaults everywhere.
inline RMatrixOperator half_twist_r(const Rep& T, const BarChoices* choices) {
  BarBundle bL = make_bar(*T.left, choices);
  BarBundle bR = make_bar(*T.right, choices);
  SingularModifier mod = choices ? choices->singular_mod : SingularModifier{};
  Generation gen = generate(T, mod);
  return half_twist_r(T, bL, bR, gen);
}

inline RMatrixOperator half_twist_r(const Rep& T) { return half_twist_r(T, nullptr); }

// sigma = Flip o R, a map from blocks of T = V (x) W to the equal-weight
// blocks of Tflip = W (x) V.
inline std::vector<QMatrix> braiding_mats(const Rep& T, const Rep& Tflip,
                                          const RMatrixOperator& R) {
  std::vector<QMatrix> out;
  for (size_t tb = 0; tb < T.blocks.size(); ++tb)
    out.push_back(flip_matrix(T, Tflip, tb) * R.mats[tb]);
  return out;
}

// ---------------------------------------------------------------------------
// Independent derivation: the unique weight-preserving operator of triangular
// shape (diagonal q^{(wt b, wt c)}, strictly-lower part moving right weights
// down the positive root cone) intertwining the two coproducts.  Solved block
// by block in decreasing weight order from the E-intertwining equations
//   R_{nu+alpha_i} * DeltaE_i = DeltaE_i^op * R_nu,
// one column at a time; per-column uniqueness is certified by a zero-nullity
// check.  F-intertwining is then verified wherever it can be evaluated.
// NoSolution / NonUniqueSolution always indicate a bug somewhere upstream.

inline RMatrixOperator oracle_r(const Rep& T) {
  if (T.kind != RepKind::tensor) fail(errc::internal, "oracle needs a tensor module");
  const CartanDatum& cd = T.datum;
  const size_t r = cd.rank();
  RMatrixOperator R;
  R.provenance = "oracle";
  R.mats.resize(T.blocks.size());

  for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
    const Block& blk = T.blocks[tb];
    const size_t d = blk.dim;
    QMatrix M(d, d);
    std::vector<QScalar> diag(d);
    std::vector<Weight> rw(d), lw(d);
    for (size_t p = 0; p < d; ++p) {
      rw[p] = T.right->blocks[blk.pairs[p].right_block].weight;
      lw[p] = T.left->blocks[blk.pairs[p].left_block].weight;
      diag[p] = cd.q_power(cd.bilinear(lw[p], rw[p]));
      M.at(p, p) = diag[p];
    }

    // Stack the E-equations: A * x_col = rhs_col with A = [DeltaE_i^op]_i.
    std::vector<QMatrix> ops, lhs;
    size_t rows = 0;
    for (size_t i = 0; i < r; ++i) {
      auto up = T.block_at(weight_add(blk.weight, cd.simple_root(i)));
      if (!up) continue;
      std::optional<QMatrix> de = T.e_mats[i][tb];
      std::optional<QMatrix> dop = opposite_e(T, i, tb);
      if (!de || !dop) fail(errc::internal, "coproduct matrix missing below the top");
      ops.push_back(std::move(*dop));
      lhs.push_back(R.mats[*up] * *de);
      rows += T.blocks[*up].dim;
    }
    QMatrix A(rows, d), B(rows, d);
    size_t at = 0;
    for (size_t t = 0; t < ops.size(); ++t) {
      for (size_t s = 0; s < ops[t].rows(); ++s)
        for (size_t c = 0; c < d; ++c) {
          A.at(at + s, c) = ops[t].at(s, c);
          B.at(at + s, c) = lhs[t].at(s, c);
        }
      at += ops[t].rows();
    }

    for (size_t c = 0; c < d; ++c) {
      std::vector<size_t> allowed;  // strict rows: right weight drops along Q+
      for (size_t p = 0; p < d; ++p) {
        if (p == c) continue;
        auto h = cd.nonneg_root_height(weight_sub(rw[c], rw[p]));
        if (h && *h > 0) allowed.push_back(p);
      }
      std::vector<QScalar> rhs(rows);
      for (size_t s = 0; s < rows; ++s) rhs[s] = B.at(s, c) - A.at(s, c) * diag[c];
      if (allowed.empty()) {
        for (const auto& x : rhs)
          if (!x.is_zero())
            fail(errc::no_solution, "shape-constrained intertwining system is inconsistent at " +
                                        weight_string(blk.weight));
        continue;
      }
      QMatrix As(rows, allowed.size());
      for (size_t s = 0; s < rows; ++s)
        for (size_t t = 0; t < allowed.size(); ++t) As.at(s, t) = A.at(s, allowed[t]);
      LinearSolveOutcome sol = solve_linear_system(As, rhs);
      if (!sol.consistent)
        fail(errc::no_solution, "shape-constrained intertwining system is inconsistent at " +
                                    weight_string(blk.weight));
      if (sol.nullity != 0)
        fail(errc::non_unique_solution,
             "intertwining system underdetermined at " + weight_string(blk.weight));
      for (size_t t = 0; t < allowed.size(); ++t) M.at(allowed[t], c) = sol.particular[t];
    }
    R.mats[tb] = std::move(M);
  }

  // Defensive cross-check: F-intertwining everywhere it is evaluable.
  for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
    if (!T.f_retained(tb)) continue;
    for (size_t i = 0; i < r; ++i) {
      auto down = T.block_at(weight_sub(T.blocks[tb].weight, cd.simple_root(i)));
      const auto& df = T.f_mats[i][tb];
      std::optional<QMatrix> dop = opposite_f(T, i, tb);
      if (!down) {
        if (df || dop) fail(errc::internal, "F matrix without target block");
        continue;
      }
      if (!df || !dop) fail(errc::internal, "missing F matrix on a retained block");
      if (R.mats[*down] * *df != *dop * R.mats[tb])
        fail(errc::no_solution,
             "E-determined solution violates F-intertwining at " +
                 weight_string(T.blocks[tb].weight));
    }
  }
  return R;
}

}  // namespace qkm
