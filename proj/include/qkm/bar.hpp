#pragma once

#include "qkm/tensor.hpp"

#include <functional>

namespace qkm {

// A bar-semilinear operator: v |-> mats[block] * bar(v).
struct BarOperator {
  std::vector<QMatrix> mats;  // indexed by carrier block
  bool semilinear = true;

  std::vector<QScalar> apply(size_t block, const std::vector<QScalar>& v) const {
    std::vector<QScalar> w(v.size());
    for (size_t i = 0; i < v.size(); ++i) w[i] = v[i].bar();
    return mats[block].apply(w);
  }
};

// On an irreducible module in its F-word basis, the bar involution fixing the
// highest weight vector fixes every basis vector: all blocks carry the
// identity matrix and semilinearity does the work.
inline BarOperator bar_irrep(const Rep& V) {
  if (V.kind != RepKind::irreducible) fail(errc::internal, "bar_irrep needs an irreducible module");
  BarOperator B;
  for (const auto& blk : V.blocks) B.mats.push_back(QMatrix::identity(blk.dim));
  return B;
}

// The bar involution fixing f * v_top instead of v_top: every block matrix
// becomes (f / bar f) * identity.  Used by the choice-independence check.
inline BarOperator bar_irrep_scaled(const Rep& V, const QScalar& f) {
  if (f.is_zero()) fail(errc::internal, "bar scaling by zero");
  BarOperator B = bar_irrep(V);
  QScalar c = f / f.bar();
  for (auto& m : B.mats) m = m.scaled(c);
  return B;
}

// Factorwise conjugation b (x) c -> bar(b) (x) bar(c) on a tensor block.
// Not C_bar-compatible on the product; kept as the building block it is.
inline QMatrix naive_bar_tensor_matrix(const Rep& T, size_t tb, const BarOperator& barL,
                                       const BarOperator& barR) {
  return factorwise_matrix(T, tb, barL.mats, barR.mats);
}

// ---------------------------------------------------------------------------
// Generation bookkeeping: every tensor block is spanned by F-monomial images
// of singular vectors of higher weights; the chosen spanning columns link
// each basis direction to the summand its anchor generates.

struct GenColumn {
  bool is_anchor = false;
  size_t anchor_col = 0;                        // anchors: column in the block's singular basis
  size_t parent_block = 0, parent_col = 0;      // extensions: F_{f_index} of that column
  size_t f_index = 0;
  size_t summand = 0;
};

struct GenBlock {
  QMatrix cob;  // columns = generated basis vectors in pair coordinates
  std::vector<GenColumn> cols;
};

struct Generation {
  std::vector<GenBlock> blocks;  // per tensor block
  std::vector<Weight> summand_hw;
  std::vector<std::pair<size_t, size_t>> summand_origin;  // (tensor block, singular column)
  std::vector<SingularBasis> singulars;                   // per tensor block
};

// Hook for the choice-independence check: may rescale/permute the columns of
// a freshly computed singular basis before they are adopted.
using SingularModifier = std::function<void(const Weight&, QMatrix&)>;

inline Generation generate(const Rep& T, const SingularModifier& modify = nullptr) {
  if (T.kind != RepKind::tensor) fail(errc::internal, "generation needs a tensor module");
  Generation g;
  g.blocks.resize(T.blocks.size());
  g.singulars.reserve(T.blocks.size());
  const size_t r = T.datum.rank();
  for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
    const Block& blk = T.blocks[tb];
    SingularBasis sb = singular_basis(T, blk.weight);
    if (modify && sb.columns.cols() > 0) modify(blk.weight, sb.columns);
    g.singulars.push_back(sb);

    // Candidates: F-images of already-generated columns above (i ascending,
    // column order within each parent), then this block's singular columns.
    std::vector<GenColumn> meta;
    std::vector<std::vector<QScalar>> vecs;
    for (size_t i = 0; i < r; ++i) {
      auto pb = T.block_at(weight_add(blk.weight, T.datum.simple_root(i)));
      if (!pb) continue;
      const GenBlock& pg = g.blocks[*pb];
      const auto& fm = T.f_mats[i][*pb];
      if (!fm) fail(errc::internal, "missing F matrix during generation");
      for (size_t c = 0; c < pg.cob.cols(); ++c) {
        GenColumn gc;
        gc.parent_block = *pb;
        gc.parent_col = c;
        gc.f_index = i;
        gc.summand = pg.cols[c].summand;
        meta.push_back(gc);
        vecs.push_back(fm->apply(pg.cob.column(c)));
      }
    }
    for (size_t s = 0; s < sb.columns.cols(); ++s) {
      GenColumn gc;
      gc.is_anchor = true;
      gc.anchor_col = s;
      gc.summand = g.summand_hw.size();
      g.summand_hw.push_back(blk.weight);
      g.summand_origin.emplace_back(tb, s);
      meta.push_back(gc);
      vecs.push_back(sb.columns.column(s));
    }

    QMatrix cand = QMatrix::from_columns(blk.dim, vecs);
    RrefResult rr = rref(cand);
    if (rr.pivot_cols.size() != blk.dim)
      fail(errc::generation_failure,
           "block " + weight_string(blk.weight) + " not spanned by generated vectors");
    GenBlock& gb = g.blocks[tb];
    gb.cob = QMatrix(blk.dim, blk.dim);
    for (size_t s = 0; s < blk.dim; ++s) {
      gb.cob.set_column(s, vecs[rr.pivot_cols[s]]);
      gb.cols.push_back(meta[rr.pivot_cols[s]]);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// The singular-image bar twist.  Writing u = sum f_j b_j (x) c_j with the c_j
// decomposed into irreducible summands of the right factor (for an
// irreducible right factor there is nothing to decompose), the image is
//   sum bar(f_j) q^{(m,m) - (wt c_j, wt c_j) + 2(m - wt c_j, rho)}
//       barL(b_j) (x) barR(c_j),
// where m is the highest weight of the summand carrying c_j.

namespace detail {

inline QScalar tbar_weight_factor(const CartanDatum& cd, const Weight& m, const Weight& wc) {
  Rat e = cd.bilinear(m, m) - cd.bilinear(wc, wc) + 2 * cd.bilinear(weight_sub(m, wc), cd.rho());
  return cd.q_power(e);
}

// Matrix of the twist on one tensor block: v |-> M * bar(v).
inline QMatrix tbar_matrix(const Rep& T, size_t tb, const BarOperator& barL,
                           const BarOperator& barR, const Generation* right_gen) {
  const Rep& R = *T.right;
  const CartanDatum& cd = T.datum;
  const Block& blk = T.blocks[tb];
  auto off = right_block_offsets(T, tb);
  QMatrix M(blk.dim, blk.dim);
  size_t p = 0;
  while (p < blk.dim) {
    const PairLabel& pl = blk.pairs[p];
    size_t bl = pl.left_block, br = pl.right_block;
    size_t ldim = T.left->blocks[bl].dim, rdim = R.blocks[br].dim;
    size_t base = off.at(br);
    const Weight& wc = R.blocks[br].weight;
    // Change to the right factor's generated basis when one is supplied; the
    // per-column exponent then uses each column's own summand top.
    QMatrix cob = right_gen ? (*right_gen).blocks[br].cob : QMatrix::identity(rdim);
    std::vector<QScalar> kappa(rdim);
    for (size_t c = 0; c < rdim; ++c) {
      const Weight& m = right_gen ? right_gen->summand_hw[right_gen->blocks[br].cols[c].summand]
                                  : R.highest_weight;
      kappa[c] = tbar_weight_factor(cd, m, wc);
    }
    // Group operator: kron(barL, barR(cob) * kappa) * bar(cob)^{-1}, acting
    // after coordinate conjugation.
    QMatrix w = barR.mats[br] * cob.bar();  // barR applied to each generated column
    for (size_t c = 0; c < rdim; ++c)
      for (size_t s = 0; s < rdim; ++s)
        if (!w.at(s, c).is_zero()) w.at(s, c) *= kappa[c];
    QMatrix gmat = w * cob.bar().inverse();
    const QMatrix& ml = barL.mats[bl];
    for (size_t il = 0; il < ldim; ++il)
      for (size_t ir = 0; ir < rdim; ++ir)
        for (size_t s = 0; s < ldim; ++s) {
          if (ml.at(s, il).is_zero()) continue;
          for (size_t t = 0; t < rdim; ++t)
            if (!gmat.at(t, ir).is_zero())
              M.at(base + s * rdim + t, base + il * rdim + ir) += ml.at(s, il) * gmat.at(t, ir);
        }
    p += ldim * rdim;
  }
  return M;
}

}  // namespace detail

// Image of a singular vector under the tensor bar twist; rejects
// non-singular input.
inline std::vector<QScalar> bar_singular_image(const Rep& T, size_t tb,
                                               const std::vector<QScalar>& u,
                                               const BarOperator& barL, const BarOperator& barR,
                                               const Generation* right_gen = nullptr) {
  const size_t r = T.datum.rank();
  for (size_t i = 0; i < r; ++i) {
    const auto& em = T.e_mats[i][tb];
    if (!em) continue;
    for (const auto& x : em->apply(u))
      if (!x.is_zero()) fail(errc::not_singular, "bar twist applied to a non-singular vector");
  }
  std::vector<QScalar> ub(u.size());
  for (size_t i = 0; i < u.size(); ++i) ub[i] = u[i].bar();
  return detail::tbar_matrix(T, tb, barL, barR, right_gen).apply(ub);
}

// The full bar involution on a tensor product: agrees with the singular-image
// twist on singular vectors and commutes with every F_i.  Values on the
// generated basis are forced (anchors via the twist, extensions via F), and
// the block matrix is the transport back to pair coordinates.
inline BarOperator bar_tensor(const Rep& T, const BarOperator& barL, const BarOperator& barR,
                              const Generation& gen, const Generation* right_gen = nullptr) {
  BarOperator B;
  B.mats.resize(T.blocks.size());
  // values[tb] = columns B(g_c) for the generated basis of block tb
  std::vector<QMatrix> values(T.blocks.size());
  for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
    const GenBlock& gb = gen.blocks[tb];
    size_t d = T.blocks[tb].dim;
    QMatrix H(d, d);
    std::optional<QMatrix> tw;  // lazily built singular twist matrix
    for (size_t c = 0; c < d; ++c) {
      const GenColumn& gc = gb.cols[c];
      if (gc.is_anchor) {
        if (!tw) tw = detail::tbar_matrix(T, tb, barL, barR, right_gen);
        std::vector<QScalar> u = gen.singulars[tb].columns.column(gc.anchor_col);
        for (auto& x : u) x = x.bar();
        H.set_column(c, tw->apply(u));
      } else {
        const auto& fm = T.f_mats[gc.f_index][gc.parent_block];
        H.set_column(c, fm->apply(values[gc.parent_block].column(gc.parent_col)));
      }
    }
    values[tb] = H;
    B.mats[tb] = H * gb.cob.bar().inverse();
  }
  return B;
}

}  // namespace qkm
