#pragma once

#include "qkm/module.hpp"

#include <map>
#include <memory>

namespace qkm {

// Offset of each right-factor block's pair group inside a tensor block
// (pairs are grouped by right block, in right-block index order).
inline std::map<size_t, size_t> right_block_offsets(const Rep& T, size_t tb) {
  std::map<size_t, size_t> off;
  const auto& pairs = T.blocks[tb].pairs;
  for (size_t p = 0; p < pairs.size(); ++p) off.emplace(pairs[p].right_block, p);
  return off;
}

namespace detail {

// One generator's matrix on a tensor block, for the standard coproduct
//   E_i -> E_i (x) K_i + 1 (x) E_i,     F_i -> F_i (x) 1 + K_i^{-1} (x) F_i
// or the opposite one
//   E_i -> K_i (x) E_i + E_i (x) 1,     F_i -> 1 (x) F_i + F_i (x) K_i^{-1}.
inline std::optional<QMatrix> tensor_generator(const Rep& T, size_t i, bool is_e, bool opposite,
                                               size_t tb) {
  const Rep& L = *T.left;
  const Rep& R = *T.right;
  const CartanDatum& cd = T.datum;
  const Weight alpha = cd.simple_root(i);
  const Block& src = T.blocks[tb];
  const Weight tw = is_e ? weight_add(src.weight, alpha) : weight_sub(src.weight, alpha);
  auto tgt = T.block_at(tw);
  if (!tgt) return std::nullopt;
  const Block& dst = T.blocks[*tgt];
  auto off = right_block_offsets(T, *tgt);
  QMatrix M(dst.pairs.size(), src.pairs.size());
  for (size_t p = 0; p < src.pairs.size(); ++p) {
    const PairLabel& pl = src.pairs[p];
    const Weight& wl = L.blocks[pl.left_block].weight;
    const Weight& wr = R.blocks[pl.right_block].weight;
    // Action on the left slot, with the K-twist on the untouched right slot.
    QScalar ca = is_e ? (opposite ? QScalar::one() : cd.q_root_pairing(wr, i))
                      : (opposite ? cd.q_root_pairing(wr, i).inverse() : QScalar::one());
    // Action on the right slot.
    QScalar cb = is_e ? (opposite ? cd.q_root_pairing(wl, i) : QScalar::one())
                      : (opposite ? QScalar::one() : cd.q_root_pairing(wl, i).inverse());
    const auto& lm = is_e ? L.e_mat(i, pl.left_block) : L.f_mat(i, pl.left_block);
    if (lm) {
      size_t lb2 = is_e ? *L.e_target(i, pl.left_block) : *L.f_target(i, pl.left_block);
      size_t base = off.at(pl.right_block);
      size_t rdim = R.blocks[pl.right_block].dim;
      for (size_t s = 0; s < lm->rows(); ++s) {
        const QScalar& v = lm->at(s, pl.left_index);
        if (v.is_zero()) continue;
        (void)lb2;
        M.at(base + s * rdim + pl.right_index, p) += ca * v;
      }
    }
    const auto& rm = is_e ? R.e_mat(i, pl.right_block) : R.f_mat(i, pl.right_block);
    if (rm) {
      size_t rb2 = is_e ? *R.e_target(i, pl.right_block) : *R.f_target(i, pl.right_block);
      size_t base = off.at(rb2);
      size_t rdim = R.blocks[rb2].dim;
      for (size_t s = 0; s < rm->rows(); ++s) {
        const QScalar& v = rm->at(s, pl.right_index);
        if (v.is_zero()) continue;
        M.at(base + pl.left_index * rdim + s, p) += cb * v;
      }
    }
  }
  return M;
}

}  // namespace detail

// Opposite-coproduct matrices, assembled directly (never via the flip), so
// independent derivations stay independent.
inline std::optional<QMatrix> opposite_e(const Rep& T, size_t i, size_t tb) {
  return detail::tensor_generator(T, i, true, true, tb);
}
inline std::optional<QMatrix> opposite_f(const Rep& T, size_t i, size_t tb) {
  return detail::tensor_generator(T, i, false, true, tb);
}

// Tensor product of two modules over one datum, truncated at `depth`
// (nullopt = everything; needs complete factors).  Basis of block(nu) is all
// b (x) c with wt(b)+wt(c) = nu, ordered by right weight descending, then
// left index, then right index.
inline Rep tensor_rep(std::shared_ptr<const Rep> L, std::shared_ptr<const Rep> R,
                      std::optional<long long> depth) {
  if (!L || !R) fail(errc::internal, "null tensor factor");
  L->check_same_datum(*R);
  if (!depth) {
    if (!L->complete || !R->complete)
      fail(errc::depth_too_small, "unbounded tensor product requires complete factors");
  } else {
    if (*depth < 0) fail(errc::internal, "negative depth");
    auto deep_enough = [&](const Rep& f) { return f.complete || (f.depth && *f.depth >= *depth); };
    if (!deep_enough(*L) || !deep_enough(*R))
      fail(errc::depth_too_small, "factor depth is below the requested tensor depth");
  }

  Rep T(L->datum);
  T.kind = RepKind::tensor;
  T.highest_weight = weight_add(L->highest_weight, R->highest_weight);
  T.depth = depth;
  T.left = L;
  T.right = R;
  T.complete =
      L->complete && R->complete && (!depth || *depth >= L->max_height() + R->max_height());

  // Group pairs by weight; block order is height ascending, weight lex
  // descending.  Iterating right blocks outermost puts each block's pair list
  // in the canonical order directly.
  struct KeyLess {
    bool operator()(const std::pair<long long, Weight>& a,
                    const std::pair<long long, Weight>& b) const {
      if (a.first != b.first) return a.first < b.first;
      return a.second > b.second;
    }
  };
  std::map<std::pair<long long, Weight>, std::vector<PairLabel>, KeyLess> groups;
  for (size_t br = 0; br < R->blocks.size(); ++br)
    for (size_t bl = 0; bl < L->blocks.size(); ++bl) {
      long long h = L->blocks[bl].height + R->blocks[br].height;
      if (depth && h > *depth) continue;
      Weight nu = weight_add(L->blocks[bl].weight, R->blocks[br].weight);
      auto& list = groups[{h, nu}];
      for (size_t il = 0; il < L->blocks[bl].dim; ++il)
        for (size_t ir = 0; ir < R->blocks[br].dim; ++ir)
          list.push_back(PairLabel{bl, il, br, ir});
    }
  for (auto& [key, list] : groups) {
    Block blk;
    blk.weight = key.second;
    blk.height = key.first;
    blk.dim = list.size();
    blk.pairs = std::move(list);
    T.block_index[blk.weight] = T.blocks.size();
    T.blocks.push_back(std::move(blk));
  }

  const size_t r = T.datum.rank();
  T.e_mats.assign(r, std::vector<std::optional<QMatrix>>(T.blocks.size()));
  T.f_mats.assign(r, std::vector<std::optional<QMatrix>>(T.blocks.size()));
  for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
    bool f_ok = T.complete || (depth && T.blocks[tb].height < *depth);
    for (size_t i = 0; i < r; ++i) {
      T.e_mats[i][tb] = detail::tensor_generator(T, i, true, false, tb);
      if (f_ok) T.f_mats[i][tb] = detail::tensor_generator(T, i, false, false, tb);
    }
  }
  return T;
}

// Component of u paired with the right factor's highest weight vector.
inline VectorInRep project_p1(const Rep& T, size_t tb, const std::vector<QScalar>& coords) {
  const auto& pairs = T.blocks[tb].pairs;
  VectorInRep out = VectorInRep::zero();
  for (size_t p = 0; p < pairs.size(); ++p) {
    const PairLabel& pl = pairs[p];
    if (pl.right_block != 0 || pl.right_index != 0) continue;
    if (!out.block) {
      out.block = pl.left_block;
      out.coords.assign(T.left->blocks[pl.left_block].dim, QScalar::zero());
    }
    out.coords[pl.left_index] = coords[p];
  }
  if (out.is_zero()) return VectorInRep::zero();
  return out;
}

// Component of u paired with the left factor's highest weight vector.
inline VectorInRep project_p2(const Rep& T, size_t tb, const std::vector<QScalar>& coords) {
  const auto& pairs = T.blocks[tb].pairs;
  VectorInRep out = VectorInRep::zero();
  for (size_t p = 0; p < pairs.size(); ++p) {
    const PairLabel& pl = pairs[p];
    if (pl.left_block != 0 || pl.left_index != 0) continue;
    if (!out.block) {
      out.block = pl.right_block;
      out.coords.assign(T.right->blocks[pl.right_block].dim, QScalar::zero());
    }
    out.coords[pl.right_index] = coords[p];
  }
  if (out.is_zero()) return VectorInRep::zero();
  return out;
}

struct SingularBasis {
  Weight weight;
  std::optional<size_t> block;  // nullopt: the weight carries no block at all
  QMatrix columns;              // dim(block) x count, canonically normalized
};

// Basis of the singular vectors (all E_i vanish) of a tensor block, as the
// exact kernel of the stacked E-matrices.  Canonical normalization: reduced
// column echelon of [p2-image rows; raw coordinate rows], scanning the
// p2 rows first, so each column's leading p2 coordinate is 1 and columns are
// ordered by that leading position.
inline SingularBasis singular_basis(const Rep& T, const Weight& nu) {
  T.datum.check_rank(nu);
  SingularBasis sb;
  sb.weight = nu;
  sb.block = T.block_at(nu);
  if (!sb.block) {
    dimension_at(T, nu);  // raises OutOfDepth past the boundary
    sb.columns = QMatrix(0, 0);
    return sb;
  }
  size_t tb = *sb.block;
  size_t d = T.blocks[tb].dim;
  const size_t r = T.datum.rank();
  size_t rows = 0;
  for (size_t i = 0; i < r; ++i)
    if (T.e_mats[i][tb]) rows += T.e_mats[i][tb]->rows();
  QMatrix S(rows, d);
  size_t at = 0;
  for (size_t i = 0; i < r; ++i) {
    const auto& em = T.e_mats[i][tb];
    if (!em) continue;
    for (size_t s = 0; s < em->rows(); ++s)
      for (size_t c = 0; c < d; ++c) S.at(at + s, c) = em->at(s, c);
    at += em->rows();
  }
  auto ker = kernel_columns(S);
  if (ker.empty()) {
    sb.columns = QMatrix(d, 0);
    return sb;
  }
  QMatrix K = QMatrix::from_columns(d, ker);
  // p2 rows: within this block only one right-factor block can pair with the
  // left top vector, so its index range suffices.
  std::vector<size_t> p2_rows;
  for (size_t p = 0; p < T.blocks[tb].pairs.size(); ++p) {
    const PairLabel& pl = T.blocks[tb].pairs[p];
    if (pl.left_block == 0 && pl.left_index == 0) p2_rows.push_back(p);
  }
  QMatrix stacked(p2_rows.size() + d, K.cols());
  for (size_t s = 0; s < p2_rows.size(); ++s)
    for (size_t c = 0; c < K.cols(); ++c) stacked.at(s, c) = K.at(p2_rows[s], c);
  for (size_t s = 0; s < d; ++s)
    for (size_t c = 0; c < K.cols(); ++c) stacked.at(p2_rows.size() + s, c) = K.at(s, c);
  QMatrix carried(0, K.cols());
  rcef_columns(stacked, carried);
  QMatrix cols(d, K.cols());
  for (size_t s = 0; s < d; ++s)
    for (size_t c = 0; c < K.cols(); ++c) cols.at(s, c) = stacked.at(p2_rows.size() + s, c);
  sb.columns = std::move(cols);
  return sb;
}

// Block matrix of an operator acting factorwise, given per-block matrices on
// each factor (both weight-preserving).
inline QMatrix factorwise_matrix(const Rep& T, size_t tb, const std::vector<QMatrix>& matsL,
                                 const std::vector<QMatrix>& matsR) {
  const Block& blk = T.blocks[tb];
  QMatrix M(blk.dim, blk.dim);
  auto off = right_block_offsets(T, tb);
  for (size_t p = 0; p < blk.dim; ++p) {
    const PairLabel& pl = blk.pairs[p];
    const QMatrix& ml = matsL[pl.left_block];
    const QMatrix& mr = matsR[pl.right_block];
    size_t base = off.at(pl.right_block);
    size_t rdim = T.right->blocks[pl.right_block].dim;
    for (size_t s = 0; s < ml.rows(); ++s) {
      if (ml.at(s, pl.left_index).is_zero()) continue;
      for (size_t t = 0; t < mr.rows(); ++t) {
        const QScalar& v = mr.at(t, pl.right_index);
        if (!v.is_zero()) M.at(base + s * rdim + t, p) += ml.at(s, pl.left_index) * v;
      }
    }
  }
  return M;
}

// Permutation matrix realizing b (x) c -> c (x) b from a block of T = V (x) W
// to the same-weight block of Tflip = W (x) V (factors shared).
inline QMatrix flip_matrix(const Rep& T, const Rep& Tflip, size_t tb) {
  if (T.left.get() != Tflip.right.get() || T.right.get() != Tflip.left.get())
    fail(errc::internal, "flip between unrelated tensor products");
  auto fb = Tflip.block_at(T.blocks[tb].weight);
  if (!fb) fail(errc::internal, "flip target block missing");
  const Block& src = T.blocks[tb];
  const Block& dst = Tflip.blocks[*fb];
  if (src.dim != dst.dim) fail(errc::internal, "flip dimension mismatch");
  auto off = right_block_offsets(Tflip, *fb);
  QMatrix M(dst.dim, src.dim);
  for (size_t p = 0; p < src.pairs.size(); ++p) {
    const PairLabel& pl = src.pairs[p];
    // In Tflip the right factor is T.left.
    size_t rdim = Tflip.right->blocks[pl.left_block].dim;
    size_t row = off.at(pl.left_block) + pl.right_index * rdim + pl.left_index;
    M.at(row, p) = QScalar::one();
  }
  return M;
}

}  // namespace qkm
