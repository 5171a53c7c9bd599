#pragma once

#include "qkm/module.hpp"

#include <algorithm>
#include <map>

namespace qkm {

namespace detail {

struct SpanningCandidate {
  std::vector<int> word;
  size_t parent_block, parent_index;
  size_t lower_index;  // the i of the F_i that produced it
};

}  // namespace detail

// Builds the irreducible integrable highest-weight module V_lambda, truncated
// at the given height (nullopt = the whole module; finite type only).
//
// Level by level: the spanning set at height h is F_i applied to the basis of
// height h-1; the contravariant form (the pairing with <F_i x, y> = <x, E_i y>,
// <v,v> = 1 at the top) is evaluated on it through already-known action
// matrices, and the block basis is the lexicographically first independent
// subset of spanning words.  The form on the irreducible quotient is
// nondegenerate on each weight space, so independence of spanning vectors is
// exactly independence of their Gram columns, and the Gram RREF also yields
// every discarded vector's expansion — which is precisely the F-action matrix.
inline Rep build_irrep(const CartanDatum& cd, const Weight& lambda,
                       std::optional<long long> depth) {
  cd.check_rank(lambda);
  if (!cd.dominant(lambda))
    fail(errc::not_dominant, "highest weight " + weight_string(lambda) + " is not dominant");
  if (depth && *depth < 0) fail(errc::internal, "negative depth");
  if (!depth && !cd.finite_type())
    fail(errc::not_finite_type,
         "unbounded construction requires finite type; pass an explicit depth");

  const size_t r = cd.rank();
  Rep rep(cd);
  rep.kind = RepKind::irreducible;
  rep.highest_weight = lambda;
  rep.depth = depth;

  Block top;
  top.weight = lambda;
  top.height = 0;
  top.dim = 1;
  top.words = {{}};
  rep.blocks.push_back(std::move(top));
  rep.block_index[lambda] = 0;
  QMatrix g0(1, 1);
  g0.at(0, 0) = QScalar::one();
  rep.grams.push_back(std::move(g0));
  rep.e_mats.assign(r, {std::nullopt});
  rep.f_mats.assign(r, {std::nullopt});

  std::vector<size_t> prev_level = {0};
  for (long long h = 1;; ++h) {
    const bool commit = !depth || h <= *depth;
    // Candidates at height h, grouped by weight; blocks are committed in
    // weight-lex-descending order within the level.
    std::map<Weight, std::vector<detail::SpanningCandidate>, std::greater<Weight>> cands;
    for (size_t pb : prev_level) {
      const Block& blk = rep.blocks[pb];
      for (size_t i = 0; i < r; ++i) {
        Weight nu = weight_sub(blk.weight, cd.simple_root(i));
        auto& list = cands[nu];
        for (size_t t = 0; t < blk.dim; ++t) {
          detail::SpanningCandidate c;
          c.word = blk.words[t];
          c.word.push_back(static_cast<int>(i));
          c.parent_block = pb;
          c.parent_index = t;
          c.lower_index = i;
          list.push_back(std::move(c));
        }
      }
    }

    size_t level_rank = 0;
    std::vector<size_t> new_level;
    for (auto& [nu, list] : cands) {
      std::sort(list.begin(), list.end(),
                [](const auto& a, const auto& b) { return a.word < b.word; });
      const size_t n = list.size();

      // E_j image of every candidate, as coordinates in block(nu + alpha_j):
      // E_j(F_i p) = F_i(E_j p) + [i=j] [<H_i, wt p>]_{q_i} p.
      std::vector<std::optional<size_t>> up(r);
      for (size_t j = 0; j < r; ++j) up[j] = rep.block_at(weight_add(nu, cd.simple_root(j)));
      std::vector<std::vector<std::vector<QScalar>>> e_img(
          n, std::vector<std::vector<QScalar>>(r));
      for (size_t a = 0; a < n; ++a) {
        const auto& c = list[a];
        const Block& pblk = rep.blocks[c.parent_block];
        for (size_t j = 0; j < r; ++j) {
          if (!up[j]) continue;
          std::vector<QScalar> y(rep.blocks[*up[j]].dim);
          const auto& ejp = rep.e_mats[j][c.parent_block];
          if (ejp) {
            size_t mid = *rep.block_at(weight_add(pblk.weight, cd.simple_root(j)));
            const auto& fmid = rep.f_mats[c.lower_index][mid];
            if (fmid) y = fmid->apply(ejp->column(c.parent_index));
          }
          if (j == c.lower_index) {
            QScalar m = QScalar::quantum_integer(pblk.weight[j], cd.d(j));
            if (!m.is_zero()) y[c.parent_index] += m;
          }
          e_img[a][j] = std::move(y);
        }
      }

      // Contravariant Gram on the candidates: <c_a, c_b> = <p_a, E_{i_a} c_b>.
      QMatrix G(n, n);
      for (size_t a = 0; a < n; ++a) {
        const auto& ca = list[a];
        const QMatrix& pg = rep.grams[ca.parent_block];
        for (size_t b = 0; b < n; ++b) {
          const auto& img = e_img[b][ca.lower_index];
          QScalar s;
          for (size_t t = 0; t < img.size(); ++t)
            if (!img[t].is_zero() && !pg.at(ca.parent_index, t).is_zero())
              s += pg.at(ca.parent_index, t) * img[t];
          G.at(a, b) = std::move(s);
        }
      }
      if (G != G.transposed()) fail(errc::internal, "contravariant form asymmetric");

      RrefResult rr = rref(G);
      const auto& piv = rr.pivot_cols;
      const size_t dim = piv.size();
      level_rank += dim;
      if (dim == 0 || !commit) continue;

      size_t nb = rep.blocks.size();
      Block blk;
      blk.weight = nu;
      blk.height = h;
      blk.dim = dim;
      for (size_t s = 0; s < dim; ++s) blk.words.push_back(list[piv[s]].word);
      rep.blocks.push_back(std::move(blk));
      rep.block_index[nu] = nb;
      QMatrix bg(dim, dim);
      for (size_t a = 0; a < dim; ++a)
        for (size_t b = 0; b < dim; ++b) bg.at(a, b) = G.at(piv[a], piv[b]);
      rep.grams.push_back(std::move(bg));

      for (size_t j = 0; j < r; ++j) {
        if (!up[j]) {
          rep.e_mats[j].push_back(std::nullopt);
          continue;
        }
        QMatrix em(rep.blocks[*up[j]].dim, dim);
        for (size_t s = 0; s < dim; ++s) em.set_column(s, e_img[piv[s]][j]);
        rep.e_mats[j].push_back(std::move(em));
      }
      for (size_t j = 0; j < r; ++j) rep.f_mats[j].push_back(std::nullopt);

      // F-action from each parent block: column t of F_i is the expansion of
      // candidate (parent, t, i) in the new basis, read off the Gram RREF
      // (pivot columns reduce to unit vectors, so one formula covers both
      // kept and discarded candidates).
      for (size_t a = 0; a < n; ++a) {
        const auto& c = list[a];
        auto& fm = rep.f_mats[c.lower_index][c.parent_block];
        if (!fm) fm = QMatrix(dim, rep.blocks[c.parent_block].dim);
        for (size_t s = 0; s < dim; ++s) fm->at(s, c.parent_index) = rr.r.at(s, a);
      }
      new_level.push_back(nb);
    }

    if (level_rank == 0) {
      rep.complete = true;
      break;
    }
    if (!commit) {
      rep.complete = false;
      break;
    }
    prev_level = std::move(new_level);
  }
  return rep;
}

}  // namespace qkm
