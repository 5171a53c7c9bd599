#pragma once

#include "qkm/cartan.hpp"
#include "qkm/matrix.hpp"

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace qkm {

enum class RepKind { irreducible, tensor };

// One basis vector of a tensor-product block: indices into the two factors.
struct PairLabel {
  size_t left_block, left_index, right_block, right_index;
};

struct Block {
  Weight weight;
  long long height = 0;  // ht(top weight - weight) in simple roots
  size_t dim = 0;
  // Irreducible reps: F-word labels in application order, i.e. word
  // [i1,...,ih] labels F_{ih}(...(F_{i1} v)...).
  std::vector<std::vector<int>> words;
  // Tensor reps: factor bookkeeping, in the canonical order (right-factor
  // weight descending: right height asc, right weight lex desc, then left
  // index, then right index).
  std::vector<PairLabel> pairs;
};

// A depth-truncated weight-graded module with exact generator matrices.
// K_w never appears as a matrix: it acts on block(mu) by q^{<w,mu>}.
struct Rep {
  explicit Rep(CartanDatum d) : datum(std::move(d)) {}

  CartanDatum datum;
  RepKind kind;
  Weight highest_weight;             // irreducible: lambda; tensor: sum of factor tops
  std::optional<long long> depth;    // nullopt = unbounded
  bool complete = false;             // no block was cut off at the boundary
  std::vector<Block> blocks;         // sorted: height asc, weight lex desc
  std::map<Weight, size_t> block_index;
  // mats[i][b]: E_i maps block b -> block(weight + alpha_i), F_i maps
  // block b -> block(weight - alpha_i).  nullopt = zero map (absent target
  // block); whether an absent F target means "zero" or "truncated" is
  // decided by f_retained below.
  std::vector<std::vector<std::optional<QMatrix>>> e_mats, f_mats;
  std::vector<QMatrix> grams;        // irreducible only: contravariant form per block
  std::shared_ptr<const Rep> left, right;  // tensor only

  size_t total_dim() const {
    size_t n = 0;
    for (const auto& b : blocks) n += b.dim;
    return n;
  }

  long long max_height() const {
    return blocks.empty() ? -1 : blocks.back().height;
  }

  std::optional<size_t> block_at(const Weight& w) const {
    auto it = block_index.find(w);
    if (it == block_index.end()) return std::nullopt;
    return it->second;
  }

  // True when every F_i image from block b is fully retained (either a
  // stored matrix or a genuine zero).  False only at a truncation boundary.
  bool f_retained(size_t b) const {
    return complete || (depth && blocks[b].height < *depth);
  }

  const std::optional<QMatrix>& e_mat(size_t i, size_t b) const { return e_mats[i][b]; }

  const std::optional<QMatrix>& f_mat(size_t i, size_t b) const {
    if (!f_retained(b))
      fail(errc::out_of_depth, "F-action from height " + std::to_string(blocks[b].height) +
                                   " exceeds retained depth");
    return f_mats[i][b];
  }

  std::optional<size_t> e_target(size_t i, size_t b) const {
    return block_at(weight_add(blocks[b].weight, datum.simple_root(i)));
  }
  std::optional<size_t> f_target(size_t i, size_t b) const {
    return block_at(weight_sub(blocks[b].weight, datum.simple_root(i)));
  }

  void check_same_datum(const Rep& o) const {
    if (!(datum == o.datum)) fail(errc::datum_mismatch, "representations over different data");
  }
};

// A homogeneous element: coordinates in a single weight block.  The zero
// element carries no block.
struct VectorInRep {
  std::optional<size_t> block;  // nullopt = zero element
  std::vector<QScalar> coords;

  bool is_zero() const {
    if (!block) return true;
    for (const auto& c : coords)
      if (!c.is_zero()) return false;
    return true;
  }

  static VectorInRep zero() { return {}; }
};

struct GenStep {
  bool is_e = false;  // false = F
  size_t index = 0;
  QScalar coeff = QScalar::one();
};

// Applies a word of generators in algebraic order: the word [g1,...,gn]
// denotes the product g1*...*gn, so gn acts first.
inline VectorInRep act(const Rep& rep, const std::vector<GenStep>& word, VectorInRep v) {
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    if (v.is_zero()) return VectorInRep::zero();
    size_t b = *v.block;
    const std::optional<QMatrix>& m = it->is_e ? rep.e_mat(it->index, b) : rep.f_mat(it->index, b);
    if (!m) {
      v = VectorInRep::zero();
      continue;
    }
    std::optional<size_t> tgt =
        it->is_e ? rep.e_target(it->index, b) : rep.f_target(it->index, b);
    if (!tgt) fail(errc::internal, "action matrix without target block");
    v.block = tgt;
    v.coords = m->apply(v.coords);
    if (!it->coeff.is_one())
      for (auto& c : v.coords) c *= it->coeff;
  }
  return v;
}

inline size_t dimension_at(const Rep& rep, const Weight& w) {
  rep.datum.check_rank(w);
  auto b = rep.block_at(w);
  if (b) return rep.blocks[*b].dim;
  // Outside every block: zero if retained at that height, OutOfDepth if the
  // height lies beyond the truncation.
  if (rep.complete) return 0;
  auto h = rep.datum.nonneg_root_height(weight_sub(rep.highest_weight, w));
  if (!h) return 0;  // not in top - Q+: never a weight
  if (rep.depth && *h > *rep.depth)
    fail(errc::out_of_depth,
         "weight " + weight_string(w) + " lies beyond retained depth");
  return 0;
}

}  // namespace qkm
