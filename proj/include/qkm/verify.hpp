#pragma once

#include "qkm/rmatrix.hpp"

#include <sstream>

namespace qkm {

enum class CheckStatus { pass, fail, skip };

inline const char* status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::skip: return "skip";
  }
  return "?";
}

struct CheckResult {
  std::string check;
  std::string instance;
  std::string block;    // weight label, or "-" for whole-instance items
  CheckStatus status = CheckStatus::pass;
  std::string witness;  // first failing entry, or the reason for a skip
};

struct VerifyReport {
  std::vector<CheckResult> items;

  size_t count(CheckStatus s) const {
    size_t n = 0;
    for (const auto& it : items)
      if (it.status == s) ++n;
    return n;
  }
  bool all_ok() const { return count(CheckStatus::fail) == 0; }
};

namespace detail {

inline std::string entry_witness(const QMatrix& got, const QMatrix& want) {
  if (got.rows() != want.rows() || got.cols() != want.cols()) {
    std::ostringstream os;
    os << "shape " << got.rows() << "x" << got.cols() << " vs " << want.rows() << "x"
       << want.cols();
    return os.str();
  }
  for (size_t i = 0; i < got.rows(); ++i)
    for (size_t j = 0; j < got.cols(); ++j)
      if (!(got.at(i, j) == want.at(i, j))) {
        std::ostringstream os;
        os << "entry (" << i << "," << j << "): " << got.at(i, j).canonical_string() << " vs "
           << want.at(i, j).canonical_string();
        return os.str();
      }
  return "";
}

// ---------------------------------------------------------------------------
// Three-slot scaffolding.  Both bracketings of U (x) V (x) W are materialized;
// positions are translated through the shared flat labels
// (bu,iu,bv,iv,bw,iw).  All slot operators preserve the total weight, so each
// works block by block.

struct TripleSlot {
  size_t bu, iu, bv, iv, bw, iw;
};

struct TripleFrame {
  std::shared_ptr<const Rep> U, V, W;
  std::shared_ptr<const Rep> UV, VW, UW;  // pair products
  std::shared_ptr<const Rep> A;           // (U (x) V) (x) W
  std::shared_ptr<const Rep> B;           // U (x) (V (x) W)
  RMatrixOperator R_UV, R_VW, R_UW, R_A, R_B;

  TripleFrame(std::shared_ptr<const Rep> u, std::shared_ptr<const Rep> v,
              std::shared_ptr<const Rep> w, std::optional<long long> depth)
      : U(std::move(u)), V(std::move(v)), W(std::move(w)) {
    UV = std::make_shared<Rep>(tensor_rep(U, V, depth));
    VW = std::make_shared<Rep>(tensor_rep(V, W, depth));
    UW = std::make_shared<Rep>(tensor_rep(U, W, depth));
    A = std::make_shared<Rep>(tensor_rep(UV, W, depth));
    B = std::make_shared<Rep>(tensor_rep(U, VW, depth));
    R_UV = half_twist_r(*UV);
    R_VW = half_twist_r(*VW);
    R_UW = half_twist_r(*UW);
    R_A = half_twist_r(*A);
    R_B = half_twist_r(*B);
  }

  TripleSlot decode_a(size_t ab, size_t p) const {
    const PairLabel& pl = A->blocks[ab].pairs[p];
    const PairLabel& uv = UV->blocks[pl.left_block].pairs[pl.left_index];
    return {uv.left_block, uv.left_index, uv.right_block, uv.right_index,
            pl.right_block, pl.right_index};
  }
  TripleSlot decode_b(size_t bb, size_t p) const {
    const PairLabel& pl = B->blocks[bb].pairs[p];
    const PairLabel& vw = VW->blocks[pl.right_block].pairs[pl.right_index];
    return {pl.left_block, pl.left_index, vw.left_block, vw.left_index,
            vw.right_block, vw.right_index};
  }

  static size_t pair_pos(const Rep& T, size_t tb, size_t lb, size_t li, size_t rb, size_t ri) {
    auto off = right_block_offsets(T, tb);
    return off.at(rb) + li * T.right->blocks[rb].dim + ri;
  }

  size_t encode_a(size_t ab, const TripleSlot& s) const {
    Weight wuv = weight_add(U->blocks[s.bu].weight, V->blocks[s.bv].weight);
    size_t uvb = *UV->block_at(wuv);
    size_t li = pair_pos(*UV, uvb, s.bu, s.iu, s.bv, s.iv);
    return pair_pos(*A, ab, uvb, li, s.bw, s.iw);
  }
  size_t encode_b(size_t bb, const TripleSlot& s) const {
    Weight wvw = weight_add(V->blocks[s.bv].weight, W->blocks[s.bw].weight);
    size_t vwb = *VW->block_at(wvw);
    size_t ri = pair_pos(*VW, vwb, s.bv, s.iv, s.bw, s.iw);
    return pair_pos(*B, bb, s.bu, s.iu, vwb, ri);
  }

  // The pair operator acting on slots 2,3 of bracketing A.
  QMatrix r23_on_a(size_t ab) const {
    const Block& blk = A->blocks[ab];
    QMatrix M(blk.dim, blk.dim);
    for (size_t p = 0; p < blk.dim; ++p) {
      TripleSlot s = decode_a(ab, p);
      Weight wvw = weight_add(V->blocks[s.bv].weight, W->blocks[s.bw].weight);
      size_t vwb = *VW->block_at(wvw);
      size_t col = pair_pos(*VW, vwb, s.bv, s.iv, s.bw, s.iw);
      const QMatrix& r = R_VW.mats[vwb];
      for (size_t row = 0; row < r.rows(); ++row) {
        if (r.at(row, col).is_zero()) continue;
        const PairLabel& out = VW->blocks[vwb].pairs[row];
        TripleSlot t = s;
        t.bv = out.left_block, t.iv = out.left_index;
        t.bw = out.right_block, t.iw = out.right_index;
        M.at(encode_a(ab, t), p) += r.at(row, col);
      }
    }
    return M;
  }

  // The pair operator acting on slots 1,3 of either bracketing.
  QMatrix r13(const Rep& T, bool bracket_a, size_t tb) const {
    const Block& blk = T.blocks[tb];
    QMatrix M(blk.dim, blk.dim);
    for (size_t p = 0; p < blk.dim; ++p) {
      TripleSlot s = bracket_a ? decode_a(tb, p) : decode_b(tb, p);
      Weight wuw = weight_add(U->blocks[s.bu].weight, W->blocks[s.bw].weight);
      size_t uwb = *UW->block_at(wuw);
      size_t col = pair_pos(*UW, uwb, s.bu, s.iu, s.bw, s.iw);
      const QMatrix& r = R_UW.mats[uwb];
      for (size_t row = 0; row < r.rows(); ++row) {
        if (r.at(row, col).is_zero()) continue;
        const PairLabel& out = UW->blocks[uwb].pairs[row];
        TripleSlot t = s;
        t.bu = out.left_block, t.iu = out.left_index;
        t.bw = out.right_block, t.iw = out.right_index;
        M.at(bracket_a ? encode_a(tb, t) : encode_b(tb, t), p) += r.at(row, col);
      }
    }
    return M;
  }

  // The pair operator acting on slots 1,2 of bracketing B.
  QMatrix r12_on_b(size_t bb) const {
    const Block& blk = B->blocks[bb];
    QMatrix M(blk.dim, blk.dim);
    for (size_t p = 0; p < blk.dim; ++p) {
      TripleSlot s = decode_b(bb, p);
      Weight wuv = weight_add(U->blocks[s.bu].weight, V->blocks[s.bv].weight);
      size_t uvb = *UV->block_at(wuv);
      size_t col = pair_pos(*UV, uvb, s.bu, s.iu, s.bv, s.iv);
      const QMatrix& r = R_UV.mats[uvb];
      for (size_t row = 0; row < r.rows(); ++row) {
        if (r.at(row, col).is_zero()) continue;
        const PairLabel& out = UV->blocks[uvb].pairs[row];
        TripleSlot t = s;
        t.bu = out.left_block, t.iu = out.left_index;
        t.bv = out.right_block, t.iv = out.right_index;
        M.at(encode_b(bb, t), p) += r.at(row, col);
      }
    }
    return M;
  }

  // Slots 1,2 on bracketing A act factorwise.
  QMatrix r12_on_a(size_t ab) const {
    std::vector<QMatrix> idW;
    for (const auto& b : W->blocks) idW.push_back(QMatrix::identity(b.dim));
    return factorwise_matrix(*A, ab, R_UV.mats, idW);
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// The exact property suite.  Every check reports per block; failures carry
// the first differing entry, skips carry the reason.  Checks:
//   intertwining         R commutes the two coproducts (E always; F where
//                        the block is fully retained)
//   cabling-left         R on (U(x)V)(x)W equals R13 R23
//   cabling-right        R on U(x)(V(x)W) equals R13 R12
//   yang-baxter          R12 R13 R23 = R23 R13 R12 on (U(x)V)(x)W
//   oracle-equality      half-twist R equals the intertwining-solver R
//   choice-independence  R unchanged under rescaled tops / rescaled and
//                        permuted singular bases
//   summand-restriction  the twisted involution preserves each summand
//   leading-term         top coefficient law for the braiding on singulars
//   projection-rank      highest-vector pairings are injective on singulars

inline const std::vector<std::string>& all_check_names() {
  static const std::vector<std::string> names = {
      "intertwining",   "cabling-left",        "cabling-right",
      "yang-baxter",    "oracle-equality",     "choice-independence",
      "summand-restriction", "leading-term",   "projection-rank"};
  return names;
}

inline VerifyReport verify_suite(std::shared_ptr<const Rep> V, std::shared_ptr<const Rep> W,
                                 std::shared_ptr<const Rep> U, std::optional<long long> depth,
                                 std::vector<std::string> checks = {},
                                 const std::string& instance_label = "") {
  if (!V || !W) fail(errc::internal, "verify_suite needs two modules");
  V->check_same_datum(*W);
  if (U) V->check_same_datum(*U);
  if (checks.empty()) checks = all_check_names();
  auto wants = [&](const std::string& name) {
    for (const auto& c : checks)
      if (c == name) return true;
    return false;
  };

  std::string label = instance_label;
  if (label.empty()) {
    std::ostringstream os;
    os << V->datum.label() << " lambda=" << weight_string(V->highest_weight)
       << " mu=" << weight_string(W->highest_weight);
    if (U) os << " nu=" << weight_string(U->highest_weight);
    os << " depth=" << (depth ? std::to_string(*depth) : std::string("unbounded"));
    label = os.str();
  }

  VerifyReport rep;
  auto push = [&](const std::string& check, const std::string& block, CheckStatus st,
                  const std::string& witness) {
    rep.items.push_back({check, label, block, st, witness});
  };

  auto T = std::make_shared<Rep>(tensor_rep(V, W, depth));
  const CartanDatum& cd = T->datum;
  const size_t r = cd.rank();

  BarBundle bL = make_bar(*V);
  BarBundle bR = make_bar(*W);
  Generation gen = generate(*T);
  RMatrixOperator R = half_twist_r(*T, bL, bR, gen);

  if (wants("intertwining")) {
    for (size_t tb = 0; tb < T->blocks.size(); ++tb) {
      const std::string bl = weight_string(T->blocks[tb].weight);
      std::string bad;
      for (size_t i = 0; i < r && bad.empty(); ++i) {
        const auto& de = T->e_mats[i][tb];
        auto dop = opposite_e(*T, i, tb);
        if (de.has_value() != dop.has_value()) {
          bad = "coproduct support mismatch (E)";
          break;
        }
        if (de) {
          size_t up = *T->block_at(weight_add(T->blocks[tb].weight, cd.simple_root(i)));
          std::string w = detail::entry_witness(R.mats[up] * *de, *dop * R.mats[tb]);
          if (!w.empty()) bad = "E_" + std::to_string(i + 1) + " " + w;
        }
      }
      if (bad.empty() && !T->f_retained(tb)) {
        push("intertwining", bl, CheckStatus::skip,
             "F-action from this block exceeds the retained depth");
        continue;
      }
      for (size_t i = 0; i < r && bad.empty() && T->f_retained(tb); ++i) {
        const auto& df = T->f_mats[i][tb];
        auto dop = opposite_f(*T, i, tb);
        if (df.has_value() != dop.has_value()) {
          bad = "coproduct support mismatch (F)";
          break;
        }
        if (df) {
          size_t dn = *T->block_at(weight_sub(T->blocks[tb].weight, cd.simple_root(i)));
          std::string w = detail::entry_witness(R.mats[dn] * *df, *dop * R.mats[tb]);
          if (!w.empty()) bad = "F_" + std::to_string(i + 1) + " " + w;
        }
      }
      push("intertwining", bl, bad.empty() ? CheckStatus::pass : CheckStatus::fail, bad);
    }
  }

  if (wants("oracle-equality")) {
    RMatrixOperator O = oracle_r(*T);
    for (size_t tb = 0; tb < T->blocks.size(); ++tb) {
      std::string w = detail::entry_witness(R.mats[tb], O.mats[tb]);
      push("oracle-equality", weight_string(T->blocks[tb].weight),
           w.empty() ? CheckStatus::pass : CheckStatus::fail, w);
    }
  }

  if (wants("choice-independence")) {
    // Deterministic non-bar-fixed scalars; two variants: rescaled tops and
    // singulars, then additionally reversed singular column order.
    auto scalar_at = [&](size_t i) {
      const long long k = cd.k();
      switch (i % 4) {
        case 0: return QScalar::q_power_scaled(k, k);          // q
        case 1: return QScalar::q_power_scaled(3 * k, k);      // q^3
        case 2: return QScalar(2);                             // 2
        default:
          return QScalar::one() + QScalar::q_power_scaled(2 * k, k);  // 1 + q^2
      }
    };
    auto make_choices = [&](bool permute) {
      auto top_counter = std::make_shared<size_t>(0);
      auto sing_counter = std::make_shared<size_t>(1);
      BarChoices ch;
      ch.top_scale = [scalar_at, top_counter](const Rep&) { return scalar_at((*top_counter)++); };
      ch.singular_mod = [scalar_at, sing_counter, permute](const Weight&, QMatrix& cols) {
        for (size_t c = 0; c < cols.cols(); ++c) {
          QScalar f = scalar_at((*sing_counter)++);
          for (size_t s = 0; s < cols.rows(); ++s)
            if (!cols.at(s, c).is_zero()) cols.at(s, c) *= f;
        }
        if (permute && cols.cols() > 1) {
          for (size_t c = 0; c < cols.cols() / 2; ++c) {
            size_t c2 = cols.cols() - 1 - c;
            for (size_t s = 0; s < cols.rows(); ++s) std::swap(cols.at(s, c), cols.at(s, c2));
          }
        }
      };
      return ch;
    };
    for (bool permute : {false, true}) {
      BarChoices ch = make_choices(permute);
      RMatrixOperator R2 = half_twist_r(*T, &ch);
      const char* variant = permute ? "rescaled+permuted: " : "rescaled: ";
      for (size_t tb = 0; tb < T->blocks.size(); ++tb) {
        std::string w = detail::entry_witness(R2.mats[tb], R.mats[tb]);
        push("choice-independence", weight_string(T->blocks[tb].weight),
             w.empty() ? CheckStatus::pass : CheckStatus::fail, w.empty() ? "" : variant + w);
      }
    }
  }

  if (wants("summand-restriction")) {
    BarOperator barT = bar_tensor(*T, bL.bar, bR.bar, gen, bR.gen.get());
    ThetaOperator thT = theta_op(*T, barT);
    for (size_t tb = 0; tb < T->blocks.size(); ++tb) {
      const GenBlock& gb = gen.blocks[tb];
      size_t d = T->blocks[tb].dim;
      std::string bad;
      for (size_t si = 0; si < gen.summand_hw.size() && bad.empty(); ++si) {
        std::vector<size_t> cols;
        for (size_t c = 0; c < gb.cols.size(); ++c)
          if (gb.cols[c].summand == si) cols.push_back(c);
        if (cols.empty()) continue;
        // span test: pivots of [summand columns | theta images] must all lie
        // in the first group
        QMatrix aug(d, 2 * cols.size());
        for (size_t j = 0; j < cols.size(); ++j) {
          std::vector<QScalar> v = gb.cob.column(cols[j]);
          aug.set_column(j, v);
          aug.set_column(cols.size() + j, thT.apply(tb, v));
        }
        RrefResult rr = rref(aug);
        for (size_t pc : rr.pivot_cols)
          if (pc >= cols.size()) {
            bad = "summand " + weight_string(gen.summand_hw[si]) +
                  " not preserved by the twisted involution";
            break;
          }
      }
      push("summand-restriction", weight_string(T->blocks[tb].weight),
           bad.empty() ? CheckStatus::pass : CheckStatus::fail, bad);
    }
  }

  if (wants("leading-term") || wants("projection-rank")) {
    auto Tflip = std::make_shared<Rep>(tensor_rep(W, V, depth));
    std::vector<QMatrix> sigma;
    if (wants("leading-term"))
      for (size_t tb = 0; tb < T->blocks.size(); ++tb)
        sigma.push_back(flip_matrix(*T, *Tflip, tb) * R.mats[tb]);
    for (size_t tb = 0; tb < T->blocks.size(); ++tb) {
      const SingularBasis& sb = gen.singulars[tb];
      if (sb.columns.cols() == 0) continue;
      const std::string bl = weight_string(T->blocks[tb].weight);

      if (wants("projection-rank")) {
        std::vector<std::vector<QScalar>> p1s, p2s;
        bool degenerate = false;
        for (size_t c = 0; c < sb.columns.cols(); ++c) {
          VectorInRep p1 = project_p1(*T, tb, sb.columns.column(c));
          VectorInRep p2 = project_p2(*T, tb, sb.columns.column(c));
          if (p1.is_zero() || p2.is_zero()) {
            degenerate = true;
            break;
          }
          p1s.push_back(p1.coords);
          p2s.push_back(p2.coords);
        }
        bool ok = !degenerate &&
                  QMatrix::from_columns(p1s[0].size(), p1s).rank() == p1s.size() &&
                  QMatrix::from_columns(p2s[0].size(), p2s).rank() == p2s.size();
        push("projection-rank", bl, ok ? CheckStatus::pass : CheckStatus::fail,
             ok ? "" : "highest-vector pairing drops rank on the singular basis");
      }

      if (wants("leading-term")) {
        size_t fb = *Tflip->block_at(T->blocks[tb].weight);
        std::string bad;
        for (size_t c = 0; c < sb.columns.cols() && bad.empty(); ++c) {
          std::vector<QScalar> u = sb.columns.column(c);
          VectorInRep b0 = project_p1(*T, tb, u);
          VectorInRep lead = project_p2(*Tflip, fb, sigma[tb].apply(u));
          if (b0.is_zero()) {
            bad = "singular vector with zero highest-vector pairing";
            break;
          }
          QScalar factor =
              cd.q_power(cd.bilinear(V->blocks[*b0.block].weight, W->highest_weight));
          bool ok = !lead.is_zero() && *lead.block == *b0.block;
          if (ok)
            for (size_t s = 0; s < b0.coords.size() && ok; ++s)
              ok = lead.coords[s] == factor * b0.coords[s];
          if (!ok) bad = "column " + std::to_string(c) + ": braiding leading term off";
        }
        push("leading-term", bl, bad.empty() ? CheckStatus::pass : CheckStatus::fail, bad);
      }
    }
  }

  const bool want_triple =
      wants("cabling-left") || wants("cabling-right") || wants("yang-baxter");
  if (want_triple) {
    if (!U) {
      if (wants("cabling-left"))
        push("cabling-left", "-", CheckStatus::skip, "no third module supplied");
      if (wants("cabling-right"))
        push("cabling-right", "-", CheckStatus::skip, "no third module supplied");
      if (wants("yang-baxter"))
        push("yang-baxter", "-", CheckStatus::skip, "no third module supplied");
    } else {
      detail::TripleFrame fr(U, V, W, depth);
      for (size_t ab = 0; ab < fr.A->blocks.size(); ++ab) {
        const std::string bl = weight_string(fr.A->blocks[ab].weight);
        QMatrix m23 = fr.r23_on_a(ab);
        QMatrix m13 = fr.r13(*fr.A, true, ab);
        if (wants("cabling-left")) {
          std::string w = detail::entry_witness(fr.R_A.mats[ab], m13 * m23);
          push("cabling-left", bl, w.empty() ? CheckStatus::pass : CheckStatus::fail, w);
        }
        if (wants("yang-baxter")) {
          QMatrix m12 = fr.r12_on_a(ab);
          std::string w = detail::entry_witness(m12 * (m13 * m23), m23 * (m13 * m12));
          push("yang-baxter", bl, w.empty() ? CheckStatus::pass : CheckStatus::fail, w);
        }
      }
      if (wants("cabling-right")) {
        for (size_t bb = 0; bb < fr.B->blocks.size(); ++bb) {
          const std::string bl = weight_string(fr.B->blocks[bb].weight);
          QMatrix m12 = fr.r12_on_b(bb);
          QMatrix m13 = fr.r13(*fr.B, false, bb);
          std::string w = detail::entry_witness(fr.R_B.mats[bb], m13 * m12);
          push("cabling-right", bl, w.empty() ? CheckStatus::pass : CheckStatus::fail, w);
        }
      }
    }
  }

  return rep;
}

}  // namespace qkm
