#pragma once

#include "qkm/verify.hpp"

#include <json.hpp>

namespace qkm {

using json = nlohmann::ordered_json;

inline json weight_json(const Weight& w) { return json(w); }

inline json datum_json(const CartanDatum& cd) {
  json j;
  j["label"] = cd.label();
  j["matrix"] = cd.matrix();
  j["symmetrizers"] = cd.symmetrizers();
  j["root_of_q"] = cd.k();  // exponents live in (1/k)·Z
  return j;
}

inline json matrix_json(const QMatrix& m) {
  json rows = json::array();
  for (size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (size_t j = 0; j < m.cols(); ++j) row.push_back(m.at(i, j).canonical_string());
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json depth_json(const std::optional<long long>& d) {
  return d ? json(*d) : json("unbounded");
}

inline json rep_json(const Rep& rep) {
  json j;
  j["datum"] = datum_json(rep.datum);
  j["kind"] = rep.kind == RepKind::irreducible ? "irreducible" : "tensor";
  j["highest_weight"] = weight_json(rep.highest_weight);
  j["depth"] = depth_json(rep.depth);
  j["complete"] = rep.complete;
  j["dimension"] = rep.total_dim();
  json blocks = json::array();
  for (size_t b = 0; b < rep.blocks.size(); ++b) {
    const Block& blk = rep.blocks[b];
    json bj;
    bj["weight"] = weight_json(blk.weight);
    bj["height"] = blk.height;
    bj["dimension"] = blk.dim;
    if (rep.kind == RepKind::irreducible) {
      json words = json::array();
      for (const auto& w : blk.words) words.push_back(w);
      bj["basis_words"] = std::move(words);
    } else {
      json pairs = json::array();
      for (const auto& p : blk.pairs)
        pairs.push_back({p.left_block, p.left_index, p.right_block, p.right_index});
      bj["basis_pairs"] = std::move(pairs);
    }
    blocks.push_back(std::move(bj));
  }
  j["blocks"] = std::move(blocks);
  auto gens = [&](const std::vector<std::vector<std::optional<QMatrix>>>& mats) {
    json out = json::array();
    for (size_t i = 0; i < mats.size(); ++i) {
      json per = json::array();
      for (const auto& m : mats[i]) per.push_back(m ? matrix_json(*m) : json(nullptr));
      out.push_back(std::move(per));
    }
    return out;
  };
  j["E"] = gens(rep.e_mats);
  j["F"] = gens(rep.f_mats);
  return j;
}

inline json singulars_json(const Rep& T, const SingularBasis& sb) {
  json j;
  j["datum"] = datum_json(T.datum);
  j["weight"] = weight_json(sb.weight);
  j["count"] = sb.columns.cols();
  json cols = json::array();
  for (size_t c = 0; c < sb.columns.cols(); ++c) {
    json col = json::array();
    for (size_t s = 0; s < sb.columns.rows(); ++s)
      col.push_back(sb.columns.at(s, c).canonical_string());
    cols.push_back(std::move(col));
  }
  j["columns"] = std::move(cols);
  return j;
}

inline json bar_json(const Rep& carrier, const BarOperator& B) {
  json j;
  j["datum"] = datum_json(carrier.datum);
  j["semilinear"] = B.semilinear;
  json blocks = json::array();
  for (size_t b = 0; b < carrier.blocks.size(); ++b) {
    json bj;
    bj["weight"] = weight_json(carrier.blocks[b].weight);
    bj["matrix"] = matrix_json(B.mats[b]);
    blocks.push_back(std::move(bj));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

inline json theta_json(const Rep& carrier, const ThetaOperator& th) {
  json j;
  j["datum"] = datum_json(carrier.datum);
  j["semilinear"] = true;
  json blocks = json::array();
  for (size_t b = 0; b < carrier.blocks.size(); ++b) {
    json bj;
    bj["weight"] = weight_json(carrier.blocks[b].weight);
    bj["diagonal_factor"] = th.diag[b].canonical_string();
    bj["matrix"] = matrix_json(th.mats[b]);
    bj["inverse_matrix"] = matrix_json(th.inv_mats[b]);
    blocks.push_back(std::move(bj));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

inline json rmatrix_json(const Rep& T, const RMatrixOperator& R) {
  if (T.kind != RepKind::tensor) fail(errc::internal, "rmatrix_json needs a tensor module");
  json j;
  j["datum"] = datum_json(T.datum);
  j["lambda"] = weight_json(T.left->highest_weight);
  j["mu"] = weight_json(T.right->highest_weight);
  j["depth"] = depth_json(T.depth);
  j["provenance"] = R.provenance;
  j["basis_order"] =
      "blocks by height ascending then weight lex descending; within a block, "
      "right-factor weight descending, then left index, then right index";
  json blocks = json::array();
  for (size_t b = 0; b < T.blocks.size(); ++b) {
    json bj;
    bj["weight"] = weight_json(T.blocks[b].weight);
    bj["dimension"] = T.blocks[b].dim;
    bj["matrix"] = matrix_json(R.mats[b]);
    blocks.push_back(std::move(bj));
  }
  j["blocks"] = std::move(blocks);
  return j;
}

inline json report_json(const VerifyReport& rep) {
  json items = json::array();
  for (const auto& it : rep.items) {
    json ij;
    ij["check"] = it.check;
    ij["instance"] = it.instance;
    ij["block"] = it.block;
    ij["status"] = status_name(it.status);
    ij["witness"] = it.witness;
    items.push_back(std::move(ij));
  }
  return items;
}

}  // namespace qkm
