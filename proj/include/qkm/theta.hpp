#pragma once

#include "qkm/bar.hpp"

namespace qkm {

// The weight-twisted bar operator: on block(mu) it acts by
// d(mu) * B with d(mu) = q^{-(mu,mu)/2 + (mu,rho)}.  Semilinear, block
// preserving, stored with its inverse read off the factorization
// (D o B)^{-1} = B o D^{-1}, i.e. matrix bar(d)^{-1} * M_B.
struct ThetaOperator {
  std::vector<QMatrix> mats;      // v |-> mats[b] * bar(v)
  std::vector<QMatrix> inv_mats;  // same convention
  std::vector<QScalar> diag;      // d(mu) per block

  std::vector<QScalar> apply(size_t block, const std::vector<QScalar>& v) const {
    std::vector<QScalar> w(v.size());
    for (size_t i = 0; i < v.size(); ++i) w[i] = v[i].bar();
    return mats[block].apply(w);
  }
};

inline ThetaOperator theta_op(const Rep& carrier, const BarOperator& B) {
  ThetaOperator th;
  const CartanDatum& cd = carrier.datum;
  const Weight rho = cd.rho();
  for (size_t b = 0; b < carrier.blocks.size(); ++b) {
    const Weight& mu = carrier.blocks[b].weight;
    Rat e = -cd.bilinear(mu, mu) / 2 + cd.bilinear(mu, rho);
    QScalar d = cd.q_power(e);
    th.mats.push_back(B.mats[b].scaled(d));
    th.inv_mats.push_back(B.mats[b].scaled(d.bar().inverse()));
    th.diag.push_back(std::move(d));
  }
  return th;
}

}  // namespace qkm
