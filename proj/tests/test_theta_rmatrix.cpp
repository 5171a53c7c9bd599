// Weight-twisted bar operators and the braiding itself: frozen small cases,
// triangular shape, agreement of the two derivations, and a third
// closed-form route available in rank one.
#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace qkm;

namespace {

std::shared_ptr<const Rep> irrep(const CartanDatum& cd, const Weight& lambda,
                                 std::optional<long long> depth = std::nullopt) {
  return std::make_shared<const Rep>(build_irrep(cd, lambda, depth));
}

// Rank-one braiding in closed form:
//   R = D o sum_k  q^{k(k-1)/2} (q - q^{-1})^k / [k]!  E^k (x) F^k
// with D multiplying the pair (b, c) by q^{(wt b, wt c)}.  Everything is
// assembled from the factor matrices alone; no tensor-module code path from
// the library is involved beyond the pair bookkeeping.
std::vector<QMatrix> rank1_r_closed_form(const Rep& T) {
  const CartanDatum& cd = T.datum;
  REQUIRE(cd.rank() == 1);
  const QScalar q = QScalar::q_power(Rat(1), cd.k());
  std::vector<QMatrix> out;
  for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
    const Block& blk = T.blocks[tb];
    QMatrix S(blk.dim, blk.dim);
    for (size_t p = 0; p < blk.dim; ++p) {
      const PairLabel& pl = blk.pairs[p];
      // k = 0 term.
      S.at(p, p) += QScalar::one();
      // E^k on the left factor, F^k on the right, k >= 1.
      oracle::BlockImage ek = oracle::start_at(*T.left, pl.left_block);
      oracle::BlockImage fk = oracle::start_at(*T.right, pl.right_block);
      for (long long k = 1;; ++k) {
        ek = oracle::gen_step(*T.left, true, 0, ek);
        fk = oracle::gen_step(*T.right, false, 0, fk);
        if (ek.zero || fk.zero) break;
        QScalar ck = QScalar::q_power(Rat(k * (k - 1), 2), cd.k()) *
                     (q - q.inverse()).pow(k) /
                     QScalar::quantum_factorial(k, cd.d(0));
        for (size_t s = 0; s < ek.mat.rows(); ++s) {
          const QScalar& el = ek.mat.at(s, pl.left_index);
          if (el.is_zero()) continue;
          for (size_t t = 0; t < fk.mat.rows(); ++t) {
            const QScalar& fr = fk.mat.at(t, pl.right_index);
            if (fr.is_zero()) continue;
            size_t pos = oracle::pair_position(T, tb, ek.block, s, fk.block, t);
            S.at(pos, p) += ck * el * fr;
          }
        }
      }
    }
    for (size_t p2 = 0; p2 < blk.dim; ++p2) {
      const PairLabel& pl = blk.pairs[p2];
      QScalar d = cd.q_power(cd.bilinear(T.left->blocks[pl.left_block].weight,
                                         T.right->blocks[pl.right_block].weight));
      for (size_t c = 0; c < blk.dim; ++c) S.at(p2, c) *= d;
    }
    out.push_back(S);
  }
  return out;
}

}  // namespace

TEST_CASE("twisted-bar diagonal factors on the rank-1 fundamental module") {
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {1});
  ThetaOperator th = theta_op(*V, bar_irrep(*V));
  REQUIRE(th.diag.size() == 2);
  CHECK(th.diag[0].canonical_string() == "q^{1/4}");
  CHECK(th.diag[1].canonical_string() == "q^{-3/4}");
  // d(mu) = q^{-(mu,mu)/2 + (mu,rho)} recomputed from the pairing.
  for (size_t b = 0; b < V->blocks.size(); ++b) {
    const Weight& mu = V->blocks[b].weight;
    Rat e = -a1.bilinear(mu, mu) / 2 + a1.bilinear(mu, a1.rho());
    CHECK(th.diag[b] == a1.q_power(e));
  }
}

TEST_CASE("twisted bar composes with its stored inverse to the identity") {
  CartanDatum a2 = CartanDatum::preset("A2");
  auto V = irrep(a2, {1, 0});
  auto W = irrep(a2, {0, 1});
  auto T = std::make_shared<const Rep>(tensor_rep(V, W, std::nullopt));
  BarBundle bb = make_bar(*T);
  for (const Rep* carrier : {T->left.get(), T->right.get(),
                             static_cast<const Rep*>(T.get())}) {
    const BarOperator& B =
        carrier == T.get() ? bb.bar
                           : (carrier == T->left.get() ? bar_irrep(*T->left)
                                                       : bar_irrep(*T->right));
    ThetaOperator th = theta_op(*carrier, B);
    for (size_t b = 0; b < carrier->blocks.size(); ++b) {
      size_t d = carrier->blocks[b].dim;
      INFO("block " << weight_string(carrier->blocks[b].weight));
      // Theta o Theta^{-1} and Theta^{-1} o Theta, as semilinear pairs.
      CHECK(th.mats[b] * th.inv_mats[b].bar() == QMatrix::identity(d));
      CHECK(th.inv_mats[b] * th.mats[b].bar() == QMatrix::identity(d));
    }
  }
}

TEST_CASE("braiding on the rank-1 fundamental square is the textbook matrix") {
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {1});
  Rep T = tensor_rep(V, V, std::nullopt);
  RMatrixOperator R = half_twist_r(T);
  CHECK(R.provenance == "half-twist");
  REQUIRE(R.mats.size() == 3);
  CHECK(R.mats[0].at(0, 0).canonical_string() == "q^{1/2}");
  CHECK(R.mats[2].at(0, 0).canonical_string() == "q^{1/2}");
  // Middle block in pair order (low (x) high), (high (x) low).
  const QMatrix& M = R.mats[1];
  CHECK(M.at(0, 0).canonical_string() == "q^{-1/2}");
  CHECK(M.at(1, 1).canonical_string() == "q^{-1/2}");
  CHECK(M.at(0, 1).canonical_string() == "0");
  CHECK(M.at(1, 0).canonical_string() == "q^{1/2} - q^{-3/2}");
}

TEST_CASE("half-twist, intertwiner, and closed form agree in rank one") {
  CartanDatum a1 = CartanDatum::preset("A1");
  struct Case {
    Weight lambda, mu;
  };
  for (const Case& c : {Case{{1}, {1}}, Case{{2}, {1}}, Case{{2}, {2}}, Case{{3}, {2}}}) {
    DYNAMIC_SECTION(weight_string(c.lambda) << " (x) " << weight_string(c.mu)) {
      auto V = irrep(a1, c.lambda);
      auto W = irrep(a1, c.mu);
      Rep T = tensor_rep(V, W, std::nullopt);
      RMatrixOperator half = half_twist_r(T);
      RMatrixOperator orac = oracle_r(T);
      std::vector<QMatrix> closed = rank1_r_closed_form(T);
      CHECK(half.provenance == "half-twist");
      CHECK(orac.provenance == "oracle");
      REQUIRE(half.mats.size() == T.blocks.size());
      REQUIRE(orac.mats.size() == T.blocks.size());
      for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
        INFO("block " << weight_string(T.blocks[tb].weight));
        CHECK(half.mats[tb] == orac.mats[tb]);
        CHECK(half.mats[tb] == closed[tb]);
      }
    }
  }
}

TEST_CASE("second fundamental mixed square matches its frozen block") {
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {2});
  auto W = irrep(a1, {1});
  Rep T = tensor_rep(V, W, std::nullopt);
  RMatrixOperator R = half_twist_r(T);
  auto tb = T.block_at(Weight{1});
  REQUIRE(tb);
  const QMatrix& M = R.mats[*tb];
  REQUIRE(M.rows() == 2);
  CHECK(M.at(0, 0).canonical_string() == "1");
  CHECK(M.at(0, 1).canonical_string() == "0");
  CHECK(M.at(1, 0).canonical_string() == "q - q^{-3}");
  CHECK(M.at(1, 1).canonical_string() == "q^{-1}");
}

TEST_CASE("braiding is triangular down the positive root cone") {
  struct Case {
    const char* preset;
    Weight lambda, mu;
  };
  const Case cases[] = {
      {"A2", {1, 0}, {0, 1}},
      {"B2", {1, 0}, {0, 1}},
  };
  for (const Case& c : cases) {
    CartanDatum cd = CartanDatum::preset(c.preset);
    DYNAMIC_SECTION(c.preset) {
      auto V = irrep(cd, c.lambda);
      auto W = irrep(cd, c.mu);
      Rep T = tensor_rep(V, W, std::nullopt);
      RMatrixOperator R = half_twist_r(T);
      for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
        const Block& blk = T.blocks[tb];
        for (size_t p = 0; p < blk.dim; ++p) {
          const Weight& wl = T.left->blocks[blk.pairs[p].left_block].weight;
          const Weight& wr = T.right->blocks[blk.pairs[p].right_block].weight;
          CHECK(R.mats[tb].at(p, p) == cd.q_power(cd.bilinear(wl, wr)));
          for (size_t p2 = 0; p2 < blk.dim; ++p2) {
            if (p2 == p || R.mats[tb].at(p2, p).is_zero()) continue;
            // A nonzero off-diagonal entry moves the right-factor weight
            // strictly down the positive cone.
            const Weight& wr2 = T.right->blocks[blk.pairs[p2].right_block].weight;
            auto h = cd.nonneg_root_height(weight_sub(wr, wr2));
            INFO("block " << weight_string(blk.weight) << " entry (" << p2 << "," << p << ")");
            REQUIRE(h);
            CHECK(*h > 0);
          }
        }
      }
    }
  }
}

TEST_CASE("flip composition satisfies the Hecke relation on the square") {
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {1});
  Rep T = tensor_rep(V, V, std::nullopt);
  RMatrixOperator R = half_twist_r(T);
  std::vector<QMatrix> sigma = braiding_mats(T, T, R);
  const QScalar hi = QScalar::q_power(Rat(1, 2), a1.k());       // symmetric eigenvalue
  const QScalar lo = -QScalar::q_power(Rat(-3, 2), a1.k());     // alternating one
  for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
    const QMatrix& s = sigma[tb];
    size_t d = s.rows();
    // (sigma - hi)(sigma - lo) = 0, i.e. sigma^2 = (hi+lo) sigma - hi*lo.
    CHECK(s * s == s.scaled(hi + lo) - QMatrix::identity(d).scaled(hi * lo));
  }
  // The singular vector of the middle block spans the alternating line.
  SingularBasis sb = singular_basis(T, Weight{0});
  REQUIRE(sb.columns.cols() == 1);
  std::vector<QScalar> u = sb.columns.column(0);
  std::vector<QScalar> su = sigma[*sb.block].apply(u);
  for (size_t i = 0; i < u.size(); ++i) CHECK(su[i] == lo * u[i]);
}

TEST_CASE("braiding intertwines the flipped module structures") {
  // sigma = Flip o R maps V (x) W to W (x) V and commutes with every
  // generator of the product structure.
  CartanDatum a2 = CartanDatum::preset("A2");
  auto V = irrep(a2, {1, 0});
  auto W = irrep(a2, {0, 1});
  Rep T = tensor_rep(V, W, std::nullopt);
  Rep Tf = tensor_rep(W, V, std::nullopt);
  RMatrixOperator R = half_twist_r(T);
  std::vector<QMatrix> sigma = braiding_mats(T, Tf, R);
  for (size_t tb = 0; tb < T.blocks.size(); ++tb) {
    for (size_t i = 0; i < a2.rank(); ++i) {
      if (const auto& em = T.e_mat(i, tb)) {
        size_t up = *T.e_target(i, tb);
        size_t upf = *Tf.block_at(T.blocks[up].weight);
        CHECK(sigma[up] * *em == *Tf.e_mat(i, *Tf.block_at(T.blocks[tb].weight)) * sigma[tb]);
        CHECK(upf == *Tf.e_target(i, *Tf.block_at(T.blocks[tb].weight)));
      }
      if (const auto& fm = T.f_mat(i, tb)) {
        size_t down = *T.f_target(i, tb);
        CHECK(sigma[down] * *fm == *Tf.f_mat(i, *Tf.block_at(T.blocks[tb].weight)) * sigma[tb]);
      }
    }
  }
}

TEST_CASE("intertwiner derivation refuses a reducible right factor") {
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {1});
  auto VV = std::make_shared<const Rep>(tensor_rep(V, V, std::nullopt));
  Rep T = tensor_rep(V, VV, std::nullopt);
  CHECK_THROWS_MATCHES(oracle_r(T), Error,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::StartsWith("NonUniqueSolution")));
  // The half-twist route has no such restriction.
  RMatrixOperator R = half_twist_r(T);
  CHECK(R.mats.size() == T.blocks.size());
}

TEST_CASE("half-twist on a nested product agrees with the factored braiding") {
  // Cabling consistency, stated directly: on (V (x) V) (x) V the braiding of
  // the grouped pair against the third factor is checked by the suite; here
  // we only pin determinism of the nested computation.
  CartanDatum a1 = CartanDatum::preset("A1");
  auto V = irrep(a1, {1});
  auto VV = std::make_shared<const Rep>(tensor_rep(V, V, std::nullopt));
  Rep T = tensor_rep(VV, V, std::nullopt);
  RMatrixOperator r1 = half_twist_r(T);
  RMatrixOperator r2 = half_twist_r(T);
  REQUIRE(r1.mats.size() == r2.mats.size());
  for (size_t tb = 0; tb < r1.mats.size(); ++tb) CHECK(r1.mats[tb] == r2.mats[tb]);
}
