#include "core_kge/model.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "core_kge/rng.hpp"
#include "support/oracles.hpp"

using namespace core_kge;

namespace {

constexpr double kWidthRaw02 = -0.4054651081081643;  // realizes to 0.2
constexpr double kWidthRaw01 = -1.3862943611198906;  // realizes to 0.1

ModelConfig small_config(int dim, NormKind norm = NormKind::eL2) {
  ModelConfig c;
  c.dim = dim;
  c.norm = norm;
  return c;
}

}  // namespace

TEST(RealizedWidth, ReparameterizationValues) {
  EXPECT_EQ(realized_width(0.0), 0.25);
  EXPECT_NEAR(realized_width(kWidthRaw02), 0.2, 1e-15);
  EXPECT_NEAR(realized_width(kWidthRaw01), 0.1, 1e-15);
  EXPECT_EQ(realized_width(-1e3), kWidthFloor);
  EXPECT_EQ(realized_width(1e3), 0.5);

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double raw = rng.uniform(-30.0, 30.0);
    const double w = realized_width(raw);
    EXPECT_GT(w, 0.0);
    EXPECT_LE(w, 0.5);
  }
}

TEST(RealizedWidth, GradientMatchesFiniteDifferences) {
  Rng rng(5);
  const double h = 1e-6;
  for (int i = 0; i < 1000; ++i) {
    const double raw = rng.uniform(-4.0, 4.0);
    const double fd = (realized_width(raw + h) - realized_width(raw - h)) / (2.0 * h);
    EXPECT_NEAR(realized_width_grad(realized_width(raw)), fd, 1e-8);
  }
}

TEST(InitParams, DeterministicAndInRange) {
  const ModelConfig config = small_config(16);
  const Parameters a = init_params(config, 12, 3);
  const Parameters b = init_params(config, 12, 3);

  EXPECT_EQ(a.entities.base, b.entities.base);
  EXPECT_EQ(a.entities.bump, b.entities.bump);
  EXPECT_EQ(a.relations.head_center_raw, b.relations.head_center_raw);
  EXPECT_EQ(a.relations.head_width_raw, b.relations.head_width_raw);
  EXPECT_EQ(a.relations.tail_center_raw, b.relations.tail_center_raw);
  EXPECT_EQ(a.relations.tail_width_raw, b.relations.tail_width_raw);

  EXPECT_EQ(a.entities.count, 12);
  EXPECT_EQ(a.entities.dim, 16);
  EXPECT_EQ(a.relations.count, 3);
  ASSERT_EQ(a.entities.base.size(), 12u * 16u);
  ASSERT_EQ(a.relations.head_center_raw.size(), 3u * 16u);

  for (double v : a.entities.base) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  for (double v : a.entities.bump) {
    EXPECT_GE(v, -0.1);
    EXPECT_LE(v, 0.1);
  }
  for (double v : a.relations.head_center_raw) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  for (double v : a.relations.head_width_raw) EXPECT_NEAR(realized_width(v), 0.2, 1e-15);
  for (double v : a.relations.tail_width_raw) EXPECT_NEAR(realized_width(v), 0.2, 1e-15);

  ModelConfig other = config;
  other.seed = 43;
  const Parameters c = init_params(other, 12, 3);
  EXPECT_NE(a.entities.base, c.entities.base);
}

TEST(Embeddings, ContextShiftComposition) {
  Parameters p = blank_params(2, 1, 1);
  p.entities.base = {0.9, 0.0};
  p.entities.bump = {0.05, 0.3};
  const ModelConfig config = small_config(1);

  // Head slot reads the head's base plus the tail's bump.
  const auto hx = head_embedding(p, config, {0, 0, 1});
  ASSERT_EQ(hx.size(), 1u);
  EXPECT_NEAR(hx[0], 0.2, 1e-15);  // wrap(0.9 + 0.3)

  // Tail slot reads the tail's base plus the head's bump.
  const auto tx = tail_embedding(p, config, {0, 0, 1});
  EXPECT_NEAR(tx[0], 0.05, 1e-15);

  // Swapping roles swaps which bump applies.
  const auto hx2 = head_embedding(p, config, {1, 0, 0});
  EXPECT_NEAR(hx2[0], 0.05, 1e-15);
}

TEST(Embeddings, AblationsChangeThePoint) {
  Parameters p = blank_params(2, 1, 1);
  p.entities.base = {0.9, 0.0};
  p.entities.bump = {0.05, 0.3};

  ModelConfig no_bump = small_config(1);
  no_bump.bump_enabled = false;
  EXPECT_EQ(head_embedding(p, no_bump, {0, 0, 1})[0], 0.9);

  ModelConfig no_torus = small_config(1);
  no_torus.torus_enabled = false;
  EXPECT_NEAR(head_embedding(p, no_torus, {0, 0, 1})[0], 1.2, 1e-15);
}

TEST(Embeddings, RejectsOutOfRangeIds) {
  const ModelConfig config = small_config(2);
  const Parameters p = init_params(config, 3, 2);
  EXPECT_THROW(head_embedding(p, config, {3, 0, 0}), std::invalid_argument);
  EXPECT_THROW(head_embedding(p, config, {0, 2, 0}), std::invalid_argument);
  EXPECT_THROW(head_embedding(p, config, {0, 0, -1}), std::invalid_argument);
  EXPECT_THROW(tail_embedding(p, config, {-1, 0, 0}), std::invalid_argument);
  EXPECT_THROW(triple_distance(p, config, {0, -1, 0}), std::invalid_argument);
  EXPECT_THROW(score_all_candidates(p, config, {0, 2, 0}, Direction::PredictTail),
               std::invalid_argument);
}

TEST(TripleDistance, ZeroWhenPointsSitOnCenters) {
  Parameters p = blank_params(2, 1, 1);
  p.entities.base = {0.3, 0.8};
  p.relations.head_center_raw = {0.3};
  p.relations.tail_center_raw = {0.8};
  for (const NormKind norm : {NormKind::L1, NormKind::L2, NormKind::eL2}) {
    EXPECT_EQ(triple_distance(p, small_config(1, norm), {0, 0, 1}), 0.0);
  }
}

TEST(TripleDistance, BoundaryContributesExactlyOnePerDimension) {
  Parameters p = blank_params(2, 2, 2);
  // Head side: delta = 0.25 = width in both dimensions.
  p.entities.base = {0.75, 0.75, 0.1, 0.2};
  p.relations.head_center_raw = {0.5, 0.5, 0.0, 0.0};
  p.relations.tail_center_raw = {0.1, 0.2, 0.0, 0.0};

  EXPECT_EQ(triple_distance(p, small_config(2, NormKind::L1), {0, 0, 1}), 2.0);
  EXPECT_EQ(triple_distance(p, small_config(2, NormKind::eL2), {0, 0, 1}), 2.0);
  EXPECT_EQ(triple_distance(p, small_config(2, NormKind::L2), {0, 0, 1}), std::sqrt(2.0));
}

TEST(TripleDistance, OuterBranchHandValue) {
  Parameters p = blank_params(2, 1, 1);
  p.entities.base = {0.3, 0.6};
  p.relations.head_center_raw = {0.0};
  p.relations.head_width_raw = {kWidthRaw02};
  p.relations.tail_center_raw = {0.6};

  // Head side: delta 0.3 against width 0.2 -> 3.5; tail side contributes 0.
  EXPECT_NEAR(triple_distance(p, small_config(1, NormKind::L1), {0, 0, 1}), 3.5, 1e-12);
  EXPECT_NEAR(triple_distance(p, small_config(1, NormKind::eL2), {0, 0, 1}), 12.25, 1e-11);
}

TEST(Score, NegatesDistanceBitwise) {
  Rng rng(61);
  const Parameters p = random_params(rng, 6, 2, 4);
  const ModelConfig config = small_config(4);
  for (int i = 0; i < 100; ++i) {
    const auto ts = random_triples(rng, 6, 2, 1);
    EXPECT_EQ(score(p, config, ts[0]), -triple_distance(p, config, ts[0]));
  }
}

TEST(ScoreAllCandidates, BitIdenticalToSingleScores) {
  Rng rng(67);
  const Parameters p = random_params(rng, 7, 3, 5);
  for (const NormKind norm : {NormKind::L1, NormKind::L2, NormKind::eL2}) {
    for (const bool torus : {true, false}) {
      for (const bool bump : {true, false}) {
        ModelConfig config = small_config(5, norm);
        config.torus_enabled = torus;
        config.bump_enabled = bump;
        const Triple query{2, 1, 4};
        for (const Direction dir : {Direction::PredictHead, Direction::PredictTail}) {
          const auto scores = score_all_candidates(p, config, query, dir);
          ASSERT_EQ(scores.size(), 7u);
          for (std::int32_t cand = 0; cand < 7; ++cand) {
            Triple t = query;
            (dir == Direction::PredictTail ? t.tail : t.head) = cand;
            EXPECT_EQ(scores[static_cast<std::size_t>(cand)], score(p, config, t));
          }
        }
      }
    }
  }
}

TEST(TripleDistance, TranslationInvariantOnTheTorus) {
  Rng rng(71);
  const ModelConfig config = small_config(4);
  for (int trial = 0; trial < 50; ++trial) {
    const Parameters p = random_params(rng, 5, 2, 4);
    Parameters shifted = p;
    std::vector<double> s(4);
    for (double& v : s) v = rng.uniform(-2.0, 2.0);
    const auto shift_rows = [&](std::vector<double>& arr) {
      for (std::size_t i = 0; i < arr.size(); ++i) arr[i] += s[i % 4];
    };
    shift_rows(shifted.entities.base);
    shift_rows(shifted.relations.head_center_raw);
    shift_rows(shifted.relations.tail_center_raw);

    const Triple t{static_cast<std::int32_t>(rng.uniform_index(5)),
                   static_cast<std::int32_t>(rng.uniform_index(2)),
                   static_cast<std::int32_t>(rng.uniform_index(5))};
    const double before = triple_distance(p, config, t);
    const double after = triple_distance(shifted, config, t);
    EXPECT_NEAR(after, before, 1e-9 * std::max(1.0, std::fabs(before)));
  }
}

TEST(TripleDistance, BumpAblationIgnoresBumpValues) {
  Rng rng(73);
  const Parameters p = random_params(rng, 5, 2, 3);
  Parameters mutated = p;
  for (double& v : mutated.entities.bump) v = rng.uniform(-5.0, 5.0);

  ModelConfig config = small_config(3);
  config.bump_enabled = false;
  const Triple t{0, 1, 3};
  EXPECT_EQ(triple_distance(p, config, t), triple_distance(mutated, config, t));

  config.bump_enabled = true;
  EXPECT_NE(triple_distance(p, config, t), triple_distance(mutated, config, t));
}

TEST(TripleDistance, TorusMatchesEuclideanAwayFromSeam) {
  // With every coordinate in (0.25, 0.75) no separation can cross the seam,
  // so both geometries compute identical distances.
  Rng rng(79);
  for (int trial = 0; trial < 50; ++trial) {
    Parameters p = blank_params(4, 2, 3);
    for (double& v : p.entities.base) v = rng.uniform(0.3, 0.7);
    for (double& v : p.relations.head_center_raw) v = rng.uniform(0.3, 0.7);
    for (double& v : p.relations.tail_center_raw) v = rng.uniform(0.3, 0.7);
    for (double& v : p.relations.head_width_raw) v = rng.uniform(-2.0, 0.0);
    for (double& v : p.relations.tail_width_raw) v = rng.uniform(-2.0, 0.0);

    ModelConfig torus = small_config(3);
    ModelConfig euclid = small_config(3);
    euclid.torus_enabled = false;
    const Triple t{static_cast<std::int32_t>(rng.uniform_index(4)),
                   static_cast<std::int32_t>(rng.uniform_index(2)),
                   static_cast<std::int32_t>(rng.uniform_index(4))};
    EXPECT_EQ(triple_distance(p, torus, t), triple_distance(p, euclid, t));
  }
}

TEST(TripleDistance, AgreesWithReferenceImplementation) {
  Rng rng(83);
  for (int trial = 0; trial < 50; ++trial) {
    const Parameters p = random_params(rng, 6, 3, 4);
    for (const NormKind norm : {NormKind::L1, NormKind::L2, NormKind::eL2}) {
      for (const bool torus : {true, false}) {
        for (const bool bump : {true, false}) {
          ModelConfig config = small_config(4, norm);
          config.torus_enabled = torus;
          config.bump_enabled = bump;
          const auto ts = random_triples(rng, 6, 3, 4);
          for (const Triple& t : ts) {
            const double got = triple_distance(p, config, t);
            const double want = oracle_distance(p, config, t);
            EXPECT_NEAR(got, want, 1e-12 * std::max(1.0, std::fabs(want)));
          }
        }
      }
    }
  }
}

TEST(RealizedRegion, WrapsCenterAndBoundsWidth) {
  Parameters p = blank_params(1, 1, 2);
  p.relations.head_center_raw = {-5.3, 2.25};
  p.relations.head_width_raw = {-1e3, 1e3};
  const CyclicOrthotope r = realized_region(p, 0, Side::Head);
  EXPECT_NEAR(r.center().coords[0], 0.7, 1e-12);
  EXPECT_NEAR(r.center().coords[1], 0.25, 1e-12);
  EXPECT_EQ(r.width()[0], kWidthFloor);
  EXPECT_EQ(r.width()[1], 0.5);

  EXPECT_THROW(realized_region(p, 1, Side::Head), std::invalid_argument);
  EXPECT_THROW(realized_region(p, -1, Side::Tail), std::invalid_argument);
}

TEST(MeanRealizedWidth, AveragesBothSides) {
  Parameters p = blank_params(1, 2, 2);
  p.relations.head_width_raw = {kWidthRaw02, kWidthRaw02, 0.0, 0.0};
  p.relations.tail_width_raw = {kWidthRaw01, kWidthRaw01, 0.0, 0.0};
  // Mean of {0.2, 0.2, 0.25, 0.25, 0.1, 0.1, 0.25, 0.25}.
  EXPECT_NEAR(mean_realized_width(p), 0.2, 1e-15);

  const Parameters q = init_params(small_config(8), 4, 3);
  EXPECT_NEAR(mean_realized_width(q), 0.2, 1e-14);
}

TEST(NormNames, RoundTripAndErrors) {
  EXPECT_EQ(norm_name(NormKind::L1), "l1");
  EXPECT_EQ(norm_name(NormKind::L2), "l2");
  EXPECT_EQ(norm_name(NormKind::eL2), "el2");
  EXPECT_EQ(parse_norm("l1"), NormKind::L1);
  EXPECT_EQ(parse_norm("l2"), NormKind::L2);
  EXPECT_EQ(parse_norm("el2"), NormKind::eL2);
  try {
    parse_norm("linf");
    FAIL() << "expected invalid_argument";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("el2"), std::string::npos) << e.what();
  }
}
