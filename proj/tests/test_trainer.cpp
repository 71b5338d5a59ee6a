#include "core_kge/trainer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>

#include "core_kge/errors.hpp"
#include "support/oracles.hpp"
#include "support/toy_kg.hpp"

using namespace core_kge;

namespace {

constexpr double kWidthRaw02 = -0.4054651081081643;  // realizes to 0.2
constexpr double kWidthRaw01 = -1.3862943611198906;  // realizes to 0.1
constexpr double kSoftplusMinus9 = 0.00012340218972325883;

ModelConfig micro_config(int dim, NormKind norm = NormKind::eL2) {
  ModelConfig c;
  c.dim = dim;
  c.norm = norm;
  return c;
}

/// Ten fixed triples over 12 entities and 2 relations, no duplicates.
KnowledgeGraphDataset ten_triple_kg() {
  KnowledgeGraphDataset data;
  for (int i = 0; i < 12; ++i) data.vocab.add_entity("n" + std::to_string(i));
  data.vocab.add_relation("p");
  data.vocab.add_relation("q");
  data.train = {{0, 0, 1}, {1, 0, 2}, {2, 0, 3},  {3, 0, 4},  {4, 1, 5},
                {5, 1, 6}, {6, 1, 7}, {8, 0, 9},  {9, 1, 10}, {10, 0, 11}};
  return data;
}

KnowledgeGraphDataset two_entity_symmetric_kg() {
  KnowledgeGraphDataset data;
  data.vocab.add_entity("a");
  data.vocab.add_entity("b");
  data.vocab.add_relation("r");
  data.train = {{0, 0, 1}, {1, 0, 0}};
  data.valid = {{0, 0, 1}};
  return data;
}

}  // namespace

TEST(SampleNegatives, CorruptsExactlyOneSlot) {
  Rng rng(3);
  const Triple pos{3, 0, 7};
  const NegativeBatch batch = sample_negatives(rng, pos, 500, 10);
  EXPECT_EQ(batch.per_positive, 500);
  ASSERT_EQ(batch.triples.size(), 500u);
  ASSERT_EQ(batch.head_corrupted.size(), 500u);
  for (std::size_t i = 0; i < batch.triples.size(); ++i) {
    const Triple& n = batch.triples[i];
    EXPECT_EQ(n.relation, pos.relation);
    if (batch.head_corrupted[i]) {
      EXPECT_NE(n.head, pos.head);
      EXPECT_EQ(n.tail, pos.tail);
      EXPECT_GE(n.head, 0);
      EXPECT_LT(n.head, 10);
    } else {
      EXPECT_EQ(n.head, pos.head);
      EXPECT_NE(n.tail, pos.tail);
      EXPECT_GE(n.tail, 0);
      EXPECT_LT(n.tail, 10);
    }
  }
}

TEST(SampleNegatives, DeterministicPerSeed) {
  Rng a(11), b(11), c(12);
  const Triple pos{0, 0, 1};
  const NegativeBatch ba = sample_negatives(a, pos, 64, 8);
  const NegativeBatch bb = sample_negatives(b, pos, 64, 8);
  const NegativeBatch bc = sample_negatives(c, pos, 64, 8);
  EXPECT_EQ(ba.triples, bb.triples);
  EXPECT_EQ(ba.head_corrupted, bb.head_corrupted);
  EXPECT_NE(ba.triples, bc.triples);
}

TEST(SampleNegatives, RoughlyUniform) {
  Rng rng(17);
  const Triple pos{3, 0, 7};
  const int n = 20000;
  const NegativeBatch batch = sample_negatives(rng, pos, n, 10);
  int heads = 0;
  std::vector<int> head_counts(10, 0), tail_counts(10, 0);
  for (std::size_t i = 0; i < batch.triples.size(); ++i) {
    if (batch.head_corrupted[i]) {
      ++heads;
      ++head_counts[static_cast<std::size_t>(batch.triples[i].head)];
    } else {
      ++tail_counts[static_cast<std::size_t>(batch.triples[i].tail)];
    }
  }
  EXPECT_NEAR(static_cast<double>(heads) / n, 0.5, 0.02);
  EXPECT_EQ(head_counts[3], 0);
  EXPECT_EQ(tail_counts[7], 0);
  for (int e = 0; e < 10; ++e) {
    if (e != 3) {
      EXPECT_NEAR(head_counts[e] / (static_cast<double>(heads)), 1.0 / 9.0, 0.02);
    }
    if (e != 7) {
      EXPECT_NEAR(tail_counts[e] / (static_cast<double>(n - heads)), 1.0 / 9.0, 0.02);
    }
  }
}

TEST(SampleNegatives, RejectsDegenerateInputs) {
  Rng rng(5);
  EXPECT_THROW(sample_negatives(rng, {0, 0, 0}, 4, 1), std::invalid_argument);
  EXPECT_THROW(sample_negatives(rng, {0, 0, 1}, 0, 5), std::invalid_argument);
  NegativeBatch out;
  EXPECT_THROW(append_negatives(rng, {0, 0, 1}, 1, 0, out), std::invalid_argument);
}

TEST(WeightedMarginLoss, PositiveTermHandValue) {
  // Points sit exactly on the region centers, so the positive distance is 0
  // and the loss is softplus(-margin).
  Parameters p = blank_params(2, 1, 1);
  p.entities.base = {0.3, 0.8};
  p.relations.head_center_raw = {0.3};
  p.relations.tail_center_raw = {0.8};
  TrainConfig tcfg;
  tcfg.margin = 9.0;
  const double loss = weighted_margin_loss(p, micro_config(1), tcfg, {0, 0, 1}, {}, {}, 1.0,
                                           nullptr);
  EXPECT_NEAR(loss, kSoftplusMinus9, 1e-16);
}

TEST(WeightedMarginLoss, RequiresOneWeightPerNegative) {
  const Parameters p = blank_params(3, 1, 2);
  TrainConfig tcfg;
  const std::vector<Triple> negs{{0, 0, 2}};
  const std::vector<double> weights{0.5, 0.5};
  EXPECT_THROW(weighted_margin_loss(p, micro_config(2), tcfg, {0, 0, 1}, negs, weights, 1.0,
                                    nullptr),
               std::invalid_argument);
}

TEST(SelfAdversarialLoss, SingleNegativeHasWeightOne) {
  Rng rng(23);
  const Parameters p = random_params(rng, 5, 2, 3);
  const ModelConfig mcfg = micro_config(3);
  const Triple pos{0, 0, 1};
  const std::vector<Triple> negs{{0, 0, 3}};
  for (const double alpha : {0.0, 0.5, 2.0}) {
    TrainConfig tcfg;
    tcfg.adversarial_temperature = alpha;
    const double adv = self_adversarial_loss(p, mcfg, tcfg, pos, negs, 1.0, nullptr);
    const std::vector<double> one{1.0};
    const double fixed = weighted_margin_loss(p, mcfg, tcfg, pos, negs, one, 1.0, nullptr);
    EXPECT_DOUBLE_EQ(adv, fixed);
  }
}

TEST(SelfAdversarialLoss, ZeroTemperatureIsUniform) {
  Rng rng(29);
  const Parameters p = random_params(rng, 6, 2, 3);
  const ModelConfig mcfg = micro_config(3);
  const Triple pos{0, 0, 1};
  const std::vector<Triple> negs{{0, 0, 2}, {0, 0, 3}, {0, 0, 4}, {5, 0, 1}};
  TrainConfig tcfg;
  tcfg.adversarial_temperature = 0.0;
  const double adv = self_adversarial_loss(p, mcfg, tcfg, pos, negs, 1.0, nullptr);
  const std::vector<double> uniform(4, 0.25);
  const double fixed = weighted_margin_loss(p, mcfg, tcfg, pos, negs, uniform, 1.0, nullptr);
  EXPECT_NEAR(adv, fixed, 1e-12);
}

TEST(SelfAdversarialLoss, DuplicateNegativesFoldExactly) {
  // Hand-placed points keep every distance small enough that the reference
  // softmax below cannot underflow.
  Parameters p = blank_params(5, 1, 2);
  p.entities.base = {0.10, 0.20, 0.15, 0.30, 0.40, 0.50, 0.70, 0.90, 0.90, 0.05};
  p.relations.head_center_raw = {0.10, 0.20};
  p.relations.tail_center_raw = {0.15, 0.30};
  const ModelConfig mcfg = micro_config(2);
  const Triple pos{0, 0, 1};
  TrainConfig tcfg;
  tcfg.adversarial_temperature = 0.7;

  const std::vector<Triple> negs{{0, 0, 2}, {0, 0, 3}, {0, 0, 2}, {4, 0, 1}, {0, 0, 2}};
  std::vector<double> weights(negs.size());
  double z = 0.0;
  for (std::size_t j = 0; j < negs.size(); ++j) {
    weights[j] = std::exp(-tcfg.adversarial_temperature * triple_distance(p, mcfg, negs[j]));
    z += weights[j];
  }
  for (double& w : weights) w /= z;

  const double adv = self_adversarial_loss(p, mcfg, tcfg, pos, negs, 1.0, nullptr);
  const double fixed = weighted_margin_loss(p, mcfg, tcfg, pos, negs, weights, 1.0, nullptr);
  EXPECT_NEAR(adv, fixed, 1e-12);

  GradBuffer ga, gf;
  ga.resize_like(p);
  gf.resize_like(p);
  self_adversarial_loss(p, mcfg, tcfg, pos, negs, 1.0, &ga);
  weighted_margin_loss(p, mcfg, tcfg, pos, negs, weights, 1.0, &gf);
  for (auto [pa, pf] : {std::pair{&ga.entity_base, &gf.entity_base},
                        std::pair{&ga.entity_bump, &gf.entity_bump},
                        std::pair{&ga.rel_head_center, &gf.rel_head_center},
                        std::pair{&ga.rel_head_width, &gf.rel_head_width},
                        std::pair{&ga.rel_tail_center, &gf.rel_tail_center},
                        std::pair{&ga.rel_tail_width, &gf.rel_tail_width}}) {
    ASSERT_EQ(pa->size(), pf->size());
    for (std::size_t i = 0; i < pa->size(); ++i) {
      EXPECT_NEAR((*pa)[i], (*pf)[i], 1e-12 * std::max(1.0, std::fabs((*pf)[i])));
    }
  }
}

TEST(WidthRegularization, HandValueAndHomogeneity) {
  Parameters p = blank_params(2, 1, 4);
  p.relations.head_width_raw.assign(4, kWidthRaw02);
  p.relations.tail_width_raw.assign(4, kWidthRaw02);
  EXPECT_NEAR(width_regularization(p, 0.0, nullptr), 0.32, 1e-12);

  Parameters q = blank_params(2, 1, 4);
  q.relations.head_width_raw.assign(4, kWidthRaw01);
  q.relations.tail_width_raw.assign(4, kWidthRaw01);
  const double small = width_regularization(q, 0.0, nullptr);
  EXPECT_NEAR(small, 0.08, 1e-12);
  EXPECT_NEAR(4.0 * small, 0.32, 1e-12);

  // Vanishing widths drive the penalty to zero.
  Parameters z = blank_params(2, 1, 4);
  z.relations.head_width_raw.assign(4, -1e3);
  z.relations.tail_width_raw.assign(4, -1e3);
  EXPECT_LT(width_regularization(z, 0.0, nullptr), 1e-20);

  // Two relations average, not sum.
  Parameters two = blank_params(2, 2, 4);
  two.relations.head_width_raw.assign(8, kWidthRaw02);
  two.relations.tail_width_raw.assign(8, kWidthRaw02);
  EXPECT_NEAR(width_regularization(two, 0.0, nullptr), 0.32, 1e-12);
}

TEST(AdamUpdate, FirstStepMovesByLearningRate) {
  Parameters p = blank_params(1, 1, 2);
  p.entities.base = {0.4, 0.6};
  OptimizerState opt;
  opt.resize_like(p);
  GradBuffer g;
  g.resize_like(p);
  g.entity_base = {0.5, -0.25};

  adam_update(p, opt, g, 1e-3);
  EXPECT_EQ(opt.step, 1);
  // Bias correction makes the first step lr * g/(|g| + eps), about lr.
  EXPECT_NEAR(p.entities.base[0], 0.4 - 1e-3, 1e-9);
  EXPECT_NEAR(p.entities.base[1], 0.6 + 1e-3, 1e-9);
  // Zero-gradient slots stay put.
  EXPECT_EQ(p.entities.bump[0], 0.0);
}

TEST(Gradients, EndToEndMatchesFiniteDifferences) {
  Rng rng(37);
  const ModelConfig mcfg = micro_config(4);
  TrainConfig tcfg;
  tcfg.margin = 9.0;
  tcfg.adversarial_temperature = 0.5;
  const double lambda = 0.7;

  Parameters params;
  Triple pos{0, 0, 1};
  std::vector<Triple> negs;
  bool found = false;
  for (int attempt = 0; attempt < 200 && !found; ++attempt) {
    params = random_params(rng, 6, 2, 4);
    pos = {0, static_cast<std::int32_t>(rng.uniform_index(2)), 1};
    negs.clear();
    for (std::int32_t e = 2; e < 6; ++e) negs.push_back({pos.head, pos.relation, e});
    for (std::int32_t e = 2; e < 5; ++e) negs.push_back({e, pos.relation, pos.tail});
    std::vector<Triple> all = negs;
    all.push_back(pos);
    found = away_from_kinks(params, mcfg, all, 5e-4);
  }
  ASSERT_TRUE(found);

  // Adversarial weights frozen at the expansion point.
  std::vector<double> weights(negs.size());
  double z = 0.0;
  for (std::size_t j = 0; j < negs.size(); ++j) {
    weights[j] = std::exp(-tcfg.adversarial_temperature * triple_distance(params, mcfg, negs[j]));
    z += weights[j];
  }
  for (double& w : weights) w /= z;

  GradBuffer grads;
  grads.resize_like(params);
  self_adversarial_loss(params, mcfg, tcfg, pos, negs, 1.0, &grads);
  width_regularization(params, lambda, &grads);

  const auto frozen_total = [&](const Parameters& q) {
    return weighted_margin_loss(q, mcfg, tcfg, pos, negs, weights, 1.0, nullptr) +
           lambda * width_regularization(q, 0.0, nullptr);
  };
  EXPECT_LT(max_grad_mismatch(params, grads, frozen_total, 1e-5), 1e-3);
}

TEST(Gradients, ZeroTemperatureLossMatchesFiniteDifferences) {
  Rng rng(41);
  const ModelConfig mcfg = micro_config(4);
  TrainConfig tcfg;
  tcfg.adversarial_temperature = 0.0;

  Parameters params;
  Triple pos{0, 0, 1};
  std::vector<Triple> negs;
  bool found = false;
  for (int attempt = 0; attempt < 200 && !found; ++attempt) {
    params = random_params(rng, 5, 1, 4);
    pos = {0, 0, 1};
    negs = {{0, 0, 2}, {0, 0, 3}, {2, 0, 1}, {4, 0, 1}};
    std::vector<Triple> all = negs;
    all.push_back(pos);
    found = away_from_kinks(params, mcfg, all, 5e-4);
  }
  ASSERT_TRUE(found);

  GradBuffer grads;
  grads.resize_like(params);
  self_adversarial_loss(params, mcfg, tcfg, pos, negs, 1.0, &grads);

  // With temperature 0 the weights are constant, so the loss itself is the
  // finite-difference target.
  const auto loss = [&](const Parameters& q) {
    return self_adversarial_loss(q, mcfg, tcfg, pos, negs, 1.0, nullptr);
  };
  EXPECT_LT(max_grad_mismatch(params, grads, loss, 1e-5), 1e-3);
}

TEST(TrainStep, SinglePositiveDescendsItsDistance) {
  Rng rng(43);
  const ModelConfig mcfg = micro_config(4);
  TrainConfig tcfg;
  const Parameters start = random_params(rng, 4, 1, 4);
  const Triple pos{0, 0, 1};

  Parameters params = start;
  OptimizerState opt;
  opt.resize_like(params);
  GradBuffer grads;
  grads.resize_like(params);

  const double before = triple_distance(params, mcfg, pos);
  weighted_margin_loss(params, mcfg, tcfg, pos, {}, {}, 1.0, &grads);
  adam_update(params, opt, grads, tcfg.learning_rate);
  const double after = triple_distance(params, mcfg, pos);
  EXPECT_LT(after, before);
}

TEST(TrainStep, LambdaZeroKeepsTotalEqualToModelLoss) {
  Rng rng(47);
  const ModelConfig mcfg = micro_config(3);
  TrainConfig tcfg;
  tcfg.reg_lambda = 0.0;
  tcfg.batch_size = 2;
  tcfg.negatives_per_positive = 4;

  Parameters params = random_params(rng, 6, 2, 3);
  OptimizerState opt;
  opt.resize_like(params);
  GradBuffer grads;
  grads.resize_like(params);

  const std::vector<Triple> positives{{0, 0, 1}, {2, 1, 3}};
  NegativeBatch negatives;
  negatives.per_positive = 4;
  for (const Triple& p : positives) append_negatives(rng, p, 4, 6, negatives);

  const StepStats stats = train_step(params, opt, positives, negatives, mcfg, tcfg, grads);
  EXPECT_EQ(stats.total, stats.kge);
  // The regularizer value is reported even when it does not enter the total.
  EXPECT_GT(stats.reg, 0.0);
  EXPECT_TRUE(std::isfinite(stats.total));

  // With a nonzero lambda the regularizer value reports unweighted.
  tcfg.reg_lambda = 0.5;
  const StepStats stats2 = train_step(params, opt, positives, negatives, mcfg, tcfg, grads);
  EXPECT_NEAR(stats2.total, stats2.kge + 0.5 * stats2.reg, 1e-15);
  EXPECT_GT(stats2.reg, 0.0);
}

TEST(TrainStep, RejectsShapeMismatch) {
  Rng rng(53);
  const ModelConfig mcfg = micro_config(2);
  TrainConfig tcfg;
  Parameters params = random_params(rng, 4, 1, 2);
  OptimizerState opt;
  opt.resize_like(params);
  GradBuffer grads;
  grads.resize_like(params);

  const std::vector<Triple> positives{{0, 0, 1}};
  NegativeBatch negatives;
  negatives.per_positive = 3;
  append_negatives(rng, positives[0], 2, 4, negatives);  // wrong count on purpose
  EXPECT_THROW(train_step(params, opt, positives, negatives, mcfg, tcfg, grads),
               std::invalid_argument);
  EXPECT_THROW(train_step(params, opt, {}, negatives, mcfg, tcfg, grads), std::invalid_argument);
}

TEST(TrainStep, AbortsOnNonFiniteLoss) {
  const KnowledgeGraphDataset data = ten_triple_kg();
  ModelConfig mcfg = micro_config(4);
  TrainConfig tcfg;
  tcfg.learning_rate = 1e308;  // blows coordinates up to inf, then NaN
  tcfg.batch_size = 4;
  tcfg.negatives_per_positive = 4;
  tcfg.max_steps = 20;
  tcfg.valid_interval = 100;
  try {
    train(data, mcfg, tcfg);
    FAIL() << "expected RuntimeFailure";
  } catch (const RuntimeFailure& e) {
    EXPECT_NE(std::string(e.what()).find("non-finite"), std::string::npos) << e.what();
  }
}

TEST(Train, LossFallsBelowTenPercentIn500Steps) {
  const KnowledgeGraphDataset data = ten_triple_kg();
  const ModelConfig mcfg = micro_config(8);
  TrainConfig tcfg;
  tcfg.reg_lambda = 0.0;
  tcfg.batch_size = 10;
  tcfg.negatives_per_positive = 32;
  tcfg.seed = 42;

  Parameters params = init_params(mcfg, data.vocab.num_entities(), data.vocab.num_relations());
  OptimizerState opt;
  opt.resize_like(params);
  GradBuffer grads;
  grads.resize_like(params);
  Rng rng(tcfg.seed);

  NegativeBatch negatives;
  negatives.per_positive = tcfg.negatives_per_positive;
  double first = 0.0, last = 0.0;
  for (int step = 1; step <= 500; ++step) {
    negatives.clear();
    for (const Triple& p : data.train) {
      append_negatives(rng, p, tcfg.negatives_per_positive, data.vocab.num_entities(),
                       negatives);
    }
    const StepStats stats = train_step(params, opt, data.train, negatives, mcfg, tcfg, grads);
    if (step == 1) first = stats.total;
    last = stats.total;
  }
  EXPECT_LT(last, 0.1 * first) << "first=" << first << " last=" << last;
}

TEST(Train, DeterministicAcrossRuns) {
  const KnowledgeGraphDataset data = ten_triple_kg();
  const ModelConfig mcfg = micro_config(8);
  TrainConfig tcfg;
  tcfg.batch_size = 8;
  tcfg.negatives_per_positive = 16;
  tcfg.max_steps = 60;
  tcfg.valid_interval = 20;

  const TrainResult a = train(data, mcfg, tcfg);
  const TrainResult b = train(data, mcfg, tcfg);

  EXPECT_EQ(a.final_params.entities.base, b.final_params.entities.base);
  EXPECT_EQ(a.final_params.entities.bump, b.final_params.entities.bump);
  EXPECT_EQ(a.final_params.relations.head_center_raw, b.final_params.relations.head_center_raw);
  EXPECT_EQ(a.final_params.relations.tail_width_raw, b.final_params.relations.tail_width_raw);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(a.history[i].step, b.history[i].step);
    EXPECT_EQ(a.history[i].train_loss, b.history[i].train_loss);
    EXPECT_EQ(a.history[i].valid_mrr, b.history[i].valid_mrr);
  }
}

TEST(Train, HistoryBookkeepingWithPatienceDisabled) {
  KnowledgeGraphDataset data = ten_triple_kg();
  data.valid = {data.train[0], data.train[5]};
  const ModelConfig mcfg = micro_config(4);
  TrainConfig tcfg;
  tcfg.batch_size = 4;
  tcfg.negatives_per_positive = 8;
  tcfg.max_steps = 120;
  tcfg.valid_interval = 40;
  tcfg.patience = 0;

  int callbacks = 0;
  const TrainResult res = train(data, mcfg, tcfg, [&](const ValidationRecord&) { ++callbacks; });
  EXPECT_EQ(res.steps_completed, 120);
  ASSERT_EQ(res.history.size(), 3u);
  EXPECT_EQ(callbacks, 3);
  EXPECT_EQ(res.history[0].step, 40);
  EXPECT_EQ(res.history[1].step, 80);
  EXPECT_EQ(res.history[2].step, 120);
  for (const ValidationRecord& r : res.history) {
    EXPECT_TRUE(std::isfinite(r.train_loss));
    EXPECT_GE(r.valid_mrr, 0.0);
    EXPECT_LE(r.valid_mrr, 1.0);
  }
  EXPECT_GT(res.best_mrr, 0.0);
  EXPECT_GE(res.best_step, 40);
}

TEST(Train, EmptyValidationSkipsHistoryAndKeepsFinal) {
  const KnowledgeGraphDataset data = ten_triple_kg();
  const ModelConfig mcfg = micro_config(4);
  TrainConfig tcfg;
  tcfg.batch_size = 4;
  tcfg.negatives_per_positive = 8;
  tcfg.max_steps = 30;
  tcfg.valid_interval = 10;

  const TrainResult res = train(data, mcfg, tcfg);
  EXPECT_TRUE(res.history.empty());
  EXPECT_EQ(res.steps_completed, 30);
  EXPECT_EQ(res.best_params.entities.base, res.final_params.entities.base);
  EXPECT_EQ(res.best_step, 30);
}

TEST(Train, TwoEntitySymmetricReachesPerfectHits) {
  const KnowledgeGraphDataset data = two_entity_symmetric_kg();
  const ModelConfig mcfg = micro_config(8);
  TrainConfig tcfg;
  tcfg.batch_size = 2;
  tcfg.negatives_per_positive = 1;
  tcfg.learning_rate = 1e-2;
  tcfg.max_steps = 2000;
  tcfg.valid_interval = 50;
  tcfg.patience = 3;

  const TrainResult res = train(data, mcfg, tcfg);
  EXPECT_EQ(res.best_mrr, 1.0);
  ASSERT_FALSE(res.history.empty());
  EXPECT_EQ(res.history.back().valid_hits1, 1.0);
  // Patience cuts the run short once the metric stops improving.
  EXPECT_LT(res.steps_completed, 2000);
}

TEST(Train, ValidatesConfiguration) {
  const KnowledgeGraphDataset data = ten_triple_kg();
  const ModelConfig mcfg = micro_config(4);
  const auto expect_rejected = [&](auto mutate) {
    TrainConfig bad;
    mutate(bad);
    EXPECT_THROW(train(data, mcfg, bad), std::invalid_argument);
  };
  expect_rejected([](TrainConfig& c) { c.margin = 0.0; });
  expect_rejected([](TrainConfig& c) { c.margin = -1.0; });
  expect_rejected([](TrainConfig& c) { c.adversarial_temperature = -0.5; });
  expect_rejected([](TrainConfig& c) { c.reg_lambda = -0.1; });
  expect_rejected([](TrainConfig& c) { c.batch_size = 0; });
  expect_rejected([](TrainConfig& c) { c.negatives_per_positive = 0; });
  expect_rejected([](TrainConfig& c) { c.max_steps = 0; });
  expect_rejected([](TrainConfig& c) { c.valid_interval = 0; });
  expect_rejected([](TrainConfig& c) { c.patience = -1; });

  KnowledgeGraphDataset empty;
  empty.vocab.add_entity("a");
  empty.vocab.add_entity("b");
  empty.vocab.add_relation("r");
  EXPECT_THROW(train(empty, mcfg, TrainConfig{}), std::invalid_argument);
}

TEST(Train, WidthsShrinkAsLambdaGrows) {
  const KnowledgeGraphDataset data = ten_triple_kg();
  const ModelConfig mcfg = micro_config(8);
  std::vector<double> widths;
  for (const double lambda : {0.0, 0.5, 1.0}) {
    TrainConfig tcfg;
    tcfg.reg_lambda = lambda;
    tcfg.batch_size = 10;
    tcfg.negatives_per_positive = 16;
    tcfg.max_steps = 300;
    tcfg.valid_interval = 1000;
    const TrainResult res = train(data, mcfg, tcfg);
    widths.push_back(mean_realized_width(res.final_params));
  }
  EXPECT_GE(widths[0], widths[1]);
  EXPECT_GE(widths[1], widths[2]);
}
