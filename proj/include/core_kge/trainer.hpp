#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "core_kge/dataset.hpp"
#include "core_kge/model.hpp"
#include "core_kge/rng.hpp"

namespace core_kge {

struct TrainConfig {
  double margin = 9.0;                  // gamma
  double adversarial_temperature = 0.5; // alpha; 0 weighs all negatives equally
  double reg_lambda = 1.0;              // weight of the width penalty
  double learning_rate = 1e-2;
  int batch_size = 512;
  int negatives_per_positive = 1024;
  std::int64_t max_steps = 100000;
  std::int64_t valid_interval = 1000;
  int patience = 0;  // evaluations without MRR improvement before stopping; 0 disables
  std::uint64_t seed = 42;
};

/// Corrupted triples, flattened: negatives for positive i occupy
/// [i*per_positive, (i+1)*per_positive).
struct NegativeBatch {
  int per_positive = 0;
  std::vector<Triple> triples;
  std::vector<std::uint8_t> head_corrupted;

  void clear() {
    triples.clear();
    head_corrupted.clear();
  }
};

/// Appends n corruptions of the positive, each replacing the head or the tail
/// (side chosen uniformly per negative) with a uniformly drawn entity distinct
/// from the original. Throws std::invalid_argument when num_entities < 2.
void append_negatives(Rng& rng, const Triple& positive, int n, std::int64_t num_entities,
                      NegativeBatch& out);

NegativeBatch sample_negatives(Rng& rng, const Triple& positive, int n,
                               std::int64_t num_entities);

/// Dense gradient (and Adam moment) storage mirroring Parameters.
struct GradBuffer {
  std::vector<double> entity_base;
  std::vector<double> entity_bump;
  std::vector<double> rel_head_center;
  std::vector<double> rel_head_width;
  std::vector<double> rel_tail_center;
  std::vector<double> rel_tail_width;

  void resize_like(const Parameters& params);
  void clear();
};

struct OptimizerState {
  std::int64_t step = 0;
  GradBuffer m;
  GradBuffer v;

  void resize_like(const Parameters& params);
};

/// One Adam step (beta1=0.9, beta2=0.999, eps=1e-8, bias correction) over every
/// parameter array.
void adam_update(Parameters& params, OptimizerState& opt, const GradBuffer& grads, double lr);

/// Margin loss of one positive against its negatives with caller-supplied
/// constant weights (one per negative):
///   softplus(d_pos - margin) + sum_i weight_i * softplus(margin - d_neg_i).
/// When grads is non-null, coef * d(loss)/d(params) accumulates into it.
double weighted_margin_loss(const Parameters& params, const ModelConfig& mcfg,
                            const TrainConfig& tcfg, const Triple& positive,
                            std::span<const Triple> negatives, std::span<const double> weights,
                            double coef, GradBuffer* grads);

/// Same loss with the weights set to softmax(-temperature * d_neg) over the
/// negatives, treated as constants (no gradient flows through them).
/// Negatives must follow the NegativeBatch contract: same relation as the
/// positive, exactly one entity slot corrupted; duplicates are folded on that
/// assumption.
double self_adversarial_loss(const Parameters& params, const ModelConfig& mcfg,
                             const TrainConfig& tcfg, const Triple& positive,
                             std::span<const Triple> negatives, double coef, GradBuffer* grads);

/// Mean squared realized width per relation:
///   (1/|R|) sum_r (||w_head||_2^2 + ||w_tail||_2^2).
/// Accumulates scale * gradient (through the width reparameterization) when
/// grads is non-null; returns the unscaled value.
double width_regularization(const Parameters& params, double scale, GradBuffer* grads);

struct StepStats {
  double total = 0.0;
  double kge = 0.0;  // mean over the batch's positives
  double reg = 0.0;  // unweighted penalty value
};

/// Reusable buffers for train_step.
struct TrainWorkspace {
  GradBuffer grads;
  NegativeBatch negatives;
  std::vector<Triple> positives;
};

/// Forward + backward over the batch, one Adam update. Throws RuntimeFailure
/// with the offending triple when the loss turns non-finite.
StepStats train_step(Parameters& params, OptimizerState& opt, std::span<const Triple> positives,
                     const NegativeBatch& negatives, const ModelConfig& mcfg,
                     const TrainConfig& tcfg, GradBuffer& grads);

struct ValidationRecord {
  std::int64_t step = 0;
  double train_loss = 0.0;
  double train_kge = 0.0;
  double train_reg = 0.0;
  double valid_mrr = 0.0;
  double valid_hits1 = 0.0;
  double valid_hits3 = 0.0;
  double valid_hits10 = 0.0;
};

struct TrainResult {
  Parameters best_params;   // highest validation MRR seen (final params if never validated)
  Parameters final_params;
  OptimizerState opt_state;
  std::vector<ValidationRecord> history;  // one record per validation event
  std::int64_t steps_completed = 0;
  double best_mrr = -1.0;
  std::int64_t best_step = 0;
};

using ValidationCallback = std::function<void(const ValidationRecord&)>;

/// Full training loop: shuffled batches, periodic filtered-MRR validation on a
/// fixed subsample of at most 1000 validation triples, best-parameter
/// tracking, optional patience-based early stop.
TrainResult train(const KnowledgeGraphDataset& data, const ModelConfig& mcfg,
                  const TrainConfig& tcfg, const ValidationCallback& on_validation = nullptr);

}  // namespace core_kge
