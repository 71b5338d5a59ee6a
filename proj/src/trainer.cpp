#include "core_kge/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "core_kge/errors.hpp"
#include "core_kge/evaluator.hpp"

namespace core_kge {

namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

inline double softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

std::string triple_str(const Triple& t) {
  return "(" + std::to_string(t.head) + ", " + std::to_string(t.relation) + ", " +
         std::to_string(t.tail) + ")";
}

}  // namespace

void append_negatives(Rng& rng, const Triple& positive, int n, std::int64_t num_entities,
                      NegativeBatch& out) {
  if (n < 1) throw std::invalid_argument("append_negatives: need n >= 1");
  if (num_entities < 2) {
    throw std::invalid_argument("append_negatives: cannot corrupt with fewer than 2 entities");
  }
  out.triples.reserve(out.triples.size() + static_cast<std::size_t>(n));
  out.head_corrupted.reserve(out.head_corrupted.size() + static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const bool corrupt_head = rng.uniform_index(2) == 0;
    const std::int32_t original = corrupt_head ? positive.head : positive.tail;
    std::int32_t replacement;
    do {
      replacement = static_cast<std::int32_t>(rng.uniform_index(
          static_cast<std::uint64_t>(num_entities)));
    } while (replacement == original);
    Triple neg = positive;
    (corrupt_head ? neg.head : neg.tail) = replacement;
    out.triples.push_back(neg);
    out.head_corrupted.push_back(corrupt_head ? 1 : 0);
  }
}

NegativeBatch sample_negatives(Rng& rng, const Triple& positive, int n,
                               std::int64_t num_entities) {
  NegativeBatch batch;
  batch.per_positive = n;
  append_negatives(rng, positive, n, num_entities, batch);
  return batch;
}

void GradBuffer::resize_like(const Parameters& params) {
  entity_base.assign(params.entities.base.size(), 0.0);
  entity_bump.assign(params.entities.bump.size(), 0.0);
  rel_head_center.assign(params.relations.head_center_raw.size(), 0.0);
  rel_head_width.assign(params.relations.head_width_raw.size(), 0.0);
  rel_tail_center.assign(params.relations.tail_center_raw.size(), 0.0);
  rel_tail_width.assign(params.relations.tail_width_raw.size(), 0.0);
}

void GradBuffer::clear() {
  std::fill(entity_base.begin(), entity_base.end(), 0.0);
  std::fill(entity_bump.begin(), entity_bump.end(), 0.0);
  std::fill(rel_head_center.begin(), rel_head_center.end(), 0.0);
  std::fill(rel_head_width.begin(), rel_head_width.end(), 0.0);
  std::fill(rel_tail_center.begin(), rel_tail_center.end(), 0.0);
  std::fill(rel_tail_width.begin(), rel_tail_width.end(), 0.0);
}

void OptimizerState::resize_like(const Parameters& params) {
  step = 0;
  m.resize_like(params);
  v.resize_like(params);
}

namespace {

void adam_apply(std::vector<double>& x, std::vector<double>& m, std::vector<double>& v,
                const std::vector<double>& g, double lr, double bc1, double bc2) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
    v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
    x[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kAdamEps);
  }
}

}  // namespace

void adam_update(Parameters& params, OptimizerState& opt, const GradBuffer& grads, double lr) {
  opt.step += 1;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(opt.step));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(opt.step));
  adam_apply(params.entities.base, opt.m.entity_base, opt.v.entity_base, grads.entity_base, lr,
             bc1, bc2);
  adam_apply(params.entities.bump, opt.m.entity_bump, opt.v.entity_bump, grads.entity_bump, lr,
             bc1, bc2);
  adam_apply(params.relations.head_center_raw, opt.m.rel_head_center, opt.v.rel_head_center,
             grads.rel_head_center, lr, bc1, bc2);
  adam_apply(params.relations.head_width_raw, opt.m.rel_head_width, opt.v.rel_head_width,
             grads.rel_head_width, lr, bc1, bc2);
  adam_apply(params.relations.tail_center_raw, opt.m.rel_tail_center, opt.v.rel_tail_center,
             grads.rel_tail_center, lr, bc1, bc2);
  adam_apply(params.relations.tail_width_raw, opt.m.rel_tail_width, opt.v.rel_tail_width,
             grads.rel_tail_width, lr, bc1, bc2);
}

namespace {

/// Scratch buffers reused across loss calls on one thread. A training step
/// runs the loss once per positive, so per-call allocation and the repeated
/// negative fold dominated the step time before these were hoisted.
struct LossWorkspace {
  std::vector<DimDistGrad> dim_grads;
  std::vector<std::int32_t> counts;
  std::vector<std::size_t> touched;
  std::vector<Triple> uniques;
  std::vector<double> multiplicity;
  std::vector<double> dist;
  std::vector<double> weight;
  std::vector<double> width;        // realized widths of one relation, head then tail
  std::vector<double> width_chain;  // matching d(realized)/d(raw) factors
};

LossWorkspace& workspace() {
  thread_local LossWorkspace ws;
  return ws;
}

/// Gradient terms scaled below this are smaller than double rounding noise on
/// the accumulated buffers, so negatives that far outside the margin are not
/// differentiated at all.
constexpr double kNegligibleCoef = 1e-30;

/// coef * d(side distance)/d(params) accumulated into the buffer. Each
/// per-dimension kernel is evaluated once; scratch keeps value and partials
/// together between the norm pass and the composition pass.
void side_grad(const Parameters& P, const ModelConfig& cfg, std::int32_t base_id,
               std::int32_t bump_id, std::int32_t rel, Side side, double coef, GradBuffer& G,
               std::vector<DimDistGrad>& scratch) {
  const int dim = P.entities.dim;
  const double* bp = P.entities.base.data() + static_cast<std::int64_t>(base_id) * dim;
  const double* up = P.entities.bump.data() + static_cast<std::int64_t>(bump_id) * dim;
  const std::int64_t roff = static_cast<std::int64_t>(rel) * dim;
  const double* cr = (side == Side::Head ? P.relations.head_center_raw.data()
                                         : P.relations.tail_center_raw.data()) +
                     roff;
  const double* wr = (side == Side::Head ? P.relations.head_width_raw.data()
                                         : P.relations.tail_width_raw.data()) +
                     roff;
  double* g_base = G.entity_base.data() + static_cast<std::int64_t>(base_id) * dim;
  double* g_bump = G.entity_bump.data() + static_cast<std::int64_t>(bump_id) * dim;
  double* g_center =
      (side == Side::Head ? G.rel_head_center.data() : G.rel_tail_center.data()) + roff;
  double* g_width =
      (side == Side::Head ? G.rel_head_width.data() : G.rel_tail_width.data()) + roff;

  scratch.resize(static_cast<std::size_t>(dim));
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double x = cfg.bump_enabled ? bp[i] + up[i] : bp[i];
    const double w = realized_width(wr[i]);
    DimDistGrad g = dim_region_distance_grad(x, cr[i], w, cfg.torus_enabled);
    g.d_width *= realized_width_grad(w);
    scratch[static_cast<std::size_t>(i)] = g;
    acc += cfg.norm == NormKind::L1 ? std::fabs(g.value) : g.value * g.value;
  }
  const double l2_norm = cfg.norm == NormKind::L2 ? std::sqrt(acc) : 0.0;

  for (int i = 0; i < dim; ++i) {
    const DimDistGrad& g = scratch[static_cast<std::size_t>(i)];
    double agg;
    switch (cfg.norm) {
      case NormKind::L1:
        agg = g.value > 0.0 ? 1.0 : 0.0;
        break;
      case NormKind::L2:
        agg = l2_norm > 0.0 ? g.value / l2_norm : 0.0;
        break;
      default:
        agg = 2.0 * g.value;
        break;
    }
    const double f = coef * agg;
    g_base[i] += f * g.d_point;
    if (cfg.bump_enabled) g_bump[i] += f * g.d_point;
    g_center[i] += f * g.d_center;
    g_width[i] += f * g.d_width;
  }
}

void accumulate_distance_grad(const Parameters& P, const ModelConfig& cfg, const Triple& t,
                              double coef, GradBuffer& G, std::vector<DimDistGrad>& scratch) {
  side_grad(P, cfg, t.head, t.tail, t.relation, Side::Head, coef, G, scratch);
  side_grad(P, cfg, t.tail, t.head, t.relation, Side::Tail, coef, G, scratch);
}

void require_triple_in_range(const Parameters& P, const Triple& t, const char* what) {
  if (t.head < 0 || t.head >= P.entities.count || t.tail < 0 || t.tail >= P.entities.count) {
    throw std::invalid_argument(std::string(what) + ": entity id out of range");
  }
  if (t.relation < 0 || t.relation >= P.relations.count) {
    throw std::invalid_argument(std::string(what) + ": relation id out of range");
  }
}

/// Realized widths of one relation and their reparameterization chain
/// factors, evaluated once per loss call. Every triple in the call shares the
/// relation, so this replaces one sigmoid per dimension per triple.
void fill_width_cache(const Parameters& P, std::int32_t rel, LossWorkspace& ws) {
  const int dim = P.relations.dim;
  ws.width.resize(2 * static_cast<std::size_t>(dim));
  ws.width_chain.resize(2 * static_cast<std::size_t>(dim));
  const std::int64_t roff = static_cast<std::int64_t>(rel) * dim;
  const double* hw = P.relations.head_width_raw.data() + roff;
  const double* tw = P.relations.tail_width_raw.data() + roff;
  for (int i = 0; i < dim; ++i) {
    const double w = realized_width(hw[i]);
    ws.width[static_cast<std::size_t>(i)] = w;
    ws.width_chain[static_cast<std::size_t>(i)] = realized_width_grad(w);
  }
  for (int i = 0; i < dim; ++i) {
    const double w = realized_width(tw[i]);
    ws.width[static_cast<std::size_t>(dim + i)] = w;
    ws.width_chain[static_cast<std::size_t>(dim + i)] = realized_width_grad(w);
  }
}

/// triple_distance for a triple of the cached relation; same value bit for
/// bit, with the width sigmoids read from the cache.
double cached_triple_distance(const Parameters& P, const ModelConfig& cfg, const Triple& t,
                              const LossWorkspace& ws) {
  const int dim = P.entities.dim;
  double total = 0.0;
  for (int side = 0; side < 2; ++side) {
    const std::int32_t base_id = side == 0 ? t.head : t.tail;
    const std::int32_t bump_id = side == 0 ? t.tail : t.head;
    const double* bp = P.entities.base.data() + static_cast<std::int64_t>(base_id) * dim;
    const double* up = P.entities.bump.data() + static_cast<std::int64_t>(bump_id) * dim;
    const std::int64_t roff = static_cast<std::int64_t>(t.relation) * dim;
    const double* cr = (side == 0 ? P.relations.head_center_raw.data()
                                  : P.relations.tail_center_raw.data()) +
                       roff;
    const double* wc = ws.width.data() + static_cast<std::size_t>(side) * dim;
    double acc = 0.0;
    if (cfg.norm == NormKind::L1) {
      for (int i = 0; i < dim; ++i) {
        const double x = cfg.bump_enabled ? bp[i] + up[i] : bp[i];
        acc += std::fabs(dim_region_distance(dim_delta(x, cr[i], cfg.torus_enabled), wc[i]));
      }
    } else {
      for (int i = 0; i < dim; ++i) {
        const double x = cfg.bump_enabled ? bp[i] + up[i] : bp[i];
        const double v = dim_region_distance(dim_delta(x, cr[i], cfg.torus_enabled), wc[i]);
        acc += v * v;
      }
    }
    total += cfg.norm == NormKind::L2 ? std::sqrt(acc) : acc;
  }
  return total;
}

/// coef * d(triple distance)/d(params) with cached widths; each per-dimension
/// kernel runs once.
void cached_distance_grad(const Parameters& P, const ModelConfig& cfg, const Triple& t,
                          double coef, GradBuffer& G, LossWorkspace& ws) {
  const int dim = P.entities.dim;
  ws.dim_grads.resize(static_cast<std::size_t>(dim));
  for (int side = 0; side < 2; ++side) {
    const std::int32_t base_id = side == 0 ? t.head : t.tail;
    const std::int32_t bump_id = side == 0 ? t.tail : t.head;
    const double* bp = P.entities.base.data() + static_cast<std::int64_t>(base_id) * dim;
    const double* up = P.entities.bump.data() + static_cast<std::int64_t>(bump_id) * dim;
    const std::int64_t roff = static_cast<std::int64_t>(t.relation) * dim;
    const double* cr = (side == 0 ? P.relations.head_center_raw.data()
                                  : P.relations.tail_center_raw.data()) +
                       roff;
    const double* wc = ws.width.data() + static_cast<std::size_t>(side) * dim;
    const double* chain = ws.width_chain.data() + static_cast<std::size_t>(side) * dim;
    double* g_base = G.entity_base.data() + static_cast<std::int64_t>(base_id) * dim;
    double* g_bump = G.entity_bump.data() + static_cast<std::int64_t>(bump_id) * dim;
    double* g_center =
        (side == 0 ? G.rel_head_center.data() : G.rel_tail_center.data()) + roff;
    double* g_width = (side == 0 ? G.rel_head_width.data() : G.rel_tail_width.data()) + roff;

    double acc = 0.0;
    for (int i = 0; i < dim; ++i) {
      const double x = cfg.bump_enabled ? bp[i] + up[i] : bp[i];
      DimDistGrad g = dim_region_distance_grad(x, cr[i], wc[i], cfg.torus_enabled);
      g.d_width *= chain[i];
      ws.dim_grads[static_cast<std::size_t>(i)] = g;
      acc += cfg.norm == NormKind::L1 ? std::fabs(g.value) : g.value * g.value;
    }
    const double l2_norm = cfg.norm == NormKind::L2 ? std::sqrt(acc) : 0.0;

    for (int i = 0; i < dim; ++i) {
      const DimDistGrad& g = ws.dim_grads[static_cast<std::size_t>(i)];
      double agg;
      switch (cfg.norm) {
        case NormKind::L1:
          agg = g.value > 0.0 ? 1.0 : 0.0;
          break;
        case NormKind::L2:
          agg = l2_norm > 0.0 ? g.value / l2_norm : 0.0;
          break;
        default:
          agg = 2.0 * g.value;
          break;
      }
      const double f = coef * agg;
      g_base[i] += f * g.d_point;
      if (cfg.bump_enabled) g_bump[i] += f * g.d_point;
      g_center[i] += f * g.d_center;
      g_width[i] += f * g.d_width;
    }
  }
}

}  // namespace

double weighted_margin_loss(const Parameters& params, const ModelConfig& mcfg,
                            const TrainConfig& tcfg, const Triple& positive,
                            std::span<const Triple> negatives, std::span<const double> weights,
                            double coef, GradBuffer* grads) {
  if (weights.size() != negatives.size()) {
    throw std::invalid_argument("weighted_margin_loss: one weight per negative required");
  }
  std::vector<DimDistGrad> scratch;
  const double d_pos = triple_distance(params, mcfg, positive);
  double loss = softplus(d_pos - tcfg.margin);
  if (grads != nullptr) {
    const double kappa = stable_sigmoid(d_pos - tcfg.margin);
    accumulate_distance_grad(params, mcfg, positive, coef * kappa, *grads, scratch);
  }
  for (std::size_t j = 0; j < negatives.size(); ++j) {
    const double d_neg = triple_distance(params, mcfg, negatives[j]);
    loss += weights[j] * softplus(tcfg.margin - d_neg);
    if (grads != nullptr) {
      const double kappa = -weights[j] * stable_sigmoid(tcfg.margin - d_neg);
      accumulate_distance_grad(params, mcfg, negatives[j], coef * kappa, *grads, scratch);
    }
  }
  return loss;
}

double self_adversarial_loss(const Parameters& params, const ModelConfig& mcfg,
                             const TrainConfig& tcfg, const Triple& positive,
                             std::span<const Triple> negatives, double coef, GradBuffer* grads) {
  LossWorkspace& ws = workspace();
  require_triple_in_range(params, positive, "self_adversarial_loss");
  fill_width_cache(params, positive.relation, ws);
  const double d_pos = cached_triple_distance(params, mcfg, positive, ws);
  double loss = softplus(d_pos - tcfg.margin);
  if (grads != nullptr) {
    const double kappa = stable_sigmoid(d_pos - tcfg.margin);
    cached_distance_grad(params, mcfg, positive, coef * kappa, *grads, ws);
  }
  if (negatives.empty()) return loss;

  // Negatives keep the positive's relation and one of its entities and never
  // restore the replaced entity, so the corrupted (side, entity) pair
  // identifies each triple. A counting pass groups the repeats that occur
  // under with-replacement sampling, ordering groups by first occurrence.
  const std::size_t slot_count = 2 * static_cast<std::size_t>(params.entities.count);
  if (ws.counts.size() < slot_count) ws.counts.assign(slot_count, 0);
  ws.touched.clear();
  ws.uniques.clear();
  for (const Triple& neg : negatives) {
    if (neg.head < 0 || neg.head >= params.entities.count || neg.tail < 0 ||
        neg.tail >= params.entities.count) {
      throw std::invalid_argument("self_adversarial_loss: negative entity id out of range");
    }
    if (neg.relation != positive.relation) {
      throw std::invalid_argument(
          "self_adversarial_loss: negatives must share the positive's relation");
    }
    const std::size_t slot = neg.head == positive.head
                                 ? 2 * static_cast<std::size_t>(neg.tail)
                                 : 2 * static_cast<std::size_t>(neg.head) + 1;
    if (ws.counts[slot] == 0) {
      ws.touched.push_back(slot);
      ws.uniques.push_back(neg);
    }
    ws.counts[slot] += 1;
  }
  const std::size_t u = ws.uniques.size();
  ws.multiplicity.resize(u);
  for (std::size_t k = 0; k < u; ++k) {
    ws.multiplicity[k] = static_cast<double>(ws.counts[ws.touched[k]]);
    ws.counts[ws.touched[k]] = 0;
  }

  ws.dist.resize(u);
  for (std::size_t k = 0; k < u; ++k) {
    ws.dist[k] = cached_triple_distance(params, mcfg, ws.uniques[k], ws);
  }

  // Softmax over all negatives of -temperature * distance, folded over groups.
  const double alpha = tcfg.adversarial_temperature;
  double logit_max = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u; ++k) logit_max = std::max(logit_max, -alpha * ws.dist[k]);
  double z = 0.0;
  ws.weight.resize(u);
  for (std::size_t k = 0; k < u; ++k) {
    ws.weight[k] = ws.multiplicity[k] * std::exp(-alpha * ws.dist[k] - logit_max);
    z += ws.weight[k];
  }
  for (std::size_t k = 0; k < u; ++k) ws.weight[k] /= z;

  for (std::size_t k = 0; k < u; ++k) {
    loss += ws.weight[k] * softplus(tcfg.margin - ws.dist[k]);
    if (grads != nullptr) {
      const double kappa = -ws.weight[k] * stable_sigmoid(tcfg.margin - ws.dist[k]);
      if (std::fabs(coef * kappa) < kNegligibleCoef) continue;
      cached_distance_grad(params, mcfg, ws.uniques[k], coef * kappa, *grads, ws);
    }
  }
  return loss;
}

double width_regularization(const Parameters& params, double scale, GradBuffer* grads) {
  const auto& rel = params.relations;
  if (rel.count == 0) return 0.0;
  const double inv_r = 1.0 / static_cast<double>(rel.count);
  double value = 0.0;
  const std::size_t total = rel.head_width_raw.size();
  for (std::size_t i = 0; i < total; ++i) {
    const double wh = realized_width(rel.head_width_raw[i]);
    const double wt = realized_width(rel.tail_width_raw[i]);
    value += wh * wh + wt * wt;
    if (grads != nullptr) {
      grads->rel_head_width[i] += scale * inv_r * 2.0 * wh * realized_width_grad(wh);
      grads->rel_tail_width[i] += scale * inv_r * 2.0 * wt * realized_width_grad(wt);
    }
  }
  return value * inv_r;
}

StepStats train_step(Parameters& params, OptimizerState& opt, std::span<const Triple> positives,
                     const NegativeBatch& negatives, const ModelConfig& mcfg,
                     const TrainConfig& tcfg, GradBuffer& grads) {
  if (positives.empty()) throw std::invalid_argument("train_step: empty batch");
  const int n = negatives.per_positive;
  if (n < 1 || negatives.triples.size() != positives.size() * static_cast<std::size_t>(n)) {
    throw std::invalid_argument("train_step: negative batch shape mismatch");
  }
  grads.clear();

  const double inv_batch = 1.0 / static_cast<double>(positives.size());
  StepStats stats;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    std::span<const Triple> negs(negatives.triples.data() + i * static_cast<std::size_t>(n),
                                 static_cast<std::size_t>(n));
    const double loss =
        self_adversarial_loss(params, mcfg, tcfg, positives[i], negs, inv_batch, &grads);
    if (!std::isfinite(loss)) {
      throw RuntimeFailure("training aborted at step " + std::to_string(opt.step + 1) +
                           ": non-finite loss on triple " + triple_str(positives[i]));
    }
    stats.kge += loss * inv_batch;
  }

  stats.reg = width_regularization(params, tcfg.reg_lambda,
                                   tcfg.reg_lambda != 0.0 ? &grads : nullptr);
  stats.total = stats.kge + tcfg.reg_lambda * stats.reg;
  if (!std::isfinite(stats.total)) {
    throw RuntimeFailure("training aborted at step " + std::to_string(opt.step + 1) +
                         ": non-finite total loss");
  }

  adam_update(params, opt, grads, tcfg.learning_rate);
  return stats;
}

namespace {

void validate_train_config(const TrainConfig& tcfg) {
  if (!(tcfg.margin > 0.0)) throw std::invalid_argument("train: margin must be > 0");
  if (tcfg.adversarial_temperature < 0.0) {
    throw std::invalid_argument("train: adversarial temperature must be >= 0");
  }
  if (tcfg.reg_lambda < 0.0) throw std::invalid_argument("train: lambda must be >= 0");
  if (tcfg.batch_size < 1) throw std::invalid_argument("train: batch size must be >= 1");
  if (tcfg.negatives_per_positive < 1) {
    throw std::invalid_argument("train: negatives per positive must be >= 1");
  }
  if (tcfg.max_steps < 1) throw std::invalid_argument("train: max steps must be >= 1");
  if (tcfg.valid_interval < 1) throw std::invalid_argument("train: valid interval must be >= 1");
  if (tcfg.patience < 0) throw std::invalid_argument("train: patience must be >= 0");
}

constexpr std::size_t kValidationSubsample = 1000;

}  // namespace

TrainResult train(const KnowledgeGraphDataset& data, const ModelConfig& mcfg,
                  const TrainConfig& tcfg, const ValidationCallback& on_validation) {
  validate_train_config(tcfg);
  if (data.train.empty()) throw std::invalid_argument("train: empty training split");

  const std::int64_t num_entities = data.vocab.num_entities();
  const std::int64_t num_relations = data.vocab.num_relations();

  Parameters params = init_params(mcfg, num_entities, num_relations);
  OptimizerState opt;
  opt.resize_like(params);
  GradBuffer grads;
  grads.resize_like(params);

  Rng rng(tcfg.seed);
  Rng valid_rng(tcfg.seed ^ 0x517cc1b727220a95ull);

  std::vector<Triple> valid_sub = data.valid;
  if (valid_sub.size() > kValidationSubsample) {
    valid_rng.shuffle(valid_sub);
    valid_sub.resize(kValidationSubsample);
  }
  const FilterIndex filter = valid_sub.empty() ? FilterIndex() : build_filter_index(data);

  std::vector<std::size_t> perm(data.train.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  rng.shuffle(perm);
  std::size_t cursor = 0;
  auto next_positive = [&]() -> const Triple& {
    if (cursor == perm.size()) {
      rng.shuffle(perm);
      cursor = 0;
    }
    return data.train[perm[cursor++]];
  };

  TrainResult result;
  std::vector<Triple> positives;
  positives.reserve(static_cast<std::size_t>(tcfg.batch_size));
  NegativeBatch negatives;
  negatives.per_positive = tcfg.negatives_per_positive;

  double sum_total = 0.0, sum_kge = 0.0, sum_reg = 0.0;
  std::int64_t steps_in_window = 0;
  int evals_since_best = 0;
  std::int64_t step = 0;

  while (step < tcfg.max_steps) {
    ++step;
    positives.clear();
    negatives.clear();
    for (int b = 0; b < tcfg.batch_size; ++b) positives.push_back(next_positive());
    for (const Triple& p : positives) {
      append_negatives(rng, p, tcfg.negatives_per_positive, num_entities, negatives);
    }

    StepStats stats = train_step(params, opt, positives, negatives, mcfg, tcfg, grads);
    sum_total += stats.total;
    sum_kge += stats.kge;
    sum_reg += stats.reg;
    ++steps_in_window;

    if (!valid_sub.empty() && step % tcfg.valid_interval == 0) {
      MetricsReport rep = evaluate(params, mcfg, valid_sub, filter);
      ValidationRecord rec;
      rec.step = step;
      rec.train_loss = sum_total / static_cast<double>(steps_in_window);
      rec.train_kge = sum_kge / static_cast<double>(steps_in_window);
      rec.train_reg = sum_reg / static_cast<double>(steps_in_window);
      rec.valid_mrr = rep.combined.mrr;
      rec.valid_hits1 = rep.combined.hits1;
      rec.valid_hits3 = rep.combined.hits3;
      rec.valid_hits10 = rep.combined.hits10;
      result.history.push_back(rec);
      if (on_validation) on_validation(rec);
      sum_total = sum_kge = sum_reg = 0.0;
      steps_in_window = 0;

      if (rec.valid_mrr > result.best_mrr) {
        result.best_mrr = rec.valid_mrr;
        result.best_step = step;
        result.best_params = params;
        evals_since_best = 0;
      } else {
        ++evals_since_best;
      }
      if (tcfg.patience > 0 && evals_since_best >= tcfg.patience) break;
    }
  }

  result.steps_completed = step;
  result.final_params = std::move(params);
  if (result.best_mrr < 0.0) {
    result.best_params = result.final_params;
    result.best_step = step;
  }
  result.opt_state = std::move(opt);
  return result;
}

}  // namespace core_kge
