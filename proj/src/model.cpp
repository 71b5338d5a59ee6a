#include "core_kge/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "core_kge/rng.hpp"

namespace core_kge {

namespace {

constexpr double kInitialWidthRaw = -0.4054651081081643;  // realizes to 0.2

void check_entity(const Parameters& params, std::int32_t id, const char* what) {
  if (id < 0 || id >= params.entities.count) {
    throw std::invalid_argument(std::string(what) + ": entity id " + std::to_string(id) +
                                " out of range [0, " + std::to_string(params.entities.count) + ")");
  }
}

void check_relation(const Parameters& params, std::int32_t id, const char* what) {
  if (id < 0 || id >= params.relations.count) {
    throw std::invalid_argument(std::string(what) + ": relation id " + std::to_string(id) +
                                " out of range [0, " + std::to_string(params.relations.count) +
                                ")");
  }
}

void check_triple(const Parameters& params, const Triple& t, const char* what) {
  check_entity(params, t.head, what);
  check_relation(params, t.relation, what);
  check_entity(params, t.tail, what);
}

/// One side of the scoring function: the aggregated per-dimension region
/// distances of the dynamic point (base + optional bump) against one of the
/// relation's regions. Accumulation order matches aggregate_norm so the two
/// formulations agree bit for bit.
inline double side_distance(const double* base, const double* bump, const double* center_raw,
                            const double* width_raw, int dim, NormKind norm, bool periodic,
                            bool bump_enabled) {
  double acc = 0.0;
  if (norm == NormKind::L1) {
    for (int i = 0; i < dim; ++i) {
      double x = bump_enabled ? base[i] + bump[i] : base[i];
      double v = dim_region_distance(dim_delta(x, center_raw[i], periodic),
                                     realized_width(width_raw[i]));
      acc += std::fabs(v);
    }
    return acc;
  }
  for (int i = 0; i < dim; ++i) {
    double x = bump_enabled ? base[i] + bump[i] : base[i];
    double v = dim_region_distance(dim_delta(x, center_raw[i], periodic),
                                   realized_width(width_raw[i]));
    acc += v * v;
  }
  return norm == NormKind::L2 ? std::sqrt(acc) : acc;
}

inline double distance_impl(const Parameters& params, const ModelConfig& config, std::int32_t h,
                            std::int32_t r, std::int32_t t) {
  const auto& e = params.entities;
  const auto& rel = params.relations;
  const int dim = e.dim;
  const double* bh = e.base.data() + static_cast<std::int64_t>(h) * dim;
  const double* bt = e.base.data() + static_cast<std::int64_t>(t) * dim;
  const double* uh = e.bump.data() + static_cast<std::int64_t>(h) * dim;
  const double* ut = e.bump.data() + static_cast<std::int64_t>(t) * dim;
  const std::int64_t roff = static_cast<std::int64_t>(r) * dim;
  double head_side =
      side_distance(bh, ut, rel.head_center_raw.data() + roff, rel.head_width_raw.data() + roff,
                    dim, config.norm, config.torus_enabled, config.bump_enabled);
  double tail_side =
      side_distance(bt, uh, rel.tail_center_raw.data() + roff, rel.tail_width_raw.data() + roff,
                    dim, config.norm, config.torus_enabled, config.bump_enabled);
  return head_side + tail_side;
}

}  // namespace

Parameters init_params(const ModelConfig& config, std::int64_t num_entities,
                       std::int64_t num_relations) {
  if (config.dim < 1) throw std::invalid_argument("init_params: dim must be >= 1");
  if (num_entities < 1) throw std::invalid_argument("init_params: need at least one entity");
  if (num_relations < 1) throw std::invalid_argument("init_params: need at least one relation");

  Parameters params;
  params.entities.count = num_entities;
  params.entities.dim = config.dim;
  params.relations.count = num_relations;
  params.relations.dim = config.dim;

  const std::size_t esize = static_cast<std::size_t>(num_entities) * config.dim;
  const std::size_t rsize = static_cast<std::size_t>(num_relations) * config.dim;
  params.entities.base.resize(esize);
  params.entities.bump.resize(esize);
  params.relations.head_center_raw.resize(rsize);
  params.relations.head_width_raw.resize(rsize, kInitialWidthRaw);
  params.relations.tail_center_raw.resize(rsize);
  params.relations.tail_width_raw.resize(rsize, kInitialWidthRaw);

  Rng rng(config.seed);
  for (double& v : params.entities.base) v = rng.uniform01();
  for (double& v : params.entities.bump) v = rng.uniform(-0.1, 0.1);
  for (std::int64_t r = 0; r < num_relations; ++r) {
    double* hc = params.relations.head_center_raw.data() + r * config.dim;
    double* tc = params.relations.tail_center_raw.data() + r * config.dim;
    for (int i = 0; i < config.dim; ++i) hc[i] = rng.uniform01();
    for (int i = 0; i < config.dim; ++i) tc[i] = rng.uniform01();
  }
  return params;
}

namespace {

std::vector<double> dynamic_point(const Parameters& params, const ModelConfig& config,
                                  std::int32_t base_id, std::int32_t bump_id) {
  const auto& e = params.entities;
  std::vector<double> out(e.dim);
  const double* b = e.base.data() + static_cast<std::int64_t>(base_id) * e.dim;
  const double* u = e.bump.data() + static_cast<std::int64_t>(bump_id) * e.dim;
  for (int i = 0; i < e.dim; ++i) {
    double x = config.bump_enabled ? b[i] + u[i] : b[i];
    out[i] = config.torus_enabled ? wrap1(x) : x;
  }
  return out;
}

}  // namespace

std::vector<double> head_embedding(const Parameters& params, const ModelConfig& config,
                               const Triple& triple) {
  check_triple(params, triple, "head_embedding");
  return dynamic_point(params, config, triple.head, triple.tail);
}

std::vector<double> tail_embedding(const Parameters& params, const ModelConfig& config,
                               const Triple& triple) {
  check_triple(params, triple, "tail_embedding");
  return dynamic_point(params, config, triple.tail, triple.head);
}

CyclicOrthotope realized_region(const Parameters& params, std::int32_t relation, Side side) {
  if (relation < 0 || relation >= params.relations.count) {
    throw std::invalid_argument("realized_region: relation id " + std::to_string(relation) +
                                " out of range [0, " + std::to_string(params.relations.count) +
                                ")");
  }
  const auto& rel = params.relations;
  const std::int64_t off = static_cast<std::int64_t>(relation) * rel.dim;
  const double* craw =
      (side == Side::Head ? rel.head_center_raw.data() : rel.tail_center_raw.data()) + off;
  const double* wraw =
      (side == Side::Head ? rel.head_width_raw.data() : rel.tail_width_raw.data()) + off;
  TorusVector center;
  center.coords.resize(rel.dim);
  std::vector<double> width(rel.dim);
  for (int i = 0; i < rel.dim; ++i) {
    center.coords[i] = wrap1(craw[i]);
    width[i] = realized_width(wraw[i]);
  }
  return CyclicOrthotope(std::move(center), std::move(width));
}

double triple_distance(const Parameters& params, const ModelConfig& config, const Triple& triple) {
  check_triple(params, triple, "triple_distance");
  return distance_impl(params, config, triple.head, triple.relation, triple.tail);
}

double score(const Parameters& params, const ModelConfig& config, const Triple& triple) {
  check_triple(params, triple, "score");
  return -distance_impl(params, config, triple.head, triple.relation, triple.tail);
}

std::string norm_name(NormKind kind) {
  switch (kind) {
    case NormKind::L1:
      return "l1";
    case NormKind::L2:
      return "l2";
    case NormKind::eL2:
      return "el2";
  }
  return "el2";
}

NormKind parse_norm(const std::string& name) {
  if (name == "l1") return NormKind::L1;
  if (name == "l2") return NormKind::L2;
  if (name == "el2") return NormKind::eL2;
  throw std::invalid_argument("unknown norm '" + name + "' (expected l1, l2, or el2)");
}

double mean_realized_width(const Parameters& params) {
  const auto& rel = params.relations;
  const std::size_t total = rel.head_width_raw.size();
  if (total == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    sum += realized_width(rel.head_width_raw[i]) + realized_width(rel.tail_width_raw[i]);
  }
  return sum / static_cast<double>(2 * total);
}

std::vector<double> score_all_candidates(const Parameters& params, const ModelConfig& config,
                                         const Triple& query, Direction direction) {
  check_triple(params, query, "score_all_candidates");
  const std::int64_t n = params.entities.count;
  std::vector<double> out(static_cast<std::size_t>(n));
  if (direction == Direction::PredictTail) {
    for (std::int64_t i = 0; i < n; ++i) {
      out[i] = -distance_impl(params, config, query.head, query.relation,
                              static_cast<std::int32_t>(i));
    }
  } else {
    for (std::int64_t i = 0; i < n; ++i) {
      out[i] = -distance_impl(params, config, static_cast<std::int32_t>(i), query.relation,
                              query.tail);
    }
  }
  return out;
}

}  // namespace core_kge
