#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "core_kge/dataset.hpp"
#include "core_kge/geometry.hpp"

namespace core_kge {

struct ModelConfig {
  int dim = 500;
  NormKind norm = NormKind::eL2;
  bool torus_enabled = true;  // false degrades to the Euclidean ablation
  bool bump_enabled = true;   // false drops the context shift
  std::uint64_t seed = 42;
};

/// Per-entity parameters: an unconstrained base position and a
/// transformational bump that shifts the counterpart entity. Row-major
/// (count x dim).
struct EntityParams {
  std::int64_t count = 0;
  int dim = 0;
  std::vector<double> base;
  std::vector<double> bump;

  std::span<const double> base_row(std::int64_t i) const {
    return {base.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> bump_row(std::int64_t i) const {
    return {bump.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

/// Per-relation parameters for the two regions. Centers are stored
/// unconstrained and wrapped at read time; widths are stored as
/// pre-activations realized through 0.5*sigmoid, which keeps them in (0, 0.5).
struct RelationParams {
  std::int64_t count = 0;
  int dim = 0;
  std::vector<double> head_center_raw;
  std::vector<double> head_width_raw;
  std::vector<double> tail_center_raw;
  std::vector<double> tail_width_raw;

  std::span<const double> head_center_row(std::int64_t r) const {
    return {head_center_raw.data() + r * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> head_width_row(std::int64_t r) const {
    return {head_width_raw.data() + r * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> tail_center_row(std::int64_t r) const {
    return {tail_center_raw.data() + r * dim, static_cast<std::size_t>(dim)};
  }
  std::span<const double> tail_width_row(std::int64_t r) const {
    return {tail_width_raw.data() + r * dim, static_cast<std::size_t>(dim)};
  }
};

struct Parameters {
  EntityParams entities;
  RelationParams relations;
};

enum class Side { Head, Tail };
enum class Direction { PredictHead, PredictTail };

inline double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

/// Numeric floor keeping realized widths strictly positive even when the
/// pre-activation saturates toward -inf.
inline constexpr double kWidthFloor = 1e-12;

inline double realized_width(double width_raw) {
  return std::max(0.5 * stable_sigmoid(width_raw), kWidthFloor);
}

/// d(realized_width)/d(width_raw) expressed through the realized width w:
/// 0.5*s*(1-s) with s = 2w.
inline double realized_width_grad(double w) { return w * (1.0 - 2.0 * w); }

/// Deterministic initialization: bases and centers uniform on [0,1), bumps
/// uniform on [-0.1, 0.1], width pre-activations constant so every realized
/// width starts at 0.2.
Parameters init_params(const ModelConfig& config, std::int64_t num_entities,
                       std::int64_t num_relations);

/// Dynamic point for the head slot of a triple: base(head) + bump(tail),
/// wrapped onto the torus when the torus is enabled. Bump omitted when bumps
/// are disabled. Throws std::invalid_argument on out-of-range ids.
std::vector<double> head_embedding(const Parameters& params, const ModelConfig& config,
                               const Triple& triple);
/// Dynamic point for the tail slot: base(tail) + bump(head).
std::vector<double> tail_embedding(const Parameters& params, const ModelConfig& config,
                               const Triple& triple);

/// The relation's region as geometry on the torus: wrapped center, realized
/// width. (The Euclidean ablation's scoring path reads raw centers directly
/// and does not go through this view.)
CyclicOrthotope realized_region(const Parameters& params, std::int32_t relation, Side side);

/// Head-side plus tail-side aggregated region distance. Nonnegative.
double triple_distance(const Parameters& params, const ModelConfig& config,
                       const Triple& triple);

/// Score f = -distance; higher means more plausible.
double score(const Parameters& params, const ModelConfig& config, const Triple& triple);

/// Scores the query completed with every entity id, in id order. Element i is
/// bit-identical to score() on the completed triple.
std::vector<double> score_all_candidates(const Parameters& params, const ModelConfig& config,
                                         const Triple& query, Direction direction);

/// Mean realized width over every relation, side, and dimension.
double mean_realized_width(const Parameters& params);

/// "l1" | "l2" | "el2".
std::string norm_name(NormKind kind);
/// Inverse of norm_name; throws std::invalid_argument listing the valid names.
NormKind parse_norm(const std::string& name);

}  // namespace core_kge
