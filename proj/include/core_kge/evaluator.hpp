#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core_kge/dataset.hpp"
#include "core_kge/geometry.hpp"
#include "core_kge/model.hpp"

namespace core_kge {

struct RankResult {
  Triple query;
  Direction direction = Direction::PredictTail;
  double rank = 1.0;  // fractional under tie averaging
};

struct DirectionMetrics {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::int64_t query_count = 0;
};

struct MetricsReport {
  DirectionMetrics head;      // predict-head queries
  DirectionMetrics tail;      // predict-tail queries
  DirectionMetrics combined;  // both directions pooled
};

/// Rank of the true entity among all candidates after masking every other
/// known-true completion. Ties with unmasked non-target candidates count half.
RankResult filtered_rank(const Parameters& params, const ModelConfig& config,
                         const Triple& query, Direction direction, const FilterIndex& filter);

/// Filtered MRR and Hits@{1,3,10} over both prediction directions of every
/// triple in the split. Deterministic for any worker count. Throws
/// std::invalid_argument on an empty split.
MetricsReport evaluate(const Parameters& params, const ModelConfig& config,
                       std::span<const Triple> split, const FilterIndex& filter);

enum class PatternKind {
  Symmetry,         // one relation: head and tail regions coincide
  AntiSymmetry,     // one relation: head and tail regions disjoint
  Inversion,        // two relations: cross-shared regions
  Subsumption,      // two relations: first's regions nested in second's
  Intersection,     // three relations: overlap of first two inside third
  MutualExclusion,  // two relations: head or tail regions disjoint
};

/// Geometric verdict plus per-dimension slack, and a sampled implication
/// check: point pairs satisfying the premise regions are tested against the
/// conclusion, counting violations.
struct PatternReport {
  PatternKind kind = PatternKind::Symmetry;
  std::vector<std::int32_t> relations;
  bool verdict = false;
  std::vector<double> slack;  // one entry per dimension; sign carries the verdict
  std::int64_t samples = 0;
  std::int64_t counterexamples = 0;
};

/// Expected arity: 1 (symmetry, anti-symmetry), 2 (inversion, subsumption,
/// mutual exclusion) or 3 (intersection: premise pair then target). Wrong
/// arity or a bad relation id throws std::invalid_argument.
PatternReport pattern_check(const Parameters& params, PatternKind kind,
                            std::span<const std::int32_t> relations, std::int64_t sample_count,
                            std::uint64_t seed = 12345);

}  // namespace core_kge
