#include "core_kge/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "core_kge/rng.hpp"
#include "core_kge/threads.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace core_kge {

namespace {

constexpr double kPatternTol = 1e-3;  // parameter-closeness tolerance for symmetry/inversion

}  // namespace

RankResult filtered_rank(const Parameters& params, const ModelConfig& config,
                         const Triple& query, Direction direction, const FilterIndex& filter) {
  std::vector<double> scores = score_all_candidates(params, config, query, direction);
  const std::int32_t target =
      direction == Direction::PredictTail ? query.tail : query.head;
  const double target_score = scores[static_cast<std::size_t>(target)];

  std::span<const std::int32_t> masked =
      direction == Direction::PredictTail ? filter.true_tails(query.head, query.relation)
                                          : filter.true_heads(query.relation, query.tail);

  std::int64_t greater = 0;
  std::int64_t ties = 0;
  std::size_t mi = 0;
  const std::int64_t n = static_cast<std::int64_t>(scores.size());
  for (std::int64_t i = 0; i < n; ++i) {
    while (mi < masked.size() && masked[mi] < i) ++mi;
    const bool is_masked = mi < masked.size() && masked[mi] == i;
    if (i == target || is_masked) continue;
    if (scores[static_cast<std::size_t>(i)] > target_score) {
      ++greater;
    } else if (scores[static_cast<std::size_t>(i)] == target_score) {
      ++ties;
    }
  }
  return RankResult{query, direction, 1.0 + static_cast<double>(greater) +
                                          static_cast<double>(ties) / 2.0};
}

namespace {

DirectionMetrics reduce_metrics(std::span<const double> ranks) {
  DirectionMetrics m;
  m.query_count = static_cast<std::int64_t>(ranks.size());
  for (double r : ranks) {
    m.mrr += 1.0 / r;
    if (r <= 1.0) m.hits1 += 1.0;
    if (r <= 3.0) m.hits3 += 1.0;
    if (r <= 10.0) m.hits10 += 1.0;
  }
  if (m.query_count > 0) {
    const double inv = 1.0 / static_cast<double>(m.query_count);
    m.mrr *= inv;
    m.hits1 *= inv;
    m.hits3 *= inv;
    m.hits10 *= inv;
  }
  return m;
}

}  // namespace

MetricsReport evaluate(const Parameters& params, const ModelConfig& config,
                       std::span<const Triple> split, const FilterIndex& filter) {
  if (split.empty()) throw std::invalid_argument("evaluate: empty split");

  const std::int64_t n = static_cast<std::int64_t>(split.size());
  std::vector<double> head_ranks(split.size());
  std::vector<double> tail_ranks(split.size());

  const int workers = worker_threads();
  (void)workers;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 4) num_threads(workers)
#endif
  for (std::int64_t i = 0; i < n; ++i) {
    const Triple& t = split[static_cast<std::size_t>(i)];
    head_ranks[static_cast<std::size_t>(i)] =
        filtered_rank(params, config, t, Direction::PredictHead, filter).rank;
    tail_ranks[static_cast<std::size_t>(i)] =
        filtered_rank(params, config, t, Direction::PredictTail, filter).rank;
  }

  std::vector<double> all;
  all.reserve(split.size() * 2);
  all.insert(all.end(), head_ranks.begin(), head_ranks.end());
  all.insert(all.end(), tail_ranks.begin(), tail_ranks.end());

  MetricsReport report;
  report.head = reduce_metrics(head_ranks);
  report.tail = reduce_metrics(tail_ranks);
  report.combined = reduce_metrics(all);
  return report;
}

namespace {

int expected_arity(PatternKind kind) {
  switch (kind) {
    case PatternKind::Symmetry:
    case PatternKind::AntiSymmetry:
      return 1;
    case PatternKind::Inversion:
    case PatternKind::Subsumption:
    case PatternKind::MutualExclusion:
      return 2;
    case PatternKind::Intersection:
      return 3;
  }
  return 0;
}

CircleArc dim_arc(const CyclicOrthotope& r, std::size_t i) {
  return CircleArc{r.center().coords[i], r.width()[i]};
}

/// Per-dimension closeness slack between two regions: tol minus the larger of
/// the center separation and the width difference.
std::vector<double> closeness_slack(const CyclicOrthotope& a, const CyclicOrthotope& b) {
  std::vector<double> slack(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double cdist = dim_delta(a.center().coords[i], b.center().coords[i]);
    double wdist = std::fabs(a.width()[i] - b.width()[i]);
    slack[i] = kPatternTol - std::max(cdist, wdist);
  }
  return slack;
}

/// Per-dimension separation surplus: positive where the regions are disjoint
/// along that axis.
std::vector<double> separation_slack(const CyclicOrthotope& a, const CyclicOrthotope& b) {
  std::vector<double> slack(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double cdist = dim_delta(a.center().coords[i], b.center().coords[i]);
    slack[i] = cdist - (a.width()[i] + b.width()[i]);
  }
  return slack;
}

/// Per-dimension nesting slack: nonnegative everywhere iff inner fits in outer.
std::vector<double> nesting_slack(const CyclicOrthotope& outer, const CyclicOrthotope& inner) {
  std::vector<double> slack(outer.dim());
  for (std::size_t i = 0; i < outer.dim(); ++i) {
    double cdist = dim_delta(outer.center().coords[i], inner.center().coords[i]);
    slack[i] = outer.width()[i] - (cdist + inner.width()[i]);
  }
  return slack;
}

std::vector<double> elementwise_min(std::vector<double> a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::min(a[i], b[i]);
  return a;
}

double sample_in_arc(Rng& rng, const CircleArc& arc) {
  return wrap1(arc.center + rng.uniform(-arc.half_width, arc.half_width));
}

std::vector<double> sample_in_region(Rng& rng, const CyclicOrthotope& r) {
  std::vector<double> x(r.dim());
  for (std::size_t i = 0; i < r.dim(); ++i) x[i] = sample_in_arc(rng, dim_arc(r, i));
  return x;
}

struct RegionPair {
  CyclicOrthotope head;
  CyclicOrthotope tail;
};

bool pair_satisfies(const RegionPair& rp, std::span<const double> x, std::span<const double> y) {
  return contains(rp.head, x) && contains(rp.tail, y);
}

/// Per-dimension intersection pieces of two region pairs, head and tail sides.
struct PairIntersection {
  std::vector<std::vector<CircleArc>> head;  // [dim] -> pieces
  std::vector<std::vector<CircleArc>> tail;
  bool satisfiable = true;  // nonempty in every dimension on both sides
};

PairIntersection intersect_pairs(const RegionPair& a, const RegionPair& b) {
  PairIntersection out;
  const std::size_t d = a.head.dim();
  out.head.resize(d);
  out.tail.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.head[i] = arc_intersection(dim_arc(a.head, i), dim_arc(b.head, i));
    out.tail[i] = arc_intersection(dim_arc(a.tail, i), dim_arc(b.tail, i));
    if (out.head[i].empty() || out.tail[i].empty()) out.satisfiable = false;
  }
  return out;
}

double sample_in_pieces(Rng& rng, const std::vector<CircleArc>& pieces) {
  if (pieces.size() == 1) return sample_in_arc(rng, pieces[0]);
  double total = 0.0;
  for (const CircleArc& p : pieces) total += p.half_width;
  if (total <= 0.0) {
    return pieces[rng.uniform_index(pieces.size())].center;
  }
  double u = rng.uniform(0.0, total);
  for (const CircleArc& p : pieces) {
    if (u <= p.half_width || &p == &pieces.back()) return sample_in_arc(rng, p);
    u -= p.half_width;
  }
  return sample_in_arc(rng, pieces.back());  // unreachable
}

}  // namespace

PatternReport pattern_check(const Parameters& params, PatternKind kind,
                            std::span<const std::int32_t> relations, std::int64_t sample_count,
                            std::uint64_t seed) {
  const int arity = expected_arity(kind);
  if (static_cast<int>(relations.size()) != arity) {
    throw std::invalid_argument("pattern_check: pattern takes " + std::to_string(arity) +
                                " relation(s), got " + std::to_string(relations.size()));
  }
  for (std::int32_t r : relations) {
    if (r < 0 || r >= params.relations.count) {
      throw std::invalid_argument("pattern_check: relation id " + std::to_string(r) +
                                  " out of range [0, " + std::to_string(params.relations.count) +
                                  ")");
    }
  }

  auto region_pair = [&params](std::int32_t r) {
    return RegionPair{realized_region(params, r, Side::Head),
                      realized_region(params, r, Side::Tail)};
  };

  PatternReport report;
  report.kind = kind;
  report.relations.assign(relations.begin(), relations.end());
  Rng rng(seed);

  switch (kind) {
    case PatternKind::Symmetry: {
      RegionPair rp = region_pair(relations[0]);
      report.slack = closeness_slack(rp.head, rp.tail);
      report.verdict =
          std::all_of(report.slack.begin(), report.slack.end(), [](double s) { return s >= 0.0; });
      for (std::int64_t s = 0; s < sample_count; ++s) {
        auto x = sample_in_region(rng, rp.head);
        auto y = sample_in_region(rng, rp.tail);
        ++report.samples;
        if (!pair_satisfies(rp, y, x)) ++report.counterexamples;
      }
      break;
    }
    case PatternKind::AntiSymmetry: {
      RegionPair rp = region_pair(relations[0]);
      report.slack = separation_slack(rp.head, rp.tail);
      report.verdict =
          std::any_of(report.slack.begin(), report.slack.end(), [](double s) { return s > 0.0; });
      for (std::int64_t s = 0; s < sample_count; ++s) {
        auto x = sample_in_region(rng, rp.head);
        auto y = sample_in_region(rng, rp.tail);
        ++report.samples;
        if (pair_satisfies(rp, y, x)) ++report.counterexamples;
      }
      break;
    }
    case PatternKind::Inversion: {
      RegionPair r1 = region_pair(relations[0]);
      RegionPair r2 = region_pair(relations[1]);
      report.slack = elementwise_min(closeness_slack(r1.head, r2.tail),
                                     closeness_slack(r1.tail, r2.head));
      report.verdict =
          std::all_of(report.slack.begin(), report.slack.end(), [](double s) { return s >= 0.0; });
      for (std::int64_t s = 0; s < sample_count; ++s) {
        auto x = sample_in_region(rng, r1.head);
        auto y = sample_in_region(rng, r1.tail);
        ++report.samples;
        if (!pair_satisfies(r2, y, x)) ++report.counterexamples;
      }
      break;
    }
    case PatternKind::Subsumption: {
      RegionPair child = region_pair(relations[0]);
      RegionPair parent = region_pair(relations[1]);
      report.slack = elementwise_min(nesting_slack(parent.head, child.head),
                                     nesting_slack(parent.tail, child.tail));
      report.verdict = region_subsumes(parent.head, child.head) &&
                       region_subsumes(parent.tail, child.tail);
      for (std::int64_t s = 0; s < sample_count; ++s) {
        auto x = sample_in_region(rng, child.head);
        auto y = sample_in_region(rng, child.tail);
        ++report.samples;
        if (!pair_satisfies(parent, x, y)) ++report.counterexamples;
      }
      break;
    }
    case PatternKind::Intersection: {
      RegionPair r1 = region_pair(relations[0]);
      RegionPair r2 = region_pair(relations[1]);
      RegionPair target = region_pair(relations[2]);
      PairIntersection inter = intersect_pairs(r1, r2);
      const std::size_t d = r1.head.dim();
      if (!inter.satisfiable) {
        // Vacuously true: no pair satisfies both premises.
        report.slack.assign(d, 0.5);
        report.verdict = true;
        break;
      }
      report.slack.assign(d, 0.5);
      bool all_contained = true;
      for (std::size_t i = 0; i < d; ++i) {
        CircleArc th = dim_arc(target.head, i);
        CircleArc tt = dim_arc(target.tail, i);
        for (const CircleArc& p : inter.head[i]) {
          double s = th.half_width - (dim_delta(p.center, th.center) + p.half_width);
          report.slack[i] = std::min(report.slack[i], s);
          if (!arc_contains_arc(th, p)) all_contained = false;
        }
        for (const CircleArc& p : inter.tail[i]) {
          double s = tt.half_width - (dim_delta(p.center, tt.center) + p.half_width);
          report.slack[i] = std::min(report.slack[i], s);
          if (!arc_contains_arc(tt, p)) all_contained = false;
        }
      }
      report.verdict = all_contained;
      std::vector<double> x(d), y(d);
      for (std::int64_t s = 0; s < sample_count; ++s) {
        for (std::size_t i = 0; i < d; ++i) {
          x[i] = sample_in_pieces(rng, inter.head[i]);
          y[i] = sample_in_pieces(rng, inter.tail[i]);
        }
        ++report.samples;
        if (!pair_satisfies(target, x, y)) ++report.counterexamples;
      }
      break;
    }
    case PatternKind::MutualExclusion: {
      RegionPair r1 = region_pair(relations[0]);
      RegionPair r2 = region_pair(relations[1]);
      std::vector<double> head_sep = separation_slack(r1.head, r2.head);
      std::vector<double> tail_sep = separation_slack(r1.tail, r2.tail);
      report.slack.resize(head_sep.size());
      for (std::size_t i = 0; i < head_sep.size(); ++i) {
        report.slack[i] = std::max(head_sep[i], tail_sep[i]);
      }
      report.verdict = !region_overlap(r1.head, r2.head) || !region_overlap(r1.tail, r2.tail);
      for (std::int64_t s = 0; s < sample_count; ++s) {
        auto x = sample_in_region(rng, r1.head);
        auto y = sample_in_region(rng, r1.tail);
        ++report.samples;
        if (pair_satisfies(r2, x, y)) ++report.counterexamples;
      }
      break;
    }
  }
  return report;
}

}  // namespace core_kge
