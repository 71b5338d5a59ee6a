#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace core_kge {

/// Norm used to aggregate per-dimension region distances. eL2 is the squared
/// Euclidean norm (no square root), which keeps gradients smooth at zero.
enum class NormKind { L1, L2, eL2 };

/// A point on the d-torus. Every coordinate lies in the fundamental domain
/// [0,1). Construct via wrap() so the invariant always holds.
struct TorusVector {
  std::vector<double> coords;

  std::size_t dim() const { return coords.size(); }
};

/// Axis-aligned box on the torus: a center plus per-dimension half-extents in
/// (0, 0.5]. A width of exactly 0.5 covers the whole circle in that dimension;
/// the constructor rejects anything outside (0, 0.5].
class CyclicOrthotope {
 public:
  CyclicOrthotope(TorusVector center, std::vector<double> width);

  const TorusVector& center() const { return center_; }
  const std::vector<double>& width() const { return width_; }
  std::size_t dim() const { return width_.size(); }

 private:
  TorusVector center_;
  std::vector<double> width_;
};

/// Per-dimension partial derivatives of region_distance, before norm
/// aggregation.
struct RegionDistanceGradient {
  std::vector<double> d_point;   // ∂dist_i/∂x_i
  std::vector<double> d_center;  // ∂dist_i/∂c_i  (= -d_point)
  std::vector<double> d_width;   // ∂dist_i/∂w_i
};

// ---------------------------------------------------------------------------
// Per-dimension kernels. These are the single source of arithmetic shared by
// the vector-level geometry ops and the model/trainer hot paths, so scoring
// stays bit-identical no matter which entry point computes it.
// ---------------------------------------------------------------------------

/// Non-negative modulo 1: maps any finite real into [0,1).
inline double wrap1(double x) {
  double w = x - std::floor(x);
  // x - floor(x) can round up to exactly 1.0 for tiny negatives
  return w >= 1.0 ? w - 1.0 : w;
}

/// Shortest separation along one dimension. periodic=false degrades to the
/// plain absolute difference (the Euclidean ablation).
inline double dim_delta(double x, double y, bool periodic = true) {
  if (!periodic) return std::fabs(x - y);
  double a = std::fabs(wrap1(x) - wrap1(y));
  return a <= 0.5 ? a : 1.0 - a;
}

struct SignedDelta {
  double delta;  // shortest separation, in [0, 0.5] when periodic
  double sign;   // d(delta)/d(x); 0 at delta = 0
};

/// delta plus the direction the separation grows when x increases.
/// Kink conventions: sign 0 at delta = 0; at separation exactly 0.5 the
/// inner (|diff| <= 0.5) branch sign is kept.
inline SignedDelta dim_delta_signed(double x, double y, bool periodic = true) {
  double diff = periodic ? wrap1(x) - wrap1(y) : x - y;
  double a = std::fabs(diff);
  double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
  if (!periodic || a <= 0.5) return {a, s};
  return {1.0 - a, -s};
}

/// Piecewise point-to-region distance along one dimension: delta/w inside
/// the region, (delta-w)/w^2 + 1 outside. Both branches equal exactly 1 at
/// delta = w.
inline double dim_region_distance(double delta, double w) {
  return delta <= w ? delta / w : (delta - w) / (w * w) + 1.0;
}

struct DimDistGrad {
  double value;
  double d_point;
  double d_center;
  double d_width;
};

/// dim_region_distance plus its partials with respect to the point, the
/// region center, and the width. delta = w uses the inner branch.
inline DimDistGrad dim_region_distance_grad(double x, double c, double w,
                                            bool periodic = true) {
  SignedDelta sd = dim_delta_signed(x, c, periodic);
  DimDistGrad g;
  if (sd.delta <= w) {
    g.value = sd.delta / w;
    g.d_point = sd.sign / w;
    g.d_width = -sd.delta / (w * w);
  } else {
    double w2 = w * w;
    g.value = (sd.delta - w) / w2 + 1.0;
    g.d_point = sd.sign / w2;
    g.d_width = -1.0 / w2 - 2.0 * (sd.delta - w) / (w2 * w);
  }
  g.d_center = -g.d_point;
  return g;
}

/// Shortest signed circular difference a - b, in [-0.5, 0.5).
inline double signed_circle_diff(double a, double b) {
  double d = wrap1(a - b);
  return d >= 0.5 ? d - 1.0 : d;
}

// ---------------------------------------------------------------------------
// Vector-level operations. All of them accept raw (unconstrained) reals and
// wrap internally, so callers may pass optimizer parameters directly.
// ---------------------------------------------------------------------------

/// Maps each coordinate into [0,1). Throws std::invalid_argument on
/// non-finite input.
TorusVector wrap(std::span<const double> x);

/// Per-dimension shortest toroidal separation; symmetric, each entry in
/// [0, 0.5]. Throws on dimension mismatch.
std::vector<double> torus_delta(std::span<const double> x, std::span<const double> y);

/// True iff x lies within r in every dimension (boundary inclusive).
bool contains(const CyclicOrthotope& r, std::span<const double> x);

/// Per-dimension piecewise distance from x to r.
std::vector<double> region_distance(std::span<const double> x, const CyclicOrthotope& r);

/// Analytic partials of region_distance.
RegionDistanceGradient region_distance_grad(std::span<const double> x,
                                            const CyclicOrthotope& r);

/// L1 / L2 / eL2 aggregation. Throws on empty input.
double aggregate_norm(std::span<const double> v, NormKind kind);

/// d(aggregate_norm)/dv_i. L2 at the origin returns zeros.
std::vector<double> aggregate_norm_grad(std::span<const double> v, NormKind kind);

/// True iff the regions intersect in every dimension.
bool region_overlap(const CyclicOrthotope& a, const CyclicOrthotope& b);

/// True iff inner fits entirely within outer:
/// torus_delta(centers)_i + inner.width_i <= outer.width_i for all i.
bool region_subsumes(const CyclicOrthotope& outer, const CyclicOrthotope& inner);

/// Arc on the unit circle, given by a center in [0,1) and a half-width.
struct CircleArc {
  double center;
  double half_width;
};

/// Exact intersection of two circle arcs (half-widths <= 0.5). The result has
/// zero, one, or two disjoint pieces.
std::vector<CircleArc> arc_intersection(const CircleArc& a, const CircleArc& b);

/// True iff the inner arc lies entirely inside the outer arc.
bool arc_contains_arc(const CircleArc& outer, const CircleArc& inner);

}  // namespace core_kge
