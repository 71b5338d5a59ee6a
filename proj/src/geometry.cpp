#include "core_kge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace core_kge {

namespace {

void check_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

CyclicOrthotope::CyclicOrthotope(TorusVector center, std::vector<double> width)
    : center_(std::move(center)), width_(std::move(width)) {
  check_same_dim(center_.dim(), width_.size(), "CyclicOrthotope");
  for (double w : width_) {
    if (!(w > 0.0 && w <= 0.5)) {
      throw std::invalid_argument("CyclicOrthotope: width " + std::to_string(w) +
                                  " outside (0, 0.5]");
    }
  }
}

TorusVector wrap(std::span<const double> x) {
  TorusVector out;
  out.coords.reserve(x.size());
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("wrap: non-finite coordinate");
    }
    out.coords.push_back(wrap1(v));
  }
  return out;
}

std::vector<double> torus_delta(std::span<const double> x, std::span<const double> y) {
  check_same_dim(x.size(), y.size(), "torus_delta");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = dim_delta(x[i], y[i]);
  }
  return out;
}

bool contains(const CyclicOrthotope& r, std::span<const double> x) {
  check_same_dim(r.dim(), x.size(), "contains");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (dim_delta(x[i], r.center().coords[i]) > r.width()[i]) return false;
  }
  return true;
}

std::vector<double> region_distance(std::span<const double> x, const CyclicOrthotope& r) {
  check_same_dim(r.dim(), x.size(), "region_distance");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = dim_region_distance(dim_delta(x[i], r.center().coords[i]), r.width()[i]);
  }
  return out;
}

RegionDistanceGradient region_distance_grad(std::span<const double> x,
                                            const CyclicOrthotope& r) {
  check_same_dim(r.dim(), x.size(), "region_distance_grad");
  RegionDistanceGradient g;
  g.d_point.resize(x.size());
  g.d_center.resize(x.size());
  g.d_width.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    DimDistGrad d = dim_region_distance_grad(x[i], r.center().coords[i], r.width()[i]);
    g.d_point[i] = d.d_point;
    g.d_center[i] = d.d_center;
    g.d_width[i] = d.d_width;
  }
  return g;
}

double aggregate_norm(std::span<const double> v, NormKind kind) {
  if (v.empty()) throw std::invalid_argument("aggregate_norm: empty input");
  double acc = 0.0;
  switch (kind) {
    case NormKind::L1:
      for (double x : v) acc += std::fabs(x);
      return acc;
    case NormKind::L2:
      for (double x : v) acc += x * x;
      return std::sqrt(acc);
    case NormKind::eL2:
      for (double x : v) acc += x * x;
      return acc;
  }
  return acc;  // unreachable
}

std::vector<double> aggregate_norm_grad(std::span<const double> v, NormKind kind) {
  if (v.empty()) throw std::invalid_argument("aggregate_norm_grad: empty input");
  std::vector<double> g(v.size());
  switch (kind) {
    case NormKind::L1:
      for (std::size_t i = 0; i < v.size(); ++i) {
        g[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
      }
      break;
    case NormKind::L2: {
      double n = aggregate_norm(v, NormKind::L2);
      if (n > 0.0) {
        for (std::size_t i = 0; i < v.size(); ++i) g[i] = v[i] / n;
      }
      break;
    }
    case NormKind::eL2:
      for (std::size_t i = 0; i < v.size(); ++i) g[i] = 2.0 * v[i];
      break;
  }
  return g;
}

bool region_overlap(const CyclicOrthotope& a, const CyclicOrthotope& b) {
  check_same_dim(a.dim(), b.dim(), "region_overlap");
  for (std::size_t i = 0; i < a.dim(); ++i) {
    double d = dim_delta(a.center().coords[i], b.center().coords[i]);
    if (d > a.width()[i] + b.width()[i]) return false;
  }
  return true;
}

bool region_subsumes(const CyclicOrthotope& outer, const CyclicOrthotope& inner) {
  check_same_dim(outer.dim(), inner.dim(), "region_subsumes");
  for (std::size_t i = 0; i < outer.dim(); ++i) {
    double d = dim_delta(outer.center().coords[i], inner.center().coords[i]);
    if (d + inner.width()[i] > outer.width()[i]) return false;
  }
  return true;
}

std::vector<CircleArc> arc_intersection(const CircleArc& a, const CircleArc& b) {
  // Unroll the circle at a's center: A = [-ha, ha], B sits at the signed
  // offset t. Intersect A against B shifted by -1, 0, +1; at most two of the
  // translates can meet an arc of length <= 1.
  double t = signed_circle_diff(b.center, a.center);
  std::vector<CircleArc> pieces;
  for (int k = -1; k <= 1; ++k) {
    double lo = std::max(-a.half_width, t + k - b.half_width);
    double hi = std::min(a.half_width, t + k + b.half_width);
    if (lo <= hi) {
      pieces.push_back({wrap1(a.center + 0.5 * (lo + hi)), 0.5 * (hi - lo)});
    }
  }
  return pieces;
}

bool arc_contains_arc(const CircleArc& outer, const CircleArc& inner) {
  return dim_delta(outer.center, inner.center) + inner.half_width <= outer.half_width;
}

}  // namespace core_kge
