#pragma once

// Fast marching for asymmetric quadratic metrics on the pixel grid, with the
// prescribed-distance gate used to build geodesic Voronoi diagrams one
// region at a time.

#include <cstdint>
#include <optional>
#include <vector>

#include "geofront/grid.hpp"
#include "geofront/metric.hpp"

namespace geofront {

struct Offset {
  int dx = 0;
  int dy = 0;
  friend bool operator==(Offset, Offset) = default;
};

/// Ring of primitive grid offsets with max(|dx|, |dy|) <= radius, sorted
/// counter-clockwise. Consecutive offsets (cyclically) form the simplices.
class Stencil {
 public:
  explicit Stencil(int radius);

  int radius() const { return radius_; }
  std::size_t size() const { return offsets_.size(); }
  const std::vector<Offset>& offsets() const { return offsets_; }
  const Offset& operator[](std::size_t k) const { return offsets_[k]; }
  const Offset& next(std::size_t k) const { return offsets_[(k + 1) % offsets_.size()]; }
  const Offset& prev(std::size_t k) const { return offsets_[(k + offsets_.size() - 1) % offsets_.size()]; }

 private:
  int radius_;
  std::vector<Offset> offsets_;
};

/// Radius 1 up to anisotropy 2, radius 2 up to 6, radius 3 beyond.
int stencil_radius_for(double anisotropy_bound);
Stencil build_stencil(double anisotropy_bound);

/// Semi-Lagrangian update of pixel x from the segment [y_a, y_b]:
///   min_t (1-t) D_a + t D_b + F_x(x - ((1-t) y_a + t y_b)).
/// `from_a` = x - y_a and `from_b` = x - y_b. Infinite values drop the
/// corresponding vertex; both infinite gives +inf.
double local_update(Vec2 from_a, Vec2 from_b, double da, double db, const MetricSample& metric);

struct FmmOptions {
  /// Overrides the radius chosen from the metric's anisotropy.
  std::optional<int> stencil_radius;
  /// Pixels within this Euclidean radius of a source start from the
  /// straight-line value F_y(y - s) instead of +inf. 0 disables.
  double source_init_radius = 4.0;
};

struct FmmResult {
  ScalarField distance;
  int stencil_radius = 1;
  std::size_t accepted = 0;
  /// Set whenever a relaxed value had to be raised to the current front
  /// value to keep acceptance monotone.
  std::size_t causality_clamps = 0;
};

/// Fast marching from `sources` inside `active`, relaxing a Trial pixel y
/// from the accepted x_m only while phi(y) >= D(x_m). Pixels never relaxed
/// stay at +inf.
FmmResult fmm_prescribed(const PointSet& sources, const MetricField& metric, const Mask& active,
                         const ScalarField& phi, const FmmOptions& options = {});

/// Unconstrained solve over the metric's whole domain.
FmmResult geodesic_distance(const PointSet& sources, const MetricField& metric, const FmmOptions& options = {});

struct VoronoiResult {
  ScalarField phi;      // final prescribed map, +inf off the bands
  Grid<int> index;      // Voronoi index map, 0 where unassigned
};

/// Successive constrained solves: region i propagates from its offset band
/// over U_i gated by the running minimum of the earlier distance maps.
VoronoiResult voronoi_from_fronts(const std::vector<PointSet>& offset_bands, const std::vector<MetricField>& metrics,
                                  const std::vector<Mask>& region_bands, const FmmOptions& options = {});

}  // namespace geofront
