#pragma once

// Voronoi-diagram dual-front contour evolution.

#include <cstdint>
#include <optional>
#include <vector>

#include "geofront/eikonal.hpp"
#include "geofront/grid.hpp"
#include "geofront/metric.hpp"
#include "geofront/region_models.hpp"

namespace geofront {

struct DualFrontConfig {
  double ell = 10.0;    // band half-width
  double mu = 5.0;      // asymmetry weight
  double alpha = 0.2;   // speed-weight exponent
  double sigma = 1.0;   // gradient smoothing
  double beta = 1.0;
  double rho = 4.0;
  double q = 2.0;       // tensor smoothing
  double a = 3.0;       // motion-field smoothing
  ModelSpec model;
  int max_iters = 200;
  double stop_fraction = 0.002;
  std::optional<int> stencil_radius;  // unset: chosen from the metric
  bool symmetric_mode = false;        // forces mu = 0
  bool single_metric_mode = false;    // forces psi = 1
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  double effective_mu() const { return symmetric_mode ? 0.0 : mu; }
};

struct StepRecord {
  int iteration = 0;
  std::size_t changed = 0;      // relabelled pixels
  std::size_t band_pixels = 0;  // |U_Gamma|
  int regions = 0;              // after the step
  std::vector<std::size_t> areas;
  std::optional<double> jaccard;
  double seconds = 0.0;
};

struct EvolutionTrace {
  std::vector<StepRecord> steps;
};

struct Shape {
  enum class Kind { Circle, Rectangle };
  Kind kind = Kind::Circle;
  // circle: centre (x0, y0) and radius; rectangle: inclusive corners
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;
  double radius = 0.0;

  static Shape circle(int cx, int cy, double r) { return {Kind::Circle, cx, cy, 0, 0, r}; }
  static Shape rectangle(int xa, int ya, int xb, int yb) { return {Kind::Rectangle, xa, ya, xb, yb, 0.0}; }
};

/// Shapes become regions 2..n over the background region 1.
LabelMap init_labels(const std::vector<Shape>& shapes, int width, int height);

/// Everything one evolution step builds, exposed for inspection.
struct StepFields {
  ContourGeometry geometry;
  VelocityBundle velocity;
  std::vector<PointSet> offset_bands;
  std::vector<MetricField> metrics;
  VoronoiResult voronoi;
};

class DualFrontEngine {
 public:
  DualFrontEngine(ImageGrid image, DualFrontConfig config);

  const ImageGrid& image() const { return image_; }
  const DualFrontConfig& config() const { return config_; }
  const EdgeFeatures& edges() const { return edges_; }

  /// One step; labels outside U_Gamma are left untouched and vanished
  /// regions are compacted away.
  LabelMap step(const LabelMap& labels, StepRecord* record = nullptr) const;
  StepFields build_fields(const LabelMap& labels) const;
  /// Relabels U_Gamma from the Voronoi index map in `fields`.
  LabelMap relabel(const LabelMap& labels, const StepFields& fields, StepRecord* record = nullptr) const;

 private:
  ImageGrid image_;
  DualFrontConfig config_;
  EdgeFeatures edges_;
};

LabelMap evolve_step(const LabelMap& labels, const ImageGrid& image, const DualFrontConfig& config,
                     StepRecord* record = nullptr);

struct RunResult {
  LabelMap labels;
  EvolutionTrace trace;
};

/// Iterates until the changed fraction of U_Gamma drops below
/// stop_fraction, max_iters is reached or a single region remains.
/// `timing` fills the per-step wall time; otherwise it stays 0.
RunResult run(const LabelMap& initial, const ImageGrid& image, const DualFrontConfig& config,
              const Mask* ground_truth = nullptr, bool timing = false);

}  // namespace geofront
