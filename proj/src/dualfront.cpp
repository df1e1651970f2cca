#include "geofront/dualfront.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "geofront/eval.hpp"

namespace geofront {

void DualFrontConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("invalid ") + what);
  };
  require(ell >= 2.0, "ell (must be >= 2)");
  require(mu >= 0.0, "mu (must be >= 0)");
  require(alpha >= 0.0, "alpha (must be >= 0)");
  require(sigma > 0.0, "sigma (must be > 0)");
  require(beta >= 0.0, "beta (must be >= 0)");
  require(rho >= 0.0, "rho (must be >= 0)");
  require(q >= 0.0, "q (must be >= 0)");
  require(a >= 0.0, "a (must be >= 0)");
  require(max_iters >= 0, "max_iters (must be >= 0)");
  require(stop_fraction > 0.0 && stop_fraction < 1.0, "stop_fraction (must lie in (0, 1))");
  require(!stencil_radius || (*stencil_radius >= 1 && *stencil_radius <= 3), "stencil_radius (must be 1, 2 or 3)");
  require(model.components >= 1, "model (mixture needs K >= 1)");
  require(model.em_iters >= 0, "em_iters (must be >= 0)");
}

LabelMap init_labels(const std::vector<Shape>& shapes, int width, int height) {
  if (width < 1 || height < 1) throw std::invalid_argument("empty grid");
  if (shapes.empty()) throw std::invalid_argument("no initial shapes");
  Grid<int> g(width, height, 1);
  int label = 1;
  for (const Shape& s : shapes) {
    ++label;
    int xa, ya, xb, yb;
    if (s.kind == Shape::Kind::Circle) {
      if (!(s.radius > 0.0)) throw std::invalid_argument("circle radius must be positive");
      const int r = static_cast<int>(std::floor(s.radius));
      xa = s.x0 - r;
      xb = s.x0 + r;
      ya = s.y0 - r;
      yb = s.y0 + r;
    } else {
      if (s.x1 < s.x0 || s.y1 < s.y0) throw std::invalid_argument("rectangle corners out of order");
      xa = s.x0;
      xb = s.x1;
      ya = s.y0;
      yb = s.y1;
    }
    if (xa < 0 || ya < 0 || xb >= width || yb >= height) throw std::invalid_argument("shape out of bounds");
    for (int y = ya; y <= yb; ++y) {
      for (int x = xa; x <= xb; ++x) {
        if (s.kind == Shape::Kind::Circle) {
          const double dx = x - s.x0;
          const double dy = y - s.y0;
          if (dx * dx + dy * dy > s.radius * s.radius) continue;
        }
        if (g(x, y) != 1) throw std::invalid_argument("overlapping shapes");
        g(x, y) = label;
      }
    }
  }
  return LabelMap(std::move(g), label);
}

// ---------------------------------------------------------------------------

DualFrontEngine::DualFrontEngine(ImageGrid image, DualFrontConfig config)
    : image_(std::move(image)), config_(std::move(config)) {
  config_.validate();
  edges_ = edge_features(image_, EdgeParams{config_.sigma, config_.beta, config_.rho, config_.q});
}

StepFields DualFrontEngine::build_fields(const LabelMap& labels) const {
  if (labels.regions() < 2) throw std::invalid_argument("at least two regions are required");
  if (labels.width() != image_.width() || labels.height() != image_.height()) {
    throw std::invalid_argument("image and label map differ in size");
  }
  const int n = labels.regions();
  ContourGeometry geo(labels, config_.ell);

  ModelSpec model = config_.model;
  model.seed = config_.seed;
  VelocityBundle vel = compute_velocity(model, image_, labels, geo.interfaces);

  std::vector<PointSet> bands;
  for (int i = 1; i <= n; ++i) {
    bands.push_back(extract_offset_band(labels, i, config_.ell, geo.boundary_distance[static_cast<std::size_t>(i - 1)]));
  }

  const auto motion = motion_vector_field(labels, geo, vel.xi, vel.xi_ext);
  std::vector<ScalarField> psi;
  if (config_.single_metric_mode) {
    psi.assign(static_cast<std::size_t>(n), ScalarField(labels.width(), labels.height(), 1.0));
  } else {
    psi = speed_weight(labels, geo, vel.xi, config_.alpha);
  }
  const TensorField& tensor = config_.beta == 0.0 ? edges_.raw_tensor : edges_.tensor;

  std::vector<MetricField> metrics;
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    Mask domain = geo.band.region_band[si];
    for (const Pixel& p : bands[si]) domain(p) = 1;
    metrics.push_back(
        assemble_metric(tensor, smooth_vectors(motion[si], config_.a), psi[si], config_.effective_mu(), domain));
  }

  FmmOptions opts;
  opts.stencil_radius = config_.stencil_radius;
  VoronoiResult vor = voronoi_from_fronts(bands, metrics, geo.band.region_band, opts);
  return StepFields{std::move(geo), std::move(vel), std::move(bands), std::move(metrics), std::move(vor)};
}

LabelMap DualFrontEngine::relabel(const LabelMap& labels, const StepFields& fields, StepRecord* record) const {
  Grid<int> out = labels.grid();
  const Mask& band = fields.geometry.band.contour_band;
  const Grid<int>& index = fields.voronoi.index;
  std::size_t changed = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!band[k] || index[k] == 0 || index[k] == out[k]) continue;
    out[k] = index[k];
    ++changed;
  }
  LabelMap result = compact_labels(out);
  if (record) {
    record->changed = changed;
    record->band_pixels = count(band);
    record->regions = result.regions();
    record->areas = result.areas();
  }
  return result;
}

LabelMap DualFrontEngine::step(const LabelMap& labels, StepRecord* record) const {
  const StepFields fields = build_fields(labels);
  return relabel(labels, fields, record);
}

LabelMap evolve_step(const LabelMap& labels, const ImageGrid& image, const DualFrontConfig& config,
                     StepRecord* record) {
  return DualFrontEngine(image, config).step(labels, record);
}

RunResult run(const LabelMap& initial, const ImageGrid& image, const DualFrontConfig& config,
              const Mask* ground_truth, bool timing) {
  const DualFrontEngine engine(image, config);
  RunResult res{initial, {}};
  for (int it = 1; it <= config.max_iters; ++it) {
    if (res.labels.regions() < 2) break;
    StepRecord rec;
    const auto t0 = std::chrono::steady_clock::now();
    LabelMap next = engine.step(res.labels, &rec);
    if (timing) rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rec.iteration = it;
    if (ground_truth) rec.jaccard = jaccard(foreground_mask(next), *ground_truth);
    res.labels = std::move(next);
    const bool settled = rec.band_pixels == 0 ||
                         static_cast<double>(rec.changed) < config.stop_fraction * static_cast<double>(rec.band_pixels);
    res.trace.steps.push_back(std::move(rec));
    if (settled) break;
  }
  return res;
}

}  // namespace geofront
