#include "geofront/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace geofront {

double jaccard(const Mask& seg, const Mask& gt) {
  if (!seg.same_shape(gt)) throw std::invalid_argument("masks differ in size");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < seg.size(); ++i) {
    const bool a = seg[i] != 0;
    const bool b = gt[i] != 0;
    inter += (a && b) ? 1 : 0;
    uni += (a || b) ? 1 : 0;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

Mask foreground_mask(const LabelMap& labels) {
  Mask m(labels.width(), labels.height());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = labels[i] != 1 ? 1 : 0;
  return m;
}

Mask threshold_segment(const ScalarField& distance, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("threshold must be non-negative");
  Mask m(distance.width(), distance.height());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = distance[i] <= threshold ? 1 : 0;
  return m;
}

ThresholdSelection select_t_star(const ScalarField& distance, const Mask& gt) {
  if (!distance.same_shape(gt)) throw std::invalid_argument("distance map and ground truth differ in size");
  const std::size_t g = count(gt);
  if (g == 0) throw std::invalid_argument("empty ground truth");

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < distance.size(); ++i)
    if (std::isfinite(distance[i])) order.push_back(i);
  const double lo_area = 0.9 * static_cast<double>(g);
  const double hi_area = 1.1 * static_cast<double>(g);
  if (static_cast<double>(order.size()) < hi_area) throw std::runtime_error("front under-covers ground truth");
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return distance[a] < distance[b]; });

  ThresholdSelection sel;
  bool have_t1 = false;
  double best = -1.0;
  std::size_t inter = 0;
  std::size_t k = 0;
  while (k < order.size()) {
    // absorb every pixel at this distance value
    const double t = distance[order[k]];
    while (k < order.size() && distance[order[k]] == t) {
      inter += gt[order[k]] ? 1 : 0;
      ++k;
    }
    const double area = static_cast<double>(k);
    if (!have_t1 && area >= lo_area) {
      have_t1 = true;
      sel.t1 = t;
    }
    if (have_t1) {
      const double j = static_cast<double>(inter) / static_cast<double>(k + g - inter);
      if (j > best) {
        best = j;
        sel.t_star = t;
      }
    }
    if (area >= hi_area) {
      sel.t2 = t;
      break;
    }
  }
  sel.jaccard = best;
  sel.mask = threshold_segment(distance, sel.t_star);
  return sel;
}

// ---------------------------------------------------------------------------

SyntheticImage make_synthetic(const std::string& shape, int width, int height, double noise_std, std::uint64_t seed) {
  if (!(noise_std >= 0.0)) throw std::invalid_argument("noise std must be non-negative");
  if (width < 16 || height < 16) throw std::invalid_argument("synthetic images need at least 16 x 16 pixels");
  const double w = width;
  const double h = height;
  const double s = std::min(w, h);

  std::function<bool(double, double)> inside;
  if (shape == "disk") {
    const double r = 0.3 * s;
    inside = [=](double x, double y) { return std::hypot(x - 0.5 * w, y - 0.5 * h) <= r; };
  } else if (shape == "blob") {
    // ellipse body with a thin bar sticking out to the right
    const double cx = 0.38 * w, cy = 0.5 * h, ax = 0.24 * w, ay = 0.2 * h;
    const double half_bar = std::max(2.0, 0.04 * h);
    const double bar_end = 0.75 * w;
    inside = [=](double x, double y) {
      const double ex = (x - cx) / ax;
      const double ey = (y - cy) / ay;
      if (ex * ex + ey * ey <= 1.0) return true;
      return x >= cx && x <= bar_end && std::abs(y - cy) <= half_bar;
    };
  } else if (shape == "lobes") {
    const double r = 0.17 * s;
    const double rc = 0.16 * s;
    inside = [=](double x, double y) {
      if (std::hypot(x - 0.5 * w, y - 0.5 * h) <= 0.5 * rc + 0.02 * s) return true;
      for (int k = 0; k < 3; ++k) {
        const double a = -M_PI / 2.0 + 2.0 * M_PI * k / 3.0;
        if (std::hypot(x - (0.5 * w + rc * std::cos(a)), y - (0.5 * h + rc * std::sin(a))) <= r) return true;
      }
      return false;
    };
  } else {
    throw std::invalid_argument("unknown synthetic shape: " + shape);
  }

  SyntheticImage out;
  out.ground_truth = Mask(width, height);
  out.clean = ImageGrid(width, height, 1);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const bool in = inside(x, y);
      out.ground_truth(x, y) = in ? 1 : 0;
      out.clean.at(x, y, 0) = in ? 0.75 : 0.25;
    }
  out.image = out.clean;
  if (noise_std > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, noise_std);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) out.image.at(x, y, 0) = std::clamp(out.clean.at(x, y, 0) + noise(rng), 0.0, 1.0);
  }
  return out;
}

// ---------------------------------------------------------------------------

PointSet benchmark_seeds(const Mask& gt, int runs, double erosion, const std::string& mode) {
  if (runs < 1) throw std::invalid_argument("at least one run is required");
  const ScalarField depth = depth_map(gt);
  Mask eroded(gt.width(), gt.height());
  for (std::size_t i = 0; i < eroded.size(); ++i) eroded[i] = (gt[i] && depth[i] > erosion) ? 1 : 0;
  if (count(eroded) == 0) throw std::invalid_argument("eroded ground truth is empty");
  if (mode == "deepest") return farthest_point_sampling(eroded, 1);
  if (mode != "fps") throw std::invalid_argument("unknown benchmark mode: " + mode);
  return farthest_point_sampling(eroded, std::min<int>(runs, static_cast<int>(count(eroded))));
}

MethodSummary summarise(const std::vector<BenchmarkRun>& runs, const std::string& image, const std::string& method) {
  MethodSummary s;
  s.image = image;
  s.method = method;
  std::vector<double> j;
  for (const auto& r : runs)
    if (r.image == image && r.method == method) j.push_back(r.jaccard);
  s.runs = static_cast<int>(j.size());
  if (j.empty()) return s;
  s.max = *std::max_element(j.begin(), j.end());
  s.min = *std::min_element(j.begin(), j.end());
  s.ave = std::accumulate(j.begin(), j.end(), 0.0) / static_cast<double>(j.size());
  double v = 0.0;
  for (double x : j) v += (x - s.ave) * (x - s.ave);
  s.std = std::sqrt(v / static_cast<double>(j.size()));
  // guard the ordering against rounding of the mean
  s.ave = std::clamp(s.ave, s.min, s.max);
  return s;
}

BenchmarkReport benchmark(const ImageGrid& image, const Mask& gt, const BenchmarkOptions& options) {
  if (image.width() != gt.width() || image.height() != gt.height()) {
    throw std::invalid_argument("image and ground truth differ in size");
  }
  for (const auto& m : options.methods)
    if (m != "asym" && m != "sym" && m != "thresh") throw std::invalid_argument("unknown method: " + m);
  const PointSet seeds = benchmark_seeds(gt, options.runs, options.init_radius, options.mode);

  BenchmarkReport report;
  std::optional<ThresholdMetric> thresh_metric;
  for (const std::string& method : options.methods) {
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      BenchmarkRun row;
      row.image = options.image_name;
      row.method = method;
      row.run = static_cast<int>(k) + 1;
      row.seed_point = seeds[k];
      const auto t0 = std::chrono::steady_clock::now();
      if (method == "thresh") {
        if (!thresh_metric) thresh_metric = thresholding_metric(image, options.threshold);
        const FmmResult d = geodesic_distance({seeds[k]}, thresh_metric->metric);
        row.jaccard = select_t_star(d.distance, gt).jaccard;
      } else {
        DualFrontConfig cfg = options.config;
        if (method == "sym") cfg.symmetric_mode = true;
        const LabelMap init =
            init_labels({Shape::circle(seeds[k].x, seeds[k].y, options.init_radius)}, image.width(), image.height());
        const RunResult res = run(init, image, cfg);
        row.jaccard = jaccard(foreground_mask(res.labels), gt);
        row.iterations = static_cast<int>(res.trace.steps.size());
      }
      if (options.timing) row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      report.runs.push_back(row);
    }
    report.summary.push_back(summarise(report.runs, options.image_name, method));
  }
  return report;
}

std::string BenchmarkReport::to_csv() const {
  std::ostringstream os;
  os << "image,method,run,seed_point,jaccard,iterations,seconds\n";
  char buf[64];
  for (const auto& r : runs) {
    os << r.image << ',' << r.method << ',' << r.run << ',' << r.seed_point.x << ':' << r.seed_point.y << ',';
    std::snprintf(buf, sizeof buf, "%.6f", r.jaccard);
    os << buf << ',' << r.iterations << ',';
    std::snprintf(buf, sizeof buf, "%.3f", r.seconds);
    os << buf << '\n';
  }
  return os.str();
}

std::string BenchmarkReport::to_json() const {
  nlohmann::ordered_json j;
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    j["runs"].push_back({{"image", r.image},
                         {"method", r.method},
                         {"run", r.run},
                         {"seed_point", {r.seed_point.x, r.seed_point.y}},
                         {"jaccard", r.jaccard},
                         {"iterations", r.iterations},
                         {"seconds", r.seconds}});
  }
  j["summary"] = nlohmann::ordered_json::array();
  for (const auto& s : summary) {
    j["summary"].push_back({{"image", s.image},
                            {"method", s.method},
                            {"runs", s.runs},
                            {"ave", s.ave},
                            {"max", s.max},
                            {"min", s.min},
                            {"std", s.std}});
  }
  return j.dump(2) + "\n";
}

}  // namespace geofront
