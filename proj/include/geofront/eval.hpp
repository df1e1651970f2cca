#pragma once

// Scoring, the distance-thresholding baseline, synthetic data and the
// multi-run benchmark protocol.

#include <cstdint>
#include <string>
#include <vector>

#include "geofront/dualfront.hpp"
#include "geofront/grid.hpp"
#include "geofront/metric.hpp"

namespace geofront {

/// |seg & gt| / |seg | gt|; two empty masks score 1.
double jaccard(const Mask& seg, const Mask& gt);

/// Every region except the background region 1.
Mask foreground_mask(const LabelMap& labels);

/// Pixels with D <= T.
Mask threshold_segment(const ScalarField& distance, double threshold);

struct ThresholdSelection {
  double t_star = 0.0;
  double t1 = 0.0;  // area first reaches 90% of |gt|
  double t2 = 0.0;  // area first reaches 110% of |gt|
  double jaccard = 0.0;
  Mask mask;
};

/// Sweeps the finite distance values in [T1, T2] and keeps the threshold
/// with the best Jaccard (smallest on ties).
ThresholdSelection select_t_star(const ScalarField& distance, const Mask& gt);

struct SyntheticImage {
  ImageGrid image;
  Mask ground_truth;
  ImageGrid clean;
};

/// Two-tone (0.25 background, 0.75 object) shapes plus clipped Gaussian
/// noise. Shapes: "disk", "blob" (ellipse with a thin appendage), "lobes".
SyntheticImage make_synthetic(const std::string& shape, int width, int height, double noise_std, std::uint64_t seed);

struct BenchmarkOptions {
  std::vector<std::string> methods{"asym", "sym", "thresh"};
  int runs = 20;
  std::string mode = "fps";  // or "deepest"
  double init_radius = 10.0;
  DualFrontConfig config;
  ThresholdMetricParams threshold;
  std::string image_name = "image";
  bool timing = false;
};

struct BenchmarkRun {
  std::string image;
  std::string method;
  int run = 0;
  Pixel seed_point;
  double jaccard = 0.0;
  int iterations = 0;
  double seconds = 0.0;
};

struct MethodSummary {
  std::string image;
  std::string method;
  double ave = 0.0;
  double max = 0.0;
  double min = 0.0;
  double std = 0.0;  // population standard deviation
  int runs = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRun> runs;
  std::vector<MethodSummary> summary;

  std::string to_csv() const;
  std::string to_json() const;
};

/// Seed points for the protocol: FPS inside the ground truth eroded by
/// `erosion`, or the single deepest pixel.
PointSet benchmark_seeds(const Mask& gt, int runs, double erosion, const std::string& mode);

MethodSummary summarise(const std::vector<BenchmarkRun>& runs, const std::string& image, const std::string& method);

BenchmarkReport benchmark(const ImageGrid& image, const Mask& gt, const BenchmarkOptions& options);

}  // namespace geofront
