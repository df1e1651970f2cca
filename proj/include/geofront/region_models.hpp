#pragma once

// Region homogeneity models and the velocities xi_i / xi_ext they induce.

#include <cstdint>
#include <string>
#include <vector>

#include "geofront/grid.hpp"

namespace geofront {

struct VelocityBundle {
  std::vector<ScalarField> xi;  // index 0 is region 1, defined on the whole grid
  ScalarField xi_ext;           // xi_j - xi_i, j the nearest neighbouring region
};

/// xi_ext(x) = xi_j(x) - xi_i(x) for x in region i whose nearest interface
/// is Gamma_{i,j}; 0 where a region has no interface.
ScalarField extended_velocity(const std::vector<ScalarField>& xi, const LabelMap& labels,
                              const InterfaceVoronoi& interfaces);

// ---------------------------------------------------------------------------
// Piecewise constant

/// Per-region per-channel means (index 0 is region 1).
std::vector<std::vector<double>> region_means(const ImageGrid& image, const LabelMap& labels);

VelocityBundle piecewise_constant_velocity(const ImageGrid& image, const LabelMap& labels,
                                           const InterfaceVoronoi& interfaces);
VelocityBundle piecewise_constant_velocity(const ImageGrid& image, const LabelMap& labels);

// ---------------------------------------------------------------------------
// Gaussian mixtures

inline constexpr double kProbabilityFloor = 1e-12;
inline constexpr double kCovarianceFloor = 1e-4;

struct GaussianComponent {
  double weight = 0.0;
  std::vector<double> mean;        // M entries
  std::vector<double> covariance;  // M x M row-major
};

struct GmmFit {
  int dims = 1;
  std::vector<GaussianComponent> components;
  std::vector<double> log_likelihood;  // after initialisation, then after every EM iteration

  double log_density(const double* z) const;
};

/// EM on `samples` (count x dims, row-major) with k-means++ seeding drawn
/// from `seed`. Covariance eigenvalues are floored at kCovarianceFloor.
/// Throws when there are fewer than components * (dims + 1) samples.
GmmFit fit_gmm(const std::vector<double>& samples, int dims, int components, int em_iters, std::uint64_t seed);

std::vector<GmmFit> fit_region_gmms(const ImageGrid& image, const LabelMap& labels, int components, int em_iters,
                                    std::uint64_t seed);

VelocityBundle gmm_velocity(const ImageGrid& image, const LabelMap& labels, int components, int em_iters,
                            std::uint64_t seed, const InterfaceVoronoi& interfaces);
VelocityBundle gmm_velocity(const ImageGrid& image, const LabelMap& labels, int components, int em_iters,
                            std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Bhattacharyya coefficient (two regions)

/// Kernel-smoothed histogram of one channel: `bins` uniform bins over [0, 1]
/// and a Gaussian kernel of standard deviation `bandwidth` bins.
class KernelHistogram {
 public:
  KernelHistogram(int bins, double bandwidth);

  int bins() const { return bins_; }
  double bandwidth() const { return bandwidth_; }
  /// Normalised kernel weights G(pi - v) over all bins.
  std::vector<double> kernel(double v) const;
  /// Accumulates the normalised histogram of `values`.
  std::vector<double> histogram(const std::vector<double>& values) const;

 private:
  int bins_;
  double bandwidth_;
};

struct BhattacharyyaStats {
  double coefficient = 0.0;
  std::vector<std::vector<double>> hist1;  // per channel
  std::vector<std::vector<double>> hist2;
  double area1 = 0.0;
  double area2 = 0.0;
};

/// Sum over bins of sqrt(p q).
double bhattacharyya_coefficient(const std::vector<double>& p, const std::vector<double>& q);

BhattacharyyaStats bhattacharyya_stats(const ImageGrid& image, const LabelMap& labels, const KernelHistogram& kh);

/// The kernel-weighted ratio term Y at intensity vector `value`.
double bhattacharyya_y(const BhattacharyyaStats& stats, const KernelHistogram& kh, const double* value, int channels);

VelocityBundle bhattacharyya_velocity(const ImageGrid& image, const LabelMap& labels, double bandwidth, int bins,
                                      const InterfaceVoronoi& interfaces);
VelocityBundle bhattacharyya_velocity(const ImageGrid& image, const LabelMap& labels, double bandwidth = 2.0,
                                      int bins = 64);

// ---------------------------------------------------------------------------

struct ModelSpec {
  enum class Kind { PiecewiseConstant, Gmm, Bhattacharyya };
  Kind kind = Kind::PiecewiseConstant;
  int components = 2;
  int em_iters = 15;
  int bins = 64;
  double bandwidth = 2.0;
  std::uint64_t seed = 0;

  /// "pc", "gmm", "gmm:K" or "bhat".
  static ModelSpec parse(const std::string& text);
  std::string name() const;
};

VelocityBundle compute_velocity(const ModelSpec& model, const ImageGrid& image, const LabelMap& labels,
                                const InterfaceVoronoi& interfaces);

}  // namespace geofront
