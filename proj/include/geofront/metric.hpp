#pragma once

// Asymmetric quadratic metrics F(u) = psi * sqrt(<u, M u> + max(-<u, w>, 0)^2)
// and the image/contour driven fields they are assembled from.

#include <cmath>
#include <vector>

#include "geofront/grid.hpp"

namespace geofront {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Symmetric 2x2 matrix [[m11, m12], [m12, m22]].
struct Tensor2 {
  double m11 = 1.0;
  double m12 = 0.0;
  double m22 = 1.0;

  static Tensor2 identity() { return {1.0, 0.0, 1.0}; }
  static Tensor2 from_eigen(double l1, Vec2 e1, double l2, Vec2 e2);

  double det() const { return m11 * m22 - m12 * m12; }
  bool is_spd() const { return m11 > 0.0 && det() > 0.0; }
  Vec2 apply(Vec2 u) const { return {m11 * u.x + m12 * u.y, m12 * u.x + m22 * u.y}; }
  double quadratic(Vec2 u) const { return u.x * (m11 * u.x + m12 * u.y) + u.y * (m12 * u.x + m22 * u.y); }

  friend bool operator==(const Tensor2&, const Tensor2&) = default;
};

/// Eigen-decomposition of a symmetric 2x2 matrix, major first.
struct Eigen2 {
  double major = 0.0;
  double minor = 0.0;
  Vec2 major_vector{1.0, 0.0};
  Vec2 minor_vector{0.0, 1.0};
};
Eigen2 eigen_decompose(const Tensor2& t);

struct MetricSample {
  Tensor2 tensor;
  Vec2 omega;
  double psi = 1.0;
};

double eval_metric(const MetricSample& m, Vec2 u);

/// Upper bound of max F / min F over unit vectors.
double anisotropy_ratio(const MetricSample& m);

/// K points on the unit sphere {F = 1}, uniformly spaced in angle.
std::vector<Vec2> unit_ball_boundary(const MetricSample& m, int samples);

using VectorField = Grid<Vec2>;
using TensorField = Grid<Tensor2>;

/// Per-pixel metric with the domain on which it is defined.
struct MetricField {
  Grid<MetricSample> samples;
  Mask domain;

  int width() const { return samples.width(); }
  int height() const { return samples.height(); }
  const MetricSample& operator()(int x, int y) const { return samples(x, y); }
  const MetricSample& operator()(Pixel p) const { return samples(p); }

  /// Metric constant over the whole w x h grid.
  static MetricField uniform(int width, int height, const MetricSample& sample);
};

double max_anisotropy(const MetricField& field);

struct EdgeFeatures {
  ScalarField eta;             // normalised edge appearance in [0, 1]
  ScalarField jacobian_norm;   // ||W||_F
  TensorField raw_tensor;      // M before smoothing
  TensorField tensor;          // G_q * M
  VectorField e1;              // cross-edge direction
  VectorField e2;              // along-edge direction
};

struct EdgeParams {
  double sigma = 1.0;  // gradient smoothing
  double beta = 1.0;   // anisotropy exponent
  double rho = 4.0;    // appearance exponent
  double q = 2.0;      // tensor smoothing
};

EdgeFeatures edge_features(const ImageGrid& image, const EdgeParams& params);

/// Central differences, one-sided on the grid border.
VectorField gradient(const ScalarField& f);

/// Per-region motion directions n_i (index 0 is region 1).
std::vector<VectorField> motion_vector_field(const LabelMap& labels, const ContourGeometry& geometry,
                                             const std::vector<ScalarField>& xi, const ScalarField& xi_ext);

/// Structure-tensor smoothing: projects n onto the dominant eigenvector of
/// G_a * (n n^T).
VectorField smooth_vectors(const VectorField& n, double a);

/// psi_i on U_i (index 0 is region 1); 1 outside U_i.
std::vector<ScalarField> speed_weight(const LabelMap& labels, const ContourGeometry& geometry,
                                      const std::vector<ScalarField>& xi, double alpha);

MetricField assemble_metric(const TensorField& tensor, const VectorField& smoothed_motion, const ScalarField& psi,
                            double mu, const Mask& domain);

struct ThresholdMetricParams {
  double sigma = 2.0;
  double beta = 2.0;
  double rho = 8.0;
  double q = 2.0;
  double epsilon = 1.0;
  double epsilon0 = 0.02;
  double t_edge = 0.15;
  double iota = 1e-6;
};

struct ThresholdMetric {
  MetricField metric;
  ScalarField tau1;
  ScalarField tau2;
  VectorField direction;  // the normalised field p
};

ThresholdMetric thresholding_metric(const ImageGrid& image, const ThresholdMetricParams& params);

}  // namespace geofront
