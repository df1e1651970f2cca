#include "geofront/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geofront {

Tensor2 Tensor2::from_eigen(double l1, Vec2 e1, double l2, Vec2 e2) {
  return {l1 * e1.x * e1.x + l2 * e2.x * e2.x, l1 * e1.x * e1.y + l2 * e2.x * e2.y,
          l1 * e1.y * e1.y + l2 * e2.y * e2.y};
}

Eigen2 eigen_decompose(const Tensor2& t) {
  const double half_trace = 0.5 * (t.m11 + t.m22);
  const double half_diff = 0.5 * (t.m11 - t.m22);
  const double r = std::hypot(half_diff, t.m12);
  Eigen2 e;
  e.major = half_trace + r;
  e.minor = half_trace - r;
  if (r == 0.0) return e;  // isotropic: any orthonormal frame
  // (major - m22, m12) and (m12, major - m11) are both eigenvectors; pick the
  // better conditioned one.
  Vec2 v = half_diff >= 0.0 ? Vec2{half_diff + r, t.m12} : Vec2{t.m12, r - half_diff};
  const double len = norm(v);
  v = (1.0 / len) * v;
  e.major_vector = v;
  e.minor_vector = {-v.y, v.x};
  return e;
}

double eval_metric(const MetricSample& m, Vec2 u) {
  const double neg = std::max(-dot(u, m.omega), 0.0);
  return m.psi * std::sqrt(std::max(m.tensor.quadratic(u), 0.0) + neg * neg);
}

double anisotropy_ratio(const MetricSample& m) {
  const Eigen2 e = eigen_decompose(m.tensor);
  if (!(e.minor > 0.0)) return kInf;
  return std::sqrt((e.major + dot(m.omega, m.omega)) / e.minor);
}

std::vector<Vec2> unit_ball_boundary(const MetricSample& m, int samples) {
  if (samples < 8) throw std::invalid_argument("unit ball needs at least 8 samples");
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / samples;
    const Vec2 d{std::cos(theta), std::sin(theta)};
    out.push_back((1.0 / eval_metric(m, d)) * d);
  }
  return out;
}

MetricField MetricField::uniform(int width, int height, const MetricSample& sample) {
  return {Grid<MetricSample>(width, height, sample), Mask(width, height, 1)};
}

double max_anisotropy(const MetricField& field) {
  double worst = 1.0;
  for (std::size_t i = 0; i < field.samples.size(); ++i)
    if (field.domain[i]) worst = std::max(worst, anisotropy_ratio(field.samples[i]));
  return worst;
}

// ---------------------------------------------------------------------------

VectorField gradient(const ScalarField& f) {
  const int w = f.width();
  const int h = f.height();
  VectorField g(w, h);
  auto diff = [](double lo, double hi, int span) { return (hi - lo) / span; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(x - 1, 0), x1 = std::min(x + 1, w - 1);
      const int y0 = std::max(y - 1, 0), y1 = std::min(y + 1, h - 1);
      g(x, y) = {x1 > x0 ? diff(f(x0, y), f(x1, y), x1 - x0) : 0.0,
                 y1 > y0 ? diff(f(x, y0), f(x, y1), y1 - y0) : 0.0};
    }
  }
  return g;
}

namespace {

TensorField smooth_tensors(const TensorField& t, double q) {
  const int w = t.width();
  const int h = t.height();
  ScalarField a(w, h), b(w, h), c(w, h);
  for (std::size_t i = 0; i < t.size(); ++i) {
    a[i] = t[i].m11;
    b[i] = t[i].m12;
    c[i] = t[i].m22;
  }
  a = gaussian_convolve(a, q);
  b = gaussian_convolve(b, q);
  c = gaussian_convolve(c, q);
  TensorField out(w, h);
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = {a[i], b[i], c[i]};
  return out;
}

}  // namespace

EdgeFeatures edge_features(const ImageGrid& image, const EdgeParams& p) {
  if (!(p.sigma > 0.0)) throw std::invalid_argument("gradient smoothing must be positive");
  if (p.q < 0.0 || p.beta < 0.0 || p.rho < 0.0) throw std::invalid_argument("edge parameters must be non-negative");
  const int w = image.width();
  const int h = image.height();

  // W W^T accumulated over channels
  TensorField structure(w, h, Tensor2{0.0, 0.0, 0.0});
  for (int c = 0; c < image.channels(); ++c) {
    const VectorField g = gradient(gaussian_convolve(image.channel(c), p.sigma));
    for (std::size_t i = 0; i < g.size(); ++i) {
      structure[i].m11 += g[i].x * g[i].x;
      structure[i].m12 += g[i].x * g[i].y;
      structure[i].m22 += g[i].y * g[i].y;
    }
  }

  EdgeFeatures f;
  f.jacobian_norm = ScalarField(w, h);
  double sup = 0.0;
  for (std::size_t i = 0; i < structure.size(); ++i) {
    f.jacobian_norm[i] = std::sqrt(structure[i].m11 + structure[i].m22);
    sup = std::max(sup, f.jacobian_norm[i]);
  }
  f.eta = ScalarField(w, h, 0.0);
  if (sup > 0.0)
    for (std::size_t i = 0; i < f.eta.size(); ++i) f.eta[i] = f.jacobian_norm[i] / sup;

  f.raw_tensor = TensorField(w, h);
  f.e1 = VectorField(w, h, Vec2{1.0, 0.0});
  f.e2 = VectorField(w, h, Vec2{0.0, 1.0});
  for (std::size_t i = 0; i < structure.size(); ++i) {
    const Eigen2 e = eigen_decompose(structure[i]);
    f.e1[i] = e.major_vector;
    f.e2[i] = e.minor_vector;
    const double eta = f.eta[i];
    if (eta == 0.0) {
      f.raw_tensor[i] = Tensor2::identity();
      continue;
    }
    f.raw_tensor[i] = Tensor2::from_eigen(std::exp((p.beta + p.rho) * eta), e.major_vector,
                                          std::exp(p.rho * eta), e.minor_vector);
  }
  f.tensor = smooth_tensors(f.raw_tensor, p.q);
  return f;
}

// ---------------------------------------------------------------------------

namespace {

int sign(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

std::vector<VectorField> motion_vector_field(const LabelMap& labels, const ContourGeometry& geo,
                                             const std::vector<ScalarField>& xi, const ScalarField& xi_ext) {
  const int w = labels.width();
  const int h = labels.height();
  const int n = labels.regions();
  if (xi.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("one velocity field per region");

  VectorField away = gradient(geo.contour_distance);
  for (Vec2& v : away.values()) {
    const double len = norm(v);
    v = len > 1e-12 ? (1.0 / len) * v : Vec2{};
  }

  std::vector<VectorField> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) {
    const auto ri = static_cast<std::size_t>(r - 1);
    const Mask& band = geo.band.region_band[ri];
    const ScalarField& on_boundary = geo.boundary_distance[ri];
    const Grid<int>& partner = geo.partner[ri];

    // inward normal of region r: descent direction of its distance map
    const VectorField toward = gradient(squared_distance_transform(labels.region_mask(r)));

    VectorField nf(w, h);
    for (std::size_t i = 0; i < nf.size(); ++i) {
      if (!band[i]) continue;
      if (on_boundary[i] == 0.0) {
        const int j = partner[i];
        if (j == 0) continue;
        const Vec2 g = toward[i];
        const double len = norm(g);
        if (len == 0.0) continue;
        nf[i] = static_cast<double>(sign(xi[ri][i] - xi[static_cast<std::size_t>(j - 1)][i])) * (-1.0 / len) * g;
      } else {
        nf[i] = static_cast<double>(sign(-xi_ext[i])) * away[i];
      }
    }
    out.push_back(std::move(nf));
  }
  return out;
}

VectorField smooth_vectors(const VectorField& n, double a) {
  if (a < 0.0) throw std::invalid_argument("vector smoothing must be non-negative");
  const int w = n.width();
  const int h = n.height();
  TensorField outer(w, h);
  for (std::size_t i = 0; i < n.size(); ++i) outer[i] = {n[i].x * n[i].x, n[i].x * n[i].y, n[i].y * n[i].y};
  const TensorField s = smooth_tensors(outer, a);
  VectorField out(w, h);
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i].x == 0.0 && n[i].y == 0.0) continue;
    const Vec2 dom = eigen_decompose(s[i]).major_vector;
    out[i] = dot(n[i], dom) * dom;
  }
  return out;
}

std::vector<ScalarField> speed_weight(const LabelMap& labels, const ContourGeometry& geo,
                                      const std::vector<ScalarField>& xi, double alpha) {
  if (alpha < 0.0) throw std::invalid_argument("speed-weight exponent must be non-negative");
  const int n = labels.regions();
  std::vector<ScalarField> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) {
    const auto ri = static_cast<std::size_t>(r - 1);
    const Mask& band = geo.band.region_band[ri];
    const Grid<int>& partner = geo.partner[ri];
    std::vector<double> sup(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t i = 0; i < band.size(); ++i) {
      if (!band[i] || partner[i] == 0) continue;
      const double d = std::abs(xi[ri][i] - xi[static_cast<std::size_t>(partner[i] - 1)][i]);
      sup[static_cast<std::size_t>(partner[i])] = std::max(sup[static_cast<std::size_t>(partner[i])], d);
    }
    ScalarField psi(labels.width(), labels.height(), 1.0);
    for (std::size_t i = 0; i < band.size(); ++i) {
      if (!band[i] || partner[i] == 0) continue;
      const double s = sup[static_cast<std::size_t>(partner[i])];
      if (s == 0.0) continue;
      psi[i] = std::exp(alpha * (xi[ri][i] - xi[static_cast<std::size_t>(partner[i] - 1)][i]) / s);
    }
    out.push_back(std::move(psi));
  }
  return out;
}

MetricField assemble_metric(const TensorField& tensor, const VectorField& smoothed_motion, const ScalarField& psi,
                            double mu, const Mask& domain) {
  if (mu < 0.0) throw std::invalid_argument("asymmetry weight must be non-negative");
  const int w = tensor.width();
  const int h = tensor.height();
  if (!smoothed_motion.same_shape(tensor) || !psi.same_shape(tensor) || !domain.same_shape(tensor)) {
    throw std::invalid_argument("metric ingredients differ in size");
  }
  MetricField m{Grid<MetricSample>(w, h), domain};
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    MetricSample& s = m.samples[i];
    s.tensor = tensor[i];
    s.omega = mu * smoothed_motion[i];
    s.psi = psi[i];
    if (domain[i] && (!s.tensor.is_spd() || !(s.psi > 0.0))) {
      throw std::runtime_error("assembled metric is not positive definite");
    }
  }
  return m;
}

ThresholdMetric thresholding_metric(const ImageGrid& image, const ThresholdMetricParams& p) {
  if (!(p.t_edge > 0.0 && p.t_edge < 1.0)) throw std::invalid_argument("edge threshold must lie in (0, 1)");
  const EdgeFeatures f = edge_features(image, {p.sigma, p.beta, p.rho, p.q});
  const int w = image.width();
  const int h = image.height();

  ThresholdMetric out;
  out.tau1 = ScalarField(w, h);
  out.tau2 = ScalarField(w, h);
  out.direction = gradient(gaussian_convolve(f.eta, p.sigma));
  for (Vec2& v : out.direction.values()) v = (1.0 / (norm(v) + p.iota)) * v;

  out.metric = MetricField::uniform(w, h, MetricSample{});
  for (std::size_t i = 0; i < f.eta.size(); ++i) {
    const double eta = f.eta[i] >= p.t_edge ? f.eta[i] : 0.0;
    const double tau2 = std::max(std::exp(p.beta * eta) - p.epsilon, p.epsilon0);
    const double tau1 = std::max(std::exp(p.rho * eta) - p.epsilon, p.epsilon0) * tau2;
    out.tau1[i] = tau1;
    out.tau2[i] = tau2;
    const Eigen2 e = eigen_decompose(f.tensor[i]);
    MetricSample& s = out.metric.samples[i];
    s.tensor = Tensor2::from_eigen(tau1, e.major_vector, tau2, e.minor_vector);
    s.omega = tau2 * out.direction[i];
    s.psi = 1.0;
  }
  return out;
}

}  // namespace geofront
