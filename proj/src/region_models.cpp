#include "geofront/region_models.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>

namespace geofront {

ScalarField extended_velocity(const std::vector<ScalarField>& xi, const LabelMap& labels,
                              const InterfaceVoronoi& interfaces) {
  const int n = labels.regions();
  if (static_cast<int>(xi.size()) != n) throw std::invalid_argument("one velocity field per region");
  ScalarField ext(labels.width(), labels.height(), 0.0);
  for (int i = 1; i <= n; ++i) {
    const Grid<int> partner = interfaces.partner_map(i);
    const ScalarField& xi_i = xi[static_cast<std::size_t>(i - 1)];
    for (std::size_t k = 0; k < ext.size(); ++k) {
      if (labels[k] != i || partner[k] == 0) continue;
      ext[k] = xi[static_cast<std::size_t>(partner[k] - 1)][k] - xi_i[k];
    }
  }
  return ext;
}

namespace {

VelocityBundle finish(std::vector<ScalarField> xi, const LabelMap& labels, const InterfaceVoronoi& interfaces) {
  VelocityBundle b;
  b.xi_ext = extended_velocity(xi, labels, interfaces);
  b.xi = std::move(xi);
  return b;
}

void require_nonempty(const LabelMap& labels) {
  for (std::size_t a : labels.areas())
    if (a == 0) throw std::invalid_argument("empty region");
}

void require_shape(const ImageGrid& image, const LabelMap& labels) {
  if (image.width() != labels.width() || image.height() != labels.height()) {
    throw std::invalid_argument("image and label map differ in size");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::vector<double>> region_means(const ImageGrid& image, const LabelMap& labels) {
  require_shape(image, labels);
  require_nonempty(labels);
  const int m = image.channels();
  std::vector<std::vector<double>> sums(static_cast<std::size_t>(labels.regions()), std::vector<double>(m, 0.0));
  const auto areas = labels.areas();
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      auto& s = sums[static_cast<std::size_t>(labels(x, y) - 1)];
      for (int c = 0; c < m; ++c) s[static_cast<std::size_t>(c)] += image.at(x, y, c);
    }
  for (std::size_t i = 0; i < sums.size(); ++i)
    for (double& v : sums[i]) v /= static_cast<double>(areas[i]);
  return sums;
}

VelocityBundle piecewise_constant_velocity(const ImageGrid& image, const LabelMap& labels,
                                           const InterfaceVoronoi& interfaces) {
  const auto means = region_means(image, labels);
  const int m = image.channels();
  std::vector<ScalarField> xi;
  for (const auto& mean : means) {
    ScalarField f(image.width(), image.height(), 0.0);
    for (int y = 0; y < image.height(); ++y)
      for (int x = 0; x < image.width(); ++x) {
        double s = 0.0;
        for (int c = 0; c < m; ++c) {
          const double d = image.at(x, y, c) - mean[static_cast<std::size_t>(c)];
          s += d * d;
        }
        f(x, y) = s;
      }
    xi.push_back(std::move(f));
  }
  return finish(std::move(xi), labels, interfaces);
}

VelocityBundle piecewise_constant_velocity(const ImageGrid& image, const LabelMap& labels) {
  return piecewise_constant_velocity(image, labels, InterfaceVoronoi(labels));
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// Cached evaluation form of one Gaussian: log weight, inverse covariance
// and log normaliser.
struct GaussianEval {
  double log_weight = 0.0;
  double log_norm = 0.0;
  std::vector<double> mean;
  std::vector<double> inverse;
};

GaussianEval prepare(const GaussianComponent& g, int dims) {
  GaussianEval e;
  e.mean = g.mean;
  Eigen::Map<const Eigen::MatrixXd> cov(g.covariance.data(), dims, dims);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw std::runtime_error("covariance is not positive definite");
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(dims, dims));
  e.inverse.assign(inv.data(), inv.data() + dims * dims);
  double logdet = 0.0;
  for (int k = 0; k < dims; ++k) logdet += 2.0 * std::log(llt.matrixL()(k, k));
  e.log_norm = -0.5 * (dims * kLog2Pi + logdet);
  e.log_weight = g.weight > 0.0 ? std::log(g.weight) : -kInf;
  return e;
}

double log_gaussian(const GaussianEval& e, const double* z, int dims) {
  double q = 0.0;
  for (int r = 0; r < dims; ++r) {
    const double dr = z[r] - e.mean[static_cast<std::size_t>(r)];
    for (int c = 0; c < dims; ++c) q += dr * e.inverse[static_cast<std::size_t>(r * dims + c)] * (z[c] - e.mean[static_cast<std::size_t>(c)]);
  }
  return e.log_norm - 0.5 * q;
}

double log_sum_exp(const std::vector<double>& v) {
  const double mx = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : v) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Floors the spectrum of a symmetric matrix, keeping it SPD.
void floor_covariance(std::vector<double>& cov, int dims) {
  Eigen::Map<Eigen::MatrixXd> c(cov.data(), dims, dims);
  const Eigen::MatrixXd sym = 0.5 * (c + c.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(kCovarianceFloor);
  c = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

// M-step from responsibilities (count x K row-major).
std::vector<GaussianComponent> maximise(const std::vector<double>& x, int dims, const std::vector<double>& resp,
                                        int k_count, const std::vector<GaussianComponent>& previous) {
  const std::size_t count = x.size() / static_cast<std::size_t>(dims);
  std::vector<GaussianComponent> out(static_cast<std::size_t>(k_count));
  for (int k = 0; k < k_count; ++k) {
    GaussianComponent& g = out[static_cast<std::size_t>(k)];
    double nk = 0.0;
    std::vector<double> mean(static_cast<std::size_t>(dims), 0.0);
    for (std::size_t s = 0; s < count; ++s) {
      const double r = resp[s * static_cast<std::size_t>(k_count) + static_cast<std::size_t>(k)];
      nk += r;
      for (int d = 0; d < dims; ++d) mean[static_cast<std::size_t>(d)] += r * x[s * static_cast<std::size_t>(dims) + static_cast<std::size_t>(d)];
    }
    if (nk <= 0.0) {
      // starved component: keep its shape, drop its weight
      g = previous.empty() ? GaussianComponent{0.0, mean, {}} : previous[static_cast<std::size_t>(k)];
      g.weight = 0.0;
      if (g.covariance.empty()) {
        g.covariance.assign(static_cast<std::size_t>(dims * dims), 0.0);
        for (int d = 0; d < dims; ++d) g.covariance[static_cast<std::size_t>(d * dims + d)] = kCovarianceFloor;
      }
      continue;
    }
    for (double& v : mean) v /= nk;
    std::vector<double> cov(static_cast<std::size_t>(dims * dims), 0.0);
    for (std::size_t s = 0; s < count; ++s) {
      const double r = resp[s * static_cast<std::size_t>(k_count) + static_cast<std::size_t>(k)];
      if (r == 0.0) continue;
      const double* z = &x[s * static_cast<std::size_t>(dims)];
      for (int a = 0; a < dims; ++a)
        for (int b = 0; b < dims; ++b)
          cov[static_cast<std::size_t>(a * dims + b)] += r * (z[a] - mean[static_cast<std::size_t>(a)]) * (z[b] - mean[static_cast<std::size_t>(b)]);
    }
    for (double& v : cov) v /= nk;
    floor_covariance(cov, dims);
    g.weight = nk / static_cast<double>(count);
    g.mean = std::move(mean);
    g.covariance = std::move(cov);
  }
  return out;
}

// E-step: fills responsibilities and returns the data log-likelihood.
double expect(const std::vector<double>& x, int dims, const std::vector<GaussianComponent>& comps,
              std::vector<double>& resp) {
  const int k_count = static_cast<int>(comps.size());
  std::vector<GaussianEval> ev;
  for (const auto& g : comps) ev.push_back(prepare(g, dims));
  const std::size_t count = x.size() / static_cast<std::size_t>(dims);
  resp.assign(count * static_cast<std::size_t>(k_count), 0.0);
  std::vector<double> lp(static_cast<std::size_t>(k_count));
  double total = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    const double* z = &x[s * static_cast<std::size_t>(dims)];
    for (int k = 0; k < k_count; ++k)
      lp[static_cast<std::size_t>(k)] = ev[static_cast<std::size_t>(k)].log_weight + log_gaussian(ev[static_cast<std::size_t>(k)], z, dims);
    const double l = log_sum_exp(lp);
    total += l;
    for (int k = 0; k < k_count; ++k)
      resp[s * static_cast<std::size_t>(k_count) + static_cast<std::size_t>(k)] = std::exp(lp[static_cast<std::size_t>(k)] - l);
  }
  return total;
}

}  // namespace

double GmmFit::log_density(const double* z) const {
  std::vector<double> lp;
  for (const auto& g : components) {
    const GaussianEval e = prepare(g, dims);
    lp.push_back(e.log_weight + log_gaussian(e, z, dims));
  }
  return log_sum_exp(lp);
}

GmmFit fit_gmm(const std::vector<double>& samples, int dims, int components, int em_iters, std::uint64_t seed) {
  if (dims < 1) throw std::invalid_argument("dims must be positive");
  if (components < 1) throw std::invalid_argument("K must be at least 1");
  if (em_iters < 0) throw std::invalid_argument("em_iters must be non-negative");
  const std::size_t count = samples.size() / static_cast<std::size_t>(dims);
  if (count < static_cast<std::size_t>(components) * static_cast<std::size_t>(dims + 1)) {
    throw std::invalid_argument("region too small for " + std::to_string(components) + " mixture components");
  }

  // k-means++ seeding
  std::mt19937_64 rng(seed);
  auto sample = [&](std::size_t s) { return &samples[s * static_cast<std::size_t>(dims)]; };
  auto sq = [&](const double* a, const double* b) {
    double t = 0.0;
    for (int d = 0; d < dims; ++d) t += (a[d] - b[d]) * (a[d] - b[d]);
    return t;
  };
  std::vector<std::size_t> centres{std::uniform_int_distribution<std::size_t>(0, count - 1)(rng)};
  std::vector<double> near(count, kInf);
  while (static_cast<int>(centres.size()) < components) {
    double total = 0.0;
    for (std::size_t s = 0; s < count; ++s) {
      near[s] = std::min(near[s], sq(sample(s), sample(centres.back())));
      total += near[s];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick + 1 < count; ++pick) {
        u -= near[pick];
        if (u < 0.0) break;
      }
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, count - 1)(rng);
    }
    centres.push_back(pick);
  }
  std::vector<double> resp(count * static_cast<std::size_t>(components), 0.0);
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t best = 0;
    double bd = kInf;
    for (std::size_t k = 0; k < centres.size(); ++k) {
      const double d = sq(sample(s), sample(centres[k]));
      if (d < bd) {
        bd = d;
        best = k;
      }
    }
    resp[s * static_cast<std::size_t>(components) + best] = 1.0;
  }

  GmmFit fit;
  fit.dims = dims;
  fit.components = maximise(samples, dims, resp, components, {});
  fit.log_likelihood.push_back(expect(samples, dims, fit.components, resp));
  for (int it = 0; it < em_iters; ++it) {
    fit.components = maximise(samples, dims, resp, components, fit.components);
    const double ll = expect(samples, dims, fit.components, resp);
    const double prev = fit.log_likelihood.back();
    if (ll < prev - 1e-9 * std::max(1.0, std::abs(prev))) throw std::logic_error("EM log-likelihood decreased");
    fit.log_likelihood.push_back(ll);
  }
  return fit;
}

std::vector<GmmFit> fit_region_gmms(const ImageGrid& image, const LabelMap& labels, int components, int em_iters,
                                    std::uint64_t seed) {
  require_shape(image, labels);
  require_nonempty(labels);
  const int m = image.channels();
  std::vector<std::vector<double>> data(static_cast<std::size_t>(labels.regions()));
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      auto& d = data[static_cast<std::size_t>(labels(x, y) - 1)];
      for (int c = 0; c < m; ++c) d.push_back(image.at(x, y, c));
    }
  std::vector<GmmFit> fits;
  for (std::size_t i = 0; i < data.size(); ++i) fits.push_back(fit_gmm(data[i], m, components, em_iters, seed + i));
  return fits;
}

VelocityBundle gmm_velocity(const ImageGrid& image, const LabelMap& labels, int components, int em_iters,
                            std::uint64_t seed, const InterfaceVoronoi& interfaces) {
  const auto fits = fit_region_gmms(image, labels, components, em_iters, seed);
  const int m = image.channels();
  const double log_floor = std::log(kProbabilityFloor);
  std::vector<ScalarField> xi;
  std::vector<double> z(static_cast<std::size_t>(m));
  std::vector<double> lp;
  for (const GmmFit& fit : fits) {
    std::vector<GaussianEval> ev;
    for (const auto& g : fit.components) ev.push_back(prepare(g, m));
    lp.resize(ev.size());
    ScalarField f(image.width(), image.height(), 0.0);
    for (int y = 0; y < image.height(); ++y)
      for (int x = 0; x < image.width(); ++x) {
        for (int c = 0; c < m; ++c) z[static_cast<std::size_t>(c)] = image.at(x, y, c);
        for (std::size_t k = 0; k < ev.size(); ++k) lp[k] = ev[k].log_weight + log_gaussian(ev[k], z.data(), m);
        f(x, y) = -std::max(log_sum_exp(lp), log_floor);
      }
    xi.push_back(std::move(f));
  }
  return finish(std::move(xi), labels, interfaces);
}

VelocityBundle gmm_velocity(const ImageGrid& image, const LabelMap& labels, int components, int em_iters,
                            std::uint64_t seed) {
  return gmm_velocity(image, labels, components, em_iters, seed, InterfaceVoronoi(labels));
}

// ---------------------------------------------------------------------------

KernelHistogram::KernelHistogram(int bins, double bandwidth) : bins_(bins), bandwidth_(bandwidth) {
  if (bins < 2) throw std::invalid_argument("at least two histogram bins are required");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
}

std::vector<double> KernelHistogram::kernel(double v) const {
  std::vector<double> w(static_cast<std::size_t>(bins_));
  const double pos = v * bins_ - 0.5;  // value in bin-centre coordinates
  double total = 0.0;
  for (int b = 0; b < bins_; ++b) {
    const double d = (b - pos) / bandwidth_;
    w[static_cast<std::size_t>(b)] = std::exp(-0.5 * d * d);
    total += w[static_cast<std::size_t>(b)];
  }
  for (double& x : w) x /= total;
  return w;
}

std::vector<double> KernelHistogram::histogram(const std::vector<double>& values) const {
  if (values.empty()) throw std::invalid_argument("empty region");
  // quantised images repeat values heavily
  std::map<double, std::size_t> counts;
  for (double v : values) ++counts[v];
  std::vector<double> h(static_cast<std::size_t>(bins_), 0.0);
  for (const auto& [v, n] : counts) {
    const auto w = kernel(v);
    for (std::size_t b = 0; b < h.size(); ++b) h[b] += static_cast<double>(n) * w[b];
  }
  for (double& x : h) x /= static_cast<double>(values.size());
  return h;
}

double bhattacharyya_coefficient(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("histograms differ in size");
  double s = 0.0;
  for (std::size_t b = 0; b < p.size(); ++b) s += std::sqrt(p[b] * q[b]);
  return s;
}

BhattacharyyaStats bhattacharyya_stats(const ImageGrid& image, const LabelMap& labels, const KernelHistogram& kh) {
  require_shape(image, labels);
  if (labels.regions() != 2) throw std::invalid_argument("Bhattacharyya model is two-phase only");
  require_nonempty(labels);
  BhattacharyyaStats st;
  const auto areas = labels.areas();
  st.area1 = static_cast<double>(areas[0]);
  st.area2 = static_cast<double>(areas[1]);
  st.coefficient = 1.0;
  for (int c = 0; c < image.channels(); ++c) {
    std::vector<double> v1, v2;
    for (int y = 0; y < image.height(); ++y)
      for (int x = 0; x < image.width(); ++x) (labels(x, y) == 1 ? v1 : v2).push_back(image.at(x, y, c));
    st.hist1.push_back(kh.histogram(v1));
    st.hist2.push_back(kh.histogram(v2));
    st.coefficient *= bhattacharyya_coefficient(st.hist1.back(), st.hist2.back());
  }
  return st;
}

double bhattacharyya_y(const BhattacharyyaStats& st, const KernelHistogram& kh, const double* value, int channels) {
  // The kernel and both histograms factor over channels, so each integral
  // is a product of per-channel sums.
  double term1 = 1.0;
  double term2 = 1.0;
  for (int c = 0; c < channels; ++c) {
    const auto w = kh.kernel(value[c]);
    const auto& p1 = st.hist1[static_cast<std::size_t>(c)];
    const auto& p2 = st.hist2[static_cast<std::size_t>(c)];
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::size_t b = 0; b < w.size(); ++b) {
      const double a = std::max(p1[b], kProbabilityFloor);
      const double q = std::max(p2[b], kProbabilityFloor);
      s1 += w[b] * std::sqrt(q / a);
      s2 += w[b] * std::sqrt(a / q);
    }
    term1 *= s1;
    term2 *= s2;
  }
  return term1 / st.area1 - term2 / st.area2;
}

VelocityBundle bhattacharyya_velocity(const ImageGrid& image, const LabelMap& labels, double bandwidth, int bins,
                                      const InterfaceVoronoi& interfaces) {
  const KernelHistogram kh(bins, bandwidth);
  const BhattacharyyaStats st = bhattacharyya_stats(image, labels, kh);
  const int m = image.channels();
  const double area_term = -0.5 * st.coefficient * (1.0 / st.area1 - 1.0 / st.area2);
  ScalarField xi1(image.width(), image.height(), 0.0);
  std::vector<double> z(static_cast<std::size_t>(m));
  std::map<std::vector<double>, double> cache;
  for (int y = 0; y < image.height(); ++y)
    for (int x = 0; x < image.width(); ++x) {
      for (int c = 0; c < m; ++c) z[static_cast<std::size_t>(c)] = image.at(x, y, c);
      auto it = cache.find(z);
      if (it == cache.end()) it = cache.emplace(z, bhattacharyya_y(st, kh, z.data(), m)).first;
      xi1(x, y) = area_term + 0.5 * it->second;
    }
  ScalarField xi2 = xi1;
  for (double& v : xi2.values()) v = -v;
  return finish({std::move(xi1), std::move(xi2)}, labels, interfaces);
}

VelocityBundle bhattacharyya_velocity(const ImageGrid& image, const LabelMap& labels, double bandwidth, int bins) {
  if (labels.regions() != 2) throw std::invalid_argument("Bhattacharyya model is two-phase only");
  return bhattacharyya_velocity(image, labels, bandwidth, bins, InterfaceVoronoi(labels));
}

// ---------------------------------------------------------------------------

ModelSpec ModelSpec::parse(const std::string& text) {
  ModelSpec m;
  if (text == "pc") {
    m.kind = Kind::PiecewiseConstant;
  } else if (text == "bhat") {
    m.kind = Kind::Bhattacharyya;
  } else if (text == "gmm") {
    m.kind = Kind::Gmm;
  } else if (text.rfind("gmm:", 0) == 0) {
    m.kind = Kind::Gmm;
    std::size_t used = 0;
    int k = 0;
    try {
      k = std::stoi(text.substr(4), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 4 || k < 1) throw std::invalid_argument("bad model: " + text);
    m.components = k;
  } else {
    throw std::invalid_argument("bad model: " + text);
  }
  return m;
}

std::string ModelSpec::name() const {
  switch (kind) {
    case Kind::PiecewiseConstant:
      return "pc";
    case Kind::Gmm:
      return "gmm:" + std::to_string(components);
    case Kind::Bhattacharyya:
      return "bhat";
  }
  return "pc";
}

VelocityBundle compute_velocity(const ModelSpec& model, const ImageGrid& image, const LabelMap& labels,
                                const InterfaceVoronoi& interfaces) {
  switch (model.kind) {
    case ModelSpec::Kind::PiecewiseConstant:
      return piecewise_constant_velocity(image, labels, interfaces);
    case ModelSpec::Kind::Gmm:
      return gmm_velocity(image, labels, model.components, model.em_iters, model.seed, interfaces);
    case ModelSpec::Kind::Bhattacharyya:
      return bhattacharyya_velocity(image, labels, model.bandwidth, model.bins, interfaces);
  }
  throw std::invalid_argument("unknown model");
}

}  // namespace geofront
