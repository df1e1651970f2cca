#include "geofront/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace geofront {

Stencil::Stencil(int radius) : radius_(radius) {
  if (radius < 1) throw std::invalid_argument("stencil radius must be at least 1");
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if ((dx != 0 || dy != 0) && std::gcd(dx, dy) == 1) offsets_.push_back({dx, dy});
  std::sort(offsets_.begin(), offsets_.end(),
            [](Offset a, Offset b) { return std::atan2(a.dy, a.dx) < std::atan2(b.dy, b.dx); });
}

int stencil_radius_for(double anisotropy_bound) {
  if (!(anisotropy_bound >= 1.0)) throw std::invalid_argument("anisotropy bound must be at least 1");
  if (anisotropy_bound <= 2.0) return 1;
  if (anisotropy_bound <= 6.0) return 2;
  return 3;
}

Stencil build_stencil(double anisotropy_bound) { return Stencil(stencil_radius_for(anisotropy_bound)); }

// ---------------------------------------------------------------------------

namespace {

// Minimiser of c t + psi sqrt(A t^2 + 2 B t + C) over [t0, t1]; the
// function is convex, so the stationary point clamped to the interval wins.
double stationary_point(double c, double psi, double a, double b, double cc, double t0, double t1) {
  if (!(a > 0.0)) return t0;
  const double disc = std::max(a * cc - b * b, 0.0);
  const double denom = psi * psi * a - c * c;
  double s;
  if (c == 0.0) {
    s = 0.0;
  } else if (denom > 0.0) {
    s = -std::copysign(std::abs(c) * std::sqrt(disc / denom), c);
  } else {
    // derivative never vanishes: monotone, the better endpoint is chosen below
    return c > 0.0 ? t0 : t1;
  }
  return std::clamp((s - b) / a, t0, t1);
}

}  // namespace

double local_update(Vec2 from_a, Vec2 from_b, double da, double db, const MetricSample& m) {
  const bool fa = std::isfinite(da);
  const bool fb = std::isfinite(db);
  if (!fa && !fb) return kInf;
  if (!fb) return da + eval_metric(m, from_a);
  if (!fa) return db + eval_metric(m, from_b);

  const Vec2 dv = from_b - from_a;
  const double c = db - da;
  auto value = [&](double t) { return da + t * c + eval_metric(m, from_a + t * dv); };

  double best = std::min(value(0.0), value(1.0));

  const Vec2 mdv = m.tensor.apply(dv);
  const double a0 = dot(dv, mdv);
  const double b0 = dot(from_a, mdv);
  const double c0 = m.tensor.quadratic(from_a);
  const double p = dot(from_a, m.omega);
  const double r = dot(dv, m.omega);

  // <u(t), omega> = p + t r changes sign at most once on [0, 1]
  double cuts[3] = {0.0, 1.0, 1.0};
  int pieces = 1;
  if (r != 0.0) {
    const double tb = -p / r;
    if (tb > 0.0 && tb < 1.0) {
      cuts[1] = tb;
      pieces = 2;
    }
  }
  for (int k = 0; k < pieces; ++k) {
    const double t0 = cuts[k];
    const double t1 = cuts[k + 1];
    const double tm = 0.5 * (t0 + t1);
    const bool penalised = p + tm * r < 0.0;
    const double a = a0 + (penalised ? r * r : 0.0);
    const double b = b0 + (penalised ? p * r : 0.0);
    const double cc = c0 + (penalised ? p * p : 0.0);
    const double t = stationary_point(c, m.psi, a, b, cc, t0, t1);
    best = std::min({best, value(t), value(t0), value(t1)});
  }
  return best;
}

// ---------------------------------------------------------------------------

namespace {

enum class Tag : std::uint8_t { Far, Trial, Accepted };

struct QueueEntry {
  double value;
  std::uint64_t order;  // FIFO among equal keys
  std::uint32_t index;
  bool operator>(const QueueEntry& o) const { return value > o.value || (value == o.value && order > o.order); }
};

}  // namespace

FmmResult fmm_prescribed(const PointSet& sources, const MetricField& metric, const Mask& active,
                         const ScalarField& phi, const FmmOptions& options) {
  if (sources.empty()) throw std::invalid_argument("no sources");
  const int w = metric.width();
  const int h = metric.height();
  if (!active.same_shape(w, h) || !phi.same_shape(w, h) || !metric.domain.same_shape(w, h)) {
    throw std::invalid_argument("solver inputs differ in size");
  }
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i] && !metric.domain[i]) throw std::invalid_argument("metric undefined on part of the active region");

  double bound = 1.0;
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i]) bound = std::max(bound, anisotropy_ratio(metric.samples[i]));
  const Stencil stencil(options.stencil_radius ? *options.stencil_radius : stencil_radius_for(bound));

  FmmResult res;
  res.stencil_radius = stencil.radius();
  res.distance = ScalarField(w, h, kInf);
  ScalarField& d = res.distance;
  Grid<Tag> tag(w, h, Tag::Far);

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> queue;
  std::uint64_t order = 0;
  for (const Pixel& s : sources) {
    if (!active.contains(s) || !active(s)) throw std::invalid_argument("source outside the active region");
    if (tag(s) == Tag::Trial) continue;
    d(s) = 0.0;
    tag(s) = Tag::Trial;
    queue.push({0.0, order++, static_cast<std::uint32_t>(d.index(s.x, s.y))});
  }

  // Point sources are singular for the discrete scheme; seed their
  // immediate neighbourhood with the exact local distance.
  const int reach = static_cast<int>(std::floor(options.source_init_radius));
  if (reach > 0) {
    const double r2 = options.source_init_radius * options.source_init_radius;
    for (const Pixel& s : sources) {
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
          if (dx * dx + dy * dy > r2) continue;
          const int x = s.x + dx;
          const int y = s.y + dy;
          if (!d.contains(x, y)) continue;
          const std::size_t i = d.index(x, y);
          if (!active[i] || phi[i] < 0.0) continue;
          const double v = eval_metric(metric.samples[i], {static_cast<double>(dx), static_cast<double>(dy)});
          if (v < d[i]) {
            d[i] = v;
            tag[i] = Tag::Trial;
            queue.push({v, order++, static_cast<std::uint32_t>(i)});
          }
        }
      }
    }
  }

  const std::size_t k_count = stencil.size();
  double front = 0.0;
  while (!queue.empty()) {
    const QueueEntry top = queue.top();
    queue.pop();
    if (tag[top.index] == Tag::Accepted || top.value != d[top.index]) continue;
    if (top.value < front) throw std::logic_error("fast marching lost causality");
    front = top.value;
    tag[top.index] = Tag::Accepted;
    ++res.accepted;
    const Pixel xm = d.pixel(top.index);

    for (std::size_t k = 0; k < k_count; ++k) {
      const Offset o = stencil[k];
      // x_m = y + o, i.e. x_m lies in the stencil of y
      const int yx = xm.x - o.dx;
      const int yy = xm.y - o.dy;
      if (!d.contains(yx, yy)) continue;
      const std::size_t yi = d.index(yx, yy);
      if (!active[yi] || tag[yi] == Tag::Accepted) continue;
      if (phi[yi] < front) continue;

      const MetricSample& m = metric.samples[yi];
      // vectors from the simplex vertices to y
      const Vec2 from_m{static_cast<double>(-o.dx), static_cast<double>(-o.dy)};
      double cand = front + eval_metric(m, from_m);
      for (const Offset& other : {stencil.prev(k), stencil.next(k)}) {
        const int zx = yx + other.dx;
        const int zy = yy + other.dy;
        if (!d.contains(zx, zy)) continue;
        const std::size_t zi = d.index(zx, zy);
        if (tag[zi] != Tag::Accepted) continue;
        const Vec2 from_z{static_cast<double>(-other.dx), static_cast<double>(-other.dy)};
        cand = std::min(cand, local_update(from_m, from_z, front, d[zi], m));
      }
      if (cand < front) {
        cand = front;
        ++res.causality_clamps;
      }
      if (cand < d[yi]) {
        d[yi] = cand;
        tag[yi] = Tag::Trial;
        queue.push({cand, order++, static_cast<std::uint32_t>(yi)});
      }
    }
  }
  return res;
}


FmmResult geodesic_distance(const PointSet& sources, const MetricField& metric, const FmmOptions& options) {
  const ScalarField open(metric.width(), metric.height(), kInf);
  return fmm_prescribed(sources, metric, metric.domain, open, options);
}

VoronoiResult voronoi_from_fronts(const std::vector<PointSet>& offset_bands, const std::vector<MetricField>& metrics,
                                  const std::vector<Mask>& region_bands, const FmmOptions& options) {
  const std::size_t n = offset_bands.size();
  if (n < 2) throw std::invalid_argument("at least two regions are required");
  if (metrics.size() != n || region_bands.size() != n) throw std::invalid_argument("one metric and band per region");
  const int w = metrics.front().width();
  const int h = metrics.front().height();

  VoronoiResult out;
  out.phi = ScalarField(w, h, kInf);
  out.index = Grid<int>(w, h, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (offset_bands[i].empty()) throw std::invalid_argument("vanished region " + std::to_string(i + 1));
    Mask active = region_bands[i];
    for (const Pixel& p : offset_bands[i]) active(p) = 1;
    const ScalarField di = fmm_prescribed(offset_bands[i], metrics[i], active, out.phi, options).distance;
    for (std::size_t k = 0; k < di.size(); ++k) {
      if (!active[k]) continue;
      if (di[k] < out.phi[k]) {
        out.index[k] = static_cast<int>(i + 1);
        out.phi[k] = di[k];
      }
    }
  }
  return out;
}

}  // namespace geofront
