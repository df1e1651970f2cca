#include "geofront/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

namespace geofront {

std::size_t count(const Mask& mask) {
  return static_cast<std::size_t>(std::count_if(mask.values().begin(), mask.values().end(),
                                                [](std::uint8_t v) { return v != 0; }));
}

// ---------------------------------------------------------------------------

ImageGrid::ImageGrid(int width, int height, int channels, double fill)
    : ImageGrid(width, height, channels,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)) *
                                        static_cast<std::size_t>(std::max(channels, 0)),
                                    fill)) {}

ImageGrid::ImageGrid(int width, int height, int channels, std::vector<double> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  if (width < 3 || height < 3) throw std::invalid_argument("image must be at least 3x3");
  if (channels != 1 && channels != 3) throw std::invalid_argument("image must have 1 or 3 channels");
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                          static_cast<std::size_t>(channels)) {
    throw std::invalid_argument("image data size does not match its dimensions");
  }
  for (double v : data_) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("image intensities must lie in [0, 1]");
  }
}

ScalarField ImageGrid::channel(int c) const {
  ScalarField out(width_, height_);
  for (int y = 0; y < height_; ++y)
    for (int x = 0; x < width_; ++x) out(x, y) = at(x, y, c);
  return out;
}

// ---------------------------------------------------------------------------

LabelMap::LabelMap(Grid<int> labels, int regions) : labels_(std::move(labels)), regions_(regions) {
  if (regions_ < 1) throw std::invalid_argument("label map needs at least one region");
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(regions_) + 1, 0);
  for (int v : labels_.values()) {
    if (v < 1 || v > regions_) throw std::invalid_argument("label outside 1..n");
    seen[static_cast<std::size_t>(v)] = 1;
  }
  for (int r = 1; r <= regions_; ++r) {
    if (!seen[static_cast<std::size_t>(r)]) {
      throw std::invalid_argument("region " + std::to_string(r) + " has no pixels");
    }
  }
}

namespace {
int max_label(const Grid<int>& g) {
  int m = 0;
  for (int v : g.values()) m = std::max(m, v);
  return m;
}
}  // namespace

LabelMap::LabelMap(Grid<int> labels) : LabelMap(labels, max_label(labels)) {}

Mask LabelMap::region_mask(int region) const {
  Mask m(width(), height());
  for (std::size_t i = 0; i < labels_.size(); ++i) m[i] = labels_[i] == region ? 1 : 0;
  return m;
}

std::vector<std::size_t> LabelMap::areas() const {
  std::vector<std::size_t> a(static_cast<std::size_t>(regions_), 0);
  for (int v : labels_.values()) ++a[static_cast<std::size_t>(v - 1)];
  return a;
}

LabelMap compact_labels(const Grid<int>& labels) {
  const int top = max_label(labels);
  std::vector<int> remap(static_cast<std::size_t>(top) + 1, 0);
  for (int v : labels.values()) {
    if (v < 1) throw std::invalid_argument("label outside 1..n");
    remap[static_cast<std::size_t>(v)] = 1;
  }
  int next = 0;
  for (int v = 1; v <= top; ++v)
    if (remap[static_cast<std::size_t>(v)]) remap[static_cast<std::size_t>(v)] = ++next;
  Grid<int> out(labels.width(), labels.height());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[static_cast<std::size_t>(labels[i])];
  return LabelMap(std::move(out), next);
}

// ---------------------------------------------------------------------------
// Squared EDT: lower envelope of parabolas, one dimension at a time.

namespace {

// f holds squared distances (or +inf); result written back into f.
void edt_1d(std::span<double> f, std::vector<int>& v, std::vector<double>& z, std::vector<double>& out) {
  const int n = static_cast<int>(f.size());
  v.resize(static_cast<std::size_t>(n));
  z.resize(static_cast<std::size_t>(n) + 1);
  out.resize(static_cast<std::size_t>(n));

  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!std::isfinite(f[static_cast<std::size_t>(q)])) continue;
    const double fq = f[static_cast<std::size_t>(q)] + static_cast<double>(q) * q;
    while (k >= 0) {
      const int p = v[static_cast<std::size_t>(k)];
      const double fp = f[static_cast<std::size_t>(p)] + static_cast<double>(p) * p;
      const double s = (fq - fp) / (2.0 * (q - p));
      if (s <= z[static_cast<std::size_t>(k)]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    if (k == 0) {
      z[0] = -kInf;
    } else {
      const int p = v[static_cast<std::size_t>(k - 1)];
      const double fp = f[static_cast<std::size_t>(p)] + static_cast<double>(p) * p;
      z[static_cast<std::size_t>(k)] = (fq - fp) / (2.0 * (q - p));
    }
    z[static_cast<std::size_t>(k) + 1] = kInf;
  }
  if (k < 0) {
    std::fill(f.begin(), f.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[static_cast<std::size_t>(j) + 1] < q) ++j;
    const int p = v[static_cast<std::size_t>(j)];
    const double d = static_cast<double>(q - p);
    out[static_cast<std::size_t>(q)] = d * d + f[static_cast<std::size_t>(p)];
  }
  std::copy(out.begin(), out.end(), f.begin());
}

}  // namespace

ScalarField squared_distance_transform(const Mask& seeds) {
  const int w = seeds.width();
  const int h = seeds.height();
  ScalarField d(w, h, kInf);
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (seeds[i]) d[i] = 0.0;

  std::vector<int> v;
  std::vector<double> z, out, line(static_cast<std::size_t>(h));
  // columns
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) line[static_cast<std::size_t>(y)] = d(x, y);
    edt_1d(line, v, z, out);
    for (int y = 0; y < h; ++y) d(x, y) = line[static_cast<std::size_t>(y)];
  }
  // rows
  for (int y = 0; y < h; ++y) {
    std::span<double> row(&d(0, y), static_cast<std::size_t>(w));
    edt_1d(row, v, z, out);
  }
  return d;
}

ScalarField euclidean_distance_map(const Mask& seeds) {
  if (count(seeds) == 0) throw std::invalid_argument("no sources");
  ScalarField d = squared_distance_transform(seeds);
  for (double& v : d.values()) v = std::sqrt(v);
  return d;
}

ScalarField euclidean_distance_map(std::span<const Pixel> seeds, int width, int height) {
  Mask m(width, height);
  for (const Pixel& p : seeds) {
    if (!m.contains(p)) throw std::out_of_range("seed outside the grid");
    m(p) = 1;
  }
  return euclidean_distance_map(m);
}

ScalarField depth_map(const Mask& region) {
  const int w = region.width() + 2;
  const int h = region.height() + 2;
  Mask outside(w, h, 1);
  for (int y = 0; y < region.height(); ++y)
    for (int x = 0; x < region.width(); ++x) outside(x + 1, y + 1) = region(x, y) ? 0 : 1;
  const ScalarField padded = squared_distance_transform(outside);
  ScalarField out(region.width(), region.height());
  for (int y = 0; y < region.height(); ++y)
    for (int x = 0; x < region.width(); ++x) out(x, y) = std::sqrt(padded(x + 1, y + 1));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <typename Fn>
void for_each_interface_edge(const LabelMap& labels, Fn&& fn) {
  const int w = labels.width();
  const int h = labels.height();
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int a = labels(x, y);
      if (x + 1 < w && labels(x + 1, y) != a) fn(Pixel{x, y}, Pixel{x + 1, y});
      if (y + 1 < h && labels(x, y + 1) != a) fn(Pixel{x, y}, Pixel{x, y + 1});
    }
  }
}

}  // namespace

Mask contour_mask(const LabelMap& labels) {
  Mask m(labels.width(), labels.height());
  for_each_interface_edge(labels, [&](Pixel p, Pixel q) {
    m(p) = 1;
    m(q) = 1;
  });
  return m;
}

Mask region_boundary_mask(const LabelMap& labels, int region) {
  Mask m(labels.width(), labels.height());
  for_each_interface_edge(labels, [&](Pixel p, Pixel q) {
    if (labels(p) == region || labels(q) == region) {
      m(p) = 1;
      m(q) = 1;
    }
  });
  return m;
}

PointSet extract_offset_band(const LabelMap& labels, int region, double ell) {
  const Mask boundary = region_boundary_mask(labels, region);
  if (count(boundary) == 0) {
    if (count(labels.region_mask(region)) == 0) throw std::runtime_error("vanished region");
    throw std::runtime_error("region has no interface");
  }
  return extract_offset_band(labels, region, ell, euclidean_distance_map(boundary));
}

PointSet extract_offset_band(const LabelMap& labels, int region, double ell,
                             const ScalarField& distance_to_boundary) {
  if (!(ell > 0.0)) throw std::invalid_argument("offset distance must be positive");
  constexpr double tol = 1e-9;
  PointSet band;
  double deepest = -1.0;
  bool any = false;
  for (int y = 0; y < labels.height(); ++y) {
    for (int x = 0; x < labels.width(); ++x) {
      if (labels(x, y) != region) continue;
      any = true;
      const double d = distance_to_boundary(x, y);
      deepest = std::max(deepest, d);
      if (d >= ell - 1.0 - tol && d <= ell + tol) band.push_back({x, y});
    }
  }
  if (!any) throw std::runtime_error("vanished region");
  if (!band.empty()) return band;
  for (int y = 0; y < labels.height(); ++y)
    for (int x = 0; x < labels.width(); ++x)
      if (labels(x, y) == region && distance_to_boundary(x, y) >= deepest - tol) band.push_back({x, y});
  return band;
}

Narrowband build_narrowband(const LabelMap& labels, double ell) {
  if (!(ell > 0.0)) throw std::invalid_argument("band half-width must be positive");
  const int w = labels.width();
  const int h = labels.height();
  Narrowband nb;
  nb.contour_band = Mask(w, h);
  nb.region_band.assign(static_cast<std::size_t>(labels.regions()), Mask(w, h));
  const double ell2 = ell * ell;

  const Mask contour = contour_mask(labels);
  if (count(contour) == 0) return nb;
  const ScalarField dg = squared_distance_transform(contour);
  for (std::size_t i = 0; i < dg.size(); ++i) nb.contour_band[i] = dg[i] < ell2 ? 1 : 0;

  for (int r = 1; r <= labels.regions(); ++r) {
    const ScalarField di = squared_distance_transform(region_boundary_mask(labels, r));
    Mask& band = nb.region_band[static_cast<std::size_t>(r - 1)];
    for (std::size_t i = 0; i < di.size(); ++i) band[i] = (nb.contour_band[i] && di[i] < ell2) ? 1 : 0;
  }
  return nb;
}

// ---------------------------------------------------------------------------

InterfaceVoronoi::InterfaceVoronoi(const LabelMap& labels) {
  if (labels.regions() < 2) throw std::invalid_argument("interface Voronoi needs at least two regions");
  const int w = labels.width();
  const int h = labels.height();
  std::vector<Mask> masks;
  auto pair_slot = [&](InterfacePair key) {
    auto it = std::lower_bound(pairs_.begin(), pairs_.end(), key);
    const auto pos = static_cast<std::size_t>(it - pairs_.begin());
    if (it == pairs_.end() || *it != key) {
      pairs_.insert(it, key);
      masks.insert(masks.begin() + static_cast<std::ptrdiff_t>(pos), Mask(w, h));
    }
    return pos;
  };
  for_each_interface_edge(labels, [&](Pixel p, Pixel q) {
    const int a = labels(p);
    const int b = labels(q);
    Mask& m = masks[pair_slot({std::min(a, b), std::max(a, b)})];
    m(p) = 1;
    m(q) = 1;
  });

  sq_dist_.reserve(pairs_.size());
  for (const Mask& m : masks) sq_dist_.push_back(squared_distance_transform(m));

  nearest_ = Grid<int>(w, h, -1);
  for (std::size_t i = 0; i < nearest_.size(); ++i) {
    double best = kInf;
    int arg = -1;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      if (sq_dist_[k][i] < best) {
        best = sq_dist_[k][i];
        arg = static_cast<int>(k);
      }
    }
    nearest_[i] = arg;
  }
}

Grid<int> InterfaceVoronoi::partner_map(int region) const {
  Grid<int> out(nearest_.width(), nearest_.height(), 0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    double best = kInf;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const InterfacePair& pr = pairs_[k];
      if (pr.first != region && pr.second != region) continue;
      if (sq_dist_[k][i] < best) {
        best = sq_dist_[k][i];
        out[i] = pr.first == region ? pr.second : pr.first;
      }
    }
  }
  return out;
}

InterfaceVoronoi interface_voronoi(const LabelMap& labels) { return InterfaceVoronoi(labels); }


ContourGeometry::ContourGeometry(const LabelMap& labels, double ell) : interfaces(labels) {
  if (!(ell > 0.0)) throw std::invalid_argument("band half-width must be positive");
  const int w = labels.width();
  const int h = labels.height();
  const double ell2 = ell * ell;
  contour = contour_mask(labels);
  contour_distance = euclidean_distance_map(contour);
  band.contour_band = Mask(w, h);
  for (std::size_t i = 0; i < contour_distance.size(); ++i)
    band.contour_band[i] = contour_distance[i] * contour_distance[i] < ell2 ? 1 : 0;

  const int n = labels.regions();
  boundary_distance.reserve(static_cast<std::size_t>(n));
  band.region_band.reserve(static_cast<std::size_t>(n));
  partner.reserve(static_cast<std::size_t>(n));
  for (int r = 1; r <= n; ++r) {
    ScalarField d = squared_distance_transform(region_boundary_mask(labels, r));
    Mask ui(w, h);
    for (std::size_t i = 0; i < d.size(); ++i) {
      ui[i] = (band.contour_band[i] && d[i] < ell2) ? 1 : 0;
      d[i] = std::sqrt(d[i]);
    }
    boundary_distance.push_back(std::move(d));
    band.region_band.push_back(std::move(ui));
    partner.push_back(interfaces.partner_map(r));
  }
}

// ---------------------------------------------------------------------------

PointSet farthest_point_sampling(const Mask& region, int count_wanted, std::optional<Pixel> first) {
  if (count_wanted < 1) throw std::invalid_argument("sample count must be positive");
  const std::size_t available = count(region);
  if (static_cast<std::size_t>(count_wanted) > available) {
    throw std::invalid_argument("sample count exceeds region size");
  }

  auto better = [](double d, Pixel p, double best, Pixel bp) { return d > best || (d == best && p < bp); };

  Pixel start{};
  if (first) {
    if (!region.contains(*first) || !region(*first)) throw std::invalid_argument("first point outside region");
    start = *first;
  } else {
    const ScalarField depth = depth_map(region);
    double best = -1.0;
    for (int y = 0; y < region.height(); ++y)
      for (int x = 0; x < region.width(); ++x)
        if (region(x, y) && better(depth(x, y), {x, y}, best, start)) {
          best = depth(x, y);
          start = {x, y};
        }
  }

  PointSet out{start};
  // squared distances are integers, so comparisons and ties are exact
  Grid<std::int64_t> nearest(region.width(), region.height(), std::numeric_limits<std::int64_t>::max());
  auto absorb = [&](Pixel s) {
    for (int y = 0; y < region.height(); ++y)
      for (int x = 0; x < region.width(); ++x) {
        if (!region(x, y)) continue;
        const std::int64_t dx = x - s.x;
        const std::int64_t dy = y - s.y;
        nearest(x, y) = std::min(nearest(x, y), dx * dx + dy * dy);
      }
  };
  absorb(start);
  while (static_cast<int>(out.size()) < count_wanted) {
    std::int64_t best = -1;
    Pixel arg{};
    for (int y = 0; y < region.height(); ++y)
      for (int x = 0; x < region.width(); ++x) {
        if (!region(x, y)) continue;
        const std::int64_t d = nearest(x, y);
        if (d > best || (d == best && Pixel{x, y} < arg)) {
          best = d;
          arg = {x, y};
        }
      }
    out.push_back(arg);
    absorb(arg);
  }
  return out;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("standard deviation must be non-negative");
  if (sigma == 0.0) return {1.0};
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(static_cast<std::size_t>(2 * radius + 1));
  for (int i = -radius; i <= radius; ++i)
    k[static_cast<std::size_t>(i + radius)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
  const double s = std::accumulate(k.begin(), k.end(), 0.0);
  for (double& v : k) v /= s;
  return k;
}

ScalarField gaussian_convolve(const ScalarField& field, double sigma) {
  const std::vector<double> k = gaussian_kernel(sigma);
  if (k.size() == 1) return field;
  const int r = static_cast<int>(k.size() / 2);
  const int w = field.width();
  const int h = field.height();
  ScalarField tmp(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) acc += k[static_cast<std::size_t>(t + r)] * field(std::clamp(x + t, 0, w - 1), y);
      tmp(x, y) = acc;
    }
  ScalarField out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) acc += k[static_cast<std::size_t>(t + r)] * tmp(x, std::clamp(y + t, 0, h - 1));
      out(x, y) = acc;
    }
  return out;
}

}  // namespace geofront
