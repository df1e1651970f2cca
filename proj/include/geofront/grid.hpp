#pragma once

// Raster primitives shared by every stage of the dual-front pipeline:
// images, label maps, scalar fields and the exact Euclidean distance
// machinery built on top of them. Pixel coordinates are (x, y) with x the
// column and y the row; storage is row-major.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace geofront {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Pixel {
  int x = 0;
  int y = 0;
  auto operator<=>(const Pixel&) const = default;
};

using PointSet = std::vector<Pixel>;

template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
    if (width < 0 || height < 0) throw std::invalid_argument("negative grid dimensions");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
  bool contains(Pixel p) const { return contains(p.x, p.y); }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }
  Pixel pixel(std::size_t i) const {
    return {static_cast<int>(i % static_cast<std::size_t>(width_)),
            static_cast<int>(i / static_cast<std::size_t>(width_))};
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator()(Pixel p) { return data_[index(p.x, p.y)]; }
  const T& operator()(Pixel p) const { return data_[index(p.x, p.y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  void fill(const T& v) { std::fill(data_.begin(), data_.end(), v); }
  bool same_shape(int w, int h) const { return w == width_ && h == height_; }
  template <typename U>
  bool same_shape(const Grid<U>& o) const { return o.width() == width_ && o.height() == height_; }

  bool operator==(const Grid&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using ScalarField = Grid<double>;
using Mask = Grid<std::uint8_t>;

std::size_t count(const Mask& mask);

/// W x H raster of M in {1, 3} channels, intensities in [0, 1].
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int width, int height, int channels, double fill = 0.0);
  ImageGrid(int width, int height, int channels, std::vector<double> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }

  double& at(int x, int y, int c) { return data_[offset(x, y, c)]; }
  double at(int x, int y, int c) const { return data_[offset(x, y, c)]; }
  std::span<const double> values() const { return data_; }

  ScalarField channel(int c) const;

  bool operator==(const ImageGrid&) const = default;

 private:
  std::size_t offset(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) *
               static_cast<std::size_t>(channels_) +
           static_cast<std::size_t>(c);
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<double> data_;
};

/// Total assignment of pixels to regions 1..n. The contour is implicit: the
/// set of 4-adjacent pixel pairs carrying different labels.
class LabelMap {
 public:
  LabelMap() = default;
  /// Validates that labels lie in 1..n and every region occurs.
  LabelMap(Grid<int> labels, int regions);
  /// Infers n as the maximal label; same validation.
  explicit LabelMap(Grid<int> labels);

  int width() const { return labels_.width(); }
  int height() const { return labels_.height(); }
  int regions() const { return regions_; }
  int operator()(int x, int y) const { return labels_(x, y); }
  int operator()(Pixel p) const { return labels_(p); }
  int operator[](std::size_t i) const { return labels_[i]; }
  const Grid<int>& grid() const { return labels_; }

  Mask region_mask(int region) const;
  std::vector<std::size_t> areas() const;  // index 0 is region 1

  bool operator==(const LabelMap&) const = default;

 private:
  Grid<int> labels_;
  int regions_ = 0;
};

/// Drops labels that no longer occur and renumbers the rest to 1..n'
/// preserving their relative order.
LabelMap compact_labels(const Grid<int>& labels);

// ---------------------------------------------------------------------------
// Euclidean distance transforms (exact, Felzenszwalb-Huttenlocher).

/// Squared distance to the nearest seed; +inf everywhere if there are none.
ScalarField squared_distance_transform(const Mask& seeds);

/// Exact Euclidean distance to the nearest seed. Throws on an empty seed set.
ScalarField euclidean_distance_map(const Mask& seeds);
ScalarField euclidean_distance_map(std::span<const Pixel> seeds, int width, int height);

/// Distance from every pixel of `region` to the nearest pixel outside it,
/// where the grid is treated as surrounded by non-region pixels.
ScalarField depth_map(const Mask& region);

// ---------------------------------------------------------------------------
// Contour geometry on label maps.

/// Pixels having a 4-neighbour with a different label (both sides of Gamma).
Mask contour_mask(const LabelMap& labels);
/// Pixels of Gamma_i: members of a 4-adjacent pair with differing labels one
/// of which is `region`.
Mask region_boundary_mask(const LabelMap& labels, int region);

/// Offset band C_i^l: pixels of region i whose distance to Gamma_i lies in
/// [l - 1, l]. Falls back to the region's deepest pixels when that band is
/// empty. Throws "vanished region" for an empty region.
PointSet extract_offset_band(const LabelMap& labels, int region, double ell);
PointSet extract_offset_band(const LabelMap& labels, int region, double ell,
                             const ScalarField& distance_to_boundary);

struct Narrowband {
  Mask contour_band;              // U_Gamma
  std::vector<Mask> region_band;  // U_i, index 0 is region 1
};

Narrowband build_narrowband(const LabelMap& labels, double ell);

struct InterfacePair {
  int first = 0;   // first < second
  int second = 0;
  auto operator<=>(const InterfacePair&) const = default;
};

/// Per-pixel nearest interface Gamma_{i,j}, ties to the lexicographically
/// smallest pair.
class InterfaceVoronoi {
 public:
  InterfaceVoronoi() = default;
  explicit InterfaceVoronoi(const LabelMap& labels);

  const std::vector<InterfacePair>& pairs() const { return pairs_; }
  InterfacePair at(int x, int y) const { return pairs_[static_cast<std::size_t>(nearest_(x, y))]; }
  const Grid<int>& nearest_index() const { return nearest_; }
  const ScalarField& squared_distance(std::size_t pair_index) const { return sq_dist_[pair_index]; }

  /// For every pixel, the region j whose interface Gamma_{region,j} is
  /// nearest (0 where the region has no interface).
  Grid<int> partner_map(int region) const;

 private:
  std::vector<InterfacePair> pairs_;
  std::vector<ScalarField> sq_dist_;
  Grid<int> nearest_;
};

InterfaceVoronoi interface_voronoi(const LabelMap& labels);

/// Everything about the current partition that the metric construction and
/// the velocity extension need. Computed once per evolution step.
struct ContourGeometry {
  Mask contour;                       // pixels of Gamma
  ScalarField contour_distance;       // E_Gamma
  std::vector<ScalarField> boundary_distance;  // E(., Gamma_i)
  Narrowband band;
  InterfaceVoronoi interfaces;
  std::vector<Grid<int>> partner;     // nearest j for Gamma_{i,j}

  ContourGeometry(const LabelMap& labels, double ell);
};


// ---------------------------------------------------------------------------

/// Greedy farthest point sampling inside `region`. The first point is
/// `first` when given, otherwise the deepest pixel of the region. Ties go to
/// the lexicographically smallest (x, y).
PointSet farthest_point_sampling(const Mask& region, int count, std::optional<Pixel> first = std::nullopt);

/// Normalised discrete Gaussian taps on [-ceil(3 sigma), ceil(3 sigma)].
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian smoothing with edge replication; sigma == 0 is identity.
ScalarField gaussian_convolve(const ScalarField& field, double sigma);

}  // namespace geofront
