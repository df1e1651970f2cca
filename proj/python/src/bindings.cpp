#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geofront/config.hpp"
#include "geofront/dualfront.hpp"
#include "geofront/eikonal.hpp"
#include "geofront/eval.hpp"
#include "geofront/grid.hpp"
#include "geofront/metric.hpp"

namespace py = pybind11;
using namespace geofront;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ByteArray = py::array_t<std::uint8_t, py::array::c_style | py::array::forcecast>;

Mask to_mask(const py::array& a) {
  const ByteArray arr = py::array::ensure(a.attr("astype")("uint8"));
  if (arr.ndim() != 2) throw std::invalid_argument("mask must be a 2-D array");
  Mask m(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
  const auto* p = arr.data();
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = p[i] ? 1 : 0;
  return m;
}

ImageGrid to_image(const DoubleArray& arr) {
  if (arr.ndim() != 2 && arr.ndim() != 3) throw std::invalid_argument("image must be HxW or HxWxC");
  const int h = static_cast<int>(arr.shape(0));
  const int w = static_cast<int>(arr.shape(1));
  const int c = arr.ndim() == 3 ? static_cast<int>(arr.shape(2)) : 1;
  return ImageGrid(w, h, c, std::vector<double>(arr.data(), arr.data() + arr.size()));
}

template <typename T, typename Out = T>
py::array_t<Out> from_grid(const Grid<T>& g) {
  py::array_t<Out> out({g.height(), g.width()});
  auto* p = out.mutable_data();
  for (std::size_t i = 0; i < g.size(); ++i) p[i] = static_cast<Out>(g[i]);
  return out;
}

DoubleArray from_image(const ImageGrid& img) {
  DoubleArray out(img.channels() == 1 ? std::vector<py::ssize_t>{img.height(), img.width()}
                                      : std::vector<py::ssize_t>{img.height(), img.width(), img.channels()});
  std::copy(img.values().begin(), img.values().end(), out.mutable_data());
  return out;
}

PointSet to_points(const std::vector<std::pair<int, int>>& pts) {
  PointSet out;
  for (const auto& [x, y] : pts) out.push_back({x, y});
  return out;
}

std::string config_value(const py::handle& v) {
  if (py::isinstance<py::bool_>(v)) return v.cast<bool>() ? "true" : "false";
  return py::str(v).cast<std::string>();
}

}  // namespace

PYBIND11_MODULE(_geofront, m) {
  m.doc() = "Asymmetric geodesic dual-front segmentation";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "euclidean_distance_map", [](const py::array& seeds) { return from_grid(euclidean_distance_map(to_mask(seeds))); },
      py::arg("seeds"), "Exact Euclidean distance to the nearest nonzero pixel.");

  m.def(
      "eval_metric",
      [](const DoubleArray& tensor, std::pair<double, double> omega, double psi, std::pair<double, double> u) {
        if (tensor.ndim() != 2 || tensor.shape(0) != 2 || tensor.shape(1) != 2)
          throw std::invalid_argument("tensor must be 2x2");
        const double* t = tensor.data();
        if (t[1] != t[2]) throw std::invalid_argument("tensor must be symmetric");
        const MetricSample s{{t[0], t[1], t[3]}, {omega.first, omega.second}, psi};
        if (!s.tensor.is_spd()) throw std::invalid_argument("tensor must be positive definite");
        return eval_metric(s, {u.first, u.second});
      },
      py::arg("tensor"), py::arg("omega"), py::arg("psi"), py::arg("u"),
      "psi * sqrt(u'Mu + max(-<u, omega>, 0)^2).");

  m.def(
      "geodesic_distance",
      [](const std::vector<std::pair<int, int>>& sources, int width, int height, std::optional<DoubleArray> image,
         std::optional<int> stencil_radius) {
        MetricField metric = MetricField::uniform(width, height, MetricSample{});
        if (image) {
          const ImageGrid img = to_image(*image);
          if (img.width() != width || img.height() != height) throw std::invalid_argument("image size differs from the grid");
          metric = thresholding_metric(img, ThresholdMetricParams{}).metric;
        }
        FmmOptions o;
        o.stencil_radius = stencil_radius;
        return from_grid(geodesic_distance(to_points(sources), metric, o).distance);
      },
      py::arg("sources"), py::arg("width"), py::arg("height"), py::arg("image") = py::none(),
      py::arg("stencil_radius") = py::none(),
      "Fast-marching distance from (x, y) sources; unit metric, or the edge-thresholding metric of `image`.");

  m.def(
      "make_synthetic",
      [](const std::string& shape, int width, int height, double noise, std::uint64_t seed) {
        const SyntheticImage s = make_synthetic(shape, width, height, noise, seed);
        return py::make_tuple(from_image(s.image), from_grid<std::uint8_t, bool>(s.ground_truth));
      },
      py::arg("shape"), py::arg("width"), py::arg("height"), py::arg("noise") = 0.1, py::arg("seed") = 0,
      "Two-tone test image and its ground-truth mask.");

  m.def(
      "segment",
      [](const DoubleArray& image, const std::vector<std::tuple<int, int, double>>& circles, const py::dict& config,
         std::optional<py::array> gt) {
        const ImageGrid img = to_image(image);
        DualFrontConfig cfg;
        for (const auto& [k, v] : config) apply_config_entry(cfg, py::str(k).cast<std::string>(), config_value(v));
        cfg.validate();
        std::vector<Shape> shapes;
        for (const auto& [x, y, r] : circles) shapes.push_back(Shape::circle(x, y, r));
        if (shapes.empty())
          shapes.push_back(Shape::circle(img.width() / 2, img.height() / 2, std::min(img.width(), img.height()) / 4.0));
        std::optional<Mask> truth;
        if (gt) truth = to_mask(*gt);
        RunResult r;
        {
          py::gil_scoped_release release;
          r = run(init_labels(shapes, img.width(), img.height()), img, cfg, truth ? &*truth : nullptr);
        }
        py::dict out;
        out["labels"] = from_grid(r.labels.grid());
        out["iterations"] = r.trace.steps.size();
        out["regions"] = r.labels.regions();
        if (truth) out["jaccard"] = jaccard(foreground_mask(r.labels), *truth);
        return out;
      },
      py::arg("image"), py::arg("circles") = std::vector<std::tuple<int, int, double>>{}, py::arg("config") = py::dict(),
      py::arg("gt") = py::none(),
      "Dual-front evolution from circular seeds (x, y, r); returns labels, iterations, regions and optional jaccard.");

  m.def(
      "jaccard", [](const py::array& seg, const py::array& gt) { return jaccard(to_mask(seg), to_mask(gt)); },
      py::arg("seg"), py::arg("gt"), "Intersection over union; two empty masks score 1.");

  m.def(
      "farthest_point_sampling",
      [](const py::array& region, int count, std::optional<std::pair<int, int>> first) {
        std::optional<Pixel> f;
        if (first) f = Pixel{first->first, first->second};
        std::vector<std::pair<int, int>> out;
        for (const Pixel& p : farthest_point_sampling(to_mask(region), count, f)) out.emplace_back(p.x, p.y);
        return out;
      },
      py::arg("region"), py::arg("count"), py::arg("first") = py::none(),
      "Greedy farthest-point samples (x, y) inside a mask.");
}
