// geofront: segment | distance | benchmark

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "geofront/config.hpp"
#include "geofront/dualfront.hpp"
#include "geofront/eikonal.hpp"
#include "geofront/eval.hpp"
#include "geofront/io.hpp"

namespace fs = std::filesystem;
using namespace geofront;

namespace {

// Bad flags or flag combinations, reported with exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> split_numbers(const std::string& text, std::size_t expected, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw UsageError("bad " + what + ": " + text);
    }
  }
  if (out.size() != expected) throw UsageError("bad " + what + ": " + text);
  return out;
}

std::pair<int, int> parse_size(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw UsageError("bad size (expected WxH): " + text);
  try {
    return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw UsageError("bad size (expected WxH): " + text);
  }
}

std::string out_path(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void prepare_config(DualFrontConfig& cfg, const std::string& config_file, const std::vector<std::string>& sets) {
  if (!config_file.empty()) apply_config_file(cfg, config_file);
  for (const auto& s : sets) apply_config_assignment(cfg, s);
}

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

// ---------------------------------------------------------------------------

struct SegmentArgs {
  std::string image, out, gt, init_labels, config, model;
  std::vector<std::string> circles, rects, sets;
  std::optional<int> max_iters;
  std::optional<std::uint64_t> seed;
  bool timing = false;
  bool dump_fields = false;
};

int cmd_segment(const SegmentArgs& a) {
  DualFrontConfig cfg;
  prepare_config(cfg, a.config, a.sets);
  if (!a.model.empty()) apply_config_entry(cfg, "model", a.model);
  if (a.max_iters) cfg.max_iters = *a.max_iters;
  if (a.seed) cfg.seed = *a.seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const ImageGrid image = read_image(a.image);
  std::optional<Mask> gt;
  if (!a.gt.empty()) gt = read_mask(a.gt);

  LabelMap init;
  if (!a.init_labels.empty()) {
    if (!a.circles.empty() || !a.rects.empty()) throw UsageError("--init-labels excludes --init-circle/--init-rect");
    init = read_label_map(a.init_labels);
  } else {
    std::vector<Shape> shapes;
    for (const auto& c : a.circles) {
      const auto v = split_numbers(c, 3, "circle (expected x,y,r)");
      shapes.push_back(Shape::circle(static_cast<int>(v[0]), static_cast<int>(v[1]), v[2]));
    }
    for (const auto& r : a.rects) {
      const auto v = split_numbers(r, 4, "rectangle (expected x0,y0,x1,y1)");
      shapes.push_back(Shape::rectangle(static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]),
                                        static_cast<int>(v[3])));
    }
    if (shapes.empty()) {
      const int r = std::max(1, std::min(image.width(), image.height()) / 4);
      shapes.push_back(Shape::circle(image.width() / 2, image.height() / 2, r));
    }
    init = init_labels(shapes, image.width(), image.height());
  }

  fs::create_directories(a.out);
  const RunResult res = run(init, image, cfg, gt ? &*gt : nullptr, a.timing);

  write_label_map(out_path(a.out, "labels.png"), res.labels);
  write_raw_image(out_path(a.out, "overlay.png"), contour_overlay(image, res.labels));

  std::ostringstream csv;
  csv << "iteration,changed,band_pixels,regions,areas,jaccard,seconds\n";
  double total_seconds = 0.0;
  for (const auto& s : res.trace.steps) {
    csv << s.iteration << ',' << s.changed << ',' << s.band_pixels << ',' << s.regions << ',';
    for (std::size_t k = 0; k < s.areas.size(); ++k) csv << (k ? ";" : "") << s.areas[k];
    csv << ',' << (s.jaccard ? format_real(*s.jaccard) : std::string()) << ',' << format_real(s.seconds) << '\n';
    total_seconds += s.seconds;
  }
  write_text(out_path(a.out, "trace.csv"), csv.str());

  nlohmann::ordered_json j;
  j["iterations"] = res.trace.steps.size();
  j["seconds_per_step"] = res.trace.steps.empty() ? 0.0 : total_seconds / static_cast<double>(res.trace.steps.size());
  j["regions"] = res.labels.regions();
  if (gt) j["jaccard"] = jaccard(foreground_mask(res.labels), *gt);
  j["config"] = nlohmann::ordered_json::object();
  std::istringstream cfg_text(format_config(cfg));
  for (std::string line; std::getline(cfg_text, line);) {
    const auto eq = line.find('=');
    j["config"][line.substr(0, eq)] = line.substr(eq + 1);
  }
  write_text(out_path(a.out, "metrics.json"), j.dump(2) + "\n");

  if (a.dump_fields) {
    const DualFrontEngine engine(image, cfg);
    write_fgrid(out_path(a.out, "eta.fgrid"), engine.edges().eta);
    if (res.labels.regions() >= 2) {
      const StepFields f = engine.build_fields(res.labels);
      write_fgrid(out_path(a.out, "phi.fgrid"), f.voronoi.phi);
      ScalarField vor(f.voronoi.index.width(), f.voronoi.index.height());
      for (std::size_t k = 0; k < vor.size(); ++k) vor[k] = f.voronoi.index[k];
      write_fgrid(out_path(a.out, "voronoi.fgrid"), vor);
    }
  }
  std::cout << "iterations " << res.trace.steps.size() << ", regions " << res.labels.regions();
  if (gt) std::cout << ", jaccard " << format_real(jaccard(foreground_mask(res.labels), *gt));
  std::cout << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct DistanceArgs {
  std::string image, size, metric = "auto", source_mask, phi, gt, out;
  std::vector<std::string> sources;
  bool phi_zero = false;
  bool tstar = false;
  std::optional<int> stencil_radius;
  double source_init_radius = FmmOptions{}.source_init_radius;
};

int cmd_distance(const DistanceArgs& a) {
  if (a.tstar && a.gt.empty()) throw UsageError("--tstar requires --gt");
  if (a.phi_zero && !a.phi.empty()) throw UsageError("--phi-zero and --phi are exclusive");
  if (a.sources.empty() && a.source_mask.empty()) throw UsageError("give --source or --source-mask");
  if (!a.image.empty() && !a.size.empty()) throw UsageError("--image and --size are exclusive");
  std::string metric_kind = a.metric;
  if (metric_kind == "auto") metric_kind = a.image.empty() ? "unit" : "threshold";
  if (metric_kind != "unit" && metric_kind != "threshold") throw UsageError("unknown metric: " + metric_kind);
  if (metric_kind == "threshold" && a.image.empty()) throw UsageError("--metric threshold requires --image");
  if (a.image.empty() && a.size.empty()) throw UsageError("give --image or --size");
  if (a.stencil_radius && (*a.stencil_radius < 1 || *a.stencil_radius > 3)) throw UsageError("stencil radius must be 1, 2 or 3");

  std::optional<ImageGrid> image;
  int w = 0, h = 0;
  if (!a.image.empty()) {
    image = read_image(a.image);
    w = image->width();
    h = image->height();
  } else {
    std::tie(w, h) = parse_size(a.size);
    if (w < 1 || h < 1) throw UsageError("bad size: " + a.size);
  }

  PointSet sources;
  for (const auto& s : a.sources) {
    const auto v = split_numbers(s, 2, "source (expected x,y)");
    sources.push_back({static_cast<int>(v[0]), static_cast<int>(v[1])});
  }
  if (!a.source_mask.empty()) {
    const Mask m = read_mask(a.source_mask);
    if (!m.same_shape(w, h)) throw std::runtime_error("source mask size differs from the grid");
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i]) sources.push_back(m.pixel(i));
  }
  for (const Pixel& p : sources)
    if (p.x < 0 || p.y < 0 || p.x >= w || p.y >= h) throw UsageError("source outside the grid");

  const MetricField metric = metric_kind == "unit" ? MetricField::uniform(w, h, MetricSample{})
                                                    : thresholding_metric(*image, ThresholdMetricParams{}).metric;
  ScalarField phi(w, h, kInf);
  if (a.phi_zero) phi.fill(0.0);
  if (!a.phi.empty()) {
    phi = read_fgrid(a.phi);
    if (!phi.same_shape(w, h)) throw std::runtime_error("prescribed map size differs from the grid");
  }
  FmmOptions opts;
  opts.stencil_radius = a.stencil_radius;
  opts.source_init_radius = a.source_init_radius;

  fs::create_directories(a.out);
  const FmmResult res = fmm_prescribed(sources, metric, metric.domain, phi, opts);
  write_fgrid(out_path(a.out, "distance.fgrid"), res.distance);

  nlohmann::ordered_json j;
  j["width"] = w;
  j["height"] = h;
  j["metric"] = metric_kind;
  j["stencil_radius"] = res.stencil_radius;
  j["accepted"] = res.accepted;
  if (!a.gt.empty()) {
    const Mask gt = read_mask(a.gt);
    if (!gt.same_shape(w, h)) throw std::runtime_error("ground truth size differs from the grid");
    if (a.tstar) {
      const ThresholdSelection sel = select_t_star(res.distance, gt);
      write_mask(out_path(a.out, "tstar_mask.png"), sel.mask);
      j["t_star"] = sel.t_star;
      j["t1"] = sel.t1;
      j["t2"] = sel.t2;
      j["jaccard"] = sel.jaccard;
    }
  }
  write_text(out_path(a.out, "distance.json"), j.dump(2) + "\n");
  std::cout << "accepted " << res.accepted << " pixels, stencil radius " << res.stencil_radius << '\n';
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchmarkArgs {
  std::string image, gt, synthetic, size = "64x64", methods = "asym,sym,thresh", mode = "fps", config, out, name;
  std::vector<std::string> sets;
  double noise = 0.1;
  std::uint64_t synth_seed = 0;
  int runs = 20;
  double init_radius = 10.0;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  const bool from_files = !a.image.empty() || !a.gt.empty();
  if (from_files == !a.synthetic.empty()) throw UsageError("give either --image with --gt, or --synthetic");
  if (from_files && (a.image.empty() || a.gt.empty())) throw UsageError("--image and --gt go together");
  if (a.runs < 1) throw UsageError("--runs must be at least 1");

  BenchmarkOptions o;
  prepare_config(o.config, a.config, a.sets);
  if (a.seed) o.config.seed = *a.seed;
  try {
    o.config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  o.methods.clear();
  std::stringstream ms(a.methods);
  for (std::string m; std::getline(ms, m, ',');) {
    if (m != "asym" && m != "sym" && m != "thresh") throw UsageError("unknown method: " + m);
    o.methods.push_back(m);
  }
  if (o.methods.empty()) throw UsageError("no methods given");
  if (a.mode != "fps" && a.mode != "deepest") throw UsageError("unknown mode: " + a.mode);
  o.runs = a.runs;
  o.mode = a.mode;
  o.init_radius = a.init_radius;
  o.timing = a.timing;

  ImageGrid image;
  Mask gt;
  if (from_files) {
    image = read_image(a.image);
    gt = read_mask(a.gt);
    o.image_name = a.name.empty() ? fs::path(a.image).stem().string() : a.name;
  } else {
    const auto [w, h] = parse_size(a.size);
    const SyntheticImage syn = make_synthetic(a.synthetic, w, h, a.noise, a.synth_seed);
    image = syn.image;
    gt = syn.ground_truth;
    o.image_name = a.name.empty() ? a.synthetic : a.name;
  }

  fs::create_directories(a.out);
  const BenchmarkReport report = benchmark(image, gt, o);
  write_text(out_path(a.out, "report.csv"), report.to_csv());
  write_text(out_path(a.out, "report.json"), report.to_json());
  for (const auto& s : report.summary) {
    std::cout << s.image << ' ' << s.method << ": ave " << format_real(s.ave) << " max " << format_real(s.max)
              << " min " << format_real(s.min) << " std " << format_real(s.std) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual-front image segmentation with asymmetric quadratic metrics"};
  app.require_subcommand(1);

  SegmentArgs seg;
  auto* s = app.add_subcommand("segment", "Evolve an initial partition to a segmentation");
  s->add_option("--image", seg.image, "Input image (PNG, PGM or PPM)")->required();
  s->add_option("--out", seg.out, "Output directory")->required();
  s->add_option("--init-circle", seg.circles, "Initial circle x,y,r (repeatable)");
  s->add_option("--init-rect", seg.rects, "Initial rectangle x0,y0,x1,y1 (repeatable)");
  s->add_option("--init-labels", seg.init_labels, "Initial label-map image");
  s->add_option("--gt", seg.gt, "Ground-truth mask for Jaccard tracking");
  s->add_option("--config", seg.config, "key=value configuration file");
  s->add_option("--set", seg.sets, "Configuration override key=value (repeatable)");
  s->add_option("--model", seg.model, "Velocity model: pc, gmm, gmm:K or bhat");
  s->add_option("--max-iters", seg.max_iters, "Maximum number of evolution steps");
  s->add_option("--seed", seg.seed, "Seed for stochastic components");
  s->add_flag("--timing", seg.timing, "Record wall time per step (outputs are then not reproducible)");
  s->add_flag("--dump-fields", seg.dump_fields, "Write eta, phi and Voronoi index grids");

  DistanceArgs dist;
  auto* d = app.add_subcommand("distance", "Geodesic distance from source points");
  d->add_option("--out", dist.out, "Output directory")->required();
  d->add_option("--image", dist.image, "Input image (sets the grid and enables the threshold metric)");
  d->add_option("--size", dist.size, "Grid size WxH when no image is given");
  d->add_option("--metric", dist.metric, "unit, threshold or auto");
  d->add_option("--source", dist.sources, "Source pixel x,y (repeatable)");
  d->add_option("--source-mask", dist.source_mask, "Mask image of source pixels");
  d->add_flag("--phi-zero", dist.phi_zero, "Prescribed distance map identically 0");
  d->add_option("--phi", dist.phi, "Prescribed distance map (FGRID)");
  d->add_option("--gt", dist.gt, "Ground-truth mask");
  d->add_flag("--tstar", dist.tstar, "Select the best threshold against --gt");
  d->add_option("--stencil-radius", dist.stencil_radius, "Force the stencil radius (1, 2 or 3)");
  d->add_option("--source-init-radius", dist.source_init_radius, "Radius of exact seeding around sources");

  BenchmarkArgs bench;
  auto* b = app.add_subcommand("benchmark", "Multi-run Jaccard benchmark");
  b->add_option("--out", bench.out, "Output directory")->required();
  b->add_option("--image", bench.image, "Input image");
  b->add_option("--gt", bench.gt, "Ground-truth mask");
  b->add_option("--synthetic", bench.synthetic, "Synthetic shape: disk, blob or lobes");
  b->add_option("--size", bench.size, "Synthetic size WxH");
  b->add_option("--noise", bench.noise, "Synthetic noise standard deviation");
  b->add_option("--synth-seed", bench.synth_seed, "Synthetic noise seed");
  b->add_option("--methods", bench.methods, "Comma-separated subset of asym,sym,thresh");
  b->add_option("--runs", bench.runs, "Number of seeded runs");
  b->add_option("--mode", bench.mode, "Seed placement: fps or deepest");
  b->add_option("--init-radius", bench.init_radius, "Initial circle radius and erosion margin");
  b->add_option("--config", bench.config, "key=value configuration file");
  b->add_option("--set", bench.sets, "Configuration override key=value (repeatable)");
  b->add_option("--seed", bench.seed, "Seed for stochastic components");
  b->add_option("--name", bench.name, "Image name in the report");
  b->add_flag("--timing", bench.timing, "Record wall time per run (outputs are then not reproducible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*s) return cmd_segment(seg);
    if (*d) return cmd_distance(dist);
    if (*b) return cmd_benchmark(bench);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
