#include "doctest.h"
#include "oracles.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "geofront/dualfront.hpp"
#include "geofront/eval.hpp"
#include "geofront/io.hpp"

using namespace geofront;
namespace fs = std::filesystem;

namespace {

fs::path workdir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "geofront_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GEOFRONT_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_inputs(const fs::path& dir, const SyntheticImage& syn) {
  write_raw_image((dir / "image.png").string(), to_raw(syn.image));
  write_mask((dir / "gt.png").string(), syn.ground_truth);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit statuses") {
  const fs::path dir = workdir("status");
  write_inputs(dir, make_synthetic("disk", 32, 32, 0.0, 0));
  const std::string img = (dir / "image.png").string();
  const std::string out = (dir / "out").string();
  CHECK(cli("segment --image " + img + " --out " + out + " --max-iters 1") == 0);
  CHECK(cli("segment --image " + img + " --out " + out + " --set bogus=1") == 2);
  CHECK(cli("segment --image " + img + " --out " + out + " --set ell=abc") == 2);
  CHECK(cli("distance --size 8x8 --source 1,1 --out " + out + " --tstar") == 2);
  CHECK(cli("distance --size 8x8 --source 9,1 --out " + out) == 2);
  CHECK(cli("segment --image " + (dir / "missing.png").string() + " --out " + out) == 1);
  CHECK(cli("frobnicate") == 2);
  CHECK(cli("--help") == 0);
}

TEST_CASE("segment with zero iterations writes the initial labels") {
  const fs::path dir = workdir("idle");
  write_inputs(dir, make_synthetic("disk", 40, 30, 0.05, 1));
  REQUIRE(cli("segment --image " + (dir / "image.png").string() + " --out " + (dir / "out").string() +
              " --init-circle 20,15,5 --max-iters 0") == 0);
  const LabelMap got = read_label_map((dir / "out" / "labels.png").string());
  CHECK(got == init_labels({Shape::circle(20, 15, 5.0)}, 40, 30));
  CHECK(fs::exists(dir / "out" / "overlay.png"));
  CHECK(fs::exists(dir / "out" / "trace.csv"));
  CHECK(fs::exists(dir / "out" / "metrics.json"));
}

TEST_CASE("segment recovers a clean disk") {
  const fs::path dir = workdir("disk");
  const SyntheticImage syn = make_synthetic("disk", 64, 64, 0.0, 0);
  write_inputs(dir, syn);
  REQUIRE(cli("segment --image " + (dir / "image.png").string() + " --gt " + (dir / "gt.png").string() + " --out " +
              (dir / "out").string() + " --init-circle 30,30,6 --dump-fields") == 0);
  const LabelMap labels = read_label_map((dir / "out" / "labels.png").string());
  const Mask seg = foreground_mask(labels);
  CHECK(jaccard(seg, syn.ground_truth) >= 0.98);

  // contour pixels within one pixel of the true boundary
  const ScalarField to_gt_edge = euclidean_distance_map(contour_mask(LabelMap(
      [&] {
        Grid<int> g(64, 64);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = syn.ground_truth[i] ? 2 : 1;
        return g;
      }())));
  const Mask c = contour_mask(labels);
  std::size_t near = 0, total = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c[i]) continue;
    ++total;
    near += to_gt_edge[i] <= 1.0 ? 1 : 0;
  }
  REQUIRE(total > 0);
  CHECK(static_cast<double>(near) >= 0.95 * static_cast<double>(total));
  CHECK(read_fgrid((dir / "out" / "eta.fgrid").string()).width() == 64);
  CHECK(slurp(dir / "out" / "metrics.json").find("\"jaccard\"") != std::string::npos);
}

TEST_CASE("distance on a blank grid") {
  const fs::path dir = workdir("distance");
  REQUIRE(cli("distance --size 16x16 --source 0,0 --out " + (dir / "a").string()) == 0);
  const ScalarField d = read_fgrid((dir / "a" / "distance.fgrid").string());
  CHECK(d(0, 0) == 0.0);
  CHECK(d(3, 4) == doctest::Approx(5.0).epsilon(0.01));
  CHECK(d(10, 0) == doctest::Approx(10.0).epsilon(1e-12));

  REQUIRE(cli("distance --size 16x16 --source 0,0 --phi-zero --source-init-radius 0 --out " + (dir / "b").string()) == 0);
  const ScalarField g = read_fgrid((dir / "b" / "distance.fgrid").string());
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) CHECK(std::isfinite(g(x, y)) == (x <= 1 && y <= 1));
  CHECK(slurp(dir / "b" / "distance.json").find("\"accepted\"") != std::string::npos);
}

TEST_CASE("distance threshold selection") {
  const fs::path dir = workdir("tstar");
  write_inputs(dir, make_synthetic("disk", 48, 48, 0.0, 0));
  REQUIRE(cli("distance --image " + (dir / "image.png").string() + " --gt " + (dir / "gt.png").string() +
              " --source 24,24 --tstar --out " + (dir / "out").string()) == 0);
  CHECK(fs::exists(dir / "out" / "tstar_mask.png"));
  CHECK(slurp(dir / "out" / "distance.json").find("\"t_star\"") != std::string::npos);
}

TEST_CASE("benchmark output is reproducible") {
  const fs::path dir = workdir("bench");
  const std::string base = "benchmark --synthetic disk --size 48x48 --runs 2 --noise 0.05 --out ";
  REQUIRE(cli(base + (dir / "a").string()) == 0);
  REQUIRE(cli(base + (dir / "b").string()) == 0);
  const std::string csv = slurp(dir / "a" / "report.csv");
  CHECK(csv == slurp(dir / "b" / "report.csv"));
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
  for (const std::string m : {",asym,", ",sym,", ",thresh,"}) CHECK(csv.find(m) != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

}  // TEST_SUITE
