#include "doctest.h"
#include "oracles.hpp"

#include <filesystem>
#include <fstream>

#include "geofront/config.hpp"
#include "geofront/dualfront.hpp"
#include "geofront/io.hpp"

using namespace geofront;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "geofront_io_tests";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("raster round trips") {
  std::mt19937_64 rng(1);
  for (const std::string ext : {"png", "pgm", "ppm"}) {
    RawImage raw{17, 11, ext == "pgm" ? 1 : 3, {}};
    for (int i = 0; i < 17 * 11 * raw.channels; ++i)
      raw.data.push_back(static_cast<std::uint8_t>(std::uniform_int_distribution<int>(0, 255)(rng)));
    const std::string path = scratch("raw." + ext).string();
    write_raw_image(path, raw);
    const RawImage back = read_raw_image(path);
    CHECK(back.width == 17);
    CHECK(back.height == 11);
    CHECK(back.channels == raw.channels);
    CHECK(back.data == raw.data);
  }
  const ImageGrid img = read_image(scratch("raw.pgm").string());
  for (double v : img.values()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS(read_raw_image(scratch("missing.png").string()));
  CHECK_THROWS(read_raw_image(scratch("raw.bmp").string()));
}

TEST_CASE("label map round trip") {
  for (int n : {2, 3, 5}) {
    Grid<int> g(23, 19);
    for (int y = 0; y < 19; ++y)
      for (int x = 0; x < 23; ++x) g(x, y) = 1 + (x * 7 + y * 3) % n;
    const LabelMap labels(g);
    const std::string path = scratch("labels.png").string();
    write_label_map(path, labels);
    CHECK(read_label_map(path) == labels);
  }
}

TEST_CASE("mask round trip and overlay") {
  const LabelMap labels = init_labels({Shape::circle(10, 10, 4.0)}, 21, 21);
  const Mask m = labels.region_mask(2);
  write_mask(scratch("mask.png").string(), m);
  CHECK(read_mask(scratch("mask.png").string()) == m);

  const RawImage ov = contour_overlay(ImageGrid(21, 21, 1, 0.5), labels);
  CHECK(ov.channels == 3);
  const Mask c = contour_mask(labels);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const bool red = ov.data[3 * i] == 255 && ov.data[3 * i + 1] == 0;
    CHECK(red == static_cast<bool>(c[i]));
  }
}

TEST_CASE("field grid round trip") {
  ScalarField f(7, 5);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = i % 4 == 0 ? kInf : 0.1 * static_cast<double>(i) - 1.0;
  const std::string path = scratch("f.fgrid").string();
  write_fgrid(path, f);
  CHECK(read_fgrid(path) == f);

  std::ifstream in(path, std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "FGRID v1 7 5");
  CHECK(fs::file_size(path) == header.size() + 1 + 8 * 35);

  write_text(scratch("bad.fgrid").string(), "GRID 1 2\n");
  CHECK_THROWS(read_fgrid(scratch("bad.fgrid").string()));
}

TEST_CASE("configuration entries") {
  DualFrontConfig c;
  apply_config_text(c, "# comment\nell = 5\nmu=6\n\nalpha=0.1 # trailing\nmodel=gmm:3\nem_iters=7\nstencil_radius=2\n"
                       "symmetric_mode=true\nseed=12\n");
  CHECK(c.ell == 5.0);
  CHECK(c.mu == 6.0);
  CHECK(c.alpha == 0.1);
  CHECK(c.model.kind == ModelSpec::Kind::Gmm);
  CHECK(c.model.components == 3);
  CHECK(c.model.em_iters == 7);
  CHECK(c.stencil_radius == 2);
  CHECK(c.symmetric_mode);
  CHECK(c.seed == 12);

  DualFrontConfig round;
  apply_config_text(round, format_config(c));
  CHECK(format_config(round) == format_config(c));
  CHECK(config_keys().size() == 18);

  try {
    apply_config_assignment(c, "gamma=3");
    FAIL("unknown key accepted");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "gamma");
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_config_assignment(c, "ell=abc"), ConfigError);
  CHECK_THROWS_AS(apply_config_assignment(c, "ell"), ConfigError);
  CHECK_THROWS_AS(apply_config_assignment(c, "model=kmeans"), ConfigError);
  CHECK_THROWS_AS(apply_config_assignment(c, "seed=-1"), ConfigError);
}

}  // TEST_SUITE
