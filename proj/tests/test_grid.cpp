#include "doctest.h"
#include "oracles.hpp"

#include <set>

using namespace geofront;

TEST_SUITE("grid") {

TEST_CASE("distance map examples") {
  const ScalarField d = euclidean_distance_map(PointSet{{0, 0}}, 8, 8);
  CHECK(d(3, 4) == doctest::Approx(5.0).epsilon(1e-15));

  const Mask all(6, 5, 1);
  const ScalarField zero = euclidean_distance_map(all);
  for (double v : zero.values()) CHECK(v == 0.0);

  const ScalarField two = euclidean_distance_map(PointSet{{0, 0}, {10, 0}}, 12, 5);
  CHECK(two(5, 2) == doctest::Approx(std::sqrt(29.0)).epsilon(1e-15));

  CHECK_THROWS_WITH(euclidean_distance_map(Mask(4, 4)), "no sources");
  CHECK_THROWS_WITH(euclidean_distance_map(PointSet{}, 4, 4), "no sources");
}

TEST_CASE("distance map equals brute force on random seed sets") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    std::uniform_int_distribution<int> dim(1, 64);
    const int w = dim(rng), h = dim(rng);
    std::bernoulli_distribution on(std::uniform_real_distribution<double>(0.001, 0.2)(rng));
    Mask seeds(w, h);
    for (auto& v : seeds.values()) v = on(rng) ? 1 : 0;
    seeds(std::uniform_int_distribution<int>(0, w - 1)(rng), std::uniform_int_distribution<int>(0, h - 1)(rng)) = 1;
    const ScalarField fast = euclidean_distance_map(seeds);
    const ScalarField slow = oracle::brute_edt(seeds);
    for (std::size_t i = 0; i < fast.size(); ++i) REQUIRE(fast[i] == slow[i]);
  }
}

TEST_CASE("depth map measures distance to the region complement") {
  Mask sq(11, 11, 1);
  const ScalarField d = depth_map(sq);
  CHECK(d(5, 5) == 6.0);
  CHECK(d(0, 0) == 1.0);
}

TEST_CASE("offset band of a disk") {
  const auto labels = oracle::make_labels(64, 64, [](int x, int y) {
    return (x - 32) * (x - 32) + (y - 32) * (y - 32) <= 400 ? 2 : 1;
  });
  const PointSet band = extract_offset_band(labels, 2, 5.0);
  const ScalarField ref = oracle::brute_edt(region_boundary_mask(labels, 2));
  std::set<std::pair<int, int>> got;
  for (const Pixel& p : band) got.insert({p.x, p.y});
  std::set<std::pair<int, int>> want;
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (labels(x, y) == 2 && ref(x, y) >= 4.0 && ref(x, y) <= 5.0) want.insert({x, y});
  CHECK(got == want);
  CHECK(!got.empty());
  for (const auto& [x, y] : got) {
    const double r = std::hypot(x - 32.0, y - 32.0);
    CHECK(r > 13.0);
    CHECK(r < 17.5);
  }
}

TEST_CASE("offset band falls back to the deepest pixels") {
  const auto labels = oracle::make_labels(40, 40, [](int x, int y) {
    return (x - 20) * (x - 20) + (y - 20) * (y - 20) <= 16 ? 2 : 1;
  });
  const PointSet band = extract_offset_band(labels, 2, 12.0);
  const ScalarField ref = oracle::brute_edt(region_boundary_mask(labels, 2));
  double deepest = 0.0;
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      if (labels(x, y) == 2) deepest = std::max(deepest, ref(x, y));
  REQUIRE(!band.empty());
  for (const Pixel& p : band) {
    CHECK(labels(p) == 2);
    CHECK(ref(p) == deepest);
  }

  const auto line = oracle::make_labels(20, 20, [](int x, int) { return x == 7 ? 2 : 1; });
  const PointSet thin = extract_offset_band(line, 2, 3.0);
  CHECK(thin.size() == 20);
}

TEST_CASE("offset band of an empty region") {
  const auto labels = oracle::make_labels(8, 8, [](int x, int) { return x < 4 ? 1 : 2; });
  const ScalarField d(8, 8, 1.0);
  CHECK_THROWS_WITH(extract_offset_band(labels, 3, 2.0, d), "vanished region");
}

TEST_CASE("narrow band of a straight interface") {
  const int c = 20;
  const auto labels = oracle::make_labels(40, 12, [&](int x, int) { return x < c ? 1 : 2; });
  const Narrowband nb = build_narrowband(labels, 5.0);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 40; ++x) {
      // interface pixels are columns c-1 and c
      const bool inside = x > c - 1 - 5 && x < c + 5;
      CHECK(static_cast<bool>(nb.contour_band(x, y)) == inside);
      CHECK(nb.region_band[0](x, y) == nb.contour_band(x, y));
      CHECK(nb.region_band[1](x, y) == nb.contour_band(x, y));
    }

  const Narrowband thin = build_narrowband(labels, 0.5);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 40; ++x) CHECK(static_cast<bool>(thin.contour_band(x, y)) == (x == c - 1 || x == c));

  const LabelMap single(Grid<int>(10, 10, 1));
  CHECK(count(build_narrowband(single, 5.0).contour_band) == 0);
}

TEST_CASE("region bands cover the contour band") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    std::uniform_int_distribution<int> pos(0, 39);
    std::vector<Pixel> centres;
    const int n = std::uniform_int_distribution<int>(2, 5)(rng);
    for (int k = 0; k < n; ++k) centres.push_back({pos(rng), pos(rng)});
    Grid<int> g(40, 40);
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 40; ++x) {
        int best = 0;
        for (int k = 1; k < n; ++k) {
          const auto d = [&](int j) {
            return (x - centres[j].x) * (x - centres[j].x) + (y - centres[j].y) * (y - centres[j].y);
          };
          if (d(k) < d(best)) best = k;
        }
        g(x, y) = best + 1;
      }
    const LabelMap labels = compact_labels(g);
    const double ell = std::uniform_real_distribution<double>(0.5, 8.0)(rng);
    const Narrowband nb = build_narrowband(labels, ell);
    for (std::size_t i = 0; i < nb.contour_band.size(); ++i) {
      bool any = false;
      for (const Mask& ui : nb.region_band) {
        if (ui[i]) CHECK(nb.contour_band[i]);
        any = any || ui[i];
      }
      CHECK(any == static_cast<bool>(nb.contour_band[i]));
    }
  }
}

TEST_CASE("interface Voronoi") {
  const auto two = oracle::make_labels(10, 10, [](int x, int) { return x < 5 ? 1 : 2; });
  const InterfaceVoronoi iv2(two);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) CHECK(iv2.at(x, y) == InterfacePair{1, 2});

  const auto strips = oracle::make_labels(30, 6, [](int x, int) { return x < 10 ? 1 : (x < 20 ? 2 : 3); });
  const InterfaceVoronoi iv3(strips);
  CHECK(iv3.at(4, 3) == InterfacePair{1, 2});
  CHECK(iv3.at(17, 3) == InterfacePair{2, 3});

  // strips 2 | 1 | 3: the middle of strip 1 is equally far from both interfaces
  const auto middle = oracle::make_labels(20, 6, [](int x, int) { return x < 5 ? 2 : (x < 14 ? 1 : 3); });
  const InterfaceVoronoi ivm(middle);
  REQUIRE(ivm.pairs().size() == 2);
  REQUIRE(ivm.squared_distance(0)(9, 2) == ivm.squared_distance(1)(9, 2));
  CHECK(ivm.at(9, 2) == InterfacePair{1, 2});
  CHECK(ivm.at(11, 2) == InterfacePair{1, 3});
}

TEST_CASE("farthest point sampling examples") {
  const Mask sq(10, 10, 1);
  const PointSet two = farthest_point_sampling(sq, 2, Pixel{0, 0});
  REQUIRE(two.size() == 2);
  CHECK(two[1] == Pixel{9, 9});

  const PointSet one = farthest_point_sampling(sq, 1, Pixel{3, 4});
  REQUIRE(one.size() == 1);
  CHECK(one[0] == Pixel{3, 4});

  const PointSet deep = farthest_point_sampling(Mask(11, 11, 1), 1);
  CHECK(deep[0] == Pixel{5, 5});

  CHECK_THROWS(farthest_point_sampling(Mask(3, 3, 1), 10));
}

TEST_CASE("farthest point sampling matches brute force and nests") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    Mask region(30, 25);
    std::bernoulli_distribution on(0.4);
    for (auto& v : region.values()) v = on(rng) ? 1 : 0;
    const int n = 12;
    const PointSet pts = farthest_point_sampling(region, n);

    // greedy brute force from the same first point
    PointSet ref{pts[0]};
    while (static_cast<int>(ref.size()) < n) {
      long best = -1;
      Pixel arg{};
      for (int y = 0; y < 25; ++y)
        for (int x = 0; x < 30; ++x) {
          if (!region(x, y)) continue;
          long dmin = std::numeric_limits<long>::max();
          for (const Pixel& p : ref) dmin = std::min<long>(dmin, (x - p.x) * (x - p.x) + (y - p.y) * (y - p.y));
          if (dmin > best || (dmin == best && Pixel{x, y} < arg)) {
            best = dmin;
            arg = {x, y};
          }
        }
      ref.push_back(arg);
    }
    CHECK(pts == ref);

    double prev = kInf;
    for (int k = 2; k <= n; ++k) {
      const PointSet prefix = farthest_point_sampling(region, k);
      CHECK(std::equal(prefix.begin(), prefix.end(), pts.begin()));
      double mind = kInf;
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b)
          mind = std::min(mind, std::hypot(prefix[a].x - prefix[b].x, prefix[a].y - prefix[b].y));
      CHECK(mind <= prev);
      prev = mind;
    }
  }
}

TEST_CASE("gaussian convolution") {
  ScalarField f(9, 7);
  std::mt19937_64 rng(1);
  for (double& v : f.values()) v = std::uniform_real_distribution<double>(0, 1)(rng);
  CHECK(gaussian_convolve(f, 0.0) == f);

  const ScalarField c = gaussian_convolve(ScalarField(9, 7, 0.3), 1.7);
  for (double v : c.values()) CHECK(v == doctest::Approx(0.3).epsilon(1e-14));

  ScalarField imp(15, 15, 0.0);
  imp(7, 7) = 1.0;
  const ScalarField out = gaussian_convolve(imp, 1.0);
  // directly tabulated 7 x 7 kernel
  double total = 0.0;
  for (int dy = -3; dy <= 3; ++dy)
    for (int dx = -3; dx <= 3; ++dx) total += std::exp(-0.5 * (dx * dx + dy * dy));
  for (int dy = -3; dy <= 3; ++dy)
    for (int dx = -3; dx <= 3; ++dx)
      CHECK(out(7 + dx, 7 + dy) == doctest::Approx(std::exp(-0.5 * (dx * dx + dy * dy)) / total).epsilon(1e-12));
  CHECK(out(7, 3) == 0.0);
}

TEST_CASE("gaussian convolution preserves the mean away from the border") {
  ScalarField f(40, 40, 0.0);
  std::mt19937_64 rng(9);
  for (int y = 12; y < 28; ++y)
    for (int x = 12; x < 28; ++x) f(x, y) = std::uniform_real_distribution<double>(0, 1)(rng);
  const ScalarField g = gaussian_convolve(f, 2.0);
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    a += f[i];
    b += g[i];
  }
  CHECK(b == doctest::Approx(a).epsilon(1e-12));
}

TEST_CASE("label maps") {
  Grid<int> g(3, 3, 1);
  g(1, 1) = 3;
  CHECK_THROWS(LabelMap(g));  // label 2 missing
  g(0, 0) = 2;
  const LabelMap lm(g);
  CHECK(lm.regions() == 3);
  CHECK(lm.areas() == std::vector<std::size_t>{7, 1, 1});

  Grid<int> gaps(4, 1);
  gaps(0, 0) = 5;
  gaps(1, 0) = 2;
  gaps(2, 0) = 5;
  gaps(3, 0) = 9;
  const LabelMap c = compact_labels(gaps);
  CHECK(c.regions() == 3);
  CHECK(c(0, 0) == 2);
  CHECK(c(1, 0) == 1);
  CHECK(c(3, 0) == 3);
}

}  // TEST_SUITE
