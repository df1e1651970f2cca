#include "doctest.h"
#include "oracles.hpp"

#include <set>

#include "geofront/eval.hpp"

using namespace geofront;

TEST_SUITE("eval") {

TEST_CASE("jaccard examples") {
  Mask a(10, 10), b(10, 10);
  CHECK(jaccard(a, b) == 1.0);
  for (int x = 0; x < 10; ++x) a(x, 0) = 1;
  CHECK(jaccard(a, a) == 1.0);
  for (int x = 0; x < 10; ++x) b(x, 5) = 1;
  CHECK(jaccard(a, b) == 0.0);

  // |intersection| = 50, |union| = 150
  Mask p(20, 10), q(20, 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) p(x, y) = 1;
  for (int y = 0; y < 10; ++y)
    for (int x = 5; x < 15; ++x) q(x, y) = 1;
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += p[i] && q[i];
    uni += p[i] || q[i];
  }
  REQUIRE(inter == 50);
  REQUIRE(uni == 150);
  CHECK(jaccard(p, q) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  CHECK_THROWS(jaccard(Mask(3, 3), Mask(3, 4)));
}

TEST_CASE("jaccard is symmetric and detects equality") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Mask a(12, 9), b(12, 9);
    for (auto& v : a.values()) v = std::bernoulli_distribution(0.4)(rng);
    b = a;
    if (trial % 2) b[static_cast<std::size_t>(trial) % b.size()] ^= 1;
    CHECK(jaccard(a, b) == jaccard(b, a));
    CHECK((jaccard(a, b) == 1.0) == (a == b));
  }
}

TEST_CASE("threshold segmentation") {
  const ScalarField d = euclidean_distance_map(PointSet{{10, 10}}, 21, 21);
  CHECK(count(threshold_segment(d, 0.0)) == 1);
  const Mask disk = threshold_segment(d, 5.0);
  for (int y = 0; y < 21; ++y)
    for (int x = 0; x < 21; ++x) CHECK(static_cast<bool>(disk(x, y)) == ((x - 10) * (x - 10) + (y - 10) * (y - 10) <= 25));

  ScalarField partial = d;
  partial(0, 0) = kInf;
  CHECK(count(threshold_segment(partial, kInf)) == partial.size());
  CHECK_THROWS(threshold_segment(d, -1.0));
}

TEST_CASE("threshold selection on a disk") {
  const int s = 61;
  Mask gt(s, s);
  for (int y = 0; y < s; ++y)
    for (int x = 0; x < s; ++x) gt(x, y) = (x - 30) * (x - 30) + (y - 30) * (y - 30) <= 400 ? 1 : 0;
  const ScalarField d = euclidean_distance_map(PointSet{{30, 30}}, s, s);
  const ThresholdSelection sel = select_t_star(d, gt);
  CHECK(sel.t_star == doctest::Approx(20.0).epsilon(0.05));
  CHECK(sel.jaccard >= 0.95);
  CHECK(sel.t1 <= sel.t_star);
  CHECK(sel.t_star <= sel.t2);
  CHECK(sel.jaccard >= jaccard(threshold_segment(d, sel.t1), gt));
  CHECK(sel.jaccard >= jaccard(threshold_segment(d, sel.t2), gt));
  CHECK(sel.mask == threshold_segment(d, sel.t_star));

  // exhaustive sweep over every finite value inside [T1, T2]: unimodal
  std::vector<double> values(d.values().begin(), d.values().end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  std::vector<double> js;
  double best = -1.0, best_t = 0.0;
  for (double t : values) {
    if (t < sel.t1 || t > sel.t2) continue;
    const double j = jaccard(threshold_segment(d, t), gt);
    js.push_back(j);
    if (j > best) {
      best = j;
      best_t = t;
    }
  }
  CHECK(best == sel.jaccard);
  CHECK(best_t == sel.t_star);
  const auto peak = std::max_element(js.begin(), js.end()) - js.begin();
  for (std::ptrdiff_t k = 1; k <= peak; ++k) CHECK(js[k] >= js[k - 1]);
  for (std::size_t k = static_cast<std::size_t>(peak) + 1; k < js.size(); ++k) CHECK(js[k] <= js[k - 1]);
}

TEST_CASE("threshold selection recovers an exact level set") {
  std::mt19937_64 rng(2);
  ScalarField d(30, 20);
  for (double& v : d.values()) v = std::uniform_real_distribution<double>(0, 10)(rng);
  const Mask gt = threshold_segment(d, 4.0);
  const ThresholdSelection sel = select_t_star(d, gt);
  CHECK(sel.jaccard == 1.0);
  CHECK(sel.mask == gt);

  ScalarField sparse(30, 20, kInf);
  sparse(0, 0) = 0.0;
  CHECK_THROWS_WITH(select_t_star(sparse, gt), "front under-covers ground truth");
}

TEST_CASE("synthetic images") {
  for (const std::string shape : {"disk", "blob", "lobes"}) {
    const SyntheticImage clean = make_synthetic(shape, 64, 48, 0.0, 1);
    std::set<double> tones(clean.image.values().begin(), clean.image.values().end());
    CHECK(tones == std::set<double>{0.25, 0.75});
    CHECK(count(clean.ground_truth) > 0);
    for (int y = 0; y < 48; ++y)
      for (int x = 0; x < 64; ++x) CHECK((clean.image.at(x, y, 0) == 0.75) == static_cast<bool>(clean.ground_truth(x, y)));

    const SyntheticImage a = make_synthetic(shape, 64, 48, 0.1, 7);
    const SyntheticImage b = make_synthetic(shape, 64, 48, 0.1, 7);
    CHECK(a.image == b.image);
    CHECK(!(a.image == make_synthetic(shape, 64, 48, 0.1, 8).image));
  }

  const SyntheticImage noisy = make_synthetic("disk", 128, 128, 0.1, 3);
  double s = 0.0, s2 = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < noisy.image.values().size(); ++i) {
    const double v = noisy.image.values()[i];
    if (v <= 0.0 || v >= 1.0) continue;
    const double e = v - noisy.clean.values()[i];
    s += e;
    s2 += e * e;
    ++n;
  }
  const double mean = s / static_cast<double>(n);
  const double sd = std::sqrt(s2 / static_cast<double>(n) - mean * mean);
  CHECK(std::abs(sd - 0.1) <= 0.01);

  CHECK_THROWS(make_synthetic("square", 64, 64, 0.1, 0));
  CHECK_THROWS(make_synthetic("disk", 64, 64, -0.1, 0));
}

TEST_CASE("benchmark seeds") {
  const SyntheticImage syn = make_synthetic("disk", 64, 64, 0.0, 0);
  const PointSet fps = benchmark_seeds(syn.ground_truth, 20, 10.0, "fps");
  CHECK(fps.size() == 20);
  const ScalarField depth = depth_map(syn.ground_truth);
  for (const Pixel& p : fps) CHECK(depth(p) > 10.0);
  CHECK(benchmark_seeds(syn.ground_truth, 20, 10.0, "deepest").size() == 1);
  CHECK_THROWS(benchmark_seeds(syn.ground_truth, 5, 40.0, "fps"));
}

TEST_CASE("benchmark report") {
  const SyntheticImage syn = make_synthetic("disk", 64, 64, 0.05, 0);
  BenchmarkOptions o;
  o.runs = 3;
  o.image_name = "disk";
  const BenchmarkReport r = benchmark(syn.image, syn.ground_truth, o);
  CHECK(r.runs.size() == 9);
  REQUIRE(r.summary.size() == 3);
  for (const MethodSummary& m : r.summary) {
    CHECK(m.min <= m.ave);
    CHECK(m.ave <= m.max);
    CHECK(m.std >= 0.0);
    CHECK(m.runs == 3);
  }
  CHECK(r.summary[0].method == "asym");
  for (const BenchmarkRun& run : r.runs)
    if (run.method == "asym") CHECK(run.jaccard >= 0.98);

  const std::string csv = r.to_csv();
  CHECK(csv.rfind("image,method,run,seed_point,jaccard,iterations,seconds\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
  CHECK(csv == benchmark(syn.image, syn.ground_truth, o).to_csv());

  o.runs = 1;
  o.methods = {"thresh"};
  const BenchmarkReport one = benchmark(syn.image, syn.ground_truth, o);
  CHECK(one.summary[0].ave == one.summary[0].max);
  CHECK(one.summary[0].min == one.summary[0].max);
  CHECK(one.summary[0].std == 0.0);

  o.methods = {"nope"};
  CHECK_THROWS(benchmark(syn.image, syn.ground_truth, o));
}

TEST_CASE("summaries") {
  std::vector<BenchmarkRun> runs(4);
  const double js[] = {0.5, 0.7, 0.9, 0.9};
  for (int k = 0; k < 4; ++k) {
    runs[static_cast<std::size_t>(k)].image = "i";
    runs[static_cast<std::size_t>(k)].method = "m";
    runs[static_cast<std::size_t>(k)].jaccard = js[k];
  }
  const MethodSummary s = summarise(runs, "i", "m");
  CHECK(s.ave == doctest::Approx(0.75));
  CHECK(s.max == 0.9);
  CHECK(s.min == 0.5);
  CHECK(s.std == doctest::Approx(std::sqrt((0.0625 + 0.0025 + 0.0225 + 0.0225) / 4.0)));
}

}  // TEST_SUITE
