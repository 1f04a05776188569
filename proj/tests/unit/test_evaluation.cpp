#include "sitrec/evaluation.hpp"
#include "sitrec/graph_builder.hpp"

#include <doctest.h>

#include <cstdlib>
#include <set>

using namespace sitrec;
using namespace sitrec::eval;

namespace {

SolveResult run(const SyntheticData& d, Method m, std::size_t k = 10) {
  const auto g = can_graph(pairwise_distances(d.x), k);
  SolverConfig cfg;
  cfg.method = m;
  return solve(g, build_indicator(d.labels, d.x.size()),
               build_fitting_weights(d.labels, d.x.size()), cfg);
}

}  // namespace

TEST_CASE("generate: sizes, truth and labels") {
  SyntheticSpec spec;
  spec.noise_points = 10;
  const auto d = generate(spec);
  CHECK(d.x.size() == 3 * 40 + 40 + 10);
  CHECK(d.x.dim() == 8);
  CHECK(d.truth.num_classes == 3);
  CHECK(d.labels.num_classes == 3);
  for (int cls = 0; cls < 3; ++cls) {
    int count = 0;
    for (const auto& [i, c] : d.labels.assignments) {
      if (c == cls) {
        ++count;
        CHECK(d.truth.classes[i] == cls);
      }
    }
    CHECK(count == 5);
  }
  CHECK(std::count(d.truth.classes.begin(), d.truth.classes.end(), 3) == 40);
  CHECK(std::count(d.truth.classes.begin(), d.truth.classes.end(), kNoise) == 10);
  CHECK(d.truth.outliers.empty());
}

TEST_CASE("generate is deterministic per seed") {
  SyntheticSpec spec;
  spec.outlier_fraction = 0.1;
  spec.noise_points = 5;
  const auto a = generate(spec);
  const auto b = generate(spec);
  CHECK(a.x.items() == b.x.items());
  CHECK(a.truth.classes == b.truth.classes);
  CHECK(a.truth.outliers == b.truth.outliers);
  CHECK(a.labels.assignments == b.labels.assignments);
  spec.seed = 2;
  CHECK(generate(spec).x.items() != a.x.items());
}

TEST_CASE("outlier injection only changes the injected rows") {
  SyntheticSpec spec;
  const auto clean = generate(spec);
  spec.outlier_fraction = 0.1;
  const auto noisy = generate(spec);
  CHECK(noisy.truth.outliers.size() == 16);
  const std::set<std::size_t> injected(noisy.truth.outliers.begin(), noisy.truth.outliers.end());
  for (std::size_t i = 0; i < clean.x.size(); ++i) {
    const bool same = clean.x.row(i) == noisy.x.row(i);
    CHECK(same != (injected.count(i) == 1));
  }
  CHECK(clean.labels.assignments == noisy.labels.assignments);
  CHECK(clean.truth.classes == noisy.truth.classes);
}

TEST_CASE("spec validation") {
  SyntheticSpec spec;
  spec.separation = 0;
  CHECK_THROWS_AS(generate(spec), ConfigError);
  spec = {};
  spec.outlier_fraction = 1.5;
  CHECK_THROWS_AS(generate(spec), ConfigError);
  spec = {};
  spec.noise_points = -1;
  CHECK_THROWS_AS(generate(spec), ConfigError);
  spec = {};
  spec.dim = 3;  // four blobs need four axes
  CHECK_THROWS_AS(generate(spec), ConfigError);
}

TEST_CASE("well separated known blobs are recovered from one label each") {
  SyntheticSpec spec;
  spec.novel_points = 0;
  spec.separation = 30;
  spec.label_fraction = 0.01;
  const auto d = generate(spec);
  CHECK(d.labels.assignments.size() == 3);
  for (auto m : {Method::GSS, Method::L1, Method::Capped}) {
    CHECK(evaluate(run(d, m), d.truth).acc_known == 100.0);
  }
}

TEST_CASE("clean default spec: known blobs exact, novel blob discovered") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    SyntheticSpec spec;
    spec.seed = seed;
    const auto d = generate(spec);
    for (auto m : {Method::GSS, Method::L1, Method::Capped}) {
      const auto r = evaluate(run(d, m), d.truth);
      CHECK(r.acc_known == 100.0);
      CHECK(r.acc_unknown >= 90.0);
    }
  }
}

TEST_CASE("high-dimensional smoke run") {
  SyntheticSpec spec;
  spec.dim = 500;
  spec.separation = 60;  // within-blob distances grow like sqrt(2 dim)
  spec.points_per_class = 15;
  spec.novel_points = 15;
  spec.label_fraction = 0.2;
  const auto d = generate(spec);
  CHECK(d.x.dim() == 500);
  const auto r = evaluate(run(d, Method::Capped, 5), d.truth);
  CHECK(r.acc_known == 100.0);
}

TEST_CASE("evaluate: examples and confusion bookkeeping") {
  GroundTruth truth;
  truth.num_classes = 2;
  truth.classes = {0, 0, 1, 1, 2, kNoise};
  const std::vector<int> perfect{0, 0, 1, 1, 2, 1};
  const auto p = evaluate(perfect, truth);
  CHECK(p.acc_known == 100.0);
  CHECK(p.acc_unknown == 100.0);
  CHECK(p.noise_row == std::vector<int>{0, 1, 0});
  CHECK(p.confusion.sum() == 5);

  GroundTruth balanced;
  balanced.num_classes = 2;
  balanced.classes = {0, 0, 1, 1};
  const std::vector<int> ones{0, 0, 0, 0};
  const auto half = evaluate(ones, balanced);
  CHECK(half.acc_known == 50.0);
  CHECK(half.n_unknown == 0);
  CHECK(half.acc_unknown == 100.0);
  CHECK(half.confusion.row(0).sum() == 2);
  CHECK(half.confusion.row(1).sum() == 2);

  const std::vector<int> wrong_size{0};
  CHECK_THROWS_AS(evaluate(wrong_size, balanced), ConfigError);
  const std::vector<int> out_of_range{0, 0, 3, 0};
  CHECK_THROWS_AS(evaluate(out_of_range, balanced), ConfigError);
}

TEST_CASE("evaluate is invariant under consistent relabeling") {
  SyntheticSpec spec;
  const auto d = generate(spec);
  const auto res = run(d, Method::GSS);
  const std::vector<int> perm{1, 2, 0, 3};
  GroundTruth t2 = d.truth;
  for (auto& c : t2.classes) c = perm[static_cast<std::size_t>(c)];
  std::vector<int> a2 = res.assignments;
  for (auto& a : a2) a = perm[static_cast<std::size_t>(a)];
  const auto r1 = evaluate(res, d.truth);
  const auto r2 = evaluate(a2, t2);
  CHECK(r1.acc_known == r2.acc_known);
  CHECK(r1.acc_unknown == r2.acc_unknown);
  for (int i = 0; i < 4; ++i) {
    CHECK(r1.confusion.row(i).sum() ==
          std::count(d.truth.classes.begin(), d.truth.classes.end(), i));
  }
}

TEST_CASE("grid sizes follow the default grids") {
  GridSpec grids;
  CHECK(grid_size(grids, Method::Capped) == 264);
  CHECK(grid_size(grids, Method::GSS) == 11);
  CHECK(grid_size(grids, Method::L1) == 11);
  CHECK(default_u_grid() == std::vector<double>{1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
  CHECK(default_theta_grid() == std::vector<double>{0.01, 0.1, 1, 10});
  CHECK(default_p_grid() == std::vector<double>{0.5, 0.7, 1, 1.5, 1.7, 2});
}

TEST_CASE("grid search: single point and dominant configuration") {
  SyntheticSpec spec;
  spec.label_fraction = 0.25;
  const auto d = generate(spec);
  const auto g = can_graph(pairwise_distances(d.x), 10);

  GridSpec one;
  one.methods = {Method::Capped};
  one.u_labeled = {30};
  one.theta = {1};
  one.p_exp = {1.5};
  const auto single = grid_search(g, d.labels, one);
  REQUIRE(single.best.size() == 1);
  CHECK(single.table.size() == 1);
  CHECK(single.best[0].u_labeled == 30);
  CHECK(single.best[0].config.theta == 1);
  CHECK(single.best[0].config.p_exp == 1.5);
  CHECK(single.table[0].folds_used == 5);

  // A vanishing threshold caps every edge at once, so nothing propagates.
  GridSpec two = one;
  two.theta = {1e-12, 1};
  two.p_exp = {1};
  const auto res = grid_search(g, d.labels, two);
  REQUIRE(res.table.size() == 2);
  CHECK(res.table[1].mean_acc > res.table[0].mean_acc);
  CHECK(res.best[0].config.theta == 1);

  GridSpec all;
  all.u_labeled = {10, 100};
  all.theta = {1};
  all.p_exp = {1};
  const auto r = grid_search(g, d.labels, all);
  CHECK(r.best.size() == 3);
  CHECK(r.table.size() == 6);
}

TEST_CASE("grid search skips folds without training labels for a class") {
  SyntheticSpec spec;
  spec.label_fraction = 0.025;  // one label per class
  const auto d = generate(spec);
  const auto g = can_graph(pairwise_distances(d.x), 10);
  GridSpec grids;
  grids.methods = {Method::GSS};
  grids.u_labeled = {100};
  grids.folds = 2;
  const auto r = grid_search(g, d.labels, grids);
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.table[0].folds_used == 0);

  grids.folds = 1;
  CHECK_THROWS_AS(grid_search(g, d.labels, grids), ConfigError);
  grids.folds = 2;
  grids.u_labeled.clear();
  CHECK_THROWS_AS(grid_search(g, d.labels, grids), ConfigError);
}

TEST_CASE("grid search results do not depend on the thread count") {
  SyntheticSpec spec;
  spec.label_fraction = 0.25;
  const auto d = generate(spec);
  const auto g = can_graph(pairwise_distances(d.x), 10);
  GridSpec grids;
  grids.u_labeled = {1, 100};
  grids.theta = {0.1, 1};
  grids.p_exp = {1, 2};
  grids.threads = 1;
  const auto a = grid_search(g, d.labels, grids);
  grids.threads = 3;
  const auto b = grid_search(g, d.labels, grids);
  REQUIRE(a.table.size() == b.table.size());
  for (std::size_t i = 0; i < a.table.size(); ++i) CHECK(a.table[i].mean_acc == b.table[i].mean_acc);
}

TEST_CASE("default thread count honours SITREC_THREADS") {
  setenv("SITREC_THREADS", "3", 1);
  CHECK(default_threads() == 3);
  setenv("SITREC_THREADS", "zero", 1);
  CHECK(default_threads() >= 1);
  unsetenv("SITREC_THREADS");
}

TEST_CASE("robustness study aggregates per-seed rows") {
  SyntheticSpec spec;
  spec.outlier_fraction = 0.1;
  SolverConfig base;
  const auto s = robustness_study(spec, 3, base, GraphKind::Can, 100, 0.01, 2);
  REQUIRE(s.rows.size() == 3);
  for (int m = 0; m < 3; ++m) {
    double mean = 0;
    for (const auto& r : s.rows) mean += r.known[m] / 3;
    CHECK(s.mean_known[m] == doctest::Approx(mean));
  }
  CHECK(s.rows[0].seed == 1);
  CHECK(s.rows[2].seed == 3);
  CHECK(s.l1_not_worse == (s.mean_known[1] >= s.mean_known[0]));
  CHECK_THROWS_AS(robustness_study(spec, 0, base, GraphKind::Can, 100, 0.01), ConfigError);
}
