// Synthetic blob data, outlier injection, known/novel accuracy metrics and
// cross-validated parameter grids.
#pragma once

#include "sitrec/core_model.hpp"
#include "sitrec/ssl_solvers.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sitrec::eval {

/// Ground-truth class of a noise item (not part of any situation).
inline constexpr int kNoise = -1;

struct SyntheticSpec {
  int n_known_classes = 3;
  int points_per_class = 40;
  int novel_points = 40;
  int noise_points = 0;
  int dim = 8;
  double separation = 10.0;       // distance between any two blob centres
  double spread = 1.0;            // per-coordinate std-dev inside a blob
  double outlier_fraction = 0.0;  // of class/novel items moved to the far field
  double outlier_radius = 3.0;    // far-field distance, in units of `separation`
  double label_fraction = 0.125;  // labeled share of each known class (>= 1 item)
  std::uint64_t seed = 1;

  void validate() const;
};

struct GroundTruth {
  std::vector<int> classes;  // 0..c-1 known, c novel, kNoise noise
  int num_classes = 0;
  std::vector<std::size_t> outliers;  // items whose features were replaced
};

struct SyntheticData {
  FeatureMatrix x;
  GroundTruth truth;
  PriorLabels labels;
};

/// Isotropic Gaussian blobs with centres (separation/sqrt2) e_b, one per known
/// class plus the novel blob; noise uniform over the blobs' bounding box.
/// Outliers are drawn from an independent stream, so changing
/// outlier_fraction only alters the injected rows.
SyntheticData generate(const SyntheticSpec& spec);

struct EvalReport {
  double acc_known = 100.0;    // percent; 100 when there are no known items
  double acc_unknown = 100.0;  // percent; 100 when there are no novel items
  std::size_t n_known = 0;
  std::size_t n_unknown = 0;
  Eigen::MatrixXi confusion;   // (c+1) x (c+1): true class x assigned class
  std::vector<int> noise_row;  // assigned-class counts of noise items
  SolverConfig params;
};

EvalReport evaluate(std::span<const int> assignments, const GroundTruth& truth,
                    const SolverConfig& params = {});
EvalReport evaluate(const SolveResult& result, const GroundTruth& truth,
                    const SolverConfig& params = {});

/// The u, theta and p grids used for cross-validation by default.
std::vector<double> default_u_grid();
std::vector<double> default_theta_grid();
std::vector<double> default_p_grid();

struct GridSpec {
  std::vector<Method> methods{Method::GSS, Method::L1, Method::Capped};
  std::vector<double> u_labeled = default_u_grid();
  std::vector<double> theta = default_theta_grid();
  std::vector<double> p_exp = default_p_grid();
  double u_unlabeled = 0.01;
  int folds = 5;
  std::uint64_t seed = 7;
  unsigned threads = 0;  // 0: SITREC_THREADS or hardware concurrency
};

struct GridRow {
  Method method = Method::GSS;
  double u_labeled = 0.0;
  double theta = 0.0;
  double p_exp = 0.0;
  double mean_acc = 0.0;  // mean held-out known accuracy, percent
  int folds_used = 0;
};

struct BestConfig {
  SolverConfig config;
  double u_labeled = 0.0;
  double mean_acc = 0.0;
};

struct GridResult {
  std::vector<GridRow> table;   // enumeration order: method, u, theta, p
  std::vector<BestConfig> best; // one per method in GridSpec::methods order
  std::vector<std::string> warnings;
};

/// Number of configurations grid_search enumerates for `method`.
std::size_t grid_size(const GridSpec& grids, Method method);

/// Stratified k-fold cross-validation over the labeled items. The first
/// configuration reaching the highest mean known accuracy wins.
GridResult grid_search(const SimilarityGraph& g, const PriorLabels& labels,
                       const GridSpec& grids, const SolverConfig& base = {});

/// Thread count from SITREC_THREADS, else hardware concurrency (>= 1).
unsigned default_threads();

struct RobustnessRow {
  std::uint64_t seed = 0;
  double known[3] = {0, 0, 0};    // gss, l1, capped
  double unknown[3] = {0, 0, 0};
};

struct RobustnessSummary {
  std::vector<RobustnessRow> rows;
  double mean_known[3] = {0, 0, 0};
  double mean_unknown[3] = {0, 0, 0};
  bool l1_not_worse = false;      // mean known(L1) >= mean known(GSS)
  bool capped_not_worse = false;  // mean known(Capped) >= mean known(GSS)
};

/// Runs the three methods on `seeds` synthetic instances (seed, seed+1, ...)
/// derived from `spec` and compares mean known accuracy against GSS.
RobustnessSummary robustness_study(SyntheticSpec spec, int seeds, const SolverConfig& base,
                                   GraphKind graph, double u_labeled, double u_unlabeled,
                                   unsigned threads = 0);

}  // namespace sitrec::eval
