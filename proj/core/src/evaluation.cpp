#include "sitrec/evaluation.hpp"

#include "parallel.hpp"
#include "sitrec/graph_builder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <thread>

namespace sitrec::eval {

void SyntheticSpec::validate() const {
  if (n_known_classes < 1) throw ConfigError("need at least one known class");
  if (points_per_class < 1 || novel_points < 0 || noise_points < 0) {
    throw ConfigError("point counts must be nonnegative (and >= 1 per known class)");
  }
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (!(separation > 0.0)) throw ConfigError("separation must be positive");
  if (!(spread >= 0.0)) throw ConfigError("spread must be nonnegative");
  if (!(outlier_fraction >= 0.0 && outlier_fraction <= 1.0)) {
    throw ConfigError("outlier_fraction must lie in [0, 1]");
  }
  if (!(label_fraction > 0.0 && label_fraction <= 1.0)) {
    throw ConfigError("label_fraction must lie in (0, 1]");
  }
  const int blobs = n_known_classes + (novel_points > 0 ? 1 : 0);
  if (dim < blobs) {
    throw ConfigError("dim must be >= number of blobs (" + std::to_string(blobs) + ")");
  }
}

SyntheticData generate(const SyntheticSpec& spec) {
  spec.validate();
  const int c = spec.n_known_classes;
  const auto dim = static_cast<Eigen::Index>(spec.dim);
  const int n = c * spec.points_per_class + spec.novel_points + spec.noise_points;
  const double offset = spec.separation / std::sqrt(2.0);

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd items(n, dim);
  GroundTruth truth;
  truth.num_classes = c;
  truth.classes.reserve(static_cast<std::size_t>(n));

  Eigen::Index row = 0;
  auto add_blob = [&](int blob, int count, int cls) {
    for (int i = 0; i < count; ++i, ++row) {
      for (Eigen::Index z = 0; z < dim; ++z) {
        items(row, z) = (z == blob ? offset : 0.0) + spec.spread * gauss(rng);
      }
      truth.classes.push_back(cls);
    }
  };
  for (int b = 0; b < c; ++b) add_blob(b, spec.points_per_class, b);
  add_blob(c, spec.novel_points, c);

  const Eigen::Index blob_rows = row;
  const Eigen::RowVectorXd lo = items.topRows(blob_rows).colwise().minCoeff();
  const Eigen::RowVectorXd hi = items.topRows(blob_rows).colwise().maxCoeff();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < spec.noise_points; ++i, ++row) {
    for (Eigen::Index z = 0; z < dim; ++z) items(row, z) = lo(z) + (hi(z) - lo(z)) * unit(rng);
    truth.classes.push_back(kNoise);
  }

  PriorLabels labels;
  labels.num_classes = c;
  for (int b = 0; b < c; ++b) {
    std::vector<std::size_t> members(static_cast<std::size_t>(spec.points_per_class));
    for (std::size_t i = 0; i < members.size(); ++i) {
      members[i] = static_cast<std::size_t>(b * spec.points_per_class) + i;
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto take = std::clamp<long>(std::lround(spec.label_fraction * spec.points_per_class),
                                       1L, static_cast<long>(members.size()));
    for (long i = 0; i < take; ++i) labels.assignments.emplace(members[static_cast<std::size_t>(i)], b);
  }

  if (spec.outlier_fraction > 0.0 && blob_rows > 0) {
    std::mt19937_64 out_rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
    std::normal_distribution<double> out_gauss(0.0, 1.0);
    std::vector<std::size_t> candidates(static_cast<std::size_t>(blob_rows));
    for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i] = i;
    std::shuffle(candidates.begin(), candidates.end(), out_rng);
    const auto q = static_cast<std::size_t>(
        std::lround(spec.outlier_fraction * static_cast<double>(blob_rows)));
    const int blobs = c + (spec.novel_points > 0 ? 1 : 0);
    Eigen::RowVectorXd centre = Eigen::RowVectorXd::Zero(dim);
    for (int b = 0; b < blobs; ++b) centre(b) += offset / blobs;
    for (std::size_t i = 0; i < q; ++i) {
      Eigen::RowVectorXd dir(dim);
      for (Eigen::Index z = 0; z < dim; ++z) dir(z) = out_gauss(out_rng);
      dir.normalize();
      items.row(static_cast<Eigen::Index>(candidates[i])) =
          centre + spec.outlier_radius * spec.separation * dir;
      truth.outliers.push_back(candidates[i]);
    }
    std::sort(truth.outliers.begin(), truth.outliers.end());
  }

  return {FeatureMatrix(std::move(items)), std::move(truth), std::move(labels)};
}

EvalReport evaluate(std::span<const int> assignments, const GroundTruth& truth,
                    const SolverConfig& params) {
  if (assignments.size() != truth.classes.size()) {
    throw ConfigError("assignment count does not match ground truth");
  }
  const int c = truth.num_classes;
  EvalReport report;
  report.params = params;
  report.confusion = Eigen::MatrixXi::Zero(c + 1, c + 1);
  report.noise_row.assign(static_cast<std::size_t>(c + 1), 0);
  std::size_t known_ok = 0;
  std::size_t unknown_ok = 0;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    const int a = assignments[i];
    const int t = truth.classes[i];
    if (a < 0 || a > c) throw ConfigError("assigned class out of range at item " + std::to_string(i));
    if (t == kNoise) {
      ++report.noise_row[static_cast<std::size_t>(a)];
      continue;
    }
    if (t < 0 || t > c) throw ConfigError("true class out of range at item " + std::to_string(i));
    ++report.confusion(t, a);
    if (t < c) {
      ++report.n_known;
      known_ok += (a == t);
    } else {
      ++report.n_unknown;
      unknown_ok += (a == c);
    }
  }
  if (report.n_known) report.acc_known = 100.0 * static_cast<double>(known_ok) / static_cast<double>(report.n_known);
  if (report.n_unknown) report.acc_unknown = 100.0 * static_cast<double>(unknown_ok) / static_cast<double>(report.n_unknown);
  return report;
}

EvalReport evaluate(const SolveResult& result, const GroundTruth& truth,
                    const SolverConfig& params) {
  return evaluate(std::span<const int>(result.assignments), truth, params);
}

std::vector<double> default_u_grid() { return {1, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100}; }
std::vector<double> default_theta_grid() { return {0.01, 0.1, 1, 10}; }
std::vector<double> default_p_grid() { return {0.5, 0.7, 1, 1.5, 1.7, 2}; }

unsigned default_threads() {
  if (const char* env = std::getenv("SITREC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t grid_size(const GridSpec& grids, Method method) {
  const auto nu = grids.u_labeled.size();
  return method == Method::Capped ? nu * grids.theta.size() * grids.p_exp.size() : nu;
}

GridResult grid_search(const SimilarityGraph& g, const PriorLabels& labels,
                       const GridSpec& grids, const SolverConfig& base) {
  const auto n = g.size();
  labels.validate(n);
  if (grids.methods.empty() || grids.u_labeled.empty()) throw ConfigError("empty parameter grid");
  if (grids.folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  for (auto m : grids.methods) {
    if (m == Method::Capped && (grids.theta.empty() || grids.p_exp.empty())) {
      throw ConfigError("capped grid needs theta and p values");
    }
  }

  GridResult out;
  std::vector<GridRow> rows;
  for (auto m : grids.methods) {
    for (double u : grids.u_labeled) {
      if (m != Method::Capped) {
        rows.push_back({m, u, base.theta, base.p_exp, 0.0, 0});
        continue;
      }
      for (double th : grids.theta) {
        for (double p : grids.p_exp) rows.push_back({m, u, th, p, 0.0, 0});
      }
    }
  }

  // Stratified folds over labeled items.
  const int c = labels.num_classes;
  std::vector<int> fold_of(n, -1);
  std::vector<int> class_size(static_cast<std::size_t>(c), 0);
  std::mt19937_64 rng(grids.seed);
  for (int cls = 0; cls < c; ++cls) {
    std::vector<std::size_t> members;
    for (const auto& [item, k] : labels.assignments) {
      if (k == cls) members.push_back(item);
    }
    class_size[static_cast<std::size_t>(cls)] = static_cast<int>(members.size());
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < members.size(); ++i) {
      fold_of[members[i]] = static_cast<int>(i % static_cast<std::size_t>(grids.folds));
    }
  }

  struct Fold {
    PriorLabels train;
    std::vector<std::size_t> held_out;
    bool usable = true;
  };
  std::vector<Fold> folds(static_cast<std::size_t>(grids.folds));
  for (int f = 0; f < grids.folds; ++f) {
    auto& fold = folds[static_cast<std::size_t>(f)];
    fold.train.num_classes = c;
    fold.train.u_unlabeled = grids.u_unlabeled;
    std::vector<int> remaining(static_cast<std::size_t>(c), 0);
    for (const auto& [item, k] : labels.assignments) {
      if (fold_of[item] == f) {
        fold.held_out.push_back(item);
      } else {
        fold.train.assignments.emplace(item, k);
        ++remaining[static_cast<std::size_t>(k)];
      }
    }
    for (int cls = 0; cls < c; ++cls) {
      if (class_size[static_cast<std::size_t>(cls)] > 0 && remaining[static_cast<std::size_t>(cls)] == 0) {
        fold.usable = false;
        out.warnings.push_back("fold " + std::to_string(f + 1) + " skipped: class " +
                               std::to_string(cls + 1) + " has no training labels");
        break;
      }
    }
    if (fold.usable && fold.held_out.empty()) {
      fold.usable = false;
      out.warnings.push_back("fold " + std::to_string(f + 1) + " skipped: no held-out items");
    }
  }

  const auto nf = folds.size();
  std::vector<double> acc(rows.size() * nf, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> failures(rows.size() * nf);
  const unsigned threads = grids.threads ? grids.threads : default_threads();

  detail::parallel_for(rows.size() * nf, threads, [&](std::size_t cell) {
    const auto& row = rows[cell / nf];
    const auto& fold = folds[cell % nf];
    if (!fold.usable) return;
    PriorLabels train = fold.train;
    train.u_labeled = row.u_labeled;
    SolverConfig cfg = base;
    cfg.method = row.method;
    cfg.theta = row.theta;
    cfg.p_exp = row.p_exp;
    try {
      const auto y = build_indicator(train, n);
      const auto u = build_fitting_weights(train, n);
      const auto res = solve(g, y, u, cfg);
      std::size_t ok = 0;
      for (auto item : fold.held_out) ok += (res.assignments[item] == labels.assignments.at(item));
      acc[cell] = 100.0 * static_cast<double>(ok) / static_cast<double>(fold.held_out.size());
    } catch (const NumericalError& e) {
      failures[cell] = e.what();
    }
  });

  for (std::size_t r = 0; r < rows.size(); ++r) {
    double sum = 0.0;
    int used = 0;
    for (std::size_t f = 0; f < nf; ++f) {
      const double a = acc[r * nf + f];
      if (!failures[r * nf + f].empty()) {
        out.warnings.push_back(to_string(rows[r].method) + " config " + std::to_string(r) +
                               " fold " + std::to_string(f + 1) + " failed: " + failures[r * nf + f]);
      }
      if (std::isnan(a)) continue;
      sum += a;
      ++used;
    }
    rows[r].folds_used = used;
    rows[r].mean_acc = used ? sum / used : 0.0;
  }

  for (auto m : grids.methods) {
    const GridRow* best = nullptr;
    for (const auto& row : rows) {
      if (row.method != m || row.folds_used == 0) continue;
      if (!best || row.mean_acc > best->mean_acc) best = &row;
    }
    BestConfig b;
    b.config = base;
    b.config.method = m;
    if (best) {
      b.config.theta = best->theta;
      b.config.p_exp = best->p_exp;
      b.u_labeled = best->u_labeled;
      b.mean_acc = best->mean_acc;
    } else {
      out.warnings.push_back("no usable fold for method " + to_string(m));
    }
    out.best.push_back(b);
  }
  out.table = std::move(rows);
  return out;
}

RobustnessSummary robustness_study(SyntheticSpec spec, int seeds, const SolverConfig& base,
                                   GraphKind graph, double u_labeled, double u_unlabeled,
                                   unsigned threads) {
  if (seeds < 1) throw ConfigError("robustness study needs at least one seed");
  RobustnessSummary out;
  out.rows.resize(static_cast<std::size_t>(seeds));
  const std::uint64_t first = spec.seed;
  constexpr Method methods[3] = {Method::GSS, Method::L1, Method::Capped};

  detail::parallel_for(out.rows.size(), threads ? threads : default_threads(), [&](std::size_t s) {
    SyntheticSpec local = spec;
    local.seed = first + s;
    auto data = generate(local);
    data.labels.u_labeled = u_labeled;
    data.labels.u_unlabeled = u_unlabeled;
    const auto g = build_graph(data.x, graph, static_cast<std::size_t>(base.k),
                               base.sigma.value_or(std::vector<double>{}));
    const auto y = build_indicator(data.labels, data.x.size());
    const auto u = build_fitting_weights(data.labels, data.x.size());
    auto& row = out.rows[s];
    row.seed = local.seed;
    for (int m = 0; m < 3; ++m) {
      SolverConfig cfg = base;
      cfg.method = methods[m];
      const auto rep = evaluate(solve(g, y, u, cfg), data.truth, cfg);
      row.known[m] = rep.acc_known;
      row.unknown[m] = rep.acc_unknown;
    }
  });

  for (const auto& row : out.rows) {
    for (int m = 0; m < 3; ++m) {
      out.mean_known[m] += row.known[m] / seeds;
      out.mean_unknown[m] += row.unknown[m] / seeds;
    }
  }
  out.l1_not_worse = out.mean_known[1] >= out.mean_known[0];
  out.capped_not_worse = out.mean_known[2] >= out.mean_known[0];
  return out;
}

}  // namespace sitrec::eval
