#include "sitrec/ssl_solvers.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace sitrec {

EdgeList upper_edges(const SparseMatrix& w) {
  EdgeList edges;
  for (Eigen::Index i = 0; i < w.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(w, i); it; ++it) {
      if (it.col() <= i || it.value() == 0.0) continue;
      edges.from.push_back(i);
      edges.to.push_back(it.col());
      edges.weight.push_back(it.value());
    }
  }
  return edges;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

// Every connected component of the active edges needs positive fitting mass,
// otherwise the system has a Laplacian null vector.
void check_components(const EdgeList& edges, std::span<const double> weights,
                      const Eigen::VectorXd& mass) {
  const auto n = static_cast<std::size_t>(mass.size());
  DisjointSets sets(n);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (weights[e] > 0.0) {
      sets.unite(static_cast<std::size_t>(edges.from[e]), static_cast<std::size_t>(edges.to[e]));
    }
  }
  std::vector<double> total(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) total[sets.find(i)] += mass(static_cast<Eigen::Index>(i));
  for (std::size_t i = 0; i < n; ++i) {
    if (sets.find(i) != i || total[i] > 0.0) continue;
    std::string members;
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (sets.find(j) != i) continue;
      if (count < 8) members += (count ? "," : "") + std::to_string(j);
      ++count;
    }
    if (count > 8) members += ",...";
    throw NumericalError("singular system: component {" + members + "} (" +
                         std::to_string(count) + " items) has zero fitting weight");
  }
}

Eigen::MatrixXd apply_system(const EdgeList& edges, std::span<const double> weights,
                             const Eigen::VectorXd& mass, const Eigen::MatrixXd& f) {
  Eigen::MatrixXd out = mass.asDiagonal() * f;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto i = edges.from[e];
    const auto j = edges.to[e];
    const Eigen::RowVectorXd diff = weights[e] * (f.row(i) - f.row(j));
    out.row(i) += diff;
    out.row(j) -= diff;
  }
  return out;
}

void check_dims(const SimilarityGraph& g, const Eigen::MatrixXd& y, const Eigen::VectorXd& u) {
  const auto n = static_cast<Eigen::Index>(g.size());
  if (y.rows() != n || u.size() != n || g.d_hat.size() != n) {
    throw ConfigError("graph, indicator and fitting weights disagree on the item count");
  }
  if (y.cols() < 2) throw ConfigError("indicator needs c+1 >= 2 columns");
}

double fitting_term(const Eigen::VectorXd& mass, const Eigen::MatrixXd& f,
                    const Eigen::MatrixXd& y) {
  return (mass.array() * (f - y).rowwise().squaredNorm().array()).sum();
}

std::vector<double> squared_edge_lengths(const EdgeList& edges, const Eigen::MatrixXd& f) {
  std::vector<double> out(edges.size());
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out[e] = (f.row(edges.from[e]) - f.row(edges.to[e])).squaredNorm();
  }
  return out;
}

SolveResult finish(Eigen::MatrixXd f, SolveResult result) {
  if (!f.allFinite()) throw NumericalError("soft label matrix has non-finite entries");
  result.assignments = assign_labels(f);
  result.f = std::move(f);
  return result;
}

}  // namespace

double system_residual(const EdgeList& edges, std::span<const double> edge_weights,
                       const Eigen::VectorXd& diag_mass, const Eigen::MatrixXd& f,
                       const Eigen::MatrixXd& y) {
  const Eigen::MatrixXd b = diag_mass.asDiagonal() * y;
  const double bnorm = b.norm();
  const double rnorm = (apply_system(edges, edge_weights, diag_mass, f) - b).norm();
  return bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

LinearSolve solve_weighted_system(const EdgeList& edges, std::span<const double> edge_weights,
                                  const Eigen::VectorXd& diag_mass, const Eigen::MatrixXd& y,
                                  std::size_t dense_limit) {
  const auto n = diag_mass.size();
  if (edge_weights.size() != edges.size()) throw ConfigError("edge weight count mismatch");
  check_components(edges, edge_weights, diag_mass);
  const Eigen::MatrixXd b = diag_mass.asDiagonal() * y;

  LinearSolve out;
  if (static_cast<std::size_t>(n) < dense_limit) {
    Eigen::MatrixXd a = diag_mass.asDiagonal();
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto i = edges.from[e];
      const auto j = edges.to[e];
      const double v = edge_weights[e];
      a(i, i) += v;
      a(j, j) += v;
      a(i, j) -= v;
      a(j, i) -= v;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("Cholesky factorization failed: system not positive definite");
    }
    out.f = llt.solve(b);
    out.f += llt.solve(b - a * out.f);
  } else {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(4 * edges.size() + static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) t.emplace_back(i, i, diag_mass(i));
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const auto i = edges.from[e];
      const auto j = edges.to[e];
      const double v = edge_weights[e];
      t.emplace_back(i, i, v);
      t.emplace_back(j, j, v);
      t.emplace_back(i, j, -v);
      t.emplace_back(j, i, -v);
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(1e-10);
    cg.setMaxIterations(std::max<Eigen::Index>(1000, 10 * n));
    cg.compute(a);
    out.f = cg.solve(b);
    if (cg.info() != Eigen::Success || !out.f.allFinite()) {
      Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(a);
      if (ldlt.info() != Eigen::Success) throw NumericalError("sparse factorization failed");
      out.f = ldlt.solve(b);
    }
  }
  out.residual = system_residual(edges, edge_weights, diag_mass, out.f, y);
  return out;
}

std::vector<int> assign_labels(const Eigen::MatrixXd& f) {
  std::vector<int> out(static_cast<std::size_t>(f.rows()), 0);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < f.cols(); ++j) {
      if (f(i, j) > f(i, best)) best = j;
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

double evaluate_objective(Method method, const SimilarityGraph& g, const Eigen::MatrixXd& f,
                          const Eigen::MatrixXd& y, const Eigen::VectorXd& u,
                          const SolverConfig& cfg) {
  check_dims(g, y, u);
  const auto edges = upper_edges(g.w_hat);
  double smooth = 0.0;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const double sq = (f.row(edges.from[e]) - f.row(edges.to[e])).squaredNorm();
    double phi = sq;
    if (method == Method::L1) {
      phi = std::sqrt(sq);
    } else if (method == Method::Capped) {
      phi = std::min(std::pow(sq, 0.5 * cfg.p_exp), cfg.theta);
    }
    smooth += edges.weight[e] * phi;
  }
  const Eigen::VectorXd mass = u.cwiseProduct(g.d_hat);
  return smooth + fitting_term(mass, f, y);
}

ConcaveWrapper identity_wrapper() {
  return {[](double x) { return x; }, [](double) { return 1.0; }};
}

ConcaveWrapper sqrt_wrapper(double eps) {
  return {[](double x) { return std::sqrt(x); },
          [eps](double x) { return 0.5 / std::max(std::sqrt(x), eps); }};
}

ConcaveWrapper capped_wrapper(double p_exp, double theta, double eps) {
  return {[p_exp, theta](double x) { return std::min(std::pow(x, 0.5 * p_exp), theta); },
          [p_exp, theta, eps](double x) {
            if (std::pow(x, 0.5 * p_exp) > theta) return 0.0;
            if (p_exp == 2.0) return 1.0;
            return 0.5 * p_exp * std::pow(std::max(std::sqrt(x), eps), p_exp - 2.0);
          }};
}

ReweightedResult solve_reweighted_generic(const ReweightedProblem& problem,
                                          const ConcaveWrapper& h, const ReweightInit& init,
                                          int max_iter, double tol,
                                          const ReweightObserver& observer) {
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  const auto m = problem.term_scale.size();

  auto multipliers_at = [&](const std::vector<double>& g) {
    std::vector<double> d(m);
    for (std::size_t i = 0; i < m; ++i) d[i] = problem.term_scale[i] * h.supergradient(g[i]);
    return d;
  };

  ReweightedResult result;
  std::vector<double> d;
  if (init.multipliers) {
    d = *init.multipliers;
  } else if (init.x) {
    d = multipliers_at(problem.terms(*init.x));
  } else {
    throw ConfigError("reweighted solve needs an initial point or initial multipliers");
  }
  if (d.size() != m) throw ConfigError("multiplier count does not match term count");

  for (int it = 1; it <= max_iter; ++it) {
    if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; })) {
      result.all_multipliers_zero = true;
    }
    result.x = problem.minimize_surrogate(d);
    result.multipliers = d;
    result.iterations = it;

    const auto g = problem.terms(result.x);
    double obj = problem.smooth(result.x);
    for (std::size_t i = 0; i < m; ++i) obj += problem.term_scale[i] * h.value(g[i]);
    if (!std::isfinite(obj)) {
      throw NumericalError("objective became non-finite at iteration " + std::to_string(it) +
                           " (check eps)");
    }
    result.objective_trace.push_back(obj);
    if (observer) observer(it, d, result.x, obj);

    if (it >= 2) {
      const double prev = result.objective_trace[result.objective_trace.size() - 2];
      if (std::abs(prev - obj) <= tol * std::max(std::abs(prev), std::numeric_limits<double>::min())) {
        result.converged = true;
        break;
      }
    }
    auto next = multipliers_at(g);
    if (next == d) {
      result.converged = true;
      break;
    }
    d = std::move(next);
  }
  return result;
}

namespace {

SolveResult run_reweighted(const SimilarityGraph& g, const Eigen::MatrixXd& y,
                           const Eigen::VectorXd& u, const SolverConfig& cfg,
                           const ConcaveWrapper& h, const IterationObserver& observer) {
  check_dims(g, y, u);
  const auto edges = upper_edges(g.w_hat);
  const Eigen::VectorXd mass = u.cwiseProduct(g.d_hat);

  SolveResult out;
  ReweightedProblem problem;
  problem.smooth = [&](const Eigen::MatrixXd& f) { return fitting_term(mass, f, y); };
  problem.terms = [&](const Eigen::MatrixXd& f) { return squared_edge_lengths(edges, f); };
  problem.term_scale = edges.weight;
  problem.minimize_surrogate = [&](std::span<const double> d) {
    auto solved = solve_weighted_system(edges, d, mass, y, cfg.dense_limit);
    out.residuals.push_back(solved.residual);
    return std::move(solved.f);
  };

  ReweightInit init;
  init.multipliers = edges.weight;  // s_ij = 1

  ReweightObserver forward;
  if (observer) {
    forward = [&](int it, std::span<const double> d, const Eigen::MatrixXd& f, double obj) {
      IterationRecord rec;
      rec.iteration = it;
      rec.edge_multipliers = d;
      rec.f = &f;
      rec.objective = obj;
      rec.residual = out.residuals.back();
      observer(rec);
    };
  }

  auto r = solve_reweighted_generic(problem, h, init, cfg.max_iter, cfg.tol, forward);
  out.objective_trace = std::move(r.objective_trace);
  out.iterations = r.iterations;
  out.converged = r.converged;
  out.all_edges_capped = r.all_multipliers_zero && !edges.weight.empty();
  return finish(std::move(r.x), std::move(out));
}

}  // namespace

SolveResult solve_gss(const SimilarityGraph& g, const Eigen::MatrixXd& y,
                      const Eigen::VectorXd& u, const SolverConfig& cfg,
                      const IterationObserver& observer) {
  check_dims(g, y, u);
  const auto edges = upper_edges(g.w_hat);
  const Eigen::VectorXd mass = u.cwiseProduct(g.d_hat);
  auto solved = solve_weighted_system(edges, edges.weight, mass, y, cfg.dense_limit);

  SolveResult out;
  out.residuals.push_back(solved.residual);
  out.objective_trace.push_back(evaluate_objective(Method::GSS, g, solved.f, y, u, cfg));
  out.iterations = 1;
  out.converged = true;
  if (observer) {
    IterationRecord rec;
    rec.iteration = 1;
    rec.edge_multipliers = edges.weight;
    rec.f = &solved.f;
    rec.objective = out.objective_trace.back();
    rec.residual = solved.residual;
    observer(rec);
  }
  return finish(std::move(solved.f), std::move(out));
}

SolveResult solve_l1(const SimilarityGraph& g, const Eigen::MatrixXd& y,
                     const Eigen::VectorXd& u, const SolverConfig& cfg,
                     const IterationObserver& observer) {
  SolverConfig c = cfg;
  c.method = Method::L1;
  c.validate();
  return run_reweighted(g, y, u, c, sqrt_wrapper(c.eps), observer);
}

SolveResult solve_capped(const SimilarityGraph& g, const Eigen::MatrixXd& y,
                         const Eigen::VectorXd& u, const SolverConfig& cfg,
                         const IterationObserver& observer) {
  SolverConfig c = cfg;
  c.method = Method::Capped;
  c.validate();
  return run_reweighted(g, y, u, c, capped_wrapper(c.p_exp, c.theta, c.eps), observer);
}

SolveResult solve(const SimilarityGraph& g, const Eigen::MatrixXd& y,
                  const Eigen::VectorXd& u, const SolverConfig& cfg,
                  const IterationObserver& observer) {
  switch (cfg.method) {
    case Method::GSS: return solve_gss(g, y, u, cfg, observer);
    case Method::L1: return solve_l1(g, y, u, cfg, observer);
    case Method::Capped: return solve_capped(g, y, u, cfg, observer);
  }
  throw ConfigError("unknown method");
}

}  // namespace sitrec
