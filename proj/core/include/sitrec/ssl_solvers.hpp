// Label propagation solvers with a novel-class column.
//
// All three objectives share the fitting term sum_i u_i d^_i ||f_i - y_i||^2
// and differ in the smoothness penalty phi(||f_i - f_j||) summed over the
// undirected edges of the normalized graph (each edge counted once):
//
//   GSS     phi(r) = r^2
//   L1      phi(r) = r
//   Capped  phi(r) = min(r^p, theta)
//
// L1 and Capped are minimized by reweighting: a concave wrapper h of the
// squared edge distance is linearized at the current iterate, and the
// resulting weighted least-squares problem (L_{w~} + U D^) F = U D^ Y is solved.
#pragma once

#include "sitrec/core_model.hpp"

#include <functional>
#include <span>
#include <vector>

namespace sitrec {

/// Upper-triangle edges of a symmetric sparse matrix.
struct EdgeList {
  std::vector<Eigen::Index> from;
  std::vector<Eigen::Index> to;
  std::vector<double> weight;

  std::size_t size() const { return weight.size(); }
};

EdgeList upper_edges(const SparseMatrix& w);

struct SolveResult {
  Eigen::MatrixXd f;
  std::vector<int> assignments;         // 0-based; c is the novel class
  std::vector<double> objective_trace;  // one value per linear solve
  std::vector<double> residuals;        // relative residual of each solve
  int iterations = 0;
  bool converged = false;
  bool all_edges_capped = false;        // some iterate had every s_ij = 0
};

/// State handed to an observer after each linear solve.
struct IterationRecord {
  int iteration = 0;                        // 1-based
  std::span<const double> edge_multipliers; // w~ per upper edge used in the solve
  const Eigen::MatrixXd* f = nullptr;       // the solution of that system
  double objective = 0.0;
  double residual = 0.0;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Result of one solve of (L_{w~} + diag(u d^)) F = diag(u d^) Y.
struct LinearSolve {
  Eigen::MatrixXd f;
  double residual = 0.0;
};

/// ||A F - B||_F / ||B||_F for the reweighted system with per-edge weights
/// `edge_weights` aligned with `edges`.
double system_residual(const EdgeList& edges, std::span<const double> edge_weights,
                       const Eigen::VectorXd& diag_mass, const Eigen::MatrixXd& f,
                       const Eigen::MatrixXd& y);

/// Solves the reweighted system. Dense Cholesky with one refinement step when
/// n < dense_limit, Jacobi-preconditioned conjugate gradient otherwise.
/// Throws NumericalError when a connected component of the active edges
/// carries no fitting mass.
LinearSolve solve_weighted_system(const EdgeList& edges, std::span<const double> edge_weights,
                                  const Eigen::VectorXd& diag_mass, const Eigen::MatrixXd& y,
                                  std::size_t dense_limit = 500);

/// Row-wise argmax, ties to the lowest column.
std::vector<int> assign_labels(const Eigen::MatrixXd& f);

/// Objective of `method` at F (pure).
double evaluate_objective(Method method, const SimilarityGraph& g, const Eigen::MatrixXd& f,
                          const Eigen::MatrixXd& y, const Eigen::VectorXd& u,
                          const SolverConfig& cfg = {});

SolveResult solve_gss(const SimilarityGraph& g, const Eigen::MatrixXd& y,
                      const Eigen::VectorXd& u, const SolverConfig& cfg = {},
                      const IterationObserver& observer = {});

SolveResult solve_l1(const SimilarityGraph& g, const Eigen::MatrixXd& y,
                     const Eigen::VectorXd& u, const SolverConfig& cfg,
                     const IterationObserver& observer = {});

SolveResult solve_capped(const SimilarityGraph& g, const Eigen::MatrixXd& y,
                         const Eigen::VectorXd& u, const SolverConfig& cfg,
                         const IterationObserver& observer = {});

/// Dispatches on cfg.method.
SolveResult solve(const SimilarityGraph& g, const Eigen::MatrixXd& y,
                  const Eigen::VectorXd& u, const SolverConfig& cfg,
                  const IterationObserver& observer = {});

// ---------------------------------------------------------------------------
// Generic reweighted minimization of  f(x) + sum_i a_i h(g_i(x))  with h
// concave on [0, inf). Each step sets D_i = a_i h'(g_i(x)) and minimizes the
// surrogate f(x) + sum_i D_i g_i(x).

struct ConcaveWrapper {
  std::function<double(double)> value;
  std::function<double(double)> supergradient;
};

/// h(x) = x.
ConcaveWrapper identity_wrapper();
/// h(x) = sqrt(x); h'(x) = 1 / (2 max(sqrt(x), eps)).
ConcaveWrapper sqrt_wrapper(double eps);
/// h(x) = min(x^(p/2), theta); h'(x) = (p/2) max(sqrt(x), eps)^(p-2) while
/// x^(p/2) <= theta, 0 beyond.
ConcaveWrapper capped_wrapper(double p_exp, double theta, double eps);

struct ReweightedProblem {
  std::function<double(const Eigen::MatrixXd&)> smooth;
  /// g_i(x) for every term.
  std::function<std::vector<double>(const Eigen::MatrixXd&)> terms;
  /// a_i, the nonnegative scale of each wrapped term.
  std::vector<double> term_scale;
  /// argmin_x f(x) + sum_i D_i g_i(x).
  std::function<Eigen::MatrixXd(std::span<const double> multipliers)> minimize_surrogate;
};

struct ReweightInit {
  std::optional<Eigen::MatrixXd> x;               // compute D from x, or
  std::optional<std::vector<double>> multipliers; // start from given D
};

struct ReweightedResult {
  Eigen::MatrixXd x;
  std::vector<double> objective_trace;
  std::vector<double> multipliers;  // D used for the last surrogate solve
  int iterations = 0;
  bool converged = false;
  bool all_multipliers_zero = false;
};

/// Called after every surrogate solve with (iteration, D, x, objective).
using ReweightObserver = std::function<void(int, std::span<const double>,
                                            const Eigen::MatrixXd&, double)>;

/// Stops when the relative objective change drops below tol, when D repeats
/// exactly, or after max_iter surrogate solves.
ReweightedResult solve_reweighted_generic(const ReweightedProblem& problem,
                                          const ConcaveWrapper& h, const ReweightInit& init,
                                          int max_iter, double tol,
                                          const ReweightObserver& observer = {});

}  // namespace sitrec
