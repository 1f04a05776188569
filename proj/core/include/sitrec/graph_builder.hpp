// Similarity graph construction: Gaussian k-NN weights and closed-form
// adaptive-neighbor (CAN) weights, normalization and Laplacians.
#pragma once

#include "sitrec/core_model.hpp"

#include <span>
#include <vector>

namespace sitrec {

/// e_ij = ||x_i - x_j||^2, dense n x n.
Eigen::MatrixXd pairwise_distances(const FeatureMatrix& x);

/// Indices of the k nearest non-self items of row i of `dist`; ties go to the
/// lower index. Result is ordered by (distance, index).
std::vector<std::size_t> nearest_neighbors(const Eigen::MatrixXd& dist,
                                           std::size_t i, std::size_t k);

/// Per-feature median of |x_iz - x_jz| over k-NN pairs. Features whose median
/// is zero fall back to the mean absolute difference, then to 1.
std::vector<double> median_bandwidths(const FeatureMatrix& x, std::size_t k);

/// w_ij = exp(-sum_z (x_iz - x_jz)^2 / sigma_z^2) if j in N_i or i in N_j.
/// Uses median_bandwidths when sigma is empty.
SimilarityGraph gaussian_graph(const FeatureMatrix& x, std::size_t k,
                               const std::vector<double>& sigma = {});

struct CanRow {
  std::vector<std::size_t> neighbors;  // k nearest, ascending distance
  std::vector<double> weights;         // same order, sums to 1
  bool degenerate = false;             // fell back to uniform 1/k
};

/// Simplex-constrained adaptive-neighbor weights for one row. `distances`
/// excludes the row's own item and `index` maps positions to item ids
/// (identity when empty). Requires 1 <= k <= distances.size() - 1.
CanRow can_row_weights(std::span<const double> distances, std::size_t k,
                       std::span<const std::size_t> index = {});

/// Row-stochastic CAN weights before symmetrization: row i has exactly k
/// stored entries summing to 1.
SparseMatrix can_weights(const Eigen::MatrixXd& dist, std::size_t k,
                         std::vector<std::size_t>* degenerate_rows = nullptr);

/// (W + W^T)/2 of can_weights, normalized. Requires 1 <= k <= n-2.
SimilarityGraph can_graph(const Eigen::MatrixXd& dist, std::size_t k);

struct Normalized {
  SparseMatrix w_hat;
  Eigen::VectorXd d;
  Eigen::VectorXd d_hat;
};

/// Symmetric degree normalization. Throws NumericalError naming the first
/// isolated vertex.
Normalized normalize(const SparseMatrix& w);

/// L = D - W. Throws ConfigError on asymmetric or negative input.
SparseMatrix laplacian(const SparseMatrix& w);

/// Builds the graph kind selected by `kind` with neighbor count k.
SimilarityGraph build_graph(const FeatureMatrix& x, GraphKind kind, std::size_t k,
                            const std::vector<double>& sigma = {});

}  // namespace sitrec
