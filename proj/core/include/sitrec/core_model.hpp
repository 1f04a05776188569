// Shared domain types for situation recognition by graph label propagation.
//
// Class ids are 0-based inside the library: known classes occupy 0..c-1 and
// the augmented "novel" class is c. Files and user-facing output use 1-based
// ids (see pipeline.hpp).
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sitrec {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Invalid configuration or arguments (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (CLI exit code 3).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Singular systems, non-finite objectives (CLI exit code 4).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GeoTime {
  double latitude = 0.0;   // degrees
  double longitude = 0.0;  // degrees
  long long timestamp = 0; // UTC epoch seconds
};

/// n items x p concept scores, plus optional per-item geo-time metadata.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;

  /// Throws DataError unless n >= 2, p >= 1 and every entry is finite.
  /// `meta` must be empty or hold one entry per item.
  explicit FeatureMatrix(Eigen::MatrixXd items,
                         std::vector<std::optional<GeoTime>> meta = {});

  std::size_t size() const { return static_cast<std::size_t>(items_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(items_.cols()); }
  const Eigen::MatrixXd& items() const { return items_; }
  Eigen::Ref<const Eigen::RowVectorXd> row(std::size_t i) const {
    return items_.row(static_cast<Eigen::Index>(i));
  }

  bool has_meta() const { return !meta_.empty(); }
  const std::vector<std::optional<GeoTime>>& meta() const { return meta_; }

 private:
  Eigen::MatrixXd items_;
  std::vector<std::optional<GeoTime>> meta_;
};

/// Known-class assignments for the labeled subset.
struct PriorLabels {
  std::map<std::size_t, int> assignments;  // item index -> class in [0, c)
  int num_classes = 0;                     // c
  double u_labeled = 100.0;
  double u_unlabeled = 0.01;

  int novel_class() const { return num_classes; }
  bool is_labeled(std::size_t i) const { return assignments.count(i) != 0; }

  /// Checks indices < n, classes in range, 1 <= m < n, u_labeled > 0,
  /// u_unlabeled >= 0. Throws ConfigError.
  void validate(std::size_t n) const;
};

/// Dense n x (c+1) indicator; unlabeled rows point at the novel column c.
Eigen::MatrixXd build_indicator(const PriorLabels& labels, std::size_t n);

/// Recovers assignments (and c) from an indicator built by build_indicator.
PriorLabels decode_indicator(const Eigen::MatrixXd& y);

/// Per-item fitting weight u_i (diagonal of U).
Eigen::VectorXd build_fitting_weights(const PriorLabels& labels, std::size_t n);

struct SimilarityGraph {
  SparseMatrix w;          // symmetric, zero diagonal, nonnegative
  SparseMatrix w_hat;      // w_ij / sqrt(d_i d_j)
  Eigen::VectorXd d;       // row sums of w
  Eigen::VectorXd d_hat;   // row sums of w_hat
  std::vector<std::size_t> degenerate_rows;  // CAN rows that fell back to 1/k

  std::size_t size() const { return static_cast<std::size_t>(w.rows()); }
};

enum class Method { GSS, L1, Capped };

std::string to_string(Method m);
/// Accepts gss|l1|capped (also ssl/ssc, case-insensitive). Throws ConfigError.
Method parse_method(const std::string& name);

enum class GraphKind { Gaussian, Can };

std::string to_string(GraphKind g);
GraphKind parse_graph_kind(const std::string& name);

struct SolverConfig {
  Method method = Method::Capped;
  double p_exp = 1.0;   // capped exponent, (0, 2]
  double theta = 1.0;   // capped threshold
  int k = 10;           // neighbors
  std::optional<std::vector<double>> sigma;  // Gaussian bandwidths
  int max_iter = 50;
  double tol = 1e-6;
  double eps = 1e-8;    // reweighting floor on ||f_i - f_j||
  std::size_t dense_limit = 500;  // dense Cholesky below this many items

  /// Throws ConfigError on out-of-range fields.
  void validate() const;
};

}  // namespace sitrec
