#include "sitrec/core_model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace sitrec {

FeatureMatrix::FeatureMatrix(Eigen::MatrixXd items,
                             std::vector<std::optional<GeoTime>> meta)
    : items_(std::move(items)), meta_(std::move(meta)) {
  if (items_.rows() < 2) {
    throw DataError("feature matrix needs at least 2 items, got " +
                    std::to_string(items_.rows()));
  }
  if (items_.cols() < 1) {
    throw DataError("feature matrix needs at least 1 feature");
  }
  for (Eigen::Index i = 0; i < items_.rows(); ++i) {
    for (Eigen::Index z = 0; z < items_.cols(); ++z) {
      if (!std::isfinite(items_(i, z))) {
        throw DataError("non-finite feature at item " + std::to_string(i) +
                        ", column " + std::to_string(z));
      }
    }
  }
  if (!meta_.empty() && meta_.size() != static_cast<std::size_t>(items_.rows())) {
    throw DataError("metadata count does not match item count");
  }
}

void PriorLabels::validate(std::size_t n) const {
  if (num_classes < 1) throw ConfigError("at least one known class is required");
  if (assignments.empty()) throw ConfigError("no labeled items");
  if (assignments.size() >= n) {
    throw ConfigError("every item is labeled; need at least one unlabeled item");
  }
  for (const auto& [item, cls] : assignments) {
    if (item >= n) {
      throw ConfigError("labeled item index " + std::to_string(item) +
                        " out of range (n=" + std::to_string(n) + ")");
    }
    if (cls < 0 || cls >= num_classes) {
      throw ConfigError("class id " + std::to_string(cls + 1) + " of item " +
                        std::to_string(item) + " out of range 1.." +
                        std::to_string(num_classes));
    }
  }
  if (!(u_labeled > 0.0) || !std::isfinite(u_labeled)) {
    throw ConfigError("u_labeled must be positive");
  }
  if (!(u_unlabeled >= 0.0) || !std::isfinite(u_unlabeled)) {
    throw ConfigError("u_unlabeled must be nonnegative");
  }
}

namespace {

void check_indices(const PriorLabels& labels, std::size_t n) {
  for (const auto& [item, cls] : labels.assignments) {
    if (item >= n) {
      throw ConfigError("labeled item index " + std::to_string(item) +
                        " out of range (n=" + std::to_string(n) + ")");
    }
    if (cls < 0 || cls >= labels.num_classes) {
      throw ConfigError("class id " + std::to_string(cls + 1) + " out of range");
    }
  }
}

}  // namespace

Eigen::MatrixXd build_indicator(const PriorLabels& labels, std::size_t n) {
  check_indices(labels, n);
  const auto c = labels.num_classes;
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), c + 1);
  for (std::size_t i = 0; i < n; ++i) {
    auto it = labels.assignments.find(i);
    y(static_cast<Eigen::Index>(i), it == labels.assignments.end() ? c : it->second) = 1.0;
  }
  return y;
}

PriorLabels decode_indicator(const Eigen::MatrixXd& y) {
  if (y.cols() < 2) throw ConfigError("indicator needs at least 2 columns");
  PriorLabels labels;
  labels.num_classes = static_cast<int>(y.cols()) - 1;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    Eigen::Index col = 0;
    y.row(i).maxCoeff(&col);
    if (y.row(i).sum() != 1.0 || y(i, col) != 1.0) {
      throw ConfigError("row " + std::to_string(i) + " is not a one-hot indicator");
    }
    if (col < labels.num_classes) {
      labels.assignments.emplace(static_cast<std::size_t>(i), static_cast<int>(col));
    }
  }
  return labels;
}

Eigen::VectorXd build_fitting_weights(const PriorLabels& labels, std::size_t n) {
  check_indices(labels, n);
  Eigen::VectorXd u = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n),
                                                labels.u_unlabeled);
  for (const auto& entry : labels.assignments) {
    u(static_cast<Eigen::Index>(entry.first)) = labels.u_labeled;
  }
  return u;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::GSS: return "gss";
    case Method::L1: return "l1";
    case Method::Capped: return "capped";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  const auto s = lower(name);
  if (s == "gss" || s == "l2") return Method::GSS;
  if (s == "l1" || s == "ssl") return Method::L1;
  if (s == "capped" || s == "ssc") return Method::Capped;
  throw ConfigError("unknown method '" + name + "' (expected gss, l1 or capped)");
}

std::string to_string(GraphKind g) {
  return g == GraphKind::Gaussian ? "gaussian" : "can";
}

GraphKind parse_graph_kind(const std::string& name) {
  const auto s = lower(name);
  if (s == "gaussian") return GraphKind::Gaussian;
  if (s == "can") return GraphKind::Can;
  throw ConfigError("unknown graph kind '" + name + "' (expected gaussian or can)");
}

void SolverConfig::validate() const {
  if (k < 1) throw ConfigError("k must be >= 1");
  if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (!(tol >= 0.0)) throw ConfigError("tol must be nonnegative");
  if (!(eps > 0.0)) throw ConfigError("eps must be positive");
  if (method == Method::Capped) {
    if (!(p_exp > 0.0 && p_exp <= 2.0)) throw ConfigError("p_exp must lie in (0, 2]");
    if (!(theta > 0.0)) throw ConfigError("theta must be positive");
  }
  if (sigma) {
    for (double s : *sigma) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw ConfigError("Gaussian bandwidths must be positive and finite");
      }
    }
  }
}

}  // namespace sitrec
