// Random problem instances shared by the unit and acceptance tests.
#pragma once

#include "sitrec/core_model.hpp"
#include "sitrec/graph_builder.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace testing_support {

struct Instance {
  sitrec::FeatureMatrix x;
  sitrec::SimilarityGraph graph;
  sitrec::PriorLabels labels;
  Eigen::MatrixXd y;
  Eigen::VectorXd u;
};

inline Eigen::MatrixXd random_points(std::size_t n, std::size_t dim, std::mt19937_64& rng,
                                     int clusters = 3) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, clusters - 1);
  Eigen::MatrixXd centres(clusters, static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < centres.size(); ++k) centres(k) = 4.0 * normal(rng);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const int c = pick(rng);
    for (Eigen::Index z = 0; z < x.cols(); ++z) x(i, z) = centres(c, z) + normal(rng);
  }
  return x;
}

/// n items, c known classes with at least one label each, `n_labeled` labels.
inline Instance random_instance(std::uint64_t seed, std::size_t n, int c, std::size_t n_labeled,
                                std::size_t k, sitrec::GraphKind kind = sitrec::GraphKind::Can,
                                double u_labeled = 100.0, double u_unlabeled = 0.01) {
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.x = sitrec::FeatureMatrix(random_points(n, 3, rng));
  inst.graph = sitrec::build_graph(inst.x, kind, k);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::uniform_int_distribution<int> cls(0, c - 1);
  inst.labels.num_classes = c;
  inst.labels.u_labeled = u_labeled;
  inst.labels.u_unlabeled = u_unlabeled;
  for (std::size_t m = 0; m < n_labeled; ++m) {
    inst.labels.assignments[order[m]] = m < static_cast<std::size_t>(c) ? static_cast<int>(m)
                                                                        : cls(rng);
  }
  inst.y = sitrec::build_indicator(inst.labels, n);
  inst.u = sitrec::build_fitting_weights(inst.labels, n);
  return inst;
}

/// Graph from an explicit dense symmetric weight matrix.
inline sitrec::SimilarityGraph graph_from_dense(const Eigen::MatrixXd& w) {
  sitrec::SimilarityGraph g;
  g.w = w.sparseView();
  auto norm = sitrec::normalize(g.w);
  g.w_hat = std::move(norm.w_hat);
  g.d = std::move(norm.d);
  g.d_hat = std::move(norm.d_hat);
  return g;
}

/// Two well separated blobs of `per_blob` items in 2-D, one label per blob
/// (items 0 and per_blob). Truth: first half class 0, second class 1.
inline Eigen::MatrixXd two_blobs(std::size_t per_blob, std::uint64_t seed, double gap = 10.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.5);
  Eigen::MatrixXd x(static_cast<Eigen::Index>(2 * per_blob), 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double cx = i < static_cast<Eigen::Index>(per_blob) ? 0.0 : gap;
    x(i, 0) = cx + normal(rng);
    x(i, 1) = normal(rng);
  }
  return x;
}

}  // namespace testing_support
