#include "sitrec/graph_builder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sitrec {

Eigen::MatrixXd pairwise_distances(const FeatureMatrix& x) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto& items = x.items();
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = (items.row(i) - items.row(j)).squaredNorm();
      e(i, j) = v;
      e(j, i) = v;
    }
  }
  return e;
}

namespace {

// Non-self indices of row i ordered by (distance, index).
std::vector<std::size_t> order_row(const Eigen::MatrixXd& dist, std::size_t i) {
  const auto n = static_cast<std::size_t>(dist.rows());
  std::vector<std::size_t> idx;
  idx.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) idx.push_back(j);
  }
  const auto r = static_cast<Eigen::Index>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return dist(r, static_cast<Eigen::Index>(a)) < dist(r, static_cast<Eigen::Index>(b));
  });
  return idx;
}

SparseMatrix from_triplets(std::size_t n, const std::vector<Eigen::Triplet<double>>& t) {
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

SimilarityGraph assemble(SparseMatrix w) {
  SimilarityGraph g;
  auto norm = normalize(w);
  g.w = std::move(w);
  g.w_hat = std::move(norm.w_hat);
  g.d = std::move(norm.d);
  g.d_hat = std::move(norm.d_hat);
  return g;
}

}  // namespace

std::vector<std::size_t> nearest_neighbors(const Eigen::MatrixXd& dist,
                                           std::size_t i, std::size_t k) {
  auto idx = order_row(dist, i);
  if (k > idx.size()) throw ConfigError("k exceeds the number of other items");
  idx.resize(k);
  return idx;
}

std::vector<double> median_bandwidths(const FeatureMatrix& x, std::size_t k) {
  const auto n = x.size();
  const auto p = x.dim();
  const auto dist = pairwise_distances(x);
  const auto& items = x.items();
  std::vector<std::vector<double>> diffs(p);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : nearest_neighbors(dist, i, k)) {
      for (std::size_t z = 0; z < p; ++z) {
        diffs[z].push_back(std::abs(items(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(z)) -
                                    items(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(z))));
      }
    }
  }
  std::vector<double> sigma(p, 1.0);
  for (std::size_t z = 0; z < p; ++z) {
    auto& v = diffs[z];
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double s = *mid;
    if (!(s > 0.0)) s = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    sigma[z] = s > 0.0 ? s : 1.0;
  }
  return sigma;
}

SimilarityGraph gaussian_graph(const FeatureMatrix& x, std::size_t k,
                               const std::vector<double>& sigma) {
  const auto n = x.size();
  if (k < 1 || k >= n) {
    throw ConfigError("gaussian graph needs 1 <= k < n (k=" + std::to_string(k) +
                      ", n=" + std::to_string(n) + ")");
  }
  std::vector<double> bw = sigma.empty() ? median_bandwidths(x, k) : sigma;
  if (bw.size() != x.dim()) throw ConfigError("sigma must have one bandwidth per feature");
  for (double s : bw) {
    if (!(s > 0.0)) throw ConfigError("Gaussian bandwidths must be positive");
  }
  Eigen::ArrayXd inv_sq(static_cast<Eigen::Index>(bw.size()));
  for (std::size_t z = 0; z < bw.size(); ++z) {
    inv_sq(static_cast<Eigen::Index>(z)) = 1.0 / (bw[z] * bw[z]);
  }

  const auto dist = pairwise_distances(x);
  std::vector<std::vector<char>> adjacent(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto j : nearest_neighbors(dist, i, k)) {
      adjacent[i][j] = 1;
      adjacent[j][i] = 1;
    }
  }
  const auto& items = x.items();
  std::vector<Eigen::Triplet<double>> t;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!adjacent[i][j]) continue;
      const auto diff = (items.row(static_cast<Eigen::Index>(i)) -
                         items.row(static_cast<Eigen::Index>(j))).array();
      const double w = std::exp(-(diff.square() * inv_sq.transpose()).sum());
      t.emplace_back(static_cast<int>(i), static_cast<int>(j), w);
    }
  }
  return assemble(from_triplets(n, t));
}

CanRow can_row_weights(std::span<const double> distances, std::size_t k,
                       std::span<const std::size_t> index) {
  if (k < 1 || k + 1 > distances.size()) {
    throw ConfigError("CAN weights need 1 <= k <= (number of other items) - 1");
  }
  std::vector<std::size_t> order(distances.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return distances[a] < distances[b];
  });

  const double next = distances[order[k]];
  double denom = 0.0;
  for (std::size_t m = 0; m < k; ++m) denom += next - distances[order[m]];

  CanRow row;
  row.neighbors.reserve(k);
  row.weights.reserve(k);
  row.degenerate = !(denom > 0.0);
  for (std::size_t m = 0; m < k; ++m) {
    const auto pos = order[m];
    row.neighbors.push_back(index.empty() ? pos : index[pos]);
    row.weights.push_back(row.degenerate ? 1.0 / static_cast<double>(k)
                                         : (next - distances[pos]) / denom);
  }
  return row;
}

SparseMatrix can_weights(const Eigen::MatrixXd& dist, std::size_t k,
                         std::vector<std::size_t>* degenerate_rows) {
  const auto n = static_cast<std::size_t>(dist.rows());
  if (dist.cols() != dist.rows()) throw ConfigError("distance matrix must be square");
  if (k < 1 || k + 2 > n) {
    throw ConfigError("CAN graph needs 1 <= k <= n-2 (k=" + std::to_string(k) +
                      ", n=" + std::to_string(n) + ")");
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(n * k);
  std::vector<double> row(n - 1);
  std::vector<std::size_t> index(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pos = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      row[pos] = dist(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      index[pos] = j;
      ++pos;
    }
    const auto r = can_row_weights(row, k, index);
    if (r.degenerate && degenerate_rows) degenerate_rows->push_back(i);
    for (std::size_t m = 0; m < k; ++m) {
      t.emplace_back(static_cast<int>(i), static_cast<int>(r.neighbors[m]), r.weights[m]);
    }
  }
  // Explicit zeros (k-th neighbor tied with the (k+1)-th) stay structural so
  // every row stores exactly k values.
  SparseMatrix w(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  w.reserve(Eigen::VectorXi::Constant(static_cast<Eigen::Index>(n), static_cast<int>(k)));
  for (const auto& e : t) w.insert(e.row(), e.col()) = e.value();
  w.makeCompressed();
  return w;
}

SimilarityGraph can_graph(const Eigen::MatrixXd& dist, std::size_t k) {
  std::vector<std::size_t> degenerate;
  SparseMatrix raw = can_weights(dist, k, &degenerate);
  SparseMatrix transposed = raw.transpose();
  SparseMatrix sym = 0.5 * (raw + transposed);
  sym.prune(0.0);
  auto g = assemble(std::move(sym));
  g.degenerate_rows = std::move(degenerate);
  return g;
}

Normalized normalize(const SparseMatrix& w) {
  const auto n = w.rows();
  Normalized out;
  out.d = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(w, i); it; ++it) out.d(i) += it.value();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(out.d(i) > 0.0)) {
      throw NumericalError("isolated vertex " + std::to_string(i) + " has zero degree");
    }
  }
  out.w_hat = w;
  out.d_hat = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(out.w_hat, i); it; ++it) {
      it.valueRef() = it.value() / std::sqrt(out.d(i) * out.d(it.col()));
      out.d_hat(i) += it.value();
    }
  }
  return out;
}

SparseMatrix laplacian(const SparseMatrix& w) {
  const auto n = w.rows();
  if (w.cols() != n) throw ConfigError("weight matrix must be square");
  double scale = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (SparseMatrix::InnerIterator it(w, i); it; ++it) {
      if (it.value() < 0.0) throw ConfigError("negative edge weight in Laplacian input");
      scale = std::max(scale, it.value());
    }
  }
  SparseMatrix wt = w.transpose();
  SparseMatrix asym = w - wt;
  asym.prune(1e-12 * std::max(scale, 1e-300), 1.0);
  if (asym.nonZeros() != 0) {
    throw ConfigError("Laplacian input is not symmetric");
  }
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(w.nonZeros() + n));
  for (Eigen::Index i = 0; i < n; ++i) {
    double deg = 0.0;
    for (SparseMatrix::InnerIterator it(w, i); it; ++it) {
      if (it.col() == i) continue;
      deg += it.value();
      t.emplace_back(static_cast<int>(i), static_cast<int>(it.col()), -it.value());
    }
    t.emplace_back(static_cast<int>(i), static_cast<int>(i), deg);
  }
  SparseMatrix l(n, n);
  l.setFromTriplets(t.begin(), t.end());
  l.makeCompressed();
  return l;
}

SimilarityGraph build_graph(const FeatureMatrix& x, GraphKind kind, std::size_t k,
                            const std::vector<double>& sigma) {
  if (kind == GraphKind::Gaussian) return gaussian_graph(x, k, sigma);
  return can_graph(pairwise_distances(x), k);
}

}  // namespace sitrec
