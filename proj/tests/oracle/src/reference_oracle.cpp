#include "oracle/reference_oracle.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using sitrec::Method;

namespace {

MatrixXd dense(const sitrec::SparseMatrix& m) { return MatrixXd(m); }

struct Edge {
  Eigen::Index i, j;
  double w;
};

std::vector<Edge> edges_of(const MatrixXd& w) {
  std::vector<Edge> out;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < w.cols(); ++j) {
      if (w(i, j) != 0.0) out.push_back({i, j, w(i, j)});
    }
  }
  return out;
}

double penalty(Method m, double r2, double p, double theta, double eps) {
  if (m == Method::GSS) return r2;
  const double r = std::sqrt(r2 + eps * eps);
  if (m == Method::L1) return r;
  return std::min(std::pow(r, p), theta);
}

// d penalty / d r2
double penalty_slope(Method m, double r2, double p, double theta, double eps) {
  if (m == Method::GSS) return 1.0;
  const double r = std::sqrt(r2 + eps * eps);
  if (m == Method::L1) return 0.5 / r;
  if (std::pow(r, p) >= theta) return 0.0;
  return 0.5 * p * std::pow(r, p - 2.0);
}

struct Problem {
  Method method;
  std::vector<Edge> edges;
  VectorXd mass;  // u_i d_hat_i
  MatrixXd y;
  double p, theta;

  double value(const MatrixXd& f, double eps) const {
    double s = 0.0;
    for (const auto& e : edges) {
      s += e.w * penalty(method, (f.row(e.i) - f.row(e.j)).squaredNorm(), p, theta, eps);
    }
    for (Eigen::Index i = 0; i < f.rows(); ++i) s += mass(i) * (f.row(i) - y.row(i)).squaredNorm();
    return s;
  }

  MatrixXd gradient(const MatrixXd& f, double eps) const {
    MatrixXd g = 2.0 * mass.asDiagonal() * (f - y);
    for (const auto& e : edges) {
      const Eigen::RowVectorXd diff = f.row(e.i) - f.row(e.j);
      const double c = 2.0 * e.w * penalty_slope(method, diff.squaredNorm(), p, theta, eps);
      g.row(e.i) += c * diff;
      g.row(e.j) -= c * diff;
    }
    return g;
  }
};

// Polak-Ribiere+ conjugate gradient with Armijo backtracking.
MatrixXd descend(const Problem& pb, MatrixXd f, double eps, int max_iter, double grad_tol) {
  double fx = pb.value(f, eps);
  MatrixXd g = pb.gradient(f, eps);
  MatrixXd d = -g;
  double step = 1.0;
  const Eigen::Index nvars = f.size();
  for (int it = 0; it < max_iter; ++it) {
    if (g.norm() <= grad_tol * (1.0 + std::abs(fx))) break;
    double slope = (g.array() * d.array()).sum();
    if (slope >= 0.0 || it % nvars == 0) {
      d = -g;
      slope = -g.squaredNorm();
    }
    double a = std::min(1.0, 4.0 * step);
    MatrixXd trial;
    double ft = 0.0;
    bool accepted = false;
    while (a > 1e-20) {
      trial = f + a * d;
      ft = pb.value(trial, eps);
      if (ft <= fx + 1e-4 * a * slope) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) break;
    step = a;
    const MatrixXd g_new = pb.gradient(trial, eps);
    const double beta =
        std::max(0.0, ((g_new - g).array() * g_new.array()).sum() / g.squaredNorm());
    d = -g_new + beta * d;
    g = g_new;
    const bool stalled = fx - ft <= 1e-16 * (1.0 + std::abs(fx));
    f = std::move(trial);
    fx = ft;
    if (stalled && beta == 0.0) break;
  }
  return f;
}

}  // namespace

DenseSolve dense_fixed_point(const MatrixXd& w_bar, const VectorXd& d_hat, const MatrixXd& y,
                             const VectorXd& u) {
  const Eigen::Index n = w_bar.rows();
  if (n > 200) throw std::invalid_argument("dense oracle limited to 200 items");
  const VectorXd mass = u.cwiseProduct(d_hat);
  MatrixXd a = -w_bar;
  a.diagonal() = w_bar.rowwise().sum() - w_bar.diagonal() + mass;
  Eigen::JacobiSVD<MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  const double cond = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1)
                                      : std::numeric_limits<double>::infinity();
  Eigen::FullPivLU<MatrixXd> lu(a);
  if (lu.rank() < n || !(cond < 1e14)) {
    throw SingularSystem("singular system, condition estimate " + std::to_string(cond), cond);
  }
  return {lu.solve(mass.asDiagonal() * y), cond};
}

DenseSolve dense_fixed_point(const sitrec::SimilarityGraph& g, const MatrixXd& y,
                             const VectorXd& u) {
  return dense_fixed_point(dense(g.w_hat), g.d_hat, y, u);
}

double objective(Method method, const MatrixXd& w_hat, const VectorXd& d_hat, const MatrixXd& f,
                 const MatrixXd& y, const VectorXd& u, double p_exp, double theta,
                 double smooth_eps) {
  const Problem pb{method, edges_of(w_hat), u.cwiseProduct(d_hat), y, p_exp, theta};
  return pb.value(f, smooth_eps);
}

DescentResult brute_force_objective_min(Method method, const sitrec::SimilarityGraph& g,
                                        const MatrixXd& y, const VectorXd& u,
                                        const sitrec::SolverConfig& cfg,
                                        const DescentOptions& opts) {
  if (y.size() > 60) throw std::invalid_argument("brute force limited to 60 free variables");
  const MatrixXd w_hat = dense(g.w_hat);
  const Problem pb{method, edges_of(w_hat), u.cwiseProduct(g.d_hat), y, cfg.p_exp, cfg.theta};

  std::vector<MatrixXd> starts{y};
  try {
    starts.push_back(dense_fixed_point(w_hat, g.d_hat, y, u).f);
  } catch (const SingularSystem&) {
  }
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int r = 0; r < opts.restarts; ++r) {
    MatrixXd s(y.rows(), y.cols());
    for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = unit(rng);
    starts.push_back(std::move(s));
  }

  DescentResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (auto f : starts) {
    if (method == Method::GSS) {
      f = descend(pb, std::move(f), 0.0, opts.max_iter, opts.grad_tol);
    } else {
      // Continuation on the smoothing radius keeps early stages well conditioned.
      for (double eps : {1e-2, 1e-4, opts.smooth_eps}) {
        f = descend(pb, std::move(f), std::max(eps, opts.smooth_eps), opts.max_iter / 3,
                    opts.grad_tol);
      }
    }
    const double v = pb.value(f, 0.0);
    if (v < best.objective) best = {f, v};
  }
  return best;
}

MatrixXd absorption_oracle(const MatrixXd& w, const std::map<std::size_t, int>& labeled,
                           int num_classes) {
  const auto n = static_cast<std::size_t>(w.rows());
  if (n > 12) throw std::invalid_argument("absorption oracle limited to 12 items");

  std::vector<std::size_t> comp(n);
  std::iota(comp.begin(), comp.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t a) {
    return comp[a] == a ? a : comp[a] = find(comp[a]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (w(i, j) > 0.0) comp[find(i)] = find(j);
    }
  }
  std::vector<bool> has_label(n, false);
  for (const auto& [i, c] : labeled) has_label[find(i)] = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (!has_label[find(i)]) {
      throw std::invalid_argument("item " + std::to_string(i) +
                                  " lies in a component without labeled items");
    }
  }

  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i) {
    if (!labeled.count(i)) free.push_back(i);
  }
  MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(n), num_classes);
  for (const auto& [i, c] : labeled) out(static_cast<Eigen::Index>(i), c) = 1.0;
  if (free.empty()) return out;

  const auto m = static_cast<Eigen::Index>(free.size());
  MatrixXd iq = MatrixXd::Identity(m, m);  // I - Q
  MatrixXd r = MatrixXd::Zero(m, num_classes);
  for (Eigen::Index a = 0; a < m; ++a) {
    const auto i = static_cast<Eigen::Index>(free[static_cast<std::size_t>(a)]);
    const double deg = w.row(i).sum();
    for (Eigen::Index b = 0; b < m; ++b) {
      iq(a, b) -= w(i, static_cast<Eigen::Index>(free[static_cast<std::size_t>(b)])) / deg;
    }
    for (const auto& [j, c] : labeled) r(a, c) += w(i, static_cast<Eigen::Index>(j)) / deg;
  }
  const MatrixXd fundamental = iq.fullPivLu().inverse();
  const MatrixXd b = fundamental * r;
  for (Eigen::Index a = 0; a < m; ++a) {
    out.row(static_cast<Eigen::Index>(free[static_cast<std::size_t>(a)])) = b.row(a);
  }
  return out;
}

VectorXd project_simplex(const VectorXd& v) {
  std::vector<double> s(v.data(), v.data() + v.size());
  std::sort(s.begin(), s.end(), std::greater<>());
  double cum = 0.0, tau = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    cum += s[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (s[k] - t > 0.0) tau = t;
  }
  return (v.array() - tau).max(0.0).matrix();
}

VectorXd simplex_qp(const VectorXd& e, double lambda, int max_iter) {
  if (!(lambda > 0.0)) throw std::invalid_argument("simplex_qp needs lambda > 0");
  const double step = 1.0 / (2.0 * lambda);
  VectorXd s = VectorXd::Constant(e.size(), 1.0 / static_cast<double>(e.size()));
  for (int it = 0; it < max_iter; ++it) {
    const VectorXd next = project_simplex(s - step * (e + 2.0 * lambda * s));
    const double change = (next - s).lpNorm<Eigen::Infinity>();
    s = next;
    if (change < 1e-15) break;
  }
  return s;
}

}  // namespace oracle
