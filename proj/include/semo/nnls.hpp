// Copyright 2026 The SEMO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SEMO__NNLS_HPP_
#define SEMO__NNLS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "semo/error.hpp"

namespace semo {

struct NnlsResult {
  Eigen::VectorXd coef;   ///< β ≥ 0
  double objective = 0.0; ///< Σ w_i (y_i − X_i β)²
  std::size_t iterations = 0;
};

/// Σ w_i (y_i − X_i β)², evaluated from the residuals.
inline double weighted_objective(const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
                                 const Eigen::VectorXd &w, const Eigen::VectorXd &beta) {
  Eigen::VectorXd r = y - X * beta;
  return (w.array() * r.array().square()).sum();
}

/**
 * @brief Weighted non-negative least squares, Lawson–Hanson active set.
 *
 * Minimizes Σ w_i (y_i − Σ_j X_ij β_j)² subject to β ≥ 0. The method works
 * on the weighted Gram system G = XᵀWX, c = XᵀWy, which is small (one row
 * per column of X) no matter how many intervals feed it.
 *
 * Termination is the KKT condition: every coefficient held at zero has
 * gradient c_j − (Gβ)_j ≤ kkt_tol · max(1, ‖c‖∞). Ties in the entering
 * column resolve to the lowest index, so the result is deterministic.
 *
 * Throws DegenerateSystem when X has no columns or no rows, and
 * std::invalid_argument on mismatched sizes or non-positive weights.
 */
inline NnlsResult solve_nnls(const Eigen::MatrixXd &X, const Eigen::VectorXd &y,
                             const Eigen::VectorXd &w, double kkt_tol = 1e-9) {
  const Eigen::Index m = X.rows();
  const Eigen::Index n = X.cols();
  if (n == 0) throw Error(Errc::DegenerateSystem, "design has no columns");
  if (m == 0) throw Error(Errc::DegenerateSystem, "design has no rows");
  if (y.size() != m || w.size() != m)
    throw std::invalid_argument("solve_nnls: dimension mismatch");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(w[i] > 0.0) || !std::isfinite(w[i]))
      throw std::invalid_argument("solve_nnls: weights must be positive and finite");
  }

  const Eigen::MatrixXd G = X.transpose() * w.asDiagonal() * X;
  const Eigen::VectorXd c = X.transpose() * (w.array() * y.array()).matrix();
  const double tol = kkt_tol * std::max(1.0, c.cwiseAbs().maxCoeff());

  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  std::vector<bool> blocked(static_cast<std::size_t>(n), false);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  NnlsResult result;
  const std::size_t max_iter = 30 * static_cast<std::size_t>(n) + 30;

  // Unconstrained solve restricted to the passive columns. Returns false if
  // those columns are linearly dependent.
  auto solve_passive = [&](Eigen::VectorXd &z) {
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    const auto k = static_cast<Eigen::Index>(idx.size());
    z.setZero(n);
    if (k == 0) return true;
    Eigen::MatrixXd Gp(k, k);
    Eigen::VectorXd cp(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      cp[a] = c[idx[a]];
      for (Eigen::Index b = 0; b < k; ++b) Gp(a, b) = G(idx[a], idx[b]);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Gp);
    qr.setThreshold(1e-11);
    if (qr.rank() < k) return false;
    Eigen::VectorXd zp = qr.solve(cp);
    for (Eigen::Index a = 0; a < k; ++a) z[idx[a]] = zp[a];
    return true;
  };

  while (result.iterations < max_iter) {
    Eigen::VectorXd grad = c - G * x;
    Eigen::Index enter = -1;
    double best = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      auto ju = static_cast<std::size_t>(j);
      if (passive[ju] || blocked[ju]) continue;
      if (grad[j] > best) {
        best = grad[j];
        enter = j;
      }
    }
    if (enter < 0) break;
    ++result.iterations;

    const auto eu = static_cast<std::size_t>(enter);
    passive[eu] = true;
    Eigen::VectorXd z;
    if (!solve_passive(z) || z[enter] <= 0.0) {
      // Entering column is numerically dependent on the passive set, or
      // its positive gradient was round-off. Skip it until x moves.
      passive[eu] = false;
      blocked[eu] = true;
      continue;
    }
    std::fill(blocked.begin(), blocked.end(), false);

    // Inner loop: step back toward feasibility until z is strictly positive
    // on the passive set.
    while (true) {
      double alpha = std::numeric_limits<double>::infinity();
      Eigen::Index leave = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!passive[static_cast<std::size_t>(j)] || z[j] > 0.0) continue;
        double a = x[j] / (x[j] - z[j]);
        if (a < alpha) {
          alpha = a;
          leave = j;
        }
      }
      if (leave < 0) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      passive[static_cast<std::size_t>(leave)] = false;
      x[leave] = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x[j] <= 0.0) {
          passive[static_cast<std::size_t>(j)] = false;
          x[j] = 0.0;
        }
      }
      // A subset of independent columns stays independent.
      if (!solve_passive(z)) break;
    }
  }

  result.coef = x.cwiseMax(0.0);
  result.objective = weighted_objective(X, y, w, result.coef);
  return result;
}

} // namespace semo

#endif // SEMO__NNLS_HPP_
