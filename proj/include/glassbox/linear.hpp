/*
 * Copyright 2026 The Glassbox Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Weighted logistic regression (Newton with backtracking) and the adaptive
// lasso (IRLS outer loop, cyclic coordinate descent with soft-thresholding).

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "glassbox/common.hpp"
#include "glassbox/dataset.hpp"

namespace glassbox::linear {

struct LinearModel {
  double intercept = 0.0;
  std::vector<double> coefficients;
  std::vector<std::string> feature_names;
  // When set, inputs are z-scored with these train statistics before scoring.
  std::optional<Standardization> standardization;

  std::size_t dim() const { return coefficients.size(); }

  double log_odds(std::span<const double> x) const {
    if (x.size() != coefficients.size()) throw UsageError("linear: dimension mismatch");
    double z = intercept;
    if (standardization) {
      for (std::size_t j = 0; j < x.size(); ++j)
        z += coefficients[j] *
             standardize_value(x[j], standardization->means[j], standardization->stddevs[j]);
    } else {
      for (std::size_t j = 0; j < x.size(); ++j) z += coefficients[j] * x[j];
    }
    return z;
  }

  double predict_proba(std::span<const double> x) const { return sigmoid(log_odds(x)); }

  // Additive per-feature contributions to log_odds (excluding the intercept).
  std::vector<double> contributions(std::span<const double> x) const {
    if (x.size() != coefficients.size()) throw UsageError("linear: dimension mismatch");
    std::vector<double> out(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double v = standardization ? standardize_value(x[j], standardization->means[j],
                                                           standardization->stddevs[j])
                                       : x[j];
      out[j] = coefficients[j] * v;
    }
    return out;
  }

  std::vector<double> predict_proba(const Matrix& X) const {
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = predict_proba(X.row(i));
    return out;
  }
};

struct SolverSettings {
  int max_iter = 100;
  // Convergence when the gradient max-norm drops to this value.
  double tol = 1e-6;
  // Conditioning term ridge * ||beta||^2 (intercept excluded).
  double ridge = 1e-6;
  bool standardize = false;
};

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

namespace internal {

// Design with an explicit intercept column at index 0.
inline Eigen::MatrixXd design(const Matrix& X) {
  Eigen::MatrixXd A(X.rows(), X.cols() + 1);
  for (std::size_t i = 0; i < X.rows(); ++i) {
    A(static_cast<Eigen::Index>(i), 0) = 1.0;
    for (std::size_t j = 0; j < X.cols(); ++j)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j + 1)) = X(i, j);
  }
  return A;
}

struct Problem {
  Eigen::MatrixXd A;
  Eigen::VectorXd y;
  Eigen::VectorXd w;
  double n = 0;
  double ridge = 0;
};

inline Problem make_problem(const Matrix& X, const Dataset& data, double ridge) {
  Problem p;
  p.A = design(X);
  p.y = Eigen::VectorXd(data.rows());
  p.w = Eigen::VectorXd(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    p.y(static_cast<Eigen::Index>(i)) = data.y[i];
    p.w(static_cast<Eigen::Index>(i)) = data.w[i];
  }
  p.n = static_cast<double>(data.rows());
  p.ridge = ridge;
  return p;
}

inline double smooth_objective(const Problem& p, const Eigen::VectorXd& theta,
                               const Eigen::VectorXd& eta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) total += p.w(i) * logistic_loss(p.y(i), eta(i));
  return total / p.n + p.ridge * theta.tail(theta.size() - 1).squaredNorm();
}

inline LinearModel to_model(const Eigen::VectorXd& theta, const Dataset& data,
                            std::optional<Standardization> stats) {
  LinearModel m;
  m.intercept = theta(0);
  m.coefficients.assign(theta.data() + 1, theta.data() + theta.size());
  m.feature_names = data.feature_names;
  m.standardization = std::move(stats);
  return m;
}

inline Eigen::VectorXd to_theta(const LinearModel& m) {
  Eigen::VectorXd theta(static_cast<Eigen::Index>(m.dim() + 1));
  theta(0) = m.intercept;
  for (std::size_t j = 0; j < m.dim(); ++j) theta(static_cast<Eigen::Index>(j + 1)) = m.coefficients[j];
  return theta;
}

}  // namespace internal

// Value of the sample-weighted mean log-loss plus ridge term at params
// (params[0] is the intercept); fills the analytic gradient when requested.
inline double logistic_objective(const Dataset& data, std::span<const double> params,
                                 std::vector<double>* gradient = nullptr, double ridge = 0.0) {
  const std::size_t d = data.cols();
  if (params.size() != d + 1) throw UsageError("logistic_objective: parameter size mismatch");
  const double n = static_cast<double>(data.rows());
  double value = 0.0;
  if (gradient) gradient->assign(d + 1, 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto x = data.X.row(i);
    double z = params[0];
    for (std::size_t j = 0; j < d; ++j) z += params[j + 1] * x[j];
    value += data.w[i] * logistic_loss(data.y[i], z);
    if (gradient) {
      const double g = data.w[i] * logistic_grad_hess(data.y[i], z).grad;
      (*gradient)[0] += g;
      for (std::size_t j = 0; j < d; ++j) (*gradient)[j + 1] += g * x[j];
    }
  }
  value /= n;
  for (std::size_t j = 1; j <= d; ++j) value += ridge * params[j] * params[j];
  if (gradient) {
    for (auto& g : *gradient) g /= n;
    for (std::size_t j = 1; j <= d; ++j) (*gradient)[j] += 2.0 * ridge * params[j];
  }
  return value;
}

namespace internal {

inline Eigen::VectorXd newton_solve(const Problem& p, Eigen::VectorXd theta, const SolverSettings& s) {
  const Eigen::Index k = p.A.cols();
  Eigen::VectorXd eta = p.A * theta;
  double f = smooth_objective(p, theta, eta);
  double grad_norm = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < s.max_iter; ++iter) {
    Eigen::VectorXd r(eta.size()), sw(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      const auto gh = logistic_grad_hess(p.y(i), eta(i));
      r(i) = p.w(i) * gh.grad;
      sw(i) = std::sqrt(p.w(i) * gh.hess);
    }
    Eigen::VectorXd grad = p.A.transpose() * r / p.n;
    grad.tail(k - 1) += 2.0 * p.ridge * theta.tail(k - 1);
    grad_norm = grad.cwiseAbs().maxCoeff();
    if (grad_norm <= s.tol) return theta;

    const Eigen::MatrixXd B = sw.asDiagonal() * p.A;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(k, k);
    H.selfadjointView<Eigen::Lower>().rankUpdate(B.transpose(), 1.0 / p.n);
    H = H.selfadjointView<Eigen::Lower>();
    H.diagonal().tail(k - 1).array() += 2.0 * p.ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    Eigen::VectorXd step = ldlt.solve(-grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite() || step.dot(grad) >= 0) {
      H.diagonal().array() += 1e-8 + 1e-6 * H.diagonal().cwiseAbs().maxCoeff();
      step = H.ldlt().solve(-grad);
    }
    // Armijo backtracking.
    double t = 1.0;
    const double slope = step.dot(grad);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd cand = theta + t * step;
      Eigen::VectorXd cand_eta = p.A * cand;
      const double fc = smooth_objective(p, cand, cand_eta);
      if (fc <= f + 1e-4 * t * slope || (fc <= f && t < 1e-6)) {
        theta = std::move(cand);
        eta = std::move(cand_eta);
        f = fc;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  std::ostringstream msg;
  msg << "fit_logistic: no convergence within " << s.max_iter
      << " iterations (gradient max-norm " << grad_norm << ", tol " << s.tol << ")";
  throw NumericalError(msg.str());
}

inline Matrix maybe_standardize(const Dataset& data, bool standardize,
                                std::optional<Standardization>& stats) {
  if (!standardize) return data.X;
  stats = compute_standardization(data.X);
  return apply_standardization(data.X, *stats);
}

}  // namespace internal

// Minimises the weighted mean log-loss plus ridge * ||beta||^2 from a zero start.
inline LinearModel fit_logistic(const Dataset& data, const SolverSettings& settings = {}) {
  require_both_classes(data.y, "fit_logistic");
  std::optional<Standardization> stats;
  const Matrix X = internal::maybe_standardize(data, settings.standardize, stats);
  const auto problem = internal::make_problem(X, data, settings.ridge);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(problem.A.cols());
  theta = internal::newton_solve(problem, std::move(theta), settings);
  return internal::to_model(theta, data, std::move(stats));
}

struct AdaptiveLassoOptions {
  double gamma = 1.0;
  // Initial estimates with magnitude below this get weight 1 / eps_w^gamma.
  double eps_w = 1e-4;
  int max_outer = 200;
  int max_passes = 10000;
  // Convergence on the largest coefficient change.
  double tol = 1e-7;
  SolverSettings initial;
};

namespace internal {

struct LassoState {
  Eigen::VectorXd theta;
};

inline double penalised_objective(const Problem& p, const Eigen::VectorXd& theta,
                                  const Eigen::VectorXd& eta, double lambda,
                                  const std::vector<double>& pw) {
  double pen = 0.0;
  for (std::size_t j = 0; j < pw.size(); ++j)
    pen += pw[j] * std::abs(theta(static_cast<Eigen::Index>(j + 1)));
  return smooth_objective(p, theta, eta) + lambda * pen;
}

// Active sets above this size skip the Newton shortcut (m^2 n to form).
inline constexpr Eigen::Index kMaxNewtonActive = 256;

// Minimises smooth_objective + lambda * sum pw_j |beta_j| from `theta`.
inline Eigen::VectorXd coordinate_descent(const Problem& p, Eigen::VectorXd theta, double lambda,
                                          const std::vector<double>& pw,
                                          const AdaptiveLassoOptions& opt) {
  const Eigen::Index n = p.A.rows(), k = p.A.cols();
  Eigen::VectorXd eta = p.A * theta;
  double f = penalised_objective(p, theta, eta, lambda, pw);
  Eigen::VectorXd v(n), s(n);
  for (int outer = 0; outer < opt.max_outer; ++outer) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto gh = logistic_grad_hess(p.y(i), eta(i));
      v(i) = p.w(i) * std::max(gh.hess, 1e-10) / p.n;
      s(i) = -p.w(i) * gh.grad / p.n;
    }
    Eigen::VectorXd curvature(k);
    for (Eigen::Index j = 0; j < k; ++j) curvature(j) = v.dot(p.A.col(j).cwiseAbs2());

    Eigen::VectorXd beta = theta;
    auto update = [&](Eigen::Index j) {
      const auto col = p.A.col(j);
      const double a = curvature(j) + (j == 0 ? 0.0 : 2.0 * p.ridge);
      if (a <= 0) return 0.0;
      const double old = beta(j);
      const double num = curvature(j) * old + col.dot(s);
      const double nb = j == 0 ? num / a
                               : soft_threshold(num, lambda * pw[static_cast<std::size_t>(j - 1)]) / a;
      const double delta = nb - old;
      if (delta != 0.0) {
        s.noalias() -= delta * v.cwiseProduct(col);
        beta(j) = nb;
      }
      return std::abs(delta);
    };
    // With the signs of the active set fixed the quadratic model is smooth, so
    // one Newton solve finishes it. Rejected if any active sign would change;
    // plain coordinate passes then carry on as usual.
    auto active_newton = [&] {
      std::vector<Eigen::Index> act;
      for (Eigen::Index j = 0; j < k; ++j)
        if (j == 0 || beta(j) != 0.0) act.push_back(j);
      const auto m = static_cast<Eigen::Index>(act.size());
      if (m > kMaxNewtonActive) return;
      Eigen::MatrixXd Aa(n, m);
      for (Eigen::Index c = 0; c < m; ++c) Aa.col(c) = p.A.col(act[static_cast<std::size_t>(c)]);
      Eigen::MatrixXd H = Aa.transpose() * v.asDiagonal() * Aa;
      Eigen::VectorXd g = -(Aa.transpose() * s);
      for (Eigen::Index c = 1; c < m; ++c) {
        const Eigen::Index j = act[static_cast<std::size_t>(c)];
        H(c, c) += 2.0 * p.ridge;
        g(c) += 2.0 * p.ridge * beta(j) +
                lambda * pw[static_cast<std::size_t>(j - 1)] * (beta(j) > 0 ? 1.0 : -1.0);
      }
      const auto ldlt = H.ldlt();
      if (ldlt.info() != Eigen::Success) return;
      const Eigen::VectorXd step = ldlt.solve(-g);
      if (!step.allFinite()) return;
      for (Eigen::Index c = 1; c < m; ++c) {
        const Eigen::Index j = act[static_cast<std::size_t>(c)];
        if ((beta(j) > 0) != (beta(j) + step(c) > 0) || beta(j) + step(c) == 0.0) return;
      }
      for (Eigen::Index c = 0; c < m; ++c) beta(act[static_cast<std::size_t>(c)]) += step(c);
      s.noalias() -= v.cwiseProduct(Aa * step);
    };
    // Full passes alternate with passes over the active set.
    for (int pass = 0; pass < opt.max_passes;) {
      double max_delta = 0.0;
      for (Eigen::Index j = 0; j < k; ++j) max_delta = std::max(max_delta, update(j));
      ++pass;
      if (max_delta < opt.tol) break;
      active_newton();
      for (; pass < opt.max_passes; ++pass) {
        double active_delta = 0.0;
        for (Eigen::Index j = 0; j < k; ++j)
          if (j == 0 || beta(j) != 0.0) active_delta = std::max(active_delta, update(j));
        if (active_delta < opt.tol) break;
      }
    }

    // Damped step on the true objective.
    const Eigen::VectorXd direction = beta - theta;
    const double change = direction.cwiseAbs().maxCoeff();
    double t = 1.0;
    Eigen::VectorXd cand = beta, cand_eta = p.A * cand;
    double fc = penalised_objective(p, cand, cand_eta, lambda, pw);
    while (fc > f + 1e-14 * std::abs(f) && t > 1e-10) {
      t *= 0.5;
      cand = theta + t * direction;
      cand_eta = p.A * cand;
      fc = penalised_objective(p, cand, cand_eta, lambda, pw);
    }
    if (fc > f + 1e-14 * std::abs(f)) return theta;  // no descent available
    theta = std::move(cand);
    eta = std::move(cand_eta);
    f = fc;
    if (t * change < opt.tol) return theta;
  }
  std::ostringstream msg;
  msg << "fit_adaptive_lasso: no convergence within " << opt.max_outer << " outer iterations";
  throw NumericalError(msg.str());
}

inline std::vector<double> adaptive_weights(const LinearModel& initial, const AdaptiveLassoOptions& opt) {
  std::vector<double> pw(initial.dim());
  for (std::size_t j = 0; j < pw.size(); ++j) {
    const double mag = std::max(std::abs(initial.coefficients[j]), opt.eps_w);
    pw[j] = 1.0 / std::pow(mag, opt.gamma);
  }
  return pw;
}

// Smallest lambda at which every penalised coefficient is zero.
inline double lambda_max(const Problem& p, const std::vector<double>& pw) {
  double pos = 0, tot = 0;
  for (Eigen::Index i = 0; i < p.y.size(); ++i) {
    tot += p.w(i);
    pos += p.w(i) * p.y(i);
  }
  const double b0 = logit(pos / tot);
  const double p0 = sigmoid(b0);
  Eigen::VectorXd r(p.y.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) r(i) = p.w(i) * (p0 - p.y(i)) / p.n;
  double lm = 0.0;
  for (Eigen::Index j = 1; j < p.A.cols(); ++j)
    lm = std::max(lm, std::abs(p.A.col(j).dot(r)) / pw[static_cast<std::size_t>(j - 1)]);
  return lm;
}

}  // namespace internal

// Two-stage adaptive lasso. Stage one is fit_logistic (supplied or computed);
// stage two warm-starts from it.
inline LinearModel fit_adaptive_lasso(const Dataset& data, double lambda,
                                      const AdaptiveLassoOptions& opt = {},
                                      const LinearModel* initial = nullptr) {
  if (!(lambda >= 0)) throw UsageError("fit_adaptive_lasso: lambda must be non-negative");
  require_both_classes(data.y, "fit_adaptive_lasso");
  LinearModel first = initial ? *initial : fit_logistic(data, opt.initial);
  std::optional<Standardization> stats;
  const Matrix X = internal::maybe_standardize(data, opt.initial.standardize, stats);
  const auto problem = internal::make_problem(X, data, opt.initial.ridge);
  const auto pw = internal::adaptive_weights(first, opt);
  Eigen::VectorXd theta = internal::to_theta(first);
  theta = internal::coordinate_descent(problem, std::move(theta), lambda, pw, opt);
  return internal::to_model(theta, data, std::move(stats));
}

struct LambdaPathPoint {
  double lambda;
  std::size_t nonzero;
  double validation_loss;
};

struct AutoLassoResult {
  LinearModel model;
  double lambda = 0.0;
  std::vector<LambdaPathPoint> path;
};

// Fits the adaptive lasso along a decreasing log grid on `fit`, with warm starts.
inline std::vector<LinearModel> lasso_path(const Dataset& fit, const std::vector<double>& lambdas,
                                           const AdaptiveLassoOptions& opt = {}) {
  require_both_classes(fit.y, "lasso_path");
  const LinearModel first = fit_logistic(fit, opt.initial);
  std::optional<Standardization> stats;
  const Matrix X = internal::maybe_standardize(fit, opt.initial.standardize, stats);
  const auto problem = internal::make_problem(X, fit, opt.initial.ridge);
  const auto pw = internal::adaptive_weights(first, opt);
  Eigen::VectorXd theta = internal::to_theta(first);
  std::vector<LinearModel> out;
  for (double lambda : lambdas) {
    theta = internal::coordinate_descent(problem, theta, lambda, pw, opt);
    out.push_back(internal::to_model(theta, fit, stats));
  }
  return out;
}

inline double lambda_max(const Dataset& data, const AdaptiveLassoOptions& opt = {}) {
  const LinearModel first = fit_logistic(data, opt.initial);
  std::optional<Standardization> stats;
  const Matrix X = internal::maybe_standardize(data, opt.initial.standardize, stats);
  return internal::lambda_max(internal::make_problem(X, data, opt.initial.ridge),
                              internal::adaptive_weights(first, opt));
}

// Chooses lambda on a 50-point log grid below lambda_max by validation
// log-loss (every fifth row held out), then refits on all rows.
inline AutoLassoResult fit_adaptive_lasso_auto(const Dataset& data, const AdaptiveLassoOptions& opt = {},
                                               int grid_size = 50, double min_ratio = 1e-4) {
  require_both_classes(data.y, "fit_adaptive_lasso_auto");
  std::vector<std::size_t> fit_rows, val_rows;
  for (std::size_t i = 0; i < data.rows(); ++i) (i % 5 == 4 ? val_rows : fit_rows).push_back(i);
  const Dataset fit = select_rows(data, fit_rows);
  const Dataset val = select_rows(data, val_rows);
  require_both_classes(fit.y, "fit_adaptive_lasso_auto (fit rows)");

  const double lmax = lambda_max(fit, opt);
  std::vector<double> grid(static_cast<std::size_t>(grid_size));
  for (int g = 0; g < grid_size; ++g) {
    const double frac = grid_size > 1 ? static_cast<double>(g) / (grid_size - 1) : 0.0;
    grid[static_cast<std::size_t>(g)] = lmax * std::pow(min_ratio, frac);
  }
  const auto models = lasso_path(fit, grid, opt);
  AutoLassoResult result;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double loss = 0;
    for (std::size_t i = 0; i < val.rows(); ++i)
      loss += val.w[i] * logistic_loss(val.y[i], models[g].log_odds(val.X.row(i)));
    loss /= static_cast<double>(std::max<std::size_t>(1, val.rows()));
    std::size_t nz = 0;
    for (double c : models[g].coefficients) nz += c != 0.0;
    result.path.push_back({grid[g], nz, loss});
    if (loss < best) {
      best = loss;
      result.lambda = grid[g];
    }
  }
  result.model = fit_adaptive_lasso(data, result.lambda, opt);
  return result;
}

}  // namespace glassbox::linear
