#include "playerkern/primal_oracle.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Cholesky>

#include "playerkern/errors.hpp"

namespace playerkern {

namespace {

// Whitened parametrization s = D u with u ~ N(0, I), so a zero home variance
// simply removes that coordinate.
Eigen::VectorXd prior_scale(std::size_t num_players, const KernelParams& kp) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(num_players) + 1);
  d.head(static_cast<Eigen::Index>(num_players)).setConstant(std::sqrt(kp.sigma2));
  d(static_cast<Eigen::Index>(num_players)) = std::sqrt(kp.sigma2_home);
  return d;
}

}  // namespace

PrimalPosterior primal_laplace_fit(std::span<const MatchVector> xs, std::span<const Outcome> ys,
                                   std::size_t num_players, const Hyperparams& hyper, int max_iterations,
                                   double tolerance) {
  hyper.validate();
  if (xs.size() != ys.size()) throw std::invalid_argument("match vectors and outcomes differ in length");
  const auto dim = static_cast<Eigen::Index>(num_players) + 1;
  const auto n = static_cast<Eigen::Index>(xs.size());
  const Eigen::VectorXd d = prior_scale(num_players, hyper.kernel);

  // A = X D, dense.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, dim);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& x = xs[static_cast<std::size_t>(i)];
    for (auto p : x.plus) {
      if (p >= num_players) throw std::invalid_argument("player index out of range");
      a(i, p) += d(p);
    }
    for (auto p : x.minus) {
      if (p >= num_players) throw std::invalid_argument("player index out of range");
      a(i, p) -= d(p);
    }
    a(i, dim - 1) = x.home * d(dim - 1);
  }

  const DrawParam draw = hyper.draw;
  auto objective = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd f = a * u;
    double s = -0.5 * u.squaredNorm();
    for (Eigen::Index i = 0; i < n; ++i) s += log_likelihood(ys[static_cast<std::size_t>(i)], f(i), draw);
    return s;
  };
  auto curvature = [&](const Eigen::VectorXd& u, Eigen::VectorXd& grad) {
    const Eigen::VectorXd f = a * u;
    Eigen::VectorXd g(n);
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto dv = log_likelihood_derivs(ys[static_cast<std::size_t>(i)], f(i), draw);
      g(i) = dv.d1;
      w(i) = -dv.d2;
    }
    grad = a.transpose() * g - u;
    Eigen::MatrixXd h = a.transpose() * w.asDiagonal() * a;
    h.diagonal().array() += 1.0;
    return h;
  };

  Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
  double psi = objective(u);
  int iterations = 0;
  bool converged = n == 0;
  double last_delta = 0.0;
  Eigen::VectorXd grad;
  while (!converged && iterations < max_iterations) {
    const Eigen::MatrixXd h = curvature(u, grad);
    const Eigen::VectorXd du = h.llt().solve(grad);
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd u_try;
    double psi_try = psi;
    for (int halving = 0; halving < 40; ++halving) {
      u_try = u + step * du;
      psi_try = objective(u_try);
      if (psi_try >= psi) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iterations;
    if (!accepted) {
      converged = true;
      break;
    }
    last_delta = psi_try - psi;
    u = std::move(u_try);
    psi = psi_try;
    converged = std::abs(last_delta) < tolerance;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "primal Laplace fit did not converge after " << iterations << " iterations (final |dPsi| = "
        << last_delta << ")";
    throw NumericalError(msg.str());
  }

  const Eigen::MatrixXd h = curvature(u, grad);
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) throw NumericalError("primal Hessian is not positive definite");
  const Eigen::MatrixXd cov_u = llt.solve(Eigen::MatrixXd::Identity(dim, dim));

  PrimalPosterior post;
  post.mean = d.cwiseProduct(u);
  post.covariance = d.asDiagonal() * cov_u * d.asDiagonal();
  post.hyper = hyper;
  post.iterations = iterations;
  return post;
}

PrimalPosterior primal_laplace_fit(const Dataset& train, const Hyperparams& hyper) {
  const auto xs = build_match_vectors(train);
  std::vector<Outcome> ys;
  for (const auto& r : train.records()) ys.push_back(r.outcome);
  return primal_laplace_fit(xs, ys, train.num_players(), hyper);
}

LatentPrediction PrimalPosterior::predict_latent(const MatchVector& x) const {
  const auto num = num_players();
  const auto home_idx = static_cast<Eigen::Index>(num);
  // Sparse x over the known coordinates; unseen players add prior variance only.
  std::vector<std::pair<Eigen::Index, double>> entries;
  double unseen = 0.0;
  for (auto p : x.plus) {
    if (p < num) entries.emplace_back(p, 1.0); else unseen += 1.0;
  }
  for (auto p : x.minus) {
    if (p < num) entries.emplace_back(p, -1.0); else unseen += 1.0;
  }
  if (x.home != 0) entries.emplace_back(home_idx, static_cast<double>(x.home));

  LatentPrediction out;
  for (const auto& [i, v] : entries) out.mu += v * mean(i);
  for (const auto& [i, vi] : entries) {
    for (const auto& [j, vj] : entries) out.var += vi * vj * covariance(i, j);
  }
  out.var += unseen * hyper.kernel.sigma2;
  if (out.var < 0.0) {
    out.clamped = out.var < -1e-8;
    out.var = 0.0;
  }
  return out;
}

PredictiveDistribution PrimalPosterior::predict_outcomes(const MatchVector& x) const {
  const auto lp = predict_latent(x);
  return expected_outcome_probs(lp.mu, lp.var, hyper.draw);
}

}  // namespace playerkern
