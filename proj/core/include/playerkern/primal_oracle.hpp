#pragma once

#include <span>

#include <Eigen/Core>

#include "playerkern/gp_classifier.hpp"

namespace playerkern {

// Weight-space view of the player-kernel model: one skill per player plus a
// home weight, s ~ N(0, diag(sigma2, ..., sigma2, sigma2_home)), f = s'[z; h].
// Dense (P+1)-dimensional algebra; meant as an independent check on the
// kernel-space fit for small P. Jitter is not modeled.
struct PrimalPosterior {
  Eigen::VectorXd mean;        // posterior mode of s; last entry is the home weight
  Eigen::MatrixXd covariance;  // Laplace covariance of s
  Hyperparams hyper;
  int iterations = 0;

  std::size_t num_players() const { return static_cast<std::size_t>(mean.size()) - 1; }

  // Players with index >= num_players() are treated as unseen (prior only).
  LatentPrediction predict_latent(const MatchVector& x) const;
  PredictiveDistribution predict_outcomes(const MatchVector& x) const;
};

PrimalPosterior primal_laplace_fit(std::span<const MatchVector> xs, std::span<const Outcome> ys,
                                   std::size_t num_players, const Hyperparams& hyper, int max_iterations = 100,
                                   double tolerance = 1e-10);
PrimalPosterior primal_laplace_fit(const Dataset& train, const Hyperparams& hyper);

}  // namespace playerkern
