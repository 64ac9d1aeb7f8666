#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "playerkern/match_data.hpp"
#include "playerkern/player_kernel.hpp"
#include "playerkern/predictor.hpp"
#include "playerkern/rao_kupper.hpp"

namespace playerkern {

struct Hyperparams {
  KernelParams kernel;
  DrawParam draw;

  void validate() const { kernel.validate(); }
};

// Jitter defaults to 1e-6 * sigma2.
Hyperparams make_hyperparams(double sigma2, double sigma2_home, double alpha);

struct FitOptions {
  int max_iterations = 100;
  double tolerance = 1e-10;  // on |delta Psi| between accepted Newton steps
  unsigned threads = 1;
  // Starting latent vector; zero when unset.
  std::optional<Eigen::VectorXd> initial_latent;
  // When set, receives Psi at the start and after every accepted step.
  std::vector<double>* psi_trace = nullptr;
};

// Laplace approximation to p(f | y) over the training latents.
//
// `mode` is the posterior mode f, `weights` the vector a with mode = K a,
// `gradient` the likelihood gradient at the mode (equal to `weights` at
// convergence), `sqrt_w` the square root of the negated likelihood curvature,
// and `chol_b` the lower Cholesky factor of B = I + W^1/2 K W^1/2.
// `hyper.kernel.jitter` is the jitter that was actually used.
struct LaplacePosterior {
  Eigen::VectorXd mode;
  Eigen::VectorXd weights;
  Eigen::VectorXd gradient;
  Eigen::VectorXd sqrt_w;
  Eigen::MatrixXd chol_b;
  std::vector<MatchVector> train_vectors;
  std::vector<Outcome> train_outcomes;
  Hyperparams hyper;
  int iterations = 0;

  std::size_t size() const { return train_vectors.size(); }
};

struct LatentPrediction {
  double mu = 0.0;
  double var = 0.0;
  bool clamped = false;  // variance came out below -1e-8 and was set to zero
};

LaplacePosterior fit(std::span<const MatchVector> xs, std::span<const Outcome> ys, const Hyperparams& hyper,
                     const FitOptions& options = {});
LaplacePosterior fit(const Dataset& train, const Hyperparams& hyper, const FitOptions& options = {});

// Sum of log p(y_i | f_i) at the mode.
double mode_log_likelihood(const LaplacePosterior& post);

// Laplace approximation to log p(y | X, theta).
double log_marginal(const LaplacePosterior& post);

LatentPrediction predict_latent(const LaplacePosterior& post, const MatchVector& x);

// E[outcome_probs(f)] for f ~ N(mu, var) by 32-node Gauss-Hermite quadrature,
// renormalized to sum to one.
PredictiveDistribution expected_outcome_probs(double mu, double var, DrawParam d);

PredictiveDistribution predict_outcomes(const LaplacePosterior& post, const MatchVector& x);

struct OptimizeResult {
  Hyperparams hyper;
  double log_marginal = 0.0;
  int evaluations = 0;
};

// Maximizes the Laplace evidence over (log sigma2, log sigma2_home, log alpha)
// with Nelder-Mead from `init` and two fixed perturbations of it. A zero home
// variance in `init` keeps the home coordinate switched off. The jitter keeps
// its ratio to sigma2. Never returns a point with lower evidence than `init`.
OptimizeResult optimize_hyperparams(std::span<const MatchVector> xs, std::span<const Outcome> ys,
                                    const Hyperparams& init, int budget, const FitOptions& options = {});
OptimizeResult optimize_hyperparams(const Dataset& train, const Hyperparams& init, int budget,
                                    const FitOptions& options = {});

// A fitted model together with the player registry its vectors index into.
struct TrainedModel {
  PlayerRegistry registry;
  LaplacePosterior posterior;
};

// Maps a record onto the model's registry; players the model has never seen
// get fresh indices past the end, so they carry no covariance with training.
MatchVector project_match(const MatchRecord& rec, const PlayerRegistry& registry);

class GpPredictor : public Predictor {
 public:
  GpPredictor(const TrainedModel& model, std::string name = "PlayerKern")
      : model_(model), name_(std::move(name)) {}

  std::string name() const override { return name_; }
  std::optional<PredictiveDistribution> predict(const MatchRecord& rec) const override;

 private:
  const TrainedModel& model_;
  std::string name_;
};

}  // namespace playerkern
