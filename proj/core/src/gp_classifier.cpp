#include "playerkern/gp_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>

#include "playerkern/errors.hpp"
#include "playerkern/gauss_hermite.hpp"
#include "playerkern/nelder_mead.hpp"

namespace playerkern {

namespace {

struct CholeskyFailure {};

double sum_log_likelihood(std::span<const Outcome> ys, const Eigen::VectorXd& f, DrawParam d) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < f.size(); ++i) s += log_likelihood(ys[static_cast<std::size_t>(i)], f(i), d);
  return s;
}

// Fills gradient and W^1/2 at f.
void likelihood_terms(std::span<const Outcome> ys, const Eigen::VectorXd& f, DrawParam d,
                      Eigen::VectorXd& grad, Eigen::VectorXd& sqrt_w) {
  const auto n = f.size();
  grad.resize(n);
  sqrt_w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto dv = log_likelihood_derivs(ys[static_cast<std::size_t>(i)], f(i), d);
    grad(i) = dv.d1;
    sqrt_w(i) = std::sqrt(std::max(0.0, -dv.d2));
  }
}

// Lower Cholesky factor of I + S K S with S = diag(sqrt_w).
Eigen::MatrixXd factor_b(const Eigen::MatrixXd& k, const Eigen::VectorXd& sqrt_w) {
  Eigen::MatrixXd b = sqrt_w.asDiagonal() * k * sqrt_w.asDiagonal();
  b.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success) throw CholeskyFailure{};
  Eigen::MatrixXd l = llt.matrixL();
  if (!(l.diagonal().array() > 0.0).all() || !l.allFinite()) throw CholeskyFailure{};
  return l;
}

// Damped Newton iterations on Psi(f) = log p(y|f) - 1/2 f' K^-1 f, carried
// in the weight form f = K a so that K itself is never inverted.
LaplacePosterior newton_mode(const Eigen::MatrixXd& k, std::span<const MatchVector> xs,
                             std::span<const Outcome> ys, const Hyperparams& hyper, const FitOptions& options) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  const DrawParam draw = hyper.draw;

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  if (options.initial_latent) {
    if (options.initial_latent->size() != n) throw std::invalid_argument("initial latent has wrong length");
    f = *options.initial_latent;
    a = k.ldlt().solve(f);
  }
  double psi = sum_log_likelihood(ys, f, draw) - 0.5 * a.dot(f);
  if (options.psi_trace) options.psi_trace->assign(1, psi);

  Eigen::VectorXd grad;
  Eigen::VectorXd sqrt_w;
  bool converged = false;
  double last_delta = std::numeric_limits<double>::infinity();
  int iterations = 0;
  while (iterations < options.max_iterations) {
    likelihood_terms(ys, f, draw, grad, sqrt_w);
    const Eigen::MatrixXd l = factor_b(k, sqrt_w);
    const auto lower = l.triangularView<Eigen::Lower>();

    const Eigen::VectorXd w = sqrt_w.array().square().matrix();
    const Eigen::VectorXd b = w.cwiseProduct(f) + grad;
    const Eigen::VectorXd c = lower.solve(sqrt_w.cwiseProduct(k * b));
    const Eigen::VectorXd a_newton = b - sqrt_w.cwiseProduct(lower.transpose().solve(c));
    const Eigen::VectorXd da = a_newton - a;

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd a_try;
    Eigen::VectorXd f_try;
    double psi_try = psi;
    for (int halving = 0; halving < 40; ++halving) {
      a_try = a + step * da;
      f_try = k * a_try;
      psi_try = sum_log_likelihood(ys, f_try, draw) - 0.5 * a_try.dot(f_try);
      if (psi_try >= psi) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iterations;
    if (!accepted) {
      // No ascent left at working precision: already at the mode.
      last_delta = 0.0;
      converged = true;
      break;
    }
    last_delta = psi_try - psi;
    a = std::move(a_try);
    f = std::move(f_try);
    psi = psi_try;
    if (options.psi_trace) options.psi_trace->push_back(psi);
    if (std::abs(last_delta) < options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "Laplace mode search did not converge after " << iterations << " iterations (final |dPsi| = "
        << last_delta << ")";
    throw NumericalError(msg.str());
  }

  LaplacePosterior post;
  likelihood_terms(ys, f, draw, grad, sqrt_w);
  post.chol_b = factor_b(k, sqrt_w);
  post.mode = std::move(f);
  post.weights = std::move(a);
  post.gradient = std::move(grad);
  post.sqrt_w = std::move(sqrt_w);
  post.train_vectors.assign(xs.begin(), xs.end());
  post.train_outcomes.assign(ys.begin(), ys.end());
  post.hyper = hyper;
  post.iterations = iterations;
  return post;
}

// Retries with a larger diagonal jitter on Cholesky failure, up to 1e-2 sigma2.
LaplacePosterior fit_with_gram(const Eigen::MatrixXd& k_plain, std::span<const MatchVector> xs,
                               std::span<const Outcome> ys, const Hyperparams& hyper, const FitOptions& options) {
  Hyperparams h = hyper;
  const double max_jitter = 1e-2 * h.kernel.sigma2;
  while (true) {
    Eigen::MatrixXd k = k_plain;
    k.diagonal().array() += h.kernel.jitter;
    try {
      return newton_mode(k, xs, ys, h, options);
    } catch (const CholeskyFailure&) {
      const double next = h.kernel.jitter > 0.0 ? 10.0 * h.kernel.jitter : 1e-6 * h.kernel.sigma2;
      if (next > max_jitter * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "Cholesky factorization failed with jitter " << h.kernel.jitter << " (limit " << max_jitter
            << "); kernel diagonal range [" << k_plain.diagonal().minCoeff() << ", "
            << k_plain.diagonal().maxCoeff() << "]";
        throw NumericalError(msg.str());
      }
      h.kernel.jitter = next;
    }
  }
}

void check_inputs(std::span<const MatchVector> xs, std::span<const Outcome> ys, const Hyperparams& hyper) {
  hyper.validate();
  if (xs.empty()) throw std::invalid_argument("fit requires at least one training match");
  if (xs.size() != ys.size()) throw std::invalid_argument("match vectors and outcomes differ in length");
}

std::vector<Outcome> outcomes_of(const Dataset& ds) {
  std::vector<Outcome> ys;
  ys.reserve(ds.num_matches());
  for (const auto& r : ds.records()) ys.push_back(r.outcome);
  return ys;
}

}  // namespace

Hyperparams make_hyperparams(double sigma2, double sigma2_home, double alpha) {
  Hyperparams h{make_kernel_params(sigma2, sigma2_home), DrawParam::from_alpha(alpha)};
  h.validate();
  return h;
}

LaplacePosterior fit(std::span<const MatchVector> xs, std::span<const Outcome> ys, const Hyperparams& hyper,
                     const FitOptions& options) {
  check_inputs(xs, ys, hyper);
  const Eigen::MatrixXd k = gram_matrix(xs, hyper.kernel, false, options.threads);
  return fit_with_gram(k, xs, ys, hyper, options);
}

LaplacePosterior fit(const Dataset& train, const Hyperparams& hyper, const FitOptions& options) {
  const auto xs = build_match_vectors(train);
  const auto ys = outcomes_of(train);
  return fit(xs, ys, hyper, options);
}

double mode_log_likelihood(const LaplacePosterior& post) {
  return sum_log_likelihood(post.train_outcomes, post.mode, post.hyper.draw);
}

double log_marginal(const LaplacePosterior& post) {
  return mode_log_likelihood(post) - 0.5 * post.weights.dot(post.mode) -
         post.chol_b.diagonal().array().log().sum();
}

LatentPrediction predict_latent(const LaplacePosterior& post, const MatchVector& x) {
  const auto& kp = post.hyper.kernel;
  const Eigen::VectorXd ks = cross_kernel(post.train_vectors, x, kp);
  LatentPrediction out;
  out.mu = ks.dot(post.gradient);
  const Eigen::VectorXd v = post.chol_b.triangularView<Eigen::Lower>().solve(post.sqrt_w.cwiseProduct(ks));
  out.var = kernel_eval(x, x, kp) - v.squaredNorm();
  if (out.var < 0.0) {
    out.clamped = out.var < -1e-8;
    out.var = 0.0;
  }
  return out;
}

PredictiveDistribution expected_outcome_probs(double mu, double var, DrawParam d) {
  if (!(var > 0.0)) return outcome_probs(mu, d);
  const auto& rule = gauss_hermite_32();
  const double scale = std::sqrt(2.0 * var);
  PredictiveDistribution acc{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const auto p = outcome_probs(mu + scale * rule.nodes[i], d);
    acc.p_w += rule.weights[i] * p.p_w;
    acc.p_d += rule.weights[i] * p.p_d;
    acc.p_l += rule.weights[i] * p.p_l;
  }
  const double total = acc.sum();
  return {acc.p_w / total, acc.p_d / total, acc.p_l / total};
}

PredictiveDistribution predict_outcomes(const LaplacePosterior& post, const MatchVector& x) {
  const auto lp = predict_latent(post, x);
  return expected_outcome_probs(lp.mu, lp.var, post.hyper.draw);
}

OptimizeResult optimize_hyperparams(std::span<const MatchVector> xs, std::span<const Outcome> ys,
                                    const Hyperparams& init, int budget, const FitOptions& options) {
  check_inputs(xs, ys, init);
  if (budget < 1) throw std::invalid_argument("hyperparameter search budget must be >= 1");

  const bool use_home = init.kernel.sigma2_home > 0.0;
  const double jitter_ratio = init.kernel.jitter / init.kernel.sigma2;

  // K = sigma2 * overlaps + sigma2_home * h h', assembled per evaluation.
  KernelParams unit{1.0, 0.0, 0.0};
  const Eigen::MatrixXd overlaps = gram_matrix(xs, unit, false, options.threads);
  Eigen::VectorXd h(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) h(static_cast<Eigen::Index>(i)) = xs[i].home;
  const Eigen::MatrixXd home_outer = h * h.transpose();

  auto to_hyper = [&](std::span<const double> theta) {
    Hyperparams hp = init;
    hp.kernel.sigma2 = std::exp(theta[0]);
    hp.kernel.sigma2_home = use_home ? std::exp(theta[1]) : 0.0;
    hp.kernel.jitter = jitter_ratio * hp.kernel.sigma2;
    hp.draw = DrawParam::from_log_alpha(theta.back());
    return hp;
  };
  auto evidence = [&](const Hyperparams& hp) {
    const Eigen::MatrixXd k = hp.kernel.sigma2 * overlaps + hp.kernel.sigma2_home * home_outer;
    return log_marginal(fit_with_gram(k, xs, ys, hp, options));
  };

  std::vector<double> theta0{std::log(init.kernel.sigma2)};
  if (use_home) theta0.push_back(std::log(init.kernel.sigma2_home));
  theta0.push_back(init.draw.log_alpha());

  OptimizeResult best{init, evidence(init), 1};
  if (budget == 1) return best;

  constexpr double kLogLo = -15.0;
  constexpr double kLogHi = 10.0;
  auto objective = [&](std::span<const double> theta) {
    for (double t : theta) {
      if (!(t >= kLogLo && t <= kLogHi)) return -std::numeric_limits<double>::infinity();
    }
    try {
      return evidence(to_hyper(theta));
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  const std::size_t dim = theta0.size();
  std::vector<std::vector<double>> starts{theta0, theta0, theta0};
  const std::vector<double> shift = use_home ? std::vector<double>{1.0, -1.0, 0.5} : std::vector<double>{1.0, 0.5};
  for (std::size_t j = 0; j < dim; ++j) {
    starts[1][j] += shift[j];
    starts[2][j] -= shift[j];
  }

  int remaining = budget - 1;
  for (std::size_t s = 0; s < starts.size() && remaining > 0; ++s) {
    const int share = s + 1 == starts.size() ? remaining : (budget - 1) / static_cast<int>(starts.size());
    if (share <= 0) continue;
    NelderMeadOptions nm;
    nm.max_evaluations = share;
    nm.seed = 0x5eed + s;
    const auto r = nelder_mead_maximize(objective, starts[s], nm);
    remaining -= r.evaluations;
    best.evaluations += r.evaluations;
    if (r.value > best.log_marginal) {
      best.log_marginal = r.value;
      best.hyper = to_hyper(r.x);
    }
  }
  return best;
}

OptimizeResult optimize_hyperparams(const Dataset& train, const Hyperparams& init, int budget,
                                    const FitOptions& options) {
  const auto xs = build_match_vectors(train);
  const auto ys = outcomes_of(train);
  return optimize_hyperparams(xs, ys, init, budget, options);
}

MatchVector project_match(const MatchRecord& rec, const PlayerRegistry& registry) {
  auto next_unknown = static_cast<PlayerIndex>(registry.size());
  auto map = [&](const std::vector<PlayerId>& lineup) {
    if (lineup.size() != kLineupSize) {
      throw DataError("match '" + rec.match_id + "': lineup size " + std::to_string(lineup.size()));
    }
    std::array<PlayerIndex, kLineupSize> out{};
    for (std::size_t i = 0; i < kLineupSize; ++i) {
      const auto idx = registry.find(lineup[i]);
      out[i] = idx ? *idx : next_unknown++;
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  MatchVector v;
  v.plus = map(rec.lineup1);
  v.minus = map(rec.lineup2);
  v.home = home_sign(rec.home);
  return v;
}

std::optional<PredictiveDistribution> GpPredictor::predict(const MatchRecord& rec) const {
  return predict_outcomes(model_.posterior, project_match(rec, model_.registry));
}

}  // namespace playerkern
