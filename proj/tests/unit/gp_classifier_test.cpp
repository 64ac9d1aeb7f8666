#include "playerkern/gp_classifier.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "playerkern/errors.hpp"
#include "playerkern/primal_oracle.hpp"

namespace playerkern {
namespace {

using testing::random_league;
using testing::random_vectors;

Hyperparams no_jitter(double sigma2, double sigma2_home, double alpha) {
  auto h = make_hyperparams(sigma2, sigma2_home, alpha);
  h.kernel.jitter = 0.0;
  return h;
}

MatchVector disjoint_match(PlayerIndex base, int home = 0) {
  MatchVector v;
  for (std::size_t i = 0; i < kLineupSize; ++i) {
    v.plus[i] = base + static_cast<PlayerIndex>(i);
    v.minus[i] = base + 100 + static_cast<PlayerIndex>(i);
  }
  v.home = home;
  return v;
}

TEST(Fit, SingleDecisiveMatchSolvesScalarEquation) {
  const auto hyper = no_jitter(1.0, 0.0, 0.5);
  const std::vector<MatchVector> xs{disjoint_match(0)};
  const std::vector<Outcome> ys{Outcome::kTeam1Win};
  const auto post = fit(xs, ys, hyper);
  // f = k d1(f) with k = 22 and d1 = sigma(alpha - f).
  const double root = testing::bisect([](double f) { return f - 22.0 / (1.0 + std::exp(f - 0.5)); }, 0.0, 22.0);
  EXPECT_NEAR(post.mode(0), root, 1e-8);

  const auto loss = fit(xs, std::vector<Outcome>{Outcome::kTeam2Win}, hyper);
  EXPECT_NEAR(loss.mode(0), -root, 1e-8);
}

TEST(Fit, AllDrawsGiveZeroMode) {
  std::mt19937_64 rng(21);
  const auto xs = random_vectors(rng, 40, 60);
  const std::vector<Outcome> ys(xs.size(), Outcome::kDraw);
  const auto post = fit(xs, ys, make_hyperparams(0.3, 0.2, 0.8));
  EXPECT_LE(post.mode.lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Fit, ModeIsStationaryWithValidFactor) {
  std::mt19937_64 rng(22);
  const auto league = random_league(rng, 120, 80);
  const auto hyper = make_hyperparams(0.2, 0.5, 0.6);
  const auto post = fit(league.vectors, league.outcomes, hyper);
  Eigen::MatrixXd k = gram_matrix(league.vectors, post.hyper.kernel, true);
  Eigen::VectorXd grad(post.mode.size());
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    grad(i) = log_likelihood_derivs(league.outcomes[static_cast<std::size_t>(i)], post.mode(i), hyper.draw).d1;
  }
  const double scale = std::max(1.0, post.mode.lpNorm<Eigen::Infinity>());
  EXPECT_LE((post.mode - k * grad).lpNorm<Eigen::Infinity>(), 1e-6 * scale);
  EXPECT_TRUE((post.chol_b.diagonal().array() > 0.0).all());
  EXPECT_LE((post.gradient - grad).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Fit, PsiNeverDecreases) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto league = random_league(rng, 60, 40, 0.6);
    std::vector<double> trace;
    FitOptions opts;
    opts.psi_trace = &trace;
    fit(league.vectors, league.outcomes, make_hyperparams(2.0, 1.0, 0.3), opts);
    ASSERT_GE(trace.size(), 2u);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i], trace[i - 1]);
  }
}

TEST(Fit, ModeDoesNotDependOnStart) {
  std::mt19937_64 rng(24);
  const auto league = random_league(rng, 80, 50);
  const auto hyper = make_hyperparams(0.5, 0.5, 0.5);
  const auto from_zero = fit(league.vectors, league.outcomes, hyper);

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd noise(static_cast<Eigen::Index>(league.vectors.size()));
  for (auto& v : noise) v = normal(rng);
  FitOptions opts;
  opts.initial_latent = noise;
  const auto from_noise = fit(league.vectors, league.outcomes, hyper, opts);
  EXPECT_LE((from_zero.mode - from_noise.mode).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Fit, ReportsNonConvergence) {
  std::mt19937_64 rng(25);
  const auto league = random_league(rng, 50, 40, 1.0);
  FitOptions opts;
  opts.max_iterations = 1;
  try {
    fit(league.vectors, league.outcomes, make_hyperparams(5.0, 1.0, 0.5), opts);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("dPsi"), std::string::npos);
  }
}

TEST(Fit, RejectsEmptyOrMismatchedInput) {
  const auto hyper = make_hyperparams(1.0, 1.0, 0.5);
  EXPECT_THROW(fit(std::vector<MatchVector>{}, std::vector<Outcome>{}, hyper), std::invalid_argument);
  EXPECT_THROW(fit(std::vector<MatchVector>{disjoint_match(0)}, std::vector<Outcome>{}, hyper),
               std::invalid_argument);
}

TEST(LogMarginal, SingleDrawClosedForm) {
  const double alpha = 0.7;
  const double sigma2 = 0.4;
  const auto post = fit(std::vector<MatchVector>{disjoint_match(0)}, std::vector<Outcome>{Outcome::kDraw},
                        no_jitter(sigma2, 0.0, alpha));
  // d2 of the draw log-likelihood at f = 0 is -2 sigma(alpha) sigma(-alpha).
  const double s = 1.0 / (1.0 + std::exp(-alpha));
  const double neg_d2 = 2.0 * s * (1.0 - s);
  const double expected = std::log(std::tanh(alpha / 2.0)) - 0.5 * std::log(1.0 + 22.0 * sigma2 * neg_d2);
  EXPECT_NEAR(log_marginal(post), expected, 1e-12);
}

TEST(LogMarginal, FiniteAndNonPositive) {
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 10; ++trial) {
    const auto league = random_league(rng, 30 + 10 * trial, 50);
    const auto post = fit(league.vectors, league.outcomes, make_hyperparams(0.1 * (trial + 1), 0.3, 0.5));
    const double lm = log_marginal(post);
    EXPECT_TRUE(std::isfinite(lm));
    EXPECT_LE(lm, 0.0);
  }
}

// Small prior variance keeps the Laplace gap itself far below the tolerance,
// so this isolates the evidence arithmetic.
TEST(LogMarginal, AgreesWithBruteForceIntegration) {
  std::mt19937_64 rng(27);
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto league = random_league(rng, n, 25);
    const auto hyper = no_jitter(0.005, 0.05, 0.6);
    const auto post = fit(league.vectors, league.outcomes, hyper);
    const auto k = gram_matrix(league.vectors, hyper.kernel, false);
    const double brute = testing::brute_force_log_evidence(k, league.outcomes, 0.6);
    EXPECT_NEAR(log_marginal(post), brute, 2e-3) << "N=" << n;
  }
}

TEST(PredictLatent, DisjointMatchHasPriorMoments) {
  std::mt19937_64 rng(28);
  const auto league = random_league(rng, 40, 50);
  const auto post = fit(league.vectors, league.outcomes, make_hyperparams(0.3, 0.7, 0.5));
  const auto lp = predict_latent(post, disjoint_match(1000));
  EXPECT_EQ(lp.mu, 0.0);
  EXPECT_NEAR(lp.var, 22.0 * 0.3, 1e-12);
  EXPECT_FALSE(lp.clamped);
}

TEST(PredictLatent, RepeatedMatchContracts) {
  const auto x = disjoint_match(0, 1);
  std::vector<MatchVector> xs(30, x);
  std::vector<Outcome> ys;
  for (int i = 0; i < 30; ++i) ys.push_back(static_cast<Outcome>(i % 3));
  const auto hyper = make_hyperparams(0.5, 0.4, 0.5);
  const auto post = fit(xs, ys, hyper);
  const auto lp = predict_latent(post, x);
  EXPECT_LT(lp.var, 22.0 * 0.5 + 0.4);
  EXPECT_GE(lp.var, 0.0);
}

TEST(ExpectedOutcomeProbs, PointMassIsExact) {
  const auto d = DrawParam::from_alpha(0.9);
  for (double mu : {-3.0, 0.0, 0.4, 7.5}) {
    const auto p = expected_outcome_probs(mu, 0.0, d);
    const auto q = outcome_probs(mu, d);
    EXPECT_EQ(p.p_w, q.p_w);
    EXPECT_EQ(p.p_d, q.p_d);
    EXPECT_EQ(p.p_l, q.p_l);
  }
}

TEST(ExpectedOutcomeProbs, ZeroMeanIsSymmetricAndNormalized) {
  for (double var : {1e-6, 0.3, 5.0, 80.0}) {
    const auto p = expected_outcome_probs(0.0, var, DrawParam::from_alpha(0.5));
    EXPECT_NEAR(p.p_w, p.p_l, 1e-15);
    EXPECT_NEAR(p.sum(), 1.0, 1e-15);
  }
}

TEST(ExpectedOutcomeProbs, AgreesWithMonteCarlo) {
  const auto p = expected_outcome_probs(1.2, 4.0, DrawParam::from_alpha(0.6));
  const auto mc = testing::monte_carlo_predictive(1.2, 4.0, 0.6, 1'000'000, 12345);
  EXPECT_NEAR(p.p_w, mc.p_w, 1e-3);
  EXPECT_NEAR(p.p_d, mc.p_d, 1e-3);
  EXPECT_NEAR(p.p_l, mc.p_l, 1e-3);
}

TEST(DualPrimal, SingleDecisiveMatch) {
  const auto hyper = no_jitter(1.0, 1.0, 0.5);
  const std::vector<MatchVector> xs{disjoint_match(0, 1)};
  const std::vector<Outcome> ys{Outcome::kTeam1Win};
  const auto dual = fit(xs, ys, hyper);
  const auto primal = primal_laplace_fit(xs, ys, 111, hyper);
  EXPECT_NEAR(predict_latent(dual, xs[0]).mu, primal.predict_latent(xs[0]).mu, 1e-8);
}

TEST(DualPrimal, PredictionsAgreeOnFiftyMatchLeague) {
  std::mt19937_64 rng(29);
  const auto league = random_league(rng, 50, 30);
  const auto hyper = no_jitter(0.4, 0.6, 0.7);
  const auto dual = fit(league.vectors, league.outcomes, hyper);
  const auto primal = primal_laplace_fit(league.dataset, hyper);
  const auto tests = random_vectors(rng, 25, 30);
  for (const auto& x : tests) {
    const auto a = predict_latent(dual, x);
    const auto b = primal.predict_latent(x);
    EXPECT_NEAR(a.mu, b.mu, 1e-6);
    EXPECT_NEAR(a.var, b.var, 1e-6);
    const auto pa = predict_outcomes(dual, x);
    const auto pb = primal.predict_outcomes(x);
    EXPECT_NEAR(pa.p_w, pb.p_w, 1e-6);
    EXPECT_NEAR(pa.p_d, pb.p_d, 1e-6);
    EXPECT_NEAR(pa.p_l, pb.p_l, 1e-6);
  }
}

TEST(SideSwap, FlipsPredictions) {
  std::mt19937_64 rng(30);
  const auto league = random_league(rng, 70, 40);
  std::vector<MatchVector> swapped;
  std::vector<Outcome> flipped_ys;
  for (std::size_t i = 0; i < league.vectors.size(); ++i) {
    swapped.push_back(league.vectors[i].swapped());
    flipped_ys.push_back(flipped(league.outcomes[i]));
  }
  const auto hyper = make_hyperparams(0.3, 0.4, 0.5);
  const auto a = fit(league.vectors, league.outcomes, hyper);
  const auto b = fit(swapped, flipped_ys, hyper);
  for (const auto& x : random_vectors(rng, 20, 40)) {
    const auto p = predict_outcomes(a, x);
    const auto q = predict_outcomes(b, x.swapped());
    EXPECT_NEAR(p.p_w, q.p_l, 1e-9);
    EXPECT_NEAR(p.p_d, q.p_d, 1e-9);
    EXPECT_NEAR(p.p_l, q.p_w, 1e-9);
    EXPECT_NEAR(p.sum(), 1.0, 1e-9);
  }
}

TEST(OptimizeHyperparams, BudgetOneReturnsInit) {
  std::mt19937_64 rng(31);
  const auto league = random_league(rng, 40, 40);
  const auto init = make_hyperparams(0.7, 0.2, 0.9);
  const auto r = optimize_hyperparams(league.vectors, league.outcomes, init, 1);
  EXPECT_EQ(r.hyper.kernel.sigma2, init.kernel.sigma2);
  EXPECT_EQ(r.hyper.kernel.sigma2_home, init.kernel.sigma2_home);
  EXPECT_EQ(r.hyper.draw.log_alpha(), init.draw.log_alpha());
  EXPECT_EQ(r.evaluations, 1);
}

TEST(OptimizeHyperparams, ImprovesEvidenceDeterministically) {
  std::mt19937_64 rng(32);
  const auto league = random_league(rng, 80, 40);
  const auto init = make_hyperparams(1.0, 1.0, 0.5);
  const double init_evidence = log_marginal(fit(league.vectors, league.outcomes, init));
  const auto r = optimize_hyperparams(league.vectors, league.outcomes, init, 60);
  EXPECT_GE(r.log_marginal, init_evidence);
  EXPECT_LE(r.evaluations, 60);
  EXPECT_NEAR(log_marginal(fit(league.vectors, league.outcomes, r.hyper)), r.log_marginal, 1e-9);
  const auto again = optimize_hyperparams(league.vectors, league.outcomes, init, 60);
  EXPECT_EQ(again.log_marginal, r.log_marginal);
  EXPECT_EQ(again.hyper.kernel.sigma2, r.hyper.kernel.sigma2);
}

TEST(OptimizeHyperparams, ZeroHomeVarianceStaysOff) {
  std::mt19937_64 rng(33);
  const auto league = random_league(rng, 40, 40, 0.3, 0.5, false);
  const auto r = optimize_hyperparams(league.vectors, league.outcomes, make_hyperparams(1.0, 0.0, 0.5), 30);
  EXPECT_EQ(r.hyper.kernel.sigma2_home, 0.0);
}

TEST(GpPredictor, UnknownPlayersGetPriorVariance) {
  std::mt19937_64 rng(34);
  const auto league = random_league(rng, 30, 40);
  TrainedModel model{league.dataset.registry(), fit(league.dataset, make_hyperparams(0.2, 0.0, 0.5))};
  auto rec = league.dataset.records()[0];
  rec.lineup1 = testing::numbered_players("new", 1);
  rec.lineup2 = testing::numbered_players("new", 20);
  rec.home = HomeSide::kNeutral;
  const auto v = project_match(rec, model.registry);
  EXPECT_GE(v.plus[0], model.registry.size());
  const auto lp = predict_latent(model.posterior, v);
  EXPECT_EQ(lp.mu, 0.0);
  EXPECT_NEAR(lp.var, 22.0 * 0.2, 1e-12);
  const GpPredictor pred(model);
  const auto p = pred.predict(rec);
  ASSERT_TRUE(p);
  EXPECT_NEAR(p->p_w, p->p_l, 1e-15);
}

}  // namespace
}  // namespace playerkern
