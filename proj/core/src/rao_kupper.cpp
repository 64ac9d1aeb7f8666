#include "playerkern/rao_kupper.hpp"

#include <cmath>

namespace playerkern {

namespace {

// Logistic sigmoid, evaluated on the side that does not overflow.
double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// sigma(x) * sigma(-x), accurate in both tails.
double sigmoid_curvature(double x) {
  const double e = std::exp(-std::abs(x));
  const double denom = 1.0 + e;
  return e / (denom * denom);
}

}  // namespace

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double log_expm1_twice(double alpha) {
  const double t = 2.0 * alpha;
  if (t > 1.0) return t + std::log1p(-std::exp(-t));
  return std::log(std::expm1(t));
}

PredictiveDistribution outcome_probs(double f, DrawParam d) {
  const double a = d.alpha();
  const double log_w = -softplus(a - f);
  const double log_l = -softplus(a + f);
  PredictiveDistribution p;
  p.p_w = std::exp(log_w);
  p.p_l = std::exp(log_l);
  p.p_d = std::exp(log_expm1_twice(a) + (log_w + log_l));
  return p;
}

double log_likelihood(Outcome y, double f, DrawParam d) {
  const double a = d.alpha();
  switch (y) {
    case Outcome::kTeam1Win: return -softplus(a - f);
    case Outcome::kTeam2Win: return -softplus(a + f);
    case Outcome::kDraw: break;
  }
  return log_expm1_twice(a) - (softplus(a - f) + softplus(a + f));
}

LogLikDerivs log_likelihood_derivs(Outcome y, double f, DrawParam d) {
  const double a = d.alpha();
  // d/df [-softplus(a - f)] = sigma(a - f);  d/df [-softplus(a + f)] = -sigma(a + f).
  switch (y) {
    case Outcome::kTeam1Win: return {sigmoid(a - f), -sigmoid_curvature(a - f)};
    case Outcome::kTeam2Win: return {-sigmoid(a + f), -sigmoid_curvature(a + f)};
    case Outcome::kDraw: break;
  }
  double d1 = 0.0;
  if (std::abs(f) < 1.0) {
    // sigma(a-f) - sigma(a+f) = -2 e^{-a} sinh(f) / ((1+e^{f-a})(1+e^{-f-a})), no cancellation.
    d1 = -2.0 * std::exp(-a) * std::sinh(f) / ((1.0 + std::exp(f - a)) * (1.0 + std::exp(-f - a)));
  } else {
    d1 = sigmoid(a - f) - sigmoid(a + f);
  }
  return {d1, -sigmoid_curvature(a - f) - sigmoid_curvature(a + f)};
}

}  // namespace playerkern
