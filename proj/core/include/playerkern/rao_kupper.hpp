#pragma once

#include <cmath>
#include <stdexcept>

#include "playerkern/match_data.hpp"

namespace playerkern {

// Draw margin alpha > 0, stored as log(alpha) so optimizers work unconstrained.
class DrawParam {
 public:
  DrawParam() = default;

  static DrawParam from_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite and > 0");
    return from_log_alpha(std::log(alpha));
  }
  static DrawParam from_log_alpha(double log_alpha) {
    if (!std::isfinite(log_alpha)) throw std::invalid_argument("log alpha must be finite");
    DrawParam d;
    d.log_alpha_ = log_alpha;
    return d;
  }

  double alpha() const { return std::exp(log_alpha_); }
  double log_alpha() const { return log_alpha_; }

 private:
  double log_alpha_ = std::log(0.5);
};

struct PredictiveDistribution {
  double p_w = 1.0 / 3.0;
  double p_d = 1.0 / 3.0;
  double p_l = 1.0 / 3.0;

  double operator[](Outcome y) const {
    switch (y) {
      case Outcome::kTeam1Win: return p_w;
      case Outcome::kDraw: return p_d;
      case Outcome::kTeam2Win: return p_l;
    }
    return 0.0;
  }
  double sum() const { return p_w + p_d + p_l; }
};

struct LogLikDerivs {
  double d1 = 0.0;
  double d2 = 0.0;
};

// log(1 + exp(x)) without overflow.
double softplus(double x);
// log(exp(2a) - 1) for a > 0, accurate for tiny and large a.
double log_expm1_twice(double alpha);

// Ternary probabilities for latent team1 advantage f:
//   p_W = 1/(1+exp(alpha-f)),  p_L = 1/(1+exp(alpha+f)),
//   p_D = (exp(2 alpha)-1) p_W p_L.
PredictiveDistribution outcome_probs(double f, DrawParam d);

double log_likelihood(Outcome y, double f, DrawParam d);

// First and second derivative of log_likelihood in f; d2 <= 0 always.
LogLikDerivs log_likelihood_derivs(Outcome y, double f, DrawParam d);

}  // namespace playerkern
