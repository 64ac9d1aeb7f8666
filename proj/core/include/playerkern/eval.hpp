#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "playerkern/match_data.hpp"
#include "playerkern/predictor.hpp"
#include "playerkern/rao_kupper.hpp"

namespace playerkern {

struct LogLossOptions {
  // When set, probabilities below `floor` are raised to it instead of raising
  // an error; EvalReport::clipped counts how often that happened.
  bool clip = false;
  double floor = 1e-15;
};

// -(1/T) sum log p_i(y_i), natural log. Throws NumericalError naming the match
// (by id when `match_ids` is given, otherwise by position) if a realized
// outcome has probability <= 0 and clipping is off.
double log_loss(std::span<const PredictiveDistribution> preds, std::span<const Outcome> outcomes,
                const LogLossOptions& options = {}, std::span<const std::string> match_ids = {});

struct EvalRow {
  std::string match_id;
  PredictiveDistribution probs;
  Outcome outcome = Outcome::kDraw;
  double loss = 0.0;
};

struct EvalReport {
  std::string model;
  std::size_t n_train = 0;     // N
  std::size_t num_players = 0; // P
  std::size_t scored = 0;      // T
  std::size_t skipped = 0;     // test matches the model declined
  std::size_t clipped = 0;
  double avg_log_loss = 0.0;   // NaN when nothing was scored
  std::vector<EvalRow> rows;
};

// Scores every model over the same test set.
std::vector<EvalReport> evaluate(std::span<const Predictor* const> models, const Dataset& test,
                                 std::size_t n_train, std::size_t num_players, const LogLossOptions& options = {});

// Aligned text table: model, N, P, T, log loss (3 decimals).
void write_summary_table(std::ostream& out, std::span<const EvalReport> reports);
// `model,N,P,T,avg_log_loss`
void write_summary_csv(std::ostream& out, std::span<const EvalReport> reports);
// `model,match_id,p_w,p_d,p_l,outcome,loss`
void write_per_match_csv(std::ostream& out, std::span<const EvalReport> reports);

}  // namespace playerkern
