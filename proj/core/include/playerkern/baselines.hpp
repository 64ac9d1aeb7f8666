#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include "playerkern/match_data.hpp"
#include "playerkern/predictor.hpp"
#include "playerkern/rao_kupper.hpp"

namespace playerkern {

// ---------------------------------------------------------------------------
// Elo

struct EloConfig {
  double initial_rating = 1500.0;
  double k_factor = 32.0;
  double home_advantage = 100.0;  // rating points credited to the host
};

class EloState {
 public:
  explicit EloState(EloConfig config = {});

  // Unrated teams sit at the initial rating.
  double rating(const std::string& team) const;
  void set_rating(const std::string& team, double r) { ratings_[team] = r; }

  const std::map<std::string, double>& ratings() const { return ratings_; }
  const EloConfig& config() const { return config_; }

  // Sum over rated teams.
  double total() const;

 private:
  EloConfig config_;
  std::map<std::string, double> ratings_;
};

// Rating difference seen by team1, home bonus included.
double elo_delta(double r1, double r2, HomeSide home, double home_advantage);

// 1 / (1 + 10^(-delta/400)).
double elo_expected(double r1, double r2, HomeSide home, double home_advantage);

// Score 1, 1/2, 0 for W, D, L from team1's perspective.
double elo_score(Outcome y);

// One online step. Absent teams enter at the initial rating; the two changes
// cancel, so the total rating mass is conserved.
EloState elo_update(EloState state, const MatchRecord& rec);
void elo_update_in_place(EloState& state, const MatchRecord& rec);

// Latent advantage implied by a rating difference: delta * ln(10) / 400.
double elo_latent(double delta);

PredictiveDistribution elo_rk_predict(double r1, double r2, HomeSide home, double home_advantage, DrawParam d);

// Maximum-likelihood draw margin for fixed latents, by golden-section search
// on log(alpha) over [log 1e-6, log 20].
DrawParam fit_draw_param(std::span<const double> latents, std::span<const Outcome> outcomes);

struct EloModel {
  EloState state;  // ratings after the last training match
  DrawParam draw;
};

// Folds the updates over the date-ordered training set and fits alpha on
// the pre-match rating differences.
EloModel fit_elo_model(const Dataset& train, const EloConfig& config = {});

// Predicts with ratings frozen at the end of training.
class EloPredictor : public Predictor {
 public:
  explicit EloPredictor(EloModel model) : model_(std::move(model)) {}
  std::string name() const override { return "Elo"; }
  std::optional<PredictiveDistribution> predict(const MatchRecord& rec) const override;
  const EloModel& model() const { return model_; }

 private:
  EloModel model_;
};

// ---------------------------------------------------------------------------
// Betting odds

// Normalized inverse decimal odds. Throws DataError unless every odd is a
// finite number > 1.
PredictiveDistribution odds_to_probs(double odds_w, double odds_d, double odds_l);

using OddsTable = std::unordered_map<std::string, PredictiveDistribution>;

// CSV with header `match_id,odds_w,odds_d,odds_l`.
OddsTable parse_odds(std::istream& in);
OddsTable load_odds(const std::string& path);

class OddsPredictor : public Predictor {
 public:
  explicit OddsPredictor(OddsTable table) : table_(std::move(table)) {}
  std::string name() const override { return "Odds"; }
  std::optional<PredictiveDistribution> predict(const MatchRecord& rec) const override;

 private:
  OddsTable table_;
};

// ---------------------------------------------------------------------------
// Uniform

PredictiveDistribution uniform_probs();

class UniformPredictor : public Predictor {
 public:
  std::string name() const override { return "Random"; }
  std::optional<PredictiveDistribution> predict(const MatchRecord&) const override { return uniform_probs(); }
};

}  // namespace playerkern
