#include "playerkern/baselines.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <vector>

#include "playerkern/errors.hpp"

namespace playerkern {

EloState::EloState(EloConfig config) : config_(config) {}

double EloState::rating(const std::string& team) const {
  const auto it = ratings_.find(team);
  return it == ratings_.end() ? config_.initial_rating : it->second;
}

double EloState::total() const {
  double s = 0.0;
  for (const auto& [team, r] : ratings_) s += r;
  return s;
}

double elo_delta(double r1, double r2, HomeSide home, double home_advantage) {
  double bonus = 0.0;
  if (home == HomeSide::kTeam1) bonus = home_advantage;
  if (home == HomeSide::kTeam2) bonus = -home_advantage;
  return r1 - r2 + bonus;
}

double elo_expected(double r1, double r2, HomeSide home, double home_advantage) {
  return 1.0 / (1.0 + std::pow(10.0, -elo_delta(r1, r2, home, home_advantage) / 400.0));
}

double elo_score(Outcome y) {
  switch (y) {
    case Outcome::kTeam1Win: return 1.0;
    case Outcome::kDraw: return 0.5;
    case Outcome::kTeam2Win: break;
  }
  return 0.0;
}

void elo_update_in_place(EloState& state, const MatchRecord& rec) {
  const auto& cfg = state.config();
  const double r1 = state.rating(rec.team1);
  const double r2 = state.rating(rec.team2);
  const double change = cfg.k_factor * (elo_score(rec.outcome) - elo_expected(r1, r2, rec.home, cfg.home_advantage));
  state.set_rating(rec.team1, r1 + change);
  state.set_rating(rec.team2, r2 - change);
}

EloState elo_update(EloState state, const MatchRecord& rec) {
  elo_update_in_place(state, rec);
  return state;
}

double elo_latent(double delta) { return delta * std::numbers::ln10 / 400.0; }

PredictiveDistribution elo_rk_predict(double r1, double r2, HomeSide home, double home_advantage, DrawParam d) {
  return outcome_probs(elo_latent(elo_delta(r1, r2, home, home_advantage)), d);
}

DrawParam fit_draw_param(std::span<const double> latents, std::span<const Outcome> outcomes) {
  if (latents.size() != outcomes.size()) throw std::invalid_argument("latents and outcomes differ in length");
  if (latents.empty()) return DrawParam{};
  auto objective = [&](double log_alpha) {
    const auto d = DrawParam::from_log_alpha(log_alpha);
    double s = 0.0;
    for (std::size_t i = 0; i < latents.size(); ++i) s += log_likelihood(outcomes[i], latents[i], d);
    return s;
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(1e-6);
  double hi = std::log(20.0);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = objective(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = objective(x1);
    }
  }
  return DrawParam::from_log_alpha(0.5 * (lo + hi));
}

EloModel fit_elo_model(const Dataset& train, const EloConfig& config) {
  EloState state(config);
  std::vector<double> latents;
  std::vector<Outcome> outcomes;
  latents.reserve(train.num_matches());
  outcomes.reserve(train.num_matches());
  for (const auto& rec : train.records()) {
    latents.push_back(
        elo_latent(elo_delta(state.rating(rec.team1), state.rating(rec.team2), rec.home, config.home_advantage)));
    outcomes.push_back(rec.outcome);
    elo_update_in_place(state, rec);
  }
  return {std::move(state), fit_draw_param(latents, outcomes)};
}

std::optional<PredictiveDistribution> EloPredictor::predict(const MatchRecord& rec) const {
  const auto& s = model_.state;
  return elo_rk_predict(s.rating(rec.team1), s.rating(rec.team2), rec.home, s.config().home_advantage, model_.draw);
}

PredictiveDistribution odds_to_probs(double odds_w, double odds_d, double odds_l) {
  for (double o : {odds_w, odds_d, odds_l}) {
    if (!std::isfinite(o) || !(o > 1.0)) throw DataError("decimal odds must be finite and > 1");
  }
  const double iw = 1.0 / odds_w;
  const double id = 1.0 / odds_d;
  const double il = 1.0 / odds_l;
  const double total = iw + id + il;
  return {iw / total, id / total, il / total};
}

OddsTable parse_odds(std::istream& in) {
  std::string line;
  std::size_t line_no = 1;
  if (!std::getline(in, line)) throw DataError("odds file: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "match_id,odds_w,odds_d,odds_l") throw DataError("odds file: unexpected header");
  OddsTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto at = "odds file line " + std::to_string(line_no) + ": ";
    const auto f = split_csv_line(line);
    if (f.size() != 4) throw DataError(at + "expected 4 fields");
    double o[3];
    for (int i = 0; i < 3; ++i) {
      std::size_t used = 0;
      try {
        o[i] = std::stod(f[static_cast<std::size_t>(i) + 1], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != f[static_cast<std::size_t>(i) + 1].size()) {
        throw DataError(at + "bad number '" + f[static_cast<std::size_t>(i) + 1] + "'");
      }
    }
    try {
      if (!table.emplace(f[0], odds_to_probs(o[0], o[1], o[2])).second) {
        throw DataError("duplicate match_id '" + f[0] + "'");
      }
    } catch (const DataError& e) {
      throw DataError(at + e.what());
    }
  }
  return table;
}

OddsTable load_odds(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open odds file '" + path + "'");
  return parse_odds(in);
}

std::optional<PredictiveDistribution> OddsPredictor::predict(const MatchRecord& rec) const {
  const auto it = table_.find(rec.match_id);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

PredictiveDistribution uniform_probs() { return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; }

}  // namespace playerkern
