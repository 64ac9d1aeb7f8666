#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>

#include "playerkern/match_data.hpp"
#include "playerkern/rao_kupper.hpp"

namespace playerkern {

// Synthetic league: each team owns a pool of num_players / num_teams players,
// the first 11 being its regular starters. Teams meet in repeated round
// robins, one round per day; every fourth round is tagged "cup", the rest
// "league".
struct SimConfig {
  std::uint64_t seed = 7;
  int num_players = 280;
  int num_teams = 20;
  int matches_per_team = 80;  // rounds played; one match per team per round
  double true_sigma2 = 0.04;  // per-player skill variance
  double true_alpha = 0.5;
  double true_home = 0.3;     // latent bonus for the host
  int max_swaps = 3;          // starters replaced from the pool per match, at most
  Date start_date{std::chrono::year{2016}, std::chrono::month{1}, std::chrono::day{1}};

  // Throws std::invalid_argument for infeasible settings.
  void validate() const;
};

struct GroundTruth {
  std::unordered_map<PlayerId, double> skills;
  std::unordered_map<std::string, double> latent;  // true f per match_id
  double home_effect = 0.0;
  DrawParam draw;
};

struct SimResult {
  Dataset dataset;
  GroundTruth truth;
};

SimResult simulate_dataset(const SimConfig& config);

// First date at or after which roughly (1 - train_fraction) of the rounds fall.
Date holdout_cutoff(const SimConfig& config, double train_fraction = 0.75);

// Average log loss of the generator's own probabilities on `test`.
double bayes_log_loss(const Dataset& test, const GroundTruth& truth);

// `match_id,true_f,p_w,p_d,p_l`
void write_truth(std::ostream& out, const SimResult& sim);

}  // namespace playerkern
