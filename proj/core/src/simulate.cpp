#include "playerkern/simulate.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

#include "playerkern/errors.hpp"

namespace playerkern {

namespace {

// Distribution code is written out here rather than taken from <random> so
// the sampled leagues are identical across standard library implementations.
class SimRng {
 public:
  explicit SimRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return static_cast<std::size_t>(x % n);
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::string padded(const char* prefix, int value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%0*d", prefix, width, value);
  return buf;
}

Outcome sample_outcome(const PredictiveDistribution& p, SimRng& rng) {
  const double u = rng.uniform();
  if (u < p.p_w) return Outcome::kTeam1Win;
  if (u < p.p_w + p.p_d) return Outcome::kDraw;
  return Outcome::kTeam2Win;
}

}  // namespace

void SimConfig::validate() const {
  if (num_teams < 2) throw std::invalid_argument("need at least two teams");
  if (num_players < 2 * static_cast<int>(kLineupSize)) throw std::invalid_argument("need at least 22 players");
  if (num_players / num_teams < static_cast<int>(kLineupSize)) {
    throw std::invalid_argument("num_players / num_teams must be at least 11");
  }
  if (matches_per_team < 1) throw std::invalid_argument("matches_per_team must be >= 1");
  if (!(true_sigma2 >= 0.0) || !std::isfinite(true_sigma2)) throw std::invalid_argument("true_sigma2 must be >= 0");
  if (!(true_alpha > 0.0) || !std::isfinite(true_alpha)) throw std::invalid_argument("true_alpha must be > 0");
  if (!std::isfinite(true_home)) throw std::invalid_argument("true_home must be finite");
  if (max_swaps < 0) throw std::invalid_argument("max_swaps must be >= 0");
  if (!start_date.ok()) throw std::invalid_argument("invalid start date");
}

SimResult simulate_dataset(const SimConfig& config) {
  config.validate();
  SimRng rng(config.seed);
  const int teams = config.num_teams;
  const int pool_size = config.num_players / teams;
  const int id_width = teams >= 100 ? 3 : 2;

  GroundTruth truth;
  truth.home_effect = config.true_home;
  truth.draw = DrawParam::from_alpha(config.true_alpha);

  std::vector<std::string> team_names;
  std::vector<std::vector<PlayerId>> pools(static_cast<std::size_t>(teams));
  const double skill_sd = std::sqrt(config.true_sigma2);
  for (int t = 0; t < teams; ++t) {
    team_names.push_back(padded("Team", t + 1, id_width));
    for (int p = 0; p < pool_size; ++p) {
      auto id = padded(padded("T", t + 1, id_width).append("-P").c_str(), p + 1, 2);
      truth.skills.emplace(id, skill_sd * rng.normal());
      pools[static_cast<std::size_t>(t)].push_back(std::move(id));
    }
  }

  auto draw_lineup = [&](int team) {
    const auto& pool = pools[static_cast<std::size_t>(team)];
    std::vector<PlayerId> lineup(pool.begin(), pool.begin() + kLineupSize);
    std::vector<PlayerId> reserves(pool.begin() + kLineupSize, pool.end());
    const auto max_k = std::min<std::size_t>(static_cast<std::size_t>(config.max_swaps), reserves.size());
    const auto k = rng.below(max_k + 1);
    std::vector<std::size_t> slots(kLineupSize);
    for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(slots[i], slots[i + rng.below(slots.size() - i)]);
      std::swap(reserves[i], reserves[i + rng.below(reserves.size() - i)]);
      std::swap(lineup[slots[i]], reserves[i]);
    }
    return lineup;
  };

  // Circle-method round robin; a dummy slot gives a bye when the count is odd.
  const int slots = teams % 2 == 0 ? teams : teams + 1;
  std::vector<MatchRecord> records;
  int serial = 0;
  for (int round = 0; round < config.matches_per_team; ++round) {
    const int r = round % (slots - 1);
    const bool mirror = (round / (slots - 1)) % 2 == 1;
    std::vector<int> order(static_cast<std::size_t>(slots));
    order[0] = 0;
    for (int i = 1; i < slots; ++i) order[static_cast<std::size_t>(i)] = 1 + (i - 1 + r) % (slots - 1);
    const Date date{std::chrono::sys_days{config.start_date} + std::chrono::days{round}};
    for (int i = 0; i < slots / 2; ++i) {
      int a = order[static_cast<std::size_t>(i)];
      int b = order[static_cast<std::size_t>(slots - 1 - i)];
      if (a >= teams || b >= teams) continue;
      if (mirror) std::swap(a, b);

      MatchRecord rec;
      rec.match_id = padded("M", ++serial, 6);
      rec.date = date;
      rec.competition = round % 4 == 3 ? "cup" : "league";
      rec.team1 = team_names[static_cast<std::size_t>(a)];
      rec.team2 = team_names[static_cast<std::size_t>(b)];
      const double u = rng.uniform();
      rec.home = u < 0.4 ? HomeSide::kTeam1 : (u < 0.8 ? HomeSide::kTeam2 : HomeSide::kNeutral);
      rec.lineup1 = draw_lineup(a);
      rec.lineup2 = draw_lineup(b);

      double f = 0.0;
      for (const auto& p : rec.lineup1) f += truth.skills.at(p);
      for (const auto& p : rec.lineup2) f -= truth.skills.at(p);
      if (rec.home == HomeSide::kTeam1) f += config.true_home;
      if (rec.home == HomeSide::kTeam2) f -= config.true_home;
      rec.outcome = sample_outcome(outcome_probs(f, truth.draw), rng);
      truth.latent.emplace(rec.match_id, f);
      records.push_back(std::move(rec));
    }
  }
  return {Dataset::from_records(std::move(records)), std::move(truth)};
}

Date holdout_cutoff(const SimConfig& config, double train_fraction) {
  const auto rounds = static_cast<int>(std::ceil(train_fraction * config.matches_per_team - 1e-9));
  return Date{std::chrono::sys_days{config.start_date} + std::chrono::days{rounds}};
}

double bayes_log_loss(const Dataset& test, const GroundTruth& truth) {
  if (test.empty()) throw std::invalid_argument("empty test set");
  double total = 0.0;
  for (const auto& rec : test.records()) {
    const auto it = truth.latent.find(rec.match_id);
    if (it == truth.latent.end()) throw DataError("no ground truth for match '" + rec.match_id + "'");
    total -= log_likelihood(rec.outcome, it->second, truth.draw);
  }
  return total / static_cast<double>(test.num_matches());
}

void write_truth(std::ostream& out, const SimResult& sim) {
  out << "match_id,true_f,p_w,p_d,p_l\n";
  char buf[160];
  for (const auto& rec : sim.dataset.records()) {
    const double f = sim.truth.latent.at(rec.match_id);
    const auto p = outcome_probs(f, sim.truth.draw);
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,%.17g\n", f, p.p_w, p.p_d, p.p_l);
    out << rec.match_id << buf;
  }
}

}  // namespace playerkern
