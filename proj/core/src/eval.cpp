#include "playerkern/eval.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include "playerkern/errors.hpp"

namespace playerkern {

namespace {

double realized_log_prob(const PredictiveDistribution& p, Outcome y, const LogLossOptions& options,
                         const std::string& where, std::size_t* clipped) {
  const double prob = p[y];
  if (!std::isfinite(prob)) throw NumericalError(where + ": non-finite predicted probability");
  if (prob > 0.0 && (!options.clip || prob >= options.floor)) return std::log(prob);
  if (!options.clip) {
    std::ostringstream msg;
    msg << where << ": realized outcome " << outcome_token(y) << " was predicted with probability " << prob;
    throw NumericalError(msg.str());
  }
  if (clipped) ++*clipped;
  return std::log(options.floor);
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

}  // namespace

double log_loss(std::span<const PredictiveDistribution> preds, std::span<const Outcome> outcomes,
                const LogLossOptions& options, std::span<const std::string> match_ids) {
  if (preds.size() != outcomes.size()) throw std::invalid_argument("predictions and outcomes differ in length");
  if (preds.empty()) throw std::invalid_argument("log loss needs at least one prediction");
  if (!match_ids.empty() && match_ids.size() != preds.size()) {
    throw std::invalid_argument("match ids and predictions differ in length");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const auto where = match_ids.empty() ? "prediction #" + std::to_string(i) : "match '" + match_ids[i] + "'";
    total -= realized_log_prob(preds[i], outcomes[i], options, where, nullptr);
  }
  return total / static_cast<double>(preds.size());
}

std::vector<EvalReport> evaluate(std::span<const Predictor* const> models, const Dataset& test,
                                 std::size_t n_train, std::size_t num_players, const LogLossOptions& options) {
  std::vector<EvalReport> reports;
  reports.reserve(models.size());
  for (const auto* model : models) {
    EvalReport rep;
    rep.model = model->name();
    rep.n_train = n_train;
    rep.num_players = num_players;
    double total = 0.0;
    for (const auto& rec : test.records()) {
      std::optional<PredictiveDistribution> p;
      try {
        p = model->predict(rec);
      } catch (const DataError& e) {
        throw DataError(rep.model + " on match '" + rec.match_id + "': " + e.what());
      } catch (const NumericalError& e) {
        throw NumericalError(rep.model + " on match '" + rec.match_id + "': " + e.what());
      }
      if (!p) {
        ++rep.skipped;
        continue;
      }
      const double loss =
          -realized_log_prob(*p, rec.outcome, options, rep.model + " on match '" + rec.match_id + "'", &rep.clipped);
      total += loss;
      rep.rows.push_back({rec.match_id, *p, rec.outcome, loss});
    }
    rep.scored = rep.rows.size();
    rep.avg_log_loss =
        rep.scored ? total / static_cast<double>(rep.scored) : std::numeric_limits<double>::quiet_NaN();
    reports.push_back(std::move(rep));
  }
  return reports;
}

void write_summary_table(std::ostream& out, std::span<const EvalReport> reports) {
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %8s %8s %6s %10s\n", "model", "N", "P", "T", "log_loss");
  out << line;
  for (const auto& r : reports) {
    const auto loss = std::isnan(r.avg_log_loss) ? std::string("n/a") : fmt("%.3f", r.avg_log_loss);
    std::snprintf(line, sizeof line, "%-14s %8zu %8zu %6zu %10s", r.model.c_str(), r.n_train, r.num_players,
                  r.scored, loss.c_str());
    out << line;
    if (r.skipped) out << "  (" << r.skipped << " skipped)";
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const EvalReport> reports) {
  out << "model,N,P,T,avg_log_loss\n";
  for (const auto& r : reports) {
    out << csv_escape(r.model) << ',' << r.n_train << ',' << r.num_players << ',' << r.scored << ','
        << fmt("%.17g", r.avg_log_loss) << '\n';
  }
}

void write_per_match_csv(std::ostream& out, std::span<const EvalReport> reports) {
  out << "model,match_id,p_w,p_d,p_l,outcome,loss\n";
  for (const auto& r : reports) {
    for (const auto& row : r.rows) {
      out << csv_escape(r.model) << ',' << csv_escape(row.match_id) << ',' << fmt("%.17g", row.probs.p_w) << ','
          << fmt("%.17g", row.probs.p_d) << ',' << fmt("%.17g", row.probs.p_l) << ',' << outcome_token(row.outcome)
          << ',' << fmt("%.17g", row.loss) << '\n';
    }
  }
}

}  // namespace playerkern
