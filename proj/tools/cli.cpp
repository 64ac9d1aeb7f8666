#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "playerkern/baselines.hpp"
#include "playerkern/errors.hpp"
#include "playerkern/eval.hpp"
#include "playerkern/gp_classifier.hpp"
#include "playerkern/match_data.hpp"
#include "playerkern/model_io.hpp"
#include "playerkern/player_kernel.hpp"
#include "playerkern/simulate.hpp"

namespace playerkern::cli {

namespace {

struct HyperFlags {
  double sigma2 = 1.0;
  double sigma2_home = 1.0;
  double alpha = 0.5;
  std::optional<double> jitter;
  bool optimize = false;
  int budget = 200;

  void add_to(CLI::App& app) {
    app.add_option("--sigma2", sigma2, "Player-kernel variance")->capture_default_str();
    app.add_option("--sigma2-home", sigma2_home, "Home-feature variance (0 disables the feature)")
        ->capture_default_str();
    app.add_option("--alpha", alpha, "Draw margin alpha > 0")->capture_default_str();
    app.add_option("--jitter", jitter, "Diagonal jitter (default 1e-6 * sigma2)");
    app.add_flag("--optimize", optimize, "Maximize the Laplace evidence over the hyperparameters first");
    app.add_option("--budget", budget, "Evidence evaluations for --optimize")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }

  Hyperparams hyper() const {
    Hyperparams h = make_hyperparams(sigma2, sigma2_home, alpha);
    if (jitter) h.kernel.jitter = *jitter;
    h.validate();
    return h;
  }
};

struct EloFlags {
  EloConfig config;

  void add_to(CLI::App& app) {
    app.add_option("--elo-k", config.k_factor, "Elo K factor")->capture_default_str();
    app.add_option("--elo-home", config.home_advantage, "Elo home advantage in rating points")
        ->capture_default_str();
    app.add_option("--elo-init", config.initial_rating, "Initial Elo rating")->capture_default_str();
  }

  void validate() const {
    if (!(config.k_factor > 0.0)) throw std::invalid_argument("--elo-k must be > 0");
    if (!(config.home_advantage >= 0.0)) throw std::invalid_argument("--elo-home must be >= 0");
    if (!std::isfinite(config.initial_rating)) throw std::invalid_argument("--elo-init must be finite");
  }
};

// Writes to the file at `path`, or to `fallback` when the path is empty.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) {
      stream_ = &fallback;
    } else {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw DataError("cannot open '" + path + "' for writing");
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }
  void finish() {
    stream_->flush();
    if (!*stream_) throw DataError("write failure");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

Date parse_date_flag(const std::string& text, const char* flag) {
  const auto d = parse_date(text);
  if (!d) throw std::invalid_argument(std::string(flag) + " expects YYYY-MM-DD, got '" + text + "'");
  return *d;
}

TrainedModel train_model(const Dataset& train, const HyperFlags& flags, unsigned threads, std::ostream& err) {
  FitOptions options;
  options.threads = threads;
  Hyperparams hyper = flags.hyper();
  if (flags.optimize) {
    const auto opt = optimize_hyperparams(train, hyper, flags.budget, options);
    hyper = opt.hyper;
    char line[200];
    std::snprintf(line, sizeof line,
                  "hyperparameters: sigma2=%.6g sigma2_home=%.6g alpha=%.6g (log evidence %.6f, %d evaluations)\n",
                  hyper.kernel.sigma2, hyper.kernel.sigma2_home, hyper.draw.alpha(), opt.log_marginal,
                  opt.evaluations);
    err << line;
  }
  TrainedModel model{train.registry(), fit(train, hyper, options)};
  return model;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Win/draw/loss prediction for team matches with a player-kernel Gaussian process"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read flags from a TOML/INI file");
  unsigned threads = 1;
  app.add_option("--threads", threads, "Worker threads for kernel assembly")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);

  std::function<void()> action;

  // train
  auto* train_cmd = app.add_subcommand("train", "Fit the Laplace posterior and save the model");
  std::string train_path;
  std::string model_out;
  HyperFlags train_hyper;
  train_cmd->add_option("--train", train_path, "Training matches CSV")->required();
  train_cmd->add_option("--model-out", model_out, "Output model file")->required();
  train_hyper.add_to(*train_cmd);
  train_cmd->callback([&] {
    action = [&] {
      const auto train = load_dataset(train_path);
      if (train.empty()) throw DataError("training set is empty");
      const auto model = train_model(train, train_hyper, threads, err);
      save_model_file(model_out, model);
      err << "trained on N=" << train.num_matches() << " matches, P=" << train.num_players()
          << " players; log evidence " << log_marginal(model.posterior) << '\n';
    };
  });

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Predict outcome probabilities with a saved model");
  std::string model_path;
  std::string test_path;
  std::string predict_out;
  predict_cmd->add_option("--model", model_path, "Model file from `train`")->required();
  predict_cmd->add_option("--test", test_path, "Matches CSV to predict")->required();
  predict_cmd->add_option("--out", predict_out, "Output CSV (default: standard output)");
  predict_cmd->callback([&] {
    action = [&] {
      const auto model = load_model_file(model_path);
      const auto test = load_dataset(test_path);
      Sink sink(predict_out, out);
      *sink << "match_id,p_w,p_d,p_l\n";
      char buf[100];
      for (const auto& rec : test.records()) {
        const auto lp = predict_latent(model.posterior, project_match(rec, model.registry));
        if (lp.clamped) err << "warning: negative predictive variance clamped for match '" << rec.match_id << "'\n";
        const auto p = expected_outcome_probs(lp.mu, lp.var, model.posterior.hyper.draw);
        std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", p.p_w, p.p_d, p.p_l);
        *sink << csv_escape(rec.match_id) << buf;
      }
      sink.finish();
    };
  });

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score models by average log loss on a test set");
  std::string eval_train;
  std::string eval_test;
  std::string eval_data;
  std::string eval_cutoff;
  std::vector<std::string> model_names{"gp", "elo", "random"};
  std::string odds_path;
  std::string summary_csv;
  std::string per_match_csv;
  bool clip = false;
  HyperFlags eval_hyper;
  EloFlags eval_elo;
  auto* opt_train = eval_cmd->add_option("--train", eval_train, "Training matches CSV");
  auto* opt_test = eval_cmd->add_option("--test", eval_test, "Test matches CSV");
  auto* opt_data = eval_cmd->add_option("--data", eval_data, "Single matches CSV to split with --cutoff");
  auto* opt_cutoff = eval_cmd->add_option("--cutoff", eval_cutoff, "Split date YYYY-MM-DD (test = on/after)");
  opt_data->excludes(opt_train)->excludes(opt_test)->needs(opt_cutoff);
  opt_cutoff->needs(opt_data);
  opt_train->needs(opt_test);
  opt_test->needs(opt_train);
  eval_cmd->add_option("--models", model_names, "Comma-separated subset of gp,elo,odds,random")
      ->delimiter(',')
      ->check(CLI::IsMember({"gp", "elo", "odds", "random"}))
      ->capture_default_str();
  eval_cmd->add_option("--odds", odds_path, "Odds CSV (match_id,odds_w,odds_d,odds_l) for the odds model");
  eval_cmd->add_option("--csv", summary_csv, "Write the summary as CSV (model,N,P,T,avg_log_loss)");
  eval_cmd->add_option("--per-match", per_match_csv, "Write per-match predictions and losses as CSV");
  eval_cmd->add_flag("--clip", clip, "Floor zero probabilities at 1e-15 instead of failing");
  eval_hyper.add_to(*eval_cmd);
  eval_elo.add_to(*eval_cmd);
  eval_cmd->callback([&] {
    action = [&] {
      const bool want_odds = std::find(model_names.begin(), model_names.end(), "odds") != model_names.end();
      if (want_odds && odds_path.empty()) throw std::invalid_argument("model 'odds' needs --odds");
      if (eval_data.empty() && eval_train.empty()) throw std::invalid_argument("give --train/--test or --data/--cutoff");
      eval_elo.validate();

      Dataset train;
      Dataset test;
      if (!eval_data.empty()) {
        std::tie(train, test) = split_by_cutoff(load_dataset(eval_data), parse_date_flag(eval_cutoff, "--cutoff"));
      } else {
        train = load_dataset(eval_train);
        test = load_dataset(eval_test);
      }
      if (test.empty()) throw DataError("test set is empty");

      std::vector<std::unique_ptr<Predictor>> owned;
      std::optional<TrainedModel> gp_model;
      for (const auto& name : model_names) {
        if (name == "gp") {
          if (train.empty()) throw DataError("training set is empty");
          gp_model = train_model(train, eval_hyper, threads, err);
          owned.push_back(std::make_unique<GpPredictor>(*gp_model));
        } else if (name == "elo") {
          owned.push_back(std::make_unique<EloPredictor>(fit_elo_model(train, eval_elo.config)));
        } else if (name == "odds") {
          owned.push_back(std::make_unique<OddsPredictor>(load_odds(odds_path)));
        } else {
          owned.push_back(std::make_unique<UniformPredictor>());
        }
      }
      std::vector<const Predictor*> models;
      for (const auto& m : owned) models.push_back(m.get());

      LogLossOptions options;
      options.clip = clip;
      // Players seen in training, independent of how the files were split.
      std::size_t train_players = 0;
      {
        PlayerRegistry seen;
        for (const auto& r : train.records()) {
          for (const auto& p : r.lineup1) seen.intern(p);
          for (const auto& p : r.lineup2) seen.intern(p);
        }
        train_players = seen.size();
      }
      const auto reports = evaluate(models, test, train.num_matches(), train_players, options);
      for (const auto& r : reports) {
        if (r.clipped) err << "warning: " << r.model << ": " << r.clipped << " probabilities clipped to 1e-15\n";
        if (r.skipped) err << "note: " << r.model << " skipped " << r.skipped << " matches without data\n";
      }
      write_summary_table(out, reports);
      if (!summary_csv.empty()) {
        Sink sink(summary_csv, out);
        write_summary_csv(*sink, reports);
        sink.finish();
      }
      if (!per_match_csv.empty()) {
        Sink sink(per_match_csv, out);
        write_per_match_csv(*sink, reports);
        sink.finish();
      }
    };
  });

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic league with known skills");
  SimConfig sim;
  std::string sim_out;
  std::string truth_out;
  std::string start_date = format_date(sim.start_date);
  sim_cmd->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_out, "Output matches CSV")->required();
  sim_cmd->add_option("--truth", truth_out, "Write true latent scores and probabilities as CSV");
  sim_cmd->add_option("--num-players", sim.num_players, "Total players")->capture_default_str();
  sim_cmd->add_option("--num-teams", sim.num_teams, "Teams")->capture_default_str();
  sim_cmd->add_option("--matches-per-team", sim.matches_per_team, "Rounds played")->capture_default_str();
  sim_cmd->add_option("--sigma2", sim.true_sigma2, "Per-player skill variance")->capture_default_str();
  sim_cmd->add_option("--alpha", sim.true_alpha, "Draw margin")->capture_default_str();
  sim_cmd->add_option("--home", sim.true_home, "Home advantage in latent units")->capture_default_str();
  sim_cmd->add_option("--max-swaps", sim.max_swaps, "Max starters rotated out per match")->capture_default_str();
  sim_cmd->add_option("--start-date", start_date, "Date of the first round")->capture_default_str();
  sim_cmd->callback([&] {
    action = [&] {
      sim.start_date = parse_date_flag(start_date, "--start-date");
      const auto result = simulate_dataset(sim);
      Sink sink(sim_out, out);
      write_dataset(*sink, result.dataset);
      sink.finish();
      if (!truth_out.empty()) {
        Sink truth(truth_out, out);
        write_truth(*truth, result);
        truth.finish();
      }
      err << "simulated " << result.dataset.num_matches() << " matches, " << result.dataset.num_players()
          << " players; suggested --cutoff " << format_date(holdout_cutoff(sim)) << '\n';
    };
  });

  // heatmap
  auto* heat_cmd = app.add_subcommand("heatmap", "Export |K| over a dataset for plotting");
  std::string heat_data;
  std::string heat_out;
  std::string heat_blocks;
  double heat_sigma2 = 1.0;
  double heat_sigma2_home = 0.0;
  heat_cmd->add_option("--data", heat_data, "Matches CSV")->required();
  heat_cmd->add_option("--out", heat_out, "Grid CSV")->required();
  heat_cmd->add_option("--blocks", heat_blocks, "Competition block CSV (default: <out>.blocks.csv)");
  heat_cmd->add_option("--sigma2", heat_sigma2, "Player-kernel variance")->capture_default_str();
  heat_cmd->add_option("--sigma2-home", heat_sigma2_home, "Home-feature variance")->capture_default_str();
  heat_cmd->callback([&] {
    action = [&] {
      KernelParams kp = make_kernel_params(heat_sigma2, heat_sigma2_home);
      kp.validate();
      const auto ds = load_dataset(heat_data);
      Sink grid(heat_out, out);
      Sink blocks(heat_blocks.empty() ? heat_out + ".blocks.csv" : heat_blocks, out);
      export_heatmap(ds, kp, *grid, *blocks, threads);
      grid.finish();
      blocks.finish();
    };
  });

  // elo-fit
  auto* elo_cmd = app.add_subcommand("elo-fit", "Run Elo over a training set and fit the draw margin");
  std::string elo_train;
  std::string elo_out;
  EloFlags elo_flags;
  elo_cmd->add_option("--train", elo_train, "Training matches CSV")->required();
  elo_cmd->add_option("--out", elo_out, "Ratings CSV (default: standard output)");
  elo_flags.add_to(*elo_cmd);
  elo_cmd->callback([&] {
    action = [&] {
      elo_flags.validate();
      const auto model = fit_elo_model(load_dataset(elo_train), elo_flags.config);
      err << "fitted alpha " << model.draw.alpha() << '\n';
      Sink sink(elo_out, out);
      *sink << "team,rating\n";
      char buf[64];
      for (const auto& [team, r] : model.state.ratings()) {
        std::snprintf(buf, sizeof buf, ",%.6f\n", r);
        *sink << csv_escape(team) << buf;
      }
      sink.finish();
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("playerkern");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace playerkern::cli
