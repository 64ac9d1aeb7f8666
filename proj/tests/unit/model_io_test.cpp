#include "playerkern/model_io.hpp"

#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "playerkern/errors.hpp"

namespace playerkern {
namespace {

TrainedModel sample_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto league = testing::random_league(rng, 60, 45);
  return {league.dataset.registry(), fit(league.dataset, make_hyperparams(0.37, 0.21, 0.64))};
}

TEST(ModelIo, ReloadReproducesPredictionsBitForBit) {
  const auto model = sample_model(41);
  std::stringstream buf;
  save_model(buf, model);
  const auto loaded = load_model(buf);

  EXPECT_EQ(loaded.registry, model.registry);
  EXPECT_EQ(loaded.posterior.mode, model.posterior.mode);
  EXPECT_EQ(loaded.posterior.chol_b, model.posterior.chol_b);
  EXPECT_EQ(loaded.posterior.hyper.kernel.jitter, model.posterior.hyper.kernel.jitter);
  EXPECT_EQ(loaded.posterior.train_vectors, model.posterior.train_vectors);

  std::mt19937_64 rng(42);
  for (const auto& x : testing::random_vectors(rng, 30, 60)) {
    const auto a = predict_outcomes(model.posterior, x);
    const auto b = predict_outcomes(loaded.posterior, x);
    EXPECT_EQ(a.p_w, b.p_w);
    EXPECT_EQ(a.p_d, b.p_d);
    EXPECT_EQ(a.p_l, b.p_l);
  }
  std::stringstream again;
  save_model(again, loaded);
  EXPECT_EQ(again.str(), buf.str());
}

TEST(ModelIo, PlayerIdsWithSpacesSurvive) {
  auto l1 = testing::numbered_players("Jean Pierre ", 1);
  auto l2 = testing::numbered_players("van der ", 1);
  const auto ds = Dataset::from_records({testing::make_record("m 1", "2016-01-01", l1, l2)});
  const TrainedModel model{ds.registry(), fit(ds, make_hyperparams(1.0, 1.0, 0.5))};
  std::stringstream buf;
  save_model(buf, model);
  EXPECT_EQ(load_model(buf).registry, model.registry);
}

TEST(ModelIo, RejectsForeignOrDamagedFiles) {
  const auto model = sample_model(43);
  std::stringstream buf;
  save_model(buf, model);
  const std::string text = buf.str();

  std::istringstream bad_magic("NOT-A-MODEL\n" + text.substr(text.find('\n') + 1));
  EXPECT_THROW(load_model(bad_magic), DataError);

  std::string future = text;
  future.replace(future.find("version 1"), 9, "version 9");
  std::istringstream bad_version(future);
  EXPECT_THROW(load_model(bad_version), DataError);

  std::istringstream truncated(text.substr(0, text.size() / 2));
  EXPECT_THROW(load_model(truncated), DataError);

  EXPECT_THROW(load_model_file("/nonexistent/dir/model.txt"), DataError);
}

}  // namespace
}  // namespace playerkern
