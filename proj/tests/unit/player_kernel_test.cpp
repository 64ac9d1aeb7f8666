#include "playerkern/player_kernel.hpp"

#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "playerkern/errors.hpp"

namespace playerkern {
namespace {

using testing::dense_kernel;
using testing::make_record;
using testing::numbered_players;
using testing::random_vectors;

constexpr KernelParams kUnit{1.0, 0.0, 0.0};

TEST(BuildMatchVector, MapsTeam1PositiveAndHome) {
  const auto rec = make_record("m", "2016-01-01", numbered_players("a", 1), numbered_players("b", 1),
                               HomeSide::kTeam1, Outcome::kTeam2Win);
  const auto ds = Dataset::from_records({rec});
  const auto v = build_match_vector(ds.records()[0], ds.registry());
  for (std::size_t i = 0; i < kLineupSize; ++i) {
    EXPECT_LT(v.plus[i], 11u);  // team1 interned first
    EXPECT_GE(v.minus[i], 11u);
  }
  EXPECT_TRUE(std::is_sorted(v.plus.begin(), v.plus.end()));
  EXPECT_EQ(v.home, 1);

  auto neutral = rec;
  neutral.home = HomeSide::kNeutral;
  EXPECT_EQ(build_match_vector(neutral, ds.registry()).home, 0);
  EXPECT_EQ(build_match_vector(rec, ds.registry()), build_match_vector(rec, ds.registry()));
}

TEST(BuildMatchVector, UnregisteredPlayerIsAnError) {
  const auto rec = make_record("m", "2016-01-01", numbered_players("a", 1), numbered_players("b", 1));
  PlayerRegistry registry;
  for (const auto& p : numbered_players("a", 1)) registry.intern(p);
  EXPECT_THROW(build_match_vector(rec, registry), DataError);
}

TEST(KernelEval, ClosedForms) {
  std::mt19937_64 rng(1);
  const auto v = random_vectors(rng, 2, 40);
  MatchVector a = v[0];
  a.home = 0;
  EXPECT_EQ(kernel_eval(a, a, kUnit), 22.0);
  EXPECT_EQ(kernel_eval(a, a.swapped(), kUnit), -22.0);

  MatchVector disjoint;
  for (std::size_t i = 0; i < kLineupSize; ++i) {
    disjoint.plus[i] = static_cast<PlayerIndex>(100 + i);
    disjoint.minus[i] = static_cast<PlayerIndex>(200 + i);
  }
  EXPECT_EQ(kernel_eval(a, disjoint, KernelParams{2.5, 0.7, 0.0}), 0.0);
}

TEST(KernelEval, MatchesDenseOracleExactly) {
  std::mt19937_64 rng(2);
  constexpr std::size_t kPlayers = 60;
  const auto xs = random_vectors(rng, 200, kPlayers);
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
    EXPECT_EQ(kernel_eval(xs[i], xs[i + 1], kUnit), dense_kernel(xs[i], xs[i + 1], kPlayers, kUnit));
    EXPECT_EQ(kernel_eval(xs[i], xs[i], kUnit), dense_kernel(xs[i], xs[i], kPlayers, kUnit));
  }
  const KernelParams scaled{0.37, 1.9, 0.0};
  for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
    EXPECT_NEAR(kernel_eval(xs[i], xs[i + 1], scaled), dense_kernel(xs[i], xs[i + 1], kPlayers, scaled), 1e-12);
  }
}

TEST(KernelEval, SymmetryBoundsAndNegation) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> var(0.01, 3.0);
  const auto xs = random_vectors(rng, 300, 30);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const KernelParams p{var(rng), var(rng), 0.0};
    const auto& a = xs[i];
    const auto& b = xs[i + 1];
    EXPECT_EQ(kernel_eval(a, b, p), kernel_eval(b, a, p));
    EXPECT_LE(std::abs(kernel_eval(a, b, p)), 22.0 * p.sigma2 + p.sigma2_home + 1e-12);
    const KernelParams no_home{p.sigma2, 0.0, 0.0};
    EXPECT_EQ(kernel_eval(a.swapped(), b, no_home), -kernel_eval(a, b, no_home));
  }
}

TEST(KernelMatrix, SingleMatchAndJitter) {
  std::mt19937_64 rng(4);
  auto xs = random_vectors(rng, 1, 30);
  xs[0].home = 0;
  const auto k = gram_matrix(xs, kUnit, true);
  ASSERT_EQ(k.rows(), 1);
  EXPECT_EQ(k(0, 0), 22.0);
  const auto kj = gram_matrix(xs, KernelParams{1.0, 0.0, 0.5}, true);
  EXPECT_EQ(kj(0, 0), 22.5);
  const auto kr = kernel_matrix(xs, xs, KernelParams{1.0, 0.0, 0.5});
  EXPECT_EQ(kr(0, 0), 22.0);
}

TEST(KernelMatrix, HandCountedThreeMatchGram) {
  // m1: A = a1..a11 vs B = b1..b11, team1 at home.
  // m2: a1..a6 + c1..c5 vs b1..b3 + d1..d8, neutral.
  // m3: B vs A (sides swapped), team2 at home.
  std::vector<PlayerId> m2_home = numbered_players("a", 1, 6);
  for (const auto& p : numbered_players("c", 1, 5)) m2_home.push_back(p);
  std::vector<PlayerId> m2_away = numbered_players("b", 1, 3);
  for (const auto& p : numbered_players("d", 1, 8)) m2_away.push_back(p);
  const auto ds = Dataset::from_records({
      make_record("m1", "2016-01-01", numbered_players("a", 1), numbered_players("b", 1), HomeSide::kTeam1),
      make_record("m2", "2016-01-02", m2_home, m2_away, HomeSide::kNeutral),
      make_record("m3", "2016-01-03", numbered_players("b", 1), numbered_players("a", 1), HomeSide::kTeam2),
  });
  const auto xs = build_match_vectors(ds);
  const KernelParams p{1.0, 1.0, 0.0};
  const auto k = gram_matrix(xs, p, false);
  // m1.m2 = 6 shared team1 players + 3 shared team2 players; m1.m3 = -22 + home (+1)(-1).
  Eigen::Matrix3d expected;
  expected << 23, 9, -23,  //
      9, 22, -9,           //
      -23, -9, 23;
  EXPECT_EQ(k, Eigen::MatrixXd(expected));
}

TEST(KernelMatrix, GramIsSymmetricPsd) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto xs = random_vectors(rng, 80, 40 + 20 * trial);
    const KernelParams p{0.5, 0.3, 0.0};
    const auto k = gram_matrix(xs, p, false);
    EXPECT_TRUE(k.isApprox(k.transpose(), 0.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k, Eigen::EigenvaluesOnly);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-8 * eig.eigenvalues().maxCoeff());
  }
}

TEST(KernelMatrix, ThreadedAssemblyIsBitIdentical) {
  std::mt19937_64 rng(6);
  const auto rows = random_vectors(rng, 150, 200);
  const auto cols = random_vectors(rng, 90, 200);
  const KernelParams p{0.123, 0.456, 1e-3};
  EXPECT_EQ(kernel_matrix(rows, cols, p, 1), kernel_matrix(rows, cols, p, 4));
  EXPECT_EQ(gram_matrix(rows, p, true, 1), gram_matrix(rows, p, true, 3));
}

TEST(ExportHeatmap, DisjointMatches) {
  const auto ds = Dataset::from_records({
      make_record("m1", "2016-01-01", numbered_players("a", 1), numbered_players("b", 1)),
      make_record("m2", "2016-01-02", numbered_players("c", 1), numbered_players("d", 1)),
  });
  std::ostringstream grid, blocks;
  export_heatmap(ds, KernelParams{2.0, 0.0, 0.0}, grid, blocks);
  EXPECT_EQ(grid.str(), "match_id,m1,m2\nm1,44,0\nm2,0,44\n");
  EXPECT_EQ(blocks.str(), "competition,start_row,end_row\nleague,0,1\n");
}

TEST(ExportHeatmap, EmptyDatasetIsHeaderOnly) {
  std::ostringstream grid, blocks;
  export_heatmap(Dataset{}, kUnit, grid, blocks);
  EXPECT_EQ(grid.str(), "match_id\n");
  EXPECT_EQ(blocks.str(), "competition,start_row,end_row\n");
}

TEST(ExportHeatmap, SharedPlayersLinkCompetitions) {
  // Club match and national-team match share 4 + 2 players on matching sides.
  auto nat1 = numbered_players("a", 1, 4);
  for (const auto& p : numbered_players("x", 1, 7)) nat1.push_back(p);
  auto nat2 = numbered_players("b", 1, 2);
  for (const auto& p : numbered_players("y", 1, 9)) nat2.push_back(p);
  const auto ds = Dataset::from_records({
      make_record("n1", "2016-01-05", nat1, nat2, HomeSide::kNeutral, Outcome::kDraw, "national"),
      make_record("c1", "2016-01-01", numbered_players("a", 1), numbered_players("b", 1), HomeSide::kNeutral,
                  Outcome::kTeam1Win, "club"),
      make_record("c2", "2016-01-03", numbered_players("z", 1), numbered_players("w", 1), HomeSide::kNeutral,
                  Outcome::kTeam1Win, "club"),
  });
  std::ostringstream grid, blocks;
  export_heatmap(ds, kUnit, grid, blocks);
  EXPECT_EQ(grid.str(),
            "match_id,c1,c2,n1\n"
            "c1,22,0,6\n"
            "c2,0,22,0\n"
            "n1,6,0,22\n");
  EXPECT_EQ(blocks.str(), "competition,start_row,end_row\nclub,0,1\nnational,2,2\n");
}

}  // namespace
}  // namespace playerkern
