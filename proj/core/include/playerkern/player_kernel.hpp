#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "playerkern/match_data.hpp"

namespace playerkern {

// Sparse lineup incidence vector z in {-1,0,+1}^P plus the home coordinate h.
// Team1 is always the positive side; the outcome label lives elsewhere.
struct MatchVector {
  std::array<PlayerIndex, kLineupSize> plus{};   // sorted
  std::array<PlayerIndex, kLineupSize> minus{};  // sorted
  int home = 0;                                  // +1 team1 hosts, -1 team2 hosts, 0 neutral

  // Same players with the sides exchanged: z -> -z, h -> -h.
  MatchVector swapped() const { return {minus, plus, -home}; }

  friend bool operator==(const MatchVector&, const MatchVector&) = default;
};

struct KernelParams {
  double sigma2 = 1.0;       // player-kernel variance
  double sigma2_home = 0.0;  // home-feature variance
  double jitter = 1e-6;      // diagonal stabilizer for square Gram matrices

  // Throws std::invalid_argument when the invariants do not hold.
  void validate() const;
};

// Default jitter relative to the player variance.
inline KernelParams make_kernel_params(double sigma2, double sigma2_home) {
  return {sigma2, sigma2_home, 1e-6 * sigma2};
}

int home_sign(HomeSide h);

// Throws DataError if a lineup player is not in the registry.
MatchVector build_match_vector(const MatchRecord& rec, const PlayerRegistry& registry);
std::vector<MatchVector> build_match_vectors(const Dataset& ds);

// Signed overlap z_a . z_b, an integer in [-22, 22].
int signed_overlap(const MatchVector& a, const MatchVector& b);

double kernel_eval(const MatchVector& a, const MatchVector& b, const KernelParams& p);

// K(i,j) = kernel_eval(rows[i], cols[j]). Entries are independent, so the
// threaded path is bit-identical to the sequential one.
Eigen::MatrixXd kernel_matrix(std::span<const MatchVector> rows, std::span<const MatchVector> cols,
                              const KernelParams& p, unsigned threads = 1);

// Square Gram matrix of `xs`, optionally with p.jitter added to the diagonal.
Eigen::MatrixXd gram_matrix(std::span<const MatchVector> xs, const KernelParams& p,
                            bool add_jitter, unsigned threads = 1);

Eigen::VectorXd cross_kernel(std::span<const MatchVector> train, const MatchVector& x,
                             const KernelParams& p);

// Writes |K| over the dataset with records ordered by (competition, date,
// match_id). `grid` receives a CSV with a match_id header row and one row per
// match; `blocks` receives `competition,start_row,end_row` (0-based, inclusive).
void export_heatmap(const Dataset& ds, const KernelParams& p, std::ostream& grid,
                    std::ostream& blocks, unsigned threads = 1);

}  // namespace playerkern
