#include "playerkern/player_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "playerkern/errors.hpp"

namespace playerkern {

namespace {

using Lineup = std::array<PlayerIndex, kLineupSize>;

int count_common(const Lineup& a, const Lineup& b) {
  int n = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

Lineup index_lineup(const std::vector<PlayerId>& lineup, const PlayerRegistry& registry,
                    const std::string& match_id) {
  if (lineup.size() != kLineupSize) {
    throw DataError("match '" + match_id + "': lineup size " + std::to_string(lineup.size()));
  }
  Lineup out{};
  for (std::size_t i = 0; i < kLineupSize; ++i) {
    const auto idx = registry.find(lineup[i]);
    if (!idx) throw DataError("match '" + match_id + "': unregistered player '" + lineup[i] + "'");
    out[i] = *idx;
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Fn>
void parallel_rows(Eigen::Index n, unsigned threads, Fn&& fn) {
  if (threads <= 1 || n < 64) {
    for (Eigen::Index i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto workers = std::min<Eigen::Index>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (Eigen::Index w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (Eigen::Index i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

void KernelParams::validate() const {
  if (!std::isfinite(sigma2) || sigma2 <= 0.0) throw std::invalid_argument("sigma2 must be finite and > 0");
  if (!std::isfinite(sigma2_home) || sigma2_home < 0.0) {
    throw std::invalid_argument("sigma2_home must be finite and >= 0");
  }
  if (!std::isfinite(jitter) || jitter < 0.0) throw std::invalid_argument("jitter must be finite and >= 0");
}

int home_sign(HomeSide h) {
  switch (h) {
    case HomeSide::kTeam1: return 1;
    case HomeSide::kTeam2: return -1;
    case HomeSide::kNeutral: break;
  }
  return 0;
}

MatchVector build_match_vector(const MatchRecord& rec, const PlayerRegistry& registry) {
  MatchVector v;
  v.plus = index_lineup(rec.lineup1, registry, rec.match_id);
  v.minus = index_lineup(rec.lineup2, registry, rec.match_id);
  v.home = home_sign(rec.home);
  return v;
}

std::vector<MatchVector> build_match_vectors(const Dataset& ds) {
  std::vector<MatchVector> out;
  out.reserve(ds.num_matches());
  for (const auto& rec : ds.records()) out.push_back(build_match_vector(rec, ds.registry()));
  return out;
}

int signed_overlap(const MatchVector& a, const MatchVector& b) {
  return count_common(a.plus, b.plus) + count_common(a.minus, b.minus) -
         count_common(a.plus, b.minus) - count_common(a.minus, b.plus);
}

double kernel_eval(const MatchVector& a, const MatchVector& b, const KernelParams& p) {
  return p.sigma2 * signed_overlap(a, b) + p.sigma2_home * (a.home * b.home);
}

Eigen::MatrixXd kernel_matrix(std::span<const MatchVector> rows, std::span<const MatchVector> cols,
                              const KernelParams& p, unsigned threads) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto m = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd k(n, m);
  parallel_rows(n, threads, [&](Eigen::Index i) {
    for (Eigen::Index j = 0; j < m; ++j) k(i, j) = kernel_eval(rows[i], cols[j], p);
  });
  return k;
}

Eigen::MatrixXd gram_matrix(std::span<const MatchVector> xs, const KernelParams& p, bool add_jitter,
                            unsigned threads) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd k(n, n);
  // Lower triangle, then mirror: exact symmetry by construction.
  parallel_rows(n, threads, [&](Eigen::Index i) {
    for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = kernel_eval(xs[i], xs[j], p);
  });
  k.triangularView<Eigen::StrictlyUpper>() = k.transpose().triangularView<Eigen::StrictlyUpper>();
  if (add_jitter) k.diagonal().array() += p.jitter;
  return k;
}

Eigen::VectorXd cross_kernel(std::span<const MatchVector> train, const MatchVector& x,
                             const KernelParams& p) {
  Eigen::VectorXd k(static_cast<Eigen::Index>(train.size()));
  for (std::size_t i = 0; i < train.size(); ++i) k(static_cast<Eigen::Index>(i)) = kernel_eval(train[i], x, p);
  return k;
}

void export_heatmap(const Dataset& ds, const KernelParams& p, std::ostream& grid, std::ostream& blocks,
                    unsigned threads) {
  const auto& recs = ds.records();
  std::vector<std::size_t> order(recs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = recs[a];
    const auto& rb = recs[b];
    if (ra.competition != rb.competition) return ra.competition < rb.competition;
    if (ra.date != rb.date) return ra.date < rb.date;
    return ra.match_id < rb.match_id;
  });

  std::vector<MatchVector> xs;
  xs.reserve(order.size());
  for (auto i : order) xs.push_back(build_match_vector(recs[i], ds.registry()));
  const Eigen::MatrixXd k = gram_matrix(xs, p, false, threads);

  grid << "match_id";
  for (auto i : order) grid << ',' << csv_escape(recs[i].match_id);
  grid << '\n';
  char buf[32];
  for (std::size_t r = 0; r < order.size(); ++r) {
    grid << csv_escape(recs[order[r]].match_id);
    for (std::size_t c = 0; c < order.size(); ++c) {
      std::snprintf(buf, sizeof buf, "%.6g", std::abs(k(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
      grid << ',' << buf;
    }
    grid << '\n';
  }

  blocks << "competition,start_row,end_row\n";
  std::size_t start = 0;
  for (std::size_t r = 1; r <= order.size(); ++r) {
    if (r == order.size() || recs[order[r]].competition != recs[order[start]].competition) {
      blocks << csv_escape(recs[order[start]].competition) << ',' << start << ',' << (r - 1) << '\n';
      start = r;
    }
  }
  if (!grid || !blocks) throw DataError("heatmap export: write failure");
}

}  // namespace playerkern
