#include "playerkern/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace playerkern {

namespace {

struct Vertex {
  std::vector<double> x;
  double cost = 0.0;  // negated objective
};

}  // namespace

NelderMeadResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& objective,
                                      std::vector<double> start, const NelderMeadOptions& options) {
  const std::size_t dim = start.size();
  NelderMeadResult best{start, -std::numeric_limits<double>::infinity(), 0};

  auto eval = [&](const std::vector<double>& x) {
    ++best.evaluations;
    double v = objective(x);
    if (std::isnan(v)) v = -std::numeric_limits<double>::infinity();
    if (v > best.value) {
      best.value = v;
      best.x = x;
    }
    return -v;
  };
  auto budget_left = [&] { return best.evaluations < options.max_evaluations; };

  if (dim == 0 || options.max_evaluations <= 0) {
    if (options.max_evaluations > 0) eval(start);
    return best;
  }

  std::mt19937_64 rng(options.seed);
  std::vector<Vertex> simplex;
  auto build_simplex = [&](const std::vector<double>& center, double step, bool randomize) {
    simplex.clear();
    simplex.push_back({center, 0.0});
    for (std::size_t i = 0; i < dim; ++i) {
      auto x = center;
      x[i] += step;
      if (randomize) {
        std::uniform_real_distribution<double> u(-0.5 * step, 0.5 * step);
        for (auto& c : x) c += u(rng);
      }
      simplex.push_back({std::move(x), 0.0});
    }
    for (auto& v : simplex) {
      if (!budget_left()) return false;
      v.cost = eval(v.x);
    }
    return true;
  };

  if (!build_simplex(start, options.initial_step, false)) return best;

  const auto by_cost = [](const Vertex& a, const Vertex& b) { return a.cost < b.cost; };
  while (budget_left()) {
    std::sort(simplex.begin(), simplex.end(), by_cost);
    const double spread = simplex.back().cost - simplex.front().cost;
    double size = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        size = std::max(size, std::abs(simplex[i].x[j] - simplex[0].x[j]));
      }
    }
    if (std::isfinite(spread) && spread < options.value_tolerance && size < options.size_tolerance) break;
    if (size < 1e-10) {
      // Collapsed without converging in value: re-seed around the best vertex.
      if (!build_simplex(simplex.front().x, 0.1 * options.initial_step, true)) break;
      continue;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += simplex[i].x[j] / static_cast<double>(dim);
    }
    auto along = [&](double t) {
      std::vector<double> x(dim);
      for (std::size_t j = 0; j < dim; ++j) x[j] = centroid[j] + t * (simplex.back().x[j] - centroid[j]);
      return x;
    };

    auto reflected = along(-1.0);
    const double reflected_cost = eval(reflected);
    if (reflected_cost < simplex.front().cost) {
      if (!budget_left()) {
        simplex.back() = {std::move(reflected), reflected_cost};
        break;
      }
      auto expanded = along(-2.0);
      const double expanded_cost = eval(expanded);
      if (expanded_cost < reflected_cost) {
        simplex.back() = {std::move(expanded), expanded_cost};
      } else {
        simplex.back() = {std::move(reflected), reflected_cost};
      }
      continue;
    }
    if (reflected_cost < simplex[dim - 1].cost) {
      simplex.back() = {std::move(reflected), reflected_cost};
      continue;
    }
    if (!budget_left()) break;
    const bool outside = reflected_cost < simplex.back().cost;
    auto contracted = along(outside ? -0.5 : 0.5);
    const double contracted_cost = eval(contracted);
    if (contracted_cost < std::min(reflected_cost, simplex.back().cost)) {
      simplex.back() = {std::move(contracted), contracted_cost};
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t i = 1; i <= dim && budget_left(); ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        simplex[i].x[j] = simplex[0].x[j] + 0.5 * (simplex[i].x[j] - simplex[0].x[j]);
      }
      simplex[i].cost = eval(simplex[i].x);
    }
  }
  return best;
}

}  // namespace playerkern
