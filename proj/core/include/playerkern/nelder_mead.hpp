#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace playerkern {

struct NelderMeadOptions {
  int max_evaluations = 200;
  double initial_step = 1.0;
  double value_tolerance = 1e-8;  // stop when vertex values span less than this...
  double size_tolerance = 1e-6;   // ...and the simplex is this small
  std::uint64_t seed = 0x5eed;    // for re-seeding a collapsed simplex
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

// Derivative-free maximization. The objective may return -inf to reject a point.
NelderMeadResult nelder_mead_maximize(const std::function<double(std::span<const double>)>& objective,
                                      std::vector<double> start, const NelderMeadOptions& options);

}  // namespace playerkern
