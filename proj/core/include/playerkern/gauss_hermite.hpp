#pragma once

#include <cstddef>
#include <vector>

namespace playerkern {

// Nodes and weights for integrals of the form  int exp(-x^2) g(x) dx.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule make_gauss_hermite(std::size_t n);

// Cached 32-node rule used for predictive outcome probabilities.
const GaussHermiteRule& gauss_hermite_32();

}  // namespace playerkern
