#pragma once

#include <optional>
#include <string>

#include "playerkern/match_data.hpp"
#include "playerkern/rao_kupper.hpp"

namespace playerkern {

// Anything that turns a match into a win/draw/loss distribution. A predictor
// may decline a match (e.g. no odds available) by returning nullopt.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual std::string name() const = 0;
  virtual std::optional<PredictiveDistribution> predict(const MatchRecord& rec) const = 0;
};

}  // namespace playerkern
