#pragma once

#include <iosfwd>
#include <string>

#include "playerkern/gp_classifier.hpp"

namespace playerkern {

inline constexpr int kModelFormatVersion = 1;

// Text dump headed by a magic line and a version integer. Reals are written
// as hexadecimal floats, so a reload reproduces predictions bit for bit.
void save_model(std::ostream& out, const TrainedModel& model);
TrainedModel load_model(std::istream& in);

void save_model_file(const std::string& path, const TrainedModel& model);
TrainedModel load_model_file(const std::string& path);

}  // namespace playerkern
