#ifndef DIVPRUNE_MODEL_IO_HPP
#define DIVPRUNE_MODEL_IO_HPP

#include <string>

#include "divprune/learners.hpp"

namespace divprune {

inline constexpr const char* kModelVersion = "divprune-model-v1";
inline constexpr const char* kToolVersion = "0.1.0";

// Round-trips are exact: thresholds and weights serialize at full precision.
std::string ensemble_to_json(const Ensemble& e);
Ensemble ensemble_from_json(const std::string& text);

void save_ensemble(const Ensemble& e, const std::string& path);
Ensemble load_ensemble(const std::string& path);

}  // namespace divprune

#endif
