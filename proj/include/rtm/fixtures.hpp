#pragma once

#include <string>
#include <vector>

#include "rtm/config.hpp"

namespace rtm {

// FS2, FS2-bernoulli, GM, GEO, P2, DS3, NOBIP, STOCH2
const std::vector<std::string>& fixture_names();
ExperimentConfig fixture(const std::string& name);

}  // namespace rtm
