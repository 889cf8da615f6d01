#pragma once

#include <string>
#include <vector>

#include "capdyn/abm.hpp"

namespace capdyn {

/// Set one dotted configuration key ("params.beta", "p_crisis",
/// "n_agents", "entry_mode", ...) on an AbmConfig from its string form.
/// Unknown keys, type mismatches and out-of-range values throw
/// std::invalid_argument naming the key and the valid range.
void apply_abm_key(abm::AbmConfig& config, const std::string& key,
                   const std::string& value);

/// Numeric-only variant used by sweep axes; rejects non-numeric keys.
void apply_abm_axis(abm::AbmConfig& config, const std::string& key, double value);

/// All accepted dotted keys, for error messages and docs.
std::vector<std::string> abm_key_names();

} // namespace capdyn
