#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "capdyn/abm.hpp"
#include "capdyn/io.hpp"

namespace capdyn::io {

/// Resolved run configuration: defaults < config file < command-line flags.
struct RunConfig {
    std::string experiment;
    std::uint64_t seed = 42;
    int threads = 0; ///< 0 = CAPDYN_THREADS env or hardware default
    std::filesystem::path output_dir = "out";
    std::filesystem::path data_dir = "data";
    OutputFormat format = OutputFormat::csv;
    int replicates = 0; ///< 0 = per-experiment default
    abm::AbmConfig abm; ///< generic defaults plus dotted-key overrides
    /// Dotted ABM keys the user overrode, in application order; experiment
    /// presets re-apply these on top of their own baselines.
    std::vector<std::pair<std::string, std::string>> abm_overrides;
};

/// Layered resolution.  The file holds `key = value` lines ('#' comments);
/// flag overrides are (key, value) pairs applied last.  Unknown keys and
/// out-of-range values raise std::invalid_argument naming the key.
RunConfig parse_config(const std::optional<std::filesystem::path>& config_file,
                       const std::vector<std::pair<std::string, std::string>>& flags);

/// Serialize every effective key; re-parsing the text reproduces the
/// configuration exactly.
std::string serialize_config(const RunConfig& config);

} // namespace capdyn::io
