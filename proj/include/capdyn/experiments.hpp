#pragma once

#include <string>
#include <vector>

#include "capdyn/estimation.hpp"
#include "capdyn/io.hpp"
#include "capdyn/run_config.hpp"

namespace capdyn::io {

inline constexpr const char* kToolkitVersion = "1.0.0";

struct ManifestFile {
    std::string name;
    std::size_t rows = 0;
};

struct ResultManifest {
    std::string experiment;
    std::string toolkit_version = kToolkitVersion;
    std::uint64_t seed = 0;
    int threads = 0;
    double wall_time_seconds = 0.0;
    std::vector<ManifestFile> files;
};

/// Registered reproduction presets, one per standard report figure or table.
std::vector<std::string> experiment_names();

/// The ABM configuration shared by every simulation preset: baseline model
/// parameters, 5% background crisis rate, 2% generational turnover with
/// population-mean entry, autonomous-branch initial conditions, plus any
/// user overrides from the run configuration.
abm::AbmConfig experiment_baseline(const RunConfig& config);

/// Compute one preset's tables without touching the filesystem.
std::vector<Table> compute_experiment(const RunConfig& config);

/// Run a preset end to end: verify the output directory is writable,
/// compute, emit one file per table plus manifest.json.  On failure every
/// partial output is removed and the error is rethrown.
ResultManifest run_experiment(const RunConfig& config);

/// The synthetic exposure-removal scenario behind the recovery comparison:
/// ten AI-free time units, then heavy exposure until t = 50.
estimation::RecoveryScenario recovery_scenario();

} // namespace capdyn::io
