#pragma once

#include <optional>
#include <string>
#include <vector>

#include "capdyn/abm.hpp"
#include "capdyn/model.hpp"

namespace capdyn::sweep {

enum class Statistic { median, mean };

/// One named parameter range with an inclusive, evenly spaced grid.
struct SweepAxis {
    std::string name; ///< dotted config key, e.g. "params.k_ai" or "p_crisis"
    double lo = 0.0;
    double hi = 0.0;
    int count = 2;

    std::vector<double> values() const;
};

/// Monte Carlo sweep specification: one or two axes over an ABM base config.
struct SweepSpec {
    std::vector<SweepAxis> axes;
    int replicates = 50;
    abm::AbmConfig base_config;
    Statistic statistic = Statistic::median;

    void validate() const;
};

struct SweepCell {
    std::vector<double> axis_values; ///< one per axis
    double statistic = 0.0;
    double mean = 0.0;
    double iqr_lo = 0.0;
    double iqr_hi = 0.0;
};

struct SweepResult {
    SweepSpec spec;
    std::vector<SweepCell> cells; ///< row-major over the axis grids
    long runs_executed = 0;       ///< always grid points x replicates
};

/// Run the sweep.  Each (grid point, replicate) task gets the seed
/// mix_seed(base_seed, point_index * 1'000'000 + replicate), so enlarging the
/// grid never perturbs existing cells and any worker count gives identical
/// results.
SweepResult run_sweep(const SweepSpec& spec, int threads = 0);

struct KStarReport {
    double k_star = 0.0;
    double max_gradient = 0.0;
    bool endpoint_maximum = false; ///< diagnostic: gradient peaked at the grid edge
    std::vector<double> k_values;
    std::vector<double> statistic_h;
    std::vector<double> iqr_lo, iqr_hi;
    std::vector<double> gradient;         ///< |dH/dK| central differences (interior)
    std::vector<int> non_monotone_points; ///< indices where the curve rises with K
};

/// K* detection options.  Smoothing (3-point moving average before the
/// gradient) is off by default.
struct KStarOptions {
    double k_lo = 0.50;
    double k_hi = 0.99;
    int points = 50;
    int replicates = 50;
    bool smooth = false;
    Statistic statistic = Statistic::median;
};

/// Sweep K and locate the critical threshold as the argmax of the
/// central-difference |dH/dK| on the ensemble statistic curve.
KStarReport k_sweep(const abm::AbmConfig& base, const KStarOptions& options = {},
                    int threads = 0);

struct HeatmapResult {
    std::vector<double> k_values;
    std::vector<double> crisis_values;
    std::vector<std::vector<double>> statistic_h; ///< [crisis][k]
    /// H = 0.5 contour: for each crisis row, the interpolated K crossing
    /// (absent when the row never crosses 0.5).
    std::vector<std::optional<double>> contour_k;
};

/// Two-dimensional K x crisis-frequency sweep (Fig. 4B layout).
HeatmapResult k_crisis_heatmap(const abm::AbmConfig& base, int k_points = 50,
                               int crisis_points = 35, int replicates = 10,
                               int threads = 0);

struct AntifragilityRow {
    double k = 0.0;
    double crisis = 0.0;
    double statistic = 0.0;
    double iqr_lo = 0.0, iqr_hi = 0.0;
    double improvement_ratio = 1.0; ///< H(crisis) / H(crisis = 0) at this K
};

std::vector<AntifragilityRow> antifragility_curve(
    const abm::AbmConfig& base, const std::vector<double>& k_values,
    const std::vector<double>& crisis_values, int replicates = 50, int threads = 0);

struct PolicyRow {
    double practice_fraction = 0.0;
    double median_h = 0.0;
    double iqr_lo = 0.0, iqr_hi = 0.0;
    double improvement_pct = 0.0; ///< percent over the zero-policy baseline
};

std::vector<PolicyRow> policy_curve(const abm::AbmConfig& base,
                                    const std::vector<double>& fractions,
                                    int replicates = 50, int threads = 0);

struct SensitivityRow {
    std::string parameter;
    double value = 0.0;
    double k_star = 0.0;
    bool interior = false;
    double max_gradient = 0.0;
};

struct SensitivityReport {
    std::vector<SensitivityRow> rows;
    double pooled_k_star_min = 0.0;
    double pooled_k_star_max = 0.0;
    bool all_interior = false;
};

/// Per-parameter K* ranges: each listed parameter is swept over its range
/// (>= 5 values) with the others at baseline, re-running k_sweep each time.
struct SensitivityRange {
    std::string parameter; ///< one of beta, alpha, delta, scope, gamma
    double lo = 0.0, hi = 0.0;
    int count = 5;
};

SensitivityReport sensitivity_suite(const abm::AbmConfig& base,
                                    const std::vector<SensitivityRange>& ranges,
                                    const KStarOptions& k_options, int threads = 0);

struct EpsilonPoint {
    double epsilon = 0.0;
    double recovery_time = 0.0;
};

struct EpsilonSweep {
    std::vector<EpsilonPoint> points;
    double ratio_first_to_last = 0.0; ///< time(min eps) / time(max eps)
};

/// Recovery-time curve over an epsilon grid at the calibration preset
/// (alpha = 1, beta = 0.5, d = 0), climbing from H = 0 to H = 0.5.
EpsilonSweep epsilon_sweep(std::vector<double> eps_grid, double h_start = 0.0,
                           double h_target = 0.5, double d_fixed = 0.0);

struct HistoricalPreset {
    std::string name;
    double cost = 0.0;  ///< documented cost parameter c
    double gamma = 0.0; ///< mapped adoption sensitivity, clamp(1 - c, 0.01, 1)
    double scope = 0.0;
    double equilibrium_h = 0.0;
};

struct GammaDeltaGrid {
    std::vector<double> gamma_values;
    std::vector<double> delta_values;
    std::vector<std::vector<double>> equilibrium_h; ///< [delta][gamma]
    std::vector<HistoricalPreset> presets;
};

/// Deterministic ODE equilibrium grid over gamma x delta (K = 0.7,
/// alpha = 1, beta = 0.5), plus the four historical technology regimes
/// placed by the cost -> gamma mapping and evaluated at high AI capability.
GammaDeltaGrid gamma_delta_grid(int gamma_points = 100, int delta_points = 100,
                                int threads = 0);

struct InitialConditionGrid {
    std::vector<double> h0_values;
    std::vector<double> scope_values;
    std::vector<std::vector<double>> equilibrium_h; ///< [scope][h0]
};

/// ODE equilibrium as a function of initial capability and scope at
/// baseline parameters; demonstrates bistability in the H0 direction.
InitialConditionGrid initial_condition_grid(int h0_points = 21, int scope_points = 21,
                                            double k_ai = 0.7, int threads = 0);

} // namespace capdyn::sweep
