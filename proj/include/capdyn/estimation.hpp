#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace capdyn::estimation {

// ---------------------------------------------------------------- datasets

/// One observed capability decline: fractional loss over an exposure period.
struct DeskillObservation {
    std::string domain;
    double decline = 0.0;  ///< fractional loss, in (0, 1)
    double duration = 0.0; ///< exposure length, > 0
    std::string time_unit; ///< session / week / month / year

    void validate() const;
};

struct Observation {
    std::string country;
    int year = 0;
    double score = 0.0;
};

struct AdoptionPoint {
    std::string country;
    int year = 0;
    double fraction = 0.0;
};

/// Country-year scores paired with exogenous adoption-driver series.
struct PanelDataset {
    std::vector<Observation> observations;
    std::vector<AdoptionPoint> drivers;

    /// Checks score/adoption ranges, duplicate (country, year) pairs, and
    /// that every observed country has driver coverage.
    void validate() const;
    std::vector<std::string> countries() const;
};

struct SingleSeries {
    std::vector<int> years;
    std::vector<double> scores;
};

/// Piecewise-linear interpolation of (year, fraction) points, clamped at the
/// endpoints.
class InterpolatedDriver {
public:
    explicit InterpolatedDriver(std::vector<AdoptionPoint> points);
    double at(const std::string& country, double year) const;

private:
    std::map<std::string, std::vector<std::pair<double, double>>> by_country_;
};

/// The default OECD-average adoption driver: a logistic curve with midpoint
/// 2012, amplitude and rate solved so that a(2003) = 0.05 and a(2022) = 0.90.
std::function<double(double)> oecd_default_driver();

// ------------------------------------------------------------- calibration

/// Effective decay rate from an observed fractional decline:
/// beta_eff = -ln(1 - decline) / duration.
double beta_eff(const DeskillObservation& obs);

/// Exponential decline curve H(t) = h0 exp(-beta d t) on a time grid.
std::vector<double> predict_decline_curve(double beta, double d, double h0,
                                          const std::vector<double>& t_grid);

// --------------------------------------------------------------- fitting

enum class ModelKind { ode, linear, exponential, logistic, country_linear };

const char* model_kind_name(ModelKind kind);

struct FitResult {
    ModelKind kind = ModelKind::ode;
    std::vector<std::pair<std::string, double>> parameters;
    double r_squared = 0.0;
    double rmse = 0.0; ///< in score units
    double aic = 0.0;
    double bic = 0.0;
    std::vector<double> residuals; ///< observed - predicted, observation order
    int n_params = 0;
    int n_obs = 0;
    bool converged = true;
    bool boundary_pinned = false;   ///< some parameter ended on its bound
    std::uint64_t data_checksum = 0; ///< identifies the observation set

    double param(const std::string& name) const;
};

struct OdeFitOptions {
    /// Fixed capability scale for the single-series fit; <= 0 anchors the
    /// scale to the first observation (score_0 == full baseline capability).
    double h_max = 0.0;
    double epsilon = 0.01;
    double dt = 0.05; ///< integrator step, years
    int multistarts = 16;
    double alpha_lo = 1e-4, alpha_hi = 0.1;
    double beta_lo = 1e-4, beta_hi = 0.1;
    double h_max_lo = 500.0, h_max_hi = 1200.0; ///< panel fit only
};

/// Forward model shared by the fitting routines and test oracles:
/// integrate dH/dt = alpha (H + eps)(1 - H)(1 - a(t)) - beta H a(t) from
/// (t0, h0) and return H at the requested times.
std::vector<double> capability_series(double alpha, double beta, double epsilon,
                                      double h0, double t0,
                                      const std::vector<double>& record_at,
                                      const std::function<double(double)>& driver,
                                      double dt = 0.05);

/// Fit (alpha, beta_eff) of dH/dt = alpha (H + eps)(1 - H)(1 - a(t)) -
/// beta H a(t) to a single score series, H scaled by the fixed h_max and
/// anchored at the first observation.
FitResult fit_ode_single(const SingleSeries& series,
                         const std::function<double(double)>& driver,
                         const OdeFitOptions& options = {});

/// Panel fit with shared global (alpha, beta, h_max); each country is
/// integrated against its interpolated adoption series from its first
/// observed year.
FitResult fit_ode_panel(const PanelDataset& panel, const OdeFitOptions& options = {});

struct ProfileLikelihood {
    std::vector<double> alpha;
    std::vector<double> log_likelihood;
    double alpha_mle = 0.0;
    double max_log_likelihood = 0.0;
    double ci_lo = 0.0, ci_hi = 0.0; ///< 95% profile interval on the grid
    double ci_decades() const;
};

/// Profile likelihood of alpha: at each grid value the remaining parameters
/// are re-optimized; the 95% CI is {alpha : 2 (lmax - l(alpha)) <= 3.84}.
ProfileLikelihood profile_likelihood_alpha(const SingleSeries& series,
                                           const std::function<double(double)>& driver,
                                           const OdeFitOptions& options = {},
                                           int grid_points = 25);
ProfileLikelihood profile_likelihood_alpha(const PanelDataset& panel,
                                           const OdeFitOptions& options = {},
                                           int grid_points = 25);

/// Alternative decay models fitted by least squares on (x, y) pairs, where x
/// is the caller's regressor (years since the first cycle, or cumulative
/// exposure).  Kinds: linear y = a - b x; exponential y = a exp(-r x);
/// logistic y = a / (1 + exp(r (x - x0))) with x0 fixed at the mid-range.
FitResult fit_alt_model(ModelKind kind, const std::vector<double>& x,
                        const std::vector<double>& y);

/// Panel variants: country_linear fits per-country (a_c, b_c); exponential
/// fits per-country intercepts with one shared rate.
FitResult fit_alt_model_panel(ModelKind kind, const PanelDataset& panel);

// ------------------------------------------------------------- comparison

struct ComparisonRow {
    ModelKind kind = ModelKind::ode;
    int n_params = 0;
    double r_squared = 0.0;
    double rmse = 0.0;
    double aic = 0.0, bic = 0.0;
    double delta_aic = 0.0, delta_bic = 0.0;
};

/// Delta-AIC/BIC table against the best model; all fits must cover the same
/// observation set.
std::vector<ComparisonRow> compare_models(const std::vector<FitResult>& fits);

/// Information criteria on residuals normalized by score/500:
/// AIC = n ln(RSS/n) + 2k, BIC = n ln(RSS/n) + k ln(n).
struct InformationCriteria {
    double aic = 0.0;
    double bic = 0.0;
};
InformationCriteria information_criteria(const std::vector<double>& residuals,
                                         int n_params);

// ---------------------------------------------------------------- recovery

/// A synthetic exposure-removal experiment: capability declines under the
/// driver until t_removal, then the driver is zero.
struct RecoveryScenario {
    std::vector<double> times;  ///< pre-removal observation times
    std::vector<double> values; ///< capability in [0, 1]
    std::function<double(double)> driver;
    double t_removal = 0.0;
    double horizon = 50.0;
    double dt = 0.05;
    double epsilon = 0.01;
};

struct RecoveryTrajectory {
    ModelKind kind = ModelKind::ode;
    std::vector<double> times; ///< from t_removal to t_removal + horizon
    std::vector<double> values;
    double value_at_removal = 0.0;
    double baseline = 0.0;            ///< pre-exposure level the model reverts to
    double gain = 0.0;                ///< value(end) - value(t_removal)
    double gap_closed_fraction = 0.0; ///< gain / (baseline - value(t_removal))
};

/// Cumulative exposure E(t) = integral of the scenario driver from the
/// scenario start, evaluated at the requested times (midpoint rule on the
/// scenario step).
std::vector<double> cumulative_exposure(const RecoveryScenario& scenario,
                                        const std::vector<double>& times);

/// Post-removal trajectories.  Alternative models are treated as functions
/// of cumulative exposure E(t); removal freezes E and symmetric relearning
/// unwinds it at unit rate, restoring the score toward the fitted baseline.
/// The ODE integrates its capability equation with delegation forced to 0.
std::vector<RecoveryTrajectory> recovery_comparison(
    const std::vector<FitResult>& fits, const RecoveryScenario& scenario);

// ------------------------------------------------------- K operationalization

enum class BenchmarkDomain { mmlu, human_eval, usmle, bar };

const char* benchmark_domain_name(BenchmarkDomain domain);
std::optional<BenchmarkDomain> parse_benchmark_domain(const std::string& name);

struct BenchmarkScore {
    std::string model;
    std::string release_date;
    BenchmarkDomain domain = BenchmarkDomain::mmlu;
    double ai_score = 0.0;
    double human_baseline = 0.0;
};

/// Capability ratio K_d = min(ai / human, 1).
double k_ratio(const BenchmarkScore& score);

struct KbarResult {
    std::string model;
    std::map<BenchmarkDomain, double> domain_k;
    double kbar = 0.0;         ///< unweighted mean, displayed at 2 decimals
    bool above_threshold = false; ///< kbar >= 0.85
};

/// Mean capability ratio across exactly the four benchmark domains.
/// The display value truncates to 2 decimals (half rounds down), matching
/// the reference capability table.
KbarResult kbar(const std::string& model, const std::vector<BenchmarkScore>& scores);

/// Display rounding used for kbar.
double round_display_2dp(double x);

} // namespace capdyn::estimation
