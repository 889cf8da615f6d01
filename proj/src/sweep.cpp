#include "capdyn/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "capdyn/config_keys.hpp"
#include "capdyn/ode.hpp"
#include "capdyn/parallel.hpp"
#include "capdyn/stats.hpp"

namespace capdyn::sweep {

std::vector<double> SweepAxis::values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out.push_back(lo + (hi - lo) * static_cast<double>(i) /
                               static_cast<double>(count - 1));
    return out;
}

void SweepSpec::validate() const {
    if (axes.empty() || axes.size() > 2)
        throw std::invalid_argument("sweep: need one or two axes");
    for (const auto& axis : axes) {
        if (axis.count < 2) throw std::invalid_argument("sweep: grid counts must be >= 2");
        if (!(axis.lo <= axis.hi))
            throw std::invalid_argument("sweep: axis range must have lo <= hi");
    }
    if (replicates < 1) throw std::invalid_argument("sweep: replicates must be >= 1");
    base_config.validate();
}

SweepResult run_sweep(const SweepSpec& spec, int threads) {
    spec.validate();

    // Flatten the one- or two-axis grid into row-major points.
    std::vector<std::vector<double>> axis_values;
    for (const auto& axis : spec.axes) axis_values.push_back(axis.values());
    const std::size_t n0 = axis_values[0].size();
    const std::size_t n1 = axis_values.size() > 1 ? axis_values[1].size() : 1;
    const std::size_t n_points = n0 * n1;
    const auto reps = static_cast<std::size_t>(spec.replicates);

    // Validate every grid point up front so worker threads cannot throw.
    std::vector<abm::AbmConfig> point_configs(n_points, spec.base_config);
    for (std::size_t p = 0; p < n_points; ++p) {
        apply_abm_axis(point_configs[p], spec.axes[0].name, axis_values[0][p / n1]);
        if (axis_values.size() > 1)
            apply_abm_axis(point_configs[p], spec.axes[1].name, axis_values[1][p % n1]);
        point_configs[p].validate();
    }

    std::vector<double> equilibria(n_points * reps, 0.0);
    parallel_for(n_points * reps, threads, [&](std::size_t task) {
        const std::size_t point = task / reps;
        const std::size_t replicate = task % reps;
        abm::AbmConfig cfg = point_configs[point];
        cfg.seed = mix_seed(spec.base_config.seed, point * 1000000ULL + replicate);
        equilibria[task] = abm::run(cfg).equilibrium_h;
    });

    SweepResult result;
    result.spec = spec;
    result.runs_executed = static_cast<long>(n_points * reps);
    result.cells.reserve(n_points);
    for (std::size_t p = 0; p < n_points; ++p) {
        std::vector<double> sample(equilibria.begin() + static_cast<long>(p * reps),
                                   equilibria.begin() + static_cast<long>((p + 1) * reps));
        SweepCell cell;
        cell.axis_values.push_back(axis_values[0][p / n1]);
        if (axis_values.size() > 1) cell.axis_values.push_back(axis_values[1][p % n1]);
        cell.mean = mean(sample);
        const Iqr q = iqr(sample);
        cell.iqr_lo = q.lo;
        cell.iqr_hi = q.hi;
        cell.statistic =
            spec.statistic == Statistic::median ? median(sample) : cell.mean;
        result.cells.push_back(std::move(cell));
    }
    return result;
}

KStarReport k_sweep(const abm::AbmConfig& base, const KStarOptions& options,
                    int threads) {
    SweepSpec spec;
    spec.axes = {{"params.k_ai", options.k_lo, options.k_hi, options.points}};
    spec.replicates = options.replicates;
    spec.base_config = base;
    spec.statistic = options.statistic;
    const SweepResult swept = run_sweep(spec, threads);

    KStarReport report;
    for (const auto& cell : swept.cells) {
        report.k_values.push_back(cell.axis_values[0]);
        report.statistic_h.push_back(cell.statistic);
        report.iqr_lo.push_back(cell.iqr_lo);
        report.iqr_hi.push_back(cell.iqr_hi);
    }

    std::vector<double> curve = report.statistic_h;
    if (options.smooth && curve.size() >= 3) {
        std::vector<double> smoothed = curve;
        for (std::size_t i = 1; i + 1 < curve.size(); ++i)
            smoothed[i] = (curve[i - 1] + curve[i] + curve[i + 1]) / 3.0;
        curve = std::move(smoothed);
    }

    const std::size_t n = curve.size();
    report.gradient.assign(n, 0.0);
    double best = -1.0;
    std::size_t best_i = 1;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dk = report.k_values[i + 1] - report.k_values[i - 1];
        const double g = std::abs((curve[i + 1] - curve[i - 1]) / dk);
        report.gradient[i] = g;
        if (g > best) {
            best = g;
            best_i = i;
        }
        if (curve[i + 1] > curve[i] + 1e-12)
            report.non_monotone_points.push_back(static_cast<int>(i));
    }
    report.k_star = report.k_values[best_i];
    report.max_gradient = best;
    report.endpoint_maximum = best_i == 1 || best_i + 2 == n;
    return report;
}

HeatmapResult k_crisis_heatmap(const abm::AbmConfig& base, int k_points,
                               int crisis_points, int replicates, int threads) {
    SweepSpec spec;
    spec.axes = {{"p_crisis", 0.0, 0.25, crisis_points},
                 {"params.k_ai", 0.50, 0.99, k_points}};
    spec.replicates = replicates;
    spec.base_config = base;
    const SweepResult swept = run_sweep(spec, threads);

    HeatmapResult out;
    out.k_values = spec.axes[1].values();
    out.crisis_values = spec.axes[0].values();
    out.statistic_h.assign(static_cast<std::size_t>(crisis_points),
                           std::vector<double>(static_cast<std::size_t>(k_points)));
    for (std::size_t p = 0; p < swept.cells.size(); ++p)
        out.statistic_h[p / static_cast<std::size_t>(k_points)]
                       [p % static_cast<std::size_t>(k_points)] =
            swept.cells[p].statistic;

    // H = 0.5 contour: first downward crossing along each crisis row.
    for (const auto& row : out.statistic_h) {
        std::optional<double> crossing;
        for (std::size_t j = 0; j + 1 < row.size(); ++j) {
            const double a = row[j], b = row[j + 1];
            if ((a >= 0.5 && b < 0.5) || (a < 0.5 && b >= 0.5)) {
                const double frac = (0.5 - a) / (b - a);
                crossing = out.k_values[j] + frac * (out.k_values[j + 1] - out.k_values[j]);
                break;
            }
        }
        out.contour_k.push_back(crossing);
    }
    return out;
}

std::vector<AntifragilityRow> antifragility_curve(
    const abm::AbmConfig& base, const std::vector<double>& k_values,
    const std::vector<double>& crisis_values, int replicates, int threads) {
    if (k_values.empty() || crisis_values.size() < 2)
        throw std::invalid_argument("antifragility_curve: need K values and >= 2 crisis levels");

    std::vector<AntifragilityRow> rows;
    for (double k : k_values) {
        double h_at_zero = 0.0;
        for (std::size_t ci = 0; ci < crisis_values.size(); ++ci) {
            abm::AbmConfig cfg = base;
            cfg.params.k_ai = k;
            cfg.p_crisis = crisis_values[ci];
            const auto stats = abm::run_ensemble(cfg, replicates, threads);
            AntifragilityRow row;
            row.k = k;
            row.crisis = crisis_values[ci];
            row.statistic = stats.median;
            row.iqr_lo = stats.iqr_lo;
            row.iqr_hi = stats.iqr_hi;
            if (ci == 0 && crisis_values[0] == 0.0) h_at_zero = stats.median;
            row.improvement_ratio = h_at_zero > 0.0 ? stats.median / h_at_zero : 1.0;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<PolicyRow> policy_curve(const abm::AbmConfig& base,
                                    const std::vector<double>& fractions,
                                    int replicates, int threads) {
    if (fractions.empty())
        throw std::invalid_argument("policy_curve: need practice fractions");
    std::vector<PolicyRow> rows;
    double baseline = 0.0;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        abm::AbmConfig cfg = base;
        cfg.practice_fraction = fractions[i];
        const auto stats = abm::run_ensemble(cfg, replicates, threads);
        PolicyRow row;
        row.practice_fraction = fractions[i];
        row.median_h = stats.median;
        row.iqr_lo = stats.iqr_lo;
        row.iqr_hi = stats.iqr_hi;
        if (i == 0) baseline = stats.median;
        row.improvement_pct =
            baseline > 0.0 ? 100.0 * (stats.median - baseline) / baseline : 0.0;
        rows.push_back(row);
    }
    return rows;
}

SensitivityReport sensitivity_suite(const abm::AbmConfig& base,
                                    const std::vector<SensitivityRange>& ranges,
                                    const KStarOptions& k_options, int threads) {
    SensitivityReport report;
    report.all_interior = true;
    bool first = true;
    for (const auto& range : ranges) {
        if (range.count < 5)
            throw std::invalid_argument("sensitivity_suite: need >= 5 values per range");
        const std::string key =
            range.parameter == "scope" ? "params.scope" : "params." + range.parameter;
        for (int i = 0; i < range.count; ++i) {
            const double value = range.lo + (range.hi - range.lo) *
                                                static_cast<double>(i) /
                                                static_cast<double>(range.count - 1);
            abm::AbmConfig cfg = base;
            apply_abm_axis(cfg, key, value);
            const KStarReport k = k_sweep(cfg, k_options, threads);
            SensitivityRow row;
            row.parameter = range.parameter;
            row.value = value;
            row.k_star = k.k_star;
            row.interior = !k.endpoint_maximum;
            row.max_gradient = k.max_gradient;
            report.rows.push_back(row);
            report.all_interior = report.all_interior && row.interior;
            if (first || k.k_star < report.pooled_k_star_min)
                report.pooled_k_star_min = k.k_star;
            if (first || k.k_star > report.pooled_k_star_max)
                report.pooled_k_star_max = k.k_star;
            first = false;
        }
    }
    return report;
}

EpsilonSweep epsilon_sweep(std::vector<double> eps_grid, double h_start,
                           double h_target, double d_fixed) {
    if (eps_grid.size() < 2)
        throw std::invalid_argument("epsilon_sweep: need >= 2 epsilon values");
    std::sort(eps_grid.begin(), eps_grid.end());

    EpsilonSweep out;
    for (double eps : eps_grid) {
        ModelParams params;
        params.alpha = 1.0; // calibration normalization
        params.beta = 0.5;
        params.epsilon = eps;
        const auto rec = ode::recovery_time(params, h_start, h_target, d_fixed);
        if (rec.status != ode::RecoveryStatus::reached)
            throw std::runtime_error("epsilon_sweep: target not reached at eps = " +
                                     std::to_string(eps));
        out.points.push_back({eps, rec.time});
    }
    out.ratio_first_to_last = out.points.front().recovery_time /
                              out.points.back().recovery_time;
    return out;
}

GammaDeltaGrid gamma_delta_grid(int gamma_points, int delta_points, int threads) {
    if (gamma_points < 2 || delta_points < 2)
        throw std::invalid_argument("gamma_delta_grid: need >= 2 points per axis");

    GammaDeltaGrid out;
    for (int i = 0; i < gamma_points; ++i)
        out.gamma_values.push_back(0.01 + (1.0 - 0.01) * static_cast<double>(i) /
                                              static_cast<double>(gamma_points - 1));
    for (int j = 0; j < delta_points; ++j)
        out.delta_values.push_back(0.01 + (1.0 - 0.01) * static_cast<double>(j) /
                                              static_cast<double>(delta_points - 1));

    out.equilibrium_h.assign(static_cast<std::size_t>(delta_points),
                             std::vector<double>(static_cast<std::size_t>(gamma_points)));
    const auto total = static_cast<std::size_t>(gamma_points) *
                       static_cast<std::size_t>(delta_points);
    const SystemState autonomous{0.95, 0.02};
    parallel_for(total, threads, [&](std::size_t idx) {
        const std::size_t j = idx / static_cast<std::size_t>(gamma_points);
        const std::size_t i = idx % static_cast<std::size_t>(gamma_points);
        ModelParams params;
        params.alpha = 1.0;
        params.beta = 0.5;
        params.k_ai = 0.7;
        params.scope = 1.0;
        params.gamma = out.gamma_values[i];
        params.delta = out.delta_values[j];
        out.equilibrium_h[j][i] =
            ode::integrate(params, autonomous, 2000.0, 0.1).final_state().h;
    });

    // Historical regimes (cost c, scope s), placed by gamma = clamp(1 - c)
    // and evaluated at high tool capability from the standard mixed start.
    struct Regime {
        const char* name;
        double cost, scope;
    };
    const Regime regimes[] = {{"calculator", 0.99, 0.01},
                              {"industrial-revolution", 0.30, 0.05},
                              {"roman-slave-economy", 0.05, 0.60},
                              {"ai-2030", 0.01, 0.80}};
    for (const auto& regime : regimes) {
        HistoricalPreset preset;
        preset.name = regime.name;
        preset.cost = regime.cost;
        preset.scope = regime.scope;
        preset.gamma = std::clamp(1.0 - regime.cost, 0.01, 1.0);
        ModelParams params;
        params.alpha = 1.0;
        params.beta = 0.5;
        params.gamma = preset.gamma;
        params.delta = 0.5;
        params.scope = preset.scope;
        params.k_ai = 0.95;
        preset.equilibrium_h =
            ode::integrate(params, {0.8, 0.1}, 2000.0, 0.1).final_state().h;
        out.presets.push_back(preset);
    }
    return out;
}

InitialConditionGrid initial_condition_grid(int h0_points, int scope_points,
                                            double k_ai, int threads) {
    if (h0_points < 2 || scope_points < 2)
        throw std::invalid_argument("initial_condition_grid: need >= 2 points per axis");
    InitialConditionGrid out;
    for (int i = 0; i < h0_points; ++i)
        out.h0_values.push_back(static_cast<double>(i) /
                                static_cast<double>(h0_points - 1));
    for (int j = 0; j < scope_points; ++j)
        out.scope_values.push_back(0.05 + (1.0 - 0.05) * static_cast<double>(j) /
                                              static_cast<double>(scope_points - 1));
    out.equilibrium_h.assign(static_cast<std::size_t>(scope_points),
                             std::vector<double>(static_cast<std::size_t>(h0_points)));
    const auto total = static_cast<std::size_t>(h0_points) *
                       static_cast<std::size_t>(scope_points);
    parallel_for(total, threads, [&](std::size_t idx) {
        const std::size_t j = idx / static_cast<std::size_t>(h0_points);
        const std::size_t i = idx % static_cast<std::size_t>(h0_points);
        ModelParams params;
        params.k_ai = k_ai;
        params.scope = out.scope_values[j];
        out.equilibrium_h[j][i] =
            ode::integrate(params, {out.h0_values[i], 0.1}, 2000.0, 0.1)
                .final_state()
                .h;
    });
    return out;
}

} // namespace capdyn::sweep
