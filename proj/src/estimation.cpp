#include "capdyn/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "capdyn/optim.hpp"

namespace capdyn::estimation {

namespace {

constexpr double kScoreNormalization = 500.0;

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        hash ^= bytes[i];
        hash *= 1099511628211ULL;
    }
    return hash;
}

std::uint64_t checksum_observations(const std::vector<Observation>& obs) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (const auto& o : obs) {
        hash = fnv1a(hash, o.country.data(), o.country.size());
        hash = fnv1a(hash, &o.year, sizeof(o.year));
        hash = fnv1a(hash, &o.score, sizeof(o.score));
    }
    return hash;
}

// Hash of the observed values only, so fits that re-encode the regressor
// (years, offsets, cumulative exposure) still count as the same data.
std::uint64_t checksum_series(const std::vector<double>& y) {
    std::uint64_t hash = 14695981039346656037ULL;
    for (const double v : y) hash = fnv1a(hash, &v, sizeof(double));
    return hash;
}

double sum_squares(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double r_squared_of(const std::vector<double>& residuals, const std::vector<double>& y) {
    double mean_y = 0.0;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<double>(y.size());
    double tss = 0.0;
    for (double v : y) tss += (v - mean_y) * (v - mean_y);
    const double rss = sum_squares(residuals);
    if (tss <= 0.0) return rss <= 0.0 ? 1.0 : 0.0;
    return 1.0 - rss / tss;
}

void finalize_fit(FitResult& fit, const std::vector<double>& y) {
    fit.n_obs = static_cast<int>(y.size());
    fit.r_squared = r_squared_of(fit.residuals, y);
    fit.rmse = std::sqrt(sum_squares(fit.residuals) / static_cast<double>(y.size()));
    const InformationCriteria ic = information_criteria(fit.residuals, fit.n_params);
    fit.aic = ic.aic;
    fit.bic = ic.bic;
}

/// Integrate dH/dt = alpha (H + eps)(1 - H)(1 - a(t)) - beta H a(t) from
/// (t0, h0) and collect H at the requested times (which must be t0 + k dt
/// within rounding).
std::vector<double> integrate_capability(double alpha, double beta, double eps,
                                         double h0, double t0,
                                         const std::vector<double>& record_at,
                                         const std::function<double(double)>& driver,
                                         double dt) {
    const auto rhs = [&](double h, double t) {
        const double a = driver(t);
        return alpha * (h + eps) * (1.0 - h) * (1.0 - a) - beta * h * a;
    };
    std::vector<double> out;
    out.reserve(record_at.size());
    double h = h0;
    double t = t0;
    std::size_t next = 0;
    while (next < record_at.size() && record_at[next] <= t0 + 1e-9) {
        out.push_back(h);
        ++next;
    }
    const double t_end = record_at.empty() ? t0 : record_at.back();
    while (t < t_end - 1e-9) {
        const double k1 = rhs(h, t);
        const double k2 = rhs(h + 0.5 * dt * k1, t + 0.5 * dt);
        const double k3 = rhs(h + 0.5 * dt * k2, t + 0.5 * dt);
        const double k4 = rhs(h + dt * k3, t + dt);
        h += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        h = std::clamp(h, 0.0, 1.0);
        t += dt;
        while (next < record_at.size() && record_at[next] <= t + 1e-9) {
            out.push_back(h);
            ++next;
        }
    }
    while (next < record_at.size()) {
        out.push_back(h);
        ++next;
    }
    return out;
}

struct CountrySeries {
    std::string country;
    std::vector<double> years;
    std::vector<double> scores;
    std::vector<std::size_t> observation_index; ///< into panel.observations
};

std::vector<CountrySeries> split_by_country(const PanelDataset& panel) {
    std::map<std::string, CountrySeries> by_country;
    for (std::size_t i = 0; i < panel.observations.size(); ++i) {
        const auto& o = panel.observations[i];
        auto& cs = by_country[o.country];
        cs.country = o.country;
        cs.years.push_back(o.year);
        cs.scores.push_back(o.score);
        cs.observation_index.push_back(i);
    }
    std::vector<CountrySeries> out;
    for (auto& [name, cs] : by_country) {
        // Sort each country by year, carrying the observation indices along.
        std::vector<std::size_t> order(cs.years.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return cs.years[a] < cs.years[b];
        });
        CountrySeries sorted;
        sorted.country = cs.country;
        for (auto i : order) {
            sorted.years.push_back(cs.years[i]);
            sorted.scores.push_back(cs.scores[i]);
            sorted.observation_index.push_back(cs.observation_index[i]);
        }
        out.push_back(std::move(sorted));
    }
    return out;
}

/// Pooled panel residuals for shared (alpha, beta, h_max).
std::vector<double> panel_residuals(const std::vector<CountrySeries>& countries,
                                    const InterpolatedDriver& driver, double alpha,
                                    double beta, double h_max, double eps, double dt,
                                    std::size_t n_observations) {
    std::vector<double> residuals(n_observations, 0.0);
    for (const auto& cs : countries) {
        const double h0 = cs.scores.front() / h_max;
        const auto country_driver = [&](double t) { return driver.at(cs.country, t); };
        const auto h = integrate_capability(alpha, beta, eps, h0, cs.years.front(),
                                            cs.years, country_driver, dt);
        for (std::size_t i = 0; i < cs.years.size(); ++i)
            residuals[cs.observation_index[i]] = cs.scores[i] - h_max * h[i];
    }
    return residuals;
}

double gaussian_log_likelihood(double rss_normalized, int n) {
    const double variance = rss_normalized / static_cast<double>(n);
    return -0.5 * static_cast<double>(n) *
           (std::log(2.0 * M_PI * variance) + 1.0);
}

double normalized_rss(const std::vector<double>& residuals) {
    double s = 0.0;
    for (double r : residuals) {
        const double z = r / kScoreNormalization;
        s += z * z;
    }
    return s;
}

ProfileLikelihood profile_from(
    const std::function<double(double alpha, std::vector<double>* best)>& rss_at_alpha,
    double alpha_lo, double alpha_hi, int grid_points, double alpha_mle,
    double rss_mle, int n_obs) {
    ProfileLikelihood profile;
    const double log_lo = std::log10(alpha_lo);
    const double log_hi = std::log10(alpha_hi);
    for (int i = 0; i < grid_points; ++i) {
        const double a = std::pow(10.0, log_lo + (log_hi - log_lo) *
                                                     static_cast<double>(i) /
                                                     static_cast<double>(grid_points - 1));
        profile.alpha.push_back(a);
        profile.log_likelihood.push_back(
            gaussian_log_likelihood(rss_at_alpha(a, nullptr), n_obs));
    }
    profile.alpha_mle = alpha_mle;
    profile.max_log_likelihood = gaussian_log_likelihood(rss_mle, n_obs);
    // The grid may slightly beat the unconstrained optimum on rough
    // objectives; keep the reported maximum consistent with the curve.
    for (std::size_t i = 0; i < profile.alpha.size(); ++i)
        if (profile.log_likelihood[i] > profile.max_log_likelihood) {
            profile.max_log_likelihood = profile.log_likelihood[i];
            profile.alpha_mle = profile.alpha[i];
        }

    // 95% interval: the deviance 2 (lmax - l) crosses 3.84.  The reported
    // curve keeps the coarse grid; the interval endpoints are refined by
    // bisection on the profile deviance in log10(alpha), since near a sharp
    // peak the crossing can sit well inside one grid cell.
    constexpr double kThreshold = 3.84;
    const auto deviance_at = [&](double alpha) {
        return 2.0 * (profile.max_log_likelihood -
                      gaussian_log_likelihood(rss_at_alpha(alpha, nullptr), n_obs));
    };
    const auto grid_deviance = [&](std::size_t i) {
        return 2.0 * (profile.max_log_likelihood - profile.log_likelihood[i]);
    };
    const auto bisect_crossing = [&](double inside, double outside) {
        double log_in = std::log10(inside), log_out = std::log10(outside);
        for (int iter = 0; iter < 11; ++iter) {
            const double mid = 0.5 * (log_in + log_out);
            if (deviance_at(std::pow(10.0, mid)) <= kThreshold)
                log_in = mid;
            else
                log_out = mid;
        }
        return std::pow(10.0, 0.5 * (log_in + log_out));
    };

    std::size_t first_inside = profile.alpha.size(), last_inside = 0;
    bool any = false;
    for (std::size_t i = 0; i < profile.alpha.size(); ++i) {
        if (grid_deviance(i) <= kThreshold) {
            if (!any) first_inside = i;
            last_inside = i;
            any = true;
        }
    }
    if (!any) {
        // The grid never enters the interval (very sharp peak between grid
        // points); fall back to a window around the MLE.
        profile.ci_lo = bisect_crossing(profile.alpha_mle, alpha_lo);
        profile.ci_hi = bisect_crossing(profile.alpha_mle, alpha_hi);
    } else {
        profile.ci_lo = first_inside == 0
                            ? profile.alpha.front()
                            : bisect_crossing(profile.alpha[first_inside],
                                              profile.alpha[first_inside - 1]);
        profile.ci_hi = last_inside + 1 == profile.alpha.size()
                            ? profile.alpha.back()
                            : bisect_crossing(profile.alpha[last_inside],
                                              profile.alpha[last_inside + 1]);
    }
    profile.ci_lo = std::min(profile.ci_lo, profile.alpha_mle);
    profile.ci_hi = std::max(profile.ci_hi, profile.alpha_mle);
    return profile;
}

} // namespace

// ---------------------------------------------------------------- datasets

std::vector<double> capability_series(double alpha, double beta, double epsilon,
                                      double h0, double t0,
                                      const std::vector<double>& record_at,
                                      const std::function<double(double)>& driver,
                                      double dt) {
    return integrate_capability(alpha, beta, epsilon, h0, t0, record_at, driver, dt);
}

void DeskillObservation::validate() const {
    if (!(decline > 0.0 && decline < 1.0))
        throw std::invalid_argument("deskill observation: decline must lie in (0, 1)");
    if (!(duration > 0.0))
        throw std::invalid_argument("deskill observation: duration must be > 0");
}

void PanelDataset::validate() const {
    std::set<std::pair<std::string, int>> seen;
    std::set<std::string> driver_countries;
    for (const auto& d : drivers) {
        if (!(d.fraction >= 0.0 && d.fraction <= 1.0))
            throw std::invalid_argument("panel: adoption fraction out of range [0, 1]");
        driver_countries.insert(d.country);
    }
    for (const auto& o : observations) {
        if (!(o.score >= 200.0 && o.score <= 700.0))
            throw std::invalid_argument("panel: score out of range [200, 700] for " +
                                        o.country);
        if (!seen.insert({o.country, o.year}).second)
            throw std::invalid_argument("panel: duplicate observation for " + o.country +
                                        " " + std::to_string(o.year));
        if (!driver_countries.count(o.country))
            throw std::invalid_argument("panel: no adoption driver series for " +
                                        o.country);
    }
}

std::vector<std::string> PanelDataset::countries() const {
    std::set<std::string> names;
    for (const auto& o : observations) names.insert(o.country);
    return {names.begin(), names.end()};
}

InterpolatedDriver::InterpolatedDriver(std::vector<AdoptionPoint> points) {
    for (const auto& p : points)
        by_country_[p.country].emplace_back(static_cast<double>(p.year), p.fraction);
    for (auto& [name, series] : by_country_) {
        std::sort(series.begin(), series.end());
        if (series.empty())
            throw std::invalid_argument("driver: empty series for " + name);
    }
}

double InterpolatedDriver::at(const std::string& country, double year) const {
    const auto it = by_country_.find(country);
    if (it == by_country_.end())
        throw std::invalid_argument("driver: unknown country " + country);
    const auto& series = it->second;
    if (year <= series.front().first) return series.front().second;
    if (year >= series.back().first) return series.back().second;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        if (year <= series[i + 1].first) {
            const auto [t0, v0] = series[i];
            const auto [t1, v1] = series[i + 1];
            return v0 + (v1 - v0) * (year - t0) / (t1 - t0);
        }
    }
    return series.back().second;
}

std::function<double(double)> oecd_default_driver() {
    // a(t) = A / (1 + exp(-r (t - 2012))) with A, r solving the anchors
    // a(2003) = 0.05 and a(2022) = 0.90.
    static const auto solved = [] {
        const auto anchor_gap = [](double r) {
            const double amplitude = 0.90 * (1.0 + std::exp(-10.0 * r));
            return amplitude / (1.0 + std::exp(9.0 * r)) - 0.05;
        };
        double lo = 0.01, hi = 2.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (anchor_gap(mid) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double r = 0.5 * (lo + hi);
        const double amplitude = 0.90 * (1.0 + std::exp(-10.0 * r));
        return std::pair<double, double>{amplitude, r};
    }();
    return [amplitude = solved.first, rate = solved.second](double year) {
        return amplitude / (1.0 + std::exp(-rate * (year - 2012.0)));
    };
}

// ------------------------------------------------------------- calibration

double beta_eff(const DeskillObservation& obs) {
    if (obs.decline >= 1.0)
        throw std::invalid_argument("beta_eff: decline must be < 1");
    if (obs.decline < 0.0)
        throw std::invalid_argument("beta_eff: decline must be >= 0");
    if (!(obs.duration > 0.0))
        throw std::invalid_argument("beta_eff: duration must be > 0");
    return -std::log1p(-obs.decline) / obs.duration;
}

std::vector<double> predict_decline_curve(double beta, double d, double h0,
                                          const std::vector<double>& t_grid) {
    if (beta < 0.0) throw std::invalid_argument("predict_decline_curve: beta < 0");
    std::vector<double> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) out.push_back(h0 * std::exp(-beta * d * t));
    return out;
}

// ----------------------------------------------------------------- fitting

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::ode: return "ode";
        case ModelKind::linear: return "linear";
        case ModelKind::exponential: return "exponential";
        case ModelKind::logistic: return "logistic";
        case ModelKind::country_linear: return "country-linear";
    }
    return "?";
}

double FitResult::param(const std::string& name) const {
    for (const auto& [key, value] : parameters)
        if (key == name) return value;
    throw std::invalid_argument("fit result has no parameter '" + name + "'");
}

FitResult fit_ode_single(const SingleSeries& series,
                         const std::function<double(double)>& driver,
                         const OdeFitOptions& options) {
    if (series.years.size() < 4)
        throw std::invalid_argument("fit_ode_single: need >= 4 observations");
    if (series.years.size() != series.scores.size())
        throw std::invalid_argument("fit_ode_single: years/scores size mismatch");

    std::vector<double> years(series.years.begin(), series.years.end());
    const double h_max =
        options.h_max > 0.0 ? options.h_max : series.scores.front();
    const double h0 = series.scores.front() / h_max;

    const auto residuals_for = [&](double alpha, double beta) {
        const auto h = integrate_capability(alpha, beta, options.epsilon, h0,
                                            years.front(), years, driver, options.dt);
        std::vector<double> res(years.size());
        for (std::size_t i = 0; i < years.size(); ++i)
            res[i] = series.scores[i] - h_max * h[i];
        return res;
    };

    optim::Problem problem;
    problem.lo = {options.alpha_lo, options.beta_lo};
    problem.hi = {options.alpha_hi, options.beta_hi};
    problem.log_scale = {true, true};
    problem.objective = [&](std::span<const double> x) {
        return sum_squares(residuals_for(x[0], x[1]));
    };
    const optim::Result best = optim::multistart_minimize(problem, options.multistarts);

    FitResult fit;
    fit.kind = ModelKind::ode;
    fit.parameters = {{"alpha", best.x[0]}, {"beta_eff", best.x[1]},
                      {"h_max", h_max}};
    fit.n_params = 2;
    fit.converged = best.converged;
    fit.residuals = residuals_for(best.x[0], best.x[1]);
    fit.data_checksum = checksum_series(series.scores);
    finalize_fit(fit, series.scores);
    return fit;
}

FitResult fit_ode_panel(const PanelDataset& panel, const OdeFitOptions& options) {
    panel.validate();
    const auto countries = split_by_country(panel);
    if (countries.size() < 2)
        throw std::invalid_argument("fit_ode_panel: need >= 2 countries");
    const InterpolatedDriver driver(panel.drivers);

    std::vector<double> y(panel.observations.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = panel.observations[i].score;

    optim::Problem problem;
    problem.lo = {options.alpha_lo, options.beta_lo, options.h_max_lo};
    problem.hi = {options.alpha_hi, options.beta_hi, options.h_max_hi};
    problem.log_scale = {true, true, false};
    problem.objective = [&](std::span<const double> x) {
        return sum_squares(panel_residuals(countries, driver, x[0], x[1], x[2],
                                           options.epsilon, options.dt, y.size()));
    };
    const optim::Result best = optim::multistart_minimize(problem, options.multistarts);

    FitResult fit;
    fit.kind = ModelKind::ode;
    fit.parameters = {{"alpha", best.x[0]}, {"beta", best.x[1]}, {"h_max", best.x[2]}};
    fit.n_params = 3;
    fit.converged = best.converged;
    fit.boundary_pinned =
        best.x[2] <= options.h_max_lo + 1e-9 || best.x[2] >= options.h_max_hi - 1e-9;
    fit.residuals = panel_residuals(countries, driver, best.x[0], best.x[1], best.x[2],
                                    options.epsilon, options.dt, y.size());
    fit.data_checksum = checksum_observations(panel.observations);
    finalize_fit(fit, y);
    return fit;
}

double ProfileLikelihood::ci_decades() const {
    if (ci_lo <= 0.0 || ci_hi <= 0.0) return 0.0;
    return std::log10(ci_hi / ci_lo);
}

ProfileLikelihood profile_likelihood_alpha(const SingleSeries& series,
                                           const std::function<double(double)>& driver,
                                           const OdeFitOptions& options,
                                           int grid_points) {
    const FitResult mle = fit_ode_single(series, driver, options);
    std::vector<double> years(series.years.begin(), series.years.end());
    const double h_max = mle.param("h_max");
    const double h0 = series.scores.front() / h_max;

    const auto rss_for = [&](double alpha, double beta) {
        const auto h = integrate_capability(alpha, beta, options.epsilon, h0,
                                            years.front(), years, driver, options.dt);
        double rss = 0.0;
        for (std::size_t i = 0; i < years.size(); ++i) {
            const double r = (series.scores[i] - h_max * h[i]) /
                             kScoreNormalization;
            rss += r * r;
        }
        return rss;
    };

    const double beta_mle = mle.param("beta_eff");
    const auto rss_at_alpha = [&](double alpha, std::vector<double>*) {
        optim::Problem problem;
        problem.lo = {options.beta_lo};
        problem.hi = {options.beta_hi};
        problem.log_scale = {true};
        problem.objective = [&](std::span<const double> x) {
            return rss_for(alpha, x[0]);
        };
        // Warm start at the unconstrained optimum, plus a coarse multistart.
        optim::Result warm = optim::nelder_mead(problem, {&beta_mle, 1});
        warm = optim::nelder_mead(problem, warm.x);
        const optim::Result broad = optim::multistart_minimize(problem, 6);
        return std::min(warm.value, broad.value);
    };

    return profile_from(rss_at_alpha, options.alpha_lo, options.alpha_hi, grid_points,
                        mle.param("alpha"),
                        rss_for(mle.param("alpha"), beta_mle),
                        static_cast<int>(series.years.size()));
}

ProfileLikelihood profile_likelihood_alpha(const PanelDataset& panel,
                                           const OdeFitOptions& options,
                                           int grid_points) {
    const FitResult mle = fit_ode_panel(panel, options);
    const auto countries = split_by_country(panel);
    const InterpolatedDriver driver(panel.drivers);
    const std::size_t n = panel.observations.size();

    const auto rss_for = [&](double alpha, double beta, double h_max) {
        return normalized_rss(panel_residuals(countries, driver, alpha, beta, h_max,
                                              options.epsilon, options.dt, n));
    };

    const double beta_mle = mle.param("beta");
    const double h_max_mle = mle.param("h_max");
    const auto rss_at_alpha = [&](double alpha, std::vector<double>*) {
        optim::Problem problem;
        problem.lo = {options.beta_lo, options.h_max_lo};
        problem.hi = {options.beta_hi, options.h_max_hi};
        problem.log_scale = {true, false};
        problem.objective = [&](std::span<const double> x) {
            return rss_for(alpha, x[0], x[1]);
        };
        const std::vector<double> warm_start = {beta_mle, h_max_mle};
        optim::Result warm = optim::nelder_mead(problem, warm_start);
        warm = optim::nelder_mead(problem, warm.x);
        const optim::Result broad = optim::multistart_minimize(problem, 6);
        return std::min(warm.value, broad.value);
    };

    return profile_from(rss_at_alpha, options.alpha_lo, options.alpha_hi, grid_points,
                        mle.param("alpha"),
                        rss_for(mle.param("alpha"), beta_mle, h_max_mle),
                        static_cast<int>(n));
}

FitResult fit_alt_model(ModelKind kind, const std::vector<double>& x,
                        const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::invalid_argument("fit_alt_model: need >= 3 (x, y) pairs");
    const auto n = static_cast<double>(x.size());

    FitResult fit;
    fit.kind = kind;
    fit.n_params = 2;
    fit.data_checksum = checksum_series(y);

    if (kind == ModelKind::linear) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sx += x[i];
            sy += y[i];
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
        }
        const double denom = n * sxx - sx * sx;
        if (std::abs(denom) < 1e-12)
            throw std::invalid_argument("fit_alt_model: singular linear design");
        const double slope = (n * sxy - sx * sy) / denom;
        const double intercept = (sy - slope * sx) / n;
        fit.parameters = {{"a", intercept}, {"b", -slope}};
        fit.residuals.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            fit.residuals[i] = y[i] - (intercept + slope * x[i]);
        finalize_fit(fit, y);
        return fit;
    }

    const double y_max = *std::max_element(y.begin(), y.end());
    if (kind == ModelKind::exponential) {
        optim::Problem problem;
        problem.lo = {0.25 * y_max, 1e-8};
        problem.hi = {4.0 * y_max, 1.0};
        problem.log_scale = {false, true};
        problem.objective = [&](std::span<const double> p) {
            double rss = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double r = y[i] - p[0] * std::exp(-p[1] * x[i]);
                rss += r * r;
            }
            return rss;
        };
        const optim::Result best = optim::multistart_minimize(problem, 16);
        fit.parameters = {{"a", best.x[0]}, {"r", best.x[1]}};
        fit.converged = best.converged;
        fit.residuals.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            fit.residuals[i] = y[i] - best.x[0] * std::exp(-best.x[1] * x[i]);
        finalize_fit(fit, y);
        return fit;
    }

    if (kind == ModelKind::logistic) {
        // Midpoint fixed at the regressor mid-range so only (a, r) are free.
        const double x_lo = *std::min_element(x.begin(), x.end());
        const double x_hi = *std::max_element(x.begin(), x.end());
        const double x0 = 0.5 * (x_lo + x_hi);
        optim::Problem problem;
        problem.lo = {0.5 * y_max, 1e-6};
        problem.hi = {8.0 * y_max, 2.0};
        problem.log_scale = {false, true};
        problem.objective = [&](std::span<const double> p) {
            double rss = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double r = y[i] - p[0] / (1.0 + std::exp(p[1] * (x[i] - x0)));
                rss += r * r;
            }
            return rss;
        };
        const optim::Result best = optim::multistart_minimize(problem, 16);
        fit.parameters = {{"a", best.x[0]}, {"r", best.x[1]}, {"x0", x0}};
        fit.converged = best.converged;
        fit.residuals.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            fit.residuals[i] =
                y[i] - best.x[0] / (1.0 + std::exp(best.x[1] * (x[i] - x0)));
        finalize_fit(fit, y);
        return fit;
    }

    throw std::invalid_argument("fit_alt_model: kind requires panel data");
}

FitResult fit_alt_model_panel(ModelKind kind, const PanelDataset& panel) {
    panel.validate();
    const auto countries = split_by_country(panel);
    int min_year = panel.observations.front().year;
    for (const auto& o : panel.observations) min_year = std::min(min_year, o.year);

    std::vector<double> y(panel.observations.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = panel.observations[i].score;

    FitResult fit;
    fit.kind = kind;
    fit.data_checksum = checksum_observations(panel.observations);
    fit.residuals.assign(y.size(), 0.0);

    if (kind == ModelKind::country_linear) {
        for (const auto& cs : countries) {
            std::vector<double> t(cs.years.size());
            for (std::size_t i = 0; i < t.size(); ++i) t[i] = cs.years[i] - min_year;
            const FitResult local = fit_alt_model(ModelKind::linear, t, cs.scores);
            fit.parameters.emplace_back("a." + cs.country, local.param("a"));
            fit.parameters.emplace_back("b." + cs.country, local.param("b"));
            for (std::size_t i = 0; i < cs.observation_index.size(); ++i)
                fit.residuals[cs.observation_index[i]] = local.residuals[i];
        }
        fit.n_params = static_cast<int>(2 * countries.size());
        finalize_fit(fit, y);
        return fit;
    }

    if (kind == ModelKind::exponential) {
        // Shared decay rate; per-country intercepts are profiled in closed
        // form given the rate.
        const auto intercepts_for = [&](double rate) {
            std::vector<double> a(countries.size());
            for (std::size_t c = 0; c < countries.size(); ++c) {
                double num = 0.0, den = 0.0;
                for (std::size_t i = 0; i < countries[c].years.size(); ++i) {
                    const double e =
                        std::exp(-rate * (countries[c].years[i] - min_year));
                    num += countries[c].scores[i] * e;
                    den += e * e;
                }
                a[c] = num / den;
            }
            return a;
        };
        const auto rss_for = [&](double rate) {
            const auto a = intercepts_for(rate);
            double rss = 0.0;
            for (std::size_t c = 0; c < countries.size(); ++c)
                for (std::size_t i = 0; i < countries[c].years.size(); ++i) {
                    const double pred =
                        a[c] * std::exp(-rate * (countries[c].years[i] - min_year));
                    const double r = countries[c].scores[i] - pred;
                    rss += r * r;
                }
            return rss;
        };
        optim::Problem problem;
        problem.lo = {1e-8};
        problem.hi = {0.5};
        problem.log_scale = {true};
        problem.objective = [&](std::span<const double> p) { return rss_for(p[0]); };
        const optim::Result best = optim::multistart_minimize(problem, 12);
        const double rate = best.x[0];
        const auto a = intercepts_for(rate);
        fit.parameters.emplace_back("r", rate);
        for (std::size_t c = 0; c < countries.size(); ++c) {
            fit.parameters.emplace_back("a." + countries[c].country, a[c]);
            for (std::size_t i = 0; i < countries[c].years.size(); ++i) {
                const double pred =
                    a[c] * std::exp(-rate * (countries[c].years[i] - min_year));
                fit.residuals[countries[c].observation_index[i]] =
                    countries[c].scores[i] - pred;
            }
        }
        fit.n_params = static_cast<int>(countries.size()) + 1;
        fit.converged = best.converged;
        finalize_fit(fit, y);
        return fit;
    }

    throw std::invalid_argument("fit_alt_model_panel: unsupported kind");
}

// ------------------------------------------------------------- comparison

InformationCriteria information_criteria(const std::vector<double>& residuals,
                                         int n_params) {
    const auto n = static_cast<double>(residuals.size());
    if (residuals.empty())
        throw std::invalid_argument("information_criteria: empty residuals");
    double rss = normalized_rss(residuals);
    rss = std::max(rss, 1e-300);
    InformationCriteria ic;
    ic.aic = n * std::log(rss / n) + 2.0 * n_params;
    ic.bic = n * std::log(rss / n) + n_params * std::log(n);
    return ic;
}

std::vector<ComparisonRow> compare_models(const std::vector<FitResult>& fits) {
    if (fits.empty()) throw std::invalid_argument("compare_models: no fits");
    for (const auto& fit : fits)
        if (fit.data_checksum != fits.front().data_checksum ||
            fit.n_obs != fits.front().n_obs)
            throw std::invalid_argument(
                "compare_models: fits cover different observation sets");

    double best_aic = fits.front().aic, best_bic = fits.front().bic;
    for (const auto& fit : fits) {
        best_aic = std::min(best_aic, fit.aic);
        best_bic = std::min(best_bic, fit.bic);
    }
    std::vector<ComparisonRow> rows;
    for (const auto& fit : fits) {
        ComparisonRow row;
        row.kind = fit.kind;
        row.n_params = fit.n_params;
        row.r_squared = fit.r_squared;
        row.rmse = fit.rmse;
        row.aic = fit.aic;
        row.bic = fit.bic;
        row.delta_aic = fit.aic - best_aic;
        row.delta_bic = fit.bic - best_bic;
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(),
              [](const ComparisonRow& a, const ComparisonRow& b) {
                  return a.aic < b.aic;
              });
    return rows;
}

// ---------------------------------------------------------------- recovery

std::vector<double> cumulative_exposure(const RecoveryScenario& scenario,
                                        const std::vector<double>& times) {
    // Midpoint rule over the scenario step, exact for piecewise-constant
    // drivers whose jumps sit on the dt grid.
    std::vector<double> out;
    out.reserve(times.size());
    double e = 0.0;
    double tau = scenario.times.front();
    for (double t : times) {
        while (tau < t - 1e-12) {
            const double step = std::min(scenario.dt, t - tau);
            e += scenario.driver(tau + 0.5 * step) * step;
            tau += step;
        }
        out.push_back(e);
    }
    return out;
}

std::vector<RecoveryTrajectory> recovery_comparison(
    const std::vector<FitResult>& fits, const RecoveryScenario& scenario) {
    if (scenario.times.empty() || scenario.times.size() != scenario.values.size())
        throw std::invalid_argument("recovery_comparison: malformed scenario");
    if (scenario.t_removal < scenario.times.front())
        throw std::invalid_argument("recovery_comparison: t_removal before the data");

    const double t0 = scenario.times.front();
    const double exposure_at_removal =
        cumulative_exposure(scenario, {scenario.t_removal}).front();

    std::vector<RecoveryTrajectory> out;
    for (const auto& fit : fits) {
        RecoveryTrajectory traj;
        traj.kind = fit.kind;

        if (fit.kind == ModelKind::ode) {
            const double alpha = fit.param("alpha");
            const double beta =
                fit.parameters.size() > 1 && fit.parameters[1].first == "beta_eff"
                    ? fit.param("beta_eff")
                    : fit.param("beta");
            const double h_max = fit.param("h_max");
            const double h0 = scenario.values.front() / h_max;
            // Fitted state at removal, then delegation forced to zero.
            const std::vector<double> at_removal = {scenario.t_removal};
            const double h_removal =
                integrate_capability(alpha, beta, scenario.epsilon, h0, t0, at_removal,
                                     scenario.driver, scenario.dt)
                    .front();
            traj.value_at_removal = h_removal * h_max;
            traj.baseline = scenario.values.front();
            double h = h_removal;
            for (double t = 0.0; t <= scenario.horizon + 1e-9; t += scenario.dt) {
                traj.times.push_back(scenario.t_removal + t);
                traj.values.push_back(h * h_max);
                const auto rhs = [&](double hh) {
                    return alpha * (hh + scenario.epsilon) * (1.0 - hh);
                };
                const double k1 = rhs(h);
                const double k2 = rhs(h + 0.5 * scenario.dt * k1);
                const double k3 = rhs(h + 0.5 * scenario.dt * k2);
                const double k4 = rhs(h + scenario.dt * k3);
                h = std::clamp(h + scenario.dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4),
                               0.0, 1.0);
            }
        } else {
            const auto value_of = [&](double exposure) {
                switch (fit.kind) {
                    case ModelKind::linear:
                        return fit.param("a") - fit.param("b") * exposure;
                    case ModelKind::exponential:
                        return fit.param("a") * std::exp(-fit.param("r") * exposure);
                    case ModelKind::logistic:
                        return fit.param("a") /
                               (1.0 + std::exp(fit.param("r") *
                                               (exposure - fit.param("x0"))));
                    default:
                        throw std::invalid_argument(
                            "recovery_comparison: unsupported model kind");
                }
            };
            traj.baseline = value_of(0.0);
            traj.value_at_removal = value_of(exposure_at_removal);
            for (double t = 0.0; t <= scenario.horizon + 1e-9; t += scenario.dt) {
                const double e_eff = std::max(0.0, exposure_at_removal - t);
                traj.times.push_back(scenario.t_removal + t);
                traj.values.push_back(value_of(e_eff));
            }
        }

        traj.gain = traj.values.back() - traj.value_at_removal;
        const double gap = traj.baseline - traj.value_at_removal;
        traj.gap_closed_fraction = gap > 1e-12 ? traj.gain / gap : 1.0;
        out.push_back(std::move(traj));
    }
    return out;
}

// ------------------------------------------------------- K operationalization

const char* benchmark_domain_name(BenchmarkDomain domain) {
    switch (domain) {
        case BenchmarkDomain::mmlu: return "MMLU";
        case BenchmarkDomain::human_eval: return "HumanEval";
        case BenchmarkDomain::usmle: return "USMLE";
        case BenchmarkDomain::bar: return "Bar";
    }
    return "?";
}

std::optional<BenchmarkDomain> parse_benchmark_domain(const std::string& name) {
    if (name == "MMLU") return BenchmarkDomain::mmlu;
    if (name == "HumanEval") return BenchmarkDomain::human_eval;
    if (name == "USMLE") return BenchmarkDomain::usmle;
    if (name == "Bar") return BenchmarkDomain::bar;
    return std::nullopt;
}

double k_ratio(const BenchmarkScore& score) {
    if (!(score.human_baseline > 0.0))
        throw std::invalid_argument("k_ratio: human baseline must be > 0");
    return std::min(score.ai_score / score.human_baseline, 1.0);
}

double round_display_2dp(double x) {
    return std::floor(x * 100.0 + 1e-9) / 100.0;
}

KbarResult kbar(const std::string& model, const std::vector<BenchmarkScore>& scores) {
    KbarResult result;
    result.model = model;
    for (const auto& s : scores) {
        if (s.model != model) continue;
        if (result.domain_k.count(s.domain))
            throw std::invalid_argument("kbar: duplicate domain for model " + model);
        result.domain_k[s.domain] = k_ratio(s);
    }
    if (result.domain_k.size() != 4)
        throw std::invalid_argument("kbar: model " + model +
                                    " must have exactly the four benchmark domains");
    double sum = 0.0;
    for (const auto& [domain, k] : result.domain_k) sum += k;
    const double mean_k = sum / 4.0;
    result.kbar = round_display_2dp(mean_k);
    result.above_threshold = mean_k >= 0.85 - 1e-12;
    return result;
}

} // namespace capdyn::estimation
