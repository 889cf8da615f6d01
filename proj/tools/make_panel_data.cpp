// Regenerates data/pisa.csv.
//
// The panel scores are a synthetic reconstruction: official country-level
// assessment tables are not redistributable here, so each country's
// trajectory is produced by the toolkit's own capability equation driven by
// the bundled adoption series, anchored at the country's first-cycle score,
// plus seeded Gaussian noise.  The OECD-average row set is kept at the

// published headline values instead of being synthesized.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "capdyn/rng.hpp"

namespace {

struct Country {
    const char* name;
    double first_score; // first observed cycle
    int first_year;
    std::vector<std::pair<int, double>> adoption;
};

double interp(const std::vector<std::pair<int, double>>& pts, double year) {
    if (year <= pts.front().first) return pts.front().second;
    if (year >= pts.back().first) return pts.back().second;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        if (year <= pts[i + 1].first) {
            const double t0 = pts[i].first, t1 = pts[i + 1].first;
            return pts[i].second +
                   (pts[i + 1].second - pts[i].second) * (year - t0) / (t1 - t0);
        }
    return pts.back().second;
}

} // namespace

int main() {
    constexpr double kAlpha = 0.013;
    constexpr double kBeta = 0.0055;
    constexpr double kEpsilon = 0.01;
    constexpr double kHMax = 787.0;
    constexpr double kNoiseSd = 5.0;
    constexpr double kDt = 0.05;

    const std::vector<Country> countries = {
        {"Finland", 544, 2003, {{2003, 0.69}, {2006, 0.80}, {2009, 0.82}, {2012, 0.90}, {2015, 0.93}, {2018, 0.94}, {2022, 0.96}}},
        {"Sweden", 509, 2003, {{2003, 0.79}, {2006, 0.88}, {2009, 0.91}, {2012, 0.94}, {2015, 0.93}, {2018, 0.95}, {2022, 0.97}}},
        {"Denmark", 514, 2003, {{2003, 0.76}, {2006, 0.87}, {2009, 0.89}, {2012, 0.93}, {2015, 0.96}, {2018, 0.97}, {2022, 0.98}}},
        {"Netherlands", 538, 2003, {{2003, 0.64}, {2006, 0.81}, {2009, 0.90}, {2012, 0.93}, {2015, 0.93}, {2018, 0.95}, {2022, 0.97}}},
        {"Norway", 495, 2003, {{2003, 0.78}, {2006, 0.82}, {2009, 0.92}, {2012, 0.95}, {2015, 0.97}, {2018, 0.98}, {2022, 0.99}}},
        {"United-States", 483, 2003, {{2003, 0.62}, {2006, 0.69}, {2009, 0.71}, {2012, 0.75}, {2015, 0.79}, {2018, 0.87}, {2022, 0.92}}},
        {"United-Kingdom", 495, 2006, {{2003, 0.65}, {2006, 0.69}, {2009, 0.83}, {2012, 0.87}, {2015, 0.92}, {2018, 0.95}, {2022, 0.97}}},
        {"Germany", 503, 2003, {{2003, 0.56}, {2006, 0.72}, {2009, 0.79}, {2012, 0.83}, {2015, 0.88}, {2018, 0.90}, {2022, 0.93}}},
        {"France", 511, 2003, {{2003, 0.36}, {2006, 0.47}, {2009, 0.72}, {2012, 0.81}, {2015, 0.85}, {2018, 0.89}, {2022, 0.93}}},
        {"Japan", 534, 2003, {{2003, 0.48}, {2006, 0.69}, {2009, 0.78}, {2012, 0.86}, {2015, 0.91}, {2018, 0.93}, {2022, 0.94}}},
        {"Korea", 542, 2003, {{2003, 0.66}, {2006, 0.78}, {2009, 0.81}, {2012, 0.84}, {2015, 0.90}, {2018, 0.96}, {2022, 0.97}}},
        {"Italy", 466, 2003, {{2003, 0.29}, {2006, 0.38}, {2009, 0.49}, {2012, 0.56}, {2015, 0.66}, {2018, 0.74}, {2022, 0.85}}},
        {"Poland", 490, 2003, {{2003, 0.25}, {2006, 0.45}, {2009, 0.59}, {2012, 0.62}, {2015, 0.68}, {2018, 0.78}, {2022, 0.87}}},
        {"Turkey", 424, 2006, {{2003, 0.12}, {2006, 0.18}, {2009, 0.36}, {2012, 0.45}, {2015, 0.54}, {2018, 0.71}, {2022, 0.83}}},
        {"Indonesia", 371, 2006, {{2003, 0.02}, {2006, 0.05}, {2009, 0.07}, {2012, 0.15}, {2015, 0.22}, {2018, 0.40}, {2022, 0.66}}},
    };
    const int cycles[] = {2003, 2006, 2009, 2012, 2015, 2018, 2022};

    std::FILE* out = std::fopen("data/pisa.csv", "w");
    if (!out) {
        std::perror("data/pisa.csv");
        return 1;
    }
    std::fprintf(out, "country,year,score\n");

    // Published OECD-average headline values, kept verbatim.
    const std::pair<int, int> oecd[] = {{2003, 500}, {2006, 498}, {2009, 495},
                                        {2012, 494}, {2015, 490}, {2018, 489},
                                        {2022, 472}};
    for (const auto& [year, score] : oecd)
        std::fprintf(out, "OECD,%d,%d\n", year, score);

    capdyn::SplitMix64 noise(0xDA7A5EEDULL);
    for (const auto& c : countries) {
        double h = c.first_score / kHMax;
        double t = c.first_year;
        for (int year : cycles) {
            if (year < c.first_year) continue;
            while (t < year - 1e-9) {
                const auto rhs = [&](double hh, double tt) {
                    const double a = interp(c.adoption, tt);
                    return kAlpha * (hh + kEpsilon) * (1.0 - hh) * (1.0 - a) -
                           kBeta * hh * a;
                };
                const double k1 = rhs(h, t);
                const double k2 = rhs(h + 0.5 * kDt * k1, t + 0.5 * kDt);
                const double k3 = rhs(h + 0.5 * kDt * k2, t + 0.5 * kDt);
                const double k4 = rhs(h + kDt * k3, t + kDt);
                h = std::clamp(h + kDt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), 0.0, 1.0);
                t += kDt;
            }
            const double score = year == c.first_year
                                     ? c.first_score
                                     : kHMax * h + kNoiseSd * noise.next_gaussian();
            std::fprintf(out, "%s,%d,%.0f\n", c.name, year,
                         std::clamp(score, 200.0, 700.0));
        }
    }
    std::fclose(out);
    std::puts("wrote data/pisa.csv");
    return 0;
}
