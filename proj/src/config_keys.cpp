#include "capdyn/config_keys.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace capdyn {

namespace {

struct NumericKey {
    const char* name;
    std::function<double*(abm::AbmConfig&)> field;
    double lo, hi;
    const char* range;
};

const std::vector<NumericKey>& numeric_keys() {
    static const std::vector<NumericKey> keys = {
        {"params.alpha", [](abm::AbmConfig& c) { return &c.params.alpha; }, 1e-12, 10.0, "(0, 10]"},
        {"params.beta", [](abm::AbmConfig& c) { return &c.params.beta; }, 1e-12, 10.0, "(0, 10]"},
        {"params.gamma", [](abm::AbmConfig& c) { return &c.params.gamma; }, 1e-12, 10.0, "(0, 10]"},
        {"params.delta", [](abm::AbmConfig& c) { return &c.params.delta; }, 0.0, 10.0, "[0, 10]"},
        {"params.epsilon", [](abm::AbmConfig& c) { return &c.params.epsilon; }, 0.0, 0.5, "[0, 0.5]"},
        {"params.k_ai", [](abm::AbmConfig& c) { return &c.params.k_ai; }, 0.0, 1.2, "[0, 1.2]"},
        {"params.scope", [](abm::AbmConfig& c) { return &c.params.scope; }, 1e-12, 1.0, "(0, 1]"},
        {"dt", [](abm::AbmConfig& c) { return &c.dt; }, 1e-9, 100.0, "(0, 100]"},
        {"sigma_h", [](abm::AbmConfig& c) { return &c.sigma_h; }, 0.0, 1.0, "[0, 1]"},
        {"sigma_d", [](abm::AbmConfig& c) { return &c.sigma_d; }, 0.0, 1.0, "[0, 1]"},
        {"p_crisis", [](abm::AbmConfig& c) { return &c.p_crisis; }, 0.0, 1.0, "[0, 1]"},
        {"practice_fraction", [](abm::AbmConfig& c) { return &c.practice_fraction; }, 0.0, 0.5, "[0, 0.5]"},
        {"turnover_rate", [](abm::AbmConfig& c) { return &c.turnover_rate; }, 0.0, 1.0, "[0, 1]"},
        {"h_entry", [](abm::AbmConfig& c) { return &c.h_entry; }, 0.0, 1.0, "[0, 1]"},
        {"init_h_mean", [](abm::AbmConfig& c) { return &c.init_h_mean; }, 0.0, 1.0, "[0, 1]"},
        {"init_h_sd", [](abm::AbmConfig& c) { return &c.init_h_sd; }, 0.0, 1.0, "[0, 1]"},
        {"init_d_mean", [](abm::AbmConfig& c) { return &c.init_d_mean; }, 0.0, 1.0, "[0, 1]"},
        {"init_d_sd", [](abm::AbmConfig& c) { return &c.init_d_sd; }, 0.0, 1.0, "[0, 1]"},
    };
    return keys;
}

[[noreturn]] void fail_unknown(const std::string& key) {
    std::ostringstream os;
    os << "unknown config key '" << key << "'; valid keys:";
    for (const auto& name : abm_key_names()) os << ' ' << name;
    throw std::invalid_argument(os.str());
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size() || !std::isfinite(x))
            throw std::invalid_argument("trailing characters");
        return x;
    } catch (...) {
        throw std::invalid_argument("config key '" + key + "': '" + value +
                                    "' is not a number");
    }
}

long parse_int(const std::string& key, const std::string& value) {
    long out = 0;
    const auto* begin = value.data();
    const auto* end = begin + value.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end)
        throw std::invalid_argument("config key '" + key + "': '" + value +
                                    "' is not an integer");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config key '" + key + "': '" + value +
                                "' is not a boolean (true/false)");
}

} // namespace

std::vector<std::string> abm_key_names() {
    std::vector<std::string> names;
    for (const auto& k : numeric_keys()) names.emplace_back(k.name);
    names.insert(names.end(),
                 {"n_agents", "t_steps", "seed", "entry_mode", "delegation_draw",
                  "crisis_reset", "scope_caps_delegation", "scope_in_delegation_draw",
                  "scope_in_social", "ai_free_pauses_adoption"});
    return names;
}

void apply_abm_axis(abm::AbmConfig& config, const std::string& key, double value) {
    for (const auto& k : numeric_keys()) {
        if (key == k.name) {
            if (value < k.lo || value > k.hi)
                throw std::invalid_argument("config key '" + key + "': " +
                                            std::to_string(value) +
                                            " out of range " + k.range);
            *k.field(config) = value;
            return;
        }
    }
    fail_unknown(key);
}

void apply_abm_key(abm::AbmConfig& config, const std::string& key,
                   const std::string& value) {
    for (const auto& k : numeric_keys()) {
        if (key == k.name) {
            apply_abm_axis(config, key, parse_double(key, value));
            return;
        }
    }
    if (key == "n_agents") {
        const long n = parse_int(key, value);
        if (n < 1 || n > 1000000)
            throw std::invalid_argument("config key 'n_agents': out of range [1, 1e6]");
        config.n_agents = static_cast<int>(n);
    } else if (key == "t_steps") {
        const long n = parse_int(key, value);
        if (n < 1 || n > 100000000)
            throw std::invalid_argument("config key 't_steps': out of range [1, 1e8]");
        config.t_steps = static_cast<int>(n);
    } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "entry_mode") {
        if (value == "population-mean") {
            config.entry_mode = abm::EntryMode::population_mean;
        } else if (value.rfind("fixed", 0) == 0) {
            // "fixed" or "fixed(0.5)"
            config.entry_mode = abm::EntryMode::fixed;
            const auto open = value.find('(');
            if (open != std::string::npos) {
                const auto close = value.find(')', open);
                if (close == std::string::npos)
                    throw std::invalid_argument(
                        "config key 'entry_mode': malformed fixed(h) value");
                const double h =
                    parse_double(key, value.substr(open + 1, close - open - 1));
                if (h < 0.0 || h > 1.0)
                    throw std::invalid_argument(
                        "config key 'entry_mode': fixed entry H out of range [0, 1]");
                config.h_entry = h;
            }
        } else {
            throw std::invalid_argument(
                "config key 'entry_mode': expected population-mean or fixed(h)");
        }
    } else if (key == "delegation_draw") {
        if (value == "bernoulli")
            config.delegation_draw = abm::DelegationDraw::bernoulli;
        else if (value == "expectation")
            config.delegation_draw = abm::DelegationDraw::expectation;
        else
            throw std::invalid_argument(
                "config key 'delegation_draw': expected bernoulli or expectation");
    } else if (key == "crisis_reset") {
        if (value == "transient")
            config.crisis_reset = abm::CrisisReset::transient;
        else if (value == "persistent")
            config.crisis_reset = abm::CrisisReset::persistent;
        else
            throw std::invalid_argument(
                "config key 'crisis_reset': expected transient or persistent");
    } else if (key == "scope_caps_delegation") {
        config.scope_caps_delegation = parse_bool(key, value);
    } else if (key == "scope_in_delegation_draw") {
        config.scope_in_delegation_draw = parse_bool(key, value);
    } else if (key == "scope_in_social") {
        config.scope_in_social = parse_bool(key, value);
    } else if (key == "ai_free_pauses_adoption") {
        config.ai_free_pauses_adoption = parse_bool(key, value);
    } else {
        fail_unknown(key);
    }
}

} // namespace capdyn
