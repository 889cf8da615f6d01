#include "capdyn/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "capdyn/config_keys.hpp"

namespace capdyn::io {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

long parse_integer(const std::string& key, const std::string& value) {
    long out = 0;
    const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
    if (res.ec != std::errc() || res.ptr != value.data() + value.size())
        throw std::invalid_argument("config key '" + key + "': '" + value +
                                    "' is not an integer");
    return out;
}

void apply_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "experiment") {
        config.experiment = value;
    } else if (key == "seed") {
        config.seed = static_cast<std::uint64_t>(parse_integer(key, value));
        config.abm.seed = config.seed;
    } else if (key == "threads") {
        const long n = parse_integer(key, value);
        if (n < 0 || n > 4096)
            throw std::invalid_argument("config key 'threads': out of range [0, 4096]");
        config.threads = static_cast<int>(n);
    } else if (key == "output_dir" || key == "out") {
        config.output_dir = value;
    } else if (key == "data_dir") {
        config.data_dir = value;
    } else if (key == "format") {
        config.format = parse_format(value);
    } else if (key == "replicates") {
        const long n = parse_integer(key, value);
        if (n < 0 || n > 100000)
            throw std::invalid_argument(
                "config key 'replicates': out of range [0, 100000]");
        config.replicates = static_cast<int>(n);
    } else {
        // Everything else is a dotted ABM/model key.
        apply_abm_key(config.abm, key, value);
        config.abm_overrides.emplace_back(key, value);
    }
}

} // namespace

RunConfig parse_config(const std::optional<std::filesystem::path>& config_file,
                       const std::vector<std::pair<std::string, std::string>>& flags) {
    RunConfig config;

    if (config_file) {
        std::ifstream in(*config_file);
        if (!in)
            throw std::invalid_argument("config file not found: " +
                                        config_file->string());
        std::string line;
        int line_number = 0;
        while (std::getline(in, line)) {
            ++line_number;
            const auto comment = line.find('#');
            if (comment != std::string::npos) line = line.substr(0, comment);
            line = trim(line);
            if (line.empty()) continue;
            const auto equals = line.find('=');
            if (equals == std::string::npos)
                throw std::invalid_argument(config_file->string() + ":" +
                                            std::to_string(line_number) +
                                            ": expected key = value");
            apply_key(config, trim(line.substr(0, equals)),
                      trim(line.substr(equals + 1)));
        }
    }

    for (const auto& [key, value] : flags) apply_key(config, key, value);
    config.abm.validate();
    return config;
}

std::string serialize_config(const RunConfig& config) {
    std::ostringstream out;
    out << "experiment = " << config.experiment << "\n";
    out << "seed = " << config.seed << "\n";
    out << "threads = " << config.threads << "\n";
    out << "output_dir = " << config.output_dir.string() << "\n";
    out << "data_dir = " << config.data_dir.string() << "\n";
    out << "format = " << format_name(config.format) << "\n";
    out << "replicates = " << config.replicates << "\n";
    for (const auto& [key, value] : config.abm_overrides)
        out << key << " = " << value << "\n";
    return out.str();
}

} // namespace capdyn::io
