#include "capdyn/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace capdyn::io {

namespace {

std::string format_number(double x) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.10g", x);
    return buffer;
}

bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\r\n") != std::string::npos;
}

std::string csv_quote(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string json_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    out += '"';
    return out;
}

[[noreturn]] void fail_row(const std::filesystem::path& path, int line,
                           const std::string& message) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                             message);
}

double parse_number(const std::filesystem::path& path, int line,
                    const std::string& field, const std::string& value) {
    try {
        std::size_t used = 0;
        const double x = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (...) {
        fail_row(path, line, field + ": '" + value + "' is not a number");
    }
}

int parse_year(const std::filesystem::path& path, int line,
               const std::string& value) {
    const double y = parse_number(path, line, "year", value);
    const int year = static_cast<int>(y);
    if (y != year || year < 1900 || year > 2100)
        fail_row(path, line, "year '" + value + "' out of range [1900, 2100]");
    return year;
}

void expect_header(const std::filesystem::path& path, const RawCsv& csv,
                   const std::vector<std::string>& expected) {
    if (csv.header != expected) {
        std::string want;
        for (const auto& c : expected) want += (want.empty() ? "" : ",") + c;
        throw std::runtime_error(path.string() + ": expected header '" + want + "'");
    }
}

} // namespace

Cell::Cell(double x) : text(format_number(x)), is_number(true) {}

void Table::add_row(std::vector<Cell> cells) {
    if (cells.size() != columns.size())
        throw std::invalid_argument("table '" + name + "': row width " +
                                    std::to_string(cells.size()) + " != " +
                                    std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(cells));
}

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::csv;
    if (name == "json") return OutputFormat::json;
    throw std::invalid_argument("format must be csv or json, got '" + name + "'");
}

const char* format_name(OutputFormat format) {
    return format == OutputFormat::csv ? "csv" : "json";
}

std::filesystem::path write_table(const Table& table,
                                  const std::filesystem::path& dir,
                                  OutputFormat format) {
    if (table.rows.empty())
        throw std::invalid_argument("table '" + table.name + "' is empty");
    std::filesystem::create_directories(dir);
    const auto path =
        dir / (table.name + (format == OutputFormat::csv ? ".csv" : ".json"));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());

    if (format == OutputFormat::csv) {
        for (std::size_t c = 0; c < table.columns.size(); ++c)
            out << (c ? "," : "") << csv_quote(table.columns[c]);
        out << "\r\n";
        for (const auto& row : table.rows) {
            for (std::size_t c = 0; c < row.size(); ++c)
                out << (c ? "," : "") << csv_quote(row[c].text);
            out << "\r\n";
        }
    } else {
        // One document per table, column-name keys onto value arrays.
        out << "{\n";
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            out << "  " << json_quote(table.columns[c]) << ": [";
            for (std::size_t r = 0; r < table.rows.size(); ++r) {
                const Cell& cell = table.rows[r][c];
                out << (r ? ", " : "")
                    << (cell.is_number ? cell.text : json_quote(cell.text));
            }
            out << "]" << (c + 1 < table.columns.size() ? "," : "") << "\n";
        }
        out << "}\n";
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
    return path;
}

RawCsv read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());

    RawCsv csv;
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::string field;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field += '"';
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    field += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                fields.push_back(std::move(field));
                field.clear();
            } else {
                field += c;
            }
        }
        if (quoted) fail_row(path, line_number, "unterminated quoted field");
        fields.push_back(std::move(field));

        if (csv.header.empty()) {
            csv.header = std::move(fields);
        } else {
            if (fields.size() != csv.header.size())
                fail_row(path, line_number,
                         "expected " + std::to_string(csv.header.size()) +
                             " fields, got " + std::to_string(fields.size()));
            csv.rows.push_back(std::move(fields));
            csv.line_numbers.push_back(line_number);
        }
    }
    if (csv.header.empty())
        throw std::runtime_error(path.string() + ": missing header row");
    return csv;
}

std::vector<estimation::Observation> ingest_pisa(const std::filesystem::path& path) {
    const RawCsv csv = read_csv(path);
    expect_header(path, csv, {"country", "year", "score"});
    std::vector<estimation::Observation> out;
    std::set<std::pair<std::string, int>> seen;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        const auto& row = csv.rows[i];
        const int line = csv.line_numbers[i];
        estimation::Observation obs;
        obs.country = row[0];
        obs.year = parse_year(path, line, row[1]);
        obs.score = parse_number(path, line, "score", row[2]);
        if (obs.country.empty()) fail_row(path, line, "empty country");
        if (!(obs.score >= 200.0 && obs.score <= 700.0))
            fail_row(path, line, "score " + row[2] + " out of range [200, 700]");
        if (!seen.insert({obs.country, obs.year}).second)
            fail_row(path, line, "duplicate (country, year) " + obs.country + "/" +
                                     std::to_string(obs.year));
        out.push_back(std::move(obs));
    }
    return out;
}

std::vector<estimation::AdoptionPoint> ingest_adoption(
    const std::filesystem::path& path) {
    const RawCsv csv = read_csv(path);
    expect_header(path, csv, {"country", "year", "fraction"});
    std::vector<estimation::AdoptionPoint> out;
    std::set<std::pair<std::string, int>> seen;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        const auto& row = csv.rows[i];
        const int line = csv.line_numbers[i];
        estimation::AdoptionPoint point;
        point.country = row[0];
        point.year = parse_year(path, line, row[1]);
        point.fraction = parse_number(path, line, "fraction", row[2]);
        if (point.country.empty()) fail_row(path, line, "empty country");
        if (!(point.fraction >= 0.0 && point.fraction <= 1.0))
            fail_row(path, line, "fraction " + row[2] + " out of range [0, 1]");
        if (!seen.insert({point.country, point.year}).second)
            fail_row(path, line, "duplicate (country, year) " + point.country + "/" +
                                     std::to_string(point.year));
        out.push_back(std::move(point));
    }
    return out;
}

std::vector<estimation::BenchmarkScore> ingest_benchmarks(
    const std::filesystem::path& path) {
    const RawCsv csv = read_csv(path);
    expect_header(path, csv,
                  {"model", "release_date", "domain", "ai_score", "human_baseline"});
    std::vector<estimation::BenchmarkScore> out;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        const auto& row = csv.rows[i];
        const int line = csv.line_numbers[i];
        estimation::BenchmarkScore score;
        score.model = row[0];
        score.release_date = row[1];
        const auto domain = estimation::parse_benchmark_domain(row[2]);
        if (!domain)
            fail_row(path, line,
                     "unknown domain '" + row[2] +
                         "' (expected MMLU, HumanEval, USMLE or Bar)");
        score.domain = *domain;
        score.ai_score = parse_number(path, line, "ai_score", row[3]);
        score.human_baseline = parse_number(path, line, "human_baseline", row[4]);
        if (!(score.ai_score > 0.0 && score.ai_score <= 1.2))
            fail_row(path, line, "ai_score " + row[3] + " out of range (0, 1.2]");
        if (!(score.human_baseline > 0.0 && score.human_baseline <= 1.2))
            fail_row(path, line, "human_baseline " + row[4] + " out of range (0, 1.2]");
        out.push_back(std::move(score));
    }
    return out;
}

std::vector<estimation::DeskillObservation> ingest_deskill(
    const std::filesystem::path& path) {
    const RawCsv csv = read_csv(path);
    expect_header(path, csv, {"domain", "decline", "duration", "time_unit"});
    std::vector<estimation::DeskillObservation> out;
    for (std::size_t i = 0; i < csv.rows.size(); ++i) {
        const auto& row = csv.rows[i];
        const int line = csv.line_numbers[i];
        estimation::DeskillObservation obs;
        obs.domain = row[0];
        obs.decline = parse_number(path, line, "decline", row[1]);
        obs.duration = parse_number(path, line, "duration", row[2]);
        obs.time_unit = row[3];
        try {
            obs.validate();
        } catch (const std::exception& e) {
            fail_row(path, line, e.what());
        }
        out.push_back(std::move(obs));
    }
    return out;
}

estimation::PanelDataset load_panel(const std::filesystem::path& pisa_csv,
                                    const std::filesystem::path& adoption_csv) {
    estimation::PanelDataset panel;
    for (auto& obs : ingest_pisa(pisa_csv))
        if (obs.country != "OECD") panel.observations.push_back(std::move(obs));
    for (auto& point : ingest_adoption(adoption_csv))
        if (point.country != "OECD") panel.drivers.push_back(std::move(point));
    panel.validate();
    return panel;
}

estimation::SingleSeries load_oecd_series(const std::filesystem::path& pisa_csv) {
    estimation::SingleSeries series;
    std::vector<std::pair<int, double>> rows;
    for (const auto& obs : ingest_pisa(pisa_csv))
        if (obs.country == "OECD") rows.emplace_back(obs.year, obs.score);
    std::sort(rows.begin(), rows.end());
    for (const auto& [year, score] : rows) {
        series.years.push_back(year);
        series.scores.push_back(score);
    }
    if (series.years.empty())
        throw std::runtime_error(pisa_csv.string() + ": no OECD rows");
    return series;
}

} // namespace capdyn::io
