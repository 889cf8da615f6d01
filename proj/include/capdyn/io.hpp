#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "capdyn/estimation.hpp"

namespace capdyn::io {

/// One table cell: text or a numeric value.  Numbers are formatted once
/// (10 significant digits) so CSV and JSON emit identical values.
struct Cell {
    Cell(const char* s) : text(s), is_number(false) {}
    Cell(std::string s) : text(std::move(s)), is_number(false) {}
    Cell(double x);
    Cell(int x) : Cell(static_cast<double>(x)) {}
    Cell(std::size_t x) : Cell(static_cast<double>(x)) {}
    Cell(bool b) : text(b ? "true" : "false"), is_number(false) {}

    std::string text;
    bool is_number;
};

/// Plot-ready result table: named columns over uniform rows.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    Table(std::string table_name, std::vector<std::string> column_names)
        : name(std::move(table_name)), columns(std::move(column_names)) {}

    void add_row(std::vector<Cell> cells);
};

enum class OutputFormat { csv, json };

OutputFormat parse_format(const std::string& name);
const char* format_name(OutputFormat format);

/// Write a table as <dir>/<name>.csv (RFC 4180: CRLF line ends, quoting only
/// where needed) or <dir>/<name>.json (one document, column-name keys).
/// Returns the file path.
std::filesystem::path write_table(const Table& table,
                                  const std::filesystem::path& dir,
                                  OutputFormat format);

// ---------------------------------------------------------------- ingestion

/// Parsed CSV with 1-based line numbers per data row, for diagnostics.
struct RawCsv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> line_numbers;
};

RawCsv read_csv(const std::filesystem::path& path);

/// Typed ingestion; every row is validated and any invalid row aborts with a
/// diagnostic naming the file and line.
std::vector<estimation::Observation> ingest_pisa(const std::filesystem::path& path);
std::vector<estimation::AdoptionPoint> ingest_adoption(const std::filesystem::path& path);
std::vector<estimation::BenchmarkScore> ingest_benchmarks(const std::filesystem::path& path);
std::vector<estimation::DeskillObservation> ingest_deskill(const std::filesystem::path& path);

/// Assemble the panel (excluding the OECD aggregate series) from the bundled
/// score and adoption files.
estimation::PanelDataset load_panel(const std::filesystem::path& pisa_csv,
                                    const std::filesystem::path& adoption_csv);

/// The OECD-average series from the bundled score file.
estimation::SingleSeries load_oecd_series(const std::filesystem::path& pisa_csv);

} // namespace capdyn::io
