#pragma once

// Result tables (CSV) and natively drawn SVG line plots. Plot series refer
// to table columns, so everything plotted is also in a CSV.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace synmix::experiment {

using Cell = std::variant<std::int64_t, double, std::string>;

/// 17 significant digits, so values survive a CSV round trip bit-exactly.
std::string format_double(double v);
std::string format_cell(const Cell& c);

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    Table(std::string name, std::vector<std::string> columns);

    void add_row(std::vector<Cell> row);
    [[nodiscard]] std::size_t column_index(const std::string& column) const;
    [[nodiscard]] std::string to_csv() const;
};

/// Deque so references returned while adding tables stay valid.
using TableSet = std::deque<Table>;

struct Series {
    std::string label;
    std::string table;
    std::string x_column;
    std::string y_column;
    /// Rows are kept when every (column, value) pair matches.
    std::vector<std::pair<std::string, Cell>> where;
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<double> vlines;  // e.g. true parameter values
    bool log_x = false;
    bool log_y = false;
};

struct Plot {
    std::string name;
    std::vector<Panel> panels;
    int columns = 2;
};

struct SeriesData {
    std::vector<double> x;
    std::vector<double> y;
};

/// Throws when the series' table or columns do not exist.
SeriesData extract_series(const Series& s, const TableSet& tables);

std::string render_svg(const Plot& plot, const TableSet& tables);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace synmix::experiment
