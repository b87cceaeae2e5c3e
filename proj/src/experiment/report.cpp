#include "synmix/experiment/report.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "synmix/error.h"

namespace synmix::experiment {

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_cell(const Cell& c)
{
    return std::visit(
        [](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, double>) {
                return format_double(x);
            } else if constexpr (std::is_same_v<T, std::int64_t>) {
                return std::to_string(x);
            } else {
                // Quote only when needed.
                if (x.find_first_of(",\"\n") == std::string::npos) {
                    return x;
                }
                std::string q = "\"";
                for (char ch : x) {
                    q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
                }
                return q + "\"";
            }
        },
        c);
}

Table::Table(std::string n, std::vector<std::string> cols) : name(std::move(n)), columns(std::move(cols)) {}

void Table::add_row(std::vector<Cell> row)
{
    require(row.size() == columns.size(), "Table " + name + ": row width does not match the header");
    rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& column) const
{
    const auto it = std::find(columns.begin(), columns.end(), column);
    require(it != columns.end(), "Table " + name + ": no column '" + column + "'");
    return static_cast<std::size_t>(it - columns.begin());
}

std::string Table::to_csv() const
{
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        out += (i ? "," : "") + columns[i];
    }
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) {
                out += ',';
            }
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

namespace {

double as_double(const Cell& c)
{
    if (const auto* d = std::get_if<double>(&c)) {
        return *d;
    }
    if (const auto* i = std::get_if<std::int64_t>(&c)) {
        return static_cast<double>(*i);
    }
    throw InvalidArgument("plot series column holds text");
}

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"};

std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

// Roughly five round-valued ticks covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi)
{
    const double span = hi - lo;
    if (!(span > 0.0)) {
        return {lo};
    }
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = (norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0) * mag;
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
        ticks.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return ticks;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace

SeriesData extract_series(const Series& s, const TableSet& tables)
{
    const auto t = std::find_if(tables.begin(), tables.end(), [&](const Table& tb) { return tb.name == s.table; });
    require(t != tables.end(), "plot series '" + s.label + "' refers to missing table '" + s.table + "'");
    const auto xi = t->column_index(s.x_column);
    const auto yi = t->column_index(s.y_column);
    std::vector<std::pair<std::size_t, Cell>> filters;
    for (const auto& [col, val] : s.where) {
        filters.emplace_back(t->column_index(col), val);
    }
    SeriesData out;
    for (const auto& row : t->rows) {
        const bool keep = std::all_of(filters.begin(), filters.end(),
                                      [&](const auto& f) { return row[f.first] == f.second; });
        if (keep) {
            out.x.push_back(as_double(row[xi]));
            out.y.push_back(as_double(row[yi]));
        }
    }
    return out;
}

std::string render_svg(const Plot& plot, const TableSet& tables)
{
    constexpr double pw = 420.0, ph = 300.0;
    constexpr double ml = 62.0, mr = 16.0, mt = 30.0, mb = 46.0;
    const int cols = std::max(1, std::min<int>(plot.columns, static_cast<int>(plot.panels.size())));
    const int rows = static_cast<int>((plot.panels.size() + static_cast<std::size_t>(cols) - 1) / cols);
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * pw << "\" height=\"" << rows * ph
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t p = 0; p < plot.panels.size(); ++p) {
        const Panel& panel = plot.panels[p];
        const double ox = static_cast<double>(p % static_cast<std::size_t>(cols)) * pw;
        const double oy = static_cast<double>(p / static_cast<std::size_t>(cols)) * ph;
        const double x0 = ox + ml, x1 = ox + pw - mr, y0 = oy + mt, y1 = oy + ph - mb;

        std::vector<SeriesData> data;
        double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
        const auto tx = [&](double v) { return panel.log_x ? std::log10(v) : v; };
        const auto ty = [&](double v) { return panel.log_y ? std::log10(v) : v; };
        for (const auto& s : panel.series) {
            data.push_back(extract_series(s, tables));
            for (std::size_t i = 0; i < data.back().x.size(); ++i) {
                const double xv = tx(data.back().x[i]);
                const double yv = ty(data.back().y[i]);
                if (std::isfinite(xv) && std::isfinite(yv)) {
                    xmin = std::min(xmin, xv);
                    xmax = std::max(xmax, xv);
                    ymin = std::min(ymin, yv);
                    ymax = std::max(ymax, yv);
                }
            }
        }
        if (!std::isfinite(xmin)) {
            xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
        }
        if (!panel.log_y) {
            ymin = std::min(ymin, 0.0);
        }
        if (xmax <= xmin) {
            xmax = xmin + 1.0;
        }
        if (ymax <= ymin) {
            ymax = ymin + 1.0;
        }
        ymax += 0.05 * (ymax - ymin);
        const auto px = [&](double v) { return x0 + (tx(v) - xmin) / (xmax - xmin) * (x1 - x0); };
        const auto py = [&](double v) { return y1 - (ty(v) - ymin) / (ymax - ymin) * (y1 - y0); };

        svg << "<g>\n<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << oy + 18
            << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(panel.title) << "</text>\n";
        svg << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << x1 - x0 << "\" height=\"" << y1 - y0
            << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double t : nice_ticks(xmin, xmax)) {
            const double X = x0 + (t - xmin) / (xmax - xmin) * (x1 - x0);
            svg << "<line x1=\"" << X << "\" y1=\"" << y1 << "\" x2=\"" << X << "\" y2=\"" << y1 + 4
                << "\" stroke=\"black\"/><text x=\"" << X << "\" y=\"" << y1 + 16 << "\" text-anchor=\"middle\">"
                << tick_label(panel.log_x ? std::pow(10.0, t) : t) << "</text>\n";
        }
        for (double t : nice_ticks(ymin, ymax)) {
            const double Y = y1 - (t - ymin) / (ymax - ymin) * (y1 - y0);
            svg << "<line x1=\"" << x0 - 4 << "\" y1=\"" << Y << "\" x2=\"" << x0 << "\" y2=\"" << Y
                << "\" stroke=\"black\"/><text x=\"" << x0 - 6 << "\" y=\"" << Y + 4 << "\" text-anchor=\"end\">"
                << tick_label(panel.log_y ? std::pow(10.0, t) : t) << "</text>\n";
        }
        svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << y1 + 34 << "\" text-anchor=\"middle\">"
            << escape(panel.x_label) << "</text>\n";
        svg << "<text transform=\"translate(" << ox + 14 << "," << (y0 + y1) / 2
            << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";
        for (double v : panel.vlines) {
            if (tx(v) >= xmin && tx(v) <= xmax) {
                svg << "<line x1=\"" << px(v) << "\" y1=\"" << y0 << "\" x2=\"" << px(v) << "\" y2=\"" << y1
                    << "\" stroke=\"gray\" stroke-dasharray=\"4,3\"/>\n";
            }
        }
        for (std::size_t s = 0; s < data.size(); ++s) {
            const char* colour = kPalette[s % std::size(kPalette)];
            svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.6\""
                << (panel.series[s].dashed ? " stroke-dasharray=\"6,3\"" : "") << " points=\"";
            for (std::size_t i = 0; i < data[s].x.size(); ++i) {
                const double X = px(data[s].x[i]);
                const double Y = py(data[s].y[i]);
                if (std::isfinite(X) && std::isfinite(Y)) {
                    char buf[48];
                    std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X, Y);
                    svg << buf;
                }
            }
            svg << "\"/>\n";
            const double ly = y0 + 14.0 + 14.0 * static_cast<double>(s);
            svg << "<line x1=\"" << x1 - 120 << "\" y1=\"" << ly - 4 << "\" x2=\"" << x1 - 102 << "\" y2=\"" << ly - 4
                << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/><text x=\"" << x1 - 98 << "\" y=\"" << ly
                << "\">" << escape(panel.series[s].label) << "</text>\n";
        }
        svg << "</g>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents)
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + path.string());
    }
    f << contents;
    if (!f) {
        throw Error("write failed for " + path.string());
    }
}

}  // namespace synmix::experiment
