#include "caloric/report.hpp"

#include "caloric/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace caloric::report {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    if (header_.empty()) throw Error("CSV table needs at least one column");
}

std::string CsvTable::quote(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

void CsvTable::push(std::vector<std::string> row) {
    if (row.size() != header_.size()) {
        throw Error("CSV row has " + std::to_string(row.size()) + " cells, header has " +
                    std::to_string(header_.size()));
    }
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& row : rows_) line(row);
    return out;
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw Error("failed writing " + path.string());
}

namespace {

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fixed(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.2f", v);
    return buffer;
}

}  // namespace

std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series) {
    constexpr double width = 640;
    constexpr double height = 440;
    constexpr double left = 70;
    constexpr double right = 20;
    constexpr double top = 40;
    constexpr double bottom = 50;
    double x_lo = std::numeric_limits<double>::infinity();
    double x_hi = -x_lo;
    double y_lo = x_lo;
    double y_hi = -x_lo;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x_lo = std::min(x_lo, std::log10(s.x[i]));
            x_hi = std::max(x_hi, std::log10(s.x[i]));
            y_lo = std::min(y_lo, std::log10(s.y[i]));
            y_hi = std::max(y_hi, std::log10(s.y[i]));
        }
    }
    if (!(x_lo <= x_hi)) {
        x_lo = 0;
        x_hi = 1;
        y_lo = 0;
        y_hi = 1;
    }
    x_lo = std::floor(x_lo);
    x_hi = std::max(std::ceil(x_hi), x_lo + 1);
    y_lo = std::floor(y_lo);
    y_hi = std::max(std::ceil(y_hi), y_lo + 1);
    auto px = [&](double lx) { return left + (lx - x_lo) / (x_hi - x_lo) * (width - left - right); };
    auto py = [&](double ly) { return height - bottom - (ly - y_lo) / (y_hi - y_lo) * (height - top - bottom); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
        << "</text>\n";
    for (double d = x_lo; d <= x_hi + 1e-9; d += 1.0) {
        svg << "<line x1=\"" << fixed(px(d)) << "\" y1=\"" << top << "\" x2=\"" << fixed(px(d)) << "\" y2=\""
            << height - bottom << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << fixed(px(d)) << "\" y=\"" << height - bottom + 16
            << "\" text-anchor=\"middle\">1e" << static_cast<int>(d) << "</text>\n";
    }
    for (double d = y_lo; d <= y_hi + 1e-9; d += 1.0) {
        svg << "<line x1=\"" << left << "\" y1=\"" << fixed(py(d)) << "\" x2=\"" << width - right << "\" y2=\""
            << fixed(py(d)) << "\" stroke=\"#ddd\"/>\n";
        svg << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(d) + 4) << "\" text-anchor=\"end\">1e"
            << static_cast<int>(d) << "</text>\n";
    }
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
        << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">"
        << escape(x_label) << "</text>\n";
    svg << "<text transform=\"translate(16," << (top + height - bottom) / 2
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(y_label) << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* colour = palette[k % std::size(palette)];
        svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            svg << fixed(px(std::log10(s.x[i]))) << ',' << fixed(py(std::log10(s.y[i]))) << ' ';
        }
        svg << "\"/>\n";
        svg << "<text x=\"" << width - right - 6 << "\" y=\"" << top + 16 + 16 * static_cast<double>(k)
            << "\" text-anchor=\"end\" fill=\"" << colour << "\">" << escape(s.label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace caloric::report
