#pragma once

#include <filesystem>
#include <string>
#include <type_traits>
#include <vector>

namespace caloric::report {

/// 17 significant digits, "." decimal; nan and inf spelled out.
std::string format_double(double value);

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header);

    template <typename... Cells>
    void add_row(const Cells&... cells) {
        static_assert(sizeof...(Cells) > 0);
        std::vector<std::string> row;
        row.reserve(sizeof...(Cells));
        (row.push_back(cell(cells)), ...);
        push(std::move(row));
    }

    const std::vector<std::string>& header() const noexcept { return header_; }
    std::size_t size() const noexcept { return rows_.size(); }
    std::string str() const;
    void write(const std::filesystem::path& path) const;

  private:
    template <typename T>
    static std::string cell(const T& value) {
        if constexpr (std::is_same_v<T, bool>) {
            return value ? "true" : "false";
        } else if constexpr (std::is_floating_point_v<T>) {
            return format_double(static_cast<double>(value));
        } else if constexpr (std::is_integral_v<T>) {
            return std::to_string(value);
        } else {
            return quote(std::string(value));
        }
    }
    static std::string quote(const std::string& text);
    void push(std::vector<std::string> row);

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Self-contained SVG with log-scaled axes, one polyline per series. Non-positive points are dropped.
std::string loglog_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                       const std::vector<Series>& series);

void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace caloric::report
