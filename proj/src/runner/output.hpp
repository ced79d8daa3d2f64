#pragma once

// Text artifacts: CSV tables, JSON files and fixed-size SVG line charts.

#include <filesystem>
#include <string>
#include <vector>

namespace igchaos::runner {

/// Shortest representation that round-trips; "nan", "inf", "-inf" otherwise.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row);
    std::string str() const;
};

/// Writes atomically enough for our purposes: truncate, write, check the stream.
void write_text(const std::filesystem::path& path, const std::string& text);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// 800x600 line chart; non-finite points are skipped.
std::string svg_line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<PlotSeries>& series);

}  // namespace igchaos::runner
