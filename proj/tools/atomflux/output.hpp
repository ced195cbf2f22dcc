#pragma once

#include <cstdio>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace atomflux::cli {

/// Comma-separated table with a header row of "name [unit]" cells; numbers in %.11e.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(std::span<const double> values);
    void row(std::initializer_list<double> values) { row(std::span<const double>(values.begin(), values.size())); }
    /// Row whose trailing cell is text.
    void row(std::span<const double> values, const std::string& tail);

private:
    std::FILE* file_;
    std::size_t columns_;
};

struct PlotSeries {
    std::string label;
    std::vector<double> y;
};

/// Minimal SVG line plot of several series against a shared x.
void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, std::span<const double> x,
                    const std::vector<PlotSeries>& series);

}  // namespace atomflux::cli
