#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace atomflux::cli {

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : file_(std::fopen(path.c_str(), "w")), columns_(header.size()) {
    if (!file_) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
        std::fprintf(file_, "%s%s", i ? "," : "", header[i].c_str());
    }
    std::fputc('\n', file_);
}

CsvWriter::~CsvWriter() { std::fclose(file_); }

void CsvWriter::row(std::span<const double> values) {
    if (values.size() != columns_) throw std::logic_error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::fprintf(file_, "%s%.11e", i ? "," : "", values[i]);
    }
    std::fputc('\n', file_);
}

void CsvWriter::row(std::span<const double> values, const std::string& tail) {
    if (values.size() + 1 != columns_) throw std::logic_error("csv row width mismatch");
    for (double v : values) std::fprintf(file_, "%.11e,", v);
    std::fprintf(file_, "%s\n", tail.c_str());
}

void write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& x_label, std::span<const double> x,
                    const std::vector<PlotSeries>& series) {
    constexpr double width = 800, height = 500, margin = 60;
    static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                             "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
    if (x.empty()) return;
    const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    double xmin = *xmin_it, xmax = *xmax_it;
    double ymin = INFINITY, ymax = -INFINITY;
    for (const PlotSeries& s : series) {
        for (double y : s.y) {
            if (std::isfinite(y)) {
                ymin = std::min(ymin, y);
                ymax = std::max(ymax, y);
            }
        }
    }
    if (!(ymax > ymin)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    if (!(xmax > xmin)) xmax = xmin + 1.0;
    const auto px = [&](double v) { return margin + (v - xmin) / (xmax - xmin) * (width - 2 * margin); };
    const auto py = [&](double v) { return height - margin - (v - ymin) / (ymax - ymin) * (height - 2 * margin); };

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
        << "</text>\n"
        << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << width - 2 * margin
        << "\" height=\"" << height - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n"
        << "<text x=\"" << width / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">" << x_label
        << "</text>\n";
    char buf[64];
    for (int i = 0; i <= 4; ++i) {
        const double xv = xmin + (xmax - xmin) * i / 4.0;
        const double yv = ymin + (ymax - ymin) * i / 4.0;
        std::snprintf(buf, sizeof buf, "%.3g", xv);
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - margin + 16 << "\" text-anchor=\"middle\">" << buf
            << "</text>\n";
        std::snprintf(buf, sizeof buf, "%.3g", yv);
        out << "<text x=\"" << margin - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << buf
            << "</text>\n";
    }
    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = colors[s % std::size(colors)];
        out << "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" << color << "\" points=\"";
        const std::size_t n = std::min(x.size(), series[s].y.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(series[s].y[i])) continue;
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(series[s].y[i]));
            out << buf;
        }
        out << "\"/>\n";
        if (series.size() <= 12) {
            out << "<text x=\"" << width - margin + 4 << "\" y=\"" << margin + 14 * (s + 1) << "\" fill=\"" << color
                << "\" font-size=\"10\">" << series[s].label << "</text>\n";
        }
    }
    out << "</svg>\n";
}

}  // namespace atomflux::cli
