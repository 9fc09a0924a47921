#include "decorr/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "decorr/errors.hpp"
#include "decorr/format.hpp"
#include "decorr/metrics.hpp"

namespace decorr {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

MetricSeries read_series(const RunArtifact& artifact, const std::string& metric) {
    std::ifstream in(artifact.aggregate_csv_path);
    if (!in)
        throw ComparisonError("cannot read aggregate CSV: " +
                              artifact.aggregate_csv_path);

    std::string header;
    if (!std::getline(in, header))
        throw ComparisonError("empty aggregate CSV: " +
                              artifact.aggregate_csv_path);
    const std::vector<std::string> cols = split_csv_line(header);

    int mean_col = -1;
    int std_col = -1;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (cols[i] == metric + "_mean") mean_col = static_cast<int>(i);
        if (cols[i] == metric + "_std") std_col = static_cast<int>(i);
    }
    if (mean_col < 0 || std_col < 0)
        throw ComparisonError("unknown metric '" + metric + "' (columns: " +
                              header + ")");

    MetricSeries series;
    series.run_name = artifact.name.empty() ? artifact.dir : artifact.name;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) <= std::max(mean_col, std_col))
            throw ComparisonError("short row in " + artifact.aggregate_csv_path);
        series.steps.push_back(std::stol(cells[0]));
        series.means.push_back(
            std::stod(cells[static_cast<std::size_t>(mean_col)]));
        series.stds.push_back(
            std::stod(cells[static_cast<std::size_t>(std_col)]));
    }
    if (series.steps.empty())
        throw ComparisonError("no checkpoint rows in " +
                              artifact.aggregate_csv_path);
    return series;
}

double population_variance(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    return var / n;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt_svg(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

}  // namespace

Comparison compare_runs(const std::vector<RunArtifact>& artifacts,
                        const std::string& metric) {
    if (artifacts.empty()) throw ComparisonError("no run artifacts given");

    bool known = false;
    for (const std::string& f : metrics_csv_fields())
        if (f == metric) known = true;
    if (!known || metric == "global_step")
        throw ComparisonError("unknown metric '" + metric + "'");

    Comparison c;
    c.metric = metric;
    c.env_id = artifacts.front().env_id;

    for (const RunArtifact& a : artifacts) {
        if (a.env_id != c.env_id)
            throw ComparisonError("environment mismatch: '" + a.env_id +
                                  "' vs '" + c.env_id + "'");
        c.series.push_back(read_series(a, metric));
    }

    const std::vector<long>& schedule = c.series.front().steps;
    for (const MetricSeries& s : c.series) {
        if (s.steps != schedule)
            throw ComparisonError("checkpoint schedule mismatch between '" +
                                  c.series.front().run_name + "' and '" +
                                  s.run_name + "'");
    }

    for (const MetricSeries& s : c.series) {
        ComparisonRow row;
        row.run_name = s.run_name;
        row.final_mean = s.means.back();
        row.final_std = s.stds.back();
        row.whole_run_variance = population_variance(s.means);
        row.difference_vs_first = row.final_mean - c.series.front().means.back();
        c.rows.push_back(row);
    }
    return c;
}

std::string format_comparison_table(const Comparison& c) {
    std::size_t name_w = 4;
    for (const ComparisonRow& r : c.rows)
        name_w = std::max(name_w, r.run_name.size());

    std::ostringstream out;
    out << "metric: " << c.metric << "  (env: " << c.env_id << ")\n";
    char line[256];
    std::snprintf(line, sizeof(line), "%-*s  %14s  %14s  %14s  %14s\n",
                  static_cast<int>(name_w), "run", "final_mean", "final_std",
                  "run_variance", "diff_vs_first");
    out << line;
    for (const ComparisonRow& r : c.rows) {
        std::snprintf(line, sizeof(line),
                      "%-*s  %14.6g  %14.6g  %14.6g  %14.6g\n",
                      static_cast<int>(name_w), r.run_name.c_str(),
                      r.final_mean, r.final_std, r.whole_run_variance,
                      r.difference_vs_first);
        out << line;
    }
    return out.str();
}

std::string comparison_svg(const Comparison& c) {
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
    constexpr int n_colors = 6;
    constexpr double width = 960.0;
    constexpr double height = 540.0;
    constexpr double ml = 80.0, mr = 24.0, mt = 40.0, mb = 56.0;
    const double plot_w = width - ml - mr;
    const double plot_h = height - mt - mb;

    double x_min = static_cast<double>(c.series.front().steps.front());
    double x_max = x_min;
    double y_min = 0.0, y_max = 0.0;
    bool first = true;
    for (const MetricSeries& s : c.series) {
        for (std::size_t i = 0; i < s.steps.size(); ++i) {
            const double x = static_cast<double>(s.steps[i]);
            const double lo = s.means[i] - s.stds[i];
            const double hi = s.means[i] + s.stds[i];
            if (first) {
                x_min = x_max = x;
                y_min = lo;
                y_max = hi;
                first = false;
            } else {
                x_min = std::min(x_min, x);
                x_max = std::max(x_max, x);
                y_min = std::min(y_min, lo);
                y_max = std::max(y_max, hi);
            }
        }
    }
    if (x_max - x_min < 1e-12) x_max = x_min + 1.0;
    if (y_max - y_min < 1e-12) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double y_pad = 0.05 * (y_max - y_min);
    y_min -= y_pad;
    y_max += y_pad;

    auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double y) {
        return mt + plot_h - (y - y_min) / (y_max - y_min) * plot_h;
    };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
        << height << "\">\n";
    svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
        << "\" fill=\"white\"/>\n";
    svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">"
        << xml_escape(c.metric) << " (" << xml_escape(c.env_id) << ")</text>\n";

    // std bands go under the curves
    for (std::size_t si = 0; si < c.series.size(); ++si) {
        const MetricSeries& s = c.series[si];
        const char* color = colors[si % n_colors];
        svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" "
            << "stroke=\"none\" points=\"";
        for (std::size_t i = 0; i < s.steps.size(); ++i)
            svg << fmt_svg(px(static_cast<double>(s.steps[i]))) << ","
                << fmt_svg(py(s.means[i] + s.stds[i])) << " ";
        for (std::size_t i = s.steps.size(); i-- > 0;)
            svg << fmt_svg(px(static_cast<double>(s.steps[i]))) << ","
                << fmt_svg(py(s.means[i] - s.stds[i])) << " ";
        svg << "\"/>\n";
    }

    // axes
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt + plot_h << "\" x2=\""
        << ml + plot_w << "\" y2=\"" << mt + plot_h
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
        << "\" y2=\"" << mt + plot_h
        << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
    constexpr int n_ticks = 5;
    for (int i = 0; i <= n_ticks; ++i) {
        const double fx = x_min + (x_max - x_min) * i / n_ticks;
        const double fy = y_min + (y_max - y_min) * i / n_ticks;
        svg << "<line x1=\"" << fmt_svg(px(fx)) << "\" y1=\"" << mt + plot_h
            << "\" x2=\"" << fmt_svg(px(fx)) << "\" y2=\"" << mt + plot_h + 5
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt_svg(px(fx)) << "\" y=\"" << mt + plot_h + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"11\">" << fmt_tick(fx) << "</text>\n";
        svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt_svg(py(fy))
            << "\" x2=\"" << ml << "\" y2=\"" << fmt_svg(py(fy))
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << ml - 8 << "\" y=\"" << fmt_svg(py(fy) + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
            << "font-size=\"11\">" << fmt_tick(fy) << "</text>\n";
    }
    svg << "<text x=\"" << ml + plot_w / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"13\">global_step</text>\n";

    // one polyline per run
    for (std::size_t si = 0; si < c.series.size(); ++si) {
        const MetricSeries& s = c.series[si];
        const char* color = colors[si % n_colors];
        svg << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < s.steps.size(); ++i)
            svg << fmt_svg(px(static_cast<double>(s.steps[i]))) << ","
                << fmt_svg(py(s.means[i])) << " ";
        svg << "\"/>\n";
    }

    // legend
    for (std::size_t si = 0; si < c.series.size(); ++si) {
        const double ly = mt + 16.0 + 18.0 * static_cast<double>(si);
        svg << "<line x1=\"" << ml + plot_w - 180 << "\" y1=\"" << ly
            << "\" x2=\"" << ml + plot_w - 150 << "\" y2=\"" << ly
            << "\" stroke=\"" << colors[si % n_colors]
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << ml + plot_w - 144 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"12\">"
            << xml_escape(c.series[si].run_name) << "</text>\n";
    }

    svg << "</svg>\n";
    return svg.str();
}

void write_comparison_svg(const Comparison& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ComparisonError("cannot write SVG: " + path);
    out << comparison_svg(c);
}

}  // namespace decorr
