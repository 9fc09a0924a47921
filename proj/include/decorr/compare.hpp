#pragma once

#include <string>
#include <vector>

#include "decorr/experiment.hpp"

namespace decorr {

// One run's aggregate curve for a single metric.
struct MetricSeries {
    std::string run_name;
    std::vector<long> steps;
    std::vector<double> means;  // mean across seeds per checkpoint
    std::vector<double> stds;   // std across seeds per checkpoint
};

struct ComparisonRow {
    std::string run_name;
    double final_mean = 0.0;
    double final_std = 0.0;
    double whole_run_variance = 0.0;   // population variance of the mean curve
    double difference_vs_first = 0.0;  // final_mean - first run's final_mean
};

struct Comparison {
    std::string metric;
    std::string env_id;
    std::vector<MetricSeries> series;
    std::vector<ComparisonRow> rows;
};

// Reads each artifact's aggregate CSV and builds the comparison for one
// metric (any MetricsRecord field name). All artifacts must share the
// environment and the exact checkpoint schedule; throws ComparisonError
// otherwise, or when the metric name is unknown.
Comparison compare_runs(const std::vector<RunArtifact>& artifacts,
                        const std::string& metric);

// Fixed-width text table, one row per run.
std::string format_comparison_table(const Comparison& c);

// Self-contained SVG: one mean polyline per run plus a shaded +/-1 std band,
// axes, ticks, and a legend. No external renderer dependencies.
std::string comparison_svg(const Comparison& c);
void write_comparison_svg(const Comparison& c, const std::string& path);

}  // namespace decorr
