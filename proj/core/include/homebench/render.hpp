#pragma once

#include <string>

#include "homebench/metrics.hpp"

namespace homebench::render {

// Fixed-layout text table: one column per task category plus the overall
// average, one row per metric, missing cells rendered as an em dash.
std::string render_table(const metrics::MetricsReport& report);

// Same grid, same rounded numbers, comma-separated.
std::string render_csv(const metrics::MetricsReport& report);

// Per-metric deltas, reading "from -> to (difference)".
std::string render_compare(const metrics::MetricsReport& from,
                           const metrics::MetricsReport& to);

}  // namespace homebench::render
