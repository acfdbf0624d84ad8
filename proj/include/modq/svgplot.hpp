#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "modq/harness.hpp"

namespace modq {

// Scatter of (x, y) points with an identity reference line; used for the
// set-point sweep figure.
void write_scatter_identity_svg(const std::filesystem::path& path, std::span<const double> xs,
                                std::span<const double> ys, const std::string& x_label,
                                const std::string& y_label, const std::string& title);

struct BoxGroup {
    std::string label;
    std::string color = "#4878cf";
    std::vector<double> values;
};

// Median / IQR box, whiskers to the most extreme points within 1.5 IQR,
// outliers as dots.
void write_boxplot_svg(const std::filesystem::path& path, std::span<const BoxGroup> groups,
                       const std::string& y_label, const std::string& title);

// Mean stat trajectories with +-sd shading, a horizontal set-point reference
// line, and an optional vertical marker at the clamp step.
void write_timecourse_svg(const std::filesystem::path& path, const TimeCourse& tc,
                          double setpoint, std::optional<long> clamp_time,
                          const std::string& title);

}  // namespace modq
