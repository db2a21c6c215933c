#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace srlab::cli {

struct CurveSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (backprops, psnr)
};

struct Baseline {
  std::string label;
  double psnr = 0.0;
};

/// Rows of a training log with a finite validation PSNR and positive backprops.
/// Throws FormatError on a malformed log and DataError when no row is usable.
CurveSeries read_training_log(const std::filesystem::path& path, const std::string& label);

/// "label=value", e.g. "bicubic=30.39".
Baseline parse_baseline(const std::string& text);

/// Plot window. x is log10(backprops). Each axis spans the data (baselines
/// included on y) plus 5% of the span on both sides.
struct CurveRange {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

CurveRange curve_range(const std::vector<CurveSeries>& series, const std::vector<Baseline>& baselines);

/// One polyline per series and one dashed rule per baseline.
std::string render_curve_svg(const std::vector<CurveSeries>& series, const std::vector<Baseline>& baselines,
                             const std::string& title);

}  // namespace srlab::cli
