#include "curve.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "srlab/train.hpp"

namespace srlab::cli {
namespace {

constexpr int kWidth = 800;
constexpr int kHeight = 500;
constexpr int kLeft = 70;
constexpr int kRight = 180;
constexpr int kTop = 40;
constexpr int kBottom = 60;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string xml_escape(const std::string& s) {
  std::string out;
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

std::string num(double v, int precision = 2) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

double parse_field(const std::string& field, const std::string& where) {
  if (field == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw FormatError(where + ": bad number '" + field + "'");
  }
}

void pad(double& lo, double& hi, double empty_pad) {
  const double span = hi - lo;
  if (span > 0.0) {
    lo -= 0.05 * span;
    hi += 0.05 * span;
  } else {
    lo -= empty_pad;
    hi += empty_pad;
  }
}

// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double p = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0}) {
    if (m * p >= raw) return m * p;
  }
  return 10.0 * p;
}

}  // namespace

CurveSeries read_training_log(const std::filesystem::path& path, const std::string& label) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open log '" + path.string() + "'");
  CurveSeries s{label, {}};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != kLogHeader) throw FormatError(path.string() + ": unexpected header '" + line + "'");
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (fields.size() != 5) throw FormatError(where + ": expected 5 fields");
    const double backprops = parse_field(fields[0], where);
    const double psnr = parse_field(fields[3], where);
    if (backprops > 0.0 && std::isfinite(psnr)) s.points.emplace_back(backprops, psnr);
  }
  if (lineno == 0) throw DataError(path.string() + ": empty log");
  if (s.points.empty()) throw DataError(path.string() + ": no rows with a validation PSNR");
  return s;
}

Baseline parse_baseline(const std::string& text) {
  const auto eq = text.rfind('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("baseline must be label=value, got '" + text + "'");
  Baseline b{text.substr(0, eq), 0.0};
  try {
    std::size_t used = 0;
    const std::string v = text.substr(eq + 1);
    b.psnr = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(b.psnr)) throw std::invalid_argument(v);
  } catch (const std::exception&) {
    throw ConfigError("bad baseline value in '" + text + "'");
  }
  return b;
}

CurveRange curve_range(const std::vector<CurveSeries>& series, const std::vector<Baseline>& baselines) {
  CurveRange r{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      r.x_min = std::min(r.x_min, std::log10(x));
      r.x_max = std::max(r.x_max, std::log10(x));
      r.y_min = std::min(r.y_min, y);
      r.y_max = std::max(r.y_max, y);
    }
  }
  if (!std::isfinite(r.x_min)) throw DataError("no data points to plot");
  for (const auto& b : baselines) {
    r.y_min = std::min(r.y_min, b.psnr);
    r.y_max = std::max(r.y_max, b.psnr);
  }
  pad(r.x_min, r.x_max, 0.5);
  pad(r.y_min, r.y_max, 0.5);
  return r;
}

std::string render_curve_svg(const std::vector<CurveSeries>& series, const std::vector<Baseline>& baselines,
                             const std::string& title) {
  const CurveRange r = curve_range(series, baselines);
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto sx = [&](double backprops) { return kLeft + (std::log10(backprops) - r.x_min) / (r.x_max - r.x_min) * pw; };
  auto sy = [&](double psnr) { return kTop + (r.y_max - psnr) / (r.y_max - r.y_min) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
    << "font-size=\"16\">" << xml_escape(title) << "</text>\n";
  o << "<g font-family=\"sans-serif\" font-size=\"12\">\n";

  // Decade ticks on x; fall back to the window ends when no decade is inside.
  std::vector<double> xticks;
  for (double e = std::ceil(r.x_min); e <= r.x_max; e += 1.0) xticks.push_back(e);
  if (xticks.empty()) xticks = {r.x_min, r.x_max};
  for (double e : xticks) {
    const double x = kLeft + (e - r.x_min) / (r.x_max - r.x_min) * pw;
    o << "<line class=\"grid\" x1=\"" << num(x) << "\" y1=\"" << kTop << "\" x2=\"" << num(x) << "\" y2=\""
      << kTop + ph << "\" stroke=\"#e0e0e0\"/>\n";
    std::ostringstream label;
    label.precision(3);
    label << std::pow(10.0, e);
    o << "<text x=\"" << num(x) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << label.str()
      << "</text>\n";
  }
  const double ystep = nice_step(r.y_max - r.y_min, 6);
  for (double v = std::ceil(r.y_min / ystep) * ystep; v <= r.y_max; v += ystep) {
    const double y = sy(v);
    o << "<line class=\"grid\" x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << num(y) << "\" stroke=\"#e0e0e0\"/>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << num(v, ystep < 0.1 ? 2 : 1)
      << "</text>\n";
  }
  o << "<rect class=\"frame\" x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 16
    << "\" text-anchor=\"middle\">Number of backprops (log scale)</text>\n";
  o << "<text transform=\"translate(18," << kTop + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">Average test PSNR (dB)</text>\n";

  int legend = 0;
  auto legend_entry = [&](const std::string& color, const std::string& label) {
    const double y = kTop + 10 + 20 * legend++;
    const double x = kLeft + pw + 12;
    o << "<line class=\"legend\" x1=\"" << x << "\" y1=\"" << y << "\" x2=\"" << x + 24 << "\" y2=\"" << y
      << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << x + 30 << "\" y=\"" << y + 4 << "\">" << xml_escape(label) << "</text>\n";
  };

  for (std::size_t i = 0; i < baselines.size(); ++i) {
    const double y = sy(baselines[i].psnr);
    o << "<line class=\"baseline\" x1=\"" << kLeft << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << num(y) << "\" stroke=\"#555555\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
    o << "<text x=\"" << kLeft + 4 << "\" y=\"" << num(y - 4) << "\" fill=\"#555555\">"
      << xml_escape(baselines[i].label) << " (" << num(baselines[i].psnr) << " dB)</text>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::string color = kPalette[i % std::size(kPalette)];
    auto pts = series[i].points;
    std::sort(pts.begin(), pts.end());
    o << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t k = 0; k < pts.size(); ++k) {
      o << (k ? " " : "") << num(sx(pts[k].first)) << ',' << num(sy(pts[k].second));
    }
    o << "\"/>\n";
    legend_entry(color, series[i].label);
  }
  o << "</g>\n</svg>\n";
  return o.str();
}

}  // namespace srlab::cli
