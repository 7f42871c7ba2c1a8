#include "proteus/sae_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

namespace proteus {

double ecdf_quantile(std::span<const double> sorted, double v) {
  if (sorted.empty()) throw Error("quantile: empty reference");
  const std::size_t m = sorted.size();
  if (v < sorted.front()) return 0.0;
  if (v > sorted.back()) return 1.0;
  if (m == 1) return 0.5;
  const auto lo = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
  const auto hi = static_cast<std::size_t>(std::upper_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
  const double span = static_cast<double>(m - 1);
  if (lo != hi) return 0.5 * static_cast<double>(lo + hi - 1) / span;
  const double a = sorted[lo - 1];
  const double b = sorted[lo];
  const double t = (v - a) / (b - a);
  return (static_cast<double>(lo - 1) + t) / span;
}

double reverse_extremes(double q) { return q < 0.25 ? 1.0 - q : q; }

QuantileMap QuantileMap::fit(const Matrix& x, std::vector<std::size_t> features) {
  if (x.rows() < 1) throw Error("quantile map: no reference rows");
  QuantileMap map;
  for (std::size_t f : features) {
    if (f >= static_cast<std::size_t>(x.cols())) throw Error("quantile map: feature out of range");
    std::vector<double> col(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) col[static_cast<std::size_t>(i)] = x(i, static_cast<Eigen::Index>(f));
    std::sort(col.begin(), col.end());
    map.sorted_.push_back(std::move(col));
  }
  map.features_ = std::move(features);
  return map;
}

std::vector<double> QuantileMap::transform(std::span<const double> x) const {
  std::vector<double> out(features_.size());
  for (std::size_t j = 0; j < features_.size(); ++j) {
    if (features_[j] >= x.size()) throw Error("quantile map: row too short");
    out[j] = ecdf_quantile(sorted_[j], x[features_[j]]);
  }
  return out;
}

SaeChart build_chart(const QuantileMap& map, const std::vector<std::string>& feature_names,
                     const std::vector<ChartSample>& samples) {
  const auto& features = map.features();
  if (features.empty()) throw Error("chart: the explanation has no feature");
  SaeChart chart;
  std::vector<std::size_t> axis_source;
  while (axis_source.size() < std::max<std::size_t>(3, features.size())) {
    axis_source.push_back(axis_source.size() % features.size());
  }
  chart.padded = features.size() < 3;
  for (std::size_t a : axis_source) {
    if (features[a] >= feature_names.size()) throw Error("chart: feature name missing");
    chart.axes.push_back(feature_names[features[a]]);
  }
  for (const auto& s : samples) {
    const std::vector<double> q = map.transform(s.row);
    ChartPolygon p;
    p.sample_id = s.id;
    p.detector_label = s.detector_label;
    p.surrogate_label = s.surrogate_label;
    for (std::size_t a : axis_source) p.values.push_back(reverse_extremes(q[a]));
    chart.polygons.push_back(std::move(p));
  }
  return chart;
}

namespace {

constexpr double kSize = 600.0;
constexpr double kCenter = 300.0;
constexpr double kRadius = 200.0;
constexpr const char* kPalette[] = {"#d62728", "#1f77b4", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string escape(const std::string& s) {
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

double angle_of(std::size_t j, std::size_t m) {
  return -std::numbers::pi / 2.0 + 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(m);
}

}  // namespace

std::string render_svg(const SaeChart& chart) {
  const std::size_t m = chart.axes.size();
  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kSize << "\" height=\"" << kSize
    << "\" viewBox=\"0 0 " << kSize << ' ' << kSize << "\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  // Normal band between the 0.25 and 0.75 rings.
  const double r_in = 0.25 * kRadius;
  const double r_out = 0.75 * kRadius;
  o << "<path fill=\"#b7e1b1\" fill-opacity=\"0.6\" fill-rule=\"evenodd\" d=\"M " << num(kCenter - r_out) << ' '
    << num(kCenter) << " A " << num(r_out) << ' ' << num(r_out) << " 0 1 0 " << num(kCenter + r_out) << ' '
    << num(kCenter) << " A " << num(r_out) << ' ' << num(r_out) << " 0 1 0 " << num(kCenter - r_out) << ' '
    << num(kCenter) << " Z M " << num(kCenter - r_in) << ' ' << num(kCenter) << " A " << num(r_in) << ' '
    << num(r_in) << " 0 1 0 " << num(kCenter + r_in) << ' ' << num(kCenter) << " A " << num(r_in) << ' '
    << num(r_in) << " 0 1 0 " << num(kCenter - r_in) << ' ' << num(kCenter) << " Z\"/>\n";

  for (double q : {0.25, 0.5, 0.75, 1.0}) {
    o << "<circle cx=\"" << num(kCenter) << "\" cy=\"" << num(kCenter) << "\" r=\"" << num(q * kRadius)
      << "\" fill=\"none\" stroke=\"#999999\" stroke-width=\"1\"/>\n";
    o << "<text x=\"" << num(kCenter + 3.0) << "\" y=\"" << num(kCenter - q * kRadius - 2.0)
      << "\" font-family=\"sans-serif\" font-size=\"9\" fill=\"#666666\">" << num(q) << "</text>\n";
  }

  for (std::size_t j = 0; j < m; ++j) {
    const double a = angle_of(j, m);
    const double x = kCenter + kRadius * std::cos(a);
    const double y = kCenter + kRadius * std::sin(a);
    o << "<line x1=\"" << num(kCenter) << "\" y1=\"" << num(kCenter) << "\" x2=\"" << num(x) << "\" y2=\"" << num(y)
      << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
    const double lx = kCenter + (kRadius + 18.0) * std::cos(a);
    const double ly = kCenter + (kRadius + 18.0) * std::sin(a) + 4.0;
    const char* anchor = std::abs(std::cos(a)) < 0.2 ? "middle" : (std::cos(a) > 0 ? "start" : "end");
    o << "<text x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" text-anchor=\"" << anchor
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(chart.axes[j]) << "</text>\n";
  }

  for (std::size_t p = 0; p < chart.polygons.size(); ++p) {
    const auto& poly = chart.polygons[p];
    const char* color = kPalette[p % std::size(kPalette)];
    o << "<polygon fill=\"" << color << "\" fill-opacity=\"0.08\" stroke=\"" << color
      << "\" stroke-width=\"2\" points=\"";
    for (std::size_t j = 0; j < m; ++j) {
      const double a = angle_of(j, m);
      const double r = std::clamp(poly.values[j], 0.0, 1.0) * kRadius;
      o << (j ? " " : "") << num(kCenter + r * std::cos(a)) << ',' << num(kCenter + r * std::sin(a));
    }
    o << "\"/>\n";
  }

  double y = 20.0;
  for (std::size_t p = 0; p < chart.polygons.size(); ++p) {
    const auto& poly = chart.polygons[p];
    const char* color = kPalette[p % std::size(kPalette)];
    o << "<rect x=\"10\" y=\"" << num(y - 9.0) << "\" width=\"12\" height=\"10\" fill=\"" << color << "\"/>\n";
    o << "<text x=\"28\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"11\">sample "
      << escape(poly.sample_id) << " (detector="
      << (poly.detector_label < 0 ? std::string("?") : std::to_string(poly.detector_label))
      << ", surrogate=" << poly.surrogate_label
      << ")</text>\n";
    y += 16.0;
  }
  if (chart.padded) {
    o << "<text x=\"10\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#aa0000\">"
      << "fewer than 3 features: axes repeated</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_svg(const SaeChart& chart, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << render_svg(chart);
  if (!out) throw Error("cannot write " + path);
}

}  // namespace proteus
