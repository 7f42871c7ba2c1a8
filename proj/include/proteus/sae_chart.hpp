#pragma once

#include <string>
#include <vector>

#include "proteus/common.hpp"

namespace proteus {

// ECDF of `sorted` at v: order statistic i sits at i/(m-1), linear in
// between, tied order statistics share their mean position, clamped to [0,1].
double ecdf_quantile(std::span<const double> sorted, double v);

// 1 - q below 0.25, q otherwise.
double reverse_extremes(double q);

/// Per-feature reference values for the quantile transform.
class QuantileMap {
 public:
  // `features` are column indices of x; the map keeps their sorted values.
  static QuantileMap fit(const Matrix& x, std::vector<std::size_t> features);

  // x is a full-width row; returns one quantile per mapped feature.
  std::vector<double> transform(std::span<const double> x) const;

  const std::vector<std::size_t>& features() const { return features_; }

 private:
  std::vector<std::size_t> features_;
  std::vector<std::vector<double>> sorted_;
};

struct ChartPolygon {
  std::string sample_id;
  int detector_label = 0;
  int surrogate_label = 0;
  std::vector<double> values;  // after reversal, one per axis
};

struct SaeChart {
  std::vector<std::string> axes;
  std::vector<ChartPolygon> polygons;
  // True when fewer than 3 features forced duplicated axes.
  bool padded = false;
};

struct ChartSample {
  std::string id;
  std::vector<double> row;  // full width
  int detector_label = 0;
  int surrogate_label = 0;
};

SaeChart build_chart(const QuantileMap& map, const std::vector<std::string>& feature_names,
                     const std::vector<ChartSample>& samples);

// 600x600 SVG 1.1 document. Byte-identical for identical charts.
std::string render_svg(const SaeChart& chart);

void write_svg(const SaeChart& chart, const std::string& path);

}  // namespace proteus
