#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dmdroi/image.hpp"

namespace dmdroi {

enum class CurveSource { Template, Baseline, Truth, Expert };

std::string_view to_string(CurveSource source) noexcept;

struct TimeIntensityCurve {
  std::vector<double> values;
  bool normalized = false;
  CurveSource source = CurveSource::Template;

  std::size_t size() const noexcept { return values.size(); }
};

struct DatasetScore {
  std::string dataset;
  double rmse_framework = 0.0;
  double rmse_baseline = 0.0;
};

struct EvalReport {
  std::vector<DatasetScore> datasets;

  double mean_framework() const;
  double mean_baseline() const;
};

/// Mean of each frame over the set pixels. Throws EmptyRoi or DimensionMismatch.
TimeIntensityCurve roi_mean_curve(const ImageStack& stack, const BinaryMask& mask,
                                  CurveSource source = CurveSource::Template);

/// Divides by max |value|; an all-zero curve is only flagged.
TimeIntensityCurve normalize_curve(const TimeIntensityCurve& curve);

/// Filled minimal axis-aligned rectangle around the set pixels.
BinaryMask bounding_box_baseline(const BinaryMask& reference_mask);

double rmse(const TimeIntensityCurve& a, const TimeIntensityCurve& b);

/// Normalized RMSE of the template curve and of the bounding-box baseline
/// curve, both against the normalized truth.
DatasetScore evaluate(const ImageStack& stack, const BinaryMask& roi_template,
                      const BinaryMask& reference_mask, const TimeIntensityCurve& truth,
                      std::string dataset = "dataset");

double dice_coefficient(const BinaryMask& a, const BinaryMask& b);

}  // namespace dmdroi
