#include "dmdroi/quantify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dmdroi/error.hpp"

namespace dmdroi {

std::string_view to_string(CurveSource source) noexcept {
  switch (source) {
    case CurveSource::Template: return "template";
    case CurveSource::Baseline: return "baseline";
    case CurveSource::Truth: return "truth";
    case CurveSource::Expert: return "expert";
  }
  return "template";
}

double EvalReport::mean_framework() const {
  if (datasets.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& d : datasets) sum += d.rmse_framework;
  return sum / static_cast<double>(datasets.size());
}

double EvalReport::mean_baseline() const {
  if (datasets.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& d : datasets) sum += d.rmse_baseline;
  return sum / static_cast<double>(datasets.size());
}

TimeIntensityCurve roi_mean_curve(const ImageStack& stack, const BinaryMask& mask,
                                  CurveSource source) {
  if (mask.height() != stack.height() || mask.width() != stack.width()) {
    throw Error(ErrorCode::DimensionMismatch, "mask is " + std::to_string(mask.height()) + "x" +
                                                  std::to_string(mask.width()) + ", stack is " +
                                                  std::to_string(stack.height()) + "x" +
                                                  std::to_string(stack.width()));
  }
  std::vector<std::size_t> roi;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) roi.push_back(i);
  }
  if (roi.empty()) throw Error(ErrorCode::EmptyRoi, "ROI mask has no set pixels");

  TimeIntensityCurve curve{std::vector<double>(stack.frame_count()), false, source};
  for (int t = 0; t < stack.frame_count(); ++t) {
    const auto px = stack.frame_pixels(t);
    double sum = 0.0;
    for (std::size_t i : roi) sum += px[i];
    curve.values[t] = sum / static_cast<double>(roi.size());
  }
  return curve;
}

TimeIntensityCurve normalize_curve(const TimeIntensityCurve& curve) {
  TimeIntensityCurve out = curve;
  out.normalized = true;
  double peak = 0.0;
  for (double v : curve.values) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    for (double& v : out.values) v /= peak;
  }
  return out;
}

BinaryMask bounding_box_baseline(const BinaryMask& reference_mask) {
  int min_r = reference_mask.height();
  int min_c = reference_mask.width();
  int max_r = -1;
  int max_c = -1;
  for (int r = 0; r < reference_mask.height(); ++r) {
    for (int c = 0; c < reference_mask.width(); ++c) {
      if (!reference_mask.at(r, c)) continue;
      min_r = std::min(min_r, r);
      min_c = std::min(min_c, c);
      max_r = std::max(max_r, r);
      max_c = std::max(max_c, c);
    }
  }
  if (max_r < 0) throw Error(ErrorCode::EmptyRoi, "reference mask has no set pixels");
  BinaryMask box(reference_mask.height(), reference_mask.width());
  for (int r = min_r; r <= max_r; ++r) {
    for (int c = min_c; c <= max_c; ++c) box.set(r, c);
  }
  return box;
}

double rmse(const TimeIntensityCurve& a, const TimeIntensityCurve& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch, "curve lengths " + std::to_string(a.size()) + " and " +
                                                  std::to_string(b.size()) + " differ");
  }
  if (a.normalized != b.normalized) {
    throw Error(ErrorCode::NormalizationMismatch, "cannot compare a normalized and a raw curve");
  }
  if (a.values.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) {
    const double d = a.values[t] - b.values[t];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(a.size()));
}

DatasetScore evaluate(const ImageStack& stack, const BinaryMask& roi_template,
                      const BinaryMask& reference_mask, const TimeIntensityCurve& truth,
                      std::string dataset) {
  const TimeIntensityCurve truth_n = normalize_curve(truth);
  const TimeIntensityCurve framework =
      normalize_curve(roi_mean_curve(stack, roi_template, CurveSource::Template));
  const TimeIntensityCurve baseline = normalize_curve(
      roi_mean_curve(stack, bounding_box_baseline(reference_mask), CurveSource::Baseline));
  return DatasetScore{std::move(dataset), rmse(framework, truth_n), rmse(baseline, truth_n)};
}

double dice_coefficient(const BinaryMask& a, const BinaryMask& b) {
  if (!a.same_shape(b)) throw Error(ErrorCode::DimensionMismatch, "masks differ in size");
  std::size_t both = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    both += (a[i] && b[i]) ? 1 : 0;
    total += (a[i] ? 1 : 0) + (b[i] ? 1 : 0);
  }
  return total == 0 ? 1.0 : 2.0 * static_cast<double>(both) / static_cast<double>(total);
}

}  // namespace dmdroi
