#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "dmdroi/image.hpp"
#include "dmdroi/quantify.hpp"

namespace dmdroi {

struct Ellipse {
  double center_row;
  double center_col;
  double semi_rows;
  double semi_cols;

  bool contains(int row, int col) const noexcept;
};

/// Half-open pixel rectangle [row0, row0 + rows) x [col0, col0 + cols).
struct Rect {
  int row0;
  int col0;
  int rows;
  int cols;

  bool contains(int row, int col) const noexcept {
    return row >= row0 && row < row0 + rows && col >= col0 && col < col0 + cols;
  }
};

/// Early peak plus a slow logarithmic rise.
struct KidneyCurveParams {
  double peak_weight = 0.7;
  double log_weight = 0.3;
  double lambda_fraction = 0.15;
};

struct LiverCurveParams {
  double midpoint_fraction = 0.4;
  double width_fraction = 0.08;
};

/// Parametric description of a synthetic DCE sequence.
///
/// The default layout puts a tall liver strip against the left border and a
/// large kidney ellipse just to its right, with the kidney centroid in the
/// left half. With this layout and the default seed, the second DMD mode
/// isolates the kidney; other seeds may order the slow liver mode second.
struct PhantomSpec {
  int height = 120;
  int width = 120;
  int frame_count = 100;
  double frame_interval = 1.0;
  std::uint64_t seed = 1;
  Ellipse kidney{60.0, 47.0, 36.0, 27.0};
  Rect liver{20, 0, 80, 19};
  double psf_variance = 22.0;
  int psf_size = 40;
  double background_mean = 0.1;
  double noise_sigma = 0.02;
  KidneyCurveParams kidney_curve;
  LiverCurveParams liver_curve;

  /// Flat `key=value` lines, one per field, fixed order.
  std::string to_text() const;
  /// Parses to_text() output; unknown keys throw InvalidArgument and
  /// missing keys keep their defaults.
  static PhantomSpec from_text(const std::string& text);

  /// Throws InvalidArgument or InvalidGeometry.
  void validate() const;
};

struct RegionMasks {
  BinaryMask kidney;
  BinaryMask liver;
  BinaryMask background;
};

struct PhantomOutput {
  ImageStack stack;        // PSF-convolved
  ImageStack clean_stack;  // before convolution
  RegionMasks masks;
  TimeIntensityCurve kidney_truth;
  TimeIntensityCurve liver_truth;
  TimeIntensityCurve background_truth;
};

double kidney_curve(int t, int frame_count, const KidneyCurveParams& params = {});
double liver_curve(int t, int frame_count, const LiverCurveParams& params = {});

/// Normal(mean, sigma) draw clamped to [0, 1].
double background_value(std::mt19937_64& rng, double sigma, double mean = 0.1);

/// Normalized isotropic Gaussian sampled about (size - 1) / 2.
Eigen::MatrixXd gaussian_kernel(double variance, int size);

/// 2-D correlation with clamp-to-edge boundary; the kernel anchor is at
/// ((rows - 1) / 2, (cols - 1) / 2) in integer division.
Frame convolve_psf(const Frame& frame, const Eigen::MatrixXd& kernel);

RegionMasks region_masks(const PhantomSpec& spec);

PhantomOutput generate_phantom(const PhantomSpec& spec);

}  // namespace dmdroi
