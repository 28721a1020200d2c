#pragma once

#include <string_view>
#include <vector>

#include "dmdroi/dmd.hpp"
#include "dmdroi/image.hpp"

namespace dmdroi {

inline constexpr int kDefaultHistogramBins = 256;

/// |mode| reshaped row-major and affine-normalized to [0, 1].
struct MagnitudeImage {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(col)];
  }
};

struct Pixel {
  int row;
  int col;
  bool operator==(const Pixel&) const = default;
};

struct BoundingBox {
  int min_row;
  int min_col;
  int max_row;
  int max_col;
};

/// One 8-connected component.
struct Blob {
  int label = 0;
  std::vector<Pixel> pixels;  // raster order
  BoundingBox bbox{};
  double centroid_row = 0.0;
  double centroid_col = 0.0;

  std::size_t area() const noexcept { return pixels.size(); }
};

enum class Restriction { LeftHalf, RightHalf, Full };

Restriction parse_restriction(std::string_view text);
std::string_view to_string(Restriction restriction) noexcept;

MagnitudeImage mode_to_magnitude(const DmdResult& result, int mode_index, int height, int width);

/// Otsu threshold over a `bins`-bin histogram of [0, 1] values.
///
/// Bin k holds values in (k/bins, (k+1)/bins] (bin 0 also takes 0), so the
/// returned edge t = k/bins separates exactly the pixels that
/// binarize(img, t) sets. The first edge maximizing between-class variance
/// wins. Throws DegenerateInput when every pixel lands in one bin.
double otsu_threshold(const MagnitudeImage& img, int bins = kDefaultHistogramBins);

/// Histogram bin for a value in [0, 1], consistent with otsu_threshold.
int histogram_bin(double value, int bins) noexcept;

BinaryMask binarize(const MagnitudeImage& img, double threshold);

/// Blobs sorted by descending area, then ascending (min_row, min_col).
std::vector<Blob> label_components(const BinaryMask& mask);

BinaryMask render_blob(const Blob& blob, int height, int width);

/// Largest blob whose centroid column falls in the restricted half.
BinaryMask select_template(const std::vector<Blob>& blobs, Restriction restriction, int height,
                           int width);

/// Intermediate products of delineate(), kept for inspection and export.
struct Delineation {
  MagnitudeImage magnitude;
  double threshold = 0.0;
  BinaryMask binary;
  std::vector<Blob> blobs;
  BinaryMask roi;
};

Delineation delineate_detailed(const DmdResult& result, int mode_index, int height, int width,
                               Restriction restriction);

BinaryMask delineate(const DmdResult& result, int mode_index, int height, int width,
                     Restriction restriction);

}  // namespace dmdroi
