#include "dmdroi/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>

#include "dmdroi/error.hpp"

namespace dmdroi {

namespace {

bool blob_precedes(const Blob& a, const Blob& b) {
  if (a.area() != b.area()) return a.area() > b.area();
  if (a.bbox.min_row != b.bbox.min_row) return a.bbox.min_row < b.bbox.min_row;
  return a.bbox.min_col < b.bbox.min_col;
}

}  // namespace

Restriction parse_restriction(std::string_view text) {
  if (text == "left" || text == "left-half") return Restriction::LeftHalf;
  if (text == "right" || text == "right-half") return Restriction::RightHalf;
  if (text == "full") return Restriction::Full;
  throw Error(ErrorCode::InvalidArgument, "unknown restriction '" + std::string(text) + "'");
}

std::string_view to_string(Restriction restriction) noexcept {
  switch (restriction) {
    case Restriction::LeftHalf: return "left";
    case Restriction::RightHalf: return "right";
    case Restriction::Full: return "full";
  }
  return "full";
}

MagnitudeImage mode_to_magnitude(const DmdResult& result, int mode_index, int height, int width) {
  if (mode_index < 1 || mode_index > result.mode_count()) {
    throw Error(ErrorCode::BadModeIndex, "mode " + std::to_string(mode_index) + " requested, " +
                                             std::to_string(result.mode_count()) + " available");
  }
  if (static_cast<Eigen::Index>(height) * width != result.modes.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "mode length " + std::to_string(result.modes.rows()) +
                                                  " does not match " + std::to_string(height) + "x" +
                                                  std::to_string(width));
  }
  MagnitudeImage img{height, width, {}};
  const auto column = result.modes.col(mode_index - 1);
  img.values.resize(static_cast<std::size_t>(column.size()));
  for (Eigen::Index i = 0; i < column.size(); ++i) img.values[i] = std::abs(column(i));

  const auto [lo, hi] = std::minmax_element(img.values.begin(), img.values.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& v : img.values) v = range > 0.0 ? (v - min) / range : 0.0;
  return img;
}

int histogram_bin(double value, int bins) noexcept {
  if (!(value > 0.0)) return 0;
  const double scaled = std::ceil(value * bins) - 1.0;
  return static_cast<int>(std::clamp(scaled, 0.0, static_cast<double>(bins - 1)));
}

double otsu_threshold(const MagnitudeImage& img, int bins) {
  if (bins < 2) throw Error(ErrorCode::InvalidArgument, "Otsu needs at least 2 bins");
  std::vector<std::int64_t> hist(static_cast<std::size_t>(bins), 0);
  for (double v : img.values) ++hist[histogram_bin(v, bins)];

  std::int64_t total = 0;
  std::int64_t total_sum = 0;
  for (int b = 0; b < bins; ++b) {
    total += hist[b];
    total_sum += hist[b] * b;
  }

  // Between-class variance times total^2 is (n1*S0 - n0*S1)^2 / (n0*n1);
  // the numerator is exact in integers.
  std::int64_t n0 = 0;
  std::int64_t s0 = 0;
  int best_edge = -1;
  long double best_score = 0.0L;
  for (int k = 1; k < bins; ++k) {
    n0 += hist[k - 1];
    s0 += hist[k - 1] * (k - 1);
    const std::int64_t n1 = total - n0;
    const std::int64_t s1 = total_sum - s0;
    if (n0 == 0 || n1 == 0) continue;
    const auto diff = static_cast<long double>(n1 * s0 - n0 * s1);
    const long double score = diff * diff / (static_cast<long double>(n0) * static_cast<long double>(n1));
    if (best_edge < 0 || score > best_score) {
      best_edge = k;
      best_score = score;
    }
  }
  if (best_edge < 0) {
    throw Error(ErrorCode::DegenerateInput, "all magnitudes fall in one histogram bin");
  }
  return static_cast<double>(best_edge) / bins;
}

BinaryMask binarize(const MagnitudeImage& img, double threshold) {
  if (!std::isfinite(threshold)) throw Error(ErrorCode::InvalidArgument, "threshold is not finite");
  std::vector<bool> bits(img.values.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = img.values[i] > threshold;
  return BinaryMask(img.height, img.width, std::move(bits));
}

std::vector<Blob> label_components(const BinaryMask& mask) {
  const int h = mask.height();
  const int w = mask.width();
  std::vector<bool> visited(mask.size(), false);
  std::vector<Blob> blobs;
  std::deque<Pixel> queue;

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const auto start = static_cast<std::size_t>(r) * w + c;
      if (!mask[start] || visited[start]) continue;

      Blob blob;
      visited[start] = true;
      queue.push_back({r, c});
      while (!queue.empty()) {
        const Pixel p = queue.front();
        queue.pop_front();
        blob.pixels.push_back(p);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = p.row + dr;
            const int nc = p.col + dc;
            if ((dr == 0 && dc == 0) || nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
            const auto idx = static_cast<std::size_t>(nr) * w + nc;
            if (mask[idx] && !visited[idx]) {
              visited[idx] = true;
              queue.push_back({nr, nc});
            }
          }
        }
      }

      std::sort(blob.pixels.begin(), blob.pixels.end(), [](const Pixel& a, const Pixel& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
      });
      blob.bbox = {h, w, -1, -1};
      double sum_r = 0.0;
      double sum_c = 0.0;
      for (const Pixel& p : blob.pixels) {
        blob.bbox.min_row = std::min(blob.bbox.min_row, p.row);
        blob.bbox.min_col = std::min(blob.bbox.min_col, p.col);
        blob.bbox.max_row = std::max(blob.bbox.max_row, p.row);
        blob.bbox.max_col = std::max(blob.bbox.max_col, p.col);
        sum_r += p.row;
        sum_c += p.col;
      }
      blob.centroid_row = sum_r / static_cast<double>(blob.area());
      blob.centroid_col = sum_c / static_cast<double>(blob.area());
      blobs.push_back(std::move(blob));
    }
  }

  std::stable_sort(blobs.begin(), blobs.end(), blob_precedes);
  for (std::size_t i = 0; i < blobs.size(); ++i) blobs[i].label = static_cast<int>(i) + 1;
  return blobs;
}

BinaryMask render_blob(const Blob& blob, int height, int width) {
  BinaryMask out(height, width);
  for (const Pixel& p : blob.pixels) {
    if (p.row < 0 || p.row >= height || p.col < 0 || p.col >= width) {
      throw Error(ErrorCode::DimensionMismatch, "blob pixel outside the mask");
    }
    out.set(p.row, p.col);
  }
  return out;
}

BinaryMask select_template(const std::vector<Blob>& blobs, Restriction restriction, int height,
                           int width) {
  const double half = width / 2.0;
  const Blob* best = nullptr;
  for (const Blob& b : blobs) {
    if (restriction == Restriction::LeftHalf && b.centroid_col >= half) continue;
    if (restriction == Restriction::RightHalf && b.centroid_col < half) continue;
    if (best == nullptr || blob_precedes(b, *best)) best = &b;
  }
  if (best == nullptr) {
    throw Error(ErrorCode::NoBlobFound,
                "no blob in the " + std::string(to_string(restriction)) + " region");
  }
  return render_blob(*best, height, width);
}

Delineation delineate_detailed(const DmdResult& result, int mode_index, int height, int width,
                               Restriction restriction) {
  Delineation d;
  d.magnitude = mode_to_magnitude(result, mode_index, height, width);
  d.threshold = otsu_threshold(d.magnitude);
  d.binary = binarize(d.magnitude, d.threshold);
  d.blobs = label_components(d.binary);
  d.roi = select_template(d.blobs, restriction, height, width);
  return d;
}

BinaryMask delineate(const DmdResult& result, int mode_index, int height, int width,
                     Restriction restriction) {
  return delineate_detailed(result, mode_index, height, width, restriction).roi;
}

}  // namespace dmdroi
