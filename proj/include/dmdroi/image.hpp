#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dmdroi {

/// Single real-valued image, row-major.
class Frame {
 public:
  Frame() = default;
  Frame(int height, int width, std::vector<double> pixels);
  Frame(int height, int width, double fill = 0.0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  double at(int row, int col) const { return pixels_[index(row, col)]; }
  double& at(int row, int col) { return pixels_[index(row, col)]; }

  std::span<const double> pixels() const noexcept { return pixels_; }
  std::span<double> pixels() noexcept { return pixels_; }

  bool operator==(const Frame&) const = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> pixels_;
};

/// Per-pixel boolean image, row-major. Also used as an ROI template.
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int height, int width, bool fill = false);
  BinaryMask(int height, int width, std::vector<bool> bits);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool at(int row, int col) const { return bits_[index(row, col)]; }
  void set(int row, int col, bool value = true) { bits_[index(row, col)] = value; }
  bool operator[](std::size_t i) const { return bits_[i]; }

  std::size_t count() const noexcept;
  bool empty_set() const noexcept { return count() == 0; }
  bool same_shape(const BinaryMask& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<bool> bits_;
};

/// Ordered sequence of equally spaced frames sharing one size.
///
/// Pixels are stored frame-major with a row-major raster inside each frame,
/// the same layout as the DMDSTACK file body. Construction validates that
/// there are at least two frames, every value is finite and the frame
/// interval is positive; a constructed stack is never mutated afterwards.
class ImageStack {
 public:
  ImageStack(int height, int width, int frame_count, double frame_interval,
             std::vector<double> pixels);
  static ImageStack from_frames(const std::vector<Frame>& frames, double frame_interval = 1.0);

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  int frame_count() const noexcept { return frame_count_; }
  double frame_interval() const noexcept { return frame_interval_; }
  std::size_t frame_size() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  std::span<const double> frame_pixels(int t) const;
  Frame frame(int t) const;
  std::span<const double> pixels() const noexcept { return pixels_; }

  bool operator==(const ImageStack&) const = default;

 private:
  int height_;
  int width_;
  int frame_count_;
  double frame_interval_;
  std::vector<double> pixels_;
};

}  // namespace dmdroi
