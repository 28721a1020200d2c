#include "dmdroi/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dmdroi/error.hpp"

namespace dmdroi {

namespace {

void check_dims(int height, int width) {
  if (height <= 0 || width <= 0) {
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be positive, got " +
                                                std::to_string(height) + "x" +
                                                std::to_string(width));
  }
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

Frame::Frame(int height, int width, std::vector<double> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  check_dims(height, width);
  if (pixels_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw Error(ErrorCode::DimensionMismatch, "frame pixel count does not match its size");
  }
  if (!all_finite(pixels_)) throw Error(ErrorCode::InvalidArgument, "frame has non-finite pixels");
}

Frame::Frame(int height, int width, double fill)
    : height_(height), width_(width) {
  check_dims(height, width);
  pixels_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
}

BinaryMask::BinaryMask(int height, int width, bool fill) : height_(height), width_(width) {
  check_dims(height, width);
  bits_.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), fill);
}

BinaryMask::BinaryMask(int height, int width, std::vector<bool> bits)
    : height_(height), width_(width), bits_(std::move(bits)) {
  check_dims(height, width);
  if (bits_.size() != static_cast<std::size_t>(height) * static_cast<std::size_t>(width)) {
    throw Error(ErrorCode::DimensionMismatch, "mask bit count does not match its size");
  }
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

ImageStack::ImageStack(int height, int width, int frame_count, double frame_interval,
                       std::vector<double> pixels)
    : height_(height),
      width_(width),
      frame_count_(frame_count),
      frame_interval_(frame_interval),
      pixels_(std::move(pixels)) {
  check_dims(height, width);
  if (frame_count < 2) {
    throw Error(ErrorCode::TooFewFrames,
                "a stack needs at least 2 frames, got " + std::to_string(frame_count));
  }
  if (!(frame_interval > 0.0) || !std::isfinite(frame_interval)) {
    throw Error(ErrorCode::InvalidArgument, "frame interval must be positive");
  }
  if (pixels_.size() != frame_size() * static_cast<std::size_t>(frame_count)) {
    throw Error(ErrorCode::DimensionMismatch, "stack pixel count does not match m*n*N");
  }
  if (!all_finite(pixels_)) throw Error(ErrorCode::InvalidArgument, "stack has non-finite pixels");
}

ImageStack ImageStack::from_frames(const std::vector<Frame>& frames, double frame_interval) {
  if (frames.size() < 2) {
    throw Error(ErrorCode::TooFewFrames,
                "a stack needs at least 2 frames, got " + std::to_string(frames.size()));
  }
  const int height = frames.front().height();
  const int width = frames.front().width();
  std::vector<double> pixels;
  pixels.reserve(frames.size() * frames.front().size());
  for (const Frame& f : frames) {
    if (f.height() != height || f.width() != width) {
      throw Error(ErrorCode::DimensionMismatch,
                  "frame of size " + std::to_string(f.height()) + "x" + std::to_string(f.width()) +
                      " does not match " + std::to_string(height) + "x" + std::to_string(width));
    }
    pixels.insert(pixels.end(), f.pixels().begin(), f.pixels().end());
  }
  return ImageStack(height, width, static_cast<int>(frames.size()), frame_interval,
                    std::move(pixels));
}

std::span<const double> ImageStack::frame_pixels(int t) const {
  if (t < 0 || t >= frame_count_) {
    throw Error(ErrorCode::InvalidArgument, "frame index " + std::to_string(t) + " out of range");
  }
  return std::span<const double>(pixels_).subspan(static_cast<std::size_t>(t) * frame_size(),
                                                  frame_size());
}

Frame ImageStack::frame(int t) const {
  auto px = frame_pixels(t);
  return Frame(height_, width_, std::vector<double>(px.begin(), px.end()));
}

}  // namespace dmdroi
