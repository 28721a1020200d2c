#include "dmdroi/stack_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "dmdroi/csv.hpp"
#include "dmdroi/error.hpp"

namespace dmdroi {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kStackMagic = "DMDSTACK";

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return out;
  }
}

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

void write_all(const fs::path& path, std::string_view bytes) {
  if (path.empty()) throw Error(ErrorCode::WriteError, "empty destination path");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::WriteError, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.close();
  if (!out) throw Error(ErrorCode::WriteError, "failed writing " + path.string());
}

template <typename T>
T parse_number(std::string_view token, const fs::path& path, const char* what) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw Error(ErrorCode::FormatError,
                path.string() + ": bad " + what + " '" + std::string(token) + "'");
  }
  return value;
}

struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 0;
  std::vector<std::uint16_t> samples;
};

// P5 header tokens are separated by whitespace and may carry `#` comments;
// exactly one whitespace byte precedes the raster.
PgmImage parse_pgm(const std::string& bytes, const fs::path& path) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos])) &&
           bytes[pos] != '#') {
      ++pos;
    }
    if (start == pos) throw Error(ErrorCode::FormatError, path.string() + ": truncated PGM header");
    return std::string_view(bytes).substr(start, pos - start);
  };

  if (next_token() != "P5") throw Error(ErrorCode::FormatError, path.string() + ": not a P5 PGM");
  PgmImage img;
  img.width = parse_number<int>(next_token(), path, "PGM width");
  img.height = parse_number<int>(next_token(), path, "PGM height");
  img.maxval = parse_number<int>(next_token(), path, "PGM maxval");
  if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535) {
    throw Error(ErrorCode::FormatError, path.string() + ": invalid PGM header values");
  }
  if (pos >= bytes.size()) throw Error(ErrorCode::FormatError, path.string() + ": missing raster");
  ++pos;

  const std::size_t count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  const std::size_t bytes_per = img.maxval > 255 ? 2 : 1;
  if (bytes.size() - pos < count * bytes_per) {
    throw Error(ErrorCode::FormatError, path.string() + ": PGM raster is truncated");
  }
  img.samples.resize(count);
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t i = 0; i < count; ++i) {
    img.samples[i] = bytes_per == 2
                         ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1])
                         : static_cast<std::uint16_t>(raw[i]);
  }
  return img;
}

std::string encode_pgm(int height, int width, int maxval, const std::vector<std::uint16_t>& samples) {
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n" +
                    std::to_string(maxval) + "\n";
  const std::size_t header = out.size();
  if (maxval > 255) {
    out.resize(header + 2 * samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      out[header + 2 * i] = static_cast<char>(samples[i] >> 8);
      out[header + 2 * i + 1] = static_cast<char>(samples[i] & 0xffu);
    }
  } else {
    out.resize(header + samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) out[header + i] = static_cast<char>(samples[i]);
  }
  return out;
}

ImageStack load_stack_file(const fs::path& path) {
  const std::string bytes = read_all(path);
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string::npos) throw Error(ErrorCode::FormatError, path.string() + ": no header line");

  std::vector<std::string_view> tokens;
  std::string_view header = std::string_view(bytes).substr(0, eol);
  while (!header.empty()) {
    const std::size_t sp = header.find(' ');
    tokens.push_back(header.substr(0, sp));
    if (sp == std::string_view::npos) break;
    header.remove_prefix(sp + 1);
  }
  if (tokens.size() != 6 || tokens[0] != kStackMagic) {
    throw Error(ErrorCode::FormatError, path.string() + ": malformed DMDSTACK header");
  }
  if (tokens[1] != "1") {
    throw Error(ErrorCode::FormatError,
                path.string() + ": unsupported DMDSTACK version " + std::string(tokens[1]));
  }
  const int height = parse_number<int>(tokens[2], path, "height");
  const int width = parse_number<int>(tokens[3], path, "width");
  const int frames = parse_number<int>(tokens[4], path, "frame count");
  const double dt = parse_number<double>(tokens[5], path, "frame interval");
  if (height <= 0 || width <= 0 || frames < 0 || !(dt > 0.0)) {
    throw Error(ErrorCode::FormatError, path.string() + ": invalid DMDSTACK header values");
  }
  if (frames < 2) {
    throw Error(ErrorCode::TooFewFrames, path.string() + ": " + std::to_string(frames) + " frames");
  }

  const std::size_t count = static_cast<std::size_t>(height) * static_cast<std::size_t>(width) *
                            static_cast<std::size_t>(frames);
  if (bytes.size() - (eol + 1) != count * sizeof(double)) {
    throw Error(ErrorCode::FormatError, path.string() + ": body size does not match header");
  }
  std::vector<double> pixels(count);
  const char* body = bytes.data() + eol + 1;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t word;
    std::memcpy(&word, body + i * sizeof(double), sizeof(word));
    pixels[i] = std::bit_cast<double>(to_little_endian(word));
    if (!std::isfinite(pixels[i])) {
      throw Error(ErrorCode::FormatError, path.string() + ": non-finite pixel value");
    }
  }
  return ImageStack(height, width, frames, dt, std::move(pixels));
}

ImageStack load_stack_directory(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  if (files.size() < 2) {
    throw Error(ErrorCode::TooFewFrames,
                dir.string() + ": found " + std::to_string(files.size()) + " PGM frames");
  }
  std::vector<Frame> frames;
  frames.reserve(files.size());
  for (const auto& f : files) frames.push_back(read_pgm(f));
  return ImageStack::from_frames(frames);
}

}  // namespace

Eigen::MatrixXd build_data_matrix(const ImageStack& stack) {
  const auto rows = static_cast<Eigen::Index>(stack.frame_size());
  const Eigen::Index cols = stack.frame_count();
  // Frame-major storage is already column-major mn x N.
  return Eigen::Map<const Eigen::MatrixXd>(stack.pixels().data(), rows, cols);
}

Frame column_to_frame(const Eigen::Ref<const Eigen::VectorXd>& column, int height, int width) {
  if (column.size() != static_cast<Eigen::Index>(height) * width) {
    throw Error(ErrorCode::DimensionMismatch, "column length does not match frame size");
  }
  return Frame(height, width, std::vector<double>(column.data(), column.data() + column.size()));
}

ImageStack load_stack(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::NotFound, path.string() + " does not exist");
  if (fs::is_directory(path, ec)) return load_stack_directory(path);
  return load_stack_file(path);
}

void save_stack(const ImageStack& stack, const fs::path& path) {
  std::string out = std::string(kStackMagic) + " 1 " + std::to_string(stack.height()) + " " +
                    std::to_string(stack.width()) + " " + std::to_string(stack.frame_count()) +
                    " " + format_real(stack.frame_interval()) + "\n";
  const std::size_t header = out.size();
  const auto px = stack.pixels();
  out.resize(header + px.size() * sizeof(double));
  for (std::size_t i = 0; i < px.size(); ++i) {
    const std::uint64_t word = to_little_endian(std::bit_cast<std::uint64_t>(px[i]));
    std::memcpy(out.data() + header + i * sizeof(double), &word, sizeof(word));
  }
  write_all(path, out);
}

Frame read_pgm(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec)) throw Error(ErrorCode::NotFound, path.string() + " does not exist");
  const PgmImage img = parse_pgm(read_all(path), path);
  return Frame(img.height, img.width, std::vector<double>(img.samples.begin(), img.samples.end()));
}

std::vector<std::uint16_t> quantize_frame(const Frame& frame, bool normalize) {
  const auto px = frame.pixels();
  std::vector<std::uint16_t> out(px.size(), 0);
  if (px.empty()) return out;
  if (normalize) {
    const auto [lo, hi] = std::minmax_element(px.begin(), px.end());
    const double range = *hi - *lo;
    if (!(range > 0.0)) return out;
    for (std::size_t i = 0; i < px.size(); ++i) {
      const double scaled = std::floor((px[i] - *lo) / range * 65535.0 + 0.5);
      out[i] = static_cast<std::uint16_t>(std::clamp(scaled, 0.0, 65535.0));
    }
  } else {
    for (std::size_t i = 0; i < px.size(); ++i) {
      out[i] = static_cast<std::uint16_t>(std::clamp(std::floor(px[i] + 0.5), 0.0, 65535.0));
    }
  }
  return out;
}

void export_frame_image(const Frame& frame, const fs::path& path, bool normalize) {
  write_all(path, encode_pgm(frame.height(), frame.width(), 65535, quantize_frame(frame, normalize)));
}

void write_mask_pgm(const BinaryMask& mask, const fs::path& path) {
  std::vector<std::uint16_t> samples(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) samples[i] = mask[i] ? 255 : 0;
  write_all(path, encode_pgm(mask.height(), mask.width(), 255, samples));
}

BinaryMask read_mask_pgm(const fs::path& path) {
  const Frame f = read_pgm(path);
  std::vector<bool> bits(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) bits[i] = f.pixels()[i] != 0.0;
  return BinaryMask(f.height(), f.width(), std::move(bits));
}

}  // namespace dmdroi
