#include "dmdroi/phantom.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <type_traits>
#include <map>
#include <sstream>
#include <string>

#include "dmdroi/csv.hpp"
#include "dmdroi/error.hpp"

namespace dmdroi {

bool Ellipse::contains(int row, int col) const noexcept {
  const double dr = (row - center_row) / semi_rows;
  const double dc = (col - center_col) / semi_cols;
  return dr * dr + dc * dc <= 1.0;
}

namespace {

// Field table shared by to_text and from_text so both stay in one order.
struct Field {
  const char* key;
  std::function<std::string(const PhantomSpec&)> get;
  std::function<void(PhantomSpec&, const std::string&)> set;
};

template <typename T>
T parse_value(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, "bad value '" + text + "' for " + key);
  }
  return value;
}

template <typename T>
std::string print_value(T v) {
  if constexpr (std::is_floating_point_v<T>) {
    return format_real(v);
  } else {
    return std::to_string(v);
  }
}

#define DMDROI_FIELD(name, member)                                                     \
  Field {                                                                              \
    name, [](const PhantomSpec& s) { return print_value(s.member); },                  \
        [](PhantomSpec& s, const std::string& v) {                                     \
          s.member = parse_value<std::remove_cvref_t<decltype(s.member)>>(name, v);    \
        }                                                                              \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      DMDROI_FIELD("height", height),
      DMDROI_FIELD("width", width),
      DMDROI_FIELD("frame_count", frame_count),
      DMDROI_FIELD("frame_interval", frame_interval),
      DMDROI_FIELD("seed", seed),
      DMDROI_FIELD("kidney.center_row", kidney.center_row),
      DMDROI_FIELD("kidney.center_col", kidney.center_col),
      DMDROI_FIELD("kidney.semi_rows", kidney.semi_rows),
      DMDROI_FIELD("kidney.semi_cols", kidney.semi_cols),
      DMDROI_FIELD("liver.row0", liver.row0),
      DMDROI_FIELD("liver.col0", liver.col0),
      DMDROI_FIELD("liver.rows", liver.rows),
      DMDROI_FIELD("liver.cols", liver.cols),
      DMDROI_FIELD("psf_variance", psf_variance),
      DMDROI_FIELD("psf_size", psf_size),
      DMDROI_FIELD("background_mean", background_mean),
      DMDROI_FIELD("noise_sigma", noise_sigma),
      DMDROI_FIELD("kidney_curve.peak_weight", kidney_curve.peak_weight),
      DMDROI_FIELD("kidney_curve.log_weight", kidney_curve.log_weight),
      DMDROI_FIELD("kidney_curve.lambda_fraction", kidney_curve.lambda_fraction),
      DMDROI_FIELD("liver_curve.midpoint_fraction", liver_curve.midpoint_fraction),
      DMDROI_FIELD("liver_curve.width_fraction", liver_curve.width_fraction),
  };
  return table;
}

#undef DMDROI_FIELD

double poisson_log_shape(int t, double lambda) {
  return t * std::log(lambda) - lambda - std::lgamma(t + 1.0);
}

std::mt19937_64 frame_engine(std::uint64_t seed, int t) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t)};
  return std::mt19937_64(seq);
}

}  // namespace

std::string PhantomSpec::to_text() const {
  std::string out;
  for (const Field& f : fields()) out += std::string(f.key) + "=" + f.get(*this) + "\n";
  return out;
}

PhantomSpec PhantomSpec::from_text(const std::string& text) {
  PhantomSpec spec;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "expected key=value: " + line);
    const std::string key = line.substr(0, eq);
    const auto it = std::find_if(fields().begin(), fields().end(),
                                 [&](const Field& f) { return key == f.key; });
    if (it == fields().end()) throw Error(ErrorCode::InvalidArgument, "unknown phantom key " + key);
    it->set(spec, line.substr(eq + 1));
  }
  return spec;
}

void PhantomSpec::validate() const {
  if (height <= 0 || width <= 0) throw Error(ErrorCode::InvalidArgument, "image size must be positive");
  if (frame_count < 2) {
    throw Error(ErrorCode::InvalidArgument,
                "frame_count must be at least 2, got " + std::to_string(frame_count));
  }
  if (!(frame_interval > 0.0)) throw Error(ErrorCode::InvalidArgument, "frame_interval must be positive");
  if (!(psf_variance > 0.0)) throw Error(ErrorCode::InvalidArgument, "psf_variance must be positive");
  if (psf_size < 1) throw Error(ErrorCode::InvalidArgument, "psf_size must be at least 1");
  if (!(noise_sigma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise_sigma must be non-negative");
  if (!(kidney.semi_rows > 0.0 && kidney.semi_cols > 0.0)) {
    throw Error(ErrorCode::InvalidGeometry, "kidney semi-axes must be positive");
  }
  if (kidney.center_row - kidney.semi_rows < 0.0 || kidney.center_row + kidney.semi_rows > height - 1 ||
      kidney.center_col - kidney.semi_cols < 0.0 || kidney.center_col + kidney.semi_cols > width - 1) {
    throw Error(ErrorCode::InvalidGeometry, "kidney ellipse leaves the image");
  }
  if (liver.rows <= 0 || liver.cols <= 0 || liver.row0 < 0 || liver.col0 < 0 ||
      liver.row0 + liver.rows > height || liver.col0 + liver.cols > width) {
    throw Error(ErrorCode::InvalidGeometry, "liver rectangle leaves the image");
  }
}

double kidney_curve(int t, int frame_count, const KidneyCurveParams& params) {
  const double lambda = params.lambda_fraction * frame_count;
  double peak = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < frame_count; ++s) peak = std::max(peak, poisson_log_shape(s, lambda));
  const double shape = std::exp(poisson_log_shape(t, lambda) - peak);
  return params.peak_weight * shape +
         params.log_weight * std::log1p(static_cast<double>(t)) / std::log(static_cast<double>(frame_count));
}

double liver_curve(int t, int frame_count, const LiverCurveParams& params) {
  const double mid = params.midpoint_fraction * frame_count;
  const double width = params.width_fraction * frame_count;
  return 1.0 / (1.0 + std::exp(-(t - mid) / width));
}

double background_value(std::mt19937_64& rng, double sigma, double mean) {
  if (sigma == 0.0) return std::clamp(mean, 0.0, 1.0);
  std::normal_distribution<double> dist(mean, sigma);
  return std::clamp(dist(rng), 0.0, 1.0);
}

Eigen::MatrixXd gaussian_kernel(double variance, int size) {
  if (!(variance > 0.0) || size < 1) {
    throw Error(ErrorCode::InvalidArgument, "kernel needs positive variance and size");
  }
  const double c = (size - 1) / 2.0;
  Eigen::MatrixXd k(size, size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      k(i, j) = std::exp(-((i - c) * (i - c) + (j - c) * (j - c)) / (2.0 * variance));
    }
  }
  return k / k.sum();
}

Frame convolve_psf(const Frame& frame, const Eigen::MatrixXd& kernel) {
  const int h = frame.height();
  const int w = frame.width();
  const auto kr = static_cast<int>(kernel.rows());
  const auto kc = static_cast<int>(kernel.cols());
  if (kr < 1 || kc < 1) throw Error(ErrorCode::InvalidArgument, "empty kernel");
  if (kr > 2 * h || kc > 2 * w) {
    throw Error(ErrorCode::KernelTooLarge, std::to_string(kr) + "x" + std::to_string(kc) +
                                               " kernel on a " + std::to_string(h) + "x" +
                                               std::to_string(w) + " frame");
  }
  const int ar = (kr - 1) / 2;
  const int ac = (kc - 1) / 2;

  // Replicate-padded copy so the inner loop runs over contiguous memory.
  const int ph = h + kr - 1;
  const int pw = w + kc - 1;
  std::vector<double> padded(static_cast<std::size_t>(ph) * pw);
  for (int r = 0; r < ph; ++r) {
    const int sr = std::clamp(r - ar, 0, h - 1);
    for (int c = 0; c < pw; ++c) {
      padded[static_cast<std::size_t>(r) * pw + c] = frame.at(sr, std::clamp(c - ac, 0, w - 1));
    }
  }

  std::vector<double> out(static_cast<std::size_t>(h) * w, 0.0);
  for (int i = 0; i < h; ++i) {
    double* out_row = out.data() + static_cast<std::size_t>(i) * w;
    for (int a = 0; a < kr; ++a) {
      const double* src = padded.data() + static_cast<std::size_t>(i + a) * pw;
      for (int b = 0; b < kc; ++b) {
        const double weight = kernel(a, b);
        const double* s = src + b;
        for (int j = 0; j < w; ++j) out_row[j] += weight * s[j];
      }
    }
  }
  return Frame(h, w, std::move(out));
}

RegionMasks region_masks(const PhantomSpec& spec) {
  spec.validate();
  RegionMasks m{BinaryMask(spec.height, spec.width), BinaryMask(spec.height, spec.width),
                BinaryMask(spec.height, spec.width)};
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const bool in_kidney = spec.kidney.contains(r, c);
      const bool in_liver = spec.liver.contains(r, c);
      if (in_kidney && in_liver) {
        throw Error(ErrorCode::InvalidGeometry,
                    "kidney and liver overlap at (" + std::to_string(r) + ", " + std::to_string(c) + ")");
      }
      if (in_kidney) {
        m.kidney.set(r, c);
      } else if (in_liver) {
        m.liver.set(r, c);
      } else {
        m.background.set(r, c);
      }
    }
  }
  if (m.kidney.empty_set() || m.liver.empty_set()) {
    throw Error(ErrorCode::InvalidGeometry, "kidney and liver regions must be nonempty");
  }
  return m;
}

PhantomOutput generate_phantom(const PhantomSpec& spec) {
  RegionMasks masks = region_masks(spec);
  const Eigen::MatrixXd kernel = gaussian_kernel(spec.psf_variance, spec.psf_size);
  const int T = spec.frame_count;
  const std::size_t frame_size = static_cast<std::size_t>(spec.height) * spec.width;

  std::vector<double> clean;
  std::vector<double> blurred;
  clean.reserve(frame_size * T);
  blurred.reserve(frame_size * T);
  TimeIntensityCurve kidney{{}, false, CurveSource::Truth};
  TimeIntensityCurve liver{{}, false, CurveSource::Truth};
  TimeIntensityCurve background{std::vector<double>(T, spec.background_mean), false, CurveSource::Truth};

  for (int t = 0; t < T; ++t) {
    const double k = kidney_curve(t, T, spec.kidney_curve);
    const double l = liver_curve(t, T, spec.liver_curve);
    kidney.values.push_back(k);
    liver.values.push_back(l);

    std::mt19937_64 rng = frame_engine(spec.seed, t);
    Frame frame(spec.height, spec.width);
    for (std::size_t i = 0; i < frame_size; ++i) {
      const double noise = background_value(rng, spec.noise_sigma, spec.background_mean);
      frame.pixels()[i] = masks.kidney[i] ? k : masks.liver[i] ? l : noise;
    }
    const Frame conv = convolve_psf(frame, kernel);
    clean.insert(clean.end(), frame.pixels().begin(), frame.pixels().end());
    blurred.insert(blurred.end(), conv.pixels().begin(), conv.pixels().end());
  }

  return PhantomOutput{
      ImageStack(spec.height, spec.width, T, spec.frame_interval, std::move(blurred)),
      ImageStack(spec.height, spec.width, T, spec.frame_interval, std::move(clean)),
      std::move(masks),
      std::move(kidney),
      std::move(liver),
      std::move(background),
  };
}

}  // namespace dmdroi
