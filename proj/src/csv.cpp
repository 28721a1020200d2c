#include "dmdroi/csv.hpp"

#include <array>
#include <charconv>
#include <complex>
#include <fstream>
#include <sstream>

#include "dmdroi/error.hpp"

namespace dmdroi {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string format_real(double value) {
  if (value == 0.0) return "0";  // folds -0
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string eigenvalues_csv(const DmdResult& result) {
  std::string out = "# modes_before_dedup=" + std::to_string(result.retained_from) +
                    " modes_retained=" + std::to_string(result.mode_count()) + "\n";
  out += "index,re,im,modulus,phase\n";
  for (Eigen::Index k = 0; k < result.mode_count(); ++k) {
    const std::complex<double> z = result.eigenvalues(k);
    out += std::to_string(k + 1) + "," + format_real(z.real()) + "," + format_real(z.imag()) + "," +
           format_real(std::abs(z)) + "," + format_real(result.phase_angles(k)) + "\n";
  }
  return out;
}

std::string curve_csv(const TimeIntensityCurve& curve) {
  std::string out = "t,value\n";
  for (std::size_t t = 0; t < curve.size(); ++t) {
    out += std::to_string(t) + "," + format_real(curve.values[t]) + "\n";
  }
  return out;
}

std::string truth_csv(const TimeIntensityCurve& kidney, const TimeIntensityCurve& liver,
                      const TimeIntensityCurve& background) {
  if (kidney.size() != liver.size() || kidney.size() != background.size()) {
    throw Error(ErrorCode::DimensionMismatch, "truth curves differ in length");
  }
  std::string out = "t,kidney,liver,background\n";
  for (std::size_t t = 0; t < kidney.size(); ++t) {
    out += std::to_string(t) + "," + format_real(kidney.values[t]) + "," +
           format_real(liver.values[t]) + "," + format_real(background.values[t]) + "\n";
  }
  return out;
}

std::string report_csv(const EvalReport& report) {
  std::string out = "dataset,rmse_framework,rmse_baseline\n";
  for (const auto& d : report.datasets) {
    out += d.dataset + "," + format_real(d.rmse_framework) + "," + format_real(d.rmse_baseline) + "\n";
  }
  return out;
}

TimeIntensityCurve read_curve_csv(const std::filesystem::path& path, const std::string& column,
                                  CurveSource source) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "cannot open " + path.string());
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    header = split_commas(line);
    break;
  }
  if (header.size() < 2) throw Error(ErrorCode::FormatError, path.string() + ": missing CSV header");

  std::size_t index = 1;
  if (!column.empty()) {
    index = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == column) index = i;
    }
    if (index == header.size()) {
      throw Error(ErrorCode::FormatError, path.string() + ": no column named " + column);
    }
  }

  TimeIntensityCurve curve{{}, false, source};
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::FormatError, path.string() + ": ragged row '" + line + "'");
    }
    double v = 0.0;
    const std::string& cell = cells[index];
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
      throw Error(ErrorCode::FormatError, path.string() + ": bad number '" + cell + "'");
    }
    curve.values.push_back(v);
  }
  return curve;
}

}  // namespace dmdroi
