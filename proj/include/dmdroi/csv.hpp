#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "dmdroi/dmd.hpp"
#include "dmdroi/quantify.hpp"

namespace dmdroi {

/// Shortest round-trip decimal form, independent of locale.
std::string format_real(double value);

/// `index,re,im,modulus,phase`, preceded by a `#` comment line carrying the
/// pre-deduplication mode count.
std::string eigenvalues_csv(const DmdResult& result);

/// `t,value`
std::string curve_csv(const TimeIntensityCurve& curve);

/// `t,kidney,liver,background`
std::string truth_csv(const TimeIntensityCurve& kidney, const TimeIntensityCurve& liver,
                      const TimeIntensityCurve& background);

/// `dataset,rmse_framework,rmse_baseline`
std::string report_csv(const EvalReport& report);

/// Reads one numeric column from a headed CSV. An empty column name picks
/// the second column. Lines starting with `#` are skipped.
TimeIntensityCurve read_curve_csv(const std::filesystem::path& path,
                                  const std::string& column = {},
                                  CurveSource source = CurveSource::Truth);

}  // namespace dmdroi
