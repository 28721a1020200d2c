#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dmdroi/csv.hpp"
#include "dmdroi/dmd.hpp"
#include "dmdroi/error.hpp"
#include "dmdroi/phantom.hpp"
#include "dmdroi/quantify.hpp"
#include "dmdroi/segmentation.hpp"
#include "dmdroi/stack_io.hpp"
#include "manifest.hpp"

namespace dmdroi::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr const char* kPhantomStackFile = "stack.dmdstack";

struct RunConfig {
  std::string input;
  std::string out;
  int mode_index = 2;
  std::string restriction = "left";
  double svd_tol = kDefaultSvdTolerance;
  int top_k = 10;

  std::string mask;
  std::string truth;
  std::string truth_column;
  std::string reference_mask;

  std::string spec_file;
  std::optional<std::uint64_t> seed;
  std::optional<int> frames;
  std::optional<double> psf_variance;
  std::optional<int> psf_size;
  std::optional<double> noise_sigma;
  std::optional<int> height;
  std::optional<int> width;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::BadModeIndex:
    case ErrorCode::KernelTooLarge:
    case ErrorCode::InvalidGeometry:
    case ErrorCode::NormalizationMismatch:
      return kUsage;
    case ErrorCode::NotFound:
    case ErrorCode::FormatError:
    case ErrorCode::WriteError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::TooFewFrames:
      return kIo;
    case ErrorCode::DegenerateInput:
    case ErrorCode::NoBlobFound:
    case ErrorCode::EmptyRoi:
    case ErrorCode::NumericalFailure:
      return kEmptyResult;
  }
  return kEmptyResult;
}

std::string mode_image_name(int k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "mode_%03d.pgm", k);
  return buf;
}

// A phantom output directory stands in for its convolved stack.
fs::path resolve_stack(const std::string& input) {
  const fs::path p(input);
  if (fs::is_directory(p) && fs::is_regular_file(p / kPhantomStackFile)) return p / kPhantomStackFile;
  return p;
}

// Phantom directories also supply truth and the reference mask by default.
void fill_phantom_defaults(RunConfig& cfg) {
  const fs::path p(cfg.input);
  if (!fs::is_directory(p) || !fs::is_regular_file(p / kPhantomStackFile)) return;
  if (cfg.truth.empty() && fs::is_regular_file(p / "truth.csv")) cfg.truth = (p / "truth.csv").string();
  if (cfg.reference_mask.empty() && fs::is_regular_file(p / "mask_kidney.pgm")) {
    cfg.reference_mask = (p / "mask_kidney.pgm").string();
  }
  if (cfg.truth_column.empty()) cfg.truth_column = "kidney";
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw Error(ErrorCode::InvalidArgument, std::string(flag) + " is required");
}

void record_common(ArtifactWriter& w, const char* command, const fs::path& stack_path) {
  w.record("command", command);
  w.record("version", kVersion);
  w.record("input", stack_path.string());
  w.record("input.sha256", sha256_path(stack_path));
}

void record_dmd(ArtifactWriter& w, const RunConfig& cfg, const DmdResult& result) {
  w.record("svd_tol", format_real(cfg.svd_tol));
  w.record("modes_before_dedup", std::to_string(result.retained_from));
  w.record("modes_retained", std::to_string(result.mode_count()));
}

void export_modes(ArtifactWriter& w, const DmdResult& result, const ImageStack& stack, int top_k) {
  const int count = std::min<int>(top_k, static_cast<int>(result.mode_count()));
  for (int k = 1; k <= count; ++k) {
    MagnitudeImage mag = mode_to_magnitude(result, k, stack.height(), stack.width());
    export_frame_image(Frame(mag.height, mag.width, std::move(mag.values)), w.stage(mode_image_name(k)),
                       true);
  }
}

PhantomSpec resolve_phantom_spec(const RunConfig& cfg) {
  PhantomSpec spec;
  if (!cfg.spec_file.empty()) {
    std::ifstream in(cfg.spec_file);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open " + cfg.spec_file);
    std::ostringstream ss;
    ss << in.rdbuf();
    spec = PhantomSpec::from_text(ss.str());
  }
  if (cfg.seed) spec.seed = *cfg.seed;
  if (cfg.frames) spec.frame_count = *cfg.frames;
  if (cfg.psf_variance) spec.psf_variance = *cfg.psf_variance;
  if (cfg.psf_size) spec.psf_size = *cfg.psf_size;
  if (cfg.noise_sigma) spec.noise_sigma = *cfg.noise_sigma;
  if (cfg.height) spec.height = *cfg.height;
  if (cfg.width) spec.width = *cfg.width;
  spec.validate();
  return spec;
}

int cmd_phantom(const RunConfig& cfg) {
  require(cfg.out, "--out");
  const PhantomSpec spec = resolve_phantom_spec(cfg);
  const PhantomOutput ph = generate_phantom(spec);

  ArtifactWriter w(cfg.out);
  save_stack(ph.stack, w.stage(kPhantomStackFile));
  save_stack(ph.clean_stack, w.stage("clean.dmdstack"));
  write_mask_pgm(ph.masks.kidney, w.stage("mask_kidney.pgm"));
  write_mask_pgm(ph.masks.liver, w.stage("mask_liver.pgm"));
  write_mask_pgm(ph.masks.background, w.stage("mask_background.pgm"));
  w.write_text("truth.csv", truth_csv(ph.kidney_truth, ph.liver_truth, ph.background_truth));
  w.write_text("phantom.spec", spec.to_text());
  w.record("command", "phantom");
  w.record("version", kVersion);
  std::istringstream fields(spec.to_text());
  for (std::string line; std::getline(fields, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) w.record("spec." + line.substr(0, eq), line.substr(eq + 1));
  }
  w.record("spec.sha256", sha256_hex(spec.to_text()));
  w.commit();
  return kSuccess;
}

int cmd_dmd(const RunConfig& cfg) {
  require(cfg.input, "--input");
  require(cfg.out, "--out");
  if (cfg.top_k < 0) throw Error(ErrorCode::InvalidArgument, "--top-k must be non-negative");
  const fs::path stack_path = resolve_stack(cfg.input);
  const ImageStack stack = load_stack(stack_path);
  const DmdResult result = run_dmd(stack, cfg.svd_tol);

  ArtifactWriter w(cfg.out);
  w.write_text("eigenvalues.csv", eigenvalues_csv(result));
  export_modes(w, result, stack, cfg.top_k);
  record_common(w, "dmd", stack_path);
  record_dmd(w, cfg, result);
  w.record("top_k", std::to_string(cfg.top_k));
  w.commit();
  return kSuccess;
}

int cmd_segment(const RunConfig& cfg) {
  require(cfg.input, "--input");
  require(cfg.out, "--out");
  const Restriction restriction = parse_restriction(cfg.restriction);
  const fs::path stack_path = resolve_stack(cfg.input);
  const ImageStack stack = load_stack(stack_path);
  const DmdResult result = run_dmd(stack, cfg.svd_tol);
  const Delineation d = delineate_detailed(result, cfg.mode_index, stack.height(), stack.width(), restriction);

  ArtifactWriter w(cfg.out);
  export_frame_image(Frame(d.magnitude.height, d.magnitude.width, d.magnitude.values),
                     w.stage("magnitude.pgm"), true);
  write_mask_pgm(d.binary, w.stage("binary.pgm"));
  write_mask_pgm(d.roi, w.stage("template.pgm"));
  record_common(w, "segment", stack_path);
  record_dmd(w, cfg, result);
  w.record("mode_index", std::to_string(cfg.mode_index));
  w.record("restriction", std::string(to_string(restriction)));
  w.record("threshold", format_real(d.threshold));
  w.record("blob_count", std::to_string(d.blobs.size()));
  w.record("template_area", std::to_string(d.roi.count()));
  w.commit();
  return kSuccess;
}

std::optional<DatasetScore> maybe_evaluate(const RunConfig& cfg, const ImageStack& stack,
                                           const BinaryMask& roi, ArtifactWriter& w) {
  if (cfg.truth.empty() && cfg.reference_mask.empty()) return std::nullopt;
  if (cfg.truth.empty() || cfg.reference_mask.empty()) {
    throw Error(ErrorCode::InvalidArgument, "evaluation needs both --truth and --reference-mask");
  }
  const TimeIntensityCurve truth = read_curve_csv(cfg.truth, cfg.truth_column);
  const BinaryMask reference = read_mask_pgm(cfg.reference_mask);
  DatasetScore score = evaluate(stack, roi, reference, truth, fs::path(cfg.input).filename().string());
  const TimeIntensityCurve baseline =
      roi_mean_curve(stack, bounding_box_baseline(reference), CurveSource::Baseline);
  w.write_text("baseline_curve.csv", curve_csv(baseline));
  w.record("truth", cfg.truth);
  w.record("truth.sha256", sha256_path(cfg.truth));
  w.record("truth_column", cfg.truth_column);
  w.record("reference_mask", cfg.reference_mask);
  w.record("reference_mask.sha256", sha256_path(cfg.reference_mask));
  return score;
}

void write_report(ArtifactWriter& w, const DatasetScore& score) {
  EvalReport report;
  report.datasets.push_back(score);
  w.write_text("report.csv", report_csv(report));
}

int cmd_quantify(const RunConfig& cfg) {
  require(cfg.input, "--input");
  require(cfg.out, "--out");
  require(cfg.mask, "--mask");
  const fs::path stack_path = resolve_stack(cfg.input);
  const ImageStack stack = load_stack(stack_path);
  const BinaryMask roi = read_mask_pgm(cfg.mask);
  const TimeIntensityCurve curve = roi_mean_curve(stack, roi);

  ArtifactWriter w(cfg.out);
  w.write_text("curve.csv", curve_csv(curve));
  const auto score = maybe_evaluate(cfg, stack, roi, w);
  if (score) write_report(w, *score);
  record_common(w, "quantify", stack_path);
  w.record("mask", cfg.mask);
  w.record("mask.sha256", sha256_path(cfg.mask));
  w.commit();
  return kSuccess;
}

int cmd_pipeline(RunConfig cfg) {
  require(cfg.input, "--input");
  require(cfg.out, "--out");
  fill_phantom_defaults(cfg);
  const Restriction restriction = parse_restriction(cfg.restriction);
  const fs::path stack_path = resolve_stack(cfg.input);
  const ImageStack stack = load_stack(stack_path);
  const DmdResult result = run_dmd(stack, cfg.svd_tol);
  const Delineation d = delineate_detailed(result, cfg.mode_index, stack.height(), stack.width(), restriction);
  const TimeIntensityCurve curve = roi_mean_curve(stack, d.roi);

  ArtifactWriter w(cfg.out);
  w.write_text("eigenvalues.csv", eigenvalues_csv(result));
  export_modes(w, result, stack, cfg.top_k);
  write_mask_pgm(d.roi, w.stage("template.pgm"));
  w.write_text("curve.csv", curve_csv(curve));
  record_common(w, "pipeline", stack_path);
  record_dmd(w, cfg, result);
  w.record("top_k", std::to_string(cfg.top_k));
  w.record("mode_index", std::to_string(cfg.mode_index));
  w.record("restriction", std::string(to_string(restriction)));
  w.record("threshold", format_real(d.threshold));
  w.record("template_area", std::to_string(d.roi.count()));
  const auto score = maybe_evaluate(cfg, stack, d.roi, w);
  if (score) {
    write_report(w, *score);
    w.record("rmse_framework", format_real(score->rmse_framework));
    w.record("rmse_baseline", format_real(score->rmse_baseline));
  }
  w.commit();
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Dynamic mode decomposition ROI delineation for image sequences", "dmdroi"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  RunConfig cfg;
  auto add_input = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "DMDSTACK file, PGM frame directory or phantom directory");
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "output directory");
  };
  auto add_dmd = [&](CLI::App* sub) {
    sub->add_option("--svd-tol", cfg.svd_tol, "relative singular value cutoff")->check(CLI::Range(0.0, 1.0));
  };
  auto add_segment = [&](CLI::App* sub) {
    sub->add_option("--mode-index", cfg.mode_index, "1-based mode to delineate")->check(CLI::PositiveNumber);
    sub->add_option("--restriction", cfg.restriction, "blob region")
        ->check(CLI::IsMember({"left", "right", "full"}));
  };
  auto add_eval = [&](CLI::App* sub) {
    sub->add_option("--truth", cfg.truth, "reference curve CSV");
    sub->add_option("--truth-column", cfg.truth_column, "column of the truth CSV (default: second)");
    sub->add_option("--reference-mask", cfg.reference_mask, "mask PGM for the bounding-box baseline");
  };

  auto* phantom = app.add_subcommand("phantom", "generate a synthetic ground-truthed sequence");
  add_out(phantom);
  phantom->add_option("--spec", cfg.spec_file, "key=value phantom spec file");
  phantom->add_option("--seed", cfg.seed, "noise seed");
  phantom->add_option("--frames", cfg.frames, "frame count");
  phantom->add_option("--psf-variance", cfg.psf_variance, "Gaussian PSF variance (px^2)");
  phantom->add_option("--psf-size", cfg.psf_size, "PSF kernel side (px)");
  phantom->add_option("--noise-sigma", cfg.noise_sigma, "background noise standard deviation");
  phantom->add_option("--height", cfg.height, "image height (px)");
  phantom->add_option("--width", cfg.width, "image width (px)");

  auto* dmd = app.add_subcommand("dmd", "decompose a sequence into ordered dynamic modes");
  add_input(dmd);
  add_out(dmd);
  add_dmd(dmd);
  dmd->add_option("--top-k", cfg.top_k, "number of mode images to export");

  auto* segment = app.add_subcommand("segment", "delineate an ROI template from one mode");
  add_input(segment);
  add_out(segment);
  add_dmd(segment);
  add_segment(segment);

  auto* quantify = app.add_subcommand("quantify", "time-intensity curve of an ROI mask");
  add_input(quantify);
  add_out(quantify);
  quantify->add_option("--mask", cfg.mask, "ROI mask PGM");
  add_eval(quantify);

  auto* pipeline = app.add_subcommand("pipeline", "decompose, delineate and quantify");
  add_input(pipeline);
  add_out(pipeline);
  add_dmd(pipeline);
  add_segment(pipeline);
  add_eval(pipeline);
  pipeline->add_option("--top-k", cfg.top_k, "number of mode images to export");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*phantom) return cmd_phantom(cfg);
    if (*dmd) return cmd_dmd(cfg);
    if (*segment) return cmd_segment(cfg);
    if (*quantify) return cmd_quantify(cfg);
    if (*pipeline) return cmd_pipeline(cfg);
  } catch (const Error& e) {
    std::cerr << "dmdroi: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "dmdroi: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}

}  // namespace dmdroi::cli
