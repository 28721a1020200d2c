#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "dmdroi/csv.hpp"
#include "dmdroi/phantom.hpp"
#include "dmdroi/stack_io.hpp"
#include "manifest.hpp"

using namespace dmdroi;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("dmdroi_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& child) const { return (path / child).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> manifest(const fs::path& dir) {
  std::map<std::string, std::string> out;
  std::istringstream in(slurp(dir / "run.manifest"));
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

bool has_staging(const fs::path& dir) {
  if (!fs::exists(dir)) return false;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().rfind(".staging-", 0) == 0) return true;
  return false;
}

// A small phantom that keeps the CLI tests fast.
void write_small_spec(const std::string& path) {
  PhantomSpec s;
  s.height = 40;
  s.width = 40;
  s.frame_count = 16;
  s.kidney = Ellipse{20.0, 14.0, 10.0, 6.0};
  s.liver = Rect{8, 24, 24, 8};
  s.psf_size = 7;
  s.psf_variance = 3.0;
  std::ofstream(path) << s.to_text();
}

int run(std::vector<std::string> args) { return cli::run(args); }

}  // namespace

TEST_CASE("sha256 matches the standard test vector") {
  CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("usage errors exit with 2") {
  TempDir tmp("usage");
  CHECK(run({}) == 2);
  CHECK(run({"frobnicate"}) == 2);
  CHECK(run({"dmd", "--bogus"}) == 2);
  CHECK(run({"dmd", "--out", tmp / "o"}) == 2);
  CHECK(run({"phantom"}) == 2);
  CHECK(run({"phantom", "--out", tmp / "p", "--psf-size", "200", "--height", "40", "--width", "40"}) == 2);
  CHECK(run({"phantom", "--out", tmp / "p", "--frames", "abc"}) == 2);
  CHECK(run({"segment", "--input", tmp / "x", "--out", tmp / "o", "--restriction", "diagonal"}) == 2);
  CHECK(run({"segment", "--input", tmp / "x", "--out", tmp / "o", "--mode-index", "0"}) == 2);
  CHECK(run({"dmd", "--input", tmp / "x", "--out", tmp / "o", "--svd-tol", "2"}) == 2);
  CHECK(run({"--version"}) == 0);
}

TEST_CASE("IO and format errors exit with 3") {
  TempDir tmp("io");
  CHECK(run({"dmd", "--input", tmp / "missing.dmdstack", "--out", tmp / "o"}) == 3);
  std::ofstream(tmp / "bad.dmdstack") << "NOTASTACK";
  CHECK(run({"dmd", "--input", tmp / "bad.dmdstack", "--out", tmp / "o"}) == 3);
  CHECK(run({"phantom", "--out", tmp / "p", "--spec", tmp / "nope.spec"}) == 3);
  CHECK_FALSE(fs::exists(tmp.path / "o" / "run.manifest"));
}

TEST_CASE("empty results exit with 4") {
  TempDir tmp("empty");
  save_stack(ImageStack(6, 6, 5, 1.0, std::vector<double>(180, 0.5)), tmp / "flat.dmdstack");
  CHECK(run({"segment", "--input", tmp / "flat.dmdstack", "--out", tmp / "o", "--mode-index", "1"}) == 4);
  // A constant stack has one mode, so the default mode 2 does not exist.
  CHECK(run({"segment", "--input", tmp / "flat.dmdstack", "--out", tmp / "o"}) == 2);
  write_mask_pgm(BinaryMask(6, 6, false), tmp / "empty.pgm");
  CHECK(run({"quantify", "--input", tmp / "flat.dmdstack", "--out", tmp / "o", "--mask", tmp / "empty.pgm"}) == 4);
  CHECK_FALSE(has_staging(tmp.path / "o"));
  CHECK_FALSE(fs::exists(tmp.path / "o" / "run.manifest"));
}

TEST_CASE("subcommands produce artifacts and manifests") {
  TempDir tmp("flow");
  write_small_spec(tmp / "small.spec");
  const std::string ph = tmp / "ph";
  REQUIRE(run({"phantom", "--out", ph, "--spec", tmp / "small.spec", "--seed", "7"}) == 0);
  for (const char* f : {"stack.dmdstack", "clean.dmdstack", "mask_kidney.pgm", "mask_liver.pgm",
                        "mask_background.pgm", "truth.csv", "phantom.spec", "run.manifest"})
    CHECK(fs::is_regular_file(fs::path(ph) / f));
  CHECK_FALSE(has_staging(ph));
  auto m = manifest(ph);
  CHECK(m["command"] == "phantom");
  CHECK(m["spec.seed"] == "7");
  CHECK(m["spec.frame_count"] == "16");
  CHECK(m.count("artifact.truth.csv.sha256") == 1);
  CHECK(m["artifact.truth.csv.sha256"] == cli::sha256_hex(slurp(fs::path(ph) / "truth.csv")));
  CHECK(load_stack(fs::path(ph) / "stack.dmdstack").frame_count() == 16);

  SUBCASE("dmd") {
    const std::string out = tmp / "dmd";
    REQUIRE(run({"dmd", "--input", ph, "--out", out, "--top-k", "3"}) == 0);
    CHECK(fs::is_regular_file(fs::path(out) / "eigenvalues.csv"));
    CHECK(fs::is_regular_file(fs::path(out) / "mode_003.pgm"));
    CHECK_FALSE(fs::exists(fs::path(out) / "mode_004.pgm"));
    m = manifest(out);
    CHECK(m["command"] == "dmd");
    CHECK(m["modes_before_dedup"] == "15");
    CHECK(m["input.sha256"] == cli::sha256_hex(slurp(fs::path(ph) / "stack.dmdstack")));
    CHECK(slurp(fs::path(out) / "eigenvalues.csv").rfind("# modes_before_dedup=15", 0) == 0);
  }
  SUBCASE("segment and quantify") {
    const std::string seg = tmp / "seg";
    REQUIRE(run({"segment", "--input", ph, "--out", seg, "--mode-index", "1", "--restriction", "full"}) == 0);
    for (const char* f : {"magnitude.pgm", "binary.pgm", "template.pgm"}) CHECK(fs::is_regular_file(fs::path(seg) / f));
    CHECK(manifest(seg)["restriction"] == "full");

    const std::string q = tmp / "q";
    REQUIRE(run({"quantify", "--input", ph, "--out", q, "--mask", (fs::path(ph) / "mask_kidney.pgm").string(),
                 "--truth", (fs::path(ph) / "truth.csv").string(), "--truth-column", "kidney", "--reference-mask",
                 (fs::path(ph) / "mask_kidney.pgm").string()}) == 0);
    const TimeIntensityCurve c = read_curve_csv(fs::path(q) / "curve.csv");
    CHECK(c.size() == 16);
    CHECK(fs::is_regular_file(fs::path(q) / "report.csv"));
    CHECK(fs::is_regular_file(fs::path(q) / "baseline_curve.csv"));
    // Evaluation needs both references.
    CHECK(run({"quantify", "--input", ph, "--out", q, "--mask", (fs::path(ph) / "mask_kidney.pgm").string(),
               "--truth", (fs::path(ph) / "truth.csv").string()}) == 2);
  }
  SUBCASE("pipeline is deterministic") {
    const std::string a = tmp / "a";
    const std::string b = tmp / "b";
    REQUIRE(run({"pipeline", "--input", ph, "--out", a, "--mode-index", "1", "--restriction", "full"}) == 0);
    REQUIRE(run({"pipeline", "--input", ph, "--out", b, "--mode-index", "1", "--restriction", "full"}) == 0);
    CHECK(fs::is_regular_file(fs::path(a) / "report.csv"));
    CHECK(manifest(a) == manifest(b));
    for (const auto& e : fs::directory_iterator(a)) {
      CHECK(slurp(e.path()) == slurp(fs::path(b) / e.path().filename()));
    }
    CHECK(manifest(a)["mode_index"] == "1");
    CHECK(manifest(a).count("rmse_framework") == 1);
  }
}

TEST_CASE("PGM frame directories are accepted as input") {
  TempDir tmp("pgmdir");
  const fs::path frames = tmp.path / "frames";
  fs::create_directories(frames);
  for (int t = 0; t < 4; ++t) {
    std::vector<double> px(25);
    for (int i = 0; i < 25; ++i) px[i] = ((i * 7 + t * 3) % 11) / 10.0;
    export_frame_image(Frame(5, 5, px), frames / ("f" + std::to_string(t) + ".pgm"), false);
  }
  CHECK(run({"dmd", "--input", frames.string(), "--out", tmp / "o"}) == 0);
  CHECK(manifest(tmp.path / "o")["modes_before_dedup"] != "0");
}
