#include <doctest.h>

#include <random>

#include "dmdroi/error.hpp"
#include "dmdroi/segmentation.hpp"
#include "oracles.hpp"

using namespace dmdroi;
using cd = std::complex<double>;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

MagnitudeImage image(int h, int w, std::vector<double> v) { return MagnitudeImage{h, w, std::move(v)}; }

BinaryMask mask_from(const std::vector<std::string>& rows) {
  BinaryMask m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()), false);
  for (int r = 0; r < m.height(); ++r)
    for (int c = 0; c < m.width(); ++c) m.set(r, c, rows[r][c] == '#');
  return m;
}

DmdResult single_mode(const std::vector<cd>& mode) {
  DmdResult r;
  const auto n = static_cast<Eigen::Index>(mode.size());
  r.modes = Eigen::Map<const Eigen::VectorXcd>(mode.data(), n);
  r.eigenvalues = Eigen::VectorXcd::Ones(1);
  r.phase_angles = Eigen::VectorXd::Zero(1);
  r.order = {0};
  r.retained_from = 1;
  return r;
}

std::set<std::set<std::pair<int, int>>> as_sets(const std::vector<Blob>& blobs) {
  std::set<std::set<std::pair<int, int>>> out;
  for (const Blob& b : blobs) {
    std::set<std::pair<int, int>> s;
    for (const Pixel& p : b.pixels) s.insert({p.row, p.col});
    out.insert(std::move(s));
  }
  return out;
}

}  // namespace

TEST_CASE("parse_restriction") {
  CHECK(parse_restriction("left") == Restriction::LeftHalf);
  CHECK(parse_restriction("left-half") == Restriction::LeftHalf);
  CHECK(parse_restriction("right") == Restriction::RightHalf);
  CHECK(parse_restriction("full") == Restriction::Full);
  CHECK(code_of([] { parse_restriction("top"); }) == ErrorCode::InvalidArgument);
  CHECK(to_string(Restriction::RightHalf) == "right");
}

TEST_CASE("mode_to_magnitude normalizes the modulus to [0, 1]") {
  const DmdResult r = single_mode({cd(0, 0), cd(3, 4), cd(0, 10), cd(-2.5, 0)});
  const MagnitudeImage m = mode_to_magnitude(r, 1, 2, 2);
  CHECK(m.values == std::vector<double>{0.0, 0.5, 1.0, 0.25});
  CHECK(m.at(1, 0) == 1.0);

  const MagnitudeImage flat = mode_to_magnitude(single_mode({cd(2), cd(0, 2)}), 1, 1, 2);
  CHECK(flat.values == std::vector<double>{0.0, 0.0});

  CHECK(code_of([&] { mode_to_magnitude(r, 0, 2, 2); }) == ErrorCode::BadModeIndex);
  CHECK(code_of([&] { mode_to_magnitude(r, 2, 2, 2); }) == ErrorCode::BadModeIndex);
  CHECK(code_of([&] { mode_to_magnitude(r, 1, 3, 2); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("otsu_threshold examples") {
  SUBCASE("two clusters split between them") {
    const MagnitudeImage img = image(1, 6, {0.0, 0.05, 0.1, 0.9, 0.95, 1.0});
    const double t = otsu_threshold(img);
    CHECK(t >= 0.1);
    CHECK(t < 0.9);
    const BinaryMask b = binarize(img, t);
    CHECK(b.count() == 3);
    CHECK(b.at(0, 3));
    CHECK_FALSE(b.at(0, 2));
  }
  SUBCASE("binary image") {
    const MagnitudeImage img = image(1, 4, {0.0, 0.0, 1.0, 1.0});
    const double t = otsu_threshold(img);
    CHECK(binarize(img, t).count() == 2);
    CHECK(t == oracle::exhaustive_otsu(img.values, kDefaultHistogramBins));
  }
  SUBCASE("all pixels in one bin") {
    CHECK(code_of([] { otsu_threshold(image(1, 3, {0.5, 0.5, 0.5})); }) == ErrorCode::DegenerateInput);
    CHECK(code_of([] { otsu_threshold(image(1, 2, {0.0, 0.0})); }) == ErrorCode::DegenerateInput);
  }
  SUBCASE("bin convention") {
    CHECK(histogram_bin(0.0, 256) == 0);
    CHECK(histogram_bin(1.0 / 256, 256) == 0);
    CHECK(histogram_bin(1.0, 256) == 255);
    CHECK(histogram_bin(0.5, 4) == 1);
    CHECK(histogram_bin(0.51, 4) == 2);
  }
  SUBCASE("too few bins") {
    CHECK(code_of([] { otsu_threshold(image(1, 2, {0.0, 1.0}), 1); }) == ErrorCode::InvalidArgument);
  }
}

TEST_CASE("otsu_threshold matches the exhaustive oracle on random histograms") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const int bins = trial % 4 == 0 ? 16 : kDefaultHistogramBins;
    std::uniform_int_distribution<int> level(0, bins - 1);
    std::uniform_int_distribution<int> count(2, 300);
    std::vector<double> values(static_cast<std::size_t>(count(rng)));
    for (double& v : values) v = (level(rng) + 0.5) / bins;
    values[0] = 0.0;
    values[1] = 1.0;
    const MagnitudeImage img = image(1, static_cast<int>(values.size()), values);
    CHECK(otsu_threshold(img, bins) == oracle::exhaustive_otsu(values, bins));
  }
}

TEST_CASE("binarize uses a strict comparison") {
  const BinaryMask b = binarize(image(1, 3, {0.2, 0.5, 0.7}), 0.5);
  CHECK_FALSE(b.at(0, 0));
  CHECK_FALSE(b.at(0, 1));
  CHECK(b.at(0, 2));
  CHECK(code_of([] { binarize(image(1, 1, {0.0}), NAN); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("label_components examples") {
  SUBCASE("diagonal neighbours connect") {
    const auto blobs = label_components(mask_from({"#..", ".#.", "..#"}));
    REQUIRE(blobs.size() == 1);
    CHECK(blobs[0].area() == 3);
  }
  SUBCASE("separate blobs sorted by area then position") {
    const auto blobs = label_components(mask_from({"#...#", "....#", "##..#"}));
    REQUIRE(blobs.size() == 3);
    CHECK(blobs[0].area() == 3);
    CHECK(blobs[0].bbox.min_col == 4);
    CHECK(blobs[1].area() == 2);
    CHECK(blobs[1].bbox.min_row == 2);
    CHECK(blobs[2].area() == 1);
    CHECK(blobs[0].centroid_row == doctest::Approx(1.0));
    CHECK(blobs[0].centroid_col == doctest::Approx(4.0));
  }
  SUBCASE("equal areas ordered by min_row then min_col") {
    const auto blobs = label_components(mask_from({"..#", "...", "#.#"}));
    REQUIRE(blobs.size() == 3);
    CHECK(blobs[0].bbox.min_row == 0);
    CHECK(blobs[1].bbox.min_col == 0);
    CHECK(blobs[2].bbox.min_col == 2);
  }
  SUBCASE("empty mask") { CHECK(label_components(BinaryMask(4, 4, false)).empty()); }
  SUBCASE("full mask") {
    const auto blobs = label_components(BinaryMask(5, 7, true));
    REQUIRE(blobs.size() == 1);
    CHECK(blobs[0].area() == 35);
  }
}

TEST_CASE("label_components matches flood fill on random masks") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::bernoulli_distribution on(0.2 + 0.005 * trial);
    BinaryMask m(16, 16, false);
    for (int r = 0; r < 16; ++r)
      for (int c = 0; c < 16; ++c) m.set(r, c, on(rng));
    const auto blobs = label_components(m);
    CHECK(as_sets(blobs) == oracle::flood_fill_components(m));
    std::size_t total = 0;
    for (std::size_t i = 0; i < blobs.size(); ++i) {
      total += blobs[i].area();
      if (i > 0) CHECK(blobs[i].area() <= blobs[i - 1].area());
    }
    CHECK(total == m.count());
  }
}

TEST_CASE("select_template honours the restriction") {
  const BinaryMask m = mask_from({"##....", "##...#", "##...#"});
  const auto blobs = label_components(m);
  const BinaryMask left = select_template(blobs, Restriction::LeftHalf, 3, 6);
  CHECK(left.count() == 6);
  CHECK(left.at(0, 0));
  const BinaryMask right = select_template(blobs, Restriction::RightHalf, 3, 6);
  CHECK(right.count() == 2);
  CHECK(right.at(1, 5));
  CHECK(select_template(blobs, Restriction::Full, 3, 6).count() == 6);

  const auto only_right = label_components(mask_from({"....##"}));
  CHECK(code_of([&] { select_template(only_right, Restriction::LeftHalf, 1, 6); }) == ErrorCode::NoBlobFound);
  CHECK(code_of([] { select_template({}, Restriction::Full, 1, 6); }) == ErrorCode::NoBlobFound);
}

TEST_CASE("the template is a single connected blob inside the restricted half") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<cd> mode(20 * 20);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (auto& z : mode) z = cd(u(rng), u(rng));
    const DmdResult r = single_mode(mode);
    for (Restriction restriction : {Restriction::LeftHalf, Restriction::RightHalf, Restriction::Full}) {
      BinaryMask roi(20, 20, false);
      try {
        roi = delineate(r, 1, 20, 20, restriction);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NoBlobFound);
        continue;
      }
      const auto comps = label_components(roi);
      REQUIRE(comps.size() == 1);
      if (restriction == Restriction::LeftHalf) CHECK(comps[0].centroid_col < 10.0);
      if (restriction == Restriction::RightHalf) CHECK(comps[0].centroid_col >= 10.0);
    }
  }
}

TEST_CASE("delineate examples") {
  SUBCASE("bright left square") {
    std::vector<cd> mode(8 * 8, cd(0.05));
    for (int r = 2; r < 5; ++r)
      for (int c = 1; c < 3; ++c) mode[r * 8 + c] = cd(0, 1);
    const Delineation d = delineate_detailed(single_mode(mode), 1, 8, 8, Restriction::LeftHalf);
    CHECK(d.roi.count() == 6);
    CHECK(d.roi.at(2, 1));
    CHECK(d.blobs.size() == 1);
    CHECK(d.binary == d.roi);
  }
  SUBCASE("constant mode is degenerate") {
    const std::vector<cd> mode(16, cd(1.0));
    CHECK(code_of([&] { delineate(single_mode(mode), 1, 4, 4, Restriction::Full); }) ==
          ErrorCode::DegenerateInput);
  }
}
