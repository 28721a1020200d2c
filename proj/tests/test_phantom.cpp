#include <doctest.h>

#include <cmath>
#include <random>

#include "dmdroi/error.hpp"
#include "dmdroi/phantom.hpp"

using namespace dmdroi;

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

PhantomSpec small_spec() {
  PhantomSpec s;
  s.height = 48;
  s.width = 48;
  s.frame_count = 12;
  s.kidney = Ellipse{24.0, 30.0, 6.0, 4.0};
  s.liver = Rect{18, 20, 12, 6};
  s.psf_size = 5;
  s.psf_variance = 2.0;
  return s;
}

}  // namespace

TEST_CASE("kidney_curve examples") {
  // Oracle: with lambda = 15 the Poisson shape lambda^t e^-lambda / t! peaks
  // at t = 14 and t = 15 equally (ratio lambda / t = 1); the log term breaks
  // the tie towards t = 15.
  int argmax = 0;
  for (int t = 1; t < 100; ++t)
    if (kidney_curve(t, 100) > kidney_curve(argmax, 100)) argmax = t;
  CHECK(argmax == 15);
  CHECK(kidney_curve(0, 100) == doctest::Approx(0.7 * std::exp(std::lgamma(16.0)) /
                                                std::pow(15.0, 15.0))
                                    .epsilon(1e-9));
  CHECK(kidney_curve(99, 100) >= 0.3 * std::log(100.0) / std::log(100.0) - 1e-15);
  for (int t = 0; t < 100; ++t) {
    CHECK(kidney_curve(t, 100) >= 0.0);
    CHECK(kidney_curve(t, 100) <= 1.0 + 1e-12);
  }
}

TEST_CASE("liver_curve examples") {
  CHECK(liver_curve(40, 100) == doctest::Approx(0.5).epsilon(1e-15));
  // Oracle: 1 / (1 + exp(-59 / 8)).
  CHECK(liver_curve(99, 100) == doctest::Approx(0.99937).epsilon(1e-5));
  CHECK(liver_curve(0, 100) == doctest::Approx(1.0 / (1.0 + std::exp(5.0))));
  for (int t = 1; t < 100; ++t) CHECK(liver_curve(t, 100) > liver_curve(t - 1, 100));
}

TEST_CASE("background_value draws clamp to [0, 1]") {
  std::mt19937_64 rng(3);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double v = background_value(rng, 0.02);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    sum += v;
  }
  CHECK(sum / 20000 == doctest::Approx(0.1).epsilon(0.01));

  std::mt19937_64 wide(4);
  for (int i = 0; i < 1000; ++i) {
    const double v = background_value(wide, 5.0);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  CHECK(background_value(rng, 0.0) == 0.1);
}

TEST_CASE("gaussian_kernel is normalized, symmetric and centered") {
  const auto k = gaussian_kernel(22.0, 40);
  REQUIRE(k.rows() == 40);
  CHECK(k.sum() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-18);
  CHECK((k - k.colwise().reverse()).cwiseAbs().maxCoeff() <= 1e-18);
  // Even size: the four central samples share the maximum.
  CHECK(k(19, 19) == doctest::Approx(k.maxCoeff()));
  CHECK(k(20, 20) == doctest::Approx(k.maxCoeff()));

  const auto one = gaussian_kernel(1.0, 1);
  CHECK(one(0, 0) == 1.0);
  const auto three = gaussian_kernel(1.0, 3);
  CHECK(three(0, 0) / three(1, 1) == doctest::Approx(std::exp(-1.0)));

  CHECK(code_of([] { gaussian_kernel(0.0, 3); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { gaussian_kernel(1.0, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("convolve_psf examples") {
  SUBCASE("identity kernel") {
    Frame f(3, 4, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
    CHECK(convolve_psf(f, Eigen::MatrixXd::Ones(1, 1)) == f);
  }
  SUBCASE("constant frame is preserved") {
    const Frame f(10, 10, 0.25);
    const Frame out = convolve_psf(f, gaussian_kernel(4.0, 7));
    for (double v : out.pixels()) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
  }
  SUBCASE("box blur of an impulse with edge replication") {
    Frame f(3, 3, 0.0);
    f.at(1, 1) = 9.0;
    const Frame out = convolve_psf(f, Eigen::MatrixXd::Constant(3, 3, 1.0 / 9.0));
    for (double v : out.pixels()) CHECK(v == doctest::Approx(1.0));
  }
  SUBCASE("even-size kernel anchor") {
    // Anchor at (0, 0) for a 2x2 kernel: out(i, j) = mean of f(i..i+1, j..j+1).
    Frame f(2, 2, std::vector<double>{1, 2, 3, 4});
    const Frame out = convolve_psf(f, Eigen::MatrixXd::Constant(2, 2, 0.25));
    CHECK(out.at(0, 0) == doctest::Approx(2.5));
    CHECK(out.at(0, 1) == doctest::Approx(3.0));
    CHECK(out.at(1, 0) == doctest::Approx(3.5));
    CHECK(out.at(1, 1) == doctest::Approx(4.0));
  }
  SUBCASE("kernel larger than twice the frame") {
    CHECK(code_of([] { convolve_psf(Frame(3, 3, 0.0), gaussian_kernel(1.0, 7)); }) == ErrorCode::KernelTooLarge);
  }
}

TEST_CASE("convolution preserves mass away from the border") {
  // With noise off and structures at least half a kernel from the edge, the
  // replicated border is pure background, so total intensity is unchanged.
  PhantomSpec s = small_spec();
  s.noise_sigma = 0.0;
  const PhantomOutput p = generate_phantom(s);
  for (int t = 0; t < s.frame_count; ++t) {
    double a = 0.0, b = 0.0;
    for (double v : p.clean_stack.frame_pixels(t)) a += v;
    for (double v : p.stack.frame_pixels(t)) b += v;
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("region_masks partition the image") {
  const PhantomSpec s = small_spec();
  const RegionMasks m = region_masks(s);
  for (int r = 0; r < s.height; ++r)
    for (int c = 0; c < s.width; ++c) CHECK(int(m.kidney.at(r, c)) + m.liver.at(r, c) + m.background.at(r, c) == 1);
  CHECK(m.kidney.at(24, 30));
  CHECK(m.liver.at(18, 20));
  CHECK_FALSE(m.liver.at(30, 20));

  PhantomSpec overlap = s;
  overlap.liver = Rect{20, 26, 6, 6};
  CHECK(code_of([&] { region_masks(overlap); }) == ErrorCode::InvalidGeometry);

  PhantomSpec outside = s;
  outside.kidney.center_col = 46.0;
  CHECK(code_of([&] { region_masks(outside); }) == ErrorCode::InvalidGeometry);

  PhantomSpec default_spec;
  CHECK_NOTHROW(region_masks(default_spec));
}

TEST_CASE("generate_phantom structure") {
  const PhantomSpec s = small_spec();
  const PhantomOutput p = generate_phantom(s);
  CHECK(p.stack.height() == 48);
  CHECK(p.stack.frame_count() == 12);
  CHECK(p.kidney_truth.size() == 12);
  CHECK(p.kidney_truth.source == CurveSource::Truth);
  for (int t = 0; t < 12; ++t) {
    CHECK(p.kidney_truth.values[t] == kidney_curve(t, 12));
    CHECK(p.liver_truth.values[t] == liver_curve(t, 12));
    CHECK(p.background_truth.values[t] == 0.1);
    CHECK(p.clean_stack.frame(t).at(24, 30) == p.kidney_truth.values[t]);
    CHECK(p.clean_stack.frame(t).at(20, 22) == p.liver_truth.values[t]);
    for (double v : p.stack.frame_pixels(t)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  PhantomSpec other = s;
  other.seed = 2;
  CHECK(generate_phantom(s).stack == p.stack);
  CHECK_FALSE(generate_phantom(other).stack == p.stack);

  PhantomSpec tiny = s;
  tiny.psf_size = 120;
  CHECK(code_of([&] { generate_phantom(tiny); }) == ErrorCode::KernelTooLarge);

  PhantomSpec one_frame = s;
  one_frame.frame_count = 1;
  CHECK_THROWS_AS(generate_phantom(one_frame), Error);
}

TEST_CASE("PhantomSpec text round trip") {
  PhantomSpec s = small_spec();
  s.seed = 0xfeedfacecafebeefULL;
  s.noise_sigma = 0.0125;
  const PhantomSpec back = PhantomSpec::from_text(s.to_text());
  CHECK(back.to_text() == s.to_text());
  CHECK(back.seed == s.seed);
  CHECK(back.kidney.semi_cols == s.kidney.semi_cols);
  CHECK(back.liver.col0 == s.liver.col0);

  CHECK(PhantomSpec::from_text("seed=9\n").seed == 9);
  CHECK(PhantomSpec::from_text("seed=9\n").height == PhantomSpec{}.height);
  CHECK(code_of([] { PhantomSpec::from_text("colour=blue\n"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { PhantomSpec::from_text("seed=abc\n"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { PhantomSpec::from_text("no equals sign\n"); }) == ErrorCode::InvalidArgument);
}
