#include <doctest.h>

#include <random>

#include "metrics.hpp"
#include "test_support.hpp"

using namespace uqrpca;

namespace {

Frame gray_frame(Index rows, Index cols, double level) {
  Frame f = Frame::zero(rows, cols);
  f.r.setConstant(level);
  f.g.setConstant(level);
  f.b.setConstant(level);
  return f;
}

Frame random_frame(Index rows, Index cols, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Frame f = Frame::zero(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) {
      f.r(i, j) = uni(rng);
      f.g(i, j) = uni(rng);
      f.b(i, j) = uni(rng);
    }
  return f;
}

// Reference single-scale SSIM on gray images, global statistics.
double ssim_reference(const Frame& a, const Frame& b) {
  const RealMatrix x = to_gray(a) * 255.0, y = to_gray(b) * 255.0;
  const double mx = x.mean(), my = y.mean();
  const double n = static_cast<double>(x.size());
  const double vx = (x.array() - mx).square().sum() / n;
  const double vy = (y.array() - my).square().sum() / n;
  const double cxy = ((x.array() - mx) * (y.array() - my)).sum() / n;
  const double c1 = 6.5025, c2 = 58.5225;
  return ((2 * mx * my + c1) * (2 * cxy + c2)) /
         ((mx * mx + my * my + c1) * (vx + vy + c2));
}

}  // namespace

TEST_SUITE_BEGIN("metrics");

TEST_CASE("age: identical, offset, hand mean") {
  std::mt19937_64 rng(601);
  const Frame a = random_frame(8, 8, rng);
  CHECK(age(a, a) == 0.0);

  Frame b = a;
  b.r.array() += 5.0 / 255.0;
  b.g.array() += 5.0 / 255.0;
  b.b.array() += 5.0 / 255.0;
  CHECK(age(a, b) == doctest::Approx(5.0).epsilon(1e-10));

  Frame p = gray_frame(1, 2, 0.0), q = gray_frame(1, 2, 0.0);
  q.r(0, 1) = q.g(0, 1) = q.b(0, 1) = 20.0 / 255.0;
  CHECK(age(p, q) == doctest::Approx(10.0).epsilon(1e-10));

  CHECK_THROWS_AS(age(a, gray_frame(3, 3, 0.0)), ShapeError);
}

TEST_CASE("peps_pceps: identical, isolated pixel, fully wrong") {
  const Frame zero = gray_frame(10, 10, 0.0);
  const auto [p0, c0] = peps_pceps(zero, zero);
  CHECK(p0 == 0.0);
  CHECK(c0 == 0.0);

  Frame one = zero;
  one.r(4, 4) = one.g(4, 4) = one.b(4, 4) = 200.0 / 255.0;
  const auto [p1, c1] = peps_pceps(one, zero);
  CHECK(p1 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c1 == 0.0);  // isolated error pixel has non-error neighbors

  const Frame white = gray_frame(10, 10, 1.0);
  const auto [p2, c2] = peps_pceps(white, zero);
  CHECK(p2 == 100.0);
  CHECK(c2 == 100.0);

  // pCEPs <= pEPs on random pairs.
  std::mt19937_64 rng(607);
  for (int rep = 0; rep < 10; ++rep) {
    const auto [pe, ce] = peps_pceps(random_frame(12, 9, rng), random_frame(12, 9, rng));
    CHECK(ce <= pe);
  }
}

TEST_CASE("psnr: cap, zero, known MSE") {
  const Frame a = gray_frame(4, 4, 0.3);
  CHECK(psnr(a, a) == 99.0);

  const Frame black = gray_frame(4, 4, 0.0);
  const Frame white = gray_frame(4, 4, 1.0);
  CHECK(psnr(black, white) == doctest::Approx(0.0).epsilon(1e-6));

  // MSE = 1 on the 0..255 gray scale -> 10*log10(65025) = 48.1308 dB.
  Frame b = a;
  b.r.array() += 1.0 / 255.0;
  b.g.array() += 1.0 / 255.0;
  b.b.array() += 1.0 / 255.0;
  CHECK(psnr(a, b) == doctest::Approx(10.0 * std::log10(65025.0)).epsilon(1e-6));
}

TEST_CASE("ms_ssim: identity, negative image, small noise") {
  std::mt19937_64 rng(613);
  Frame big = Frame::zero(200, 200);
  for (Index i = 0; i < 200; ++i)
    for (Index j = 0; j < 200; ++j) {
      const double v = 0.25 + 0.5 * ((i + 2 * j) % 97) / 96.0;
      big.r(i, j) = v;
      big.g(i, j) = v * 0.8;
      big.b(i, j) = 1.0 - v * 0.5;
    }
  CHECK(ms_ssim(big, big) == doctest::Approx(1.0).epsilon(1e-9));

  Frame neg = big;
  neg.r = RealMatrix::Constant(200, 200, 1.0) - big.r;
  neg.g = RealMatrix::Constant(200, 200, 1.0) - big.g;
  neg.b = RealMatrix::Constant(200, 200, 1.0) - big.b;
  CHECK(ms_ssim(big, neg) < 0.5);
  CHECK(ssim_reference(big, neg) < 0.5);  // sanity: single-scale agrees on direction

  std::normal_distribution<double> gauss(0.0, 1.0 / 255.0);
  Frame noisy = big;
  for (Index i = 0; i < 200; ++i)
    for (Index j = 0; j < 200; ++j) {
      noisy.r(i, j) += gauss(rng);
      noisy.g(i, j) += gauss(rng);
      noisy.b(i, j) += gauss(rng);
    }
  CHECK(ms_ssim(big, noisy) >= 0.98);

  // Reduced scales below 176 pixels; hard error below one window.
  CHECK_NOTHROW(ms_ssim(gray_frame(64, 64, 0.5), gray_frame(64, 64, 0.5)));
  CHECK_THROWS_AS(ms_ssim(gray_frame(8, 8, 0.5), gray_frame(8, 8, 0.5)), ShapeError);
}

TEST_CASE("cqm: cap propagation, chroma-only error, luma-only error") {
  std::mt19937_64 rng(617);
  const Frame a = random_frame(16, 16, rng);
  CHECK(cqm(a, a) == doctest::Approx(99.0).epsilon(1e-12));

  // Chroma-differing, gray-identical pair: swap R and B weighted so Y stays
  // fixed but U/V move.
  Frame chroma = a;
  // Y = .299R + .587G + .114B: adding delta*(0.114, 0, -0.299) keeps Y.
  const double delta = 0.2;
  chroma.r.array() += delta * 0.114;
  chroma.b.array() -= delta * 0.299;
  const double cq = cqm(a, chroma);
  CHECK(psnr(a, chroma) == 99.0);  // gray-identical
  CHECK(cq < 99.0);

  // Pure-luma error: equal offset on all channels keeps U/V (coefficients sum
  // to ~0) so the chroma PSNRs stay capped.
  Frame luma = a;
  luma.r.array() += 8.0 / 255.0;
  luma.g.array() += 8.0 / 255.0;
  luma.b.array() += 8.0 / 255.0;
  const double want = 0.9449 * psnr(a, luma) + 0.0551 * 99.0;
  CHECK(cqm(a, luma) == doctest::Approx(want).epsilon(1e-6));
}

TEST_CASE("detection_prf: identity, empty prediction, hand count") {
  GrayImage gt(2, 2), pred(2, 2);
  gt << 255, 255, 0, 0;
  pred << 255, 0, 255, 0;
  const PrfResult r = detection_prf({pred}, {gt});
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.precision == doctest::Approx(0.5));
  CHECK(r.f_measure == doctest::Approx(0.5));

  const PrfResult perfect = detection_prf({gt}, {gt});
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.f_measure == 1.0);

  const GrayImage empty = GrayImage::Zero(2, 2);
  const PrfResult none = detection_prf({empty}, {gt});
  CHECK(none.recall == 0.0);
  CHECK(none.precision == 0.0);
  CHECK(none.f_measure == 0.0);

  // Non-ROI label 85 is excluded from the counts.
  GrayImage gt_roi(2, 2);
  gt_roi << 255, 85, 85, 0;
  GrayImage pred_roi(2, 2);
  pred_roi << 255, 255, 255, 0;
  const PrfResult roi = detection_prf({pred_roi}, {gt_roi});
  CHECK(roi.recall == 1.0);
  CHECK(roi.precision == 1.0);
}

TEST_CASE("symmetry and swap identities") {
  std::mt19937_64 rng(619);
  const Frame a = random_frame(24, 24, rng), b = random_frame(24, 24, rng);
  CHECK(age(a, b) == age(b, a));
  CHECK(psnr(a, b) == psnr(b, a));
  const auto [pa, ca] = peps_pceps(a, b);
  const auto [pb, cb] = peps_pceps(b, a);
  CHECK(pa == pb);
  CHECK(ca == cb);
  CHECK(ms_ssim(a, b) == doctest::Approx(ms_ssim(b, a)).epsilon(1e-12));
  CHECK(cqm(a, b) == doctest::Approx(cqm(b, a)).epsilon(1e-12));

  // R(a,b) = P(b,a) under prediction/truth exchange.
  GrayImage x = GrayImage::Zero(6, 6), y = GrayImage::Zero(6, 6);
  std::uniform_int_distribution<int> bit(0, 1);
  for (Index i = 0; i < 6; ++i)
    for (Index j = 0; j < 6; ++j) {
      x(i, j) = bit(rng) ? 255 : 0;
      y(i, j) = bit(rng) ? 255 : 0;
    }
  const PrfResult fwd = detection_prf({x}, {y});
  const PrfResult rev = detection_prf({y}, {x});
  CHECK(fwd.recall == doctest::Approx(rev.precision));
  CHECK(fwd.precision == doctest::Approx(rev.recall));
}

TEST_CASE("f-measure is the harmonic mean within min/max bounds") {
  std::mt19937_64 rng(631);
  std::uniform_int_distribution<int> bit(0, 1);
  for (int rep = 0; rep < 20; ++rep) {
    GrayImage x(8, 8), y(8, 8);
    for (Index i = 0; i < 8; ++i)
      for (Index j = 0; j < 8; ++j) {
        x(i, j) = bit(rng) ? 255 : 0;
        y(i, j) = bit(rng) ? 255 : 0;
      }
    const PrfResult r = detection_prf({x}, {y});
    if (r.precision > 0.0 && r.recall > 0.0) {
      const double harmonic = 2.0 * r.precision * r.recall / (r.precision + r.recall);
      CHECK(r.f_measure == doctest::Approx(harmonic).epsilon(1e-12));
      const double lo = std::min(r.precision, r.recall);
      const double hi = std::max(r.precision, r.recall);
      CHECK(r.f_measure <= 2.0 * lo / (1.0 + lo / hi) + 1e-12);
    }
  }
}

TEST_CASE("reports: aggregation conventions, csv shape, json keys") {
  std::mt19937_64 rng(641);
  VideoTensor pred, gt;
  pred.m = gt.m = 16;
  pred.n = gt.n = 16;
  for (int l = 0; l < 3; ++l) {
    pred.frames.push_back(random_frame(16, 16, rng));
    gt.frames.push_back(random_frame(16, 16, rng));
  }
  const MetricsReport bg = evaluate_background(pred, gt);
  CHECK(bg.frames.size() == 3);
  // Frame-mean aggregation for background metrics.
  double mean_age = 0.0;
  for (const auto& row : bg.frames) mean_age += row["age"].get<double>();
  mean_age /= 3.0;
  CHECK(bg.aggregate["age"].get<double>() == doctest::Approx(mean_age).epsilon(1e-12));

  const std::string csv = bg.to_csv();
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 3 frames + aggregate
  CHECK(csv.rfind("frame,age,peps,pceps,psnr,msssim,cqm", 0) == 0);

  // Detection: pixel-aggregated by default, frame-averaged behind the flag.
  MaskSequence mp, mg;
  GrayImage m1 = GrayImage::Zero(4, 4), m2 = GrayImage::Zero(4, 4);
  m1(0, 0) = 255;
  m2(0, 0) = 255;
  m2(1, 1) = 255;
  mp = {m1, m1};
  mg = {m1, m2};
  const MetricsReport det = evaluate_detection(mp, mg, false);
  // Aggregate over pixels: TP=2, FN=1 -> R = 2/3.
  CHECK(det.aggregate["recall"].get<double>() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const MetricsReport det_frames = evaluate_detection(mp, mg, true);
  // Frame means: R = (1 + 0.5)/2.
  CHECK(det_frames.aggregate["recall"].get<double>() == doctest::Approx(0.75).epsilon(1e-12));

  VideoTensor short_gt = gt;
  short_gt.frames.pop_back();
  CHECK_THROWS_AS(evaluate_background(pred, short_gt), ShapeError);
}

TEST_SUITE_END();
