#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "video.hpp"

namespace uqrpca {

/// Gray-level error pixel threshold shared by pEPs/pCEPs.
constexpr double kDefaultErrorTau = 20.0;

/// Mean absolute BT.601 gray difference on the 0..255 scale.
double age(const Frame& pred, const Frame& gt);

/// pEPs: percentage of pixels whose gray difference exceeds tau.
/// pCEPs: percentage of error pixels whose in-bounds 4-neighbors are all
/// error pixels.
std::pair<double, double> peps_pceps(const Frame& pred, const Frame& gt,
                                     double tau = kDefaultErrorTau);

/// 10*log10(255^2 / MSE) over gray pixels, capped at 99 dB.
double psnr(const Frame& pred, const Frame& gt);

/// Multi-scale SSIM on gray images: Gaussian window 11, sigma 1.5, exponents
/// (0.0448, 0.2856, 0.3001, 0.2363, 0.1333), C1=(0.01*255)^2, C2=(0.03*255)^2.
/// Images smaller than 11*2^4 on a side use the largest feasible scale count
/// with the leading exponents renormalized to sum 1; per-scale terms are
/// clamped at 0 so the result stays in [0,1].
double ms_ssim(const Frame& pred, const Frame& gt);

/// YUV (BT.601) weighted PSNR composite: PSNR_Y * 0.9449 +
/// (PSNR_U + PSNR_V)/2 * 0.0551, channel PSNRs capped at 99 dB.
double cqm(const Frame& pred, const Frame& gt);

struct DetectionCounts {
  long long tp = 0, fp = 0, fn = 0;
};

struct PrfResult {
  double recall = 0.0, precision = 0.0, f_measure = 0.0;
};

/// Pixel-aggregated recall/precision/F over all frames. Ground-truth values
/// other than 0 and 255 (CDNet non-ROI/unknown labels) are excluded from the
/// counts. Zero denominators yield 0.
PrfResult detection_prf(const MaskSequence& pred, const MaskSequence& gt);

/// Per-frame metric table plus the aggregate row. Background metrics average
/// per frame; detection aggregates pixel counts unless frame_average is set.
struct MetricsReport {
  std::string task;  // "background" or "detection"
  std::vector<nlohmann::json> frames;
  nlohmann::json aggregate;

  nlohmann::json to_json() const;
  std::string to_csv() const;
  std::string aggregate_line() const;
};

MetricsReport evaluate_background(const VideoTensor& pred, const VideoTensor& gt,
                                  double tau = kDefaultErrorTau);
MetricsReport evaluate_detection(const MaskSequence& pred, const MaskSequence& gt,
                                 bool frame_average = false);

}  // namespace uqrpca
