#include "metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace uqrpca {

namespace {

constexpr double kPsnrCap = 99.0;

void check_same_dims(const Frame& a, const Frame& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": image dimensions disagree");
  }
}

RealMatrix gray255(const Frame& f) { return to_gray(f) * 255.0; }

double capped_psnr_from_mse(double mse) {
  if (mse <= 0.0) return kPsnrCap;
  return std::min(10.0 * std::log10(255.0 * 255.0 / mse), kPsnrCap);
}

// Kahan-compensated mean; keeps frame aggregation order-independent in
// practice at double precision.
double compensated_mean(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

RealMatrix gaussian_kernel(int size, double sigma) {
  RealMatrix k(size, size);
  const double c = (size - 1) / 2.0;
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      const double d2 = (i - c) * (i - c) + (j - c) * (j - c);
      k(i, j) = std::exp(-d2 / (2.0 * sigma * sigma));
    }
  }
  return k / k.sum();
}

// Valid-region correlation with a square kernel.
RealMatrix conv_valid(const RealMatrix& img, const RealMatrix& kernel) {
  const Index kr = kernel.rows(), kc = kernel.cols();
  const Index orows = img.rows() - kr + 1, ocols = img.cols() - kc + 1;
  RealMatrix out(orows, ocols);
  for (Index i = 0; i < orows; ++i) {
    for (Index j = 0; j < ocols; ++j) {
      out(i, j) = img.block(i, j, kr, kc).cwiseProduct(kernel).sum();
    }
  }
  return out;
}

// 2x2 mean (symmetric padding on odd sizes) followed by factor-2 decimation.
RealMatrix downsample2(const RealMatrix& img) {
  const Index m = img.rows(), n = img.cols();
  RealMatrix out((m + 1) / 2, (n + 1) / 2);
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < out.cols(); ++j) {
      const Index i1 = std::min(2 * i + 1, m - 1), j1 = std::min(2 * j + 1, n - 1);
      out(i, j) = 0.25 * (img(2 * i, 2 * j) + img(i1, 2 * j) + img(2 * i, j1) + img(i1, j1));
    }
  }
  return out;
}

struct SsimTerms {
  double luminance;  // mean luminance comparison
  double cs;         // mean contrast-structure comparison
};

SsimTerms ssim_terms(const RealMatrix& x, const RealMatrix& y, const RealMatrix& window) {
  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  const RealMatrix mu_x = conv_valid(x, window);
  const RealMatrix mu_y = conv_valid(y, window);
  const RealMatrix xx = conv_valid(x.cwiseProduct(x), window);
  const RealMatrix yy = conv_valid(y.cwiseProduct(y), window);
  const RealMatrix xy = conv_valid(x.cwiseProduct(y), window);
  const RealMatrix sx = xx - mu_x.cwiseProduct(mu_x);
  const RealMatrix sy = yy - mu_y.cwiseProduct(mu_y);
  const RealMatrix sxy = xy - mu_x.cwiseProduct(mu_y);

  const auto lum = ((2.0 * mu_x.cwiseProduct(mu_y).array() + c1) /
                    (mu_x.array().square() + mu_y.array().square() + c1));
  const auto cs = ((2.0 * sxy.array() + c2) / (sx.array() + sy.array() + c2));
  return {lum.mean(), cs.mean()};
}

}  // namespace

double age(const Frame& pred, const Frame& gt) {
  check_same_dims(pred, gt, "age");
  return (gray255(pred) - gray255(gt)).cwiseAbs().mean();
}

std::pair<double, double> peps_pceps(const Frame& pred, const Frame& gt, double tau) {
  check_same_dims(pred, gt, "peps_pceps");
  const RealMatrix diff = (gray255(pred) - gray255(gt)).cwiseAbs();
  const Index m = diff.rows(), n = diff.cols();
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> err = diff.array() > tau;

  long long n_err = 0, n_clustered = 0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (!err(i, j)) continue;
      ++n_err;
      const bool clustered = (i == 0 || err(i - 1, j)) && (i == m - 1 || err(i + 1, j)) &&
                             (j == 0 || err(i, j - 1)) && (j == n - 1 || err(i, j + 1));
      if (clustered) ++n_clustered;
    }
  }
  const double total = static_cast<double>(m) * static_cast<double>(n);
  return {100.0 * n_err / total, 100.0 * n_clustered / total};
}

double psnr(const Frame& pred, const Frame& gt) {
  check_same_dims(pred, gt, "psnr");
  const double mse = (gray255(pred) - gray255(gt)).squaredNorm() /
                     (static_cast<double>(pred.rows()) * pred.cols());
  return capped_psnr_from_mse(mse);
}

double ms_ssim(const Frame& pred, const Frame& gt) {
  check_same_dims(pred, gt, "ms_ssim");
  constexpr int kWindow = 11;
  constexpr int kMaxScales = 5;
  static const double kExponents[kMaxScales] = {0.0448, 0.2856, 0.3001, 0.2363, 0.1333};

  const Index min_dim = std::min(pred.rows(), pred.cols());
  int scales = 0;
  for (int s = 1; s <= kMaxScales; ++s) {
    if (min_dim / (Index{1} << (s - 1)) >= kWindow) scales = s;
  }
  if (scales == 0) throw ShapeError("ms_ssim: image smaller than one filter window");

  double exp_sum = 0.0;
  for (int s = 0; s < scales; ++s) exp_sum += kExponents[s];

  const RealMatrix window = gaussian_kernel(kWindow, 1.5);
  RealMatrix x = gray255(pred), y = gray255(gt);
  double value = 1.0;
  for (int s = 0; s < scales; ++s) {
    const SsimTerms terms = ssim_terms(x, y, window);
    const double w = kExponents[s] / exp_sum;
    if (s == scales - 1) {
      value *= std::pow(std::max(terms.luminance, 0.0), w);
    }
    value *= std::pow(std::max(terms.cs, 0.0), w);
    if (s + 1 < scales) {
      x = downsample2(x);
      y = downsample2(y);
    }
  }
  return std::clamp(value, 0.0, 1.0);
}

double cqm(const Frame& pred, const Frame& gt) {
  check_same_dims(pred, gt, "cqm");
  auto yuv = [](const Frame& f) {
    std::array<RealMatrix, 3> out;
    out[0] = (0.299 * f.r + 0.587 * f.g + 0.114 * f.b) * 255.0;
    out[1] = (-0.14713 * f.r - 0.28886 * f.g + 0.436 * f.b) * 255.0;
    out[2] = (0.615 * f.r - 0.51499 * f.g - 0.10001 * f.b) * 255.0;
    return out;
  };
  const std::array<RealMatrix, 3> a = yuv(pred), b = yuv(gt);
  const double px = static_cast<double>(pred.rows()) * pred.cols();
  double p[3];
  for (int c = 0; c < 3; ++c) {
    p[c] = capped_psnr_from_mse((a[static_cast<size_t>(c)] - b[static_cast<size_t>(c)]).squaredNorm() / px);
  }
  constexpr double kRw = 0.9449, kCw = 0.0551;
  return p[0] * kRw + 0.5 * (p[1] + p[2]) * kCw;
}

namespace {

DetectionCounts frame_counts(const GrayImage& pred, const GrayImage& gt) {
  if (pred.rows() != gt.rows() || pred.cols() != gt.cols()) {
    throw ShapeError("detection_prf: mask dimensions disagree");
  }
  DetectionCounts c;
  for (Index i = 0; i < pred.rows(); ++i) {
    for (Index j = 0; j < pred.cols(); ++j) {
      const std::uint8_t g = gt(i, j);
      const bool gt_fg = g == 255 || g == 1;
      const bool gt_bg = g == 0;
      if (!gt_fg && !gt_bg) continue;  // non-ROI / unknown label
      const bool p = pred(i, j) != 0;
      if (p && gt_fg) ++c.tp;
      else if (p && gt_bg) ++c.fp;
      else if (!p && gt_fg) ++c.fn;
    }
  }
  return c;
}

PrfResult prf_from_counts(const DetectionCounts& c) {
  PrfResult r;
  r.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  r.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  r.f_measure = r.precision + r.recall > 0.0
                    ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
                    : 0.0;
  return r;
}

}  // namespace

PrfResult detection_prf(const MaskSequence& pred, const MaskSequence& gt) {
  if (pred.size() != gt.size()) throw ShapeError("detection_prf: frame counts disagree");
  DetectionCounts total;
  for (size_t l = 0; l < pred.size(); ++l) {
    const DetectionCounts c = frame_counts(pred[l], gt[l]);
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
  }
  return prf_from_counts(total);
}

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j;
  j["task"] = task;
  j["frames"] = frames;
  j["aggregate"] = aggregate;
  return j;
}

std::string MetricsReport::to_csv() const {
  std::ostringstream out;
  std::vector<std::string> cols;
  if (task == "background") {
    cols = {"age", "peps", "pceps", "psnr", "msssim", "cqm"};
  } else {
    cols = {"recall", "precision", "fmeasure"};
  }
  out << "frame";
  for (const auto& c : cols) out << "," << c;
  out << "\n";
  out.precision(10);
  for (size_t i = 0; i < frames.size(); ++i) {
    out << (i + 1);
    for (const auto& c : cols) out << "," << frames[i][c].get<double>();
    out << "\n";
  }
  out << "aggregate";
  for (const auto& c : cols) out << "," << aggregate[c].get<double>();
  out << "\n";
  return out.str();
}

std::string MetricsReport::aggregate_line() const {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed;
  if (task == "background") {
    out << "AGE " << aggregate["age"].get<double>() << "  pEPs " << aggregate["peps"].get<double>()
        << "  pCEPs " << aggregate["pceps"].get<double>() << "  PSNR "
        << aggregate["psnr"].get<double>() << "  MS-SSIM " << aggregate["msssim"].get<double>()
        << "  CQM " << aggregate["cqm"].get<double>();
  } else {
    out << "Recall " << aggregate["recall"].get<double>() << "  Precision "
        << aggregate["precision"].get<double>() << "  F-measure "
        << aggregate["fmeasure"].get<double>();
  }
  return out.str();
}

MetricsReport evaluate_background(const VideoTensor& pred, const VideoTensor& gt, double tau) {
  if (pred.t() != gt.t()) {
    throw ShapeError("evaluate_background: frame counts disagree (" + std::to_string(pred.t()) +
                     " vs " + std::to_string(gt.t()) + ")");
  }
  MetricsReport rep;
  rep.task = "background";
  std::vector<double> v_age, v_peps, v_pceps, v_psnr, v_ssim, v_cqm;
  for (int l = 0; l < pred.t(); ++l) {
    const Frame& a = pred.frames[static_cast<size_t>(l)];
    const Frame& b = gt.frames[static_cast<size_t>(l)];
    const auto [peps, pceps] = peps_pceps(a, b, tau);
    nlohmann::json row;
    row["frame"] = l + 1;
    row["age"] = age(a, b);
    row["peps"] = peps;
    row["pceps"] = pceps;
    row["psnr"] = psnr(a, b);
    row["msssim"] = ms_ssim(a, b);
    row["cqm"] = cqm(a, b);
    v_age.push_back(row["age"]);
    v_peps.push_back(peps);
    v_pceps.push_back(pceps);
    v_psnr.push_back(row["psnr"]);
    v_ssim.push_back(row["msssim"]);
    v_cqm.push_back(row["cqm"]);
    rep.frames.push_back(std::move(row));
  }
  rep.aggregate = {{"age", compensated_mean(v_age)},     {"peps", compensated_mean(v_peps)},
                   {"pceps", compensated_mean(v_pceps)}, {"psnr", compensated_mean(v_psnr)},
                   {"msssim", compensated_mean(v_ssim)}, {"cqm", compensated_mean(v_cqm)}};
  return rep;
}

MetricsReport evaluate_detection(const MaskSequence& pred, const MaskSequence& gt,
                                 bool frame_average) {
  if (pred.size() != gt.size()) {
    throw ShapeError("evaluate_detection: frame counts disagree (" + std::to_string(pred.size()) +
                     " vs " + std::to_string(gt.size()) + ")");
  }
  MetricsReport rep;
  rep.task = "detection";
  DetectionCounts total;
  std::vector<double> v_r, v_p, v_f;
  for (size_t l = 0; l < pred.size(); ++l) {
    const DetectionCounts c = frame_counts(pred[l], gt[l]);
    const PrfResult r = prf_from_counts(c);
    nlohmann::json row;
    row["frame"] = l + 1;
    row["recall"] = r.recall;
    row["precision"] = r.precision;
    row["fmeasure"] = r.f_measure;
    rep.frames.push_back(std::move(row));
    total.tp += c.tp;
    total.fp += c.fp;
    total.fn += c.fn;
    v_r.push_back(r.recall);
    v_p.push_back(r.precision);
    v_f.push_back(r.f_measure);
  }
  PrfResult agg;
  if (frame_average) {
    agg.recall = compensated_mean(v_r);
    agg.precision = compensated_mean(v_p);
    agg.f_measure = compensated_mean(v_f);
  } else {
    agg = prf_from_counts(total);
  }
  rep.aggregate = {{"recall", agg.recall}, {"precision", agg.precision}, {"fmeasure", agg.f_measure}};
  return rep;
}

}  // namespace uqrpca
