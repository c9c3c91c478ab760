#include "sparse.hpp"

#include <cmath>

namespace uqrpca {

namespace {
constexpr double kSaliencyFloor = 1e-6;
}

BlockPartition BlockPartition::grid(int m, int n, int t, int block_h, int block_w) {
  if (m < 1 || n < 1 || t < 1 || block_h < 1 || block_w < 1) {
    throw ConfigError("BlockPartition::grid: dimensions and block size must be positive");
  }
  BlockPartition part;
  part.block_h = block_h;
  part.block_w = block_w;
  part.m = m;
  part.n = n;
  part.t = t;
  for (int f = 0; f < t; ++f) {
    for (int r0 = 0; r0 < m; r0 += block_h) {
      for (int c0 = 0; c0 < n; c0 += block_w) {
        part.blocks.push_back(
            {f, r0, std::min(r0 + block_h, m), c0, std::min(c0 + block_w, n)});
      }
    }
  }
  return part;
}

SaliencyMap compute_saliency(const VideoTensor& video, const BlockPartition& part) {
  if (video.t() < 2) throw ConfigError("compute_saliency: at least two frames are required");
  if (video.m != part.m || video.n != part.n || video.t() != part.t) {
    throw ShapeError("compute_saliency: partition does not match the video geometry");
  }

  std::vector<RealMatrix> gray(static_cast<size_t>(video.t()));
  for (int l = 0; l < video.t(); ++l) gray[static_cast<size_t>(l)] = to_gray(video.frames[static_cast<size_t>(l)]);

  std::vector<RealMatrix> diff(static_cast<size_t>(video.t()));
  for (int l = 0; l < video.t(); ++l) {
    const int prev = l == 0 ? 1 : l - 1;
    diff[static_cast<size_t>(l)] =
        (gray[static_cast<size_t>(l)] - gray[static_cast<size_t>(prev)]).cwiseAbs();
  }

  SaliencyMap sal;
  sal.sm.resize(static_cast<Index>(part.blocks.size()));
  for (size_t l = 0; l < part.blocks.size(); ++l) {
    const auto& b = part.blocks[l];
    const double mean =
        diff[static_cast<size_t>(b.frame)].block(b.r0, b.c0, b.r1 - b.r0, b.c1 - b.c0).mean();
    sal.sm(static_cast<Index>(l)) = std::max(mean, kSaliencyFloor);
  }
  sal.sm_min = sal.sm.minCoeff();
  return sal;
}

RealVector lambda_for_blocks(const SaliencyMap& sal, int m, int n) {
  const double root = std::sqrt(static_cast<double>(std::max(m, n)));
  return 0.1 * sal.sm_min / root * sal.sm.cwiseInverse();
}

RealMatrix wbs(const RealMatrix& block_values, double eps_l) {
  if (eps_l < 0.0) throw ConfigError("wbs: eps_l must be nonnegative");
  const double l1 = block_values.cwiseAbs().sum();
  if (l1 > eps_l) return block_values * ((l1 - eps_l) / l1);
  return RealMatrix::Zero(block_values.rows(), block_values.cols());
}

QuaternionMatrix update_S(const QuaternionMatrix& d, const QuaternionMatrix& l,
                          const QuaternionMatrix& e, const QuaternionMatrix& f,
                          const QuaternionMatrix& x, const QuaternionMatrix& y,
                          const QuaternionMatrix& s_prev, double mu, const BlockPartition& part,
                          const RealVector& lambdas, double c2, double eps) {
  if (mu <= 0.0) throw ConfigError("update_S: mu must be positive");
  if (lambdas.size() != static_cast<Index>(part.blocks.size())) {
    throw ShapeError("update_S: lambda count does not match the partition");
  }
  const Index mn = d.rows(), t = d.cols();
  if (static_cast<Index>(part.m) * part.n != mn || part.t != t) {
    throw ShapeError("update_S: partition does not match the data geometry");
  }

  const QuaternionMatrix ys =
      (d - l + e + f) * 0.5 + (x - y) * (1.0 / (2.0 * mu));
  const std::array<RealMatrix, 3> ys_ch = split_channels(ys);
  const std::array<RealMatrix, 3> sp_ch = split_channels(s_prev);
  std::array<RealMatrix, 3> out;

  for (size_t c = 0; c < 3; ++c) {
    const RealMatrix& src = ys_ch[c];
    const RealMatrix& prev = sp_ch[c];
    RealMatrix dst = RealMatrix::Zero(mn, t);
    for (size_t bi = 0; bi < part.blocks.size(); ++bi) {
      const auto& b = part.blocks[bi];
      const int bh = b.r1 - b.r0, bw = b.c1 - b.c0;
      RealMatrix vals(bh, bw), wsum(bh, bw);
      for (int cc = 0; cc < bw; ++cc) {
        for (int rr = 0; rr < bh; ++rr) {
          const Index p = static_cast<Index>(b.c0 + cc) * part.m + (b.r0 + rr);
          vals(rr, cc) = src(p, b.frame);
          wsum(rr, cc) = std::log(std::abs(prev(p, b.frame)) + eps);
        }
      }
      const double omega_bar = c2 * wsum.mean();
      const double eps_l = std::max(omega_bar, 0.0) * lambdas(static_cast<Index>(bi)) / mu;
      const RealMatrix shrunk = wbs(vals, eps_l);
      for (int cc = 0; cc < bw; ++cc) {
        for (int rr = 0; rr < bh; ++rr) {
          const Index p = static_cast<Index>(b.c0 + cc) * part.m + (b.r0 + rr);
          dst(p, b.frame) = shrunk(rr, cc);
        }
      }
    }
    out[c] = std::move(dst);
  }
  return cat_channels(out[0], out[1], out[2]);
}

}  // namespace uqrpca
