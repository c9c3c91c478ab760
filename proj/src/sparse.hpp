#pragma once

#include <vector>

#include "quaternion.hpp"
#include "video.hpp"

namespace uqrpca {

/// Non-overlapping spatial grid per frame. Every (pixel, frame) cell belongs
/// to exactly one block; edge blocks may be smaller than block_h x block_w.
struct BlockPartition {
  struct Block {
    int frame;          // 0-based frame index
    int r0, r1, c0, c1; // half-open pixel row/col ranges within the frame
  };

  int block_h = 16, block_w = 16;
  int m = 0, n = 0, t = 0;
  std::vector<Block> blocks;

  static BlockPartition grid(int m, int n, int t, int block_h = 16, int block_w = 16);

  Index block_size(size_t l) const {
    const Block& b = blocks[l];
    return static_cast<Index>(b.r1 - b.r0) * (b.c1 - b.c0);
  }
};

/// Per-block motion saliency: the mean absolute temporal gray difference of
/// the block's pixels against the previous frame (the first frame uses the
/// second as its predecessor), clamped below at 1e-6.
struct SaliencyMap {
  RealVector sm;
  double sm_min = 0.0;
};

SaliencyMap compute_saliency(const VideoTensor& video, const BlockPartition& part);

/// lambda_l = 0.1 * SM_min / (SM_l * sqrt(max(m, n))).
RealVector lambda_for_blocks(const SaliencyMap& sal, int m, int n);

/// Weighted block shrinkage: scale the whole block by
/// (||b||_1 - eps_l)/||b||_1 when ||b||_1 > eps_l, zero otherwise.
RealMatrix wbs(const RealMatrix& block_values, double eps_l);

/// Per spec the sparse update is driven by Y_S = (D - L + E + F)/2 +
/// (X - Y)/(2 mu); each channel is shrunk blockwise with threshold
/// eps_l = max(mean over block of c2*log(|s_prev| + eps), 0) * lambda_l / mu
/// and the channels are reassembled into a pure quaternion matrix.
QuaternionMatrix update_S(const QuaternionMatrix& d, const QuaternionMatrix& l,
                          const QuaternionMatrix& e, const QuaternionMatrix& f,
                          const QuaternionMatrix& x, const QuaternionMatrix& y,
                          const QuaternionMatrix& s_prev, double mu, const BlockPartition& part,
                          const RealVector& lambdas, double c2, double eps);

}  // namespace uqrpca
