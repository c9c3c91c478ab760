#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "image_codec.hpp"
#include "quaternion.hpp"

namespace uqrpca {

/// t frames of m x n x 3 color data in [0,1].
struct VideoTensor {
  std::vector<Frame> frames;
  int m = 0, n = 0;

  int t() const { return static_cast<int>(frames.size()); }
};

using MaskSequence = std::vector<GrayImage>;

/// Load every PNG/JPG in a directory, in lexicographic filename order.
/// `resize` is (width, height); without it all frames must share one size.
VideoTensor load_frames(const std::string& dir,
                        std::optional<std::pair<int, int>> resize = std::nullopt);

/// Vectorize to the mn x t pure quaternion layout: column l is frame l in
/// column-major order, R -> im_i, G -> im_j, B -> im_k.
QuaternionMatrix to_quaternion(const VideoTensor& v);

/// Exact inverse of to_quaternion (the real part is ignored).
VideoTensor from_quaternion(const QuaternionMatrix& q, int m, int n);

/// Per-pixel selection: mask ? fg : bg.
VideoTensor composite(const MaskSequence& masks, const VideoTensor& fg, const Frame& bg);

/// Everything a decomposition run writes to disk. `sparse` and `noise` carry
/// signed values and are offset-encoded as value*0.5 + 0.5 in the PNGs;
/// `background` and `target` are clamped to [0,1] directly.
struct OutputBundle {
  VideoTensor background;
  MaskSequence masks;
  VideoTensor sparse;
  VideoTensor noise;
  VideoTensor target;
  nlohmann::json manifest_extra;  // merged into manifest.json (config echo, residuals)
};

/// Write background/, mask/, sparse/, noise/, target/ frame trees (files
/// 0001.png upward) plus manifest.json under out_dir.
void save_outputs(const OutputBundle& bundle, const std::string& out_dir);

/// BT.601 luma in [0,1].
RealMatrix to_gray(const Frame& f);

}  // namespace uqrpca
