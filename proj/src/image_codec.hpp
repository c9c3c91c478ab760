#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quaternion.hpp"

namespace uqrpca {

/// One decoded frame: three channel planes in [0,1], BT.601 RGB order.
struct Frame {
  RealMatrix r, g, b;

  Index rows() const { return r.rows(); }
  Index cols() const { return r.cols(); }
  static Frame zero(Index rows, Index cols) {
    return {RealMatrix::Zero(rows, cols), RealMatrix::Zero(rows, cols),
            RealMatrix::Zero(rows, cols)};
  }
};

using GrayImage = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Decode a PNG or JPEG file to an RGB frame; 16-bit, palette, gray and alpha
/// variants are expanded/stripped to 8-bit RGB. Failures raise IoError naming
/// the file.
Frame decode_image(const std::string& path);

/// Write an 8-bit RGB PNG; values clamped to [0,1] and scaled to 0..255.
void encode_png_rgb(const std::string& path, const Frame& frame);

/// Write an 8-bit grayscale PNG from raw byte values.
void encode_png_gray(const std::string& path, const GrayImage& img);

/// Bilinear resize to out_rows x out_cols.
Frame bilinear_resize(const Frame& in, Index out_rows, Index out_cols);

}  // namespace uqrpca
