#include "image_codec.hpp"

#include <jpeglib.h>
#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <memory>

namespace uqrpca {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Frame from_rgb8(const std::vector<std::uint8_t>& rgb, Index rows, Index cols) {
  Frame f = Frame::zero(rows, cols);
  for (Index y = 0; y < rows; ++y) {
    for (Index x = 0; x < cols; ++x) {
      const size_t base = 3 * static_cast<size_t>(y * cols + x);
      f.r(y, x) = rgb[base] / 255.0;
      f.g(y, x) = rgb[base + 1] / 255.0;
      f.b(y, x) = rgb[base + 2] / 255.0;
    }
  }
  return f;
}

bool has_suffix(const std::string& s, const char* suffix) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  const std::string suf(suffix);
  return lower.size() >= suf.size() && lower.compare(lower.size() - suf.size(), suf.size(), suf) == 0;
}

Frame decode_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed for " + path);
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng init failed for " + path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);

  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  const Index rows = static_cast<Index>(png_get_image_height(png, info));
  const Index cols = static_cast<Index>(png_get_image_width(png, info));
  std::vector<std::uint8_t> rgb(static_cast<size_t>(rows * cols * 3));
  std::vector<png_bytep> row_ptrs(static_cast<size_t>(rows));
  for (Index y = 0; y < rows; ++y) row_ptrs[static_cast<size_t>(y)] = rgb.data() + y * cols * 3;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return from_rgb8(rgb, rows, cols);
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* mgr = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  std::longjmp(mgr->jump, 1);
}

Frame decode_jpeg(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open file: " + path);

  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_error_exit;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError("failed to decode JPEG: " + path);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_stdio_src(&cinfo, fp.get());
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);

  const Index rows = static_cast<Index>(cinfo.output_height);
  const Index cols = static_cast<Index>(cinfo.output_width);
  std::vector<std::uint8_t> rgb(static_cast<size_t>(rows * cols * 3));
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = rgb.data() + static_cast<size_t>(cinfo.output_scanline) * cols * 3;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return from_rgb8(rgb, rows, cols);
}

}  // namespace

Frame decode_image(const std::string& path) {
  if (has_suffix(path, ".png")) return decode_png(path);
  if (has_suffix(path, ".jpg") || has_suffix(path, ".jpeg")) return decode_jpeg(path);
  throw IoError("unsupported image extension: " + path);
}

void encode_png_rgb(const std::string& path, const Frame& frame) {
  const Index rows = frame.rows(), cols = frame.cols();
  std::vector<std::uint8_t> rgb(static_cast<size_t>(rows * cols * 3));
  auto to8 = [](double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
  };
  for (Index y = 0; y < rows; ++y) {
    for (Index x = 0; x < cols; ++x) {
      const size_t base = 3 * static_cast<size_t>(y * cols + x);
      rgb[base] = to8(frame.r(y, x));
      rgb[base + 1] = to8(frame.g(y, x));
      rgb[base + 2] = to8(frame.b(y, x));
    }
  }

  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open file for writing: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed for " + path);
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed for " + path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to write PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (Index y = 0; y < rows; ++y) {
    png_write_row(png, const_cast<png_bytep>(rgb.data() + y * cols * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void encode_png_gray(const std::string& path, const GrayImage& img) {
  const Index rows = img.rows(), cols = img.cols();
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open file for writing: " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng init failed for " + path);
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng init failed for " + path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to write PNG: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(cols), static_cast<png_uint_32>(rows), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<std::uint8_t> row(static_cast<size_t>(cols));
  for (Index y = 0; y < rows; ++y) {
    for (Index x = 0; x < cols; ++x) row[static_cast<size_t>(x)] = img(y, x);
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

Frame bilinear_resize(const Frame& in, Index out_rows, Index out_cols) {
  Frame out = Frame::zero(out_rows, out_cols);
  const Index ir = in.rows(), ic = in.cols();
  const double sy = out_rows > 1 ? static_cast<double>(ir - 1) / (out_rows - 1) : 0.0;
  const double sx = out_cols > 1 ? static_cast<double>(ic - 1) / (out_cols - 1) : 0.0;
  for (Index y = 0; y < out_rows; ++y) {
    const double fy = y * sy;
    const Index y0 = std::min<Index>(static_cast<Index>(fy), ir - 1);
    const Index y1 = std::min<Index>(y0 + 1, ir - 1);
    const double wy = fy - y0;
    for (Index x = 0; x < out_cols; ++x) {
      const double fx = x * sx;
      const Index x0 = std::min<Index>(static_cast<Index>(fx), ic - 1);
      const Index x1 = std::min<Index>(x0 + 1, ic - 1);
      const double wx = fx - x0;
      auto lerp = [&](const RealMatrix& ch) {
        const double top = ch(y0, x0) * (1.0 - wx) + ch(y0, x1) * wx;
        const double bot = ch(y1, x0) * (1.0 - wx) + ch(y1, x1) * wx;
        return top * (1.0 - wy) + bot * wy;
      };
      out.r(y, x) = lerp(in.r);
      out.g(y, x) = lerp(in.g);
      out.b(y, x) = lerp(in.b);
    }
  }
  return out;
}

}  // namespace uqrpca
