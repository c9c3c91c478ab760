#include "video.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>

#include "parallel.hpp"

namespace fs = std::filesystem;

namespace uqrpca {

namespace {

bool is_frame_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

std::string frame_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d.png", index);
  return buf;
}

void write_frame_tree(const fs::path& dir, const VideoTensor& v, bool offset_encode) {
  fs::create_directories(dir);
  parallel_for(v.t(), [&](Index l) {
    const Frame& src = v.frames[static_cast<size_t>(l)];
    Frame out = src;
    if (offset_encode) {
      out.r = src.r * 0.5 + RealMatrix::Constant(src.rows(), src.cols(), 0.5);
      out.g = src.g * 0.5 + RealMatrix::Constant(src.rows(), src.cols(), 0.5);
      out.b = src.b * 0.5 + RealMatrix::Constant(src.rows(), src.cols(), 0.5);
    }
    encode_png_rgb((dir / frame_name(static_cast<int>(l) + 1)).string(), out);
  });
}

}  // namespace

VideoTensor load_frames(const std::string& dir, std::optional<std::pair<int, int>> resize) {
  if (!fs::is_directory(dir)) throw IoError("frame directory does not exist: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && is_frame_file(entry.path())) files.push_back(entry.path());
  }
  if (files.empty()) throw IoError("no decodable frames found in " + dir);
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  VideoTensor v;
  v.frames.resize(files.size());
  parallel_for(static_cast<Index>(files.size()), [&](Index i) {
    Frame f = decode_image(files[static_cast<size_t>(i)].string());
    if (resize) {
      f = bilinear_resize(f, resize->second, resize->first);  // (w, h) -> rows = h
    }
    v.frames[static_cast<size_t>(i)] = std::move(f);
  });

  v.m = static_cast<int>(v.frames.front().rows());
  v.n = static_cast<int>(v.frames.front().cols());
  for (size_t i = 1; i < v.frames.size(); ++i) {
    if (v.frames[i].rows() != v.m || v.frames[i].cols() != v.n) {
      throw ShapeError("mixed frame dimensions in " + dir + " (use a resize spec): " +
                       files[i].filename().string());
    }
  }
  return v;
}

QuaternionMatrix to_quaternion(const VideoTensor& v) {
  const Index mn = static_cast<Index>(v.m) * v.n;
  QuaternionMatrix q(mn, v.t());
  for (int l = 0; l < v.t(); ++l) {
    const Frame& f = v.frames[static_cast<size_t>(l)];
    q.im_i.col(l) = Eigen::Map<const RealVector>(f.r.data(), mn);
    q.im_j.col(l) = Eigen::Map<const RealVector>(f.g.data(), mn);
    q.im_k.col(l) = Eigen::Map<const RealVector>(f.b.data(), mn);
  }
  return q;
}

VideoTensor from_quaternion(const QuaternionMatrix& q, int m, int n) {
  if (static_cast<Index>(m) * n != q.rows()) {
    throw ShapeError("from_quaternion: m*n does not match row count");
  }
  VideoTensor v;
  v.m = m;
  v.n = n;
  v.frames.resize(static_cast<size_t>(q.cols()));
  for (Index l = 0; l < q.cols(); ++l) {
    Frame f;
    f.r = Eigen::Map<const RealMatrix>(q.im_i.col(l).data(), m, n);
    f.g = Eigen::Map<const RealMatrix>(q.im_j.col(l).data(), m, n);
    f.b = Eigen::Map<const RealMatrix>(q.im_k.col(l).data(), m, n);
    v.frames[static_cast<size_t>(l)] = std::move(f);
  }
  return v;
}

VideoTensor composite(const MaskSequence& masks, const VideoTensor& fg, const Frame& bg) {
  if (static_cast<int>(masks.size()) != fg.t()) {
    throw ShapeError("composite: mask count does not match frame count");
  }
  if (bg.rows() != fg.m || bg.cols() != fg.n) {
    throw ShapeError("composite: background dimensions do not match frames");
  }
  VideoTensor out = fg;
  for (int l = 0; l < fg.t(); ++l) {
    const GrayImage& mk = masks[static_cast<size_t>(l)];
    if (mk.rows() != fg.m || mk.cols() != fg.n) {
      throw ShapeError("composite: mask dimensions do not match frames");
    }
    Frame& f = out.frames[static_cast<size_t>(l)];
    for (Index y = 0; y < fg.m; ++y) {
      for (Index x = 0; x < fg.n; ++x) {
        if (mk(y, x) == 0) {
          f.r(y, x) = bg.r(y, x);
          f.g(y, x) = bg.g(y, x);
          f.b(y, x) = bg.b(y, x);
        }
      }
    }
  }
  return out;
}

void save_outputs(const OutputBundle& bundle, const std::string& out_dir) {
  const fs::path root(out_dir);
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());

  write_frame_tree(root / "background", bundle.background, false);
  write_frame_tree(root / "target", bundle.target, false);
  write_frame_tree(root / "sparse", bundle.sparse, true);
  write_frame_tree(root / "noise", bundle.noise, true);

  const fs::path mask_dir = root / "mask";
  fs::create_directories(mask_dir);
  parallel_for(static_cast<Index>(bundle.masks.size()), [&](Index l) {
    encode_png_gray((mask_dir / frame_name(static_cast<int>(l) + 1)).string(),
                    bundle.masks[static_cast<size_t>(l)]);
  });

  nlohmann::json manifest = bundle.manifest_extra;
  manifest["frame_count"] = bundle.background.t();
  manifest["dims"] = {{"m", bundle.background.m}, {"n", bundle.background.n}};
  manifest["encoding"] = {{"background", "plain8"},
                          {"target", "plain8"},
                          {"sparse", "offset8"},
                          {"noise", "offset8"},
                          {"mask", "binary8"}};
  manifest["offset"] = 0.5;
  manifest["scale"] = 0.5;

  std::ofstream out(root / "manifest.json");
  if (!out) throw IoError("cannot write manifest.json under " + out_dir);
  out << manifest.dump(2) << "\n";
}

RealMatrix to_gray(const Frame& f) { return 0.299 * f.r + 0.587 * f.g + 0.114 * f.b; }

}  // namespace uqrpca
