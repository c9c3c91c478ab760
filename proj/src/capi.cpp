#include "uqrpca.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>

#include "bench.hpp"
#include "config.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "parallel.hpp"
#include "solver.hpp"
#include "video.hpp"

namespace {

thread_local std::string g_last_error;

uq_status to_status(const uqrpca::Error& e) {
  switch (e.code()) {
    case uqrpca::ErrorCode::InvalidArgument:
      return UQ_ERR_ARG;
    case uqrpca::ErrorCode::Io:
      return UQ_ERR_IO;
    case uqrpca::ErrorCode::Shape:
      return UQ_ERR_SHAPE;
    case uqrpca::ErrorCode::Numeric:
      return UQ_ERR_NUMERIC;
  }
  return UQ_ERR_INTERNAL;
}

template <typename Fn>
uq_status guarded(Fn&& fn) {
  try {
    fn();
    return UQ_OK;
  } catch (const uqrpca::Error& e) {
    g_last_error = e.what();
    return to_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UQ_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return UQ_ERR_INTERNAL;
  }
}

uq_status fail_arg(const char* message) {
  g_last_error = message;
  return UQ_ERR_ARG;
}

void copy_out(char* buf, size_t buflen, const std::string& s) {
  if (!buf || buflen == 0) return;
  const size_t n = std::min(buflen - 1, s.size());
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
}

}  // namespace

struct uq_config {
  uqrpca::Config impl;
};

struct uq_video {
  uqrpca::VideoTensor impl;
};

struct uq_result {
  uqrpca::Decomposition dec;
  int m = 0, n = 0;
};

extern "C" {

const char* uq_version(void) { return "0.1.0"; }

const char* uq_last_error(void) { return g_last_error.c_str(); }

uq_status uq_set_threads(int n) {
  return guarded([&] {
    if (n < 0) throw uqrpca::ConfigError("thread count must be nonnegative");
    uqrpca::set_thread_count(n);
  });
}

uq_status uq_config_create(uq_config** out) {
  if (!out) return fail_arg("uq_config_create: out is NULL");
  return guarded([&] { *out = new uq_config(); });
}

void uq_config_destroy(uq_config* cfg) { delete cfg; }

uq_status uq_config_set(uq_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail_arg("uq_config_set: NULL argument");
  return guarded([&] { cfg->impl.set(key, value); });
}

uq_status uq_config_get(const uq_config* cfg, const char* key, char* buf, size_t buflen) {
  if (!cfg || !key || !buf) return fail_arg("uq_config_get: NULL argument");
  return guarded([&] { copy_out(buf, buflen, cfg->impl.get(key)); });
}

uq_status uq_config_load_file(uq_config* cfg, const char* path) {
  if (!cfg || !path) return fail_arg("uq_config_load_file: NULL argument");
  return guarded([&] { cfg->impl.load_file(path); });
}

int uq_config_key_info(size_t index, const char** name, const char** default_value,
                       const char** description) {
  const auto& reg = uqrpca::config_registry();
  if (index >= reg.size()) return 0;
  if (name) *name = reg[index].name;
  if (default_value) *default_value = reg[index].default_value;
  if (description) *description = reg[index].description;
  return 1;
}

uq_status uq_video_load(const char* dir, int resize_w, int resize_h, uq_video** out) {
  if (!dir || !out) return fail_arg("uq_video_load: NULL argument");
  return guarded([&] {
    std::optional<std::pair<int, int>> resize;
    if (resize_w > 0 && resize_h > 0) resize = std::make_pair(resize_w, resize_h);
    else if (resize_w != 0 || resize_h != 0)
      throw uqrpca::ConfigError("resize requires both width and height");
    auto v = std::make_unique<uq_video>();
    v->impl = uqrpca::load_frames(dir, resize);
    *out = v.release();
  });
}

uq_status uq_video_dims(const uq_video* v, int* m, int* n, int* t) {
  if (!v) return fail_arg("uq_video_dims: NULL video");
  if (m) *m = v->impl.m;
  if (n) *n = v->impl.n;
  if (t) *t = v->impl.t();
  return UQ_OK;
}

void uq_video_destroy(uq_video* v) { delete v; }

uq_status uq_decompose(const uq_video* v, const uq_config* cfg, uq_progress_fn progress,
                       void* user, uq_result** out) {
  if (!v || !cfg || !out) return fail_arg("uq_decompose: NULL argument");
  return guarded([&] {
    const uqrpca::SolverConfig scfg = cfg->impl.solver_config();
    const uqrpca::BlockPartition part = uqrpca::BlockPartition::grid(
        v->impl.m, v->impl.n, v->impl.t(), scfg.block_h, scfg.block_w);
    const uqrpca::SaliencyMap sal = uqrpca::compute_saliency(v->impl, part);
    const uqrpca::QuaternionMatrix d = uqrpca::to_quaternion(v->impl);

    auto res = std::make_unique<uq_result>();
    res->m = v->impl.m;
    res->n = v->impl.n;
    uqrpca::SolveObserver observer;
    if (progress) {
      const int total = scfg.iters;
      observer = [progress, user, total](const uqrpca::IterationView& view) {
        progress(view.iter + 1, total, view.primal_residual, view.coupling_residual, user);
      };
    }
    res->dec = uqrpca::solve(d, scfg, part, sal, observer);
    *out = res.release();
  });
}

uq_status uq_result_iterations(const uq_result* r, int* iters) {
  if (!r || !iters) return fail_arg("uq_result_iterations: NULL argument");
  *iters = static_cast<int>(r->dec.history.size());
  return UQ_OK;
}

uq_status uq_result_residual(const uq_result* r, int iter, double* primal, double* coupling) {
  if (!r) return fail_arg("uq_result_residual: NULL result");
  if (iter < 0 || iter >= static_cast<int>(r->dec.history.size())) {
    return fail_arg("uq_result_residual: iteration out of range");
  }
  const auto& h = r->dec.history[static_cast<size_t>(iter)];
  if (primal) *primal = h.primal_residual;
  if (coupling) *coupling = h.coupling_residual;
  return UQ_OK;
}

uq_status uq_result_save(const uq_result* r, const uq_config* cfg, const char* out_dir) {
  if (!r || !cfg || !out_dir) return fail_arg("uq_result_save: NULL argument");
  return guarded([&] {
    const bool no_crib = cfg->impl.get_bool("no_crib");
    const double threshold = cfg->impl.get_double("fg_threshold");

    uqrpca::OutputBundle bundle;
    const uqrpca::QuaternionMatrix bg = no_crib ? r->dec.L : uqrpca::crib(r->dec.L);
    bundle.background = uqrpca::from_quaternion(bg, r->m, r->n);
    bundle.masks = uqrpca::binarize_foreground(r->dec.F, threshold, r->m, r->n);
    bundle.sparse = uqrpca::from_quaternion(r->dec.S, r->m, r->n);
    bundle.noise = uqrpca::from_quaternion(r->dec.E, r->m, r->n);
    bundle.target = uqrpca::from_quaternion(r->dec.F, r->m, r->n);

    nlohmann::json config_echo;
    for (const auto& [k, val] : cfg->impl.entries()) config_echo[k] = val;
    bundle.manifest_extra["config"] = config_echo;
    nlohmann::json residuals = nlohmann::json::array();
    for (const auto& h : r->dec.history) {
      residuals.push_back({{"mu", h.mu},
                           {"primal", h.primal_residual},
                           {"coupling", h.coupling_residual}});
    }
    bundle.manifest_extra["residuals"] = residuals;
    uqrpca::save_outputs(bundle, out_dir);
  });
}

void uq_result_destroy(uq_result* r) { delete r; }

uq_status uq_evaluate(const char* task, const char* pred_dir, const char* gt_dir,
                      const char* json_path, const char* csv_path, double tau,
                      int frame_average, char* summary, size_t summary_len) {
  if (!task || !pred_dir || !gt_dir) return fail_arg("uq_evaluate: NULL argument");
  return guarded([&] {
    const std::string task_s(task);
    uqrpca::MetricsReport report;
    if (task_s == "background") {
      uqrpca::VideoTensor pred = uqrpca::load_frames(pred_dir);
      uqrpca::VideoTensor gt = uqrpca::load_frames(gt_dir);
      if (gt.t() == 1 && pred.t() > 1) {
        gt.frames.assign(static_cast<size_t>(pred.t()), gt.frames.front());
      }
      report = uqrpca::evaluate_background(pred, gt, tau);
    } else if (task_s == "detection") {
      auto to_masks = [](const uqrpca::VideoTensor& v) {
        uqrpca::MaskSequence masks;
        masks.reserve(static_cast<size_t>(v.t()));
        for (const uqrpca::Frame& f : v.frames) {
          uqrpca::GrayImage g(f.rows(), f.cols());
          const uqrpca::RealMatrix gray = uqrpca::to_gray(f) * 255.0;
          for (uqrpca::Index i = 0; i < g.rows(); ++i)
            for (uqrpca::Index j = 0; j < g.cols(); ++j)
              g(i, j) = static_cast<std::uint8_t>(std::lround(gray(i, j)));
          masks.push_back(std::move(g));
        }
        return masks;
      };
      const uqrpca::MaskSequence pred = to_masks(uqrpca::load_frames(pred_dir));
      const uqrpca::MaskSequence gt = to_masks(uqrpca::load_frames(gt_dir));
      report = uqrpca::evaluate_detection(pred, gt, frame_average != 0);
    } else {
      throw uqrpca::ConfigError("task must be 'detection' or 'background'");
    }

    if (json_path && *json_path) {
      std::ofstream out(json_path);
      if (!out) throw uqrpca::IoError(std::string("cannot write report: ") + json_path);
      out << report.to_json().dump(2) << "\n";
    }
    if (csv_path && *csv_path) {
      std::ofstream out(csv_path);
      if (!out) throw uqrpca::IoError(std::string("cannot write report: ") + csv_path);
      out << report.to_csv();
    }
    if (summary) copy_out(summary, summary_len, report.aggregate_line());
  });
}

uq_status uq_synthesize(const char* frames_dir, const char* mask_dir,
                        const char* background_image, const char* out_dir) {
  if (!frames_dir || !mask_dir || !background_image || !out_dir) {
    return fail_arg("uq_synthesize: NULL argument");
  }
  return guarded([&] {
    const uqrpca::VideoTensor fg = uqrpca::load_frames(frames_dir);
    const uqrpca::VideoTensor mask_frames = uqrpca::load_frames(mask_dir);
    if (mask_frames.t() != fg.t()) {
      throw uqrpca::ShapeError("mask count does not match frame count");
    }
    uqrpca::MaskSequence masks;
    masks.reserve(static_cast<size_t>(mask_frames.t()));
    for (const uqrpca::Frame& f : mask_frames.frames) {
      uqrpca::GrayImage g(f.rows(), f.cols());
      const uqrpca::RealMatrix gray = uqrpca::to_gray(f);
      for (uqrpca::Index i = 0; i < g.rows(); ++i)
        for (uqrpca::Index j = 0; j < g.cols(); ++j) g(i, j) = gray(i, j) > 0.5 ? 255 : 0;
      masks.push_back(std::move(g));
    }
    const uqrpca::Frame bg = uqrpca::decode_image(background_image);
    const uqrpca::VideoTensor out = uqrpca::composite(masks, fg, bg);

    std::filesystem::create_directories(out_dir);
    for (int l = 0; l < out.t(); ++l) {
      char name[16];
      std::snprintf(name, sizeof(name), "%04d.png", l + 1);
      uqrpca::encode_png_rgb((std::filesystem::path(out_dir) / name).string(),
                             out.frames[static_cast<size_t>(l)]);
    }
  });
}

uq_status uq_bench(int64_t rows, const int64_t* cols, size_t ncols, int iters, uint64_t seed,
                   const char* csv_path) {
  if (!cols || ncols == 0 || !csv_path) return fail_arg("uq_bench: NULL or empty argument");
  return guarded([&] {
    uqrpca::BenchSpec spec;
    spec.rows = rows;
    spec.cols_list.assign(cols, cols + ncols);
    spec.iters = iters;
    spec.seed = seed;
    const std::vector<uqrpca::BenchRow> out = uqrpca::run_bench(spec);
    uqrpca::write_bench_csv(out, csv_path);
    for (const uqrpca::BenchRow& r : out) {
      if (!r.valid) {
        throw uqrpca::FactorError("benchmark correctness gate failed at cols=" +
                                  std::to_string(r.cols) + " (max relative error " +
                                  std::to_string(r.max_rel_err) + ")");
      }
    }
  });
}

}  // extern "C"
