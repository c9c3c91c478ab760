// Command-line front door for the uqrpca shared library. Links the C API
// only. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "uqrpca.h"

namespace {

struct ConfigDeleter {
  void operator()(uq_config* c) const { uq_config_destroy(c); }
};
using ConfigPtr = std::unique_ptr<uq_config, ConfigDeleter>;

[[noreturn]] void die_runtime(const std::string& context) {
  std::fprintf(stderr, "error: %s: %s\n", context.c_str(), uq_last_error());
  std::exit(1);
}

void check(uq_status st, const std::string& context) {
  if (st != UQ_OK) die_runtime(context);
}

ConfigPtr make_config() {
  uq_config* raw = nullptr;
  check(uq_config_create(&raw), "creating configuration");
  return ConfigPtr(raw);
}

std::string config_get(const uq_config* cfg, const std::string& key) {
  char buf[512];
  check(uq_config_get(cfg, key.c_str(), buf, sizeof(buf)), "reading configuration key " + key);
  return buf;
}

// Registry-backed option: the flag default comes from the shared registry so
// --help always lists the documented default. Explicit flags override any
// config-file value.
struct KeyedOptions {
  std::map<std::string, std::string> values;

  void add(CLI::App* cmd, const std::string& flag, const std::string& key) {
    const char* name = nullptr;
    const char* def = nullptr;
    const char* desc = nullptr;
    for (size_t i = 0; uq_config_key_info(i, &name, &def, &desc); ++i) {
      if (key == name) break;
    }
    values[key] = def ? def : "";
    cmd->add_option(flag, values[key], desc ? desc : "")->capture_default_str();
  }

  // Apply only the flags the user actually passed.
  void apply(const CLI::App* cmd, uq_config* cfg) const {
    for (const auto& [key, value] : values) {
      const CLI::Option* opt = cmd->get_option_no_throw("--" + key);
      if (opt && opt->count() > 0) {
        check(uq_config_set(cfg, key.c_str(), value.c_str()), "setting " + key);
      }
    }
  }
};

int env_threads_fallback() {
  const char* env = std::getenv("QRPCA_THREADS");
  if (!env) return -1;
  try {
    return std::stoi(env);
  } catch (...) {
    return -1;
  }
}

void apply_threads(const uq_config* cfg, bool flag_given) {
  int threads = std::stoi(config_get(cfg, "threads"));
  if (!flag_given) {
    const int env = env_threads_fallback();
    if (env >= 0) threads = env;
  }
  check(uq_set_threads(threads), "setting thread count");
}

void progress_line(int iter, int total, double primal, double coupling, void*) {
  std::fprintf(stderr, "iter %d/%d  primal %.3e  coupling %.3e\n", iter, total, primal, coupling);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"uqrpca: quaternion RPCA video background/target decomposition"};
  app.require_subcommand(1);
  app.set_version_flag("--version", uq_version());

  std::string config_file;

  // decompose -----------------------------------------------------------
  CLI::App* dec = app.add_subcommand("decompose", "decompose a frame sequence");
  std::string dec_frames, dec_out;
  dec->add_option("--frames", dec_frames, "input frame directory")->required();
  dec->add_option("--out", dec_out, "output directory")->required();
  dec->add_option("--config", config_file, "key = value configuration file");
  bool no_crib_flag = false;
  dec->add_flag("--no-crib", no_crib_flag, "skip the column-replication background refinement");
  KeyedOptions dec_opts;
  for (const char* key : {"rank", "iters", "mu0", "rho", "rho1", "rho2", "c1", "c2", "eps",
                          "block_h", "block_w", "fg_threshold", "resize_w", "resize_h",
                          "threads"}) {
    dec_opts.add(dec, std::string("--") + key, key);
  }

  // evaluate ------------------------------------------------------------
  CLI::App* ev = app.add_subcommand("evaluate", "score predictions against ground truth");
  std::string ev_task, ev_pred, ev_gt, ev_json, ev_csv;
  double ev_tau = 20.0;
  bool ev_frame_average = false;
  ev->add_option("--task", ev_task, "detection or background")
      ->required()
      ->check(CLI::IsMember({"detection", "background"}));
  ev->add_option("--pred", ev_pred, "predicted frames or masks directory")->required();
  ev->add_option("--gt", ev_gt, "ground-truth frames or masks directory")->required();
  ev->add_option("--json", ev_json, "JSON report path");
  ev->add_option("--csv", ev_csv, "CSV report path");
  ev->add_option("--tau", ev_tau, "gray-level threshold for pEPs/pCEPs")
      ->capture_default_str();
  ev->add_flag("--frame-average", ev_frame_average,
               "average detection metrics per frame instead of pixel counts");

  // synthesize ----------------------------------------------------------
  CLI::App* sy = app.add_subcommand("synthesize", "composite detected targets onto a background");
  std::string sy_frames, sy_mask, sy_bg, sy_out;
  sy->add_option("--frames", sy_frames, "foreground frame directory")->required();
  sy->add_option("--mask", sy_mask, "mask directory")->required();
  sy->add_option("--background", sy_bg, "background image path")->required();
  sy->add_option("--out", sy_out, "output directory")->required();

  // bench ---------------------------------------------------------------
  CLI::App* be = app.add_subcommand("bench", "low-rank update timing comparison");
  int64_t be_rows = 10000;
  std::string be_cols = "25,50,75,100,125,150,175,200";
  int be_iters = 20;
  uint64_t be_seed = 0;
  std::string be_csv = "bench.csv";
  int be_threads = 1;
  be->add_option("--rows", be_rows, "row count")->capture_default_str();
  be->add_option("--cols", be_cols, "comma-separated column counts")->capture_default_str();
  be->add_option("--iters", be_iters, "iterations per size")->capture_default_str();
  be->add_option("--seed", be_seed, "RNG seed")->capture_default_str();
  be->add_option("--csv", be_csv, "output CSV path")->capture_default_str();
  be->add_option("--threads", be_threads,
                 "worker threads (default 1 to stabilize timings)")
      ->capture_default_str();

  // Exit-code contract: 0 success, 1 runtime, 2 usage.
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (dec->parsed()) {
    ConfigPtr cfg = make_config();
    if (!config_file.empty()) {
      check(uq_config_load_file(cfg.get(), config_file.c_str()), "loading " + config_file);
    }
    dec_opts.apply(dec, cfg.get());
    if (no_crib_flag) check(uq_config_set(cfg.get(), "no_crib", "true"), "setting no_crib");
    check(uq_config_set(cfg.get(), "frames", dec_frames.c_str()), "setting frames");
    check(uq_config_set(cfg.get(), "out", dec_out.c_str()), "setting out");
    apply_threads(cfg.get(), dec->count("--threads") > 0);

    uq_video* video = nullptr;
    const int rw = std::stoi(config_get(cfg.get(), "resize_w"));
    const int rh = std::stoi(config_get(cfg.get(), "resize_h"));
    check(uq_video_load(dec_frames.c_str(), rw, rh, &video), "loading " + dec_frames);
    uq_result* result = nullptr;
    const uq_status st = uq_decompose(video, cfg.get(), progress_line, nullptr, &result);
    if (st != UQ_OK) {
      uq_video_destroy(video);
      die_runtime("decomposing " + dec_frames);
    }
    check(uq_result_save(result, cfg.get(), dec_out.c_str()), "writing " + dec_out);
    uq_result_destroy(result);
    uq_video_destroy(video);
    std::printf("wrote %s\n", dec_out.c_str());
    return 0;
  }

  if (ev->parsed()) {
    char summary[512] = {0};
    check(uq_evaluate(ev_task.c_str(), ev_pred.c_str(), ev_gt.c_str(),
                      ev_json.empty() ? nullptr : ev_json.c_str(),
                      ev_csv.empty() ? nullptr : ev_csv.c_str(), ev_tau,
                      ev_frame_average ? 1 : 0, summary, sizeof(summary)),
          "evaluating " + ev_pred);
    std::printf("%s\n", summary);
    return 0;
  }

  if (sy->parsed()) {
    check(uq_synthesize(sy_frames.c_str(), sy_mask.c_str(), sy_bg.c_str(), sy_out.c_str()),
          "synthesizing " + sy_out);
    std::printf("wrote %s\n", sy_out.c_str());
    return 0;
  }

  if (be->parsed()) {
    std::vector<int64_t> cols;
    std::string token;
    for (char c : be_cols + ",") {
      if (c == ',') {
        if (!token.empty()) {
          try {
            cols.push_back(std::stoll(token));
          } catch (...) {
            std::fprintf(stderr, "error: invalid column count '%s'\n", token.c_str());
            return 2;
          }
          token.clear();
        }
      } else {
        token += c;
      }
    }
    if (cols.empty() || be_rows < 1 || be_iters < 1) {
      std::fprintf(stderr, "error: invalid benchmark size specification\n");
      return 2;
    }
    check(uq_set_threads(be_threads), "setting thread count");
    check(uq_bench(be_rows, cols.data(), cols.size(), be_iters, be_seed, be_csv.c_str()),
          "running benchmark");
    std::printf("wrote %s\n", be_csv.c_str());
    return 0;
  }

  return 2;
}
