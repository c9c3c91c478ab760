#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "image_codec.hpp"
#include "json.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using uqrpca::Frame;
using uqrpca::GrayImage;
using uqrpca::Index;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(UQ_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string output;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (fgets(buf.data(), buf.size(), pipe)) output += buf.data();
  const int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

fs::path write_frames(const std::string& name, int m, int n, int t) {
  const fs::path dir = uqtest::scratch_dir(name);
  for (int l = 0; l < t; ++l) {
    Frame f = Frame::zero(m, n);
    for (Index i = 0; i < m; ++i)
      for (Index j = 0; j < n; ++j) {
        f.r(i, j) = 0.2 + 0.5 * (static_cast<double>(i) / m);
        f.g(i, j) = 0.6;
        f.b(i, j) = 0.3 + 0.3 * (static_cast<double>(j) / n);
      }
    const int bs = 4;
    const int r0 = (l * 5) % (m - bs), c0 = (l * 3) % (n - bs);
    for (int r = r0; r < r0 + bs; ++r)
      for (int c = c0; c < c0 + bs; ++c) f.r(r, c) = 1.0;
    char fname[16];
    std::snprintf(fname, sizeof(fname), "%04d.png", l + 1);
    uqrpca::encode_png_rgb((dir / fname).string(), f);
  }
  return dir;
}

// Order-stable digest of the frame trees. The manifest is excluded: its
// config echo records the run's own paths, which differ across replays.
std::string hash_tree(const fs::path& root) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::ostringstream all;
  for (const auto& p : files) {
    std::ifstream in(p, std::ios::binary);
    all << p.filename().string() << ":";
    all << in.rdbuf();
  }
  return std::to_string(std::hash<std::string>{}(all.str()));
}

}  // namespace

TEST_CASE("cli: help lists every subcommand; exit codes") {
  const RunResult help = run_cli("--help");
  CHECK(help.exit_code == 0);
  for (const char* sub : {"decompose", "evaluate", "synthesize", "bench"}) {
    CHECK(help.output.find(sub) != std::string::npos);
  }
  CHECK(run_cli("").exit_code == 2);           // missing subcommand
  CHECK(run_cli("frobnicate").exit_code == 2); // unknown subcommand
  CHECK(run_cli("evaluate --task detection --pred x").exit_code == 2);  // --gt missing
}

TEST_CASE("cli: every subcommand help lists its flags with defaults") {
  const RunResult help = run_cli("decompose --help");
  CHECK(help.exit_code == 0);
  for (const char* flag : {"--frames", "--out", "--config", "--no-crib", "--rank", "--iters",
                           "--mu0", "--rho1", "--rho2", "--c1", "--c2", "--eps", "--block_h",
                           "--block_w", "--fg_threshold", "--resize_w", "--resize_h",
                           "--threads"}) {
    CHECK(help.output.find(flag) != std::string::npos);
  }
  // Defaults surface in the help text.
  CHECK(help.output.find("0.11") != std::string::npos);   // fg_threshold
  CHECK(help.output.find("1.5") != std::string::npos);    // rho
  CHECK(help.output.find("0.01") != std::string::npos);   // mu0

  const RunResult ev = run_cli("evaluate --help");
  CHECK(ev.exit_code == 0);
  for (const char* flag : {"--task", "--pred", "--gt", "--json", "--csv", "--tau",
                           "--frame-average"}) {
    CHECK(ev.output.find(flag) != std::string::npos);
  }
  CHECK(ev.output.find("20") != std::string::npos);  // tau default

  const RunResult sy = run_cli("synthesize --help");
  CHECK(sy.exit_code == 0);
  for (const char* flag : {"--frames", "--mask", "--background", "--out"}) {
    CHECK(sy.output.find(flag) != std::string::npos);
  }

  const RunResult be = run_cli("bench --help");
  CHECK(be.exit_code == 0);
  for (const char* flag : {"--rows", "--cols", "--iters", "--seed", "--csv", "--threads"}) {
    CHECK(be.output.find(flag) != std::string::npos);
  }
  CHECK(be.output.find("10000") != std::string::npos);
  CHECK(be.output.find("25,50,75,100,125,150,175,200") != std::string::npos);
}

TEST_CASE("cli: decompose produces the output tree and is idempotent") {
  const fs::path frames = write_frames("cli_frames", 16, 16, 4);
  const fs::path out = uqtest::scratch_dir("cli_out");
  const std::string args = "decompose --frames " + frames.string() + " --out " + out.string() +
                           " --iters 2 --mu0 1.0 --block_h 8 --block_w 8 --threads 1";
  const RunResult first = run_cli(args);
  CHECK(first.exit_code == 0);
  for (const char* sub : {"background", "mask", "sparse", "noise", "target"}) {
    CHECK(fs::exists(out / sub / "0001.png"));
  }
  CHECK(fs::exists(out / "manifest.json"));
  nlohmann::json manifest;
  std::ifstream(out / "manifest.json") >> manifest;
  CHECK(manifest["config"]["iters"] == "2");
  CHECK(manifest["residuals"].size() == 2);

  const std::string h1 = hash_tree(out);
  const RunResult second = run_cli(args);
  CHECK(second.exit_code == 0);
  CHECK(hash_tree(out) == h1);

  // Replaying from the manifest's config echo reproduces the run bitwise.
  const fs::path cfg_file = uqtest::scratch_dir("cli_replay") / "replay.cfg";
  {
    std::ofstream cfg(cfg_file);
    for (auto it = manifest["config"].begin(); it != manifest["config"].end(); ++it) {
      const std::string value = it.value().get<std::string>();
      if (value.empty()) continue;
      cfg << it.key() << " = " << value << "\n";
    }
  }
  const fs::path out2 = uqtest::scratch_dir("cli_out_replay");
  const RunResult replay = run_cli("decompose --frames " + frames.string() + " --out " +
                                   out2.string() + " --config " + cfg_file.string());
  CHECK(replay.exit_code == 0);
  CHECK(hash_tree(out2) == h1);
}

TEST_CASE("cli: decompose with --iters 1 and --no-crib variants") {
  const fs::path frames = write_frames("cli_frames1", 16, 16, 3);
  const fs::path out = uqtest::scratch_dir("cli_out1");
  const RunResult r = run_cli("decompose --frames " + frames.string() + " --out " +
                              out.string() + " --iters 1 --mu0 1.0 --threads 1");
  CHECK(r.exit_code == 0);
  nlohmann::json manifest;
  std::ifstream(out / "manifest.json") >> manifest;
  CHECK(manifest["config"]["iters"] == "1");

  // --no-crib: background columns are generally not identical.
  const fs::path out_nc = uqtest::scratch_dir("cli_out_nocrib");
  const RunResult nc = run_cli("decompose --frames " + frames.string() + " --out " +
                               out_nc.string() + " --iters 2 --mu0 1.0 --no-crib --threads 1");
  CHECK(nc.exit_code == 0);
  const Frame f1 = uqrpca::decode_image((out_nc / "background" / "0001.png").string());
  const Frame f2 = uqrpca::decode_image((out_nc / "background" / "0002.png").string());
  CHECK((f1.r - f2.r).cwiseAbs().maxCoeff() > 0.0);

  // With CR1B (default), all background frames are identical.
  const Frame c1 = uqrpca::decode_image((out / "background" / "0001.png").string());
  const Frame c2 = uqrpca::decode_image((out / "background" / "0002.png").string());
  CHECK((c1.r - c2.r).cwiseAbs().maxCoeff() == 0.0);

  // Runtime failure (missing directory) exits 1 with context.
  const RunResult io = run_cli("decompose --frames /does/not/exist --out " + out.string());
  CHECK(io.exit_code == 1);
  CHECK(io.output.find("error") != std::string::npos);
}

TEST_CASE("cli: config file precedence below flags, unknown keys rejected") {
  const fs::path frames = write_frames("cli_frames2", 12, 12, 3);
  const fs::path dir = uqtest::scratch_dir("cli_cfg");
  const fs::path cfg = dir / "run.cfg";
  {
    std::ofstream out(cfg);
    out << "iters = 4\n";
    out << "mu0 = 1.0\n";
  }
  const fs::path out1 = uqtest::scratch_dir("cli_cfg_out1");
  const RunResult file_only =
      run_cli("decompose --frames " + frames.string() + " --out " + out1.string() +
              " --config " + cfg.string() + " --threads 1");
  CHECK(file_only.exit_code == 0);
  nlohmann::json m1;
  std::ifstream(out1 / "manifest.json") >> m1;
  CHECK(m1["config"]["iters"] == "4");

  // Flags override the file.
  const fs::path out2 = uqtest::scratch_dir("cli_cfg_out2");
  const RunResult flag_wins =
      run_cli("decompose --frames " + frames.string() + " --out " + out2.string() +
              " --config " + cfg.string() + " --iters 2 --threads 1");
  CHECK(flag_wins.exit_code == 0);
  nlohmann::json m2;
  std::ifstream(out2 / "manifest.json") >> m2;
  CHECK(m2["config"]["iters"] == "2");

  const fs::path bad = dir / "bad.cfg";
  std::ofstream(bad) << "mystery = 1\n";
  const RunResult rejected = run_cli("decompose --frames " + frames.string() + " --out " +
                                     out2.string() + " --config " + bad.string());
  CHECK(rejected.exit_code == 1);
  CHECK(rejected.output.find("mystery") != std::string::npos);
}

TEST_CASE("cli: evaluate prints the aggregate row") {
  const fs::path frames = write_frames("cli_eval", 16, 16, 3);
  const RunResult r = run_cli("evaluate --task background --pred " + frames.string() +
                              " --gt " + frames.string());
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("AGE 0.000000") != std::string::npos);
  CHECK(r.output.find("MS-SSIM 1.000000") != std::string::npos);

  // Hand-count toy: R = P = F = 0.5.
  const fs::path pd = uqtest::scratch_dir("cli_eval_pred");
  const fs::path gd = uqtest::scratch_dir("cli_eval_gt");
  GrayImage gt(2, 2), pred(2, 2);
  gt << 255, 255, 0, 0;
  pred << 255, 0, 255, 0;
  uqrpca::encode_png_gray((pd / "0001.png").string(), pred);
  uqrpca::encode_png_gray((gd / "0001.png").string(), gt);
  const RunResult det =
      run_cli("evaluate --task detection --pred " + pd.string() + " --gt " + gd.string());
  CHECK(det.exit_code == 0);
  CHECK(det.output.find("F-measure 0.500000") != std::string::npos);

  const RunResult usage = run_cli("evaluate --task detection --pred " + pd.string());
  CHECK(usage.exit_code == 2);
}

TEST_CASE("cli: synthesize") {
  const fs::path frames = write_frames("cli_syn", 12, 12, 2);
  const fs::path masks = uqtest::scratch_dir("cli_syn_masks");
  GrayImage mask = GrayImage::Zero(12, 12);
  mask(3, 3) = 255;
  uqrpca::encode_png_gray((masks / "0001.png").string(), mask);
  uqrpca::encode_png_gray((masks / "0002.png").string(), mask);
  const fs::path bgdir = uqtest::scratch_dir("cli_syn_bg");
  uqrpca::encode_png_rgb((bgdir / "bg.png").string(), Frame::zero(12, 12));
  const fs::path out = uqtest::scratch_dir("cli_syn_out");
  const RunResult r = run_cli("synthesize --frames " + frames.string() + " --mask " +
                              masks.string() + " --background " + (bgdir / "bg.png").string() +
                              " --out " + out.string());
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(out / "0002.png"));

  // Shape mismatch is a runtime failure.
  const fs::path bigbg = uqtest::scratch_dir("cli_syn_bigbg");
  uqrpca::encode_png_rgb((bigbg / "bg.png").string(), Frame::zero(20, 20));
  const RunResult bad = run_cli("synthesize --frames " + frames.string() + " --mask " +
                                masks.string() + " --background " +
                                (bigbg / "bg.png").string() + " --out " + out.string());
  CHECK(bad.exit_code == 1);
}

TEST_CASE("cli: bench validates sizes and writes csv") {
  const fs::path dir = uqtest::scratch_dir("cli_bench");
  const fs::path csv = dir / "bench.csv";
  const RunResult r = run_cli("bench --rows 200 --cols 8,16 --iters 2 --seed 3 --csv " +
                              csv.string());
  CHECK(r.exit_code == 0);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "cols,qsvd_s,fwr1_s");

  CHECK(run_cli("bench --rows 200 --cols nonsense --csv " + csv.string()).exit_code == 2);
  CHECK(run_cli("bench --rows 0 --cols 8 --csv " + csv.string()).exit_code == 2);
}
