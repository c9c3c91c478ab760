#include <doctest.h>

#include <fstream>
#include <sstream>

#include "bench.hpp"
#include "test_support.hpp"

using namespace uqrpca;

TEST_SUITE_BEGIN("bench");

TEST_CASE("make_synthetic: determinism, range, rank 1") {
  BenchSpec spec;
  spec.rows = 300;
  spec.seed = 42;
  const QuaternionMatrix a = make_synthetic(spec, 20);
  const QuaternionMatrix b = make_synthetic(spec, 20);
  CHECK((a.im_i - b.im_i).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.im_j - b.im_j).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.re.cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.is_pure());

  // U(0,1) product entries stay in (0, 1).
  CHECK(a.im_i.minCoeff() >= 0.0);
  CHECK(a.im_i.maxCoeff() <= 1.0);
  // All three imaginary parts carry the same pattern.
  CHECK((a.im_i - a.im_j).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.im_i - a.im_k).cwiseAbs().maxCoeff() == 0.0);

  spec.seed = 43;
  const QuaternionMatrix c = make_synthetic(spec, 20);
  CHECK((a.im_i - c.im_i).cwiseAbs().maxCoeff() > 0.0);

  // Exactly one significant singular value (small instance: exact route).
  const RealVector sv = qsvd(a, std::nullopt, SvdRoute::Adjoint).sigma;
  CHECK(sv(0) > 1e-8);
  for (Index l = 1; l < sv.size(); ++l) CHECK(sv(l) <= 1e-10 * sv(0));
}

TEST_CASE("make_synthetic at the default shape is rank 1 via the gram route") {
  BenchSpec spec;
  spec.rows = 2000;
  spec.seed = 7;
  const QuaternionMatrix a = make_synthetic(spec, 40);
  const RealVector sv = qsvd(a, 3, SvdRoute::Gram).sigma;
  // The gram route resolves values down to ~sqrt(eps)*sigma_1.
  CHECK(sv(1) <= 1e-7 * sv(0));
}

TEST_CASE("run_bench: csv shape, agreement gate, determinism of values") {
  BenchSpec spec;
  spec.rows = 400;
  spec.cols_list = {10, 20};
  spec.iters = 3;
  spec.seed = 11;
  const std::vector<BenchRow> rows = run_bench(spec);
  REQUIRE(rows.size() == 2);
  for (const BenchRow& r : rows) {
    CHECK(r.valid);
    CHECK(r.max_rel_err <= 1e-5);
    CHECK(r.qsvd_s > 0.0);
    CHECK(r.fwr1_s > 0.0);
  }

  const std::string csv = bench_csv(rows);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "cols,qsvd_s,fwr1_s");
  int data_rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++data_rows;
  }
  CHECK(data_rows == 2);

  const auto path = uqtest::scratch_dir("bench") / "bench.csv";
  write_bench_csv(rows, path.string());
  std::ifstream file(path);
  CHECK(file.good());
  std::getline(file, line);
  CHECK(line == "cols,qsvd_s,fwr1_s");
}

TEST_CASE("spec validation") {
  BenchSpec bad;
  bad.cols_list = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.cols_list = {100000};
  bad.rows = 10;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.rows = 200000;
  bad.iters = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_SUITE_END();
