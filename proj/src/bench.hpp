#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "manifold.hpp"
#include "quaternion.hpp"

namespace uqrpca {

struct BenchSpec {
  Index rows = 10000;
  std::vector<Index> cols_list = {25, 50, 75, 100, 125, 150, 175, 200};
  int iters = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Rank-1 synthetic data: C = A*B with U(0,1) entries from the seeded RNG,
/// replicated across the three imaginary parts (re = 0).
QuaternionMatrix make_synthetic(const BenchSpec& spec, Index cols);

struct BenchRow {
  Index cols = 0;
  double qsvd_s = 0.0;   // mean seconds per iteration, full-decomposition path
  double fwr1_s = 0.0;   // mean seconds per iteration, tangent-space path
  bool valid = false;    // correctness gate: paths agreed within 1e-5 on every iteration
  double max_rel_err = 0.0;
};

/// For each column count, run the low-rank update via the full weighted-QSVD
/// path and via the tangent-space path, verifying per-iteration agreement
/// before trusting the timings. Two untimed warm-up iterations precede the
/// measured ones.
std::vector<BenchRow> run_bench(const BenchSpec& spec);

/// CSV with header "cols,qsvd_s,fwr1_s".
std::string bench_csv(const std::vector<BenchRow>& rows);
void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path);

}  // namespace uqrpca
