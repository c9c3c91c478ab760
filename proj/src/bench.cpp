#include "bench.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace uqrpca {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Weighted shrink of a full spectrum, matching the core shrink rule with
// sigma past the last index treated as zero.
RealVector shrink_spectrum(const RealVector& sigma, double mu, double c1) {
  const Index k = sigma.size();
  RealVector out(k);
  const double eexp = std::exp(1e-4);
  for (Index l = 0; l < k; ++l) {
    const double sl = sigma(l);
    const double snext = (l + 1 < k) ? sigma(l + 1) : 0.0;
    const double omega = sl > 0.0 ? c1 * sl / ((snext + sl) * eexp) : 0.0;
    out(l) = std::max(sl - omega / mu, 0.0);
  }
  return out;
}

// Baseline: full-spectrum QSVD of Y (Gram route, the paper's own complexity
// model for this shape), weighted shrink, rank-r reconstruction, pure part.
// Vector triplets are materialized only for the ranks the threshold keeps,
// which is the cheapest faithful full-QSVD update; the trend comparison is
// conservative that way.
QuaternionMatrix slow_low_rank_update(const QuaternionMatrix& y, Index r, double mu, double c1) {
  QSvdResult s = qsvd(y, r + 1, SvdRoute::Gram);
  RealVector shrunk = shrink_spectrum(s.sigma, mu, c1);
  const Index keep = std::min(r, shrunk.size());
  return pure_part(qmul(scale_cols(s.U.block(0, 0, s.U.rows(), keep), shrunk.head(keep)),
                        conj_transpose(s.V.block(0, 0, s.V.rows(), keep))));
}

}  // namespace

void BenchSpec::validate() const {
  if (cols_list.empty()) throw ConfigError("bench: column list must not be empty");
  if (iters < 1) throw ConfigError("bench: iters must be >= 1");
  for (Index c : cols_list) {
    if (c < 1 || c > rows) throw ConfigError("bench: column counts must lie in [1, rows]");
  }
}

QuaternionMatrix make_synthetic(const BenchSpec& spec, Index cols) {
  std::mt19937_64 rng(spec.seed ^ static_cast<std::uint64_t>(cols));
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  RealVector a(spec.rows), b(cols);
  for (Index i = 0; i < spec.rows; ++i) a(i) = uni(rng);
  for (Index j = 0; j < cols; ++j) b(j) = uni(rng);
  const RealMatrix c = a * b.transpose();
  return {RealMatrix::Zero(spec.rows, cols), c, c, c};
}

std::vector<BenchRow> run_bench(const BenchSpec& spec) {
  spec.validate();
#if defined(__GLIBC__)
  // Matrix-sized allocations otherwise oscillate between heap reuse and
  // fresh mmap regions depending on the free-size history, which puts page
  // faults of wildly varying cost inside the timed region.
  mallopt(M_MMAP_MAX, 0);
  mallopt(M_TRIM_THRESHOLD, -1);
#endif
  constexpr double kGateTol = 1e-5;
  constexpr int kWarmup = 2;
  constexpr double kMu = 1.0;
  constexpr double kC1 = 1.0;
  constexpr Index kRank = 1;

  std::vector<BenchRow> rows;
  rows.reserve(spec.cols_list.size());
  for (Index cols : spec.cols_list) {
    const QuaternionMatrix d = make_synthetic(spec, cols);
    const double d_norm = frobenius_norm(d);

    BenchRow row;
    row.cols = cols;
    row.valid = true;

    // Correctness gate: the two paths must agree on every iteration before
    // any timing is trusted.
    {
      Rank1Factors factors = initial_factors(d, kRank);
      for (int it = 0; it < spec.iters; ++it) {
        const QuaternionMatrix slow = slow_low_rank_update(d, kRank, kMu, kC1);
        auto [fast, next] = low_rank_update(d, factors, kMu, kC1);
        factors = std::move(next);
        const double rel = frobenius_norm(fast - slow) / (d_norm > 0.0 ? d_norm : 1.0);
        row.max_rel_err = std::max(row.max_rel_err, rel);
        if (rel > kGateTol) row.valid = false;
      }
    }

    // Each path is timed in its own consecutive loop so neither perturbs the
    // other's cache and allocator state. Per-iteration times are averaged
    // with the single slowest iteration dropped (when more than one was
    // measured): a fresh-page fault burst in the first timed pass otherwise
    // dominates the mean of a fast path.
    const auto trimmed_mean = [](std::vector<double> samples) {
      if (samples.size() > 1) {
        samples.erase(std::max_element(samples.begin(), samples.end()));
      }
      double sum = 0.0;
      for (double s : samples) sum += s;
      return sum / static_cast<double>(samples.size());
    };
    {
      Rank1Factors factors = initial_factors(d, kRank);
      for (int it = 0; it < kWarmup; ++it) {
        auto [fast, next] = low_rank_update(d, factors, kMu, kC1);
        factors = std::move(next);
      }
      std::vector<double> samples;
      samples.reserve(static_cast<size_t>(spec.iters));
      for (int it = 0; it < spec.iters; ++it) {
        const auto t0 = Clock::now();
        auto [fast, next] = low_rank_update(d, factors, kMu, kC1);
        samples.push_back(seconds_since(t0));
        factors = std::move(next);
      }
      row.fwr1_s = trimmed_mean(std::move(samples));
    }
    {
      for (int it = 0; it < kWarmup; ++it) slow_low_rank_update(d, kRank, kMu, kC1);
      std::vector<double> samples;
      samples.reserve(static_cast<size_t>(spec.iters));
      for (int it = 0; it < spec.iters; ++it) {
        const auto t0 = Clock::now();
        slow_low_rank_update(d, kRank, kMu, kC1);
        samples.push_back(seconds_since(t0));
      }
      row.qsvd_s = trimmed_mean(std::move(samples));
    }
    rows.push_back(row);
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out << "cols,qsvd_s,fwr1_s\n";
  out.precision(9);
  for (const BenchRow& r : rows) {
    out << r.cols << "," << r.qsvd_s << "," << r.fwr1_s << "\n";
  }
  return out.str();
}

void write_bench_csv(const std::vector<BenchRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write benchmark CSV: " + path);
  out << bench_csv(rows);
}

}  // namespace uqrpca
