#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "manifold.hpp"
#include "quaternion.hpp"
#include "sparse.hpp"
#include "video.hpp"

namespace uqrpca {

struct SolverConfig {
  int rank = 1;
  int iters = 20;
  double mu0 = 1e-2;
  double rho = 1.5;                 // mu growth factor per iteration
  std::optional<double> rho1;      // default 2 / sqrt(m*n)
  std::optional<double> rho2;      // default 0.035 * sqrt(m*n)
  double c1 = 1.0;
  double c2 = 0.1;
  double eps = 1e-4;
  int block_h = 16, block_w = 16;
  double fg_threshold = 0.11;

  double resolved_rho1(int m, int n) const;
  double resolved_rho2(int m, int n) const;
  void validate() const;
};

struct IterationStats {
  double mu;                // penalty value used by the iteration
  double primal_residual;   // ||D - L - S||_F / ||D||_F
  double coupling_residual; // ||S - E - F||_F / ||D||_F
};

struct Decomposition {
  QuaternionMatrix L;  // low-rank background, pre-CR1B
  QuaternionMatrix S;  // sparse component
  QuaternionMatrix E;  // noise component
  QuaternionMatrix F;  // denoised target component
  std::vector<IterationStats> history;
};

/// Observation hook fired after each full iteration (multipliers included);
/// used by tests and the CLI progress line.
struct IterationView {
  int iter;
  double mu;  // penalty used by this iteration
  double primal_residual;
  double coupling_residual;
  const QuaternionMatrix& L;
  const QuaternionMatrix& S;
  const QuaternionMatrix& E;
  const QuaternionMatrix& F;
  const QuaternionMatrix& X;
  const QuaternionMatrix& Y;
};
using SolveObserver = std::function<void(const IterationView&)>;

/// Run the fixed-iteration ADMM on a pure data matrix. All variables start at
/// zero; the factor state is seeded from a truncated qsvd of D. Deterministic
/// for fixed inputs.
Decomposition solve(const QuaternionMatrix& d, const SolverConfig& cfg,
                    const BlockPartition& part, const SaliencyMap& sal,
                    const SolveObserver& observer = {});

/// Per-channel soft thresholding of P = S - F + Y/mu at level rho1/mu.
QuaternionMatrix update_E(const QuaternionMatrix& s, const QuaternionMatrix& f,
                          const QuaternionMatrix& y, double mu, double rho1);

/// Column-replicate each channel row at its most frequent value (values
/// quantized to 1/255 bins; ties resolved toward the smallest value; the
/// first column holding the mode provides the representative). The output
/// satisfies the ideal color low rank property: every channel has rank <= 1
/// with identical columns.
QuaternionMatrix crib(const QuaternionMatrix& l);

/// Per frame, mask = 255 where sqrt(Fi^2 + Fj^2 + Fk^2)/sqrt(3) > threshold.
MaskSequence binarize_foreground(const QuaternionMatrix& f, double threshold, int m, int n);

}  // namespace uqrpca
