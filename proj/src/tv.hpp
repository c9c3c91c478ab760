#pragma once

#include "quaternion.hpp"

namespace uqrpca {

/// Isotropic 2D total variation with replicate boundary: differences past the
/// last row/column are zero.
double tv_norm(const RealMatrix& f);

/// Objective of the denoising subproblem: weight * tv_norm(x) + 0.5*||x - m||_F^2.
double tv_objective(const RealMatrix& x, const RealMatrix& m, double weight);

/// Solve min_x weight * tv_norm(x) + 0.5 * ||x - m||_F^2 by fast gradient
/// projection on the dual with step 1/(8*weight). Stops when the objective
/// change falls below tol*(1 + |objective|) or after max_iters sweeps.
RealMatrix tv_denoise(const RealMatrix& m, double weight, int max_iters = 50, double tol = 1e-5);

/// Per-channel, per-frame TV denoising of M = S - E + Y/mu with weight
/// rho2/mu. Columns are reshaped to m x n frames (column-major), denoised
/// independently, and reassembled into a pure quaternion matrix.
QuaternionMatrix update_F(const QuaternionMatrix& s, const QuaternionMatrix& e,
                          const QuaternionMatrix& y, double mu, double rho2, int m, int n);

}  // namespace uqrpca
