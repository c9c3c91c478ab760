#pragma once

#include <utility>

#include "quaternion.hpp"

namespace uqrpca {

/// Thin factored form U * diag(sigma) * V^H of the low-rank background,
/// carried across iterations instead of the dense matrix.
struct Rank1Factors {
  QuaternionMatrix U;  // mn x r
  RealVector sigma;    // r, nonnegative descending
  QuaternionMatrix V;  // t x r

  Index rank() const { return sigma.size(); }
  QuaternionMatrix dense() const { return qmul(scale_cols(U, sigma), conj_transpose(V)); }
};

/// Truncated qsvd of the data matrix; seeds the factor state. The Gram route
/// is forced because the row dimension (mn) dominates the frame count.
Rank1Factors initial_factors(const QuaternionMatrix& d, Index r);

/// The compact 2r x 2r core of the tangent-space projection.
struct SmallCore {
  QuaternionMatrix Q;
};

struct TangentCompact {
  SmallCore core;
  QuaternionMatrix Q1;  // t x r
  QuaternionMatrix Q2;  // mn x r
};

/// Project Y onto the tangent space at the current factors, in compact form:
///   Q1 R1 = qr((I - V V^H) Y^H U),  Q2 R2 = qr((I - U U^H) Y V),
///   core  = [[U^H Y V, R1^H], [R2, 0]],
/// so that [U, Q2] core [V, Q1]^H equals the dense projection
/// U U^H Y + Y V V^H - U U^H Y V V^H.
TangentCompact tangent_compact(const QuaternionMatrix& y, const Rank1Factors& f);

struct ShrunkCore {
  QuaternionMatrix Uq;  // 2r x 2r
  RealVector sigma;     // 2r shrunken values, descending
  QuaternionMatrix Vq;  // 2r x 2r
};

/// qsvd the core and apply the weighted shrink
///   sigma_l <- max(sigma_l - omega_l / mu, 0),
///   omega_l  = c1 * sigma_l / ((sigma_{l+1} + sigma_l) * exp(1e-4)),
/// with sigma past the last index treated as zero.
ShrunkCore weighted_shrink_core(const SmallCore& core, double mu, double c1);

/// Map the shrunken core back to the full space:
///   U <- [U, Q2] Uq(:, 1:r),  V <- [V, Q1] Vq(:, 1:r),  sigma <- leading r.
/// Factors are re-orthonormalized when drift exceeds 1e-8.
Rank1Factors retract(const Rank1Factors& f, const QuaternionMatrix& q1,
                     const QuaternionMatrix& q2, const ShrunkCore& s);

/// One fast low-rank update: tangent projection, 2r x 2r weighted shrink,
/// retraction, pure part. Never materializes an mn x t QSVD.
std::pair<QuaternionMatrix, Rank1Factors> low_rank_update(const QuaternionMatrix& y_l,
                                                          const Rank1Factors& f, double mu,
                                                          double c1);

}  // namespace uqrpca
