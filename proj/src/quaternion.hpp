#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <optional>

#include "errors.hpp"

namespace uqrpca {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Scalar quaternion w + x*i + y*j + z*k. Used for entrywise algorithms
/// (Householder QR, phase normalization); bulk storage lives in
/// QuaternionMatrix as four real matrices.
struct Quat {
  double w = 0.0, x = 0.0, y = 0.0, z = 0.0;

  double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  Quat conj() const { return {w, -x, -y, -z}; }
  bool is_zero() const { return w == 0.0 && x == 0.0 && y == 0.0 && z == 0.0; }

  Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  Quat operator*(const Quat& b) const {
    return {w * b.w - x * b.x - y * b.y - z * b.z,
            w * b.x + x * b.w + y * b.z - z * b.y,
            w * b.y - x * b.z + y * b.w + z * b.x,
            w * b.z + x * b.y - y * b.x + z * b.w};
  }
};

/// Quaternion matrix stored as four real part matrices of identical shape.
/// The real part is `re`; a matrix is pure when `re` is identically zero
/// (the carrier for RGB data: channels map to im_i/im_j/im_k).
class QuaternionMatrix {
 public:
  RealMatrix re, im_i, im_j, im_k;

  QuaternionMatrix() = default;
  QuaternionMatrix(Index rows, Index cols)
      : re(RealMatrix::Zero(rows, cols)),
        im_i(RealMatrix::Zero(rows, cols)),
        im_j(RealMatrix::Zero(rows, cols)),
        im_k(RealMatrix::Zero(rows, cols)) {}
  QuaternionMatrix(RealMatrix re_, RealMatrix i_, RealMatrix j_, RealMatrix k_)
      : re(std::move(re_)), im_i(std::move(i_)), im_j(std::move(j_)), im_k(std::move(k_)) {
    if (im_i.rows() != re.rows() || im_i.cols() != re.cols() || im_j.rows() != re.rows() ||
        im_j.cols() != re.cols() || im_k.rows() != re.rows() || im_k.cols() != re.cols()) {
      throw ShapeError("quaternion parts must share one shape");
    }
  }

  static QuaternionMatrix zero(Index rows, Index cols) { return QuaternionMatrix(rows, cols); }
  static QuaternionMatrix identity(Index n) {
    QuaternionMatrix q(n, n);
    q.re = RealMatrix::Identity(n, n);
    return q;
  }
  static QuaternionMatrix from_real(const RealMatrix& r) {
    QuaternionMatrix q(r.rows(), r.cols());
    q.re = r;
    return q;
  }

  Index rows() const { return re.rows(); }
  Index cols() const { return re.cols(); }

  bool is_pure() const { return re.size() == 0 || re.cwiseAbs().maxCoeff() == 0.0; }

  Quat at(Index i, Index j) const { return {re(i, j), im_i(i, j), im_j(i, j), im_k(i, j)}; }
  void set(Index i, Index j, const Quat& q) {
    re(i, j) = q.w;
    im_i(i, j) = q.x;
    im_j(i, j) = q.y;
    im_k(i, j) = q.z;
  }

  QuaternionMatrix block(Index i, Index j, Index p, Index q) const {
    return {re.block(i, j, p, q), im_i.block(i, j, p, q), im_j.block(i, j, p, q),
            im_k.block(i, j, p, q)};
  }
  QuaternionMatrix col(Index j) const { return block(0, j, rows(), 1); }

  QuaternionMatrix& operator+=(const QuaternionMatrix& o);
  QuaternionMatrix& operator-=(const QuaternionMatrix& o);
  QuaternionMatrix& operator*=(double s);
};

QuaternionMatrix operator+(const QuaternionMatrix& a, const QuaternionMatrix& b);
QuaternionMatrix operator-(const QuaternionMatrix& a, const QuaternionMatrix& b);
QuaternionMatrix operator*(const QuaternionMatrix& a, double s);
QuaternionMatrix operator*(double s, const QuaternionMatrix& a);

/// Hamilton matrix product.
QuaternionMatrix qmul(const QuaternionMatrix& a, const QuaternionMatrix& b);

/// Conjugate transpose: parts transposed, imaginary parts negated.
QuaternionMatrix conj_transpose(const QuaternionMatrix& a);

/// sqrt of the sum over entries of all four squared parts.
double frobenius_norm(const QuaternionMatrix& a);

/// Real inner product: sum of the four partwise elementwise products.
/// real_inner(x, x) == frobenius_norm(x)^2.
double real_inner(const QuaternionMatrix& x, const QuaternionMatrix& y);

/// Zero the real part, keep the imaginary parts. Idempotent.
QuaternionMatrix pure_part(const QuaternionMatrix& a);

/// Assemble a pure quaternion matrix from three channel matrices
/// (r -> im_i, g -> im_j, b -> im_k).
QuaternionMatrix cat_channels(const RealMatrix& r, const RealMatrix& g, const RealMatrix& b);

/// Inverse of cat_channels; the real part is dropped.
std::array<RealMatrix, 3> split_channels(const QuaternionMatrix& a);

/// Complex adjoint representation: the 2m x 2n complex matrix
/// [N_a, N_b; -conj(N_b), conj(N_a)] with N_a = re + i*im_i, N_b = im_j + i*im_k.
struct ComplexAdjoint {
  ComplexMatrix data;

  /// Validate the block structure of an arbitrary complex matrix before
  /// wrapping it. Deviations beyond `tol` (absolute) raise
  /// AdjointStructureError.
  static ComplexAdjoint from_matrix(ComplexMatrix c, double tol = 1e-12);

  bool is_valid_adjoint(double tol = 0.0) const;
  Index qrows() const { return data.rows() / 2; }
  Index qcols() const { return data.cols() / 2; }
};

ComplexAdjoint to_adjoint(const QuaternionMatrix& a);

/// Inverse of to_adjoint. The redundant blocks are averaged, so inputs that
/// satisfy the structure only approximately (within the from_matrix
/// tolerance) are symmetrized.
QuaternionMatrix from_adjoint(const ComplexAdjoint& c);

struct QSvdResult {
  QuaternionMatrix U;   // m x r, quaternion-unitary columns
  RealVector sigma;     // r, nonnegative, descending
  QuaternionMatrix V;   // n x r, quaternion-unitary columns
};

enum class SvdRoute {
  Auto,     // Gram for strongly rectangular matrices, adjoint otherwise
  Adjoint,  // complex SVD of the 2m x 2n adjoint
  Gram,     // eigendecomposition of C^H C (or C C^H), left vectors by division
};

/// Quaternion SVD via the complex adjoint. Singular values of the adjoint
/// come in pairs; one representative per pair yields the quaternion triplets.
/// `truncate` limits the number of returned triplets.
QSvdResult qsvd(const QuaternionMatrix& a, std::optional<Index> truncate = std::nullopt,
                SvdRoute route = SvdRoute::Auto);

struct QqrResult {
  QuaternionMatrix Q;  // m x r, quaternion-unitary columns
  QuaternionMatrix R;  // r x r, upper triangular, real nonnegative diagonal
};

/// Thin Householder QR of a tall quaternion matrix (m >= r).
QqrResult qqr_thin(const QuaternionMatrix& a);

/// Singular value thresholding: U * diag(max(sigma - tau, 0)) * V^H.
/// As the proximal map of the quaternion nuclear norm against
/// ||D - L||_F^2 (no 1/2 factor), the threshold tau corresponds to a
/// nuclear-norm weight of 2*tau.
QuaternionMatrix qsvt(const QuaternionMatrix& a, double tau);

/// Horizontal concatenation [a, b].
QuaternionMatrix hcat(const QuaternionMatrix& a, const QuaternionMatrix& b);

/// a * diag(s): scale column l by s[l].
QuaternionMatrix scale_cols(const QuaternionMatrix& a, const RealVector& s);

}  // namespace uqrpca
