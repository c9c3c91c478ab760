#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "quaternion.hpp"

namespace uqtest {

using uqrpca::Index;
using uqrpca::QuaternionMatrix;
using uqrpca::RealMatrix;
using uqrpca::RealVector;

inline QuaternionMatrix random_quaternion(Index rows, Index cols, std::mt19937_64& rng,
                                          double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  QuaternionMatrix q(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      q.re(i, j) = gauss(rng);
      q.im_i(i, j) = gauss(rng);
      q.im_j(i, j) = gauss(rng);
      q.im_k(i, j) = gauss(rng);
    }
  }
  return q;
}

inline RealMatrix random_real(Index rows, Index cols, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  RealMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

// Random quaternion matrix with unitary columns (thin).
inline QuaternionMatrix random_unitary(Index rows, Index cols, std::mt19937_64& rng) {
  return uqrpca::qqr_thin(random_quaternion(rows, cols, rng)).Q;
}

inline double rel_error(const QuaternionMatrix& got, const QuaternionMatrix& want) {
  const double denom = uqrpca::frobenius_norm(want);
  return uqrpca::frobenius_norm(got - want) / (denom > 0.0 ? denom : 1.0);
}

// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(UQ_TEST_TMPDIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace uqtest
