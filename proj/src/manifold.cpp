#include "manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace uqrpca {

namespace {

constexpr double kWeightEps = 1e-4;   // epsilon in the exp() weight denominator
constexpr double kFactorTol = 1e-6;   // unitarity defect that rejects input factors
constexpr double kDriftTol = 1e-8;    // drift that triggers re-orthonormalization

double unitarity_defect(const QuaternionMatrix& q) {
  QuaternionMatrix g = qmul(conj_transpose(q), q);
  g.re -= RealMatrix::Identity(q.cols(), q.cols());
  return frobenius_norm(g);
}

// pure_part(U * diag(sigma) * V^H) without materializing the real part or an
// intermediate product; this is the hot write of every solver iteration.
// Each output part is one (mn x 4r) * (4r x t) product so the big matrix is
// streamed exactly once.
QuaternionMatrix pure_reconstruction(const Rank1Factors& f) {
  const Index mn = f.U.rows(), t = f.V.rows(), r = f.rank();
  const QuaternionMatrix w = scale_cols(f.V, f.sigma);
  RealMatrix us(mn, 4 * r);
  us << f.U.re, f.U.im_i, f.U.im_j, f.U.im_k;

  // Hamilton product against w^H: b = (w.re, -w.im_i, -w.im_j, -w.im_k)^T,
  // combined per output part with the signs of the product table.
  RealMatrix bi(4 * r, t), bj(4 * r, t), bk(4 * r, t);
  bi << -w.im_i.transpose(), w.re.transpose(), -w.im_k.transpose(), w.im_j.transpose();
  bj << -w.im_j.transpose(), w.im_k.transpose(), w.re.transpose(), -w.im_i.transpose();
  bk << -w.im_k.transpose(), -w.im_j.transpose(), w.im_i.transpose(), w.re.transpose();

  QuaternionMatrix l;
  l.re = RealMatrix::Zero(mn, t);
  l.im_i.noalias() = us * bi;
  l.im_j.noalias() = us * bj;
  l.im_k.noalias() = us * bk;
  return l;
}

}  // namespace

Rank1Factors initial_factors(const QuaternionMatrix& d, Index r) {
  QSvdResult s = qsvd(d, r, SvdRoute::Gram);
  return {std::move(s.U), std::move(s.sigma), std::move(s.V)};
}

TangentCompact tangent_compact(const QuaternionMatrix& y, const Rank1Factors& f) {
  const Index r = f.rank();
  if (y.rows() != f.U.rows() || y.cols() != f.V.rows()) {
    throw ShapeError("tangent_compact: Y shape does not match the factors");
  }
  if (unitarity_defect(f.U) > kFactorTol || unitarity_defect(f.V) > kFactorTol) {
    throw FactorError("tangent_compact: factors are not unitary within tolerance");
  }

  const QuaternionMatrix yv = qmul(y, f.V);                      // mn x r
  const QuaternionMatrix uhy = qmul(conj_transpose(f.U), y);     // r x t
  const QuaternionMatrix m = qmul(uhy, f.V);                     // r x r

  // (I - V V^H) Y^H U  and  (I - U U^H) Y V
  const QuaternionMatrix a1 = conj_transpose(uhy) - qmul(f.V, conj_transpose(m));
  const QuaternionMatrix a2 = yv - qmul(f.U, m);
  QqrResult qr1 = qqr_thin(a1);
  QqrResult qr2 = qqr_thin(a2);

  QuaternionMatrix core(2 * r, 2 * r);
  const QuaternionMatrix r1h = conj_transpose(qr1.R);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < r; ++j) {
      core.set(i, j, m.at(i, j));
      core.set(i, r + j, r1h.at(i, j));
      core.set(r + i, j, qr2.R.at(i, j));
    }
  }
  return {SmallCore{std::move(core)}, std::move(qr1.Q), std::move(qr2.Q)};
}

ShrunkCore weighted_shrink_core(const SmallCore& core, double mu, double c1) {
  if (mu <= 0.0) throw ConfigError("weighted_shrink_core: mu must be positive");
  QSvdResult s = qsvd(core.Q, std::nullopt, SvdRoute::Adjoint);
  const Index k = s.sigma.size();
  RealVector shrunk(k);
  const double eexp = std::exp(kWeightEps);
  for (Index l = 0; l < k; ++l) {
    const double sl = s.sigma(l);
    const double snext = (l + 1 < k) ? s.sigma(l + 1) : 0.0;
    const double omega = sl > 0.0 ? c1 * sl / ((snext + sl) * eexp) : 0.0;
    shrunk(l) = std::max(sl - omega / mu, 0.0);
  }
  // The weights are not monotone in sigma, so restore descending order.
  std::vector<Index> order(static_cast<size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return shrunk(a) > shrunk(b); });
  RealVector sorted(k);
  QuaternionMatrix uq(s.U.rows(), k), vq(s.V.rows(), k);
  for (Index l = 0; l < k; ++l) {
    sorted(l) = shrunk(order[static_cast<size_t>(l)]);
    for (Index i = 0; i < s.U.rows(); ++i)
      uq.set(i, l, s.U.at(i, order[static_cast<size_t>(l)]));
    for (Index i = 0; i < s.V.rows(); ++i)
      vq.set(i, l, s.V.at(i, order[static_cast<size_t>(l)]));
  }
  return {std::move(uq), std::move(sorted), std::move(vq)};
}

Rank1Factors retract(const Rank1Factors& f, const QuaternionMatrix& q1,
                     const QuaternionMatrix& q2, const ShrunkCore& s) {
  const Index r = f.rank();
  if (q1.rows() != f.V.rows() || q2.rows() != f.U.rows() || q1.cols() != r || q2.cols() != r ||
      s.sigma.size() != 2 * r) {
    throw ShapeError("retract: inconsistent shapes");
  }
  Rank1Factors out;
  out.U = qmul(hcat(f.U, q2), s.Uq.block(0, 0, 2 * r, r));
  out.V = qmul(hcat(f.V, q1), s.Vq.block(0, 0, 2 * r, r));
  out.sigma = s.sigma.head(r);

  if (unitarity_defect(out.U) > kDriftTol || unitarity_defect(out.V) > kDriftTol) {
    // Re-orthonormalize and push the R factors through a small exact SVD of
    // Ru * diag(sigma) * Rv^H so the represented matrix is unchanged.
    QqrResult qu = qqr_thin(out.U);
    QqrResult qv = qqr_thin(out.V);
    QuaternionMatrix mid =
        qmul(qmul(qu.R, QuaternionMatrix::from_real(RealMatrix(out.sigma.asDiagonal()))),
             conj_transpose(qv.R));
    QSvdResult ms = qsvd(mid, std::nullopt, SvdRoute::Adjoint);
    out.U = qmul(qu.Q, ms.U);
    out.V = qmul(qv.Q, ms.V);
    out.sigma = ms.sigma;
  }
  return out;
}

std::pair<QuaternionMatrix, Rank1Factors> low_rank_update(const QuaternionMatrix& y_l,
                                                          const Rank1Factors& f, double mu,
                                                          double c1) {
  TangentCompact tc = tangent_compact(y_l, f);
  ShrunkCore sc = weighted_shrink_core(tc.core, mu, c1);
  Rank1Factors next = retract(f, tc.Q1, tc.Q2, sc);
  QuaternionMatrix l = pure_reconstruction(next);
  return {std::move(l), std::move(next)};
}

}  // namespace uqrpca
