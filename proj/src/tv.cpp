#include "tv.hpp"

#include <cmath>

#include "parallel.hpp"

namespace uqrpca {

namespace {

// Forward differences with replicate boundary (zero past the last row/col).
void gradient(const RealMatrix& x, RealMatrix& gr, RealMatrix& gc) {
  const Index m = x.rows(), n = x.cols();
  gr.setZero(m, n);
  gc.setZero(m, n);
  if (m > 1) gr.topRows(m - 1) = x.bottomRows(m - 1) - x.topRows(m - 1);
  if (n > 1) gc.leftCols(n - 1) = x.rightCols(n - 1) - x.leftCols(n - 1);
}

// Adjoint of the gradient (negative divergence): <grad x, (p,q)> = <x, div*(p,q)>.
RealMatrix gradient_adjoint(const RealMatrix& p, const RealMatrix& q) {
  const Index m = p.rows(), n = p.cols();
  RealMatrix out = RealMatrix::Zero(m, n);
  if (m > 1) {
    out.topRows(m - 1) -= p.topRows(m - 1);
    out.bottomRows(m - 1) += p.topRows(m - 1);
  }
  if (n > 1) {
    out.leftCols(n - 1) -= q.leftCols(n - 1);
    out.rightCols(n - 1) += q.leftCols(n - 1);
  }
  return out;
}

// Project each (p,q) pair onto the unit 2-ball (isotropic coupling).
void project_ball(RealMatrix& p, RealMatrix& q) {
  RealMatrix mag = (p.array().square() + q.array().square()).sqrt().max(1.0);
  p.array() /= mag.array();
  q.array() /= mag.array();
}

}  // namespace

double tv_norm(const RealMatrix& f) {
  RealMatrix gr, gc;
  gradient(f, gr, gc);
  return (gr.array().square() + gc.array().square()).sqrt().sum();
}

double tv_objective(const RealMatrix& x, const RealMatrix& m, double weight) {
  return weight * tv_norm(x) + 0.5 * (x - m).squaredNorm();
}

RealMatrix tv_denoise(const RealMatrix& m, double weight, int max_iters, double tol) {
  if (weight <= 0.0) throw ConfigError("tv_denoise: weight must be positive");
  if (max_iters < 1) throw ConfigError("tv_denoise: max_iters must be >= 1");
  const Index rows = m.rows(), cols = m.cols();

  RealMatrix p = RealMatrix::Zero(rows, cols), q = RealMatrix::Zero(rows, cols);
  RealMatrix rp = p, rq = q;
  RealMatrix pp = p, pq = q;  // previous iterate for the momentum step
  const double step = 1.0 / (8.0 * weight);

  RealMatrix x = m;
  double prev_obj = tv_objective(x, m, weight);
  double t = 1.0;
  RealMatrix gr, gc;
  for (int it = 0; it < max_iters; ++it) {
    x = m - weight * gradient_adjoint(rp, rq);
    gradient(x, gr, gc);
    p = rp + step * gr;
    q = rq + step * gc;
    project_ball(p, q);

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = (t - 1.0) / t_next;
    rp = p + beta * (p - pp);
    rq = q + beta * (q - pq);
    pp = p;
    pq = q;
    t = t_next;

    const double obj = tv_objective(m - weight * gradient_adjoint(p, q), m, weight);
    if (std::abs(obj - prev_obj) <= tol * (1.0 + std::abs(obj))) {
      prev_obj = obj;
      break;
    }
    prev_obj = obj;
  }
  return m - weight * gradient_adjoint(p, q);
}

QuaternionMatrix update_F(const QuaternionMatrix& s, const QuaternionMatrix& e,
                          const QuaternionMatrix& y, double mu, double rho2, int m, int n) {
  if (mu <= 0.0 || rho2 <= 0.0) throw ConfigError("update_F: mu and rho2 must be positive");
  const Index mn = s.rows(), t = s.cols();
  if (static_cast<Index>(m) * n != mn) throw ShapeError("update_F: m*n does not match row count");

  const QuaternionMatrix mm = s - e + y * (1.0 / mu);
  const std::array<RealMatrix, 3> channels = split_channels(mm);
  std::array<RealMatrix, 3> out;
  const double weight = rho2 / mu;

  for (int c = 0; c < 3; ++c) {
    out[static_cast<size_t>(c)].resize(mn, t);
    const RealMatrix& src = channels[static_cast<size_t>(c)];
    RealMatrix& dst = out[static_cast<size_t>(c)];
    parallel_for(t, [&](Index l) {
      RealMatrix frame = Eigen::Map<const RealMatrix>(src.col(l).data(), m, n);
      RealMatrix den = tv_denoise(frame, weight);
      dst.col(l) = Eigen::Map<const RealVector>(den.data(), mn);
    });
  }
  return cat_channels(out[0], out[1], out[2]);
}

}  // namespace uqrpca
