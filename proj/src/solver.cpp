#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tv.hpp"

namespace uqrpca {

double SolverConfig::resolved_rho1(int m, int n) const {
  return rho1 ? *rho1 : 2.0 / std::sqrt(static_cast<double>(m) * n);
}

double SolverConfig::resolved_rho2(int m, int n) const {
  return rho2 ? *rho2 : 0.035 * std::sqrt(static_cast<double>(m) * n);
}

void SolverConfig::validate() const {
  if (rank < 1) throw ConfigError("config: rank must be >= 1");
  if (iters < 1) throw ConfigError("config: iters must be >= 1");
  if (mu0 <= 0.0) throw ConfigError("config: mu0 must be positive");
  if (rho <= 1.0) throw ConfigError("config: rho must be > 1");
  if (rho1 && *rho1 <= 0.0) throw ConfigError("config: rho1 must be positive");
  if (rho2 && *rho2 <= 0.0) throw ConfigError("config: rho2 must be positive");
  if (eps <= 0.0) throw ConfigError("config: eps must be positive");
  if (block_h < 1 || block_w < 1) throw ConfigError("config: block size must be positive");
  if (fg_threshold < 0.0) throw ConfigError("config: fg_threshold must be nonnegative");
}

QuaternionMatrix update_E(const QuaternionMatrix& s, const QuaternionMatrix& f,
                          const QuaternionMatrix& y, double mu, double rho1) {
  if (mu <= 0.0 || rho1 <= 0.0) throw ConfigError("update_E: mu and rho1 must be positive");
  const QuaternionMatrix p = s - f + y * (1.0 / mu);
  const double tau = rho1 / mu;
  auto soft = [tau](const RealMatrix& ch) {
    return (ch.array().sign() * (ch.array().abs() - tau).max(0.0)).matrix();
  };
  const std::array<RealMatrix, 3> ch = split_channels(p);
  return cat_channels(soft(ch[0]), soft(ch[1]), soft(ch[2]));
}

QuaternionMatrix crib(const QuaternionMatrix& l) {
  const Index mn = l.rows(), t = l.cols();
  QuaternionMatrix out = l;
  out.re.setZero();

  auto replicate_rows = [t, mn](RealMatrix& ch) {
    std::vector<long> bins(static_cast<size_t>(t));
    for (Index row = 0; row < mn; ++row) {
      for (Index col = 0; col < t; ++col) {
        bins[static_cast<size_t>(col)] = std::lround(ch(row, col) * 255.0);
      }
      // Mode over quantized values; ties resolve to the smallest value.
      std::map<long, int> counts;
      for (long b : bins) ++counts[b];
      long mode_bin = bins[0];
      int best = 0;
      for (const auto& [bin, cnt] : counts) {
        if (cnt > best) {
          best = cnt;
          mode_bin = bin;
        }
      }
      Index first = 0;
      for (Index col = 0; col < t; ++col) {
        if (bins[static_cast<size_t>(col)] == mode_bin) {
          first = col;
          break;
        }
      }
      ch.row(row).setConstant(ch(row, first));
    }
  };

  replicate_rows(out.im_i);
  replicate_rows(out.im_j);
  replicate_rows(out.im_k);
  return out;
}

MaskSequence binarize_foreground(const QuaternionMatrix& f, double threshold, int m, int n) {
  if (threshold < 0.0) throw ConfigError("binarize_foreground: threshold must be nonnegative");
  if (static_cast<Index>(m) * n != f.rows()) {
    throw ShapeError("binarize_foreground: m*n does not match row count");
  }
  const double inv_sqrt3 = 1.0 / std::sqrt(3.0);
  MaskSequence masks(static_cast<size_t>(f.cols()));
  for (Index l = 0; l < f.cols(); ++l) {
    GrayImage mask(m, n);
    for (Index c = 0; c < n; ++c) {
      for (Index r = 0; r < m; ++r) {
        const Index p = c * m + r;
        const double mag = std::sqrt(f.im_i(p, l) * f.im_i(p, l) + f.im_j(p, l) * f.im_j(p, l) +
                                     f.im_k(p, l) * f.im_k(p, l)) *
                           inv_sqrt3;
        mask(r, c) = mag > threshold ? 255 : 0;
      }
    }
    masks[static_cast<size_t>(l)] = std::move(mask);
  }
  return masks;
}

Decomposition solve(const QuaternionMatrix& d, const SolverConfig& cfg,
                    const BlockPartition& part, const SaliencyMap& sal,
                    const SolveObserver& observer) {
  cfg.validate();
  if (!d.is_pure()) throw ConfigError("solve: data matrix must be pure");
  const Index mn = d.rows(), t = d.cols();
  if (mn < 1 || t < 1) throw ConfigError("solve: empty data matrix");
  if (static_cast<Index>(part.m) * part.n != mn || part.t != t) {
    throw ConfigError("solve: partition does not match the data geometry");
  }
  if (sal.sm.size() != static_cast<Index>(part.blocks.size())) {
    throw ConfigError("solve: saliency map does not match the partition");
  }

  const double rho1 = cfg.resolved_rho1(part.m, part.n);
  const double rho2 = cfg.resolved_rho2(part.m, part.n);
  const RealVector lambdas = lambda_for_blocks(sal, part.m, part.n);
  const double d_norm = frobenius_norm(d);
  const double d_scale = d_norm > 0.0 ? d_norm : 1.0;

  QuaternionMatrix S(mn, t), E(mn, t), F(mn, t), X(mn, t), Y(mn, t);
  Rank1Factors factors = initial_factors(d, cfg.rank);
  // Seed the background iterate from the truncated decomposition computed at
  // initialization. Starting L at zero makes the first sparse target
  // Y_S = D/2, which parks half of a static scene in S/F permanently (any
  // alpha-split of a static scene is a fixed point of the iteration).
  QuaternionMatrix L = pure_part(factors.dense());

  Decomposition dec;
  dec.history.reserve(static_cast<size_t>(cfg.iters));
  double mu = cfg.mu0;
  for (int k = 0; k < cfg.iters; ++k) {
    S = update_S(d, L, E, F, X, Y, S, mu, part, lambdas, cfg.c2, cfg.eps);

    const QuaternionMatrix y_l = d - S + X * (1.0 / mu);
    auto [l_next, f_next] = low_rank_update(y_l, factors, mu, cfg.c1);
    L = std::move(l_next);
    factors = std::move(f_next);

    E = update_E(S, F, Y, mu, rho1);
    F = update_F(S, E, Y, mu, rho2, part.m, part.n);

    X += mu * (d - L - S);
    Y += mu * (S - E - F);

    dec.history.push_back({mu, frobenius_norm(d - L - S) / d_scale,
                           frobenius_norm(S - E - F) / d_scale});
    if (observer) {
      const IterationStats& st = dec.history.back();
      observer({k, mu, st.primal_residual, st.coupling_residual, L, S, E, F, X, Y});
    }
    mu *= cfg.rho;
  }

  dec.L = std::move(L);
  dec.S = std::move(S);
  dec.E = std::move(E);
  dec.F = std::move(F);
  return dec;
}

}  // namespace uqrpca
