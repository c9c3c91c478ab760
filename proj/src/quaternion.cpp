#include "quaternion.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

namespace uqrpca {

namespace {

void check_same_shape(const QuaternionMatrix& a, const QuaternionMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
}

}  // namespace

QuaternionMatrix& QuaternionMatrix::operator+=(const QuaternionMatrix& o) {
  check_same_shape(*this, o, "operator+=");
  re += o.re;
  im_i += o.im_i;
  im_j += o.im_j;
  im_k += o.im_k;
  return *this;
}

QuaternionMatrix& QuaternionMatrix::operator-=(const QuaternionMatrix& o) {
  check_same_shape(*this, o, "operator-=");
  re -= o.re;
  im_i -= o.im_i;
  im_j -= o.im_j;
  im_k -= o.im_k;
  return *this;
}

QuaternionMatrix& QuaternionMatrix::operator*=(double s) {
  re *= s;
  im_i *= s;
  im_j *= s;
  im_k *= s;
  return *this;
}

QuaternionMatrix operator+(const QuaternionMatrix& a, const QuaternionMatrix& b) {
  QuaternionMatrix r = a;
  r += b;
  return r;
}

QuaternionMatrix operator-(const QuaternionMatrix& a, const QuaternionMatrix& b) {
  QuaternionMatrix r = a;
  r -= b;
  return r;
}

QuaternionMatrix operator*(const QuaternionMatrix& a, double s) {
  QuaternionMatrix r = a;
  r *= s;
  return r;
}

QuaternionMatrix operator*(double s, const QuaternionMatrix& a) { return a * s; }

QuaternionMatrix qmul(const QuaternionMatrix& a, const QuaternionMatrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("qmul: inner dimensions disagree (" + std::to_string(a.cols()) + " vs " +
                     std::to_string(b.rows()) + ")");
  }
  QuaternionMatrix c;
  c.re = a.re * b.re - a.im_i * b.im_i - a.im_j * b.im_j - a.im_k * b.im_k;
  c.im_i = a.re * b.im_i + a.im_i * b.re + a.im_j * b.im_k - a.im_k * b.im_j;
  c.im_j = a.re * b.im_j - a.im_i * b.im_k + a.im_j * b.re + a.im_k * b.im_i;
  c.im_k = a.re * b.im_k + a.im_i * b.im_j - a.im_j * b.im_i + a.im_k * b.re;
  return c;
}

QuaternionMatrix conj_transpose(const QuaternionMatrix& a) {
  return {a.re.transpose(), (-a.im_i).transpose(), (-a.im_j).transpose(),
          (-a.im_k).transpose()};
}

double frobenius_norm(const QuaternionMatrix& a) {
  return std::sqrt(a.re.squaredNorm() + a.im_i.squaredNorm() + a.im_j.squaredNorm() +
                   a.im_k.squaredNorm());
}

double real_inner(const QuaternionMatrix& x, const QuaternionMatrix& y) {
  check_same_shape(x, y, "real_inner");
  return x.re.cwiseProduct(y.re).sum() + x.im_i.cwiseProduct(y.im_i).sum() +
         x.im_j.cwiseProduct(y.im_j).sum() + x.im_k.cwiseProduct(y.im_k).sum();
}

QuaternionMatrix pure_part(const QuaternionMatrix& a) {
  QuaternionMatrix p = a;
  p.re.setZero();
  return p;
}

QuaternionMatrix cat_channels(const RealMatrix& r, const RealMatrix& g, const RealMatrix& b) {
  if (r.rows() != g.rows() || r.cols() != g.cols() || r.rows() != b.rows() ||
      r.cols() != b.cols()) {
    throw ShapeError("cat_channels: channel shapes disagree");
  }
  return {RealMatrix::Zero(r.rows(), r.cols()), r, g, b};
}

std::array<RealMatrix, 3> split_channels(const QuaternionMatrix& a) {
  return {a.im_i, a.im_j, a.im_k};
}

ComplexAdjoint to_adjoint(const QuaternionMatrix& a) {
  const Index m = a.rows(), n = a.cols();
  ComplexMatrix c(2 * m, 2 * n);
  const std::complex<double> I(0.0, 1.0);
  ComplexMatrix na = a.re.cast<std::complex<double>>() + I * a.im_i.cast<std::complex<double>>();
  ComplexMatrix nb = a.im_j.cast<std::complex<double>>() + I * a.im_k.cast<std::complex<double>>();
  c.topLeftCorner(m, n) = na;
  c.topRightCorner(m, n) = nb;
  c.bottomLeftCorner(m, n) = -nb.conjugate();
  c.bottomRightCorner(m, n) = na.conjugate();
  return ComplexAdjoint{std::move(c)};
}

bool ComplexAdjoint::is_valid_adjoint(double tol) const {
  if (data.rows() % 2 != 0 || data.cols() % 2 != 0) return false;
  const Index m = qrows(), n = qcols();
  const double dev_bl = (data.bottomLeftCorner(m, n) + data.topRightCorner(m, n).conjugate())
                            .cwiseAbs()
                            .maxCoeff();
  const double dev_br = (data.bottomRightCorner(m, n) - data.topLeftCorner(m, n).conjugate())
                            .cwiseAbs()
                            .maxCoeff();
  return dev_bl <= tol && dev_br <= tol;
}

ComplexAdjoint ComplexAdjoint::from_matrix(ComplexMatrix c, double tol) {
  ComplexAdjoint adj{std::move(c)};
  if (adj.data.rows() % 2 != 0 || adj.data.cols() % 2 != 0) {
    throw AdjointStructureError("adjoint matrix dimensions must be even");
  }
  if (!adj.is_valid_adjoint(tol)) {
    throw AdjointStructureError("matrix violates the complex-adjoint block structure");
  }
  return adj;
}

QuaternionMatrix from_adjoint(const ComplexAdjoint& c) {
  const Index m = c.qrows(), n = c.qcols();
  ComplexMatrix na = (c.data.topLeftCorner(m, n) + c.data.bottomRightCorner(m, n).conjugate()) / 2.0;
  ComplexMatrix nb = (c.data.topRightCorner(m, n) - c.data.bottomLeftCorner(m, n).conjugate()) / 2.0;
  return {na.real(), na.imag(), nb.real(), nb.imag()};
}

QuaternionMatrix hcat(const QuaternionMatrix& a, const QuaternionMatrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("hcat: row counts disagree");
  QuaternionMatrix c(a.rows(), a.cols() + b.cols());
  c.re << a.re, b.re;
  c.im_i << a.im_i, b.im_i;
  c.im_j << a.im_j, b.im_j;
  c.im_k << a.im_k, b.im_k;
  return c;
}

QuaternionMatrix scale_cols(const QuaternionMatrix& a, const RealVector& s) {
  if (s.size() != a.cols()) throw ShapeError("scale_cols: vector length != column count");
  QuaternionMatrix c = a;
  c.re = c.re * s.asDiagonal();
  c.im_i = c.im_i * s.asDiagonal();
  c.im_j = c.im_j * s.asDiagonal();
  c.im_k = c.im_k * s.asDiagonal();
  return c;
}

namespace {

// J * conj(u) with J = [0, I; -I, 0]: the quaternionic partner of an
// adjoint-space column. Always orthogonal to u.
ComplexVector j_conj(const ComplexVector& u) {
  const Index m = u.size() / 2;
  ComplexVector v(u.size());
  v.head(m) = u.tail(m).conjugate();
  v.tail(m) = -u.head(m).conjugate();
  return v;
}

// Build the quaternion column encoded by an adjoint-space column
// u = [u1; u2]: the quaternion vector u1 + (-conj(u2)) j.
void set_quaternion_column(QuaternionMatrix& q, Index col, const ComplexVector& u) {
  const Index m = u.size() / 2;
  q.re.col(col) = u.head(m).real();
  q.im_i.col(col) = u.head(m).imag();
  q.im_j.col(col) = -u.tail(m).real();
  q.im_k.col(col) = u.tail(m).imag();
}

// Right-multiply column `col` by a unit quaternion.
void right_scale_column(QuaternionMatrix& q, Index col, const Quat& w) {
  for (Index i = 0; i < q.rows(); ++i) q.set(i, col, q.at(i, col) * w);
}

// Fix the phase of column l of U so its first significant entry is real
// nonnegative; V gets the same right factor so U sigma V^H is unchanged.
void fix_phase(QuaternionMatrix& u, QuaternionMatrix& v, Index l) {
  Quat pivot{};
  for (Index i = 0; i < u.rows(); ++i) {
    Quat q = u.at(i, l);
    if (q.norm() > 1e-12) {
      pivot = q;
      break;
    }
  }
  if (pivot.is_zero()) return;
  const Quat w = pivot.conj() * (1.0 / pivot.norm());
  right_scale_column(u, l, w);
  right_scale_column(v, l, w);
}

double orthonormality_defect(const QuaternionMatrix& q) {
  const Index r = q.cols();
  QuaternionMatrix g = qmul(conj_transpose(q), q);
  g.re -= RealMatrix::Identity(r, r);
  return frobenius_norm(g);
}

// Quaternionic Gram-Schmidt over a degenerate singular-value group: select
// complex columns whose quaternionic planes {w, J conj(w)} are mutually
// orthogonal and span the group subspace.
std::vector<ComplexVector> quaternionize_group(std::vector<ComplexVector> basis,
                                               size_t max_reps = SIZE_MAX) {
  std::vector<ComplexVector> picked;
  const size_t want = std::min(basis.size() / 2, max_reps);
  while (picked.size() < want && !basis.empty()) {
    ComplexVector w = basis.front();
    // Re-orthogonalize against already-picked planes for safety.
    for (const ComplexVector& p : picked) {
      const ComplexVector pj = j_conj(p);
      w -= p * (p.dot(w));
      w -= pj * (pj.dot(w));
    }
    const double nw = w.norm();
    if (nw < 1e-10) {
      basis.erase(basis.begin());
      continue;
    }
    w /= nw;
    picked.push_back(w);
    const ComplexVector wj = j_conj(w);
    std::vector<ComplexVector> next;
    for (size_t i = 1; i < basis.size(); ++i) {
      ComplexVector b = basis[i];
      b -= w * (w.dot(b));
      b -= wj * (wj.dot(b));
      if (b.norm() > 1e-10) next.push_back(b.normalized());
    }
    basis = std::move(next);
  }
  return picked;
}

// Deterministic orthonormal completion used when a requested triplet falls in
// an exactly-zero singular subspace (e.g. truncated qsvd of a zero matrix).
ComplexVector canonical_null_column(const std::vector<ComplexVector>& existing, Index dim2) {
  for (Index c = 0; c < dim2; ++c) {
    ComplexVector e = ComplexVector::Zero(dim2);
    e(c) = 1.0;
    for (const ComplexVector& p : existing) {
      const ComplexVector pj = j_conj(p);
      e -= p * (p.dot(e));
      e -= pj * (pj.dot(e));
    }
    if (e.norm() > 1e-6) return e.normalized();
  }
  throw FactorError("unable to complete an orthonormal quaternion basis");
}

struct PairedSpectrum {
  std::vector<ComplexVector> u_cols;  // one adjoint column per quaternion triplet
  std::vector<ComplexVector> v_cols;
  RealVector sigma;
};

// Collapse an adjoint-space SVD (descending sigma, paired spectrum) to one
// representative column per quaternion singular value. Degenerate groups are
// repaired with quaternionic Gram-Schmidt; right vectors are recomputed as
// C^H u / sigma to keep the pairing consistent. Values at or below the
// numerical floor sqrt(eps)*sigma_1 form one null block whose left and right
// bases are rebuilt independently: their u-v pairing carries no information
// and (for the Gram route) the supplied vectors may be garbage.
PairedSpectrum pair_spectrum(const ComplexMatrix& c, const ComplexMatrix& u_full,
                             const ComplexMatrix& v_full, const RealVector& s_full,
                             Index triplets) {
  const Index pairs = s_full.size() / 2;
  PairedSpectrum out;
  out.sigma.resize(triplets);

  const double scale = s_full.size() > 0 ? s_full(0) : 0.0;
  const double group_tol = std::max(scale * 1e-9, 1e-14);
  const double null_floor = std::max(scale * 1e-7, 1e-300);

  Index tail_begin = s_full.size();
  while (tail_begin > 0 && s_full(tail_begin - 1) <= null_floor) --tail_begin;

  // Group indices of numerically equal adjoint singular values above the floor.
  std::vector<std::pair<Index, Index>> groups;  // [begin, end)
  Index g0 = 0;
  for (Index i = 1; i <= tail_begin; ++i) {
    if (i == tail_begin || s_full(g0) - s_full(i) > group_tol) {
      groups.emplace_back(g0, i);
      g0 = i;
    }
  }

  std::vector<ComplexVector> u_sel, v_sel;
  u_sel.reserve(pairs);
  v_sel.reserve(pairs);
  for (const auto& [b, e] : groups) {
    if (static_cast<Index>(u_sel.size()) >= triplets) break;
    const Index len = e - b;
    if (len == 2) {
      // Clean pair: any basis vector of the plane encodes the triplet.
      u_sel.push_back(u_full.col(b));
      v_sel.push_back(v_full.col(b));
      continue;
    }
    // Degenerate group (including odd-sized artifacts of tolerance): repair.
    std::vector<ComplexVector> ub;
    for (Index i = b; i < e; ++i) ub.push_back(u_full.col(i));
    const double sval = s_full.segment(b, len).mean();
    std::vector<ComplexVector> reps = quaternionize_group(std::move(ub));
    for (ComplexVector& w : reps) {
      v_sel.push_back((c.adjoint() * w / sval).normalized());
      u_sel.push_back(std::move(w));
    }
  }

  // Null block: one two-sided rebuild over the whole tail.
  if (static_cast<Index>(u_sel.size()) < triplets && tail_begin < s_full.size()) {
    std::vector<ComplexVector> ub, vb;
    for (Index i = tail_begin; i < s_full.size(); ++i) {
      if (u_full.col(i).norm() > 0.5) ub.push_back(u_full.col(i));
      if (v_full.col(i).norm() > 0.5) vb.push_back(v_full.col(i));
    }
    // Make the tail basis orthogonal to the accepted leading planes.
    auto deflate = [](std::vector<ComplexVector> basis, const std::vector<ComplexVector>& lead) {
      std::vector<ComplexVector> out_basis;
      for (ComplexVector& w : basis) {
        for (const ComplexVector& p : lead) {
          const ComplexVector pj = j_conj(p);
          w -= p * (p.dot(w));
          w -= pj * (pj.dot(w));
        }
        if (w.norm() > 1e-8) out_basis.push_back(w.normalized());
      }
      return out_basis;
    };
    const size_t need = static_cast<size_t>(triplets) - u_sel.size();
    std::vector<ComplexVector> ur = quaternionize_group(deflate(std::move(ub), u_sel), need);
    std::vector<ComplexVector> vr = quaternionize_group(deflate(std::move(vb), v_sel), need);
    const size_t reps = std::min(ur.size(), vr.size());
    for (size_t i = 0; i < reps && static_cast<Index>(u_sel.size()) < triplets; ++i) {
      u_sel.push_back(ur[i]);
      v_sel.push_back(vr[i]);
    }
  }

  // Pad with canonical null directions when fewer representatives exist than
  // requested triplets (possible for truncated requests past the rank).
  while (static_cast<Index>(u_sel.size()) < triplets) {
    u_sel.push_back(canonical_null_column(u_sel, c.rows()));
    v_sel.push_back(canonical_null_column(v_sel, c.cols()));
  }

  for (Index l = 0; l < triplets; ++l) {
    const Index p = 2 * l;
    out.sigma(l) = p + 1 < s_full.size() ? 0.5 * (s_full(p) + s_full(p + 1))
                                         : (p < s_full.size() ? s_full(p) : 0.0);
    if (out.sigma(l) < 0.0) out.sigma(l) = 0.0;
  }
  out.u_cols.assign(u_sel.begin(), u_sel.begin() + triplets);
  out.v_cols.assign(v_sel.begin(), v_sel.begin() + triplets);
  return out;
}

QSvdResult assemble_qsvd(const QuaternionMatrix& a, const PairedSpectrum& ps) {
  const Index m = a.rows(), n = a.cols();
  const Index r = ps.sigma.size();
  QSvdResult res;
  res.U = QuaternionMatrix(m, r);
  res.V = QuaternionMatrix(n, r);
  res.sigma = ps.sigma;
  for (Index l = 0; l < r; ++l) {
    set_quaternion_column(res.U, l, ps.u_cols[l]);
    set_quaternion_column(res.V, l, ps.v_cols[l]);
    fix_phase(res.U, res.V, l);
  }
  return res;
}

QSvdResult qsvd_adjoint(const QuaternionMatrix& a, Index triplets) {
  const ComplexMatrix c = to_adjoint(a).data;
  Eigen::JacobiSVD<ComplexMatrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  PairedSpectrum ps =
      pair_spectrum(c, svd.matrixU(), svd.matrixV(), svd.singularValues(), triplets);
  return assemble_qsvd(a, ps);
}

// Gram route: eigendecomposition of C^H C (2n x 2n) gives the right vectors
// and squared singular values; left vectors follow as C v / sigma. Used when
// one dimension strongly dominates the other.
QSvdResult qsvd_gram(const QuaternionMatrix& a, Index triplets) {
  const Index m = a.rows(), n = a.cols();
  if (m < n) {
    QSvdResult t = qsvd_gram(conj_transpose(a), triplets);
    return {t.V, t.sigma, t.U};
  }
  const ComplexMatrix c = to_adjoint(a).data;
  ComplexMatrix g = ComplexMatrix::Zero(2 * n, 2 * n);
  g.selfadjointView<Eigen::Lower>().rankUpdate(c.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(g);
  if (eig.info() != Eigen::Success) throw FactorError("gram eigendecomposition failed");

  const Index k = 2 * n;
  RealVector s_full(k);
  ComplexMatrix v_full(k, k);
  for (Index i = 0; i < k; ++i) {
    const Index src = k - 1 - i;  // ascending -> descending
    s_full(i) = std::sqrt(std::max(eig.eigenvalues()(src), 0.0));
    v_full.col(i) = eig.eigenvectors().col(src);
  }
  // Left vectors by division are reliable only while sigma^2 stays above the
  // eigensolver's absolute accuracy; the tail is rebuilt in pair_spectrum.
  const double div_floor = std::max(s_full(0) * 1e-7, 1e-300);
  ComplexMatrix u_full = ComplexMatrix::Zero(2 * m, k);
  for (Index i = 0; i < k; ++i) {
    if (s_full(i) > div_floor) u_full.col(i) = c * v_full.col(i) / s_full(i);
  }
  PairedSpectrum ps = pair_spectrum(c, u_full, v_full, s_full, triplets);
  return assemble_qsvd(a, ps);
}

}  // namespace

QSvdResult qsvd(const QuaternionMatrix& a, std::optional<Index> truncate, SvdRoute route) {
  const Index m = a.rows(), n = a.cols();
  const Index full = std::min(m, n);
  Index triplets = truncate.value_or(full);
  if (triplets < 1) throw ConfigError("qsvd: truncation rank must be >= 1");
  triplets = std::min(triplets, full);

  if (route == SvdRoute::Auto) {
    const Index lo = std::min(m, n), hi = std::max(m, n);
    route = (hi >= 4 * lo) ? SvdRoute::Gram : SvdRoute::Adjoint;
  }
  QSvdResult res =
      route == SvdRoute::Gram ? qsvd_gram(a, triplets) : qsvd_adjoint(a, triplets);

  // Degenerate-group repair above keeps this defect tiny; verify once so a
  // silent pairing failure cannot escape.
  const double defect = std::max(orthonormality_defect(res.U), orthonormality_defect(res.V));
  if (defect > 1e-8 * static_cast<double>(triplets)) {
    throw FactorError("qsvd produced non-unitary factors (defect " + std::to_string(defect) + ")");
  }
  return res;
}

QqrResult qqr_thin(const QuaternionMatrix& a) {
  const Index m = a.rows(), r = a.cols();
  if (m < r) throw ShapeError("qqr_thin requires rows >= cols");

  QuaternionMatrix work = a;
  std::vector<std::vector<Quat>> reflectors;  // w for H = I - 2 w w^H, column j acts on rows j..m
  reflectors.reserve(r);

  for (Index j = 0; j < r; ++j) {
    const Index len = m - j;
    // Column norm below the pivot.
    double beta2 = 0.0;
    for (Index i = j; i < m; ++i) beta2 += work.at(i, j).norm2();
    const double beta = std::sqrt(beta2);
    if (beta <= 1e-300) {
      reflectors.emplace_back();  // identity step; R keeps a zero diagonal entry
      continue;
    }
    std::vector<Quat> v(len);
    for (Index i = 0; i < len; ++i) v[i] = work.at(j + i, j);
    Quat x1 = v[0];
    Quat phase{1.0, 0.0, 0.0, 0.0};
    if (x1.norm() > 1e-300) phase = x1 * (1.0 / x1.norm());
    v[0] = v[0] + phase * beta;
    double vn2 = 0.0;
    for (const Quat& q : v) vn2 += q.norm2();
    const double vn = std::sqrt(vn2);
    for (Quat& q : v) q = q * (1.0 / vn);

    // Apply H to the trailing columns (including j itself).
    for (Index col = j; col < r; ++col) {
      Quat s{};  // w^H x
      for (Index i = 0; i < len; ++i) s = s + v[i].conj() * work.at(j + i, col);
      s = s * 2.0;
      for (Index i = 0; i < len; ++i) work.set(j + i, col, work.at(j + i, col) - v[i] * s);
    }
    reflectors.push_back(std::move(v));
  }

  // R: upper triangle of the transformed matrix, strict lower zeroed exactly.
  QuaternionMatrix R(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = i; j < r; ++j) R.set(i, j, work.at(i, j));

  // Q: reflectors applied in reverse to [I_r; 0].
  QuaternionMatrix Q(m, r);
  Q.re.topRows(r) = RealMatrix::Identity(r, r);
  for (Index j = r - 1; j >= 0; --j) {
    const auto& v = reflectors[static_cast<size_t>(j)];
    if (v.empty()) continue;
    const Index len = m - j;
    for (Index col = 0; col < r; ++col) {
      Quat s{};
      for (Index i = 0; i < len; ++i) s = s + v[static_cast<size_t>(i)].conj() * Q.at(j + i, col);
      s = s * 2.0;
      for (Index i = 0; i < len; ++i)
        Q.set(j + i, col, Q.at(j + i, col) - v[static_cast<size_t>(i)] * s);
    }
  }

  // Make the diagonal of R real nonnegative: A = (Q W)(W^H R).
  for (Index j = 0; j < r; ++j) {
    Quat d = R.at(j, j);
    const double dn = d.norm();
    if (dn <= 1e-300) {
      R.set(j, j, Quat{});
      continue;
    }
    const Quat w = d * (1.0 / dn);
    const Quat wc = w.conj();
    right_scale_column(Q, j, w);
    for (Index col = j; col < r; ++col) R.set(j, col, wc * R.at(j, col));
    R.set(j, j, Quat{dn, 0.0, 0.0, 0.0});
  }
  return {std::move(Q), std::move(R)};
}

QuaternionMatrix qsvt(const QuaternionMatrix& a, double tau) {
  if (tau < 0.0) throw ConfigError("qsvt: tau must be nonnegative");
  QSvdResult s = qsvd(a);
  RealVector shrunk = (s.sigma.array() - tau).max(0.0);
  return qmul(scale_cols(s.U, shrunk), conj_transpose(s.V));
}

}  // namespace uqrpca
