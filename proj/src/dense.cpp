#include "blkorth/dense.hpp"

#include <cassert>
#include <cmath>

#include "blkorth/errors.hpp"

namespace blkorth {

DenseMatrix gram(const DenseMatrix& v, ReduceLedger& ledger) {
  const std::size_t n = v.rows();
  const std::size_t k = v.cols();
  DenseMatrix g(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i <= j; ++i) {
      double s = 0.0;
      const double* ci = v.data() + i * n;
      const double* cj = v.data() + j * n;
      for (std::size_t r = 0; r < n; ++r) s += ci[r] * cj[r];
      g(i, j) = s;
      g(j, i) = s;
    }
  }
  ledger.record(ReducePhase::gram);
  return g;
}

DenseMatrix transpose_times(const DenseMatrix& a, const DenseMatrix& b) {
  assert(a.rows() == b.rows());
  const std::size_t n = a.rows();
  DenseMatrix c(a.cols(), b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    const double* bj = b.data() + j * n;
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double* ai = a.data() + i * n;
      double s = 0.0;
      for (std::size_t r = 0; r < n; ++r) s += ai[r] * bj[r];
      c(i, j) = s;
    }
  }
  return c;
}

DenseMatrix times(const DenseMatrix& a, const DenseMatrix& b) {
  assert(a.cols() == b.rows());
  const std::size_t n = a.rows();
  DenseMatrix c(n, b.cols());
  for (std::size_t j = 0; j < b.cols(); ++j) {
    double* cj = c.data() + j * n;
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double bkj = b(k, j);
      if (bkj == 0.0) continue;
      const double* ak = a.data() + k * n;
      for (std::size_t r = 0; r < n; ++r) cj[r] += ak[r] * bkj;
    }
  }
  return c;
}

void subtract_product(DenseMatrix& b, const DenseMatrix& q, const DenseMatrix& c) {
  assert(q.cols() == c.rows());
  assert(b.rows() == q.rows());
  const std::size_t n = b.rows();
  for (std::size_t j = 0; j < b.cols(); ++j) {
    double* bj = b.data() + j * n;
    for (std::size_t k = 0; k < q.cols(); ++k) {
      const double ckj = c(k, j);
      if (ckj == 0.0) continue;
      const double* qk = q.data() + k * n;
      for (std::size_t r = 0; r < n; ++r) bj[r] -= qk[r] * ckj;
    }
  }
}

CholeskyOutcome cholesky(const DenseMatrix& g, double rel_pivot_tol) {
  const std::size_t k = g.rows();
  assert(g.cols() == k);
  CholeskyOutcome out;
  out.factor = UpperTriangular(k);
  UpperTriangular& r = out.factor;

  double max_diag = 0.0;
  for (std::size_t i = 0; i < k; ++i) max_diag = std::max(max_diag, g(i, i));
  const double pivot_floor = rel_pivot_tol * max_diag;

  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      double s = g(i, j);
      for (std::size_t t = 0; t < i; ++t) s -= r(t, i) * r(t, j);
      r.at(i, j) = s / r(i, i);
    }
    double pivot = g(j, j);
    for (std::size_t t = 0; t < j; ++t) pivot -= r(t, j) * r(t, j);
    if (pivot <= pivot_floor) {
      out.failed_at = j + 1;
      out.failed_pivot = pivot;
      return out;
    }
    r.at(j, j) = std::sqrt(pivot);
  }
  return out;
}

QrFactorization householder_qr(const DenseMatrix& v) {
  const std::size_t n = v.rows();
  const std::size_t k = v.cols();
  assert(n >= k);

  DenseMatrix a = v;                       // reduced in place
  DenseMatrix w(n, k);                     // Householder vectors
  std::vector<double> tau(k, 0.0);

  for (std::size_t j = 0; j < k; ++j) {
    double norm2 = 0.0;
    for (std::size_t i = j; i < n; ++i) norm2 += a(i, j) * a(i, j);
    const double norm = std::sqrt(norm2);
    if (norm == 0.0) {
      tau[j] = 0.0; // zero column: no reflector, R(j,j) = 0
      continue;
    }
    const double alpha = a(j, j) >= 0.0 ? -norm : norm;
    const double v0 = a(j, j) - alpha;
    w(j, j) = 1.0;
    for (std::size_t i = j + 1; i < n; ++i) w(i, j) = a(i, j) / v0;
    tau[j] = -v0 / alpha;

    a(j, j) = alpha;
    for (std::size_t i = j + 1; i < n; ++i) a(i, j) = 0.0;
    for (std::size_t c = j + 1; c < k; ++c) {
      double s = a(j, c);
      for (std::size_t i = j + 1; i < n; ++i) s += w(i, j) * a(i, c);
      s *= tau[j];
      a(j, c) -= s;
      for (std::size_t i = j + 1; i < n; ++i) a(i, c) -= s * w(i, j);
    }
  }

  // Accumulate the thin Q by applying reflectors to the first k identity
  // columns, last reflector first.
  DenseMatrix q(n, k);
  for (std::size_t j = 0; j < k; ++j) q(j, j) = 1.0;
  for (std::size_t jj = k; jj-- > 0;) {
    if (tau[jj] == 0.0) continue;
    for (std::size_t c = jj; c < k; ++c) {
      double s = q(jj, c);
      for (std::size_t i = jj + 1; i < n; ++i) s += w(i, jj) * q(i, c);
      s *= tau[jj];
      q(jj, c) -= s;
      for (std::size_t i = jj + 1; i < n; ++i) q(i, c) -= s * w(i, jj);
    }
  }

  // Sign-normalize so that diag(R) >= 0.
  QrFactorization out;
  out.r = UpperTriangular(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double flip = a(i, i) < 0.0 ? -1.0 : 1.0;
    for (std::size_t j = i; j < k; ++j) out.r.at(i, j) = flip * a(i, j);
    if (flip < 0.0)
      for (std::size_t r = 0; r < n; ++r) q(r, i) = -q(r, i);
  }
  out.q = std::move(q);
  return out;
}

DenseMatrix apply_inv_upper(const DenseMatrix& v, const UpperTriangular& r) {
  const std::size_t n = v.rows();
  const std::size_t k = v.cols();
  assert(r.dim() == k);
  for (std::size_t j = 0; j < k; ++j)
    if (r(j, j) == 0.0) throw SingularTriangular(j);

  DenseMatrix x = v;
  for (std::size_t j = 0; j < k; ++j) {
    double* xj = x.data() + j * n;
    for (std::size_t i = 0; i < j; ++i) {
      const double rij = r(i, j);
      if (rij == 0.0) continue;
      const double* xi = x.data() + i * n;
      for (std::size_t t = 0; t < n; ++t) xj[t] -= rij * xi[t];
    }
    const double d = r(j, j);
    for (std::size_t t = 0; t < n; ++t) xj[t] /= d;
  }
  return x;
}

UpperTriangular multiply_upper(const UpperTriangular& t, const UpperTriangular& r) {
  const std::size_t k = t.dim();
  assert(r.dim() == k);
  UpperTriangular out(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      double s = 0.0;
      for (std::size_t l = i; l <= j; ++l) s += t(i, l) * r(l, j);
      out.at(i, j) = s;
    }
  return out;
}

double frobenius_norm(const DenseMatrix& m) {
  double s = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

} // namespace blkorth
