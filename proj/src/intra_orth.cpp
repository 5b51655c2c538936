#include "blkorth/intra_orth.hpp"

#include <cassert>
#include <cmath>
#include <span>

#include "blkorth/errors.hpp"

namespace blkorth {

QrResult cholqr(const DenseMatrix& v, ReduceLedger& ledger) {
  const DenseMatrix g = gram(v, ledger);
  CholeskyOutcome chol = cholesky(g);
  if (!chol.ok()) throw CholeskyBreakdown(chol.failed_at, "cholqr");
  QrResult out;
  out.q = apply_inv_upper(v, chol.factor);
  out.r = std::move(chol.factor);
  return out;
}

QrResult cholqr2(const DenseMatrix& v, ReduceLedger& ledger) {
  QrResult first = cholqr(v, ledger);
  QrResult second = cholqr(first.q, ledger);
  second.r = multiply_upper(second.r, first.r);
  return second;
}

QrResult rand_cholqr(const DenseMatrix& v, const SketchOperator& theta,
                     ReduceLedger& ledger) {
  const DenseMatrix sketched = theta.apply(v, ledger);
  QrFactorization small = householder_qr(sketched);
  // The triangular preconditioning V R^{-1} leaves a basis with kappa close
  // to that of the orthonormal sketched factor; the final CholQR then works
  // on an O(1)-conditioned block.
  const DenseMatrix preconditioned = apply_inv_upper(v, small.r);
  QrResult out = cholqr(preconditioned, ledger);
  out.r = multiply_upper(out.r, small.r);
  return out;
}

namespace {

void recursive_cholqr_impl(const DenseMatrix& v, std::span<const std::size_t> col_ids,
                           ReduceLedger& ledger, RecursiveQr& acc) {
  const std::size_t n = v.rows();
  const std::size_t w = v.cols();
  if (w == 0) return;

  const DenseMatrix g = gram(v, ledger);
  const CholeskyOutcome chol = cholesky(g);

  if (chol.ok()) {
    const DenseMatrix q = apply_inv_upper(v, chol.factor);
    const std::size_t base = acc.kept.size();
    for (std::size_t j = 0; j < w; ++j) {
      acc.kept.push_back(col_ids[j]);
      for (std::size_t i = 0; i <= j; ++i)
        acc.coeffs(base + i, col_ids[j]) = chol.factor(i, j);
    }
    DenseMatrix qgrown(n, base + w);
    for (std::size_t j = 0; j < base; ++j)
      for (std::size_t i = 0; i < n; ++i) qgrown(i, j) = acc.q(i, j);
    for (std::size_t j = 0; j < w; ++j)
      for (std::size_t i = 0; i < n; ++i) qgrown(i, base + j) = q(i, j);
    acc.q = std::move(qgrown);
    return;
  }

  const std::size_t k = chol.failed_at; // 1-based
  if (k == 1) {
    // Cannot orthogonalize even the leading column: drop this whole
    // sub-block. v already holds the residual after projection onto the
    // kept basis, so the Gram diagonal is the square of what remains.
    for (std::size_t j = 0; j < w; ++j) {
      acc.discarded.push_back(col_ids[j]);
      acc.discard_norm.push_back(std::sqrt(std::max(g(j, j), 0.0)));
    }
    ++acc.depth;
    return;
  }

  // Columns 1..k-1 are fine: finish them from the partial factor, then
  // project the remainder and recurse on it.
  const std::size_t good = k - 1;
  UpperTriangular r11(good);
  for (std::size_t i = 0; i < good; ++i)
    for (std::size_t j = i; j < good; ++j) r11.at(i, j) = chol.factor(i, j);

  const DenseMatrix v_good = v.cols_slice(0, good);
  const DenseMatrix q_good = apply_inv_upper(v_good, r11);

  const std::size_t base = acc.kept.size();
  for (std::size_t j = 0; j < good; ++j) {
    acc.kept.push_back(col_ids[j]);
    for (std::size_t i = 0; i <= j; ++i)
      acc.coeffs(base + i, col_ids[j]) = chol.factor(i, j);
  }
  DenseMatrix qgrown(n, base + good);
  for (std::size_t j = 0; j < base; ++j)
    for (std::size_t i = 0; i < n; ++i) qgrown(i, j) = acc.q(i, j);
  for (std::size_t j = 0; j < good; ++j)
    for (std::size_t i = 0; i < n; ++i) qgrown(i, base + j) = q_good(i, j);
  acc.q = std::move(qgrown);

  DenseMatrix rest = v.cols_slice(good, w);
  DenseMatrix r12(good, w - good);
  for (std::size_t j = 0; j < w - good; ++j) {
    for (std::size_t i = 0; i < good; ++i) {
      const double c = chol.factor(i, good + j);
      r12(i, j) = c;
      acc.coeffs(base + i, col_ids[good + j]) = c;
    }
  }
  subtract_product(rest, q_good, r12);

  ++acc.depth;
  std::vector<std::size_t> rest_ids(col_ids.begin() + good, col_ids.end());
  recursive_cholqr_impl(rest, rest_ids, ledger, acc);
}

} // namespace

RecursiveQr recursive_cholqr(const DenseMatrix& v, ReduceLedger& ledger) {
  RecursiveQr acc;
  acc.q = DenseMatrix(v.rows(), 0);
  acc.coeffs = DenseMatrix(v.cols(), v.cols());
  std::vector<std::size_t> ids(v.cols());
  for (std::size_t j = 0; j < v.cols(); ++j) ids[j] = j;

  recursive_cholqr_impl(v, ids, ledger, acc);
  if (acc.kept.empty()) throw AllColumnsDiscarded();

  // Shrink the coefficient rows to the kept count.
  DenseMatrix coeffs(acc.kept.size(), v.cols());
  for (std::size_t j = 0; j < v.cols(); ++j)
    for (std::size_t i = 0; i < acc.kept.size(); ++i) coeffs(i, j) = acc.coeffs(i, j);
  acc.coeffs = std::move(coeffs);
  return acc;
}

} // namespace blkorth
