#include "blkorth/sketch.hpp"

#include <cassert>
#include <cmath>

#include "blkorth/errors.hpp"
#include "blkorth/metrics.hpp"
#include "blkorth/rng.hpp"

namespace blkorth {

std::string to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::gaussian: return "gaussian";
    case SketchKind::count: return "count";
    case SketchKind::count_gauss: return "countgauss";
  }
  return "?";
}

SketchKind sketch_kind_from_string(const std::string& name) {
  if (name == "gaussian") return SketchKind::gaussian;
  if (name == "count") return SketchKind::count;
  if (name == "countgauss" || name == "count_gauss") return SketchKind::count_gauss;
  throw InvalidScheme("unknown sketch kind '" + name + "'");
}

namespace {

DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, double scale, Rng& rng) {
  DenseMatrix m(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  return m;
}

CsrMatrix count_matrix(std::size_t n, std::size_t width, Rng& rng) {
  std::vector<CsrMatrix::Triplet> t;
  t.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = rng.uniform_index(width);
    t.push_back({i, c, rng.sign()});
  }
  return CsrMatrix::from_triplets(n, width, std::move(t));
}

/// out = Theta_c^T V for a one-entry-per-row count map.
DenseMatrix count_apply_transposed(const CsrMatrix& theta, const DenseMatrix& v) {
  assert(theta.nrows() == v.rows());
  DenseMatrix out(theta.ncols(), v.cols());
  const auto& rp = theta.row_ptr();
  const auto& ci = theta.col_idx();
  const auto& vv = theta.values();
  for (std::size_t i = 0; i < theta.nrows(); ++i) {
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
      const std::size_t r = ci[k];
      const double s = vv[k];
      for (std::size_t c = 0; c < v.cols(); ++c) out(r, c) += s * v(i, c);
    }
  }
  return out;
}

} // namespace

SketchOperator SketchOperator::build(SketchKind kind, std::size_t n, std::size_t shat,
                                     std::uint64_t seed) {
  const std::size_t cols = shat + 1;
  SketchOperator op;
  op.kind_ = kind;
  op.n_ = n;
  Rng rng(derive_seed(seed, 0));

  switch (kind) {
    case SketchKind::gaussian: {
      op.mhat_ = 2 * cols;
      if (n <= op.mhat_) throw AmbientTooSmall(n, op.mhat_);
      op.dense_ = gaussian_matrix(n, op.mhat_, 1.0 / std::sqrt(double(op.mhat_)), rng);
      break;
    }
    case SketchKind::count: {
      op.mhat_ = 2 * cols * cols;
      if (n <= op.mhat_) throw AmbientTooSmall(n, op.mhat_);
      op.count_ = count_matrix(n, op.mhat_, rng);
      break;
    }
    case SketchKind::count_gauss: {
      op.mhat_count_ = 2 * cols * cols;
      op.mhat_ = 2 * cols;
      if (n <= op.mhat_count_) throw AmbientTooSmall(n, op.mhat_count_);
      op.count_ = count_matrix(n, op.mhat_count_, rng);
      Rng rng_g(derive_seed(seed, 1));
      op.dense_ = gaussian_matrix(op.mhat_count_, op.mhat_,
                                  1.0 / std::sqrt(double(op.mhat_)), rng_g);
      break;
    }
  }
  return op;
}

SketchOperator SketchOperator::from_dense(DenseMatrix theta) {
  SketchOperator op;
  op.kind_ = SketchKind::gaussian;
  op.n_ = theta.rows();
  op.mhat_ = theta.cols();
  op.dense_ = std::move(theta);
  return op;
}

DenseMatrix SketchOperator::apply(const DenseMatrix& v, ReduceLedger& ledger) const {
  assert(v.rows() == n_);
  DenseMatrix out;
  switch (kind_) {
    case SketchKind::gaussian:
      out = transpose_times(dense_, v);
      break;
    case SketchKind::count:
      out = count_apply_transposed(count_, v);
      break;
    case SketchKind::count_gauss:
      out = transpose_times(dense_, count_apply_transposed(count_, v));
      break;
  }
  ledger.record(ReducePhase::sketch);
  return out;
}

double embedding_distortion(const SketchOperator& theta, const DenseMatrix& v) {
  if (condition_number(v) > 1e15)
    throw RankDeficient("embedding_distortion: input not numerically full rank");
  const DenseMatrix u = householder_qr(v).q;
  ReduceLedger scratch;
  const DenseMatrix su = theta.apply(u, scratch);
  double eps = 0.0;
  for (double s : singular_values(su)) eps = std::max(eps, std::abs(s * s - 1.0));
  return eps;
}

} // namespace blkorth
