#ifndef BLKORTH_DENSE_HPP
#define BLKORTH_DENSE_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace blkorth {

/// Column-major dense matrix of doubles. Carries Krylov panels, orthonormal
/// bases, sketched blocks, and the small projected matrices.
class DenseMatrix {
public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i + j * rows_]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i + j * rows_]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  std::span<double> col(std::size_t j) { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const {
    return {data_.data() + j * rows_, rows_};
  }

  /// Copy of columns [lo, hi).
  DenseMatrix cols_slice(std::size_t lo, std::size_t hi) const {
    DenseMatrix out(rows_, hi - lo);
    for (std::size_t j = lo; j < hi; ++j)
      for (std::size_t i = 0; i < rows_; ++i) out(i, j - lo) = (*this)(i, j);
    return out;
  }

  bool operator==(const DenseMatrix& other) const = default;

private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Upper-triangular matrix, row-major packed storage of the entries on and
/// above the diagonal. The strict lower part is implicitly zero.
class UpperTriangular {
public:
  UpperTriangular() = default;
  explicit UpperTriangular(std::size_t dim)
      : dim_(dim), data_(dim * (dim + 1) / 2, 0.0) {}

  static UpperTriangular identity(std::size_t n) {
    UpperTriangular r(n);
    for (std::size_t i = 0; i < n; ++i) r.at(i, i) = 1.0;
    return r;
  }

  std::size_t dim() const noexcept { return dim_; }

  /// Read access for any (i, j); returns 0 below the diagonal.
  double operator()(std::size_t i, std::size_t j) const {
    return j < i ? 0.0 : data_[index(i, j)];
  }
  /// Write access; requires j >= i.
  double& at(std::size_t i, std::size_t j) { return data_[index(i, j)]; }

  DenseMatrix to_dense() const {
    DenseMatrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = i; j < dim_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  bool operator==(const UpperTriangular& other) const = default;

private:
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * dim_ - i * (i - 1) / 2 + (j - i);
  }
  std::size_t dim_ = 0;
  std::vector<double> data_;
};

/// Phases of the logical global-reduce ledger. One event stands for one
/// fused inner-product volley (one all-reduce in a 1D block-row layout).
enum class ReducePhase : int { projection = 0, gram = 1, sketch = 2, norm = 3 };

/// Counts logical synchronization events per run. Monotone within a run;
/// reset only at run boundaries. Not meant to be shared across threads.
class ReduceLedger {
public:
  void record(ReducePhase phase) { ++counts_[static_cast<int>(phase)]; }

  std::uint64_t count(ReducePhase phase) const {
    return counts_[static_cast<int>(phase)];
  }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts_) t += c;
    return t;
  }
  void reset() { counts_ = {}; }

private:
  std::array<std::uint64_t, 4> counts_{};
};

// ---------------------------------------------------------------------------
// Kernels. All are single-threaded, deterministic, fixed summation order.
// ---------------------------------------------------------------------------

/// G = V^T V, symmetric. Records exactly one gram reduce.
DenseMatrix gram(const DenseMatrix& v, ReduceLedger& ledger);

/// C = A^T B. No ledger side effects (callers record the volley they fuse
/// this into).
DenseMatrix transpose_times(const DenseMatrix& a, const DenseMatrix& b);

/// C = A B.
DenseMatrix times(const DenseMatrix& a, const DenseMatrix& b);

/// B -= Q C, in place.
void subtract_product(DenseMatrix& b, const DenseMatrix& q, const DenseMatrix& c);

/// Result of an unblocked Cholesky attempt. On failure, rows of `factor`
/// strictly above `failed_at` (1-based) still hold the valid partial factor.
struct CholeskyOutcome {
  UpperTriangular factor;
  std::size_t failed_at = 0; // 0 = success, else 1-based step of the bad pivot
  double failed_pivot = 0.0; // value of the offending pivot
  bool ok() const noexcept { return failed_at == 0; }
};

/// Upper Cholesky factor of symmetric G, R^T R = G. A pivot is rejected when
/// it is <= rel_pivot_tol * max diagonal of G (guards near-breakdown as well
/// as exact rank deficiency).
CholeskyOutcome cholesky(const DenseMatrix& g, double rel_pivot_tol = 2.220446049250313e-16);

struct QrFactorization {
  DenseMatrix q;      // rows x cols, orthonormal columns
  UpperTriangular r;  // cols x cols, nonnegative diagonal
};

/// Thin Householder QR of a tall matrix (rows >= cols). R diagonals are
/// sign-normalized to be nonnegative. A zero column yields a zero R diagonal
/// and some orthonormal completion column in Q.
QrFactorization householder_qr(const DenseMatrix& v);

/// X = V R^{-1} by forward column substitution. Throws SingularTriangular on
/// an exactly zero diagonal.
DenseMatrix apply_inv_upper(const DenseMatrix& v, const UpperTriangular& r);

/// T * R, both upper triangular.
UpperTriangular multiply_upper(const UpperTriangular& t, const UpperTriangular& r);

double frobenius_norm(const DenseMatrix& m);

} // namespace blkorth

#endif // BLKORTH_DENSE_HPP
