#ifndef BLKORTH_SPARSE_HPP
#define BLKORTH_SPARSE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "blkorth/dense.hpp"

namespace blkorth {

/// Compressed-sparse-row square-or-rectangular operator. Rows are stored in
/// ascending column order with duplicates already combined, so every product
/// has one fixed summation order.
class CsrMatrix {
public:
  struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
  };

  CsrMatrix() = default;

  /// Build from triplets: sorts by (row, col) and sums duplicates.
  static CsrMatrix from_triplets(std::size_t nrows, std::size_t ncols,
                                 std::vector<Triplet> entries);

  static CsrMatrix identity(std::size_t n);

  std::size_t nrows() const noexcept { return nrows_; }
  std::size_t ncols() const noexcept { return ncols_; }
  std::size_t nnz() const noexcept { return values_.size(); }

  const std::vector<std::size_t>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

private:
  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
};

/// y = A x.
std::vector<double> spmv(const CsrMatrix& a, std::span<const double> x);

/// C = S V; column c equals spmv(S, column c) with the identical per-row
/// summation order.
DenseMatrix spmm(const CsrMatrix& s, const DenseMatrix& v);

/// Reads a MatrixMarket coordinate file, real, general or symmetric.
/// Symmetric inputs are expanded to full storage; duplicates are summed;
/// indices are converted to 0-based.
CsrMatrix read_matrix_market(const std::string& path);

/// Writes coordinate real general format, canonical (row-major) entry order,
/// 1-based indices, 17 significant digits.
void write_matrix_market(const std::string& path, const CsrMatrix& a);

} // namespace blkorth

#endif // BLKORTH_SPARSE_HPP
