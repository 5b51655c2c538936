#ifndef BLKORTH_INTRA_ORTH_HPP
#define BLKORTH_INTRA_ORTH_HPP

#include <vector>

#include "blkorth/dense.hpp"
#include "blkorth/sketch.hpp"

namespace blkorth {

struct QrResult {
  DenseMatrix q;
  UpperTriangular r;
};

/// One-pass Cholesky QR: Gram, Cholesky, triangular solve. One reduce.
/// Throws CholeskyBreakdown when V^T V is not numerically positive definite
/// (kappa(V) beyond roughly eps^{-1/2}).
QrResult cholqr(const DenseMatrix& v, ReduceLedger& ledger);

/// CholQR applied twice; R is the product of both triangular factors.
/// Two reduces.
QrResult cholqr2(const DenseMatrix& v, ReduceLedger& ledger);

/// Sketch, small Householder QR of the sketch, triangular preconditioning,
/// then one CholQR. Two reduces. Stable whenever V is numerically full rank.
QrResult rand_cholqr(const DenseMatrix& v, const SketchOperator& theta,
                     ReduceLedger& ledger);

/// Outcome of the breakdown-recovery variant. `coeffs` expresses every input
/// column in the kept basis: for a kept column these are its triangular
/// factor entries; for a discarded column, its projection onto the kept
/// basis at the moment it was dropped (the unexplained remainder has norm
/// `discard_norm`).
struct RecursiveQr {
  DenseMatrix q;                       // n x kept
  DenseMatrix coeffs;                  // kept x ncols
  std::vector<std::size_t> kept;       // ascending input-column indices
  std::vector<std::size_t> discarded;  // ascending input-column indices
  std::vector<double> discard_norm;    // parallel to `discarded`
  std::size_t depth = 0;               // number of breakdown recursions taken
};

/// Recursive CholQR: on a pivot failure at step k, orthogonalizes the first
/// k-1 columns from the partial factor, projects the remainder with the
/// already-computed off-diagonal block, and recurses; a failure on the first
/// column of a sub-block discards the rest of that sub-block. No bound on the
/// final orthogonality error is asserted. Throws AllColumnsDiscarded when
/// nothing survives.
RecursiveQr recursive_cholqr(const DenseMatrix& v, ReduceLedger& ledger);

} // namespace blkorth

#endif // BLKORTH_INTRA_ORTH_HPP
