#ifndef BLKORTH_METRICS_HPP
#define BLKORTH_METRICS_HPP

#include <vector>

#include "blkorth/dense.hpp"

namespace blkorth {

/// ||I - Q^T Q||_2, the spectral norm of the small Gram defect.
double orthogonality_error(const DenseMatrix& q);

/// Singular values of m, descending.
std::vector<double> singular_values(const DenseMatrix& m);

/// sigma_max / sigma_min. Throws ZeroMatrix on an all-zero input; returns
/// +inf when sigma_min underflows to zero. Reliable up to kappa ~ 1e15 in
/// double precision.
double condition_number(const DenseMatrix& v);

} // namespace blkorth

#endif // BLKORTH_METRICS_HPP
