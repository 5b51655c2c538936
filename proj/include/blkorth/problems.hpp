#ifndef BLKORTH_PROBLEMS_HPP
#define BLKORTH_PROBLEMS_HPP

#include <cstdint>

#include "blkorth/dense.hpp"
#include "blkorth/sparse.hpp"

namespace blkorth {

/// Synthetic "glued" test matrix: num_panels panels of panel_width columns
/// with independently controllable per-panel and overall condition numbers.
///
/// Construction: V = U Sigma blockdiag(W_j)^T with U (n x pw) and each W_j
/// (w x w) random orthonormal (QR of Gaussian matrices). Within panel j the
/// singular values are log-spaced across kappa_panel; panels are scaled
/// log-spaced across kappa_global / kappa_panel, so the measured per-panel
/// and overall condition numbers equal the targets exactly in exact
/// arithmetic. Deterministic per seed.
DenseMatrix gen_glued(std::size_t n, std::size_t num_panels, std::size_t panel_width,
                      double kappa_panel, double kappa_global, std::uint64_t seed);

/// 5-point stencil on a k x k grid: diagonal 4, neighbor entries -1,
/// symmetric positive definite, k^2 unknowns.
CsrMatrix laplace_2d(std::size_t k);

/// 7-point stencil on a k x k x k grid: diagonal 6, neighbor entries -1.
CsrMatrix laplace_3d(std::size_t k);

} // namespace blkorth

#endif // BLKORTH_PROBLEMS_HPP
