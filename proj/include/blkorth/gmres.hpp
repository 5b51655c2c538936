#ifndef BLKORTH_GMRES_HPP
#define BLKORTH_GMRES_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blkorth/block_orth.hpp"
#include "blkorth/dense.hpp"
#include "blkorth/sparse.hpp"

namespace blkorth {

enum class Scheme {
  bcgs2_cholqr2,
  bcgs2_randcholqr,
  twostage_pip,
  twostage_randbcgs,
  standard_cgs2,
};

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

struct SolverConfig {
  std::size_t n = 0;
  std::size_t m = 60;    // restart length
  std::size_t s = 5;     // step size
  std::size_t shat = 60; // second-stage step size (two-stage schemes)
  Scheme scheme = Scheme::bcgs2_cholqr2;
  SketchKind sketch = SketchKind::gaussian;
  double rel_tol = 1e-6;
  std::size_t max_restarts = 50;
  std::uint64_t seed = 0;
  bool reorthogonalize = true; // second-stage re-orthogonalization pass
};

/// Throws InvalidScheme unless 1 <= s <= shat <= m with s | shat and
/// shat | m (block schemes), and rel_tol in (0, 1).
void validate_config(const SolverConfig& cfg);

struct SolveReport {
  bool converged = false;
  bool breakdown = false;       // non-recoverable orthogonalization failure
  bool happy_breakdown = false; // invariant subspace found
  std::string breakdown_detail;
  std::size_t restarts = 0;
  std::size_t iterations = 0; // Krylov directions consumed
  double initial_residual = 0.0;
  double final_relres = 0.0;
  std::uint64_t reduce_projection = 0;
  std::uint64_t reduce_gram = 0;
  std::uint64_t reduce_sketch = 0;
  std::uint64_t reduce_norm = 0;
  std::uint64_t reduce_total = 0;
  std::vector<double> restart_relres;        // true residual after each cycle
  std::vector<double> restart_lsq_residual;  // least-squares residual estimate
  std::vector<double> restart_orth_error;    // ||I - Q^T Q|| per cycle
  std::vector<double> restart_arnoldi_resid; // ||A Q - Q H||_F / ||A||_F
};

/// Matrix powers kernel: columns v, A v, ..., A^s v (monomial basis, identity
/// preconditioner).
DenseMatrix mpk(const CsrMatrix& a, std::span<const double> v_start, std::size_t s);

/// Change-of-basis matrix for the monomial recurrence: (m+1) x m with ones on
/// the subdiagonal, so that A V_{1:m} = V_{1:m+1} T.
DenseMatrix change_of_basis(std::size_t m);

/// H = R_{1:m+1,1:m+1} T R_{1:m,1:m}^{-1} for an accumulated triangular R of
/// a Krylov factorization V = Q R. Throws SingularTriangular on a zero
/// diagonal in the leading square of R.
DenseMatrix build_hessenberg(const DenseMatrix& r, const DenseMatrix& t);

struct LsqResult {
  std::vector<double> y;
  double residual = 0.0;
};

/// y = argmin ||gamma e1 - H y||_2 via Givens QR of the (q+1) x q (or square,
/// after a happy breakdown) Hessenberg. A zero rotated diagonal contributes a
/// zero solution component.
LsqResult solve_lsq(const DenseMatrix& h, double gamma);

struct SolveResult {
  std::vector<double> x;
  SolveReport report;
};

/// Restarted s-step GMRES with the configured block orthogonalization.
/// Convergence is judged on the explicitly recomputed residual at restart
/// boundaries. Orthogonalization failure ends the solve with diagnostics in
/// the report (exit state preserved); an invariant subspace truncates the
/// cycle and solves on what was generated.
SolveResult sstep_gmres_solve(const CsrMatrix& a, std::span<const double> b,
                              std::span<const double> x0, const SolverConfig& cfg);

} // namespace blkorth

#endif // BLKORTH_GMRES_HPP
