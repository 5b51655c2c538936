#ifndef BLKORTH_BLOCK_ORTH_HPP
#define BLKORTH_BLOCK_ORTH_HPP

#include <span>
#include <vector>

#include "blkorth/dense.hpp"
#include "blkorth/intra_orth.hpp"
#include "blkorth/sketch.hpp"

namespace blkorth {

/// Accumulated orthonormal blocks Q, the growing upper-triangular R, the
/// sketched copies of the current big panel, and the reduce ledger.
///
/// Columns are appended panel by panel. A panel may overlap the basis by one
/// column (its first column is the current last basis column, as happens when
/// a matrix-powers sweep restarts from the newest basis vector); pushing such
/// a panel re-expresses that column and folds the change into the stored
/// coefficients, so Q R continues to reproduce every vector ever absorbed.
///
/// Besides R (which expresses each absorbed vector in the current basis), the
/// store can track "input coefficient" columns for basis vectors that were
/// fed to the operator by a matrix-powers sweep; these columns start as unit
/// vectors and are carried through every later basis transformation. One
/// store per run; not thread-safe.
class BasisStore {
public:
  BasisStore(std::size_t n, std::size_t capacity);

  std::size_t ambient_dim() const noexcept { return n_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t capacity() const noexcept { return cap_; }

  ReduceLedger& ledger() noexcept { return ledger_; }
  const ReduceLedger& ledger() const noexcept { return ledger_; }

  std::span<const double> basis_col(std::size_t j) const;
  DenseMatrix basis_copy() const { return basis_block_copy(0, cols_); }
  DenseMatrix basis_block_copy(std::size_t lo, std::size_t hi) const;

  /// R restricted to the first cols() columns (rows padded to cols()).
  DenseMatrix r_copy() const;
  double r_entry(std::size_t i, std::size_t j) const { return r_(i, j); }

  const std::vector<std::size_t>& panel_boundaries() const noexcept {
    return boundaries_;
  }

  // -- matrix-powers bookkeeping ------------------------------------------
  void mark_seed(std::size_t col);
  bool is_seed(std::size_t col) const { return col < seeded_.size() && seeded_[col]; }
  /// Coefficients of the vector the operator was applied to at column k:
  /// the tracked seed column when one exists, the R column otherwise.
  std::vector<double> input_coeff_col(std::size_t k, std::size_t len) const;

  // -- big-panel scope (two-stage and sketched preprocessing) --------------
  /// Starts a new big panel at the current end of the basis; with `overlap`
  /// the current last column is adopted into the new big panel (it will be
  /// re-processed as the first column of the next panel).
  void begin_big_panel(std::size_t sketch_rows, bool overlap = false);
  std::size_t big_panel_lo() const noexcept { return bp_lo_; }
  const DenseMatrix& sketched() const noexcept { return sketched_; }

  // -- mutation used by the orthogonalization schemes ----------------------

  /// Appends a panel: `qblock` (n x k) are the new basis columns, `proj`
  /// (p x k) its coefficients on the first p existing columns, `diag` the
  /// intra-panel triangular factor. With `overlap`, the panel's first column
  /// replaces the current last basis column (p must equal cols()-1) and the
  /// replacement is folded into the stored coefficients.
  void push_panel(const DenseMatrix& qblock, const DenseMatrix& proj,
                  const UpperTriangular& diag, bool overlap);

  /// Appends sketched copies of a panel, mirroring push_panel's overlap rule.
  void push_sketched(const DenseMatrix& cols, bool overlap);

  /// Basis columns [lo, cols) have been refactored as Q_old = Q_new * T:
  /// replaces the columns and left-multiplies the matching coefficient rows.
  void refactor_block(std::size_t lo, const DenseMatrix& qnew,
                      const UpperTriangular& t);

  /// Basis columns [lo, cols) have been re-expressed as
  /// Q_old = Q_prior * Tproj + Q_new * T: full re-orthogonalization update.
  void reorthogonalize_block(std::size_t lo, const DenseMatrix& qnew,
                             const DenseMatrix& tproj, const UpperTriangular& t);

private:
  void fold_overlap_column(const DenseMatrix& proj, const UpperTriangular& diag);

  std::size_t n_ = 0;
  std::size_t cap_ = 0;
  std::size_t cols_ = 0;
  DenseMatrix q_;        // n x cap
  DenseMatrix r_;        // cap x cap, upper part in use
  DenseMatrix c_;        // cap x cap, seed coefficient columns
  std::vector<bool> seeded_;
  std::vector<std::size_t> boundaries_;
  std::size_t bp_lo_ = 0;
  DenseMatrix sketched_; // sketch_rows x (cols in current big panel)
  ReduceLedger ledger_;
};

struct ProjectResult {
  DenseMatrix vhat;   // V - Q C
  DenseMatrix coeffs; // Q^T V over the projected range
};

/// Classical block Gram-Schmidt projection against basis columns [lo, hi).
/// One projection reduce when the range is nonempty.
ProjectResult bcgs_project_range(BasisStore& store, const DenseMatrix& v,
                                 std::size_t lo, std::size_t hi);

/// Projection against every stored column.
ProjectResult bcgs_project(BasisStore& store, const DenseMatrix& v);

enum class IntraKind { cholqr2, rand_cholqr };

/// Block CGS with full re-orthogonalization: project, intra-orthogonalize,
/// re-project, CholQR, then push with the standard coefficient updates.
/// First panel short-circuits to the intra routine alone. Five reduces per
/// panel past the first. `theta` is required for the rand_cholqr intra.
void bcgs2(BasisStore& store, const DenseMatrix& v, IntraKind intra,
           const SketchOperator* theta = nullptr, bool overlap = false);

/// Single-reduce block CGS: one fused volley computes [Q, V]^T V, the panel
/// Gram block is recovered by the Pythagorean rule, then Cholesky. Projects
/// within the current big panel only. Throws CholeskyBreakdown roughly when
/// kappa exceeds eps^{-1/2}.
void bcgs_pip(BasisStore& store, const DenseMatrix& v, bool overlap = false);

/// Sketched preprocessing: sketch the panel, orthogonalize the sketched copy
/// against the big panel's sketched history (block CGS twice with Householder
/// intra-factorization, all local), and apply the resulting coefficients to
/// the full-length vectors. One reduce. Leaves the big panel well conditioned
/// but not fully orthogonal.
void rand_bcgs_preproc(BasisStore& store, const DenseMatrix& v,
                       const SketchOperator& theta, bool overlap = false);

enum class PreprocKind { bcgs_pip, rand_bcgs };

struct TwoStageOptions {
  bool reorthogonalize = true; // second-stage re-orthogonalization pass
  bool overlap = false;        // panels share their first column (matrix powers)
  bool record_condition = false;
};

struct TwoStageStats {
  double preproc_condition = 0.0;    // kappa of the preprocessed big panel
  double sketched_orth_error = 0.0;  // ||I - q^T q|| of the sketched basis
};

/// Per-panel first stage when panels arrive one at a time (matrix-powers
/// interleaving): inter-big-panel BCGS against the completed big panels,
/// then the chosen preprocessing within the current one. The caller starts
/// the big panel with BasisStore::begin_big_panel.
void two_stage_panel(BasisStore& store, const DenseMatrix& v, PreprocKind preproc,
                     const SketchOperator* theta, bool overlap = false);

/// Second stage for the current big panel: CholQR of the big panel and, when
/// prior big panels exist, a BCGS+CholQR re-orthogonalization, both with the
/// matching coefficient updates.
TwoStageStats two_stage_finish(BasisStore& store, PreprocKind preproc,
                               const TwoStageOptions& opts = {});

/// One big panel of the two-stage scheme over pre-generated panels.
TwoStageStats two_stage_cycle(BasisStore& store, std::span<const DenseMatrix> panels,
                              PreprocKind preproc, const SketchOperator* theta,
                              const TwoStageOptions& opts = {});

} // namespace blkorth

#endif // BLKORTH_BLOCK_ORTH_HPP
