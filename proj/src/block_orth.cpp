#include "blkorth/block_orth.hpp"

#include <cassert>

#include "blkorth/errors.hpp"
#include "blkorth/metrics.hpp"

namespace blkorth {

BasisStore::BasisStore(std::size_t n, std::size_t capacity)
    : n_(n),
      cap_(capacity),
      q_(n, capacity),
      r_(capacity, capacity),
      c_(capacity, capacity),
      seeded_(capacity, false) {}

std::span<const double> BasisStore::basis_col(std::size_t j) const {
  assert(j < cols_);
  return q_.col(j);
}

DenseMatrix BasisStore::basis_block_copy(std::size_t lo, std::size_t hi) const {
  assert(lo <= hi && hi <= cols_);
  DenseMatrix out(n_, hi - lo);
  for (std::size_t j = lo; j < hi; ++j)
    for (std::size_t i = 0; i < n_; ++i) out(i, j - lo) = q_(i, j);
  return out;
}

DenseMatrix BasisStore::r_copy() const {
  DenseMatrix out(cols_, cols_);
  for (std::size_t j = 0; j < cols_; ++j)
    for (std::size_t i = 0; i <= j; ++i) out(i, j) = r_(i, j);
  return out;
}

void BasisStore::mark_seed(std::size_t col) {
  assert(col < cols_);
  for (std::size_t i = 0; i < cap_; ++i) c_(i, col) = 0.0;
  c_(col, col) = 1.0;
  seeded_[col] = true;
}

std::vector<double> BasisStore::input_coeff_col(std::size_t k, std::size_t len) const {
  std::vector<double> out(len, 0.0);
  const DenseMatrix& src = is_seed(k) ? c_ : r_;
  for (std::size_t i = 0; i < len; ++i) out[i] = src(i, k);
  return out;
}

void BasisStore::begin_big_panel(std::size_t sketch_rows, bool overlap) {
  bp_lo_ = cols_ - (overlap && cols_ > 0 ? 1 : 0);
  sketched_ = DenseMatrix(sketch_rows, 0);
}

void BasisStore::fold_overlap_column(const DenseMatrix& proj,
                                     const UpperTriangular& diag) {
  // The panel re-expresses the current last basis column q_old as
  // Q * s with s = [proj(:,0); diag(0,0)]. Every stored coefficient column
  // with weight on that row (upper triangularity: only the column itself,
  // plus its seed copy) absorbs the change.
  const std::size_t k0 = cols_ - 1;
  const double scale = diag(0, 0);
  const double r_diag = r_(k0, k0);
  for (std::size_t i = 0; i < k0; ++i) r_(i, k0) += r_diag * proj(i, 0);
  r_(k0, k0) = r_diag * scale;
  if (is_seed(k0)) {
    const double c_diag = c_(k0, k0);
    for (std::size_t i = 0; i < k0; ++i) c_(i, k0) += c_diag * proj(i, 0);
    c_(k0, k0) = c_diag * scale;
  }
}

void BasisStore::push_panel(const DenseMatrix& qblock, const DenseMatrix& proj,
                            const UpperTriangular& diag, bool overlap) {
  const std::size_t k = qblock.cols();
  assert(qblock.rows() == n_);
  assert(diag.dim() == k);
  const std::size_t base = overlap ? cols_ - 1 : cols_;
  assert(proj.cols() == k && proj.rows() == base);
  assert(base + k <= cap_);

  if (overlap) fold_overlap_column(proj, diag);

  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t g = base + j;
    if (overlap && j == 0) {
      // replacement column: coefficients were folded above
    } else {
      for (std::size_t i = 0; i < base; ++i) r_(i, g) = proj(i, j);
      for (std::size_t i = 0; i <= j; ++i) r_(base + i, g) = diag(i, j);
    }
    for (std::size_t i = 0; i < n_; ++i) q_(i, g) = qblock(i, j);
  }
  boundaries_.push_back(base);
  cols_ = base + k;
}

void BasisStore::push_sketched(const DenseMatrix& cols, bool overlap) {
  const std::size_t have = sketched_.cols();
  const std::size_t base = overlap && have > 0 ? have - 1 : have;
  DenseMatrix grown(sketched_.rows(), base + cols.cols());
  for (std::size_t j = 0; j < base; ++j)
    for (std::size_t i = 0; i < sketched_.rows(); ++i) grown(i, j) = sketched_(i, j);
  for (std::size_t j = 0; j < cols.cols(); ++j)
    for (std::size_t i = 0; i < sketched_.rows(); ++i) grown(i, base + j) = cols(i, j);
  sketched_ = std::move(grown);
}

void BasisStore::refactor_block(std::size_t lo, const DenseMatrix& qnew,
                                const UpperTriangular& t) {
  const std::size_t w = cols_ - lo;
  assert(qnew.cols() == w && t.dim() == w);
  for (std::size_t j = 0; j < w; ++j)
    for (std::size_t i = 0; i < n_; ++i) q_(i, lo + j) = qnew(i, j);

  // Left-multiply rows [lo, cols) of every live coefficient column by t.
  std::vector<double> seg(w);
  auto update = [&](DenseMatrix& m, std::size_t col) {
    for (std::size_t i = 0; i < w; ++i) seg[i] = m(lo + i, col);
    for (std::size_t i = 0; i < w; ++i) {
      double s = 0.0;
      for (std::size_t l = i; l < w; ++l) s += t(i, l) * seg[l];
      m(lo + i, col) = s;
    }
  };
  for (std::size_t col = lo; col < cols_; ++col) {
    update(r_, col);
    if (is_seed(col)) update(c_, col);
  }
}

void BasisStore::reorthogonalize_block(std::size_t lo, const DenseMatrix& qnew,
                                       const DenseMatrix& tproj,
                                       const UpperTriangular& t) {
  const std::size_t w = cols_ - lo;
  assert(tproj.rows() == lo && tproj.cols() == w);
  // Spray onto the prior rows first (it consumes the pre-update block rows),
  // then refactor the block rows themselves.
  auto spray = [&](DenseMatrix& m, std::size_t col) {
    for (std::size_t i = 0; i < lo; ++i) {
      double s = 0.0;
      for (std::size_t l = 0; l < w; ++l) s += tproj(i, l) * m(lo + l, col);
      m(i, col) += s;
    }
  };
  for (std::size_t col = lo; col < cols_; ++col) {
    spray(r_, col);
    if (is_seed(col)) spray(c_, col);
  }
  refactor_block(lo, qnew, t);
}

// ---------------------------------------------------------------------------

ProjectResult bcgs_project_range(BasisStore& store, const DenseMatrix& v,
                                 std::size_t lo, std::size_t hi) {
  assert(lo <= hi && hi <= store.cols());
  ProjectResult out;
  out.vhat = v;
  const std::size_t p = hi - lo;
  out.coeffs = DenseMatrix(p, v.cols());
  if (p == 0) return out;

  const DenseMatrix qrange = store.basis_block_copy(lo, hi);
  out.coeffs = transpose_times(qrange, v);
  store.ledger().record(ReducePhase::projection);
  subtract_product(out.vhat, qrange, out.coeffs);
  return out;
}

ProjectResult bcgs_project(BasisStore& store, const DenseMatrix& v) {
  return bcgs_project_range(store, v, 0, store.cols());
}

namespace {

QrResult run_intra(const DenseMatrix& v, IntraKind intra, const SketchOperator* theta,
                   ReduceLedger& ledger) {
  switch (intra) {
    case IntraKind::cholqr2: return cholqr2(v, ledger);
    case IntraKind::rand_cholqr:
      if (theta == nullptr)
        throw InvalidScheme("rand_cholqr intra-orthogonalization needs a sketch operator");
      return rand_cholqr(v, *theta, ledger);
  }
  throw InvalidScheme("unknown intra kind");
}

DenseMatrix add(const DenseMatrix& a, const DenseMatrix& b) {
  assert(a.rows() == b.rows() && a.cols() == b.cols());
  DenseMatrix out = a;
  for (std::size_t j = 0; j < b.cols(); ++j)
    for (std::size_t i = 0; i < b.rows(); ++i) out(i, j) += b(i, j);
  return out;
}

/// proj + t * rdiag with rdiag upper triangular.
DenseMatrix update_projection(const DenseMatrix& proj, const DenseMatrix& t,
                              const UpperTriangular& rdiag) {
  return add(proj, times(t, rdiag.to_dense()));
}

} // namespace

void bcgs2(BasisStore& store, const DenseMatrix& v, IntraKind intra,
           const SketchOperator* theta, bool overlap) {
  const bool eff_overlap = overlap && store.cols() > 0;
  const std::size_t hi = store.cols() - (eff_overlap ? 1 : 0);

  if (hi == 0) {
    QrResult first = run_intra(v, intra, theta, store.ledger());
    store.push_panel(first.q, DenseMatrix(0, v.cols()), first.r, eff_overlap);
    return;
  }

  ProjectResult proj = bcgs_project_range(store, v, 0, hi);
  QrResult inner = run_intra(proj.vhat, intra, theta, store.ledger());
  ProjectResult reproj = bcgs_project_range(store, inner.q, 0, hi);
  QrResult outer = cholqr(reproj.vhat, store.ledger());

  DenseMatrix coeffs = update_projection(proj.coeffs, reproj.coeffs, inner.r);
  UpperTriangular rjj = multiply_upper(outer.r, inner.r);
  store.push_panel(outer.q, coeffs, rjj, eff_overlap);
}

namespace {

void bcgs_pip_impl(BasisStore& store, const DenseMatrix& vhat, const DenseMatrix& rbig,
                   bool overlap) {
  const std::size_t bp = store.big_panel_lo();
  const bool eff_overlap = overlap && store.cols() > 0;
  const std::size_t hi = store.cols() - (eff_overlap ? 1 : 0);
  assert(hi >= bp);
  const std::size_t p = hi - bp;
  const std::size_t k = vhat.cols();

  // One fused volley: [Q_range, V]^T V.
  const DenseMatrix qrange = store.basis_block_copy(bp, hi);
  DenseMatrix proj(p, k);
  if (p > 0) proj = transpose_times(qrange, vhat);
  const DenseMatrix gfull = transpose_times(vhat, vhat);
  store.ledger().record(ReducePhase::gram);

  // Pythagorean rule: G = V^T V - proj^T proj.
  DenseMatrix g = gfull;
  for (std::size_t j = 0; j < k; ++j)
    for (std::size_t i = 0; i < k; ++i) {
      double s = 0.0;
      for (std::size_t l = 0; l < p; ++l) s += proj(l, i) * proj(l, j);
      g(i, j) -= s;
    }

  CholeskyOutcome chol = cholesky(g);
  if (!chol.ok()) throw CholeskyBreakdown(chol.failed_at, "bcgs_pip");

  DenseMatrix resid = vhat;
  if (p > 0) subtract_product(resid, qrange, proj);
  const DenseMatrix qj = apply_inv_upper(resid, chol.factor);

  // Assemble the full coefficient rows: prior big panels, then this one.
  DenseMatrix full(hi, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < bp; ++i) full(i, j) = rbig.empty() ? 0.0 : rbig(i, j);
    for (std::size_t i = 0; i < p; ++i) full(bp + i, j) = proj(i, j);
  }
  store.push_panel(qj, full, chol.factor, eff_overlap);
}

void rand_bcgs_impl(BasisStore& store, const DenseMatrix& vhat, const DenseMatrix& rbig,
                    const SketchOperator& theta, bool overlap) {
  const std::size_t bp = store.big_panel_lo();
  const bool eff_overlap = overlap && store.cols() > 0;
  const std::size_t hi = store.cols() - (eff_overlap ? 1 : 0);
  const std::size_t k = vhat.cols();

  const DenseMatrix sk = theta.apply(vhat, store.ledger());

  // Sketched history of this big panel, minus the shared column on overlap.
  const std::size_t sk_have = store.sketched().cols();
  const std::size_t sk_p = eff_overlap && sk_have > 0 ? sk_have - 1 : sk_have;
  DenseMatrix qsk_prior(sk.rows(), sk_p);
  for (std::size_t j = 0; j < sk_p; ++j)
    for (std::size_t i = 0; i < sk.rows(); ++i) qsk_prior(i, j) = store.sketched()(i, j);

  // Block CGS twice with Householder intra-factorization, all on sketched
  // (local) data.
  DenseMatrix proj_sk(sk_p, k);
  DenseMatrix qsk;
  UpperTriangular rdiag;
  if (sk_p == 0) {
    QrFactorization f = householder_qr(sk);
    qsk = std::move(f.q);
    rdiag = std::move(f.r);
  } else {
    DenseMatrix proj1 = transpose_times(qsk_prior, sk);
    DenseMatrix skhat = sk;
    subtract_product(skhat, qsk_prior, proj1);
    QrFactorization inner = householder_qr(skhat);
    DenseMatrix t1 = transpose_times(qsk_prior, inner.q);
    DenseMatrix q2 = inner.q;
    subtract_product(q2, qsk_prior, t1);
    QrFactorization outer = householder_qr(q2);
    qsk = std::move(outer.q);
    proj_sk = update_projection(proj1, t1, inner.r);
    rdiag = multiply_upper(outer.r, inner.r);
  }

  // Apply the sketched-side coefficients to the full-length vectors.
  DenseMatrix resid = vhat;
  if (sk_p > 0) {
    const DenseMatrix qprior = store.basis_block_copy(bp, bp + sk_p);
    subtract_product(resid, qprior, proj_sk);
  }
  const DenseMatrix qj = apply_inv_upper(resid, rdiag);

  DenseMatrix full(hi, k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < bp; ++i) full(i, j) = rbig.empty() ? 0.0 : rbig(i, j);
    for (std::size_t i = 0; i < sk_p; ++i) full(bp + i, j) = proj_sk(i, j);
  }
  store.push_panel(qj, full, rdiag, eff_overlap);
  store.push_sketched(qsk, eff_overlap);
}

} // namespace

void bcgs_pip(BasisStore& store, const DenseMatrix& v, bool overlap) {
  bcgs_pip_impl(store, v, DenseMatrix(store.big_panel_lo(), v.cols()), overlap);
}

void rand_bcgs_preproc(BasisStore& store, const DenseMatrix& v,
                       const SketchOperator& theta, bool overlap) {
  rand_bcgs_impl(store, v, DenseMatrix(store.big_panel_lo(), v.cols()), theta, overlap);
}

void two_stage_panel(BasisStore& store, const DenseMatrix& v, PreprocKind preproc,
                     const SketchOperator* theta, bool overlap) {
  if (preproc == PreprocKind::rand_bcgs && theta == nullptr)
    throw InvalidScheme("rand_bcgs preprocessing needs a sketch operator");
  const std::size_t bp = store.big_panel_lo();
  const bool eff_overlap = overlap && store.cols() > 0;

  DenseMatrix vhat = v;
  DenseMatrix rbig(bp, v.cols());
  if (bp > 0) {
    ProjectResult pr = bcgs_project_range(store, v, 0, bp);
    vhat = std::move(pr.vhat);
    rbig = std::move(pr.coeffs);
  }
  if (preproc == PreprocKind::bcgs_pip)
    bcgs_pip_impl(store, vhat, rbig, eff_overlap);
  else
    rand_bcgs_impl(store, vhat, rbig, *theta, eff_overlap);
}

TwoStageStats two_stage_finish(BasisStore& store, PreprocKind preproc,
                               const TwoStageOptions& opts) {
  const std::size_t bp = store.big_panel_lo();

  TwoStageStats stats;
  if (opts.record_condition) {
    stats.preproc_condition = condition_number(store.basis_block_copy(bp, store.cols()));
    if (preproc == PreprocKind::rand_bcgs)
      stats.sketched_orth_error = orthogonality_error(store.sketched());
  }

  // Second stage: CholQR of the big panel, then re-orthogonalization against
  // the previous big panels when they exist.
  QrResult big = cholqr(store.basis_block_copy(bp, store.cols()), store.ledger());
  store.refactor_block(bp, big.q, big.r);

  if (bp > 0 && opts.reorthogonalize) {
    ProjectResult pr = bcgs_project_range(store, big.q, 0, bp);
    QrResult fin = cholqr(pr.vhat, store.ledger());
    store.reorthogonalize_block(bp, fin.q, pr.coeffs, fin.r);
  }
  return stats;
}

TwoStageStats two_stage_cycle(BasisStore& store, std::span<const DenseMatrix> panels,
                              PreprocKind preproc, const SketchOperator* theta,
                              const TwoStageOptions& opts) {
  store.begin_big_panel(theta != nullptr ? theta->sketch_size() : 0, opts.overlap);
  for (const DenseMatrix& v : panels)
    two_stage_panel(store, v, preproc, theta, opts.overlap);
  return two_stage_finish(store, preproc, opts);
}

} // namespace blkorth
