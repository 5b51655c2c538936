#include "blkorth/gmres.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <optional>

#include "blkorth/errors.hpp"
#include "blkorth/metrics.hpp"
#include "blkorth/rng.hpp"

namespace blkorth {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::bcgs2_cholqr2: return "bcgs2_cholqr2";
    case Scheme::bcgs2_randcholqr: return "bcgs2_randcholqr";
    case Scheme::twostage_pip: return "twostage_pip";
    case Scheme::twostage_randbcgs: return "twostage_randbcgs";
    case Scheme::standard_cgs2: return "standard_cgs2";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "bcgs2_cholqr2") return Scheme::bcgs2_cholqr2;
  if (name == "bcgs2_randcholqr") return Scheme::bcgs2_randcholqr;
  if (name == "twostage_pip") return Scheme::twostage_pip;
  if (name == "twostage_randbcgs") return Scheme::twostage_randbcgs;
  if (name == "standard_cgs2") return Scheme::standard_cgs2;
  throw InvalidScheme("unknown scheme '" + name + "'");
}

void validate_config(const SolverConfig& cfg) {
  if (!(cfg.rel_tol > 0.0 && cfg.rel_tol < 1.0))
    throw InvalidScheme("rel_tol must lie in (0, 1)");
  if (cfg.max_restarts == 0) throw InvalidScheme("max_restarts must be positive");
  if (cfg.scheme == Scheme::standard_cgs2) {
    if (cfg.m < 1) throw InvalidScheme("restart length must be positive");
    return;
  }
  if (cfg.s < 1 || cfg.s > cfg.shat || cfg.shat > cfg.m)
    throw InvalidScheme("need 1 <= s <= shat <= m");
  if (cfg.shat % cfg.s != 0) throw InvalidScheme("s must divide shat");
  if (cfg.m % cfg.shat != 0) throw InvalidScheme("shat must divide m");
}

DenseMatrix mpk(const CsrMatrix& a, std::span<const double> v_start, std::size_t s) {
  const std::size_t n = a.nrows();
  assert(v_start.size() == n);
  DenseMatrix v(n, s + 1);
  for (std::size_t i = 0; i < n; ++i) v(i, 0) = v_start[i];
  for (std::size_t k = 0; k < s; ++k) {
    const std::vector<double> next = spmv(a, v.col(k));
    for (std::size_t i = 0; i < n; ++i) v(i, k + 1) = next[i];
  }
  return v;
}

DenseMatrix change_of_basis(std::size_t m) {
  DenseMatrix t(m + 1, m);
  for (std::size_t k = 0; k < m; ++k) t(k + 1, k) = 1.0;
  return t;
}

namespace {

/// X such that X U = B, with U upper triangular (given densely).
DenseMatrix solve_upper_right(const DenseMatrix& b, const DenseMatrix& u) {
  const std::size_t q = u.cols();
  assert(u.rows() == q && b.cols() == q);
  for (std::size_t j = 0; j < q; ++j)
    if (u(j, j) == 0.0) throw SingularTriangular(j);

  DenseMatrix x = b;
  const std::size_t p = b.rows();
  for (std::size_t j = 0; j < q; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double uij = u(i, j);
      if (uij == 0.0) continue;
      for (std::size_t r = 0; r < p; ++r) x(r, j) -= x(r, i) * uij;
    }
    for (std::size_t r = 0; r < p; ++r) x(r, j) /= u(j, j);
  }
  return x;
}

double vec_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

} // namespace

DenseMatrix build_hessenberg(const DenseMatrix& r, const DenseMatrix& t) {
  const std::size_t m = t.cols();
  assert(r.rows() == m + 1 && r.cols() == m + 1 && t.rows() == m + 1);
  const DenseMatrix shifted = times(r, t);
  DenseMatrix lead(m, m);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t i = 0; i < m; ++i) lead(i, j) = r(i, j);
  return solve_upper_right(shifted, lead);
}

LsqResult solve_lsq(const DenseMatrix& h, double gamma) {
  const std::size_t p = h.rows();
  const std::size_t q = h.cols();
  assert(p == q + 1 || p == q);

  DenseMatrix work = h;
  std::vector<double> rhs(p, 0.0);
  rhs[0] = gamma;

  for (std::size_t k = 0; k < q && k + 1 < p; ++k) {
    const double a = work(k, k);
    const double b = work(k + 1, k);
    if (b == 0.0) continue;
    const double r = std::hypot(a, b);
    const double c = a / r;
    const double s = b / r;
    for (std::size_t j = k; j < q; ++j) {
      const double t0 = work(k, j);
      const double t1 = work(k + 1, j);
      work(k, j) = c * t0 + s * t1;
      work(k + 1, j) = -s * t0 + c * t1;
    }
    const double g0 = rhs[k];
    const double g1 = rhs[k + 1];
    rhs[k] = c * g0 + s * g1;
    rhs[k + 1] = -s * g0 + c * g1;
  }

  LsqResult out;
  out.y.assign(q, 0.0);
  for (std::size_t kk = q; kk-- > 0;) {
    if (work(kk, kk) == 0.0) {
      out.y[kk] = 0.0; // rank-deficient column: minimum-norm component
      continue;
    }
    double s = rhs[kk];
    for (std::size_t j = kk + 1; j < q; ++j) s -= work(kk, j) * out.y[j];
    out.y[kk] = s / work(kk, kk);
  }

  // Report the achieved value explicitly (robust for rank-deficient H).
  std::vector<double> resid(p, 0.0);
  resid[0] = gamma;
  for (std::size_t j = 0; j < q; ++j)
    for (std::size_t i = 0; i < p; ++i) resid[i] -= h(i, j) * out.y[j];
  out.residual = vec_norm(resid);
  return out;
}

// ---------------------------------------------------------------------------
// Solver internals
// ---------------------------------------------------------------------------

namespace {

constexpr double kHappyTol = 1e-8; // relative leftover treated as invariance

struct CycleState {
  bool happy = false;
  bool aborted = false;
  std::string detail;
  std::vector<double> happy_col;
};

/// Hessenberg for the basis accumulated in `store`: q_inputs columns, square
/// when a happy column (the expansion of a final invariant direction) closes
/// the cycle.
DenseMatrix assemble_hessenberg(const BasisStore& store, std::size_t q_inputs,
                                const std::vector<double>* happy_col) {
  const std::size_t p = store.cols();
  DenseMatrix rshift(p, q_inputs);
  DenseMatrix ceff(q_inputs, q_inputs);
  for (std::size_t k = 0; k < q_inputs; ++k) {
    if (happy_col != nullptr && k + 1 == q_inputs) {
      for (std::size_t i = 0; i < p; ++i) rshift(i, k) = (*happy_col)[i];
    } else {
      for (std::size_t i = 0; i < p && i <= k + 1; ++i)
        rshift(i, k) = store.r_entry(i, k + 1);
    }
    const std::vector<double> c = store.input_coeff_col(k, q_inputs);
    for (std::size_t i = 0; i < q_inputs; ++i) ceff(i, k) = c[i];
  }
  return solve_upper_right(rshift, ceff);
}

/// Breakdown recovery: re-project the panel, run recursive CholQR, keep the
/// leading orthonormalized prefix. Discarded remainders that are negligible
/// relative to their columns signal an invariant subspace (happy breakdown);
/// anything else is a genuine numerical failure.
void recover_panel(BasisStore& store, const DenseMatrix& v, bool overlap,
                   const std::string& scheme_detail, CycleState& cs) {
  const bool eff_overlap = overlap && store.cols() > 0;
  const std::size_t hi = store.cols() - (eff_overlap ? 1 : 0);
  ProjectResult pr = bcgs_project_range(store, v, 0, hi);

  RecursiveQr rq;
  try {
    rq = recursive_cholqr(pr.vhat, store.ledger());
  } catch (const Error& e) {
    cs.aborted = true;
    cs.detail = scheme_detail + "; recovery failed: " + e.what();
    return;
  }

  const std::size_t w = v.cols();
  const std::size_t d = rq.discarded.empty() ? w : rq.discarded.front();
  if (d == 0) {
    cs.aborted = true;
    cs.detail = scheme_detail + "; recovery kept nothing";
    return;
  }

  // Push the kept prefix with its triangular factor.
  DenseMatrix qkept(v.rows(), d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < v.rows(); ++i) qkept(i, j) = rq.q(i, j);
  DenseMatrix proj(hi, d);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t i = 0; i < hi; ++i) proj(i, j) = pr.coeffs(i, j);
  UpperTriangular diag(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) diag.at(i, j) = rq.coeffs(i, j);
  store.push_panel(qkept, proj, diag, eff_overlap);

  if (d == w) return; // full rank after recursion; continue the cycle

  for (std::size_t t = 0; t < rq.discarded.size(); ++t) {
    const std::size_t c = rq.discarded[t];
    if (rq.discard_norm[t] > kHappyTol * vec_norm(v.col(c))) {
      cs.aborted = true;
      cs.detail = scheme_detail + "; column " + std::to_string(c) +
                  " unexplained remainder " + std::to_string(rq.discard_norm[t]);
      return;
    }
  }

  // Invariant subspace: the first dropped column closes the cycle.
  const std::size_t p = store.cols();
  cs.happy_col.assign(p, 0.0);
  for (std::size_t i = 0; i < hi; ++i) cs.happy_col[i] = pr.coeffs(i, d);
  for (std::size_t i = 0; i < d; ++i) cs.happy_col[hi + i] = rq.coeffs(i, d);
  cs.happy = true;
}

struct CycleDiagnostics {
  double orth_error = 0.0;
  double arnoldi_resid = 0.0;
};

CycleDiagnostics cycle_diagnostics(const CsrMatrix& a, const DenseMatrix& q,
                                   const DenseMatrix& h, double a_fro) {
  CycleDiagnostics d;
  d.orth_error = orthogonality_error(q);
  const std::size_t qi = h.cols();
  DenseMatrix aq = spmm(a, q.cols_slice(0, qi));
  const DenseMatrix qh = times(q, h);
  for (std::size_t j = 0; j < qi; ++j)
    for (std::size_t i = 0; i < aq.rows(); ++i) aq(i, j) -= qh(i, j);
  d.arnoldi_resid = frobenius_norm(aq) / a_fro;
  return d;
}

} // namespace

SolveResult sstep_gmres_solve(const CsrMatrix& a, std::span<const double> b,
                              std::span<const double> x0, const SolverConfig& cfg) {
  validate_config(cfg);
  if (a.nrows() != a.ncols()) throw InvalidScheme("coefficient matrix must be square");
  if (cfg.n != 0 && cfg.n != a.nrows())
    throw InvalidScheme("config n does not match the matrix dimension");
  const std::size_t n = a.nrows();
  assert(b.size() == n && x0.size() == n);

  SolveResult result;
  result.x.assign(x0.begin(), x0.end());
  SolveReport& rep = result.report;
  ReduceLedger extra; // residual-norm reduces outside the orthogonalization

  double a_fro = 0.0;
  for (double v : a.values()) a_fro += v * v;
  a_fro = std::sqrt(a_fro);
  if (a_fro == 0.0) a_fro = 1.0;

  auto true_residual = [&](std::vector<double>& r) {
    const std::vector<double> ax = spmv(a, result.x);
    r.resize(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ax[i];
    extra.record(ReducePhase::norm);
    return vec_norm(r);
  };

  std::vector<double> r;
  double gamma = true_residual(r);
  const double gamma0 = gamma;
  rep.initial_residual = gamma0;
  if (gamma0 == 0.0) {
    rep.converged = true;
    rep.final_relres = 0.0;
    return result;
  }

  auto accumulate_ledger = [&](const ReduceLedger& l) {
    rep.reduce_projection += l.count(ReducePhase::projection);
    rep.reduce_gram += l.count(ReducePhase::gram);
    rep.reduce_sketch += l.count(ReducePhase::sketch);
    rep.reduce_norm += l.count(ReducePhase::norm);
    rep.reduce_total += l.total();
  };

  const bool twostage =
      cfg.scheme == Scheme::twostage_pip || cfg.scheme == Scheme::twostage_randbcgs;
  const PreprocKind preproc = cfg.scheme == Scheme::twostage_pip
                                  ? PreprocKind::bcgs_pip
                                  : PreprocKind::rand_bcgs;

  bool done = false;
  for (std::size_t cycle = 0; cycle < cfg.max_restarts && !done; ++cycle) {
    ++rep.restarts;
    const double cycle_gamma = gamma;

    // ---- standard GMRES baseline (column-wise CGS2) ----
    if (cfg.scheme == Scheme::standard_cgs2) {
      ReduceLedger led;
      DenseMatrix q(n, cfg.m + 1);
      DenseMatrix h(cfg.m + 1, cfg.m);
      for (std::size_t i = 0; i < n; ++i) q(i, 0) = r[i] / gamma;

      std::size_t q_in = cfg.m;
      bool happy = false;
      for (std::size_t k = 0; k < cfg.m; ++k) {
        std::vector<double> w = spmv(a, q.col(k));
        for (int pass = 0; pass < 2; ++pass) {
          led.record(ReducePhase::projection);
          for (std::size_t i = 0; i <= k; ++i) {
            double dot = 0.0;
            for (std::size_t t = 0; t < n; ++t) dot += q(t, i) * w[t];
            h(i, k) += dot;
            for (std::size_t t = 0; t < n; ++t) w[t] -= dot * q(t, i);
          }
        }
        const double hnorm = vec_norm(w);
        led.record(ReducePhase::norm);
        double hcol = 0.0;
        for (std::size_t i = 0; i <= k; ++i) hcol += h(i, k) * h(i, k);
        if (hnorm <= 1e-12 * std::sqrt(hcol + hnorm * hnorm)) {
          q_in = k + 1;
          happy = true;
          break;
        }
        h(k + 1, k) = hnorm;
        for (std::size_t i = 0; i < n; ++i) q(i, k + 1) = w[i] / hnorm;
      }

      const std::size_t p = happy ? q_in : q_in + 1;
      DenseMatrix heff(p, q_in);
      for (std::size_t j = 0; j < q_in; ++j)
        for (std::size_t i = 0; i < p; ++i) heff(i, j) = h(i, j);

      const LsqResult lsq = solve_lsq(heff, gamma);
      for (std::size_t j = 0; j < q_in; ++j)
        for (std::size_t i = 0; i < n; ++i) result.x[i] += q(i, j) * lsq.y[j];

      gamma = true_residual(r);
      rep.iterations += q_in;
      rep.happy_breakdown = rep.happy_breakdown || happy;
      accumulate_ledger(led);
      const CycleDiagnostics diag = cycle_diagnostics(a, q.cols_slice(0, p), heff, a_fro);
      rep.restart_relres.push_back(gamma / gamma0);
      rep.restart_lsq_residual.push_back(lsq.residual);
      rep.restart_orth_error.push_back(diag.orth_error);
      rep.restart_arnoldi_resid.push_back(diag.arnoldi_resid);

      if (gamma / gamma0 <= cfg.rel_tol) {
        rep.converged = true;
        done = true;
      } else if (happy) {
        rep.breakdown_detail = "stagnated on an invariant subspace";
        done = true;
      }
      continue;
    }

    // ---- block schemes ----
    BasisStore store(n, cfg.m + 1);
    std::optional<SketchOperator> theta;
    if (cfg.scheme == Scheme::bcgs2_randcholqr)
      theta.emplace(SketchOperator::build(cfg.sketch, n, cfg.s,
                                          derive_seed(cfg.seed, cycle + 1)));
    else if (cfg.scheme == Scheme::twostage_randbcgs)
      theta.emplace(SketchOperator::build(cfg.sketch, n, cfg.shat,
                                          derive_seed(cfg.seed, cycle + 1)));

    std::vector<double> q1(n);
    for (std::size_t i = 0; i < n; ++i) q1[i] = r[i] / gamma;

    CycleState cs;
    const std::size_t panels = cfg.m / cfg.s;
    const std::size_t panels_per_big = twostage ? cfg.shat / cfg.s : panels;

    for (std::size_t j = 0; j < panels && !cs.happy && !cs.aborted; ++j) {
      std::vector<double> seed_vec;
      if (j == 0) {
        seed_vec = q1;
      } else {
        const std::size_t k0 = store.cols() - 1;
        store.mark_seed(k0);
        const auto col = store.basis_col(k0);
        seed_vec.assign(col.begin(), col.end());
      }
      const DenseMatrix v = mpk(a, seed_vec, cfg.s);
      const bool overlap = j > 0;

      if (twostage && j % panels_per_big == 0)
        store.begin_big_panel(theta ? theta->sketch_size() : 0, overlap);

      try {
        if (twostage)
          two_stage_panel(store, v, preproc, theta ? &*theta : nullptr, overlap);
        else
          bcgs2(store, v,
                cfg.scheme == Scheme::bcgs2_cholqr2 ? IntraKind::cholqr2
                                                    : IntraKind::rand_cholqr,
                theta ? &*theta : nullptr, overlap);
      } catch (const Error& e) {
        if (!twostage || store.cols() == 0) {
          recover_panel(store, v, overlap, e.what(), cs);
        } else {
          cs.aborted = true;
          cs.detail = e.what();
        }
      }

      if (twostage && !cs.happy && !cs.aborted && (j + 1) % panels_per_big == 0) {
        try {
          TwoStageOptions opts;
          opts.reorthogonalize = cfg.reorthogonalize;
          opts.overlap = overlap;
          two_stage_finish(store, preproc, opts);
        } catch (const Error& e) {
          cs.aborted = true;
          cs.detail = std::string("second stage: ") + e.what();
        }
      }
    }

    // An aborted two-stage cycle may leave a only-preprocessed big panel;
    // try to complete it so the basis is orthonormal for the update.
    if (twostage && cs.aborted && store.cols() > store.big_panel_lo() &&
        store.cols() > 0) {
      try {
        TwoStageOptions opts;
        opts.reorthogonalize = cfg.reorthogonalize;
        two_stage_finish(store, preproc, opts);
      } catch (const Error&) {
        cs.detail += "; basis after the last completed big panel unusable";
        // Roll the update back to nothing: solve over no columns.
        store = BasisStore(n, 1);
      }
    }

    accumulate_ledger(store.ledger());

    const std::size_t p = store.cols();
    const std::size_t q_in = cs.happy ? p : (p > 0 ? p - 1 : 0);
    if (q_in == 0) {
      rep.breakdown = cs.aborted;
      rep.breakdown_detail = cs.detail;
      rep.final_relres = gamma / gamma0;
      done = true;
      continue;
    }

    const DenseMatrix h =
        assemble_hessenberg(store, q_in, cs.happy ? &cs.happy_col : nullptr);
    const LsqResult lsq = solve_lsq(h, gamma);
    for (std::size_t j = 0; j < q_in; ++j) {
      const auto col = store.basis_col(j);
      for (std::size_t i = 0; i < n; ++i) result.x[i] += col[i] * lsq.y[j];
    }

    gamma = true_residual(r);
    rep.iterations += q_in;
    rep.happy_breakdown = rep.happy_breakdown || cs.happy;

    const CycleDiagnostics diag = cycle_diagnostics(a, store.basis_copy(), h, a_fro);
    rep.restart_relres.push_back(gamma / gamma0);
    rep.restart_lsq_residual.push_back(lsq.residual);
    rep.restart_orth_error.push_back(diag.orth_error);
    rep.restart_arnoldi_resid.push_back(diag.arnoldi_resid);

    if (gamma / gamma0 <= cfg.rel_tol) {
      rep.converged = true;
      done = true;
    } else if (cs.aborted) {
      rep.breakdown = true;
      rep.breakdown_detail = cs.detail;
      done = true;
    } else if (cs.happy && gamma >= cycle_gamma * (1.0 - 1e-12)) {
      rep.breakdown_detail = "stagnated on an invariant subspace";
      done = true;
    }
  }

  accumulate_ledger(extra);
  rep.final_relres = gamma / gamma0;
  return result;
}

} // namespace blkorth
