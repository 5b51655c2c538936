#ifndef BLKORTH_COST_MODEL_HPP
#define BLKORTH_COST_MODEL_HPP

#include <cstdint>
#include <string>

namespace blkorth {

enum class CostScheme { standard, sstep, sketch_eq_s, sketch_between, sketch_eq_m };

std::string to_string(CostScheme scheme);
CostScheme cost_scheme_from_string(const std::string& name);

struct CostQuery {
  CostScheme scheme = CostScheme::standard;
  std::int64_t n = 0;
  std::int64_t m = 0;
  std::int64_t s = 1;
  std::int64_t shat = 1; // forced to s / m for the eq_s / eq_m schemes
  std::int64_t mhat = 0; // 0 selects the default 2(shat+1)
};

/// Closed-form per-restart-cycle costs (leading terms as tabulated). The two
/// flop entries are the totals of the two orthogonalization passes (first
/// orthogonalization / re-orthogonalization for the deterministic schemes,
/// preprocessing / orthogonalization for the sketched ones); `flops_total`
/// reports the first of them, which is the tabulated total for the schemes
/// where both agree.
struct CostResult {
  std::int64_t flops_total = 0;
  std::int64_t flops_second = 0;
  std::int64_t latency = 0;
  std::int64_t volume = 0;
  std::int64_t storage = 0;
};

/// Exact integer evaluation of the cost-table formulas. Throws InvalidScheme
/// on inconsistent parameters (divisibility, sizes).
CostResult eval_cost(const CostQuery& query);

} // namespace blkorth

#endif // BLKORTH_COST_MODEL_HPP
