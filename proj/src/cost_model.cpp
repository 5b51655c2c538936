#include "blkorth/cost_model.hpp"

#include "blkorth/errors.hpp"

namespace blkorth {

std::string to_string(CostScheme scheme) {
  switch (scheme) {
    case CostScheme::standard: return "standard";
    case CostScheme::sstep: return "sstep";
    case CostScheme::sketch_eq_s: return "sketch_eq_s";
    case CostScheme::sketch_between: return "sketch_between";
    case CostScheme::sketch_eq_m: return "sketch_eq_m";
  }
  return "?";
}

CostScheme cost_scheme_from_string(const std::string& name) {
  if (name == "standard") return CostScheme::standard;
  if (name == "sstep") return CostScheme::sstep;
  if (name == "sketch_eq_s") return CostScheme::sketch_eq_s;
  if (name == "sketch_between") return CostScheme::sketch_between;
  if (name == "sketch_eq_m") return CostScheme::sketch_eq_m;
  throw InvalidScheme("unknown cost scheme '" + name + "'");
}

namespace {

std::int64_t exact_div(std::int64_t num, std::int64_t den, const char* what) {
  if (den == 0 || num % den != 0)
    throw InvalidScheme(std::string("cost formula '") + what +
                        "' does not evaluate to an integer for these parameters");
  return num / den;
}

} // namespace

CostResult eval_cost(const CostQuery& query) {
  const std::int64_t n = query.n;
  const std::int64_t m = query.m;
  const std::int64_t s = query.s;
  if (n < 1 || m < 1) throw InvalidScheme("need positive n and m");

  std::int64_t shat = query.shat;
  switch (query.scheme) {
    case CostScheme::standard: shat = 1; break;
    case CostScheme::sstep: shat = s; break;
    case CostScheme::sketch_eq_s: shat = s; break;
    case CostScheme::sketch_between: break;
    case CostScheme::sketch_eq_m: shat = m; break;
  }
  const std::int64_t mhat = query.mhat > 0 ? query.mhat : 2 * (shat + 1);

  CostResult out;
  switch (query.scheme) {
    case CostScheme::standard: {
      out.flops_total = 2 * n * m * m;
      out.flops_second = out.flops_total;
      out.latency = 4 * m;
      out.volume = n * m * (2 * m + 4);
      out.storage = n * m;
      break;
    }
    case CostScheme::sstep: {
      if (s < 1 || s > m || m % s != 0) throw InvalidScheme("need s | m with 1 <= s <= m");
      out.flops_total = 2 * n * m * exact_div(m, s, "m/s") * (s + 1);
      out.flops_second = out.flops_total;
      out.latency = 4 * exact_div(m, s, "m/s");
      out.volume = n * exact_div(m, s, "m/s") * (2 * m + 4 + 4 * s);
      out.storage = n * m;
      break;
    }
    case CostScheme::sketch_eq_s: {
      if (s < 1 || s > m || m % s != 0) throw InvalidScheme("need s | m with 1 <= s <= m");
      out.flops_total = 2 * n * m * exact_div(m, s, "m/s") * (s + 1);
      out.flops_second = out.flops_total;
      out.latency = 4 * exact_div(m, s, "m/s");
      out.volume = n * exact_div(m, s, "m/s") * (2 * m + 4 + 4 * s + mhat);
      out.storage = n * (m + mhat);
      break;
    }
    case CostScheme::sketch_between: {
      if (!(s >= 1 && s < shat && shat < m))
        throw InvalidScheme("need 1 <= s < shat < m");
      if (shat % s != 0 || m % shat != 0)
        throw InvalidScheme("need s | shat and shat | m");
      out.flops_total = 2 * n * m * exact_div(m, s, "m/s") * (s + 1);
      out.flops_second = 2 * n * m * exact_div(m, shat, "m/shat") * (shat + 1);
      out.latency = exact_div(m, s, "m/s") + 3 * exact_div(m, shat, "m/shat");
      out.volume = n * exact_div(m, s, "m/s") * (m + 2 + 2 * s + mhat) +
                   n * exact_div(m, shat, "m/shat") * (m + 2 + 4 * shat);
      out.storage = n * (m + mhat);
      break;
    }
    case CostScheme::sketch_eq_m: {
      if (s < 1 || s > m || m % s != 0) throw InvalidScheme("need s | m with 1 <= s <= m");
      out.flops_total = 5 * n * m * exact_div(m, s, "m/s") * (s + 1);
      out.flops_second = 2 * n * m * m;
      out.latency = exact_div(m, s, "m/s") + 1;
      // n m (m/2 + mhat + 2 + 2 s) / s + 2 n m, kept exact as
      // n (m/s) (m + 2 mhat + 4 + 4 s) / 2 + 2 n m.
      out.volume =
          exact_div(n * exact_div(m, s, "m/s") * (m + 2 * mhat + 4 + 4 * s), 2,
                    "volume/2") +
          2 * n * m;
      out.storage = n * (m + mhat);
      break;
    }
  }
  return out;
}

} // namespace blkorth
