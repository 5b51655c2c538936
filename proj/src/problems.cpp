#include "blkorth/problems.hpp"

#include <cassert>
#include <cmath>

#include "blkorth/rng.hpp"

namespace blkorth {

namespace {

DenseMatrix random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
  DenseMatrix g(rows, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) g(i, j) = rng.normal();
  return householder_qr(g).q;
}

} // namespace

DenseMatrix gen_glued(std::size_t n, std::size_t num_panels, std::size_t panel_width,
                      double kappa_panel, double kappa_global, std::uint64_t seed) {
  assert(n >= num_panels * panel_width);
  assert(kappa_panel >= 1.0 && kappa_global >= 1.0);
  const std::size_t w = panel_width;
  const std::size_t total = num_panels * w;

  Rng rng(derive_seed(seed, 0));
  const DenseMatrix u = random_orthonormal(n, total, rng);

  // Per-panel singular values log-spaced over kappa_panel; panel scales
  // log-spaced over the remaining kappa_global / kappa_panel range.
  std::vector<double> sigma(total, 1.0);
  const double span = std::max(kappa_global / kappa_panel, 1.0);
  for (std::size_t p = 0; p < num_panels; ++p) {
    const double scale =
        num_panels == 1 ? 1.0
                        : std::pow(span, -double(p) / double(num_panels - 1));
    for (std::size_t c = 0; c < w; ++c) {
      const double inner =
          w == 1 ? 1.0 : std::pow(kappa_panel, -double(c) / double(w - 1));
      sigma[p * w + c] = scale * inner;
    }
  }

  DenseMatrix v(n, total);
  for (std::size_t p = 0; p < num_panels; ++p) {
    Rng prng(derive_seed(seed, 1 + p));
    const DenseMatrix wj = random_orthonormal(w, w, prng);
    // panel = U_p * diag(sigma_p) * W_j^T
    for (std::size_t c = 0; c < w; ++c) {
      for (std::size_t l = 0; l < w; ++l) {
        const double coef = sigma[p * w + l] * wj(c, l);
        if (coef == 0.0) continue;
        const std::size_t ucol = p * w + l;
        for (std::size_t i = 0; i < n; ++i) v(i, p * w + c) += coef * u(i, ucol);
      }
    }
  }
  return v;
}

namespace {

CsrMatrix laplace_grid(std::size_t k, std::size_t dims) {
  const std::size_t n = dims == 2 ? k * k : k * k * k;
  const double diag = dims == 2 ? 4.0 : 6.0;
  std::vector<CsrMatrix::Triplet> t;
  t.reserve(n * (2 * dims + 1));

  auto idx2 = [k](std::size_t i, std::size_t j) { return i * k + j; };
  auto idx3 = [k](std::size_t i, std::size_t j, std::size_t l) {
    return (i * k + j) * k + l;
  };

  if (dims == 2) {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t me = idx2(i, j);
        t.push_back({me, me, diag});
        if (i > 0) t.push_back({me, idx2(i - 1, j), -1.0});
        if (i + 1 < k) t.push_back({me, idx2(i + 1, j), -1.0});
        if (j > 0) t.push_back({me, idx2(i, j - 1), -1.0});
        if (j + 1 < k) t.push_back({me, idx2(i, j + 1), -1.0});
      }
  } else {
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        for (std::size_t l = 0; l < k; ++l) {
          const std::size_t me = idx3(i, j, l);
          t.push_back({me, me, diag});
          if (i > 0) t.push_back({me, idx3(i - 1, j, l), -1.0});
          if (i + 1 < k) t.push_back({me, idx3(i + 1, j, l), -1.0});
          if (j > 0) t.push_back({me, idx3(i, j - 1, l), -1.0});
          if (j + 1 < k) t.push_back({me, idx3(i, j + 1, l), -1.0});
          if (l > 0) t.push_back({me, idx3(i, j, l - 1), -1.0});
          if (l + 1 < k) t.push_back({me, idx3(i, j, l + 1), -1.0});
        }
  }
  return CsrMatrix::from_triplets(n, n, std::move(t));
}

} // namespace

CsrMatrix laplace_2d(std::size_t k) {
  assert(k >= 2);
  return laplace_grid(k, 2);
}

CsrMatrix laplace_3d(std::size_t k) {
  assert(k >= 2);
  return laplace_grid(k, 3);
}

} // namespace blkorth
