#ifndef BLKORTH_SKETCH_HPP
#define BLKORTH_SKETCH_HPP

#include <cstdint>
#include <string>

#include "blkorth/dense.hpp"
#include "blkorth/sparse.hpp"

namespace blkorth {

enum class SketchKind { gaussian, count, count_gauss };

std::string to_string(SketchKind kind);
SketchKind sketch_kind_from_string(const std::string& name);

/// Oblivious subspace embedding Theta (n x mhat), applied as v = Theta^T V.
///
/// Sizing for a step parameter shat (the map must embed shat+1 columns):
///   gaussian     mhat = 2(shat+1)
///   count        mhat = 2(shat+1)^2, one +-1 entry per row
///   count_gauss  count stage 2(shat+1)^2 wide, then a dense Gaussian stage
///                down to mhat = 2(shat+1); only the Gaussian stage carries
///                the 1/sqrt(mhat) scaling.
/// Immutable once built; application is read-only.
class SketchOperator {
public:
  static SketchOperator build(SketchKind kind, std::size_t n, std::size_t shat,
                              std::uint64_t seed);

  /// Wraps an explicit dense map (tests and the identity control row).
  static SketchOperator from_dense(DenseMatrix theta);

  SketchKind kind() const noexcept { return kind_; }
  std::size_t ambient_dim() const noexcept { return n_; }
  std::size_t sketch_size() const noexcept { return mhat_; }

  /// v = Theta^T V. Exactly one sketch reduce; for count_gauss the local
  /// Gaussian stage is applied to the count output before that event.
  DenseMatrix apply(const DenseMatrix& v, ReduceLedger& ledger) const;

  // Stage access for compositional tests.
  const DenseMatrix& dense_stage() const noexcept { return dense_; }
  const CsrMatrix& count_stage() const noexcept { return count_; }

private:
  SketchOperator() = default;

  SketchKind kind_ = SketchKind::gaussian;
  std::size_t n_ = 0;
  std::size_t mhat_ = 0;
  std::size_t mhat_count_ = 0; // intermediate count width (count_gauss)
  DenseMatrix dense_;          // gaussian: n x mhat; count_gauss: mhat_count x mhat
  CsrMatrix count_;            // count stage: n x (mhat or mhat_count)
};

/// Measured distortion of Theta on range(V): the smallest eps such that
/// sqrt(1-eps)||x|| <= ||Theta^T x|| <= sqrt(1+eps)||x|| for all x in
/// range(V), i.e. max |sigma^2 - 1| over singular values of Theta^T U with
/// U an orthonormal basis of range(V). Throws RankDeficient when
/// kappa(V) > 1e15.
double embedding_distortion(const SketchOperator& theta, const DenseMatrix& v);

} // namespace blkorth

#endif // BLKORTH_SKETCH_HPP
