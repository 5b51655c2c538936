#ifndef BLKORTH_ERRORS_HPP
#define BLKORTH_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace blkorth {

/// Base class for all numerical and configuration failures thrown by this
/// library. Callers that only want "did it work" can catch this one type.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Cholesky hit a nonpositive pivot at (1-based) step `step`; the factor is
/// only valid above that step. Thrown by the QR-style wrappers; the raw
/// factorization reports the index without throwing.
class CholeskyBreakdown : public Error {
public:
  CholeskyBreakdown(std::size_t step, const std::string& context)
      : Error(context + ": nonpositive Cholesky pivot at step " + std::to_string(step)),
        step_(step) {}
  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

/// A triangular factor has an exactly zero diagonal entry.
class SingularTriangular : public Error {
public:
  explicit SingularTriangular(std::size_t index)
      : Error("triangular factor is singular: zero diagonal at index " + std::to_string(index)),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

private:
  std::size_t index_;
};

/// Sketch construction was asked for an embedding at least as large as the
/// ambient dimension.
class AmbientTooSmall : public Error {
public:
  AmbientTooSmall(std::size_t n, std::size_t mhat)
      : Error("ambient dimension n=" + std::to_string(n) +
              " must exceed sketch size mhat=" + std::to_string(mhat)) {}
};

/// Input matrix is numerically rank deficient where full rank is required.
class RankDeficient : public Error {
public:
  explicit RankDeficient(const std::string& msg) : Error(msg) {}
};

/// Recursive CholQR discarded every column.
class AllColumnsDiscarded : public Error {
public:
  AllColumnsDiscarded() : Error("recursive CholQR discarded all columns") {}
};

/// Metric requested on an all-zero matrix.
class ZeroMatrix : public Error {
public:
  ZeroMatrix() : Error("matrix is identically zero") {}
};

/// Unknown or inconsistent scheme/configuration selection.
class InvalidScheme : public Error {
public:
  explicit InvalidScheme(const std::string& msg) : Error(msg) {}
};

/// MatrixMarket file did not parse; carries the offending line number.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("parse error at line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// MatrixMarket banner is not "matrix coordinate real (general|symmetric)".
class BannerError : public Error {
public:
  explicit BannerError(const std::string& banner)
      : Error("unsupported MatrixMarket banner: " + banner) {}
};

} // namespace blkorth

#endif // BLKORTH_ERRORS_HPP
