#include "blkorth/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "blkorth/errors.hpp"

namespace blkorth {

namespace {
Eigen::Map<const Eigen::MatrixXd> as_eigen(const DenseMatrix& m) {
  return {m.data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}
} // namespace

double orthogonality_error(const DenseMatrix& q) {
  if (q.empty()) return 0.0;
  const auto qe = as_eigen(q);
  Eigen::MatrixXd defect =
      Eigen::MatrixXd::Identity(qe.cols(), qe.cols()) - qe.transpose() * qe;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(defect, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

std::vector<double> singular_values(const DenseMatrix& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(as_eigen(m));
  const auto& sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

double condition_number(const DenseMatrix& v) {
  const auto sv = singular_values(v);
  if (sv.empty() || sv.front() == 0.0) throw ZeroMatrix();
  const double smin = sv.back();
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return sv.front() / smin;
}

} // namespace blkorth
