#include "krlab/realcov.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "krlab/errors.hpp"

namespace krlab {

namespace {

// Real covariance of the observables [first, first+count) against
// [second, second+count2), laid out as [[rr, ri], [ir, ii]].
template <class T>
RMat<T> real_block(const BasicJetCovariance<T>& cov, int first, int count, int second,
                   int count2) {
  RMat<T> out(2 * count, 2 * count2);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < count2; ++j) {
      const auto c =
          complex_to_real_cov<T>(cov.P(first + i, second + j), cov.H(first + i, second + j));
      out(i, j) = c(0, 0);
      out(i, count2 + j) = c(0, 1);
      out(count + i, j) = c(1, 0);
      out(count + i, count2 + j) = c(1, 1);
    }
  }
  return out;
}

}  // namespace

template <class T>
BasicCovarianceBlocks<T> assemble_blocks(const BasicJetCovariance<T>& jetcov,
                                         const EnsembleSpec& spec) {
  const int m = jetcov.n_constraints;
  if (m != spec.m) throw DomainError("assemble_blocks: jet does not match ensemble");
  const int d = static_cast<int>(jetcov.observables.size()) - m;

  BasicCovarianceBlocks<T> blocks;
  blocks.d = d;
  blocks.A = real_block(jetcov, 0, m, 0, m);
  blocks.B = real_block(jetcov, 0, m, m, d);
  blocks.C = real_block(jetcov, m, d, m, d);
  return blocks;
}

template <class T>
double spd_condition(const RMat<T>& M) {
  if (M.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<RMat<T>> eig(M, Eigen::EigenvaluesOnly);
  const T lo = eig.eigenvalues().minCoeff();
  const T hi = eig.eigenvalues().maxCoeff();
  if (!(lo > T(0))) return std::numeric_limits<double>::infinity();
  return static_cast<double>(hi / lo);
}

template <class T>
RMat<T> schur_lambda(const BasicCovarianceBlocks<T>& blocks) {
  const RMat<T>& A = blocks.A;
  const T scale = A.trace() / static_cast<T>(A.rows());
  if (!(scale > T(0)) || !std::isfinite(static_cast<double>(scale)))
    throw DegenerateCovariance("degenerate covariance (real locus): trace(A) is not positive");

  const RMat<T> normalized = A / scale;
  const double cond = spd_condition<T>(normalized);
  if (!(cond <= kMaxConditionA)) {
    std::ostringstream msg;
    msg << "degenerate covariance (real locus): cond(A) = " << cond;
    throw DegenerateCovariance(msg.str());
  }

  Eigen::LLT<RMat<T>> llt(normalized);
  if (llt.info() != Eigen::Success)
    throw DegenerateCovariance("degenerate covariance (real locus): A is not positive definite");

  // B^T A^{-1} B = (L^{-1} B)^T (L^{-1} B) / scale
  const RMat<T> W = llt.matrixL().solve(blocks.B);
  RMat<T> lambda = blocks.C - (W.transpose() * W) / scale;
  lambda = (T(1) / 2) * (lambda + lambda.transpose()).eval();
  return lambda;
}

template BasicCovarianceBlocks<double> assemble_blocks(const BasicJetCovariance<double>&,
                                                       const EnsembleSpec&);
template BasicCovarianceBlocks<long double> assemble_blocks(
    const BasicJetCovariance<long double>&, const EnsembleSpec&);
template double spd_condition<double>(const RMat<double>&);
template double spd_condition<long double>(const RMat<long double>&);
template RMat<double> schur_lambda(const BasicCovarianceBlocks<double>&);
template RMat<long double> schur_lambda(const BasicCovarianceBlocks<long double>&);

}  // namespace krlab
