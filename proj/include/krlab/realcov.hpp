#pragma once

#include "krlab/ensemble.hpp"
#include "krlab/kernel.hpp"

namespace krlab {

/// Real covariance blocks of (X, xi_hat), where
///   X      = (Re f_1..Re f_m, Im f_1..Im f_m)      (2m)
///   xi_hat = (Re g_1..Re g_d, Im g_1..Im g_d)      (2d)
/// and g_j are the derivative observables of the jet. Lambda is the
/// covariance of xi_hat conditioned on X = 0.
template <class T>
struct BasicCovarianceBlocks {
  RMat<T> A;
  RMat<T> B;
  RMat<T> C;
  RMat<T> Lambda;
  int d = 0;
};

using CovarianceBlocks = BasicCovarianceBlocks<double>;

/// [[E(u^r v^r), E(u^r v^i)], [E(u^i v^r), E(u^i v^i)]] from P = E(uv) and
/// H = E(u conj v).
template <class T>
Eigen::Matrix<T, 2, 2> complex_to_real_cov(std::complex<T> P, std::complex<T> H) {
  Eigen::Matrix<T, 2, 2> out;
  const T half = T(1) / 2;
  out(0, 0) = half * (P.real() + H.real());
  out(0, 1) = half * (P.imag() - H.imag());
  out(1, 0) = half * (P.imag() + H.imag());
  out(1, 1) = half * (H.real() - P.real());
  return out;
}

inline Eigen::Matrix2d complex_to_real_cov(cplx P, cplx H) {
  return complex_to_real_cov<double>(P, H);
}

/// Fills A, B, C; Lambda is left empty.
template <class T>
BasicCovarianceBlocks<T> assemble_blocks(const BasicJetCovariance<T>& jetcov,
                                         const EnsembleSpec& spec);

/// Largest condition number of the trace-normalized A that schur_lambda
/// accepts.
inline constexpr double kMaxConditionA = 1e12;

/// Condition number of a symmetric PSD matrix; +inf if it is singular.
template <class T>
double spd_condition(const RMat<T>& M);

/// Lambda = C - B^T A^{-1} B via a Cholesky factorization of A, symmetrized.
/// Throws DegenerateCovariance when A is singular or cond(A) > 1e12.
template <class T>
RMat<T> schur_lambda(const BasicCovarianceBlocks<T>& blocks);

}  // namespace krlab
