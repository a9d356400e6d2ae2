#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "krlab/ensemble.hpp"

namespace krlab {

template <class T>
using CMat = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using RMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

/// coeff * N(N-1)...(N-k+1) * z^zexp * w^wexp * S^(N-k), with S = 1 + z.w
struct KernelTerm {
  std::int64_t coeff = 0;
  int k = 0;
  std::vector<int> zexp;
  std::vector<int> wexp;
};

/// Exact symbolic mixed partial of S(z,w)^N. The representation is
/// independent of N; N enters only at evaluation. Coefficients stay integral
/// under differentiation, so no rationals are needed.
struct KernelTermSum {
  int m = 0;
  std::vector<KernelTerm> terms;

  // Merge equal (k, zexp, wexp) keys, drop zero coefficients, sort.
  void canonicalize();
};

/// d^alpha_z d^beta_w S^N with |alpha|, |beta| <= 2.
KernelTermSum kernel_partial(const MultiIndex& alpha, const MultiIndex& beta);

/// N(N-1)...(N-k+1) as an exact integer, converted once.
long double falling_factorial(long long N, int k);

/// Evaluates expr / s_ref^N as
///   sum coeff * N^(k) * z^zexp * w^wexp * r^(N-k) / s_ref^k,  r = S / s_ref.
/// With s_ref = 1 + |z|^2 and w in {z, conj z}, |r| <= 1 and nothing
/// overflows for any N. Throws DomainError if |r| > 1 + 1e-12.
template <class T>
std::complex<T> evaluate_normalized(const KernelTermSum& expr, std::span<const std::complex<T>> z,
                                    std::span<const std::complex<T>> w, long long N, T s_ref);

inline cplx evaluate_normalized(const KernelTermSum& expr, std::span<const cplx> z,
                                std::span<const cplx> w, long long N, double s_ref) {
  return evaluate_normalized<double>(expr, z, w, N, s_ref);
}

/// One entry of the jet: d^alpha applied to polynomial `component`
/// (always 0 in Critical mode).
struct JetObservable {
  int component = 0;
  MultiIndex alpha;
};

/// Jet observables, constraint functions first:
///   Critical: f_q = dh/dz_q for q = 1..m, then d^2h/dz_q dz_p for q <= p
///             (lexicographic), d = m + m(m+1)/2.
///   Zeros:    f_q for q = 1..m, then df_q/dz_p for all (q, p)
///             (lexicographic), d = m + m^2.
std::vector<JetObservable> jet_observables(const EnsembleSpec& spec);

/// Pure (P = E g_i g_j) and hermitian (H = E g_i conj g_j) covariances of the
/// jet, every entry divided by s_ref^N, s_ref = 1 + |z|^2.
template <class T>
struct BasicJetCovariance {
  CMat<T> P;
  CMat<T> H;
  int n_constraints = 0;
  std::vector<JetObservable> observables;
  T s_ref = 1;
  // Power of s_ref divided out of every entry.
  int normalization_degree = 0;
};

using JetCovariance = BasicJetCovariance<double>;

/// H comes from the kernel at w = conj z and does not depend on the field.
/// P is evaluated at w = z for real coefficients and is identically zero for
/// complex ones. Different Zeros-mode components are independent.
template <class T = double>
BasicJetCovariance<T> jet_covariances(const EnsembleSpec& spec, std::span<const cplx> z);

}  // namespace krlab
