#pragma once

#include <functional>

#include "krlab/ensemble.hpp"

namespace krlab {

/// Expected density of critical points of the complex-coefficient degree-N
/// polynomial in one variable:
///   (N/pi) (1/(1+|z|^2)^2 - 2/(N (1+|z|^2)^2) + 1/(1+N|z|^2)^2)
double su2_crit_density(int N, cplx z);

/// (1/pi) d^2/dz dzbar log(1 + sqrt(1 - |Q_N|^2)),
///   Q_N = (N^2 z^2 + N)(1+z^2)^{N-2} / ((N^2|z|^2 + N)(1+|z|^2)^{N-2}).
/// |Q_N| is formed in log space, so any N is safe. Throws DomainError on R.
double so2_crit_error(int N, cplx z);

/// Real-coefficient counterpart: su2_crit_density + so2_crit_error.
double so2_crit_density(int N, cplx z);

/// m N^m / pi^m (1 + |z|^2)^{-(m+1)}, zeros of m complex-coefficient
/// polynomials in m variables; |z|^2 is passed as a norm.
double su_zero_density(int m, int N, double norm_sq);
double su_zero_density(int m, int N, std::span<const cplx> z);

struct ScaledDensity {
  double value = 0.0;
  double component_cx = 0.0;
  double component_err = 0.0;
};

/// Limit of N^{-1} E(C)(z / sqrt N). Complex: (1/pi)(1 + 1/(1+|z|^2)^2), no
/// error part. Real: adds (1/pi) d^2/dz dzbar log(1 + sqrt(1 - |Q|^2)) with
/// Q = (1+z^2) e^{z^2} / ((1+|z|^2) e^{|z|^2}). Real on R throws DomainError.
ScaledDensity scaled_crit_density(Field field, cplx z);

/// Coefficient of y in the real scaled density near x + 0i:
///   (1/pi) (x^6 + 3x^4 + 6x^2 + 6) / (2 + 2x^2 + x^4)^{3/2}
double near_real_slope(double x);

/// d^2 f / dz dzbar = (1/4) Laplacian, fourth-order central differences with
/// step h = 1e-4 max(1, |z|).
double dzdzbar(const std::function<double(cplx)>& f, cplx z);

}  // namespace krlab
