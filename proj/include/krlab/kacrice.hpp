#pragma once

#include <span>
#include <vector>

#include "krlab/ensemble.hpp"
#include "krlab/kernel.hpp"
#include "krlab/realcov.hpp"

namespace krlab {

/// Expected number of zeros (or critical points) per unit Lebesgue volume of
/// C^m = R^{2m} at a point.
struct DensityResult {
  double density = 0.0;
  double det_A = 0.0;        // determinant of the s_ref^N-normalized A block
  double lambda_cond = 0.0;  // condition number of Lambda
  // Powers of s_ref contributed by det(A)^{-1/2} (+Nm) and E[det xi] (-Nm);
  // their sum, which must be 0.
  int normalization_degree = 0;
};

/// Kac-Rice density
///   (2 pi)^{-m} det(A)^{-1/2} E_Lambda[det xi]
/// through kernel -> real blocks -> Schur complement -> Wick expansion.
/// Throws DegenerateCovariance for real coefficients on (or too near) R^m and
/// NonFinite if the result is not a finite number.
DensityResult density(const EnsembleSpec& spec, std::span<const cplx> z);

/// Back half of the pipeline, starting from given jet covariances.
DensityResult density_from_covariance(const JetCovariance& jetcov, const EnsembleSpec& spec);

/// The same pipeline carried out in long double. The real/complex gap drops
/// below double roundoff long before it drops below long double roundoff, so
/// ratios and differences are formed from these values.
long double density_extended(const EnsembleSpec& spec, std::span<const cplx> z);

/// density(Real) - density(Complex), extended precision.
long double density_gap(int m, int N, Mode mode, std::span<const cplx> z);

/// density(Real) / density(Complex) at the same (m, N, mode, z), extended
/// precision.
double density_ratio(int m, int N, Mode mode, std::span<const cplx> z);

/// density_ratio - 1, formed as gap / density(Complex) so that deviations
/// below double epsilon are not rounded away.
double ratio_deviation(int m, int N, Mode mode, std::span<const cplx> z);

/// -log |(1 + z.z) / (1 + |z|^2)|; 0 on R^m, +inf where 1 + z.z = 0.
double lambda_z(std::span<const cplx> z);

struct DecayPoint {
  int N = 0;
  double diff = 0.0;  // |density(Real) - density(Complex)|
  double density_complex = 0.0;
};

struct DecayFit {
  double fitted_rate = 0.0;
  double theoretical_rate = 0.0;
  int n_points = 0;   // points entering the regression
  double residual = 0.0;  // RMS residual of the log-linear fit
  std::vector<DecayPoint> samples;
};

/// Relative resolution floor: differences below this fraction of the
/// complex density are roundoff, not signal.
inline constexpr double kDecayResolution = 1e-14;

/// Least-squares slope of log diff(N) against N over the upper envelope
/// (maxima of sliding windows of three consecutive N) of the resolved
/// differences. fitted_rate = -slope. Needs N_list strictly increasing with
/// at least 5 entries; throws RateUnresolvable when every difference is
/// below kDecayResolution * density, or too few remain to fit.
DecayFit decay_rate_fit(int m, Mode mode, std::span<const cplx> z, std::span<const int> N_list);

}  // namespace krlab
