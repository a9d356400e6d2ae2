#include "krlab/closedform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "krlab/errors.hpp"

namespace krlab {

namespace {

constexpr double kPi = std::numbers::pi;

// log(1 + sqrt(1 - q)) - log 2 for q = |Q|^2 = exp(log_q), accurate when q is
// tiny: sqrt(1-q) - 1 = -q / (1 + sqrt(1-q)).
double log_potential(double log_q) {
  if (log_q == -std::numeric_limits<double>::infinity()) return 0.0;
  const double q = std::exp(log_q);
  const double one_minus_q = -std::expm1(log_q);
  const double root = std::sqrt(std::max(one_minus_q, 0.0));
  return std::log1p(-q / (2.0 * (1.0 + root)));
}

double log_abs_qn(int N, cplx z) {
  const double n = N;
  const double r2 = std::norm(z);
  return std::log(std::abs(n * n * z * z + n)) - std::log(n * n * r2 + n) +
         (n - 2.0) * (std::log(std::abs(1.0 + z * z)) - std::log1p(r2));
}

double log_abs_q_scaled(cplx z) {
  const double r2 = std::norm(z);
  return std::log(std::abs(1.0 + z * z)) + (z * z).real() - std::log1p(r2) - r2;
}

}  // namespace

double dzdzbar(const std::function<double(cplx)>& f, cplx z) {
  const double h = 1e-4 * std::max(1.0, std::abs(z));
  auto second = [&](cplx dir) {
    const double fm2 = f(z - 2.0 * h * dir);
    const double fm1 = f(z - h * dir);
    const double f0 = f(z);
    const double fp1 = f(z + h * dir);
    const double fp2 = f(z + 2.0 * h * dir);
    return (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h);
  };
  return 0.25 * (second(cplx(1.0, 0.0)) + second(cplx(0.0, 1.0)));
}

double su2_crit_density(int N, cplx z) {
  if (N < 2) throw DomainError("su2_crit_density: N must be >= 2");
  const double r2 = std::norm(z);
  const double s2 = (1.0 + r2) * (1.0 + r2);
  const double t = 1.0 + N * r2;
  return (N / kPi) * (1.0 / s2 - 2.0 / (N * s2) + 1.0 / (t * t));
}

double so2_crit_error(int N, cplx z) {
  if (N < 2) throw DomainError("so2_crit_error: N must be >= 2");
  if (z.imag() == 0.0) throw DomainError("so2_crit_error: z on the real axis");
  const double h = 1e-4 * std::max(1.0, std::abs(z));
  if (std::abs(z.imag()) <= 2.0 * h)
    throw DomainError("so2_crit_error: z closer to the real axis than the stencil");
  return dzdzbar([N](cplx w) { return log_potential(2.0 * log_abs_qn(N, w)); }, z) / kPi;
}

double so2_crit_density(int N, cplx z) { return su2_crit_density(N, z) + so2_crit_error(N, z); }

double su_zero_density(int m, int N, double norm_sq) {
  if (m < 1 || N < 1) throw DomainError("su_zero_density: need m >= 1, N >= 1");
  return m * std::pow(N / kPi, m) * std::pow(1.0 + norm_sq, -(m + 1));
}

double su_zero_density(int m, int N, std::span<const cplx> z) {
  if (static_cast<int>(z.size()) != m) throw DomainError("su_zero_density: dimension != m");
  double norm_sq = 0.0;
  for (const auto& v : z) norm_sq += std::norm(v);
  return su_zero_density(m, N, norm_sq);
}

ScaledDensity scaled_crit_density(Field field, cplx z) {
  const double r2 = std::norm(z);
  ScaledDensity out;
  out.component_cx = (1.0 + 1.0 / ((1.0 + r2) * (1.0 + r2))) / kPi;
  if (field == Field::Real) {
    if (z.imag() == 0.0) throw DomainError("scaled_crit_density: z on the real axis");
    const double h = 1e-4 * std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) <= 2.0 * h)
      throw DomainError("scaled_crit_density: z closer to the real axis than the stencil");
    out.component_err =
        dzdzbar([](cplx w) { return log_potential(2.0 * log_abs_q_scaled(w)); }, z) / kPi;
  }
  out.value = out.component_cx + out.component_err;
  return out;
}

double near_real_slope(double x) {
  const double x2 = x * x;
  const double num = x2 * x2 * x2 + 3.0 * x2 * x2 + 6.0 * x2 + 6.0;
  const double den = 2.0 + 2.0 * x2 + x2 * x2;
  return num / (kPi * den * std::sqrt(den));
}

}  // namespace krlab
