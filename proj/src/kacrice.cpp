#include "krlab/kacrice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "krlab/errors.hpp"
#include "krlab/wick.hpp"

namespace krlab {

namespace {

template <class T>
struct PipelineValue {
  T density = 0;
  T det_A = 0;
  double lambda_cond = 0.0;
  int normalization_degree = 0;
};

template <class T>
PipelineValue<T> run_pipeline(const BasicJetCovariance<T>& jetcov, const EnsembleSpec& spec) {
  const int m = spec.m;
  BasicCovarianceBlocks<T> blocks = assemble_blocks<T>(jetcov, spec);
  blocks.Lambda = schur_lambda<T>(blocks);

  const XiIndexMap map = build_xi_map(m, spec.mode);
  const T expected_det = wick_det_expectation<T>(blocks.Lambda, map);

  PipelineValue<T> out;
  out.det_A = blocks.A.determinant();
  out.lambda_cond = spd_condition<T>(blocks.Lambda);
  // det A scales as s_ref^{-2Nm}, E[det xi] as s_ref^{-Nm}.
  const int from_det_a = jetcov.normalization_degree * m;
  const int from_wick = -jetcov.normalization_degree * m;
  out.normalization_degree = from_det_a + from_wick;

  if (!(out.det_A > T(0)))
    throw DegenerateCovariance("degenerate covariance (real locus): det(A) <= 0");
  const T prefactor = std::pow(2 * std::numbers::pi_v<T>, -m);
  out.density = prefactor * expected_det / std::sqrt(out.det_A);
  if (!std::isfinite(static_cast<double>(out.density)))
    throw NonFinite("density: non-finite result");
  // Roundoff can leave a tiny negative value where the true density vanishes.
  out.density = std::max(out.density, T(0));
  return out;
}

void check_point(const EnsembleSpec& spec, std::span<const cplx> z) {
  spec.validate();
  if (static_cast<int>(z.size()) != spec.m) throw DomainError("density: point dimension != m");
  for (const auto& v : z)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw NonFinite("density: non-finite point");
}

}  // namespace

DensityResult density_from_covariance(const JetCovariance& jetcov, const EnsembleSpec& spec) {
  const auto v = run_pipeline<double>(jetcov, spec);
  return DensityResult{v.density, v.det_A, v.lambda_cond, v.normalization_degree};
}

DensityResult density(const EnsembleSpec& spec, std::span<const cplx> z) {
  check_point(spec, z);
  return density_from_covariance(jet_covariances<double>(spec, z), spec);
}

long double density_extended(const EnsembleSpec& spec, std::span<const cplx> z) {
  check_point(spec, z);
  return run_pipeline<long double>(jet_covariances<long double>(spec, z), spec).density;
}

long double density_gap(int m, int N, Mode mode, std::span<const cplx> z) {
  return density_extended({m, N, Field::Real, mode}, z) -
         density_extended({m, N, Field::Complex, mode}, z);
}

double density_ratio(int m, int N, Mode mode, std::span<const cplx> z) {
  const long double real = density_extended({m, N, Field::Real, mode}, z);
  const long double cx = density_extended({m, N, Field::Complex, mode}, z);
  return static_cast<double>(real / cx);
}

double ratio_deviation(int m, int N, Mode mode, std::span<const cplx> z) {
  const long double real = density_extended({m, N, Field::Real, mode}, z);
  const long double cx = density_extended({m, N, Field::Complex, mode}, z);
  return static_cast<double>((real - cx) / cx);
}

double lambda_z(std::span<const cplx> z) {
  cplx zz = 1.0;
  double norm = 1.0;
  for (const auto& v : z) {
    zz += v * v;
    norm += std::norm(v);
  }
  const double ratio = std::abs(zz) / norm;
  if (ratio == 0.0) return std::numeric_limits<double>::infinity();
  return std::max(-std::log(ratio), 0.0);
}

DecayFit decay_rate_fit(int m, Mode mode, std::span<const cplx> z, std::span<const int> N_list) {
  if (N_list.size() < 5) throw DomainError("decay_rate_fit: need at least 5 degrees");
  for (std::size_t i = 1; i < N_list.size(); ++i)
    if (N_list[i] <= N_list[i - 1]) throw DomainError("decay_rate_fit: N_list must increase");

  DecayFit fit;
  fit.theoretical_rate = lambda_z(z);
  for (int N : N_list) {
    const long double real = density_extended({m, N, Field::Real, mode}, z);
    const long double cx = density_extended({m, N, Field::Complex, mode}, z);
    fit.samples.push_back(
        {N, static_cast<double>(std::abs(real - cx)), static_cast<double>(cx)});
  }

  std::vector<std::size_t> resolved;
  for (std::size_t i = 0; i < fit.samples.size(); ++i)
    if (fit.samples[i].diff > kDecayResolution * fit.samples[i].density_complex)
      resolved.push_back(i);
  if (resolved.empty())
    throw RateUnresolvable("decay_rate_fit: every difference is below the resolution floor");

  // Upper envelope: the largest difference in each window of three
  // consecutive resolved samples.
  std::set<std::size_t> envelope;
  for (std::size_t w = 0; w + 2 < resolved.size(); ++w) {
    std::size_t best = resolved[w];
    for (std::size_t k = w; k < w + 3; ++k)
      if (fit.samples[resolved[k]].diff > fit.samples[best].diff) best = resolved[k];
    envelope.insert(best);
  }
  if (envelope.size() < 5)
    throw RateUnresolvable("decay_rate_fit: fewer than 5 resolved envelope points");

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(envelope.size());
  for (std::size_t i : envelope) {
    const double x = fit.samples[i].N;
    const double y = std::log(fit.samples[i].diff);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i : envelope) {
    const double r = std::log(fit.samples[i].diff) - (intercept + slope * fit.samples[i].N);
    ss += r * r;
  }
  fit.fitted_rate = -slope;
  fit.n_points = static_cast<int>(envelope.size());
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace krlab
