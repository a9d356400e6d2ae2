#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "krlab/ensemble.hpp"

namespace krlab {

struct RootSet {
  std::vector<cplx> roots;
  // |p(root)| / sum_k |a_k| |root|^k
  std::vector<double> residuals;
  int sweeps = 0;

  double max_residual() const;
};

/// Largest relative residual accepted for a sampled polynomial.
inline constexpr double kMaxResidual = 1e-8;

/// All roots of sum_k coeffs[k] z^k (ascending order) by Aberth-Ehrlich
/// simultaneous iteration. Starts on a circle of the Cauchy radius and stops
/// once every correction is below 1e-12 (1 + |root|).
/// Throws DomainError when the leading coefficient is negligible and
/// RootFindFailure after 500 sweeps without convergence.
RootSet aberth_roots(std::span<const cplx> coeffs);

/// Ascending coefficients of h (Zeros) or h' (Critical) for one variable.
std::vector<cplx> univariate_coefficients(const CoefficientVector& c, int N, Mode mode);

/// True when roots can be paired with conjugates to within tol (1 + |z|).
bool conjugation_closed(std::span<const cplx> roots, double tol);

struct SampleBatch {
  std::vector<RootSet> accepted;  // sample index order
  std::vector<std::size_t> failed;
  std::size_t requested = 0;

  double failure_rate() const;
};

/// Maximum tolerated fraction of discarded samples.
inline constexpr double kMaxFailureRate = 1e-3;

/// Draws n_samples one-variable polynomials (stream i = sample_stream(seed, i))
/// and root-finds h' (Critical) or h (Zeros). A sample is discarded and counted
/// when the root finder fails, a residual exceeds kMaxResidual, or, for real
/// coefficients, the roots are not conjugation-closed to 1e-8. The result does
/// not depend on `workers`. Throws RootFindFailure if more than
/// kMaxFailureRate of the samples are discarded.
SampleBatch sample_critical_points(const EnsembleSpec& spec, std::size_t n_samples,
                                   std::uint64_t seed, unsigned workers = 1);

struct HistogramWindow {
  double re_lo = -2.0;
  double re_hi = 2.0;
  double im_lo = -2.0;
  double im_hi = 2.0;
  int nx = 10;
  int ny = 10;
};

struct HistogramCell {
  double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;
  long long count = 0;
  double expected = 0.0;  // integral of the density over the cell (per sample)
  bool excluded = false;
};

struct EmpiricalHistogram {
  HistogramWindow window;
  std::vector<HistogramCell> cells;  // imaginary rows outer, real columns inner
  std::size_t n_samples = 0;
};

/// Empty histogram. Cells whose imaginary range meets (-band, band) are marked
/// excluded (band = 0 excludes nothing).
EmpiricalHistogram make_histogram(const HistogramWindow& window, double exclusion_band = 0.0);

/// Adds every sample's points; points outside the window are ignored.
void accumulate(EmpiricalHistogram& hist, const SampleBatch& batch);

/// expected = integral of density over each non-excluded cell, by midpoint
/// rules on 2^k x 2^k sub-grids doubled until successive estimates agree to
/// rel_tol. Cells are split across `workers` threads; density must be
/// safe to call concurrently.
void fill_expected(EmpiricalHistogram& hist, const std::function<double(cplx)>& density,
                   double rel_tol = 1e-4, unsigned workers = 1);

struct HistogramComparison {
  std::vector<double> z_scores;  // per cell; 0 for excluded cells
  int cells_used = 0;
  int cells_bad = 0;             // |z| > 3
  double fraction_bad = 0.0;
  double max_abs_z = 0.0;
};

/// z = (count - n mu) / sqrt(n mu) with mu the per-sample expected count;
/// 0/0 is taken as 0.
HistogramComparison compare_histogram(const EmpiricalHistogram& hist);

}  // namespace krlab
