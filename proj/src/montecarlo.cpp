#include "krlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include "krlab/errors.hpp"

namespace krlab {

double RootSet::max_residual() const {
  double worst = 0.0;
  for (double r : residuals) worst = std::max(worst, r);
  return worst;
}

namespace {

constexpr int kMaxSweeps = 500;
constexpr double kStepTolerance = 1e-12;

// Positive root of |a_n| r^n = sum_{k<n} |a_k| r^k.
double cauchy_radius(std::span<const cplx> a) {
  const int n = static_cast<int>(a.size()) - 1;
  const double lead = std::abs(a[n]);
  auto excess = [&](double r) {
    double rhs = 0.0;
    double rk = 1.0;
    for (int k = 0; k < n; ++k) {
      rhs += std::abs(a[k]) * rk;
      rk *= r;
    }
    return lead * rk - rhs;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (excess(hi) < 0.0) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

// p(z) / p'(z); for |z| > 1 through the reversed polynomial to keep the
// powers bounded.
cplx newton_ratio(std::span<const cplx> a, cplx z) {
  const int n = static_cast<int>(a.size()) - 1;
  if (std::abs(z) <= 1.0) {
    cplx p = a[n];
    cplx dp = 0.0;
    for (int k = n - 1; k >= 0; --k) {
      dp = dp * z + p;
      p = p * z + a[k];
    }
    return p / dp;
  }
  // q(w) = sum_k a_k w^(n-k), p(z) = z^n q(1/z), p'/p = w (n - w q'/q).
  const cplx w = 1.0 / z;
  cplx q = a[0];
  cplx dq = 0.0;
  for (int k = 1; k <= n; ++k) {
    dq = dq * w + q;
    q = q * w + a[k];
  }
  return 1.0 / (w * (static_cast<double>(n) - w * dq / q));
}

double relative_residual(std::span<const cplx> a, cplx z) {
  const int n = static_cast<int>(a.size()) - 1;
  cplx value = 0.0;
  double scale = 0.0;
  if (std::abs(z) <= 1.0) {
    const double r = std::abs(z);
    for (int k = n; k >= 0; --k) {
      value = value * z + a[k];
      scale = scale * r + std::abs(a[k]);
    }
  } else {
    const cplx w = 1.0 / z;
    const double r = std::abs(w);
    for (int k = 0; k <= n; ++k) {
      value = value * w + a[k];
      scale = scale * r + std::abs(a[k]);
    }
  }
  return scale > 0.0 ? std::abs(value) / scale : 0.0;
}

}  // namespace

RootSet aberth_roots(std::span<const cplx> coeffs) {
  if (coeffs.size() < 2) throw DomainError("aberth_roots: degree must be >= 1");
  double biggest = 0.0;
  for (const auto& c : coeffs) biggest = std::max(biggest, std::abs(c));
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (!(std::abs(coeffs[n]) > 1e-12 * biggest))
    throw DomainError("aberth_roots: leading coefficient is negligible");

  RootSet out;
  out.roots.resize(n);
  const double radius = cauchy_radius(coeffs);
  for (int i = 0; i < n; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / n + 0.4;
    out.roots[i] = std::polar(radius, angle);
  }

  std::vector<bool> done(n, false);
  int remaining = n;
  int sweep = 0;
  while (remaining > 0 && sweep < kMaxSweeps) {
    ++sweep;
    for (int i = 0; i < n; ++i) {
      if (done[i]) continue;
      const cplx zi = out.roots[i];
      const cplx ratio = newton_ratio(coeffs, zi);
      cplx repulsion = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) repulsion += 1.0 / (zi - out.roots[j]);
      const cplx step = ratio / (1.0 - ratio * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
        // Exact hit on a root (p = 0) gives ratio 0, never NaN; a NaN means a
        // collision, nudge and keep iterating.
        out.roots[i] = zi * cplx(1.0, 1e-8) + 1e-8;
        continue;
      }
      out.roots[i] = zi - step;
      if (std::abs(step) < kStepTolerance * (1.0 + std::abs(out.roots[i]))) {
        done[i] = true;
        --remaining;
      }
    }
  }
  out.sweeps = sweep;
  if (remaining > 0) {
    std::ostringstream msg;
    msg << "aberth_roots: " << remaining << " of " << n << " roots unconverged after "
        << kMaxSweeps << " sweeps";
    throw RootFindFailure(msg.str());
  }
  out.residuals.resize(n);
  for (int i = 0; i < n; ++i) out.residuals[i] = relative_residual(coeffs, out.roots[i]);
  return out;
}

std::vector<cplx> univariate_coefficients(const CoefficientVector& c, int N, Mode mode) {
  if (static_cast<int>(c.values.size()) != N + 1)
    throw DomainError("univariate_coefficients: expected N + 1 coefficients");
  std::vector<cplx> out;
  if (mode == Mode::Zeros) {
    out.resize(N + 1);
    for (int l = 0; l <= N; ++l) out[l] = c.values[l] * std::sqrt(binomial(N, l));
  } else {
    out.resize(N);
    for (int l = 1; l <= N; ++l)
      out[l - 1] = c.values[l] * std::sqrt(binomial(N, l)) * static_cast<double>(l);
  }
  return out;
}

bool conjugation_closed(std::span<const cplx> roots, double tol) {
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const cplx target = std::conj(roots[i]);
    const double allowed = tol * (1.0 + std::abs(roots[i]));
    // A real root pairs with itself.
    if (std::abs(roots[i].imag()) <= allowed) {
      used[i] = true;
      continue;
    }
    std::size_t best = roots.size();
    double best_dist = allowed;
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (j == i || used[j]) continue;
      const double dist = std::abs(roots[j] - target);
      if (dist <= best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best == roots.size()) return false;
    used[i] = used[best] = true;
  }
  return true;
}

double SampleBatch::failure_rate() const {
  return requested == 0 ? 0.0 : static_cast<double>(failed.size()) / requested;
}

SampleBatch sample_critical_points(const EnsembleSpec& spec, std::size_t n_samples,
                                   std::uint64_t seed, unsigned workers) {
  spec.validate();
  if (spec.m != 1) throw DomainError("sample_critical_points: only m = 1 is supported");
  workers = std::max(1u, workers);

  std::vector<RootSet> results(n_samples);
  std::vector<char> ok(n_samples, 0);
  auto work = [&](unsigned worker) {
    for (std::size_t i = worker; i < n_samples; i += workers) {
      Rng rng = sample_stream(seed, i);
      const auto coeffs = sample_coefficients(spec, rng);
      const auto poly = univariate_coefficients(coeffs[0], spec.N, spec.mode);
      try {
        RootSet roots = aberth_roots(poly);
        if (roots.max_residual() >= kMaxResidual) continue;
        if (spec.field == Field::Real && !conjugation_closed(roots.roots, 1e-8)) continue;
        results[i] = std::move(roots);
        ok[i] = 1;
      } catch (const RootFindFailure&) {
      } catch (const DomainError&) {
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  SampleBatch batch;
  batch.requested = n_samples;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (ok[i])
      batch.accepted.push_back(std::move(results[i]));
    else
      batch.failed.push_back(i);
  }
  if (batch.failure_rate() > kMaxFailureRate) {
    std::ostringstream msg;
    msg << "sample_critical_points: " << batch.failed.size() << " of " << n_samples
        << " samples failed (first index " << batch.failed.front() << ")";
    throw RootFindFailure(msg.str());
  }
  return batch;
}

EmpiricalHistogram make_histogram(const HistogramWindow& window, double exclusion_band) {
  if (window.nx < 1 || window.ny < 1 || !(window.re_hi > window.re_lo) ||
      !(window.im_hi > window.im_lo))
    throw DomainError("make_histogram: empty window");
  EmpiricalHistogram hist;
  hist.window = window;
  const double dx = (window.re_hi - window.re_lo) / window.nx;
  const double dy = (window.im_hi - window.im_lo) / window.ny;
  for (int iy = 0; iy < window.ny; ++iy) {
    for (int ix = 0; ix < window.nx; ++ix) {
      HistogramCell cell;
      cell.re_lo = window.re_lo + ix * dx;
      cell.re_hi = window.re_lo + (ix + 1) * dx;
      cell.im_lo = window.im_lo + iy * dy;
      cell.im_hi = window.im_lo + (iy + 1) * dy;
      cell.excluded = exclusion_band > 0.0 && cell.im_lo < exclusion_band &&
                      cell.im_hi > -exclusion_band;
      hist.cells.push_back(cell);
    }
  }
  return hist;
}

void accumulate(EmpiricalHistogram& hist, const SampleBatch& batch) {
  const auto& w = hist.window;
  const double dx = (w.re_hi - w.re_lo) / w.nx;
  const double dy = (w.im_hi - w.im_lo) / w.ny;
  for (const auto& sample : batch.accepted) {
    for (const auto& z : sample.roots) {
      if (z.real() < w.re_lo || z.real() >= w.re_hi || z.imag() < w.im_lo || z.imag() >= w.im_hi)
        continue;
      const int ix = std::min(w.nx - 1, static_cast<int>((z.real() - w.re_lo) / dx));
      const int iy = std::min(w.ny - 1, static_cast<int>((z.imag() - w.im_lo) / dy));
      ++hist.cells[iy * w.nx + ix].count;
    }
  }
  hist.n_samples += batch.accepted.size();
}

void fill_expected(EmpiricalHistogram& hist, const std::function<double(cplx)>& density,
                   double rel_tol, unsigned workers) {
  constexpr int kMaxPerSide = 1024;
  auto integrate = [&](HistogramCell& cell) {
    if (cell.excluded) {
      cell.expected = 0.0;
      return;
    }
    auto midpoint = [&](int k) {
      const double hx = (cell.re_hi - cell.re_lo) / k;
      const double hy = (cell.im_hi - cell.im_lo) / k;
      double sum = 0.0;
      for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i)
          sum += density(cplx(cell.re_lo + (i + 0.5) * hx, cell.im_lo + (j + 0.5) * hy));
      return sum * hx * hy;
    };
    int k = 2;
    double previous = midpoint(k);
    double current = previous;
    while (k < kMaxPerSide) {
      k *= 2;
      current = midpoint(k);
      if (std::abs(current - previous) <= rel_tol * std::abs(current)) break;
      previous = current;
    }
    cell.expected = std::max(0.0, current);
  };
  workers = std::max(1u, workers);
  if (workers == 1) {
    for (auto& cell : hist.cells) integrate(cell);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < hist.cells.size(); i += workers) integrate(hist.cells[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

HistogramComparison compare_histogram(const EmpiricalHistogram& hist) {
  HistogramComparison out;
  out.z_scores.assign(hist.cells.size(), 0.0);
  const double n = static_cast<double>(hist.n_samples);
  for (std::size_t i = 0; i < hist.cells.size(); ++i) {
    const auto& cell = hist.cells[i];
    if (cell.excluded) continue;
    ++out.cells_used;
    const double mean = n * cell.expected;
    const double diff = static_cast<double>(cell.count) - mean;
    double z = 0.0;
    if (mean > 0.0)
      z = diff / std::sqrt(mean);
    else if (diff != 0.0)
      z = std::copysign(std::numeric_limits<double>::infinity(), diff);
    out.z_scores[i] = z;
    out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
    if (std::abs(z) > 3.0) ++out.cells_bad;
  }
  out.fraction_bad = out.cells_used == 0 ? 0.0 : static_cast<double>(out.cells_bad) / out.cells_used;
  return out;
}

}  // namespace krlab
