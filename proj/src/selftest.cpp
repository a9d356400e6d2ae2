#include "krlab/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "krlab/closedform.hpp"
#include "krlab/kacrice.hpp"
#include "krlab/wick.hpp"

namespace krlab {

bool SelftestReport::passed() const {
  return !suites.empty() &&
         std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
}

namespace {

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

SuiteResult run_suite(const std::string& name, double tolerance,
                      const std::function<void(SuiteResult&)>& body) {
  SuiteResult s;
  s.name = name;
  s.tolerance = tolerance;
  try {
    body(s);
    s.passed = s.checks > 0 && s.max_error <= tolerance;
  } catch (const std::exception& e) {
    s.detail = e.what();
    s.passed = false;
  }
  return s;
}

void record(SuiteResult& s, double err) {
  ++s.checks;
  s.max_error = std::max(s.max_error, std::isfinite(err) ? err : 1e300);
}

const cplx kPoints[] = {{0.0, 0.0}, {0.3, 0.7}, {-1.2, 0.4}, {0.5, -0.5}, {2.0, 1.5}};
const cplx kOffAxis[] = {{0.3, 0.7}, {-1.2, 0.4}, {0.5, -0.5}, {0.1, 1.1}};

}  // namespace

SelftestReport run_selftest(unsigned seed) {
  SelftestReport report;

  report.suites.push_back(run_suite("closedform-crit-complex", 1e-10, [](SuiteResult& s) {
    for (int N : {2, 5, 10, 25})
      for (cplx z : kPoints) {
        const EnsembleSpec spec{1, N, Field::Complex, Mode::Critical};
        record(s, rel_err(density(spec, {&z, 1}).density, su2_crit_density(N, z)));
      }
  }));

  report.suites.push_back(run_suite("closedform-zeros-complex", 1e-8, [](SuiteResult& s) {
    for (int m : {1, 2})
      for (int N : {3, 7}) {
        std::vector<cplx> z(m);
        for (cplx w : kPoints) {
          std::fill(z.begin(), z.end(), w);
          z[0] *= 0.5;
          const EnsembleSpec spec{m, N, Field::Complex, Mode::Zeros};
          record(s, rel_err(density(spec, z).density, su_zero_density(m, N, z)));
        }
      }
  }));

  report.suites.push_back(run_suite("closedform-crit-real", 1e-5, [](SuiteResult& s) {
    for (int N : {10, 25})
      for (cplx z : kOffAxis) {
        const EnsembleSpec spec{1, N, Field::Real, Mode::Critical};
        record(s, rel_err(density(spec, {&z, 1}).density, so2_crit_density(N, z)));
      }
  }));

  // |analytic - sampled| in standard errors.
  report.suites.push_back(run_suite("wick-vs-oracle", 4.0, [seed](SuiteResult& s) {
    Rng rng(seed);
    std::normal_distribution<double> normal;
    for (int m : {1, 2})
      for (Mode mode : {Mode::Critical, Mode::Zeros}) {
        const XiIndexMap map = build_xi_map(m, mode);
        const int d = map.reduced_dim;
        RMatrix G(d, d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) G(i, j) = normal(rng);
        const RMatrix Lambda = G * G.transpose() / d;
        const double exact = wick_det_expectation(Lambda, map);
        const McEstimate mc = wick_mc_oracle(Lambda, map, 40000, rng);
        record(s, std::abs(exact - mc.mean) / mc.standard_error);
      }
  }));

  report.suites.push_back(run_suite("wick-homogeneity", 1e-12, [seed](SuiteResult& s) {
    Rng rng(seed + 1);
    std::normal_distribution<double> normal;
    for (int m : {1, 2, 3}) {
      const XiIndexMap map = build_xi_map(m, Mode::Zeros);
      const int d = map.reduced_dim;
      RMatrix G(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) G(i, j) = normal(rng);
      const RMatrix Lambda = G * G.transpose() / d;
      const double t = 1.7;
      record(s, rel_err(wick_det_expectation(RMatrix(t * Lambda), map),
                        std::pow(t, m) * wick_det_expectation(Lambda, map)));
    }
  }));

  // Conjugation, negation and, for complex coefficients, unitary rotation.
  report.suites.push_back(run_suite("symmetry", 1e-10, [](SuiteResult& s) {
    for (Field field : {Field::Complex, Field::Real})
      for (Mode mode : {Mode::Critical, Mode::Zeros}) {
        const EnsembleSpec spec{2, 6, field, mode};
        const std::vector<cplx> z{{0.3, 0.6}, {-0.4, 0.2}};
        const double base = density(spec, z).density;
        const std::vector<cplx> conj{std::conj(z[0]), std::conj(z[1])};
        const std::vector<cplx> neg{-z[0], -z[1]};
        record(s, rel_err(density(spec, conj).density, base));
        record(s, rel_err(density(spec, neg).density, base));
        if (field == Field::Complex) {
          // Rotation in the (z1, z2) plane by a unitary matrix.
          const double c = std::cos(0.7), sn = std::sin(0.7);
          const cplx ph = std::polar(1.0, 0.3);
          const std::vector<cplx> rot{c * z[0] - sn * ph * z[1], sn * std::conj(ph) * z[0] + c * z[1]};
          record(s, rel_err(density(spec, rot).density, base));
        }
      }
  }));

  return report;
}

}  // namespace krlab
