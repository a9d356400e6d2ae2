#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "krlab/closedform.hpp"
#include "krlab/errors.hpp"
#include "krlab/kacrice.hpp"
#include "oracles.hpp"

using namespace krlab;
using std::numbers::pi;

TEST_CASE("densities at the origin") {
  const std::vector<cplx> z1{0.0};
  const std::vector<cplx> z2{0.0, 0.0};
  CHECK(density({1, 10, Field::Complex, Mode::Critical}, z1).density ==
        doctest::Approx(18 / pi).epsilon(1e-13));
  CHECK(density({1, 10, Field::Complex, Mode::Zeros}, z1).density ==
        doctest::Approx(10 / pi).epsilon(1e-13));
  CHECK(density({2, 5, Field::Complex, Mode::Zeros}, z2).density ==
        doctest::Approx(50 / (pi * pi)).epsilon(1e-13));
  CHECK(density({2, 5, Field::Complex, Mode::Zeros}, z2).normalization_degree == 0);
}

TEST_CASE("complex critical density matches the closed form") {
  double worst = 0.0;
  for (int N : {2, 5, 10, 25, 100})
    for (int i = 0; i < 50; ++i) {
      const cplx z(-2.0 + 4.0 * (i % 10) / 9.0, -1.5 + 3.0 * (i / 10) / 4.0);
      const double got = density({1, N, Field::Complex, Mode::Critical}, {&z, 1}).density;
      worst = std::max(worst, oracle::rel_err(got, su2_crit_density(N, z)));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("complex zero density matches the closed form for m = 1, 2") {
  Rng rng(21);
  std::normal_distribution<double> normal(0.0, 0.8);
  for (int m = 1; m <= 2; ++m)
    for (int trial = 0; trial < 6; ++trial) {
      std::vector<cplx> z(m);
      for (auto& c : z) c = cplx(normal(rng), normal(rng));
      const int N = 3 + trial;
      const double got = density({m, N, Field::Complex, Mode::Zeros}, z).density;
      CHECK(oracle::rel_err(got, su_zero_density(m, N, z)) < 1e-8);
    }
}

// Known failure: the closed form carries m where the pipeline gives m!.
TEST_CASE("complex zero density matches the closed form for m = 3" * doctest::may_fail()) {
  const std::vector<cplx> z{{0.3, -0.4}, {0.1, 0.2}, {-0.5, 0.0}};
  const double got = density({3, 5, Field::Complex, Mode::Zeros}, z).density;
  CHECK(oracle::rel_err(got, su_zero_density(3, 5, z)) < 1e-8);
}

TEST_CASE("complex zero density integrates to N^m") {
  // Radial profile along the first axis; the density is unitarily invariant.
  for (int m = 1; m <= 3; ++m) {
    const int N = 4;
    double area = std::pow(pi, m - 1);
    for (int k = 2; k < m; ++k) area /= k;
    const double total =
        area * oracle::radial_integral(
                   [&](double t) {
                     std::vector<cplx> z(m, 0.0);
                     z[0] = std::sqrt(t);
                     return std::pow(t, m - 1) * density({m, N, Field::Complex, Mode::Zeros}, z).density;
                   },
                   1e-9);
    CHECK(oracle::rel_err(total, std::pow(double(N), m)) < 1e-6);
  }
}

TEST_CASE("real critical density matches the closed form off the axis") {
  for (int N : {10, 25})
    for (cplx z : {cplx(0.3, 0.7), cplx(-1.0, 0.2), cplx(0.5, -0.4), cplx(1.5, 1.0)}) {
      const double got = density({1, N, Field::Real, Mode::Critical}, {&z, 1}).density;
      CHECK(oracle::rel_err(got, so2_crit_density(N, z)) < 1e-5);
    }
}

TEST_CASE("real coefficients on the real axis are degenerate") {
  const cplx z{0.5, 0.0};
  CHECK_THROWS_AS(density({1, 10, Field::Real, Mode::Critical}, {&z, 1}), DegenerateCovariance);
  const std::vector<cplx> z2{{0.5, 0.0}, {-0.2, 0.0}};
  CHECK_THROWS_AS(density({2, 6, Field::Real, Mode::Zeros}, z2), DegenerateCovariance);
}

TEST_CASE("lambda_z") {
  const std::vector<cplx> half{{0.0, 0.5}};
  CHECK(lambda_z(half) == doctest::Approx(std::log(5.0 / 3.0)).epsilon(1e-14));
  const std::vector<cplx> padded{{0.0, 0.5}, {0.0, 0.0}};
  CHECK(lambda_z(padded) == doctest::Approx(std::log(5.0 / 3.0)).epsilon(1e-14));
  const std::vector<cplx> real{{0.3, 0.0}, {-2.0, 0.0}};
  CHECK(lambda_z(real) == 0.0);
  const std::vector<cplx> i{{0.0, 1.0}};
  CHECK(std::isinf(lambda_z(i)));
  const std::vector<cplx> c{{0.5, 0.5}};
  CHECK(lambda_z(c) == doctest::Approx(std::log(1.5 / std::sqrt(1.25))).epsilon(1e-14));
}

TEST_CASE("density symmetries") {
  const std::vector<cplx> z{{0.4, 0.3}, {-0.2, 0.5}};
  const double c = std::cos(0.9), s = std::sin(0.9);
  for (Field field : {Field::Complex, Field::Real})
    for (Mode mode : {Mode::Critical, Mode::Zeros}) {
      const EnsembleSpec spec{2, 7, field, mode};
      const double base = density(spec, z).density;
      CHECK(oracle::rel_err(density(spec, std::vector<cplx>{std::conj(z[0]), std::conj(z[1])}).density,
                            base) < 1e-10);
      CHECK(oracle::rel_err(density(spec, std::vector<cplx>{-z[0], -z[1]}).density, base) < 1e-10);
      const std::vector<cplx> rot{c * z[0] - s * z[1], s * z[0] + c * z[1]};
      CHECK(oracle::rel_err(density(spec, rot).density, base) < 1e-8);
    }
  for (Mode mode : {Mode::Critical, Mode::Zeros}) {
    const cplx w{0.6, -0.3};
    const EnsembleSpec spec{1, 9, Field::Complex, mode};
    const double base = density(spec, {&w, 1}).density;
    for (double theta : {0.3, 1.7, 4.0}) {
      const cplx r = std::polar(1.0, theta) * w;
      CHECK(oracle::rel_err(density(spec, {&r, 1}).density, base) < 1e-10);
    }
  }
}

TEST_CASE("density is invariant under scaling of the covariances") {
  const std::vector<cplx> z{{0.3, 0.4}, {0.1, -0.2}};
  for (Field field : {Field::Complex, Field::Real})
    for (Mode mode : {Mode::Critical, Mode::Zeros}) {
      const EnsembleSpec spec{2, 6, field, mode};
      const auto jet = jet_covariances(spec, z);
      const double base = density_from_covariance(jet, spec).density;
      for (double t : {1e-6, 1e6}) {
        auto scaled = jet;
        scaled.P *= t;
        scaled.H *= t;
        CHECK(oracle::rel_err(density_from_covariance(scaled, spec).density, base) < 1e-10);
      }
    }
}

TEST_CASE("real/complex ratio approaches 1") {
  const std::vector<cplx> half{{0.0, 0.5}};
  CHECK(std::abs(density_ratio(1, 100, Mode::Critical, half) - 1) <
        std::abs(density_ratio(1, 10, Mode::Critical, half) - 1));
  const std::vector<cplx> near_pole{{0.0, 0.9}};
  CHECK(std::abs(density_ratio(1, 60, Mode::Critical, near_pole) - 1) < 1e-12);
  const std::vector<cplx> pad{{0.0, 0.5}, {0.0, 0.0}};
  double previous = 1.0;
  for (int N : {4, 8, 16, 32}) {
    const double dev = std::abs(ratio_deviation(2, N, Mode::Zeros, pad));
    CHECK(dev < previous);
    previous = dev;
  }
  CHECK(previous < 1e-8);
}

TEST_CASE("ratio deviation is bounded by an exponential envelope at rate lambda - eps") {
  for (cplx w : {cplx(0.5, 0.5), cplx(0.0, 0.5), cplx(0.2, 0.8)})
    for (Mode mode : {Mode::Critical, Mode::Zeros}) {
      const std::vector<cplx> z{w};
      const double rate = 0.9 * lambda_z(z);
      const double K = 10.0 * std::abs(ratio_deviation(1, 10, mode, z)) * std::exp(rate * 10);
      // Deviations below 1e-14 are rounding, the same floor the decay fit uses.
      for (int N = 10; N <= 60; N += 5)
        CHECK(std::abs(ratio_deviation(1, N, mode, z)) <= std::max(K * std::exp(-rate * N), 1e-14));
    }
}

TEST_CASE("decay fit input validation") {
  const std::vector<cplx> z{{0.5, 0.5}};
  const std::vector<int> few{10, 20, 30};
  CHECK_THROWS_AS(decay_rate_fit(1, Mode::Critical, z, few), DomainError);
  const std::vector<int> unordered{10, 20, 15, 30, 40};
  CHECK_THROWS_AS(decay_rate_fit(1, Mode::Critical, z, unordered), DomainError);
  const std::vector<cplx> near_pole{{0.0, 0.99}};
  std::vector<int> Ns;
  for (int N = 10; N <= 20; ++N) Ns.push_back(N);
  CHECK_THROWS_AS(decay_rate_fit(1, Mode::Critical, near_pole, Ns), RateUnresolvable);
}

TEST_CASE("decay fit reports lambda_z and a finite rate") {
  const std::vector<cplx> z{{0.5, 0.5}};
  std::vector<int> Ns;
  for (int N = 10; N <= 60; ++N) Ns.push_back(N);
  const auto fit = decay_rate_fit(1, Mode::Critical, z, Ns);
  CHECK(fit.theoretical_rate == doctest::Approx(0.29389333245).epsilon(1e-9));
  CHECK(fit.n_points >= 5);
  CHECK(std::isfinite(fit.fitted_rate));
  CHECK(fit.fitted_rate > 0.0);
  CHECK(fit.samples.size() == Ns.size());
}

// Known failure: the measured gap decays at about 2 lambda_z.
TEST_CASE("decay fit recovers lambda_z within 10%" * doctest::may_fail()) {
  std::vector<int> to60, to40;
  for (int N = 10; N <= 60; ++N) to60.push_back(N);
  for (int N = 10; N <= 40; ++N) to40.push_back(N);
  const std::vector<cplx> a{{0.5, 0.5}};
  const auto fa = decay_rate_fit(1, Mode::Critical, a, to60);
  CHECK(std::abs(fa.fitted_rate - 0.29389) / 0.29389 < 0.1);
  const std::vector<cplx> b{{0.0, 0.5}, {0.0, 0.0}};
  const auto fb = decay_rate_fit(2, Mode::Zeros, b, to40);
  CHECK(std::abs(fb.fitted_rate - 0.51083) / 0.51083 < 0.1);
}

TEST_CASE("decay rate is unchanged by zero-padding the point") {
  std::vector<int> Ns;
  for (int N = 10; N <= 200; N += 5) Ns.push_back(N);
  const std::vector<cplx> one{{0.0, 0.2}};
  const std::vector<cplx> two{{0.0, 0.2}, {0.0, 0.0}};
  for (Mode mode : {Mode::Critical, Mode::Zeros}) {
    const auto f1 = decay_rate_fit(1, mode, one, Ns);
    const auto f2 = decay_rate_fit(2, mode, two, Ns);
    CHECK(f1.theoretical_rate == f2.theoretical_rate);
    CHECK(std::abs(f2.fitted_rate - f1.fitted_rate) < 0.1 * f1.fitted_rate);
  }
}
