#include <doctest.h>

#include <cmath>
#include <numbers>

#include "krlab/closedform.hpp"
#include "krlab/errors.hpp"
#include "oracles.hpp"

using namespace krlab;
using std::numbers::pi;

TEST_CASE("complex critical density values") {
  for (int N : {2, 3, 10, 50}) CHECK(su2_crit_density(N, 0.0) == doctest::Approx((2.0 * N - 2) / pi));
  CHECK(su2_crit_density(10, 0.0) == doctest::Approx(5.72958).epsilon(1e-6));
  const double want = (10 / pi) * (0.64 - 0.128 + 1 / 12.25);
  CHECK(su2_crit_density(10, cplx(0.0, 0.5)) == doctest::Approx(want).epsilon(1e-14));
  CHECK(want == doctest::Approx(1.88958).epsilon(1e-5));
}

TEST_CASE("complex critical density integrates to N - 1") {
  for (int N : {2, 5, 10, 25}) {
    const double total =
        oracle::radial_integral([N](double t) { return su2_crit_density(N, std::sqrt(t)); }, 1e-10);
    CHECK(oracle::rel_err(total, N - 1.0) < 1e-6);
  }
}

TEST_CASE("complex zero density values and total mass") {
  CHECK(su_zero_density(1, 10, 0.0) == doctest::Approx(10 / pi).epsilon(1e-15));
  CHECK(su_zero_density(2, 5, 0.0) == doctest::Approx(50 / (pi * pi)).epsilon(1e-15));
  for (int N : {1, 4, 17}) {
    const double total =
        oracle::radial_integral([N](double t) { return su_zero_density(1, N, t); }, 1e-10);
    CHECK(oracle::rel_err(total, double(N)) < 1e-6);
  }
  const std::vector<cplx> z{{0.3, 0.1}, {0.0, -0.4}};
  CHECK(su_zero_density(2, 5, z) == su_zero_density(2, 5, 0.09 + 0.01 + 0.16));
}

TEST_CASE("real critical error term") {
  CHECK_THROWS_AS(so2_crit_error(10, cplx(0.5, 0.0)), DomainError);
  CHECK_THROWS_AS(so2_crit_error(10, cplx(0.5, 1e-6)), DomainError);
  // Equal up to finite-difference rounding.
  for (cplx z : {cplx(0.3, 0.4), cplx(-1.2, 0.8), cplx(2.0, 0.1)})
    CHECK(so2_crit_error(12, z) == doctest::Approx(so2_crit_error(12, std::conj(z))).epsilon(1e-8));

  // Negative near R; the relative suppression fades towards the unit circle
  // and returns near infinity, which is also on the real locus of the sphere.
  for (double x : {-1.0, 0.0, 0.5, 1.5})
    for (int N : {10, 25}) {
      double previous = 1.0;
      for (double y : {0.05, 0.2, 0.5, 1.0}) {
        const double rel = so2_crit_error(N, cplx(x, y)) / su2_crit_density(N, cplx(x, y));
        if (y < 1.0) CHECK(rel < 0.0);
        CHECK(std::abs(rel) < previous);
        previous = std::abs(rel);
      }
    }
  const double near_inf = so2_crit_error(10, cplx(0.0, 8.0)) / su2_crit_density(10, cplx(0.0, 8.0));
  CHECK(near_inf < -0.1);
}

TEST_CASE("real critical error term decays exponentially in N") {
  const cplx z{0.0, 0.5};
  double previous = std::abs(so2_crit_error(10, z));
  for (int N = 15; N <= 40; N += 5) {
    const double e = std::abs(so2_crit_error(N, z));
    CHECK(e < previous);
    previous = e;
  }
}

TEST_CASE("scaled densities") {
  const auto origin = scaled_crit_density(Field::Complex, 0.0);
  CHECK(std::abs(origin.value - 2 / pi) < 1e-12);
  CHECK(origin.component_err == 0.0);
  CHECK(scaled_crit_density(Field::Complex, cplx(1e4, 0.0)).value == doctest::Approx(1 / pi).epsilon(1e-12));
  CHECK_THROWS_AS(scaled_crit_density(Field::Real, cplx(0.3, 0.0)), DomainError);
  const auto r = scaled_crit_density(Field::Real, cplx(0.4, 0.9));
  CHECK(r.value == doctest::Approx(r.component_cx + r.component_err).epsilon(1e-15));
}

TEST_CASE("scaled real density is the large-N limit") {
  for (cplx w : {cplx(0.0, 0.5), cplx(0.0, 1.0), cplx(1.0, 1.0)}) {
    const double limit = scaled_crit_density(Field::Real, w).value;
    auto gap = [&](int N) {
      const double s = std::sqrt(double(N));
      return std::abs(so2_crit_density(N, w / s) / N - limit);
    };
    CHECK(gap(1600) * 3 <= gap(400));
  }
}

TEST_CASE("near-real slope") {
  CHECK(std::abs(near_real_slope(0.0) - 3 * std::sqrt(2.0) / (2 * pi)) < 1e-14);
  CHECK(near_real_slope(1.0) == doctest::Approx(16 / (std::pow(5.0, 1.5) * pi)).epsilon(1e-14));
  for (double x : {0.0, 0.5, 1.0, 2.0}) {
    // Richardson on value / y at y and y / 2.
    const double y = 4e-3;
    const double a = scaled_crit_density(Field::Real, cplx(x, y)).value / y;
    const double b = scaled_crit_density(Field::Real, cplx(x, y / 2)).value / (y / 2);
    CHECK(oracle::rel_err(2 * b - a, near_real_slope(x)) < 0.01);
  }
}

TEST_CASE("mixed partial of simple functions") {
  // d^2/dz dzbar |z|^2 = 1, of |z|^4 = 4|z|^2.
  for (cplx z : {cplx(0.0), cplx(0.3, -0.7), cplx(5.0, 2.0)}) {
    CHECK(dzdzbar([](cplx w) { return std::norm(w); }, z) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(dzdzbar([](cplx w) { return std::norm(w) * std::norm(w); }, z) ==
          doctest::Approx(4 * std::norm(z)).epsilon(1e-6).scale(1.0));
  }
}
