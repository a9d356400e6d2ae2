#include <doctest.h>

#include <cmath>
#include <map>

#include "krlab/errors.hpp"
#include "krlab/kacrice.hpp"
#include "krlab/wick.hpp"

using namespace krlab;

namespace {

RMatrix random_psd(Rng& rng, int d) {
  std::normal_distribution<double> normal;
  RMatrix G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = normal(rng);
  return G * G.transpose() / d;
}

}  // namespace

TEST_CASE("m = 1 map is a single Cauchy-Riemann pair") {
  const auto map = build_xi_map(1, Mode::Critical);
  REQUIRE(map.size == 2);
  REQUIRE(map.reduced_dim == 2);
  Eigen::VectorXd x(2);
  x << 1.5, -0.25;
  const RMatrix xi = assemble_xi(map, x);
  CHECK(xi(0, 0) == 1.5);
  CHECK(xi(0, 1) == 0.25);
  CHECK(xi(1, 0) == -0.25);
  CHECK(xi(1, 1) == 1.5);
}

TEST_CASE("m = 2 critical map uses 6 components, each 2 or 4 times") {
  const auto map = build_xi_map(2, Mode::Critical);
  CHECK(map.entries.size() == 16);
  CHECK(map.reduced_dim == 6);
  std::map<int, int> uses;
  for (const auto& e : map.entries) ++uses[e.index];
  CHECK(uses.size() == 6);
  for (const auto& [index, count] : uses) CHECK((count == 2 || count == 4));
}

TEST_CASE("assembled xi satisfies Cauchy-Riemann") {
  Rng rng(3);
  std::normal_distribution<double> normal;
  for (int m = 1; m <= 3; ++m)
    for (Mode mode : {Mode::Critical, Mode::Zeros}) {
      const auto map = build_xi_map(m, mode);
      Eigen::VectorXd x(map.reduced_dim);
      for (int i = 0; i < x.size(); ++i) x(i) = normal(rng);
      const RMatrix xi = assemble_xi(map, x);
      CHECK(xi.topLeftCorner(m, m) == xi.bottomRightCorner(m, m));
      CHECK(xi.topRightCorner(m, m) == -xi.bottomLeftCorner(m, m));
      if (mode == Mode::Critical) CHECK(xi.topLeftCorner(m, m) == xi.topLeftCorner(m, m).transpose());
      // det of the real form is |det|^2 of the complex matrix.
      CMatrix g(m, m);
      for (int q = 0; q < m; ++q)
        for (int p = 0; p < m; ++p) g(q, p) = cplx(xi(q, p), xi(m + q, p));
      CHECK(std::abs(xi.determinant() - std::norm(g.determinant())) <
            1e-12 * (1 + std::abs(xi.determinant())));
    }
}

TEST_CASE("Wick expectation, hand-checked values") {
  const auto map = build_xi_map(1, Mode::Critical);
  CHECK(wick_det_expectation(RMatrix::Identity(2, 2), map) == doctest::Approx(2.0).epsilon(1e-15));
  RMatrix L(2, 2);
  L << 2, 0.5, 0.5, 3;
  CHECK(wick_det_expectation(L, map) == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("perfect matchings count (2k-1)!!") {
  CHECK(perfect_matchings(2).size() == 1);
  CHECK(perfect_matchings(4).size() == 3);
  CHECK(perfect_matchings(6).size() == 15);
}

TEST_CASE("Wick expectation agrees with the sampling oracle") {
  Rng rng(77);
  for (int m = 1; m <= 3; ++m)
    for (Mode mode : {Mode::Critical, Mode::Zeros}) {
      const auto map = build_xi_map(m, mode);
      const RMatrix L = random_psd(rng, map.reduced_dim);
      const double exact = wick_det_expectation(L, map);
      const auto mc = wick_mc_oracle(L, map, m == 3 ? 200000 : 1000000, rng);
      CHECK(std::abs(exact - mc.mean) < 4 * mc.standard_error);
    }
}

TEST_CASE("sampling oracle special cases") {
  Rng rng(5);
  const auto map = build_xi_map(1, Mode::Critical);
  const auto zero = wick_mc_oracle(RMatrix::Zero(2, 2), map, 1000, rng);
  CHECK(zero.mean == 0.0);
  CHECK(zero.standard_error == 0.0);
  const auto id = wick_mc_oracle(RMatrix::Identity(2, 2), map, 100000, rng);
  CHECK(std::abs(id.mean - 2.0) < 4 * id.standard_error);
  const auto four = wick_mc_oracle(4.0 * RMatrix::Identity(2, 2), map, 100000, rng);
  CHECK(std::abs(four.mean - 4.0 * 2.0) < 4 * four.standard_error);
  RMatrix bad(2, 2);
  bad << 1, 0, 0, -1;
  CHECK_THROWS_AS(wick_mc_oracle(bad, map, 10, rng), DomainError);
}

TEST_CASE("Wick expectation is homogeneous of degree m") {
  Rng rng(12);
  for (int m = 1; m <= 3; ++m)
    for (Mode mode : {Mode::Critical, Mode::Zeros}) {
      const auto map = build_xi_map(m, mode);
      const RMatrix L = random_psd(rng, map.reduced_dim);
      const double base = wick_det_expectation(L, map);
      for (double t : {1e-3, 1e3}) {
        const double scaled = wick_det_expectation(RMatrix(t * L), map);
        CHECK(std::abs(scaled - std::pow(t, m) * base) <= 1e-12 * std::pow(t, m) * std::abs(base));
      }
    }
}

TEST_CASE("Wick expectation is nonnegative on pipeline covariances") {
  Rng rng(4);
  std::normal_distribution<double> normal(0.0, 0.7);
  for (int m = 1; m <= 3; ++m)
    for (Mode mode : {Mode::Critical, Mode::Zeros})
      for (Field field : {Field::Complex, Field::Real})
        for (int trial = 0; trial < 3; ++trial) {
          std::vector<cplx> z(m);
          for (auto& c : z) c = cplx(normal(rng), normal(rng) + 0.2);
          const EnsembleSpec spec{m, 5, field, mode};
          auto blocks = assemble_blocks(jet_covariances(spec, z), spec);
          const RMatrix L = schur_lambda(blocks);
          CHECK(wick_det_expectation(L, build_xi_map(m, mode)) >= -1e-10 * std::pow(L.trace(), m));
        }
}
