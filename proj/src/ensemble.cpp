#include "krlab/ensemble.hpp"

#include <cmath>

#include "krlab/errors.hpp"

namespace krlab {

std::string to_string(Field field) { return field == Field::Real ? "real" : "complex"; }

std::string to_string(Mode mode) { return mode == Mode::Critical ? "crit" : "zeros"; }

int MultiIndex::order() const {
  int total = 0;
  for (int j : entries) total += j;
  return total;
}

MultiIndex MultiIndex::unit(int m, int q) {
  MultiIndex e = zero(m);
  e.entries.at(q) = 1;
  return e;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  MultiIndex out = *this;
  for (std::size_t i = 0; i < entries.size(); ++i) out.entries[i] += other.entries.at(i);
  return out;
}

void EnsembleSpec::validate() const {
  if (m < 1) throw DomainError("ensemble: m must be >= 1");
  if (N < 1) throw DomainError("ensemble: N must be >= 1");
  if (mode == Mode::Critical && N < 2) throw DomainError("ensemble: critical mode needs N >= 2");
}

std::size_t EnsembleSpec::dimension() const {
  return static_cast<std::size_t>(std::llround(binomial(N + m, m)));
}

namespace {

// Compositions of `total` into `parts` non-negative entries, first entry
// descending.
void compositions(int total, int parts, std::vector<int>& prefix, std::vector<MultiIndex>& out) {
  if (parts == 1) {
    prefix.push_back(total);
    out.push_back(MultiIndex{prefix});
    prefix.pop_back();
    return;
  }
  for (int first = total; first >= 0; --first) {
    prefix.push_back(first);
    compositions(total - first, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<MultiIndex> enumerate_multi_indices(int m, int N) {
  if (m < 1 || N < 0) throw DomainError("enumerate_multi_indices: need m >= 1, N >= 0");
  std::vector<MultiIndex> out;
  out.reserve(static_cast<std::size_t>(std::llround(binomial(N + m, m))));
  std::vector<int> prefix;
  for (int degree = 0; degree <= N; ++degree) compositions(degree, m, prefix, out);
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  // After step i the accumulator equals C(n-k+i, i), an integer.
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double multinomial_coeff(int N, const MultiIndex& J) {
  if (J.order() > N) throw DomainError("multinomial_coeff: |J| > N");
  double r = 1.0;
  int remaining = N;
  for (int j : J.entries) {
    if (j < 0) throw DomainError("multinomial_coeff: negative entry");
    r *= binomial(remaining, j);
    remaining -= j;
  }
  return r;
}

Rng sample_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x6b726c62u};
  return Rng(seq);
}

std::vector<CoefficientVector> sample_coefficients(const EnsembleSpec& spec, Rng& rng) {
  spec.validate();
  const std::size_t dim = spec.dimension();
  const int count = spec.mode == Mode::Zeros ? spec.m : 1;
  std::normal_distribution<double> normal(0.0, 1.0);
  const double half = std::sqrt(0.5);

  std::vector<CoefficientVector> out(count);
  for (auto& vec : out) {
    vec.values.resize(dim);
    for (auto& c : vec.values) {
      if (spec.field == Field::Real) {
        c = cplx(normal(rng), 0.0);
      } else {
        const double re = normal(rng);
        const double im = normal(rng);
        c = cplx(half * re, half * im);
      }
    }
  }
  return out;
}

namespace {

// powers[q][k] = z_q^k for k = 0..N
std::vector<std::vector<cplx>> power_table(std::span<const cplx> z, int N) {
  std::vector<std::vector<cplx>> powers(z.size(), std::vector<cplx>(N + 1));
  for (std::size_t q = 0; q < z.size(); ++q) {
    powers[q][0] = 1.0;
    for (int k = 1; k <= N; ++k) powers[q][k] = powers[q][k - 1] * z[q];
  }
  return powers;
}

// d^alpha z^J, alpha of order <= 2 given as variable positions (-1 = unused).
cplx monomial_derivative(const MultiIndex& J, const std::vector<std::vector<cplx>>& powers, int a,
                         int b) {
  std::vector<int> e = J.entries;
  double factor = 1.0;
  for (int var : {a, b}) {
    if (var < 0) continue;
    if (e[var] == 0) return 0.0;
    factor *= e[var];
    --e[var];
  }
  cplx value = factor;
  for (std::size_t q = 0; q < e.size(); ++q) value *= powers[q][e[q]];
  return value;
}

}  // namespace

PolynomialJet eval_jet(std::span<const CoefficientVector> coeffs, const EnsembleSpec& spec,
                       std::span<const cplx> z) {
  spec.validate();
  const int m = spec.m;
  if (static_cast<int>(z.size()) != m) throw DomainError("eval_jet: point dimension != m");
  const int expected = spec.mode == Mode::Zeros ? m : 1;
  if (static_cast<int>(coeffs.size()) != expected)
    throw DomainError("eval_jet: wrong number of coefficient vectors");

  const auto indices = enumerate_multi_indices(m, spec.N);
  std::vector<double> weights(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i)
    weights[i] = std::sqrt(multinomial_coeff(spec.N, indices[i]));
  for (const auto& c : coeffs)
    if (c.values.size() != indices.size()) throw DomainError("eval_jet: coefficient length != D_N");

  const auto powers = power_table(z, spec.N);
  PolynomialJet jet;
  jet.second = CMatrix::Zero(m, m);

  if (spec.mode == Mode::Critical) {
    const auto& c = coeffs[0].values;
    cplx value = 0.0;
    std::vector<cplx> grad(m, 0.0);
    for (std::size_t i = 0; i < indices.size(); ++i) {
      const cplx w = c[i] * weights[i];
      value += w * monomial_derivative(indices[i], powers, -1, -1);
      for (int q = 0; q < m; ++q) grad[q] += w * monomial_derivative(indices[i], powers, q, -1);
      // Only q <= p is summed; the mirror copy makes the Hessian exactly symmetric.
      for (int q = 0; q < m; ++q)
        for (int p = q; p < m; ++p)
          jet.second(q, p) += w * monomial_derivative(indices[i], powers, q, p);
    }
    for (int q = 0; q < m; ++q)
      for (int p = 0; p < q; ++p) jet.second(q, p) = jet.second(p, q);
    jet.values = {value};
    jet.gradient = std::move(grad);
  } else {
    jet.values.assign(m, 0.0);
    for (int q = 0; q < m; ++q) {
      const auto& c = coeffs[q].values;
      for (std::size_t i = 0; i < indices.size(); ++i) {
        const cplx w = c[i] * weights[i];
        jet.values[q] += w * monomial_derivative(indices[i], powers, -1, -1);
        for (int p = 0; p < m; ++p)
          jet.second(q, p) += w * monomial_derivative(indices[i], powers, p, -1);
      }
    }
  }
  return jet;
}

}  // namespace krlab
