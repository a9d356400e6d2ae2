#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace krlab {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

enum class Field { Real, Complex };
enum class Mode { Zeros, Critical };

std::string to_string(Field field);
std::string to_string(Mode mode);

struct MultiIndex {
  std::vector<int> entries;

  int dim() const { return static_cast<int>(entries.size()); }
  int order() const;

  static MultiIndex zero(int m) { return MultiIndex{std::vector<int>(m, 0)}; }
  static MultiIndex unit(int m, int q);

  MultiIndex operator+(const MultiIndex& other) const;
  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

/// Fixes the Gaussian measure: m variables, degree N, real or complex
/// coefficients, and whether we count zeros of m independent polynomials or
/// critical points of a single one.
struct EnsembleSpec {
  int m = 1;
  int N = 1;
  Field field = Field::Complex;
  Mode mode = Mode::Critical;

  // Throws DomainError when m < 1, N < 1, or N < 2 in Critical mode.
  void validate() const;
  // D_N = C(N+m, m)
  std::size_t dimension() const;
};

/// All J with |J| <= N, graded by |J| and, within a degree, ordered
/// lexicographically descending, e.g. (2,0),(1,1),(0,2).
std::vector<MultiIndex> enumerate_multi_indices(int m, int N);

double binomial(int n, int k);

/// N! / ((N-|J|)! j_1! ... j_m!), built as a product of binomials so nothing
/// overflows for N <= 500. Exact whenever the result is below 2^53.
double multinomial_coeff(int N, const MultiIndex& J);

/// One coefficient per multi-index, in enumerate_multi_indices order.
struct CoefficientVector {
  std::vector<cplx> values;
};

/// Independent stream for sample `index` under `seed`; the result depends only
/// on the pair, never on how samples are distributed across workers.
Rng sample_stream(std::uint64_t seed, std::uint64_t index);

/// Critical mode: one vector. Zeros mode: m independent vectors.
/// Real field: iid N(0,1). Complex field: iid with E|c|^2 = 1, Re and Im each
/// N(0, 1/2).
std::vector<CoefficientVector> sample_coefficients(const EnsembleSpec& spec, Rng& rng);

struct PolynomialJet {
  std::vector<cplx> values;    // h (Critical) or f_1..f_m (Zeros)
  std::vector<cplx> gradient;  // dh/dz_q, Critical mode only
  CMatrix second;              // Hessian of h (Critical) or Jacobian df_q/dz_p (Zeros)
};

/// Direct evaluation of sum_J c_J C(N,J)^{1/2} z^J and its derivatives.
/// Powers are formed by repeated multiplication; stable for |z_q| <= 10 at
/// the degrees used here, overflows to inf for large |z|^N.
PolynomialJet eval_jet(std::span<const CoefficientVector> coeffs, const EnsembleSpec& spec,
                       std::span<const cplx> z);

}  // namespace krlab
