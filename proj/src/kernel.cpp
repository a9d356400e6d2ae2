#include "krlab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "krlab/errors.hpp"

namespace krlab {

void KernelTermSum::canonicalize() {
  std::map<std::tuple<int, std::vector<int>, std::vector<int>>, std::int64_t> merged;
  for (const auto& t : terms) merged[{t.k, t.zexp, t.wexp}] += t.coeff;
  terms.clear();
  for (const auto& [key, coeff] : merged) {
    if (coeff == 0) continue;
    terms.push_back(KernelTerm{coeff, std::get<0>(key), std::get<1>(key), std::get<2>(key)});
  }
}

namespace {

enum class Side { Z, W };

// Product rule for d/dz_a (or d/dw_a) of one term:
//   the monomial factor loses one power of z_a,
//   S^(N-k) -> (N-k) w_a S^(N-k-1), and N^(k) (N-k) = N^(k+1).
KernelTermSum differentiate(const KernelTermSum& expr, Side side, int a) {
  KernelTermSum out{expr.m, {}};
  for (const auto& t : expr.terms) {
    const auto& own = side == Side::Z ? t.zexp : t.wexp;
    if (own[a] > 0) {
      KernelTerm d = t;
      auto& e = side == Side::Z ? d.zexp : d.wexp;
      d.coeff *= e[a];
      --e[a];
      out.terms.push_back(std::move(d));
    }
    KernelTerm d = t;
    d.k += 1;
    auto& other = side == Side::Z ? d.wexp : d.zexp;
    ++other[a];
    out.terms.push_back(std::move(d));
  }
  out.canonicalize();
  return out;
}

template <class T>
std::complex<T> monomial(std::span<const std::complex<T>> x, const std::vector<int>& exps) {
  std::complex<T> v = 1;
  for (std::size_t q = 0; q < exps.size(); ++q)
    for (int i = 0; i < exps[q]; ++i) v *= x[q];
  return v;
}

template <class T>
std::complex<T> int_power(std::complex<T> base, long long exponent) {
  std::complex<T> result = 1;
  while (exponent > 0) {
    if (exponent & 1) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

}  // namespace

KernelTermSum kernel_partial(const MultiIndex& alpha, const MultiIndex& beta) {
  if (alpha.dim() != beta.dim() || alpha.dim() < 1)
    throw DomainError("kernel_partial: alpha and beta must share dimension m >= 1");
  if (alpha.order() > 2 || beta.order() > 2)
    throw DomainError("kernel_partial: derivative order above 2 per side is not supported");
  for (int j : alpha.entries)
    if (j < 0) throw DomainError("kernel_partial: negative entry");
  for (int j : beta.entries)
    if (j < 0) throw DomainError("kernel_partial: negative entry");

  const int m = alpha.dim();
  KernelTermSum expr{m, {KernelTerm{1, 0, std::vector<int>(m, 0), std::vector<int>(m, 0)}}};
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < alpha.entries[a]; ++i) expr = differentiate(expr, Side::Z, a);
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < beta.entries[a]; ++i) expr = differentiate(expr, Side::W, a);
  return expr;
}

long double falling_factorial(long long N, int k) {
  if (k < 0) throw DomainError("falling_factorial: k < 0");
  if (k > N) return 0.0L;
  unsigned __int128 acc = 1;
  for (int i = 0; i < k; ++i) acc *= static_cast<unsigned __int128>(N - i);
  return static_cast<long double>(acc);
}

template <class T>
std::complex<T> evaluate_normalized(const KernelTermSum& expr, std::span<const std::complex<T>> z,
                                    std::span<const std::complex<T>> w, long long N, T s_ref) {
  if (static_cast<int>(z.size()) != expr.m || static_cast<int>(w.size()) != expr.m)
    throw DomainError("evaluate_normalized: point dimension mismatch");
  if (!(s_ref > 0.0)) throw DomainError("evaluate_normalized: s_ref must be positive");

  std::complex<T> s = 1;
  for (int q = 0; q < expr.m; ++q) s += z[q] * w[q];
  const std::complex<T> r = s / s_ref;
  if (std::abs(r) > 1.0 + 1e-12)
    throw DomainError("evaluate_normalized: |1 + z.w| exceeds s_ref");

  std::complex<T> total = 0;
  for (const auto& t : expr.terms) {
    const T ff = static_cast<T>(falling_factorial(N, t.k));
    if (ff == T(0)) continue;
    total += static_cast<T>(t.coeff) * ff * monomial<T>(z, t.zexp) * monomial<T>(w, t.wexp) *
             int_power<T>(r, N - t.k) / std::pow(s_ref, t.k);
  }
  return total;
}

template std::complex<double> evaluate_normalized<double>(const KernelTermSum&,
                                                          std::span<const std::complex<double>>,
                                                          std::span<const std::complex<double>>,
                                                          long long, double);
template std::complex<long double> evaluate_normalized<long double>(
    const KernelTermSum&, std::span<const std::complex<long double>>,
    std::span<const std::complex<long double>>, long long, long double);

std::vector<JetObservable> jet_observables(const EnsembleSpec& spec) {
  const int m = spec.m;
  std::vector<JetObservable> obs;
  if (spec.mode == Mode::Critical) {
    for (int q = 0; q < m; ++q) obs.push_back({0, MultiIndex::unit(m, q)});
    for (int q = 0; q < m; ++q)
      for (int p = q; p < m; ++p)
        obs.push_back({0, MultiIndex::unit(m, q) + MultiIndex::unit(m, p)});
  } else {
    for (int q = 0; q < m; ++q) obs.push_back({q, MultiIndex::zero(m)});
    for (int q = 0; q < m; ++q)
      for (int p = 0; p < m; ++p) obs.push_back({q, MultiIndex::unit(m, p)});
  }
  return obs;
}

template <class T>
BasicJetCovariance<T> jet_covariances(const EnsembleSpec& spec, std::span<const cplx> z) {
  spec.validate();
  if (static_cast<int>(z.size()) != spec.m)
    throw DomainError("jet_covariances: point dimension != m");

  using C = std::complex<T>;
  BasicJetCovariance<T> cov;
  cov.observables = jet_observables(spec);
  cov.n_constraints = spec.m;
  const int d = static_cast<int>(cov.observables.size());

  std::vector<C> zt(z.size());
  std::vector<C> zbar(z.size());
  T s_ref = 1;
  for (std::size_t q = 0; q < z.size(); ++q) {
    zt[q] = C(static_cast<T>(z[q].real()), static_cast<T>(z[q].imag()));
    zbar[q] = std::conj(zt[q]);
    s_ref += std::norm(zt[q]);
  }
  cov.s_ref = s_ref;
  cov.normalization_degree = spec.N;
  const std::span<const C> zs(zt);
  const std::span<const C> zbs(zbar);

  cov.H = CMat<T>::Zero(d, d);
  cov.P = CMat<T>::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      const auto& gi = cov.observables[i];
      const auto& gj = cov.observables[j];
      if (gi.component != gj.component) continue;
      const KernelTermSum expr = kernel_partial(gi.alpha, gj.alpha);
      const C h = evaluate_normalized<T>(expr, zs, zbs, spec.N, s_ref);
      cov.H(i, j) = i == j ? C(h.real(), 0) : h;
      cov.H(j, i) = std::conj(cov.H(i, j));
      if (spec.field == Field::Real) {
        const C p = evaluate_normalized<T>(expr, zs, zs, spec.N, s_ref);
        cov.P(i, j) = p;
        cov.P(j, i) = p;
      }
    }
  }
  return cov;
}

template BasicJetCovariance<double> jet_covariances<double>(const EnsembleSpec&,
                                                            std::span<const cplx>);
template BasicJetCovariance<long double> jet_covariances<long double>(const EnsembleSpec&,
                                                                      std::span<const cplx>);

}  // namespace krlab
