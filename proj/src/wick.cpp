#include "krlab/wick.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "krlab/errors.hpp"
#include "krlab/kernel.hpp"

namespace krlab {

XiIndexMap build_xi_map(int m, Mode mode) {
  if (m < 1) throw DomainError("build_xi_map: m must be >= 1");

  // slot[q][p] indexes the reduced derivative list, matching jet_observables.
  std::vector<std::vector<int>> slot(m, std::vector<int>(m, -1));
  int d = 0;
  if (mode == Mode::Critical) {
    for (int q = 0; q < m; ++q)
      for (int p = q; p < m; ++p) slot[q][p] = slot[p][q] = d++;
  } else {
    for (int q = 0; q < m; ++q)
      for (int p = 0; p < m; ++p) slot[q][p] = d++;
  }

  XiIndexMap map;
  map.size = 2 * m;
  map.reduced_dim = 2 * d;
  map.entries.resize(static_cast<std::size_t>(4 * m * m));
  auto put = [&](int row, int col, int sign, int index) {
    map.entries[row * map.size + col] = XiEntry{sign, index};
  };
  for (int q = 0; q < m; ++q) {
    for (int p = 0; p < m; ++p) {
      const int re = slot[q][p];
      const int im = d + slot[q][p];
      put(q, p, +1, re);
      put(q, m + p, -1, im);
      put(m + q, p, +1, im);
      put(m + q, m + p, +1, re);
    }
  }
  return map;
}

RMatrix assemble_xi(const XiIndexMap& map, const Eigen::VectorXd& xi_hat) {
  if (xi_hat.size() != map.reduced_dim) throw DomainError("assemble_xi: dimension mismatch");
  RMatrix xi(map.size, map.size);
  for (int r = 0; r < map.size; ++r)
    for (int c = 0; c < map.size; ++c) {
      const auto& e = map.at(r, c);
      xi(r, c) = e.sign * xi_hat(e.index);
    }
  return xi;
}

std::vector<std::vector<std::pair<int, int>>> perfect_matchings(int n) {
  std::vector<std::vector<std::pair<int, int>>> out;
  if (n % 2 != 0) return out;
  std::vector<bool> used(n, false);
  std::vector<std::pair<int, int>> current;
  auto recurse = [&](auto&& self) -> void {
    int first = 0;
    while (first < n && used[first]) ++first;
    if (first == n) {
      out.push_back(current);
      return;
    }
    used[first] = true;
    for (int partner = first + 1; partner < n; ++partner) {
      if (used[partner]) continue;
      used[partner] = true;
      current.emplace_back(first, partner);
      self(self);
      current.pop_back();
      used[partner] = false;
    }
    used[first] = false;
  };
  recurse(recurse);
  return out;
}

namespace {

int permutation_sign(const std::vector<int>& perm) {
  std::vector<bool> seen(perm.size(), false);
  int sign = 1;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = perm[j]) {
      seen[j] = true;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

}  // namespace

template <class T>
T wick_det_expectation(const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& Lambda,
                       const XiIndexMap& map) {
  if (Lambda.rows() != map.reduced_dim || Lambda.cols() != map.reduced_dim)
    throw DomainError("wick_det_expectation: Lambda dimension does not match the xi map");

  const int n = map.size;
  const auto matchings = perfect_matchings(n);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  T total = 0;
  do {
    const int sign = permutation_sign(perm);
    T per_sigma = 0;
    for (const auto& matching : matchings) {
      T product = sign;
      for (const auto& [i, j] : matching) {
        const auto& a = map.at(i, perm[i]);
        const auto& b = map.at(j, perm[j]);
        product *= a.sign * b.sign * Lambda(a.index, b.index);
      }
      per_sigma += product;
    }
    total += per_sigma;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

template double wick_det_expectation<double>(const RMat<double>&, const XiIndexMap&);
template long double wick_det_expectation<long double>(const RMat<long double>&,
                                                       const XiIndexMap&);

McEstimate wick_mc_oracle(const RMatrix& Lambda, const XiIndexMap& map, std::size_t n_samples,
                          Rng& rng) {
  if (Lambda.rows() != map.reduced_dim || Lambda.cols() != map.reduced_dim)
    throw DomainError("wick_mc_oracle: Lambda dimension does not match the xi map");
  if (n_samples < 2) throw DomainError("wick_mc_oracle: need at least two samples");

  Eigen::SelfAdjointEigenSolver<RMatrix> eig(0.5 * (Lambda + Lambda.transpose()));
  const Eigen::VectorXd values = eig.eigenvalues();
  const double scale = std::max(values.cwiseAbs().maxCoeff(), 0.0);
  if (values.minCoeff() < -1e-10 * std::max(scale, 1e-300))
    throw DomainError("wick_mc_oracle: Lambda is not positive semidefinite");
  const RMatrix root =
      eig.eigenvectors() * values.cwiseMax(0.0).cwiseSqrt().asDiagonal();

  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd noise(map.reduced_dim);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (int i = 0; i < noise.size(); ++i) noise(i) = normal(rng);
    const double det = assemble_xi(map, root * noise).determinant();
    sum += det;
    sum_sq += det * det;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = sum / n;
  const double var = std::max(sum_sq / n - mean * mean, 0.0) * n / (n - 1.0);
  return McEstimate{mean, std::sqrt(var / n)};
}

}  // namespace krlab
