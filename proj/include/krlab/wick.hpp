#pragma once

#include <cstdint>
#include <vector>

#include "krlab/ensemble.hpp"

namespace krlab {

struct XiEntry {
  int sign = 1;
  int index = 0;
};

/// Maps each entry of the 2m x 2m real Jacobian xi of
/// (x, y) -> (Re f, Im f) to a signed component of xi_hat. With g_qp the
/// complex derivative of f_q along z_p (in slot s(q,p) of the reduced list,
/// d slots total) the Cauchy-Riemann equations give
///   xi[q][p]     =  Re g_qp     xi[q][m+p]   = -Im g_qp
///   xi[m+q][p]   =  Im g_qp     xi[m+q][m+p] =  Re g_qp
/// Critical mode identifies g_qp with g_pq (d = m(m+1)/2); Zeros mode does
/// not (d = m^2).
struct XiIndexMap {
  int size = 0;          // 2m
  int reduced_dim = 0;   // 2d
  std::vector<XiEntry> entries;  // row-major, size * size

  const XiEntry& at(int row, int col) const { return entries[row * size + col]; }
};

XiIndexMap build_xi_map(int m, Mode mode);

/// xi assembled from a concrete xi_hat.
RMatrix assemble_xi(const XiIndexMap& map, const Eigen::VectorXd& xi_hat);

/// E[det xi] for xi_hat ~ N(0, Lambda), by Wick expansion over every
/// permutation and every perfect matching of the 2m rows:
///   sum_sigma sgn(sigma) sum_pairings prod E(xi_{i,sigma i} xi_{j,sigma j}).
/// Homogeneous of degree m in Lambda.
template <class T>
T wick_det_expectation(const Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>& Lambda,
                       const XiIndexMap& map);

inline double wick_det_expectation(const RMatrix& Lambda, const XiIndexMap& map) {
  return wick_det_expectation<double>(Lambda, map);
}

struct McEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Sampling estimate of the same expectation; xi_hat drawn through a
/// symmetric square root of Lambda. Throws DomainError if Lambda has a
/// clearly negative eigenvalue.
McEstimate wick_mc_oracle(const RMatrix& Lambda, const XiIndexMap& map, std::size_t n_samples,
                          Rng& rng);

/// All perfect matchings of {0..n-1}, smallest unpaired element first.
std::vector<std::vector<std::pair<int, int>>> perfect_matchings(int n);

}  // namespace krlab
