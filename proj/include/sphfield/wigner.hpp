#pragma once

// Wigner d/D functions and the generalized spherical functions T^l_mn.
//
//   d^l_mn(theta)  real Wigner d (standard phases, d^1_10 = -sin(theta)/sqrt2)
//   D^l_mn(g)    = e^{-i m phi1} d^l_mn(theta) e^{-i n phi2}       g in ZYZ
//   T^l_mn(g)    = e^{-i m phi1} P^l_mn(cos theta) e^{-i n phi2}   g in ZXZ
//   P^l_mn       = i^{n-m} d^l_mn
//
// so that D^l_mn(a, b, c) = (-i)^{n-m} T^l_mn(a, b, c) for the same triple,
// and both families are matrix elements of unitary representations.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "sphfield/errors.hpp"
#include "sphfield/rotations.hpp"

namespace sphfield {

struct WignerIndex {
  int l = 0;
  int m = 0;
  int n = 0;

  bool valid() const { return l >= 0 && std::abs(m) <= l && std::abs(n) <= l; }
};

inline void require_valid(const WignerIndex& idx) {
  if (!idx.valid()) {
    throw Error(ErrorKind::index, "invalid Wigner index (l=" +
                                      std::to_string(idx.l) +
                                      ", m=" + std::to_string(idx.m) +
                                      ", n=" + std::to_string(idx.n) + ")");
  }
}

/// i^k for integer k, exact.
template <typename Scalar>
std::complex<Scalar> i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

/// z * i^k without rounding.
template <typename Scalar>
std::complex<Scalar> times_i_pow(std::complex<Scalar> z, int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return z;
    case 1: return {-z.imag(), z.real()};
    case 2: return {-z.real(), -z.imag()};
    default: return {z.imag(), -z.real()};
  }
}

inline int parity_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

namespace detail {

// d^{l0}_{mn}(theta) at the lowest admissible degree l0 = max(|m|, |n|).
// Closed forms from the Wigner sum with a single surviving term.
template <typename Scalar>
Scalar wigner_d_seed(int m, int n, Scalar theta) {
  const int l0 = std::max(std::abs(m), std::abs(n));
  const Scalar c = std::cos(theta / 2);
  const Scalar s = std::sin(theta / 2);

  // value = sign * sqrt(C(2 l0, l0 + k)) * c^pc * s^ps
  int k, pc, ps, sign;
  if (m == l0) {
    k = n; pc = l0 + n; ps = l0 - n; sign = parity_sign(l0 - n);
  } else if (m == -l0) {
    k = n; pc = l0 - n; ps = l0 + n; sign = 1;
  } else if (n == l0) {
    k = m; pc = l0 + m; ps = l0 - m; sign = 1;
  } else {
    k = m; pc = l0 - m; ps = l0 + m; sign = parity_sign(l0 + m);
  }

  Scalar log_value = (std::lgamma(Scalar(2 * l0 + 1)) -
                      std::lgamma(Scalar(l0 + k + 1)) -
                      std::lgamma(Scalar(l0 - k + 1))) / 2;
  if (pc > 0) {
    if (c == 0) return 0;
    log_value += pc * std::log(std::abs(c));
  }
  if (ps > 0) {
    if (s == 0) return 0;
    log_value += ps * std::log(std::abs(s));
  }
  Scalar value = sign * std::exp(log_value);
  // c >= 0 on [0, pi]; s >= 0 too, but keep odd powers honest outside it.
  if (pc % 2 == 1 && c < 0) value = -value;
  if (ps % 2 == 1 && s < 0) value = -value;
  return value;
}

}  // namespace detail

/// Fills out[l] = d^l_mn(theta) for l = 0..l_max at fixed (m, n) using the
/// three-term recursion in l. Entries with l < max(|m|, |n|) are zero.
template <typename Scalar>
void wigner_d_column(int m, int n, Scalar theta, std::span<Scalar> out) {
  const int l_max = static_cast<int>(out.size()) - 1;
  std::fill(out.begin(), out.end(), Scalar(0));
  const int l0 = std::max(std::abs(m), std::abs(n));
  if (l0 > l_max) return;

  // Exact at the poles: d(0) = delta_mn, d(pi) = (-1)^{l+m} delta_{m,-n}.
  if (theta == 0 || theta == std::numbers::pi_v<Scalar>) {
    const bool at_zero = theta == 0;
    if (at_zero ? m != n : m != -n) return;
    for (int l = l0; l <= l_max; ++l) {
      out[l] = at_zero ? Scalar(1) : Scalar(parity_sign(l + m));
    }
    return;
  }

  const Scalar x = std::cos(theta);
  const Scalar mm = m, nn = n;
  out[l0] = detail::wigner_d_seed(m, n, theta);

  Scalar prev = 0;
  Scalar cur = out[l0];
  for (int j = l0; j < l_max; ++j) {
    const Scalar jj = j, j1 = j + 1;
    const Scalar norm_next =
        std::sqrt((j1 * j1 - mm * mm) * (j1 * j1 - nn * nn));
    const Scalar shift = (j == 0) ? Scalar(0) : mm * nn / (jj * j1);
    Scalar next = j1 * (2 * jj + 1) / norm_next * (x - shift) * cur;
    if (j > l0) {
      const Scalar norm_cur = std::sqrt((jj * jj - mm * mm) * (jj * jj - nn * nn));
      next -= norm_cur / norm_next * j1 / jj * prev;
    }
    prev = cur;
    cur = next;
    out[j + 1] = next;
  }
}

/// d^l_mn(theta) via the recursion in l.
template <typename Scalar>
Scalar wigner_d(const WignerIndex& idx, Scalar theta) {
  require_valid(idx);
  std::vector<Scalar> column(idx.l + 1);
  wigner_d_column<Scalar>(idx.m, idx.n, theta, column);
  return column[idx.l];
}

/// Table of d^l_mn(theta) for one l and theta; rows m = -l..l, cols n = -l..l.
template <typename Scalar>
struct WignerBlock {
  int l = 0;
  Scalar theta = 0;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> values;

  Scalar operator()(int m, int n) const { return values(m + l, n + l); }
};

/// All blocks l = 0..l_max at one theta, O(l_max^3).
template <typename Scalar>
std::vector<WignerBlock<Scalar>> wigner_blocks(int l_max, Scalar theta) {
  if (l_max < 0) throw Error(ErrorKind::index, "negative degree");
  std::vector<WignerBlock<Scalar>> blocks(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    blocks[l].l = l;
    blocks[l].theta = theta;
    blocks[l].values.resize(2 * l + 1, 2 * l + 1);
  }
  std::vector<Scalar> column(l_max + 1);
  for (int m = -l_max; m <= l_max; ++m) {
    for (int n = -l_max; n <= l_max; ++n) {
      wigner_d_column<Scalar>(m, n, theta, column);
      for (int l = std::max(std::abs(m), std::abs(n)); l <= l_max; ++l) {
        blocks[l].values(m + l, n + l) = column[l];
      }
    }
  }
  return blocks;
}

template <typename Scalar>
WignerBlock<Scalar> wigner_block(int l, Scalar theta) {
  if (l < 0) throw Error(ErrorKind::index, "negative degree");
  WignerBlock<Scalar> block{l, theta, {}};
  block.values.resize(2 * l + 1, 2 * l + 1);
  std::vector<Scalar> column(l + 1);
  for (int m = -l; m <= l; ++m) {
    for (int n = -l; n <= l; ++n) {
      wigner_d_column<Scalar>(m, n, theta, column);
      block.values(m + l, n + l) = column[l];
    }
  }
  return block;
}

/// Generalized spherical function T^l_mn(g), g in ZXZ.
template <typename Scalar>
std::complex<Scalar> eval_T(const WignerIndex& idx,
                            const EulerAngles<Scalar>& g) {
  require_same_convention(g.convention(), Convention::ZXZ);
  const Scalar d = wigner_d(idx, g.theta());
  const std::complex<Scalar> phase =
      std::polar(Scalar(1), -(idx.m * g.phi1() + idx.n * g.phi2()));
  return times_i_pow(phase * d, idx.n - idx.m);
}

/// Wigner D^l_mn(g), g in ZYZ.
template <typename Scalar>
std::complex<Scalar> eval_D(const WignerIndex& idx,
                            const EulerAngles<Scalar>& g) {
  require_same_convention(g.convention(), Convention::ZYZ);
  const Scalar d = wigner_d(idx, g.theta());
  return std::polar(Scalar(1), -(idx.m * g.phi1() + idx.n * g.phi2())) * d;
}

template <typename Scalar>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Representation matrix of weight l: T^l(g) for ZXZ input, D^l(g) for ZYZ.
/// Rows and columns are indexed by m, n = -l..l.
template <typename Scalar>
ComplexMatrix<Scalar> wigner_matrix(int l, const EulerAngles<Scalar>& g) {
  const auto block = wigner_block(l, g.theta());
  const bool is_t = g.convention() == Convention::ZXZ;
  ComplexMatrix<Scalar> out(2 * l + 1, 2 * l + 1);
  for (int m = -l; m <= l; ++m) {
    const auto left = std::polar(Scalar(1), -m * g.phi1());
    for (int n = -l; n <= l; ++n) {
      auto v = left * std::polar(Scalar(1), -n * g.phi2()) * block(m, n);
      out(m + l, n + l) = is_t ? times_i_pow(v, n - m) : v;
    }
  }
  return out;
}

/// wigner_matrix(l, g) for every l = 0..l_max, sharing one set of d columns.
template <typename Scalar>
std::vector<ComplexMatrix<Scalar>> wigner_matrices(int l_max,
                                                   const EulerAngles<Scalar>& g) {
  const auto blocks = wigner_blocks(l_max, g.theta());
  const bool is_t = g.convention() == Convention::ZXZ;
  std::vector<ComplexMatrix<Scalar>> out(l_max + 1);
  for (int l = 0; l <= l_max; ++l) {
    out[l].resize(2 * l + 1, 2 * l + 1);
    for (int m = -l; m <= l; ++m) {
      const auto left = std::polar(Scalar(1), -m * g.phi1());
      for (int n = -l; n <= l; ++n) {
        auto v = left * std::polar(Scalar(1), -n * g.phi2()) * blocks[l](m, n);
        out[l](m + l, n + l) = is_t ? times_i_pow(v, n - m) : v;
      }
    }
  }
  return out;
}

}  // namespace sphfield
