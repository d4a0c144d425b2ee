#pragma once

#include <complex>
#include <map>
#include <utility>

#include "sphfield/wigner.hpp"

namespace sphfield {

/// Largest degree the exact-polynomial oracle accepts.
inline constexpr int kRodriguesMaxDegree = 16;

/// Differentiated Rodrigues polynomial for one index, built once and
/// evaluated at many points.
class RodriguesOracle {
 public:
  explicit RodriguesOracle(const WignerIndex& idx);

  std::complex<double> P(double z) const;
  double d(double theta) const;

 private:
  std::complex<double> evaluate(long double u, long double v) const;

  WignerIndex idx_;
  long double norm_ = 0;
  // (2 * power of u, 2 * power of v) -> integer coefficient
  std::map<std::pair<int, int>, __int128> terms_;
};

/// P^l_mn(z) from the Rodrigues-type derivative formula, with the
/// (1-z)^{l-m} (1+z)^{l+m} kernel. Slow oracle: exact integer polynomial
/// differentiation in u = 1-z, v = 1+z, then one long double evaluation.
/// Accepts |z| <= 1 (the singular prefactors are cancelled symbolically).
std::complex<double> rodrigues_P(const WignerIndex& idx, double z);

/// (-i)^{n-m} P^l_mn(cos theta), which is real and equals d^l_mn(theta).
double rodrigues_d(const WignerIndex& idx, double theta);

}  // namespace sphfield
