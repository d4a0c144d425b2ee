#include "sphfield/rodrigues.hpp"

#include <cmath>
#include <map>
#include <string>
#include <utility>

namespace sphfield {

namespace {

using Exponents = std::pair<int, int>;  // (power of u, power of v)
using Polynomial = std::map<Exponents, __int128>;

Polynomial differentiate(const Polynomial& poly) {
  // d/dz u^p v^q = -p u^{p-1} v^q + q u^p v^{q-1}
  Polynomial out;
  for (const auto& [e, c] : poly) {
    const auto [p, q] = e;
    if (p > 0) out[{p - 1, q}] -= c * p;
    if (q > 0) out[{p, q - 1}] += c * q;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

long double log_factorial(int k) { return std::lgamma(static_cast<long double>(k) + 1); }

}  // namespace

RodriguesOracle::RodriguesOracle(const WignerIndex& idx) : idx_(idx) {
  require_valid(idx);
  if (idx.l > kRodriguesMaxDegree) {
    throw Error(ErrorKind::domain, "Rodrigues oracle limited to l <= " +
                                       std::to_string(kRodriguesMaxDegree));
  }
  const int l = idx.l, m = idx.m, n = idx.n;
  Polynomial poly{{{l - m, l + m}, 1}};
  for (int k = 0; k < l - n; ++k) poly = differentiate(poly);

  // Multiply by u^{-(n-m)/2} v^{-(n+m)/2}; track doubled exponents.
  for (const auto& [e, c] : poly) {
    const int pu2 = 2 * e.first - (n - m);
    const int pv2 = 2 * e.second - (n + m);
    if (pu2 < 0 || pv2 < 0) {
      throw Error(ErrorKind::consistency,
                  "Rodrigues polynomial did not cancel the pole prefactor");
    }
    terms_[{pu2, pv2}] += c;
  }
  norm_ = parity_sign(l - m) *
          std::exp((log_factorial(l + n) - log_factorial(l - m) -
                    log_factorial(l + m) - log_factorial(l - n)) / 2) /
          std::ldexp(1.0L, l);
}

std::complex<double> RodriguesOracle::P(double z) const {
  if (!(std::abs(z) <= 1)) {
    throw Error(ErrorKind::domain, "Rodrigues oracle requires |z| <= 1");
  }
  return evaluate(1.0L - z, 1.0L + z);
}

std::complex<double> RodriguesOracle::evaluate(long double u, long double v) const {
  long double sum = 0;
  for (const auto& [e, c] : terms_) {
    long double term = static_cast<long double>(c);
    if (e.first > 0) term *= std::pow(u, e.first / 2.0L);
    if (e.second > 0) term *= std::pow(v, e.second / 2.0L);
    sum += term;
  }
  const double real = static_cast<double>(norm_ * sum);
  return times_i_pow(std::complex<double>(real, 0), idx_.m - idx_.n);
}

double RodriguesOracle::d(double theta) const {
  // u = 1 - cos(theta) and v = 1 + cos(theta) without cancellation.
  const long double half = static_cast<long double>(theta) / 2;
  const long double s = std::sin(half), c = std::cos(half);
  return times_i_pow(evaluate(2 * s * s, 2 * c * c), idx_.m - idx_.n).real();
}

std::complex<double> rodrigues_P(const WignerIndex& idx, double z) {
  return RodriguesOracle(idx).P(z);
}

double rodrigues_d(const WignerIndex& idx, double theta) {
  return RodriguesOracle(idx).d(theta);
}

}  // namespace sphfield
