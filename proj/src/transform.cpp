#include "sphfield/harmonics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "sphfield/errors.hpp"
#include "sphfield/wigner.hpp"

namespace sphfield {

namespace {

constexpr double kFourPi = 4 * std::numbers::pi;

double harmonic_norm(int l) { return std::sqrt((2 * l + 1) / kFourPi); }

void require_harmonic_index(int l, int m) {
  if (l < 0 || std::abs(m) > l) {
    throw Error(ErrorKind::index, "invalid harmonic index (l=" +
                                      std::to_string(l) +
                                      ", m=" + std::to_string(m) + ")");
  }
}

// lambda^s_lm(theta_j) = sqrt((2l+1)/4pi) d^l_{m,-s}(theta_j) for one grid.
struct LambdaTable {
  int l_max = 0;
  std::vector<Eigen::MatrixXd> per_m;  // index m + l_max; (n_theta, l_max + 1)

  const Eigen::MatrixXd& operator[](int m) const { return per_m[m + l_max]; }
};

std::shared_ptr<const LambdaTable> build_lambda(const SphereGrid& grid, int spin,
                                                int l_max) {
  auto table = std::make_shared<LambdaTable>();
  table->l_max = l_max;
  table->per_m.resize(2 * l_max + 1);
  std::vector<double> column(l_max + 1);
  for (int m = -l_max; m <= l_max; ++m) {
    Eigen::MatrixXd& block = table->per_m[m + l_max];
    block = Eigen::MatrixXd::Zero(grid.n_theta, l_max + 1);
    for (int j = 0; j < grid.n_theta; ++j) {
      wigner_d_column<double>(m, -spin, grid.theta_nodes[j], column);
      for (int l = std::max(std::abs(m), std::abs(spin)); l <= l_max; ++l) {
        block(j, l) = harmonic_norm(l) * column[l];
      }
    }
  }
  return table;
}

// Built once per (n_theta, spin, l_max) and then shared read-only. Two
// threads racing on the same key build identical tables; the first insert
// wins.
std::shared_ptr<const LambdaTable> lambda_table(const SphereGrid& grid,
                                                int spin, int l_max) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int>,
                  std::shared_ptr<const LambdaTable>> cache;
  const auto key = std::make_tuple(grid.n_theta, spin, l_max);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto built = build_lambda(grid, spin, l_max);
  std::lock_guard lock(mutex);
  return cache.emplace(key, std::move(built)).first->second;
}

std::vector<cdouble> unit_roots(int n) {
  std::vector<cdouble> roots(n);
  for (int r = 0; r < n; ++r) {
    roots[r] = std::polar(1.0, 2 * std::numbers::pi * r / n);
  }
  return roots;
}

int mod(long long a, int n) { return static_cast<int>(((a % n) + n) % n); }

}  // namespace

double legendre_P(int l, double x) {
  require(l >= 0, ErrorKind::index, "negative Legendre degree");
  require(std::abs(x) <= 1, ErrorKind::domain, "Legendre argument outside [-1, 1]");
  if (l == 0) return 1;
  double prev = 1, cur = x;
  for (int k = 2; k <= l; ++k) {
    const double next = ((2 * k - 1) * x * cur - (k - 1) * prev) / k;
    prev = cur;
    cur = next;
  }
  return cur;
}

cdouble sph_harm(int l, int m, const SpherePointd& t) {
  return spin_harm(0, l, m, t);
}

cdouble spin_harm(int s, int l, int m, const SpherePointd& t) {
  require_harmonic_index(l, m);
  if (l < std::abs(s)) return 0;
  const double d = wigner_d<double>({l, m, -s}, t.theta);
  return harmonic_norm(l) * d * std::polar(1.0, m * t.phi);
}

TriangularCoefficients::TriangularCoefficients(int l_max, int spin)
    : l_max_(l_max), spin_(spin) {
  require(l_max >= 0, ErrorKind::config, "band limit must be nonnegative");
  values_ = Eigen::VectorXcd::Zero(size_for(l_max));
}

int TriangularCoefficients::min_degree() const { return std::abs(spin_); }

void TriangularCoefficients::check_index(int l, int m) const {
  if (l < 0 || l > l_max_ || std::abs(m) > l) {
    throw Error(ErrorKind::index, "coefficient index (l=" + std::to_string(l) +
                                      ", m=" + std::to_string(m) +
                                      ") outside band limit " +
                                      std::to_string(l_max_));
  }
}

cdouble TriangularCoefficients::operator()(int l, int m) const {
  check_index(l, m);
  return values_[index(l, m)];
}

void TriangularCoefficients::set(int l, int m, cdouble value) {
  check_index(l, m);
  if (l < min_degree() && value != cdouble(0)) {
    throw Error(ErrorKind::consistency,
                "nonzero coefficient at l=" + std::to_string(l) +
                    " below |spin|=" + std::to_string(min_degree()));
  }
  values_[index(l, m)] = value;
}

void TriangularCoefficients::validate() const {
  require(values_.size() == size_for(l_max_), ErrorKind::consistency,
          "coefficient vector has the wrong length");
  const int stop = std::min(min_degree(), l_max_ + 1);
  for (int i = 0; i < stop * stop; ++i) {
    if (values_[i] != cdouble(0)) {
      throw Error(ErrorKind::consistency,
                  "nonzero coefficient below |spin| (structural zero)");
    }
  }
  for (int i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag())) {
      throw Error(ErrorKind::domain, "non-finite coefficient");
    }
  }
}

int Parallelism::resolved() const {
  if (workers > 0) return workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int n, Parallelism par, const std::function<void(int)>& body) {
  const int workers = std::min(par.resolved(), std::max(n, 1));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SpinMap synthesize(const TriangularCoefficients& coeffs, const SphereGrid& grid,
                   Parallelism par) {
  coeffs.validate();
  const int L = coeffs.l_max();
  const auto table = lambda_table(grid, coeffs.spin(), L);
  const auto roots = unit_roots(grid.n_phi);
  SpinMap map(grid, coeffs.spin());
  const auto& a = coeffs.values();

  parallel_for(grid.n_theta, par, [&](int j) {
    std::vector<cdouble> g(2 * L + 1);
    for (int m = -L; m <= L; ++m) {
      const Eigen::MatrixXd& lam = (*table)[m];
      cdouble sum = 0;
      for (int l = std::abs(m); l <= L; ++l) {
        sum += a[TriangularCoefficients::index(l, m)] * lam(j, l);
      }
      g[m + L] = sum;
    }
    for (int k = 0; k < grid.n_phi; ++k) {
      cdouble sum = 0;
      for (int m = -L; m <= L; ++m) {
        sum += g[m + L] * roots[mod(static_cast<long long>(m) * k, grid.n_phi)];
      }
      map.values(j, k) = sum;
    }
  });
  return map;
}

TriangularCoefficients analyze(const SpinMap& map, int l_max, Parallelism par) {
  const SphereGrid& grid = map.grid;
  require(l_max >= 0, ErrorKind::config, "band limit must be nonnegative");
  if (grid.n_theta < l_max + 1 || grid.n_phi < 2 * l_max + 1) {
    throw Error(ErrorKind::resolution,
                "grid " + std::to_string(grid.n_theta) + "x" +
                    std::to_string(grid.n_phi) + " cannot resolve l_max " +
                    std::to_string(l_max) + " (needs n_theta >= " +
                    std::to_string(l_max + 1) + ", n_phi >= " +
                    std::to_string(2 * l_max + 1) + ")");
  }
  require(map.values.rows() == grid.n_theta && map.values.cols() == grid.n_phi,
          ErrorKind::consistency, "map values do not match the grid");

  const int L = l_max;
  const auto table = lambda_table(grid, map.spin, L);
  const auto roots = unit_roots(grid.n_phi);
  const double dphi = 2 * std::numbers::pi / grid.n_phi;

  // Longitude sums per row: F(j, m) = dphi * sum_k f_jk e^{-i m phi_k}.
  Eigen::MatrixXcd fourier(grid.n_theta, 2 * L + 1);
  parallel_for(grid.n_theta, par, [&](int j) {
    for (int m = -L; m <= L; ++m) {
      cdouble sum = 0;
      for (int k = 0; k < grid.n_phi; ++k) {
        sum += map.values(j, k) *
               std::conj(roots[mod(static_cast<long long>(m) * k, grid.n_phi)]);
      }
      fourier(j, m + L) = dphi * sum;
    }
  });

  // Colatitude sums, each accumulated in fixed row order.
  TriangularCoefficients out(L, map.spin);
  auto& a = out.values();
  parallel_for(2 * L + 1, par, [&](int mi) {
    const int m = mi - L;
    const Eigen::MatrixXd& lam = (*table)[m];
    for (int l = std::max(std::abs(m), std::abs(map.spin)); l <= L; ++l) {
      cdouble sum = 0;
      for (int j = 0; j < grid.n_theta; ++j) {
        sum += grid.gl_weights[j] * lam(j, l) * fourier(j, mi);
      }
      a[TriangularCoefficients::index(l, m)] = sum;
    }
  });
  return out;
}

double map_power(const SpinMap& map) {
  const double dphi = 2 * std::numbers::pi / map.grid.n_phi;
  double total = 0;
  for (int j = 0; j < map.grid.n_theta; ++j) {
    total += map.grid.gl_weights[j] * dphi * map.values.row(j).squaredNorm();
  }
  return total;
}

}  // namespace sphfield
