#include "sphfield/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sphfield/errors.hpp"

namespace sphfield {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre_with_derivative(int n, double x, double& p, double& dp) {
  double prev = 1, cur = x;
  if (n == 0) cur = 1;
  for (int k = 2; k <= n; ++k) {
    const double next = ((2 * k - 1) * x * cur - (k - 1) * prev) / k;
    prev = cur;
    cur = next;
  }
  p = cur;
  dp = n == 0 ? 0 : n * (prev - x * cur) / (1 - x * x);
}

}  // namespace

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  require(n >= 1, ErrorKind::config, "Gauss-Legendre rule needs n >= 1");
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double p = 0, dp = 1;
    for (int iter = 0; iter < 100; ++iter) {
      legendre_with_derivative(n, x, p, dp);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    if (2 * i + 1 == n) x = 0;
    legendre_with_derivative(n, x, p, dp);
    nodes[i] = x;
    nodes[n - 1 - i] = -x;
    weights[i] = weights[n - 1 - i] = 2 / ((1 - x * x) * dp * dp);
  }
}

int SphereGrid::max_band_limit() const {
  return std::min(n_theta - 1, (n_phi - 1) / 2);
}

SphereGrid make_grid(int n_theta, int n_phi) {
  require(n_theta >= 1 && n_phi >= 1, ErrorKind::config,
          "grid dimensions must be positive");
  SphereGrid g;
  g.n_theta = n_theta;
  g.n_phi = n_phi;
  Eigen::VectorXd x;
  gauss_legendre(n_theta, x, g.gl_weights);
  g.theta_nodes = x.array().acos();
  g.phi_nodes.resize(n_phi);
  for (int k = 0; k < n_phi; ++k) {
    g.phi_nodes[k] = 2 * std::numbers::pi * k / n_phi;
  }
  return g;
}

SphereGrid build_grid(int l_max) {
  require(l_max >= 0, ErrorKind::config, "band limit must be nonnegative");
  return make_grid(l_max + 1, 2 * l_max + 2);
}

}  // namespace sphfield
