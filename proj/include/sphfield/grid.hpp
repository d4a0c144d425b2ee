#pragma once

#include <Eigen/Dense>

#include "sphfield/rotations.hpp"

namespace sphfield {

/// Gauss-Legendre colatitudes x equispaced longitudes.
struct SphereGrid {
  int n_theta = 0;
  int n_phi = 0;
  Eigen::VectorXd theta_nodes;  // ascending, cos(theta_j) = GL node
  Eigen::VectorXd gl_weights;   // weights on [-1, 1], sum 2
  Eigen::VectorXd phi_nodes;    // 2 pi k / n_phi

  /// Largest band limit integrated exactly by this grid.
  int max_band_limit() const;
  SpherePointd point(int j, int k) const { return {theta_nodes[j], phi_nodes[k]}; }

  friend bool operator==(const SphereGrid& a, const SphereGrid& b) {
    return a.n_theta == b.n_theta && a.n_phi == b.n_phi;
  }
};

/// n-point Gauss-Legendre rule on [-1, 1], nodes in descending order.
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

/// Minimal exact grid for band limit l_max: (l_max + 1) x (2 l_max + 2).
SphereGrid build_grid(int l_max);

SphereGrid make_grid(int n_theta, int n_phi);

}  // namespace sphfield
