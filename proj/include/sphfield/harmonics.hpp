#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

#include "sphfield/grid.hpp"
#include "sphfield/rotations.hpp"

namespace sphfield {

using cdouble = std::complex<double>;

double legendre_P(int l, double x);

/// Y_l^m(theta, phi) = sqrt((2l+1)/4pi) d^l_{m0}(theta) e^{i m phi}.
cdouble sph_harm(int l, int m, const SpherePointd& t);

/// sY_m^l = sqrt((2l+1)/4pi) d^l_{m,-s}(theta) e^{i m phi}; zero for l < |s|.
cdouble spin_harm(int s, int l, int m, const SpherePointd& t);

/// a_lm for 0 <= l <= l_max, -l <= m <= l, stored at l^2 + l + m.
/// Entries with l < |spin| are structural zeros.
class TriangularCoefficients {
 public:
  TriangularCoefficients() = default;
  TriangularCoefficients(int l_max, int spin);

  static int index(int l, int m) { return l * l + l + m; }
  static int size_for(int l_max) { return (l_max + 1) * (l_max + 1); }

  int l_max() const { return l_max_; }
  int spin() const { return spin_; }
  int min_degree() const;

  cdouble operator()(int l, int m) const;
  void set(int l, int m, cdouble value);

  Eigen::VectorXcd& values() { return values_; }
  const Eigen::VectorXcd& values() const { return values_; }

  /// Throws a consistency error if a structural zero is nonzero.
  void validate() const;

 private:
  void check_index(int l, int m) const;

  int l_max_ = 0;
  int spin_ = 0;
  Eigen::VectorXcd values_;
};

using MapMatrix =
    Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Complex samples on a grid, rows theta_j, columns phi_k.
struct SpinMap {
  SphereGrid grid;
  int spin = 0;
  MapMatrix values;

  SpinMap() = default;
  SpinMap(SphereGrid g, int s)
      : grid(std::move(g)), spin(s),
        values(MapMatrix::Zero(grid.n_theta, grid.n_phi)) {}
};

/// Worker count for the transforms; 0 selects the hardware concurrency.
struct Parallelism {
  int workers = 0;

  int resolved() const;
};

/// Runs body(i) for i in [0, n) on up to `workers` threads. Each index is
/// visited exactly once; callers must not depend on the visiting order.
void parallel_for(int n, Parallelism par, const std::function<void(int)>& body);

SpinMap synthesize(const TriangularCoefficients& coeffs, const SphereGrid& grid,
                   Parallelism par = {});

TriangularCoefficients analyze(const SpinMap& map, int l_max,
                               Parallelism par = {});

/// Quadrature of |map|^2 over the sphere.
double map_power(const SpinMap& map);

}  // namespace sphfield
