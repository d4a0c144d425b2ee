#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "sphfield/harmonics.hpp"
#include "sphfield/rotations.hpp"

namespace sphfield {

/// c_l = E|a_lm|^2 per degree, zero below |spin|.
struct PowerSpectrum {
  int spin = 0;
  Eigen::VectorXd c_l;  // index l = 0..l_max

  PowerSpectrum() = default;
  PowerSpectrum(int spin_in, Eigen::VectorXd values);

  int l_max() const { return static_cast<int>(c_l.size()) - 1; }
  void validate() const;

  /// c_l = value for |spin| <= l <= l_max, zero below.
  static PowerSpectrum flat(int l_max, int spin, double value = 1.0);
};

enum class Symmetry { conjugate_symmetric, unconstrained_complex };
enum class Generator { gaussian, fixed_modulus };

struct FieldModel {
  PowerSpectrum spectrum;
  std::uint64_t seed = 0;
  Symmetry symmetry = Symmetry::conjugate_symmetric;
  Generator generator = Generator::gaussian;
  std::uint32_t stream = 0;
};

/// Unit-variance Z_lm for one realization. In conjugate-symmetric mode
/// conj(Z_lm) = (-1)^{l-m} Z_{l,-m} holds exactly.
TriangularCoefficients sample_unit_coefficients(const FieldModel& model,
                                                std::uint32_t realization = 0);

/// Random spectrum factor F_l = i^l sqrt(c_l).
cdouble spectrum_factor(const PowerSpectrum& spectrum, int l);

/// a_lm = F_l Z_lm.
TriangularCoefficients apply_spectrum(const PowerSpectrum& spectrum,
                                      const TriangularCoefficients& unit);

TriangularCoefficients sample_coefficients(const FieldModel& model,
                                           std::uint32_t realization = 0);

SpinMap synthesize_field(const FieldModel& model, const SphereGrid& grid,
                         std::uint32_t realization = 0, Parallelism par = {});

/// Coefficients b of spin -s whose map is the pointwise conjugate of the
/// spin-s map of a: b_lm = (-1)^{m+s} conj(a_{l,-m}).
TriangularCoefficients conjugate_partner(const TriangularCoefficients& a);

enum class PairCoupling { independent, conjugate };

/// Coefficients for a spin +|s| / -|s| pair. Independent pairs draw the
/// second member from stream + 1; conjugate pairs use conjugate_partner.
std::pair<TriangularCoefficients, TriangularCoefficients> sample_spin_pair(
    const FieldModel& model, PairCoupling coupling,
    std::uint32_t realization = 0);

/// SO(3)-domain field X(g) whose phi2 = 0 slice at g_t is the spin-s map.
/// X(phi1, theta, phi2) = e^{-i s phi2} X(phi1, theta, 0).
cdouble lift_to_so3(const TriangularCoefficients& coeffs, const EulerAnglesd& g);

struct VectorComponents {
  Eigen::MatrixXd theta;
  Eigen::MatrixXd phi;
};

/// X_+ = -X_phi + i X_theta, X_- = conj(X_+) at phi2 = 0.
VectorComponents vector_components(const SpinMap& xplus, const SpinMap& xminus,
                                   double tolerance = 1e-10);
std::pair<SpinMap, SpinMap> spin1_from_vector(const SphereGrid& grid,
                                              const VectorComponents& v);

struct StokesMaps {
  Eigen::MatrixXd q;
  Eigen::MatrixXd u;
};

/// Trace-free symmetric tensor in the (e_theta, e_phi) frame.
struct TensorComponents {
  Eigen::MatrixXd theta_theta;
  Eigen::MatrixXd theta_phi;
  Eigen::MatrixXd phi_phi;
};

/// P = Q + iU (spin 2) and P* = Q - iU (spin -2).
StokesMaps stokes_from_spin2(const SpinMap& a_map, const SpinMap& b_map,
                             double tolerance = 1e-10);
std::pair<SpinMap, SpinMap> spin2_from_stokes(const SphereGrid& grid,
                                              const StokesMaps& s);

/// X = (1/2) [[Q, U], [U, -Q]].
TensorComponents tensor_from_stokes(const StokesMaps& s);

/// Inverts A = 2 (X_phiphi + i X_thetaphi) at phi2 = 0.
TensorComponents tensor_from_a_component(const SpinMap& a_component);

/// R(g12) = sum_l c_l (2l+1)/(4pi) T^l_{-s,-s}(g12), g12 = g1^-1 g2 (ZXZ).
/// Equals E[X(g1) conj(X(g2))] for the lifted field.
cdouble covariance_series(const PowerSpectrum& spectrum, const EulerAnglesd& g12);

/// Covariance between the map values at two points (phi2 = 0 frames).
cdouble covariance_at_points(const PowerSpectrum& spectrum,
                             const SpherePointd& t1, const SpherePointd& t2);

}  // namespace sphfield
