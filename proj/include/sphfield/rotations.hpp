#pragma once

// Euler-angle parameterizations of SO(3).
//
// ZXZ:  R = Rz(phi1) Rx(theta) Rz(phi2)
// ZYZ:  R = Rz(phi1) Ry(theta) Rz(phi2)
//
// Both are products of active right-handed rotations about the fixed axes,
// which is the same rotation as successive rotations about the moving axes.
// R_zyz(a, b, c) == R_zxz(a + pi/2, b, c - pi/2).

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sphfield/errors.hpp"

namespace sphfield {

enum class Convention { ZXZ, ZYZ };

inline const char* to_string(Convention c) {
  return c == Convention::ZXZ ? "ZXZ" : "ZYZ";
}

template <typename Scalar>
using RotationMatrix = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Maps an angle into [0, 2pi).
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  const Scalar two_pi = 2 * std::numbers::pi_v<Scalar>;
  Scalar r = std::fmod(a, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r = 0;
  return r;
}

/// Group element of SO(3) as three Euler angles with a convention tag.
///
/// Construction normalizes phi1/phi2 into [0, 2pi) and folds the gimbal-lock
/// cases theta in {0, pi} into phi1 with phi2 = 0.
template <typename Scalar>
class EulerAngles {
 public:
  EulerAngles() = default;

  EulerAngles(Scalar phi1, Scalar theta, Scalar phi2,
              Convention convention = Convention::ZXZ)
      : convention_(convention) {
    const Scalar pi = std::numbers::pi_v<Scalar>;
    if (!(theta >= 0 && theta <= pi)) {
      throw Error(ErrorKind::domain,
                  "Euler angle theta must lie in [0, pi], got " +
                      std::to_string(static_cast<double>(theta)));
    }
    if (!std::isfinite(phi1) || !std::isfinite(phi2)) {
      throw Error(ErrorKind::domain, "Euler angles must be finite");
    }
    theta_ = theta;
    if (theta == 0) {
      phi1_ = wrap_angle(phi1 + phi2);
      phi2_ = 0;
    } else if (theta == pi) {
      phi1_ = wrap_angle(phi1 - phi2);
      phi2_ = 0;
    } else {
      phi1_ = wrap_angle(phi1);
      phi2_ = wrap_angle(phi2);
    }
  }

  static EulerAngles identity(Convention convention = Convention::ZXZ) {
    return EulerAngles(0, 0, 0, convention);
  }

  Scalar phi1() const { return phi1_; }
  Scalar theta() const { return theta_; }
  Scalar phi2() const { return phi2_; }
  Convention convention() const { return convention_; }

 private:
  Scalar phi1_ = 0;
  Scalar theta_ = 0;
  Scalar phi2_ = 0;
  Convention convention_ = Convention::ZXZ;
};

using EulerAnglesd = EulerAngles<double>;

/// Point on the unit sphere: colatitude theta in [0, pi], longitude phi in
/// [0, 2pi).
template <typename Scalar>
struct SpherePoint {
  Scalar theta = 0;
  Scalar phi = 0;

  SpherePoint() = default;
  SpherePoint(Scalar theta_in, Scalar phi_in) : theta(theta_in) {
    if (!(theta_in >= 0 && theta_in <= std::numbers::pi_v<Scalar>)) {
      throw Error(ErrorKind::domain, "colatitude must lie in [0, pi]");
    }
    phi = wrap_angle(phi_in);
  }

  Vector3<Scalar> unit_vector() const {
    return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
            std::cos(theta)};
  }
};

using SpherePointd = SpherePoint<double>;

template <typename Scalar>
RotationMatrix<Scalar> rotation_z(Scalar a) {
  RotationMatrix<Scalar> r;
  const Scalar c = std::cos(a), s = std::sin(a);
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

template <typename Scalar>
RotationMatrix<Scalar> rotation_x(Scalar a) {
  RotationMatrix<Scalar> r;
  const Scalar c = std::cos(a), s = std::sin(a);
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

template <typename Scalar>
RotationMatrix<Scalar> rotation_y(Scalar a) {
  RotationMatrix<Scalar> r;
  const Scalar c = std::cos(a), s = std::sin(a);
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

template <typename Scalar>
RotationMatrix<Scalar> rotation_matrix(const EulerAngles<Scalar>& g) {
  const auto middle = g.convention() == Convention::ZXZ
                          ? rotation_x(g.theta())
                          : rotation_y(g.theta());
  return rotation_z(g.phi1()) * middle * rotation_z(g.phi2());
}

/// Converts between conventions without changing the rotation.
template <typename Scalar>
EulerAngles<Scalar> convert_convention(const EulerAngles<Scalar>& g,
                                       Convention target) {
  if (g.convention() == target) return g;
  const Scalar half_pi = std::numbers::pi_v<Scalar> / 2;
  if (target == Convention::ZYZ) {
    return EulerAngles<Scalar>(g.phi1() - half_pi, g.theta(),
                               g.phi2() + half_pi, Convention::ZYZ);
  }
  return EulerAngles<Scalar>(g.phi1() + half_pi, g.theta(),
                             g.phi2() - half_pi, Convention::ZXZ);
}

/// Extracts Euler angles from an orthogonal matrix with det +1.
///
/// phi1 is recovered through the sum (theta <= pi/2) or difference
/// (theta > pi/2) of the outer angles, which stays well conditioned as theta
/// approaches the gimbal points.
template <typename Scalar>
EulerAngles<Scalar> euler_from_matrix(const RotationMatrix<Scalar>& r,
                                      Convention convention = Convention::ZXZ) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar sin_theta = std::hypot(r(2, 0), r(2, 1));
  const Scalar gimbal = 16 * std::numeric_limits<Scalar>::epsilon();

  Scalar phi1, theta, phi2;
  if (sin_theta <= gimbal) {
    theta = r(2, 2) > 0 ? Scalar(0) : pi;
    phi1 = std::atan2(r(1, 0), r(0, 0));
    phi2 = 0;
  } else {
    theta = std::atan2(sin_theta, r(2, 2));
    phi2 = std::atan2(r(2, 0), r(2, 1));
    if (r(2, 2) >= 0) {
      const Scalar sum = std::atan2(r(1, 0) - r(0, 1), r(0, 0) + r(1, 1));
      phi1 = sum - phi2;
    } else {
      const Scalar diff = std::atan2(r(1, 0) + r(0, 1), r(0, 0) - r(1, 1));
      phi1 = diff + phi2;
    }
  }
  EulerAngles<Scalar> zxz(phi1, theta, phi2, Convention::ZXZ);
  return convert_convention(zxz, convention);
}

inline void require_same_convention(Convention a, Convention b) {
  if (a != b) {
    throw Error(ErrorKind::convention,
                std::string("mixed Euler conventions: ") + to_string(a) +
                    " vs " + to_string(b));
  }
}

/// Product g1 * g2, computed through rotation matrices.
template <typename Scalar>
EulerAngles<Scalar> compose(const EulerAngles<Scalar>& g1,
                            const EulerAngles<Scalar>& g2) {
  require_same_convention(g1.convention(), g2.convention());
  return euler_from_matrix<Scalar>(rotation_matrix(g1) * rotation_matrix(g2),
                                   g1.convention());
}

/// g^-1 = (pi - phi2, theta, pi - phi1), valid in both conventions.
template <typename Scalar>
EulerAngles<Scalar> inverse(const EulerAngles<Scalar>& g) {
  const Scalar pi = std::numbers::pi_v<Scalar>;
  return EulerAngles<Scalar>(pi - g.phi2(), g.theta(), pi - g.phi1(),
                             g.convention());
}

/// Rotation g_t = g(phi + pi/2, theta, phi2) (ZXZ) taking the pole e0 to t.
template <typename Scalar>
EulerAngles<Scalar> point_to_rotation(const SpherePoint<Scalar>& t,
                                      Scalar phi2 = 0) {
  return EulerAngles<Scalar>(t.phi + std::numbers::pi_v<Scalar> / 2, t.theta,
                             phi2, Convention::ZXZ);
}

/// Max-entry distance between the matrices of two rotations.
template <typename Scalar>
Scalar rotation_distance(const EulerAngles<Scalar>& a,
                         const EulerAngles<Scalar>& b) {
  return (rotation_matrix(a) - rotation_matrix(b)).cwiseAbs().maxCoeff();
}

}  // namespace sphfield
