#include <doctest.h>

#include <numbers>
#include <random>

#include "sphfield/rotations.hpp"

using namespace sphfield;

namespace {

constexpr double pi = std::numbers::pi;

EulerAnglesd random_g(std::mt19937_64& rng, Convention c = Convention::ZXZ) {
  std::uniform_real_distribution<double> a(0, 2 * pi), z(-1, 1);
  return {a(rng), std::acos(z(rng)), a(rng), c};
}

double matrix_distance(const RotationMatrix<double>& a, const RotationMatrix<double>& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("Euler angles validate and normalize") {
  CHECK_THROWS_AS(EulerAnglesd(0, -0.1, 0), Error);
  CHECK_THROWS_AS(EulerAnglesd(0, 4.0, 0), Error);
  CHECK_THROWS_AS(EulerAnglesd(std::nan(""), 1.0, 0), Error);
  const EulerAnglesd g(-pi / 2, 1.0, 5 * pi);
  CHECK(g.phi1() == doctest::Approx(3 * pi / 2));
  CHECK(g.phi2() == doctest::Approx(pi));
  const EulerAnglesd lock(0.3, 0, 0.4);
  CHECK(lock.phi1() == doctest::Approx(0.7));
  CHECK(lock.phi2() == 0);
}

TEST_CASE("rotation matrices are proper orthogonal") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    for (auto conv : {Convention::ZXZ, Convention::ZYZ}) {
      const auto r = rotation_matrix(random_g(rng, conv));
      CHECK(matrix_distance(r.transpose() * r, RotationMatrix<double>::Identity()) <= 1e-12);
      CHECK(std::abs(r.determinant() - 1) <= 1e-12);
    }
  }
}

TEST_CASE("compose examples") {
  const auto e = EulerAnglesd::identity();
  const EulerAnglesd g(0.4, 1.1, 2.0);
  CHECK(rotation_distance(compose(e, g), g) <= 1e-12);
  CHECK(rotation_distance(compose(g, inverse(g)), e) <= 1e-12);
  const auto z2 = compose(EulerAnglesd(pi / 4, 0, 0), EulerAnglesd(pi / 4, 0, 0));
  CHECK(z2.phi1() == doctest::Approx(pi / 2));
  CHECK(z2.theta() == 0);
  CHECK(z2.phi2() == 0);
  CHECK_THROWS_AS(compose(g, EulerAnglesd(0, 0, 0, Convention::ZYZ)), Error);
}

TEST_CASE("inverse examples") {
  const auto e = inverse(EulerAnglesd::identity());
  CHECK(rotation_distance(e, EulerAnglesd::identity()) <= 1e-12);
  const auto gi = inverse(EulerAnglesd(pi / 2, pi / 3, pi / 4));
  CHECK(gi.phi1() == doctest::Approx(3 * pi / 4));
  CHECK(gi.theta() == doctest::Approx(pi / 3));
  CHECK(gi.phi2() == doctest::Approx(pi / 2));
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    for (auto conv : {Convention::ZXZ, Convention::ZYZ}) {
      const auto g = random_g(rng, conv);
      CHECK(matrix_distance(rotation_matrix(inverse(g)),
                            rotation_matrix(g).transpose()) <= 1e-12);
      CHECK(inverse(g).convention() == conv);
    }
  }
}

TEST_CASE("associativity over random triples") {
  std::mt19937_64 rng(7);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const auto a = random_g(rng), b = random_g(rng), c = random_g(rng);
    worst = std::max(worst, rotation_distance(compose(compose(a, b), c),
                                              compose(a, compose(b, c))));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("angle to matrix round trip, including gimbal lock") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    for (auto conv : {Convention::ZXZ, Convention::ZYZ}) {
      const auto g = random_g(rng, conv);
      const auto back = euler_from_matrix<double>(rotation_matrix(g), conv);
      CHECK(rotation_distance(g, back) <= 1e-12);
    }
  }
  for (double theta : {0.0, pi, 1e-9, pi - 1e-9}) {
    const EulerAnglesd g(1.3, theta, 0.4);
    const auto back = euler_from_matrix<double>(rotation_matrix(g));
    CHECK(rotation_distance(g, back) <= 1e-12);
  }
  const auto lock = euler_from_matrix<double>(rotation_matrix(EulerAnglesd(1.0, pi, 0.25)));
  CHECK(lock.phi2() == 0);
  CHECK(lock.theta() == doctest::Approx(pi));
}

TEST_CASE("convert_convention") {
  const double a = 0.3, b = 1.2, c = 2.2;
  const EulerAnglesd zyz(a, b, c, Convention::ZYZ);
  const EulerAnglesd zxz(a + pi / 2, b, c - pi / 2, Convention::ZXZ);
  CHECK(matrix_distance(rotation_matrix(zyz), rotation_matrix(zxz)) <= 1e-12);
  const auto conv = convert_convention(zxz, Convention::ZYZ);
  CHECK(conv.phi1() == doctest::Approx(a));
  CHECK(conv.phi2() == doctest::Approx(c));
  std::mt19937_64 rng(13);
  for (int i = 0; i < 50; ++i) {
    const auto g = random_g(rng);
    const auto rt = convert_convention(convert_convention(g, Convention::ZYZ), Convention::ZXZ);
    CHECK(rotation_distance(g, rt) <= 1e-12);
    CHECK(matrix_distance(rotation_matrix(g),
                          rotation_matrix(convert_convention(g, Convention::ZYZ))) <= 1e-12);
  }
  const auto id = convert_convention(EulerAnglesd::identity(), Convention::ZYZ);
  CHECK(matrix_distance(rotation_matrix(id), RotationMatrix<double>::Identity()) <= 1e-12);
}

TEST_CASE("point_to_rotation maps the pole to t") {
  const Vector3<double> pole(0, 0, 1);
  const auto fix = point_to_rotation(SpherePointd(0, 0));
  CHECK((rotation_matrix(fix) * pole - pole).norm() <= 1e-12);
  const SpherePointd t(0.9, 2.5);
  const auto g = point_to_rotation(t);
  CHECK(g.phi1() == doctest::Approx(2.5 + pi / 2));
  CHECK(g.theta() == doctest::Approx(0.9));
  CHECK(g.phi2() == 0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i) {
    const SpherePointd p(pi * u(rng), 2 * pi * u(rng));
    const Vector3<double> expect(std::sin(p.theta) * std::cos(p.phi),
                                 std::sin(p.theta) * std::sin(p.phi), std::cos(p.theta));
    CHECK((rotation_matrix(point_to_rotation(p, 2 * pi * u(rng))) * pole - expect).norm() <= 1e-12);
  }
  CHECK_THROWS_AS(SpherePointd(-0.1, 0), Error);
}
