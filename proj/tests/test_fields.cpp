#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sphfield/estimate.hpp"
#include "sphfield/fields.hpp"
#include "sphfield/philox.hpp"
#include "sphfield/wigner.hpp"

using namespace sphfield;

namespace {

constexpr double pi = std::numbers::pi;

FieldModel flat_model(int l_max, int spin, std::uint64_t seed = 42) {
  FieldModel m;
  m.spectrum = PowerSpectrum::flat(l_max, spin);
  m.seed = seed;
  return m;
}

}  // namespace

TEST_CASE("Philox4x32-10 known answers") {
  using C = Philox4x32::Counter;
  CHECK(Philox4x32::apply({0, 0, 0, 0}, {0, 0}) ==
        C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                          {0xffffffffu, 0xffffffffu}) ==
        C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::apply({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                          {0xa4093822u, 0x299f31d0u}) ==
        C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
  const auto u = uniform_pair({1, 2, 3, 4}, {5, 6});
  CHECK(u.u1 > 0);
  CHECK(u.u1 <= 1);
  CHECK(u.u2 >= 0);
  CHECK(u.u2 < 1);
}

TEST_CASE("PowerSpectrum invariants") {
  CHECK_THROWS_AS(PowerSpectrum(0, Eigen::VectorXd::Constant(3, -1.0)), Error);
  Eigen::VectorXd c = Eigen::VectorXd::Ones(4);
  CHECK_THROWS_AS(PowerSpectrum(2, c), Error);
  const auto flat = PowerSpectrum::flat(5, 2);
  CHECK(flat.c_l[0] == 0);
  CHECK(flat.c_l[1] == 0);
  CHECK(flat.c_l[2] == 1);
}

TEST_CASE("sample_coefficients") {
  FieldModel zero;
  zero.spectrum = PowerSpectrum(0, Eigen::VectorXd::Zero(6));
  CHECK(sample_coefficients(zero).values().cwiseAbs().maxCoeff() == 0);

  for (auto gen : {Generator::gaussian, Generator::fixed_modulus}) {
    auto model = flat_model(12, 0);
    model.generator = gen;
    for (std::uint32_t r = 0; r < 5; ++r) {
      const auto z = sample_unit_coefficients(model, r);
      for (int l = 0; l <= 12; ++l) {
        for (int m = -l; m <= l; ++m) {
          CHECK(std::conj(z(l, m)) - double(parity_sign(l - m)) * z(l, -m) == cdouble(0));
        }
      }
    }
  }
  auto model = flat_model(6, 0);
  CHECK(sample_coefficients(model, 3).values() == sample_coefficients(model, 3).values());
  CHECK(sample_coefficients(model, 3).values() != sample_coefficients(model, 4).values());
  auto other = model;
  other.seed = 43;
  CHECK(sample_coefficients(model).values() != sample_coefficients(other).values());

  const auto fixed = [] {
    auto m = flat_model(6, 0);
    m.generator = Generator::fixed_modulus;
    return sample_unit_coefficients(m);
  }();
  for (int i = 0; i < fixed.values().size(); ++i) {
    CHECK(std::abs(fixed.values()[i]) == doctest::Approx(1.0));
  }
}

TEST_CASE("unit variance of Z over 2000 draws") {
  auto model = flat_model(8, 0, 7);
  const int N = 2000;
  Eigen::VectorXd second = Eigen::VectorXd::Zero(81);
  for (int r = 0; r < N; ++r) {
    second += sample_unit_coefficients(model, r).values().cwiseAbs2();
  }
  second /= N;
  CHECK((second.array() - 1).abs().maxCoeff() <= 3 * std::sqrt(2.0 / N));
}

TEST_CASE("synthesize_field") {
  FieldModel mono;
  mono.spectrum = PowerSpectrum(0, Eigen::VectorXd::Constant(1, 4 * pi));
  mono.seed = 9;
  const auto grid = build_grid(3);
  const auto map = synthesize_field(mono, grid);
  const cdouble z00 = sample_unit_coefficients(mono)(0, 0);
  CHECK((map.values.array() - z00).abs().maxCoeff() <= 1e-14);

  auto model = flat_model(8, 0);
  const auto real_map = synthesize_field(model, build_grid(8));
  CHECK(real_map.values.imag().cwiseAbs().maxCoeff() <= 1e-10);

  auto tensor = flat_model(8, 2);
  const auto a = sample_coefficients(tensor);
  for (int l = 0; l < 2; ++l) {
    for (int m = -l; m <= l; ++m) CHECK(a(l, m) == cdouble(0));
  }
}

TEST_CASE("ensemble mean of map values vanishes") {
  const int N = 2000;
  auto model = flat_model(4, 2, 5);
  const auto grid = build_grid(4);
  MapMatrix sum = MapMatrix::Zero(grid.n_theta, grid.n_phi);
  for (int r = 0; r < N; ++r) sum += synthesize_field(model, grid, r).values;
  sum /= N;
  const double sigma = std::sqrt(std::abs(covariance_series(model.spectrum, EulerAnglesd::identity())));
  CHECK(sum.cwiseAbs().maxCoeff() <= 3 * sigma / std::sqrt(double(N)));
}

TEST_CASE("conjugate partner is the conjugate map") {
  auto model = flat_model(10, 2);
  const auto [a, b] = sample_spin_pair(model, PairCoupling::conjugate);
  CHECK(a.spin() == 2);
  CHECK(b.spin() == -2);
  const auto grid = build_grid(10);
  const auto ma = synthesize(a, grid), mb = synthesize(b, grid);
  CHECK((mb.values - ma.values.conjugate()).cwiseAbs().maxCoeff() <= 1e-12);
  const auto [c, d] = sample_spin_pair(model, PairCoupling::independent);
  CHECK(c.values() == a.values());
  CHECK((d.values() - b.values()).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("lift_to_so3") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> ang(0, 2 * pi);
  for (int s = -2; s <= 2; ++s) {
    TriangularCoefficients a(6, s);
    for (int l = std::abs(s); l <= 6; ++l) {
      for (int m = -l; m <= l; ++m) a.set(l, m, {normal(rng), normal(rng)});
    }
    const EulerAnglesd g(ang(rng), 1.0, ang(rng));
    const EulerAnglesd g0(g.phi1(), g.theta(), 0.0);
    CHECK(std::abs(lift_to_so3(a, g) - std::polar(1.0, -s * g.phi2()) * lift_to_so3(a, g0)) <= 1e-12);
  }
  // Single coefficient at the identity: only m = -s survives.
  for (int s : {-1, 1}) {
    for (int m = -3; m <= 3; ++m) {
      TriangularCoefficients a(3, s);
      a.set(3, m, 1.0);
      const cdouble expect = m == -s ? std::pow(cdouble(0, 1), s) * std::sqrt(7 / (4 * pi)) : 0.0;
      CHECK(std::abs(lift_to_so3(a, EulerAnglesd::identity()) - expect) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(lift_to_so3(TriangularCoefficients(2, 0), EulerAnglesd(0, 1, 0, Convention::ZYZ)), Error);
}

TEST_CASE("vector components") {
  const auto grid = build_grid(3);
  SpinMap plus(grid, 1), minus(grid, -1);
  auto zero = vector_components(plus, minus);
  CHECK(zero.theta.cwiseAbs().maxCoeff() == 0);
  CHECK(zero.phi.cwiseAbs().maxCoeff() == 0);

  plus.values(1, 2) = cdouble(0, 1);
  minus.values(1, 2) = cdouble(0, -1);
  const auto v = vector_components(plus, minus);
  CHECK(v.theta(1, 2) == 1);
  CHECK(v.phi(1, 2) == 0);

  minus.values(1, 2) = cdouble(0, 1);
  CHECK_THROWS_AS(vector_components(plus, minus), Error);

  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  VectorComponents c{Eigen::MatrixXd(grid.n_theta, grid.n_phi), Eigen::MatrixXd(grid.n_theta, grid.n_phi)};
  for (int i = 0; i < c.theta.size(); ++i) {
    c.theta.data()[i] = normal(rng);
    c.phi.data()[i] = normal(rng);
  }
  const auto [xp, xm] = spin1_from_vector(grid, c);
  const auto back = vector_components(xp, xm);
  CHECK((back.theta - c.theta).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((back.phi - c.phi).cwiseAbs().maxCoeff() <= 1e-12);

  // Conjugate-coupled spin +-1 samples give a real vector field.
  auto model = flat_model(5, 1);
  const auto [a, b] = sample_spin_pair(model, PairCoupling::conjugate);
  const auto g5 = build_grid(5);
  CHECK_NOTHROW(vector_components(synthesize(a, g5), synthesize(b, g5)));
}

TEST_CASE("Stokes parameters and tensor components") {
  const auto grid = build_grid(3);
  SpinMap p(grid, 2), pc(grid, -2);
  const auto zero = stokes_from_spin2(p, pc);
  CHECK(zero.q.cwiseAbs().maxCoeff() == 0);
  CHECK(zero.u.cwiseAbs().maxCoeff() == 0);

  SpinMap a_comp(grid, -2);
  a_comp.values(2, 1) = 2.0;
  const auto x = tensor_from_a_component(a_comp);
  CHECK(x.phi_phi(2, 1) == 1);
  CHECK(x.theta_phi(2, 1) == 0);
  CHECK(x.theta_theta(2, 1) == -1);

  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  StokesMaps s{Eigen::MatrixXd(grid.n_theta, grid.n_phi), Eigen::MatrixXd(grid.n_theta, grid.n_phi)};
  for (int i = 0; i < s.q.size(); ++i) {
    s.q.data()[i] = normal(rng);
    s.u.data()[i] = normal(rng);
  }
  const auto [pp, ppc] = spin2_from_stokes(grid, s);
  const auto back = stokes_from_spin2(pp, ppc);
  CHECK((back.q - s.q).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((back.u - s.u).cwiseAbs().maxCoeff() <= 1e-12);
  const auto t = tensor_from_stokes(s);
  CHECK((t.theta_theta + t.phi_phi).cwiseAbs().maxCoeff() == 0);

  auto bad = ppc;
  bad.values(0, 0) += 1.0;
  CHECK_THROWS_AS(stokes_from_spin2(pp, bad), Error);
}

TEST_CASE("covariance_series examples") {
  const double kappa = 2.5;
  PowerSpectrum mono(0, Eigen::VectorXd::Constant(1, kappa));
  for (double theta : {0.0, 1.0, pi}) {
    CHECK(std::abs(covariance_series(mono, EulerAnglesd(0.3, theta, 1.2)) - kappa / (4 * pi)) <= 1e-15);
  }
  Eigen::VectorXd c1(2);
  c1 << 0, kappa;
  const PowerSpectrum dip(0, c1);
  for (double theta : {0.0, 0.5, 2.0}) {
    CHECK(std::abs(covariance_series(dip, EulerAnglesd(0, theta, 0)) -
                   3 * kappa / (4 * pi) * std::cos(theta)) <= 1e-14);
  }
  // Spin 2 at the identity: total variance sum c_l (2l+1)/(4pi).
  const auto flat = PowerSpectrum::flat(6, 2);
  double total = 0;
  for (int l = 2; l <= 6; ++l) total += (2 * l + 1) / (4 * pi);
  CHECK(std::abs(covariance_series(flat, EulerAnglesd::identity()) - total) <= 1e-14);
  // Spin 0 equals the Legendre series.
  const auto f0 = PowerSpectrum::flat(9, 0);
  double leg = 0;
  for (int l = 0; l <= 9; ++l) leg += (2 * l + 1) / (4 * pi) * legendre_P(l, std::cos(0.8));
  CHECK(std::abs(covariance_series(f0, EulerAnglesd(1, 0.8, 2)) - leg) <= 1e-13);
}

TEST_CASE("coefficient rotation preserves per-degree power") {
  auto model = flat_model(12, 0);
  const auto z = sample_unit_coefficients(model);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> ang(0, 2 * pi);
  const EulerAnglesd g(ang(rng), 1.3, ang(rng));
  for (int l = 0; l <= 12; ++l) {
    const auto seg = z.values().segment(l * l, 2 * l + 1);
    const Eigen::VectorXcd rotated = wigner_matrix(l, g) * seg;
    CHECK(std::abs(rotated.squaredNorm() - seg.squaredNorm()) <= 1e-10);
  }
}
