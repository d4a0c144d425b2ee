#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sphfield/harmonics.hpp"
#include "sphfield/rodrigues.hpp"

using namespace sphfield;

namespace {

constexpr double pi = std::numbers::pi;

TriangularCoefficients random_coefficients(std::mt19937_64& rng, int l_max, int spin) {
  std::normal_distribution<double> normal;
  TriangularCoefficients a(l_max, spin);
  for (int l = std::abs(spin); l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m) a.set(l, m, {normal(rng), normal(rng)});
  }
  return a;
}

SpinMap sample_function(const SphereGrid& grid, int spin, int l, int m) {
  SpinMap map(grid, spin);
  for (int j = 0; j < grid.n_theta; ++j) {
    for (int k = 0; k < grid.n_phi; ++k) {
      map.values(j, k) = spin_harm(spin, l, m, grid.point(j, k));
    }
  }
  return map;
}

}  // namespace

TEST_CASE("legendre_P") {
  CHECK(legendre_P(0, 0.37) == 1);
  CHECK(legendre_P(1, 0.3) == doctest::Approx(0.3));
  for (int l = 0; l <= 64; ++l) CHECK(legendre_P(l, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(legendre_P(2, 0.5) == doctest::Approx(-0.125));
  CHECK_THROWS_AS(legendre_P(2, 1.5), Error);
}

TEST_CASE("sph_harm values") {
  CHECK(sph_harm(0, 0, {1.0, 2.0}).real() == doctest::Approx(1 / std::sqrt(4 * pi)));
  for (int l = 1; l <= 6; ++l) {
    for (int m = -l; m <= l; ++m) {
      if (m != 0) CHECK(std::abs(sph_harm(l, m, {0.0, 1.3})) == 0);
    }
  }
  // Y_1^0 = sqrt(3/4pi) cos(theta)
  CHECK(sph_harm(1, 0, {0.6, 0.2}).real() ==
        doctest::Approx(std::sqrt(3 / (4 * pi)) * std::cos(0.6)));
  CHECK_THROWS_AS(sph_harm(2, 3, {0.1, 0.1}), Error);
}

TEST_CASE("spherical harmonic addition formula") {
  const SpherePointd t1(0.7, 0.4), t2(2.1, 5.0);
  const double cos12 = t1.unit_vector().dot(t2.unit_vector());
  for (int l = 0; l <= 10; ++l) {
    cdouble sum = 0;
    for (int m = -l; m <= l; ++m) sum += sph_harm(l, m, t1) * std::conj(sph_harm(l, m, t2));
    CHECK(std::abs(sum - (2 * l + 1) / (4 * pi) * legendre_P(l, cos12)) <= 1e-12);
  }
}

TEST_CASE("spin_harm") {
  const SpherePointd t(1.1, 0.3);
  for (int l = 0; l <= 5; ++l) {
    for (int m = -l; m <= l; ++m) CHECK(std::abs(spin_harm(0, l, m, t) - sph_harm(l, m, t)) <= 1e-12);
  }
  CHECK(spin_harm(2, 1, 0, t) == cdouble(0));
  const double d = RodriguesOracle({2, 0, -2}).d(pi / 2);
  CHECK(std::abs(spin_harm(2, 2, 0, {pi / 2, 0}) - std::sqrt(5 / (4 * pi)) * d) <= 1e-12);
  // conj(sY_lm) = (-1)^{m+s} (-s)Y_{l,-m}
  for (int s = -2; s <= 2; ++s) {
    for (int m = -3; m <= 3; ++m) {
      CHECK(std::abs(std::conj(spin_harm(s, 3, m, t)) -
                     double(((m + s) % 2 == 0) ? 1 : -1) * spin_harm(-s, 3, -m, t)) <= 1e-12);
    }
  }
}

TEST_CASE("build_grid") {
  const auto g0 = build_grid(0);
  CHECK(g0.n_theta == 1);
  CHECK(g0.n_phi == 2);
  CHECK(g0.theta_nodes[0] == doctest::Approx(pi / 2));
  CHECK(g0.gl_weights[0] == doctest::Approx(2));
  for (int L : {1, 7, 16, 64}) {
    const auto g = build_grid(L);
    CHECK(g.n_theta == L + 1);
    CHECK(g.n_phi == 2 * L + 2);
    CHECK(std::abs(g.gl_weights.sum() - 2) <= 1e-12);
    for (int j = 1; j < g.n_theta; ++j) CHECK(g.theta_nodes[j] > g.theta_nodes[j - 1]);
  }
  // x^{2n-1} moments integrate exactly.
  const auto g = build_grid(9);
  double m8 = 0;
  for (int j = 0; j < g.n_theta; ++j) m8 += g.gl_weights[j] * std::pow(std::cos(g.theta_nodes[j]), 18);
  CHECK(m8 == doctest::Approx(2.0 / 19).epsilon(1e-13));

  const auto g4 = build_grid(4);
  const auto y10 = sample_function(g4, 0, 1, 0);
  CHECK(std::abs(map_power(y10) - 1) <= 1e-12);
}

TEST_CASE("analyze examples") {
  const auto grid = build_grid(6);
  SpinMap constant(grid, 0);
  constant.values.setConstant(1 / std::sqrt(4 * pi));
  const auto a = analyze(constant, 6);
  CHECK(std::abs(a(0, 0) - cdouble(1)) <= 1e-12);
  CHECK(a.values().tail(a.values().size() - 1).cwiseAbs().maxCoeff() <= 1e-12);

  const auto b = analyze(sample_function(grid, 2, 3, 1), 6);
  CHECK(std::abs(b(3, 1) - cdouble(1)) <= 1e-10);
  double others = 0;
  for (int l = 2; l <= 6; ++l) {
    for (int m = -l; m <= l; ++m) {
      if (l != 3 || m != 1) others = std::max(others, std::abs(b(l, m)));
    }
  }
  CHECK(others <= 1e-10);
  for (int l = 0; l < 2; ++l) CHECK(b(l, 0) == cdouble(0));

  CHECK_THROWS_AS(analyze(constant, 7), Error);
  try {
    analyze(SpinMap(make_grid(10, 12), 0), 6);
    FAIL("expected a resolution error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resolution);
  }
}

TEST_CASE("synthesize examples") {
  const auto grid = build_grid(4);
  TriangularCoefficients zero(4, 0);
  CHECK(synthesize(zero, grid).values.cwiseAbs().maxCoeff() == 0);
  TriangularCoefficients mono(4, 0);
  mono.set(0, 0, std::sqrt(4 * pi));
  CHECK((synthesize(mono, grid).values.array() - cdouble(1)).abs().maxCoeff() <= 1e-14);

  TriangularCoefficients spin2(4, 2);
  CHECK_THROWS_AS(spin2.set(1, 0, 1.0), Error);
  spin2.values()[0] = 1.0;
  CHECK_THROWS_AS(synthesize(spin2, grid), Error);
}

TEST_CASE("round trip and Parseval across spins") {
  std::mt19937_64 rng(31);
  for (int L : {4, 16, 32}) {
    const auto grid = build_grid(L);
    for (int s = -2; s <= 2; ++s) {
      const auto a = random_coefficients(rng, L, s);
      const auto map = synthesize(a, grid);
      const auto back = analyze(map, L);
      CHECK((back.values() - a.values()).cwiseAbs().maxCoeff() /
                a.values().cwiseAbs().maxCoeff() <= 1e-9);
      CHECK(std::abs(map_power(map) - a.values().squaredNorm()) <=
            1e-9 * a.values().squaredNorm());
    }
  }
}

TEST_CASE("oversampled grids and worker counts") {
  std::mt19937_64 rng(37);
  const auto a = random_coefficients(rng, 10, 1);
  const auto fine = make_grid(17, 31);
  const auto m1 = synthesize(a, fine, Parallelism{1});
  const auto m3 = synthesize(a, fine, Parallelism{3});
  CHECK((m1.values - m3.values).cwiseAbs().maxCoeff() == 0);
  const auto b1 = analyze(m1, 10, Parallelism{1});
  const auto b3 = analyze(m1, 10, Parallelism{3});
  CHECK((b1.values() - b3.values()).cwiseAbs().maxCoeff() == 0);
  CHECK((b1.values() - a.values()).cwiseAbs().maxCoeff() <= 1e-12);
}
