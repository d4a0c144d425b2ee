#include "sphfield/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <thread>

#include "sphfield/estimate.hpp"
#include "sphfield/fields.hpp"
#include "sphfield/harmonics.hpp"
#include "sphfield/io.hpp"
#include "sphfield/rodrigues.hpp"
#include "sphfield/wigner.hpp"

namespace sphfield {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kEnsembleSize = 2000;
constexpr int kEnsembleLmax = 16;

std::string fmt(const char* format, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, format, a, b);
  return buf;
}

EulerAnglesd random_rotation(std::mt19937_64& rng, Convention conv) {
  std::uniform_real_distribution<double> angle(0, 2 * kPi), z(-1, 1);
  const double a = angle(rng), b = std::acos(z(rng)), c = angle(rng);
  return {a, b, c, conv};
}

TriangularCoefficients random_coefficients(std::mt19937_64& rng, int l_max,
                                           int spin) {
  std::normal_distribution<double> normal;
  TriangularCoefficients a(l_max, spin);
  for (int l = std::abs(spin); l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m) a.set(l, m, {normal(rng), normal(rng)});
  }
  return a;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// 1: recursion vs exact Rodrigues oracle.
CriterionResult wigner_oracle() {
  constexpr int kL = 10, kNodes = 50;
  double worst = 0;
  for (int l = 0; l <= kL; ++l) {
    for (int m = -l; m <= l; ++m) {
      for (int n = -l; n <= l; ++n) {
        const RodriguesOracle oracle({l, m, n});
        for (int i = 0; i < kNodes; ++i) {
          const double theta = kPi * i / (kNodes - 1);
          worst = std::max(worst, std::abs(wigner_d<double>({l, m, n}, theta) -
                                           oracle.d(theta)));
        }
      }
    }
  }
  return {1, "Wigner recursion vs Rodrigues oracle", worst <= 1e-12,
          fmt("max |err| = %.3e (tol %.0e), l <= 10, 50 nodes", worst, 1e-12)};
}

// 2: addition formula, unitary variant, multiplicativity.
CriterionResult representation_identities(std::mt19937_64& rng) {
  constexpr int kL = 32, kPairs = 100;
  double addition = 0, unitary_form = 0, multiplicative = 0, unitarity = 0;
  for (int p = 0; p < kPairs; ++p) {
    const auto g1 = random_rotation(rng, Convention::ZXZ);
    const auto g2 = random_rotation(rng, Convention::ZXZ);
    const auto t1 = wigner_matrices(kL, g1);
    const auto t2 = wigner_matrices(kL, g2);
    const auto t12 = wigner_matrices(kL, compose(g1, g2));
    const auto t1i2 = wigner_matrices(kL, compose(g1, inverse(g2)));

    const auto h1 = convert_convention(g1, Convention::ZYZ);
    const auto h2 = convert_convention(g2, Convention::ZYZ);
    const auto d1 = wigner_matrices(kL, h1);
    const auto d2 = wigner_matrices(kL, h2);
    const auto d12 = wigner_matrices(kL, compose(h1, h2));
    for (int l = 0; l <= kL; ++l) {
      const auto eye = Eigen::MatrixXcd::Identity(2 * l + 1, 2 * l + 1);
      addition = std::max(addition, max_abs(t12[l] - t1[l] * t2[l]));
      unitary_form = std::max(unitary_form, max_abs(t1i2[l] - t1[l] * t2[l].adjoint()));
      multiplicative = std::max(multiplicative, max_abs(d12[l] - d1[l] * d2[l]));
      unitarity = std::max(unitarity, max_abs(t1[l] * t1[l].adjoint() - eye));
    }
  }
  const double worst = std::max({addition, unitary_form, multiplicative, unitarity});
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "addition %.3e, conj-transpose form %.3e, D multiplicativity "
                "%.3e, unitarity %.3e (tol 1e-10), l <= 32, 100 pairs",
                addition, unitary_form, multiplicative, unitarity);
  return {2, "representation identities", worst <= 1e-10, buf};
}

// 3: D = (-i)^{n-m} T at equal angles; T = (-1)^{n-m} D at equal rotations.
CriterionResult phase_relation(std::mt19937_64& rng) {
  constexpr int kL = 16, kSamples = 100;
  double same_angles = 0, same_rotation = 0;
  for (int i = 0; i < kSamples; ++i) {
    const auto gz = random_rotation(rng, Convention::ZYZ);
    const EulerAnglesd gx(gz.phi1(), gz.theta(), gz.phi2(), Convention::ZXZ);
    const auto gc = convert_convention(gz, Convention::ZXZ);
    for (int l = 0; l <= kL; ++l) {
      for (int m = -l; m <= l; ++m) {
        for (int n = -l; n <= l; ++n) {
          const cdouble d = eval_D<double>({l, m, n}, gz);
          const cdouble t = eval_T<double>({l, m, n}, gx);
          const cdouble tc = eval_T<double>({l, m, n}, gc);
          same_angles = std::max(same_angles, std::abs(d - times_i_pow(t, m - n)));
          same_rotation = std::max(same_rotation,
                                   std::abs(tc - double(parity_sign(n - m)) * d));
        }
      }
    }
  }
  const double worst = std::max(same_angles, same_rotation);
  return {3, "D/T phase relation", worst <= 1e-12,
          fmt("equal angles %.3e, after convert_convention %.3e (tol 1e-12), l <= 16",
              same_angles, same_rotation)};
}

// 4: quadrature Gram matrix of all D^l_mn, l <= 8.
CriterionResult so3_orthogonality() {
  constexpr int kL = 8, kTheta = 10, kPhi = 18;
  Eigen::VectorXd x, w;
  gauss_legendre(kTheta, x, w);
  int n_funcs = 0;
  for (int l = 0; l <= kL; ++l) n_funcs += (2 * l + 1) * (2 * l + 1);
  const int n_points = kTheta * kPhi * kPhi;
  Eigen::MatrixXcd B(n_points, n_funcs);
  const double dphi = 2 * kPi / kPhi;
  int row = 0;
  for (int j = 0; j < kTheta; ++j) {
    const double theta = std::acos(x[j]);
    const auto blocks = wigner_blocks(kL, theta);
    for (int a = 0; a < kPhi; ++a) {
      for (int c = 0; c < kPhi; ++c, ++row) {
        const double sw = std::sqrt(w[j] * dphi * dphi);
        int col = 0;
        for (int l = 0; l <= kL; ++l) {
          for (int m = -l; m <= l; ++m) {
            for (int n = -l; n <= l; ++n, ++col) {
              B(row, col) = sw * std::polar(1.0, -(m * a + n * c) * dphi) *
                            blocks[l](m, n);
            }
          }
        }
      }
    }
  }
  const Eigen::MatrixXcd gram = B.adjoint() * B;
  double diag = 0, off = 0;
  int col = 0;
  std::vector<int> degree(n_funcs);
  for (int l = 0; l <= kL; ++l) {
    for (int k = 0; k < (2 * l + 1) * (2 * l + 1); ++k) degree[col++] = l;
  }
  for (int a = 0; a < n_funcs; ++a) {
    for (int b = 0; b < n_funcs; ++b) {
      if (a == b) {
        diag = std::max(diag, std::abs(gram(a, a) - 8 * kPi * kPi / (2 * degree[a] + 1)));
      } else {
        off = std::max(off, std::abs(gram(a, b)));
      }
    }
  }
  return {4, "SO(3) orthogonality", diag <= 1e-8 && off <= 1e-8,
          fmt("diag |G - 8pi^2/(2l+1)| %.3e, off-diag %.3e (tol 1e-8), 969 functions",
              diag, off)};
}

// 5: analyze(synthesize(a)) == a.
CriterionResult transform_round_trip(std::mt19937_64& rng, Parallelism par) {
  double worst = 0;
  for (int L : {4, 16, 32}) {
    const auto grid = build_grid(L);
    for (int s = -2; s <= 2; ++s) {
      const auto a = random_coefficients(rng, L, s);
      const auto back = analyze(synthesize(a, grid, par), L, par);
      const double rel = (back.values() - a.values()).cwiseAbs().maxCoeff() /
                         a.values().cwiseAbs().maxCoeff();
      worst = std::max(worst, rel);
    }
  }
  return {5, "transform round trip", worst <= 1e-9,
          fmt("max relative error %.3e (tol %.0e), spins -2..2, l_max 4/16/32",
              worst, 1e-9)};
}

// 6: spin factor of the SO(3) lift.
CriterionResult spin_factor(std::mt19937_64& rng, Parallelism par) {
  constexpr int kL = 16, kSamples = 50;
  const auto a_minus2 = random_coefficients(rng, kL, -2);
  const auto a_plus2 = random_coefficients(rng, kL, 2);
  const auto a_zero = random_coefficients(rng, kL, 0);
  double tensor = 0, tensor_plus = 0, scalar = 0;
  for (int i = 0; i < kSamples; ++i) {
    const auto g = random_rotation(rng, Convention::ZXZ);
    const EulerAnglesd g0(g.phi1(), g.theta(), 0.0, Convention::ZXZ);
    const cdouble e2 = std::polar(1.0, 2 * g.phi2());
    tensor = std::max(tensor, std::abs(lift_to_so3(a_minus2, g) - e2 * lift_to_so3(a_minus2, g0)));
    tensor_plus = std::max(tensor_plus, std::abs(lift_to_so3(a_plus2, g) -
                                                 std::conj(e2) * lift_to_so3(a_plus2, g0)));
    scalar = std::max(scalar, std::abs(lift_to_so3(a_zero, g) - lift_to_so3(a_zero, g0)));
  }
  // Slice at phi2 = 0 reproduces the synthesized map.
  double slice = 0;
  const auto grid = build_grid(kL);
  for (int s = -2; s <= 2; ++s) {
    const auto a = random_coefficients(rng, kL, s);
    const auto map = synthesize(a, grid, par);
    for (int j = 0; j < grid.n_theta; j += 3) {
      for (int k = 0; k < grid.n_phi; k += 5) {
        const cdouble v = lift_to_so3(a, point_to_rotation(grid.point(j, k)));
        slice = std::max(slice, std::abs(v - map.values(j, k)));
      }
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "A(g) vs e^{2i phi2} A(g0) %.3e, spin +2 e^{-2i phi2} %.3e "
                "(tol 1e-10); spin 0 %.3e (tol 1e-12); slice vs map %.3e (tol 1e-10)",
                tensor, tensor_plus, scalar, slice);
  const bool pass = tensor <= 1e-10 && tensor_plus <= 1e-10 && scalar <= 1e-12 &&
                    slice <= 1e-10;
  return {6, "spin factor of the lift", pass, buf};
}

CoefficientEnsemble sample_ensemble(const FieldModel& model, int n) {
  std::vector<TriangularCoefficients> a;
  a.reserve(n);
  for (int r = 0; r < n; ++r) a.push_back(sample_coefficients(model, r));
  return CoefficientEnsemble::from_coefficients(model.spectrum, a);
}

// Names of the failing checks, or "none".
std::string failures(const DiagnosticsReport& rep) {
  std::string out;
  for (const auto& c : rep.checks) {
    if (c.pass) continue;
    if (!out.empty()) out += ",";
    out += c.name;
  }
  return out.empty() ? "none" : out;
}

// 7: Monte-Carlo coefficient diagnostics, contrastive generators.
CriterionResult coefficient_suite(std::uint64_t seed) {
  FieldModel model;
  model.spectrum = PowerSpectrum::flat(kEnsembleLmax, 0);
  model.seed = seed;
  model.stream = 7;
  const DiagnosticsConfig config;

  model.generator = Generator::gaussian;
  const auto gauss = coefficient_diagnostics(sample_ensemble(model, kEnsembleSize), config);
  model.generator = Generator::fixed_modulus;
  const auto fixed = coefficient_diagnostics(sample_ensemble(model, kEnsembleSize), config);

  model.generator = Generator::gaussian;
  CoefficientEnsemble copied;
  const auto one = sample_unit_coefficients(model, 0);
  for (int r = 0; r < kEnsembleSize; ++r) copied.push_back(one);
  const auto degenerate = coefficient_diagnostics(copied, config);

  bool fixed_ok = !fixed.passed("g_normality");
  for (const char* name : {"a_mean", "b_variance", "c_correlation", "c_pseudo_correlation",
                           "c_pseudo_variance", "d_conjugation", "e_re_im_variance", "e_re_im_correlation"}) {
    fixed_ok = fixed_ok && fixed.passed(name);
  }
  const bool pass = gauss.all_passed() && fixed_ok && !degenerate.passed("b_variance");
  std::string detail = "failing checks: gaussian {" + failures(gauss) +
                       "}, fixed-modulus {" + failures(fixed) + "}, copied {" +
                       failures(degenerate) + "}" +
                       fmt("; gaussian JB %.2f, fixed-modulus JB %.1f",
                           gauss.check("g_normality").statistic,
                           fixed.check("g_normality").statistic);
  return {7, "coefficient diagnostics (N = 2000)", pass, detail};
}

// 8: spectrum recovery through synthesize -> analyze.
CriterionResult spectrum_recovery(std::uint64_t seed, Parallelism par) {
  FieldModel model;
  model.spectrum = PowerSpectrum::flat(kEnsembleLmax, 0);
  model.seed = seed;
  model.stream = 8;
  const auto grid = build_grid(kEnsembleLmax);
  std::vector<TriangularCoefficients> recovered;
  for (int r = 0; r < kEnsembleSize; ++r) {
    recovered.push_back(analyze(synthesize_field(model, grid, r, par), kEnsembleLmax, par));
  }
  const auto est = estimate_cl(recovered);
  double worst = 0;  // in units of the allowed band
  int worst_l = 0;
  for (int l = 0; l <= kEnsembleLmax; ++l) {
    const double band = 3 * std::sqrt(2.0 / ((2 * l + 1) * double(kEnsembleSize)));
    const double ratio = std::abs(est.c_hat[l] - 1) / band;
    if (ratio > worst) worst = ratio, worst_l = l;
  }
  return {8, "spectrum recovery", worst <= 1,
          fmt("worst |C_hat - 1| / (3 sqrt(2/((2l+1)N))) = %.3f at l = %.0f",
              worst, worst_l)};
}

// 9: ensemble covariance vs the closed-form series.
CriterionResult covariance_consistency(std::uint64_t seed, Parallelism par) {
  const auto grid = build_grid(kEnsembleLmax);
  const int jc = grid.n_theta / 2 - 2;
  const SpherePointd t1 = grid.point(jc, 0);
  const std::vector<std::pair<SpherePointd, SpherePointd>> pairs = {
      {t1, t1},
      {t1, grid.point(jc, 3)},
      {t1, grid.point(jc + 3, 5)},
      {t1, grid.point(0, 10)},
      {t1, grid.point(grid.n_theta - 1, 17)}};

  double worst = 0;
  for (int spin : {0, 2}) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(kEnsembleLmax + 1);
    for (int l = spin; l <= kEnsembleLmax; ++l) c[l] = 1.0 / (l + 1);
    FieldModel model;
    model.spectrum = PowerSpectrum(spin, c);
    model.seed = seed;
    model.stream = 9;
    std::vector<SpinMap> maps;
    for (int r = 0; r < kEnsembleSize; ++r) {
      maps.push_back(synthesize_field(model, grid, r, par));
    }
    const auto emp = empirical_covariance(maps, pairs);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const cdouble theory =
          covariance_at_points(model.spectrum, pairs[i].first, pairs[i].second);
      worst = std::max(worst, std::abs(emp[i].value - theory) / emp[i].standard_error);
    }
  }
  return {9, "covariance consistency", worst <= 3,
          fmt("worst |R_emp - R_series| / SE = %.3f (tol %.0f), spins 0 and 2, 5 separations",
              worst, 3)};
}

// 10: C_hat invariant under per-degree rotation of the coefficients.
CriterionResult rotation_invariance(std::mt19937_64& rng, std::uint64_t seed,
                                    Parallelism par) {
  constexpr int kL = 32;
  const auto grid = build_grid(kL);
  double coeff_level = 0, field_level = 0;
  for (int spin : {0, 2}) {
    FieldModel model;
    model.spectrum = PowerSpectrum::flat(kL, spin);
    model.seed = seed;
    model.stream = 10;
    const auto a = sample_coefficients(model);
    const auto c0 = estimate_cl(a).c_hat;
    for (int i = 0; i < 10; ++i) {
      const auto g = random_rotation(rng, i % 2 ? Convention::ZYZ : Convention::ZXZ);
      const auto w = wigner_matrices(kL, g);
      TriangularCoefficients rotated(kL, spin);
      for (int l = 0; l <= kL; ++l) {
        const int at = TriangularCoefficients::index(l, -l);
        rotated.values().segment(at, 2 * l + 1) = w[l] * a.values().segment(at, 2 * l + 1);
      }
      coeff_level = std::max(coeff_level,
                             (estimate_cl(rotated).c_hat - c0).cwiseAbs().maxCoeff());
      const auto back = analyze(synthesize(rotated, grid, par), kL, par);
      field_level = std::max(field_level,
                             (estimate_cl(back).c_hat - c0).cwiseAbs().maxCoeff());
    }
  }
  return {10, "rotation invariance of C_hat",
          coeff_level <= 1e-10 && field_level <= 1e-10,
          fmt("coefficients %.3e, rotated field %.3e (tol 1e-10), l_max 32",
              coeff_level, field_level)};
}

// 11: bytes independent of worker count.
CriterionResult determinism(std::uint64_t seed, int max_workers) {
  FieldModel model;
  model.spectrum = PowerSpectrum::flat(kEnsembleLmax, 2);
  model.seed = seed;
  const auto grid = build_grid(kEnsembleLmax);
  auto run = [&](int workers) {
    const Parallelism par{workers};
    const auto a = sample_coefficients(model);
    const auto map = synthesize(a, grid, par);
    return encode_map(map) + encode_coefficients(a) +
           encode_coefficients(analyze(map, kEnsembleLmax, par));
  };
  const std::string serial = run(1);
  const std::string parallel = run(max_workers);
  const std::string again = run(max_workers);
  const bool pass = serial == parallel && parallel == again;
  return {11, "determinism", pass,
          "1 vs " + std::to_string(max_workers) + " workers: " +
              (pass ? "byte-identical" : "outputs differ")};
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  char head[96];
  std::snprintf(head, sizeof head, "[%s] criterion %2d: ", r.pass ? "PASS" : "FAIL", r.id);
  return head + r.name + " -- " + r.detail;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int max_workers =
      options.max_workers > 0 ? options.max_workers : std::max(hw, 4);
  const Parallelism par{max_workers};
  const std::uint64_t seed = options.seed;
  using Rng = std::mt19937_64;

  const std::vector<std::function<CriterionResult(Rng&)>> criteria = {
      [&](Rng&) { return wigner_oracle(); },
      [&](Rng& rng) { return representation_identities(rng); },
      [&](Rng& rng) { return phase_relation(rng); },
      [&](Rng&) { return so3_orthogonality(); },
      [&](Rng& rng) { return transform_round_trip(rng, par); },
      [&](Rng& rng) { return spin_factor(rng, par); },
      [&](Rng&) { return coefficient_suite(seed); },
      [&](Rng&) { return spectrum_recovery(seed, par); },
      [&](Rng&) { return covariance_consistency(seed, par); },
      [&](Rng& rng) { return rotation_invariance(rng, seed, par); },
      [&](Rng&) { return determinism(seed, max_workers); },
  };

  std::vector<CriterionResult> results;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), id) == options.only.end()) {
      continue;
    }
    CriterionResult r;
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(id)};
    Rng rng(seq);
    try {
      r = criteria[i](rng);
    } catch (const std::exception& e) {
      r = {id, "criterion " + std::to_string(id), false,
           std::string("exception: ") + e.what()};
    }
    if (options.log) *options.log << format_result(r) << std::endl;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace sphfield
