#include "sphfield/fields.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sphfield/errors.hpp"
#include "sphfield/philox.hpp"
#include "sphfield/wigner.hpp"

namespace sphfield {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr double kFourPi = 4 * std::numbers::pi;

UniformPair draw(const FieldModel& model, int l, int m, std::uint32_t stream,
                 std::uint32_t realization) {
  const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(l),
                                   static_cast<std::uint32_t>(m), stream,
                                   realization};
  return uniform_pair(ctr, Philox4x32::key_from_seed(model.seed));
}

// E|Z|^2 = 1, Re and Im each variance 1/2.
cdouble complex_variate(Generator gen, const UniformPair& u) {
  const cdouble phase = std::polar(1.0, kTwoPi * u.u2);
  if (gen == Generator::fixed_modulus) return phase;
  return std::sqrt(-std::log(u.u1)) * phase;
}

// Real, variance 1.
double real_variate(Generator gen, const UniformPair& u) {
  if (gen == Generator::fixed_modulus) return u.u2 < 0.5 ? 1.0 : -1.0;
  return std::sqrt(-2 * std::log(u.u1)) * std::cos(kTwoPi * u.u2);
}

void require_same_grid(const SpinMap& a, const SpinMap& b) {
  require(a.grid == b.grid, ErrorKind::consistency, "maps on different grids");
}

double max_abs(const MapMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_conjugate(const SpinMap& a, const SpinMap& b, double tolerance,
                       const char* what) {
  const double scale = std::max(1.0, max_abs(a.values));
  const double residual = max_abs(b.values - a.values.conjugate());
  if (residual > tolerance * scale) {
    throw Error(ErrorKind::consistency,
                std::string(what) + ": maps are not pointwise conjugate (residual " +
                    std::to_string(residual) + ")");
  }
}

}  // namespace

PowerSpectrum::PowerSpectrum(int spin_in, Eigen::VectorXd values)
    : spin(spin_in), c_l(std::move(values)) {
  validate();
}

void PowerSpectrum::validate() const {
  require(c_l.size() >= 1, ErrorKind::config, "empty power spectrum");
  for (int l = 0; l <= l_max(); ++l) {
    if (!std::isfinite(c_l[l]) || c_l[l] < 0) {
      throw Error(ErrorKind::domain,
                  "power spectrum value at l=" + std::to_string(l) +
                      " must be finite and nonnegative");
    }
    if (l < std::abs(spin) && c_l[l] != 0) {
      throw Error(ErrorKind::consistency,
                  "power spectrum must vanish for l=" + std::to_string(l) +
                      " < |spin|");
    }
  }
}

PowerSpectrum PowerSpectrum::flat(int l_max, int spin, double value) {
  require(l_max >= 0, ErrorKind::config, "band limit must be nonnegative");
  Eigen::VectorXd c = Eigen::VectorXd::Constant(l_max + 1, value);
  for (int l = 0; l < std::min(std::abs(spin), l_max + 1); ++l) c[l] = 0;
  return PowerSpectrum(spin, std::move(c));
}

TriangularCoefficients sample_unit_coefficients(const FieldModel& model,
                                                std::uint32_t realization) {
  const PowerSpectrum& spec = model.spectrum;
  const int L = spec.l_max();
  TriangularCoefficients z(L, spec.spin);
  auto& v = z.values();
  for (int l = std::abs(spec.spin); l <= L; ++l) {
    if (model.symmetry == Symmetry::unconstrained_complex) {
      for (int m = -l; m <= l; ++m) {
        v[TriangularCoefficients::index(l, m)] = complex_variate(
            model.generator, draw(model, l, m, model.stream, realization));
      }
      continue;
    }
    const double r = real_variate(model.generator,
                                  draw(model, l, 0, model.stream, realization));
    v[TriangularCoefficients::index(l, 0)] =
        (l % 2 == 0) ? cdouble(r, 0) : cdouble(0, r);
    for (int m = 1; m <= l; ++m) {
      const cdouble zp = complex_variate(
          model.generator, draw(model, l, m, model.stream, realization));
      v[TriangularCoefficients::index(l, m)] = zp;
      v[TriangularCoefficients::index(l, -m)] =
          double(parity_sign(l - m)) * std::conj(zp);
    }
  }
  return z;
}

cdouble spectrum_factor(const PowerSpectrum& spectrum, int l) {
  return times_i_pow(cdouble(std::sqrt(spectrum.c_l[l]), 0), l);
}

TriangularCoefficients apply_spectrum(const PowerSpectrum& spectrum,
                                      const TriangularCoefficients& unit) {
  require(unit.l_max() == spectrum.l_max() && unit.spin() == spectrum.spin,
          ErrorKind::consistency, "coefficients do not match the spectrum");
  TriangularCoefficients a(unit.l_max(), unit.spin());
  for (int l = 0; l <= unit.l_max(); ++l) {
    const double amp = std::sqrt(spectrum.c_l[l]);
    for (int m = -l; m <= l; ++m) {
      const int i = TriangularCoefficients::index(l, m);
      a.values()[i] = times_i_pow(amp * unit.values()[i], l);
    }
  }
  return a;
}

TriangularCoefficients sample_coefficients(const FieldModel& model,
                                           std::uint32_t realization) {
  return apply_spectrum(model.spectrum,
                        sample_unit_coefficients(model, realization));
}

SpinMap synthesize_field(const FieldModel& model, const SphereGrid& grid,
                         std::uint32_t realization, Parallelism par) {
  return synthesize(sample_coefficients(model, realization), grid, par);
}

TriangularCoefficients conjugate_partner(const TriangularCoefficients& a) {
  TriangularCoefficients b(a.l_max(), -a.spin());
  for (int l = 0; l <= a.l_max(); ++l) {
    for (int m = -l; m <= l; ++m) {
      b.values()[TriangularCoefficients::index(l, m)] =
          double(parity_sign(m + a.spin())) *
          std::conj(a.values()[TriangularCoefficients::index(l, -m)]);
    }
  }
  return b;
}

std::pair<TriangularCoefficients, TriangularCoefficients> sample_spin_pair(
    const FieldModel& model, PairCoupling coupling, std::uint32_t realization) {
  FieldModel plus = model;
  const int s = std::abs(model.spectrum.spin);
  plus.spectrum.spin = s;
  auto a = sample_coefficients(plus, realization);
  if (coupling == PairCoupling::conjugate) {
    auto b = conjugate_partner(a);
    return {std::move(a), std::move(b)};
  }
  FieldModel minus = plus;
  minus.spectrum.spin = -s;
  minus.stream = model.stream + 1;
  return {std::move(a), sample_coefficients(minus, realization)};
}

cdouble lift_to_so3(const TriangularCoefficients& coeffs, const EulerAnglesd& g) {
  require_same_convention(g.convention(), Convention::ZXZ);
  const EulerAnglesd h = inverse(g);
  const int s = coeffs.spin();
  const int L = coeffs.l_max();
  // T^l_{-s,m}(h) = i^{m+s} e^{i s psi1} d^l_{-s,m}(theta) e^{-i m psi2}
  const cdouble left = std::polar(1.0, s * h.phi1());
  std::vector<double> column(L + 1);
  cdouble total = 0;
  for (int m = -L; m <= L; ++m) {
    wigner_d_column<double>(-s, m, h.theta(), column);
    const cdouble right = std::polar(1.0, -m * h.phi2());
    cdouble sum_l = 0;
    for (int l = std::max(std::abs(m), std::abs(s)); l <= L; ++l) {
      sum_l += coeffs.values()[TriangularCoefficients::index(l, m)] *
               std::sqrt((2 * l + 1) / kFourPi) * column[l];
    }
    // (-1)^{s+m} i^s i^{m+s} = (-1)^{s+m} i^{m+2s}
    total += times_i_pow(double(parity_sign(s + m)) * sum_l * right, m + 2 * s);
  }
  return left * total;
}

VectorComponents vector_components(const SpinMap& xplus, const SpinMap& xminus,
                                   double tolerance) {
  require(xplus.spin == 1 && xminus.spin == -1, ErrorKind::consistency,
          "vector components need spin 1 and spin -1 maps");
  require_same_grid(xplus, xminus);
  require_conjugate(xplus, xminus, tolerance, "vector_components");
  return {xplus.values.imag(), -xplus.values.real()};
}

std::pair<SpinMap, SpinMap> spin1_from_vector(const SphereGrid& grid,
                                              const VectorComponents& v) {
  SpinMap plus(grid, 1), minus(grid, -1);
  require(v.theta.rows() == grid.n_theta && v.theta.cols() == grid.n_phi &&
              v.phi.rows() == grid.n_theta && v.phi.cols() == grid.n_phi,
          ErrorKind::consistency, "component maps do not match the grid");
  for (int j = 0; j < grid.n_theta; ++j) {
    for (int k = 0; k < grid.n_phi; ++k) {
      plus.values(j, k) = cdouble(-v.phi(j, k), v.theta(j, k));
      minus.values(j, k) = cdouble(-v.phi(j, k), -v.theta(j, k));
    }
  }
  return {std::move(plus), std::move(minus)};
}

StokesMaps stokes_from_spin2(const SpinMap& a_map, const SpinMap& b_map,
                             double tolerance) {
  require(a_map.spin == 2 && b_map.spin == -2, ErrorKind::consistency,
          "Stokes maps need spin 2 and spin -2 maps");
  require_same_grid(a_map, b_map);
  require_conjugate(a_map, b_map, tolerance, "stokes_from_spin2");
  return {a_map.values.real(), a_map.values.imag()};
}

std::pair<SpinMap, SpinMap> spin2_from_stokes(const SphereGrid& grid,
                                              const StokesMaps& s) {
  require(s.q.rows() == grid.n_theta && s.q.cols() == grid.n_phi &&
              s.u.rows() == grid.n_theta && s.u.cols() == grid.n_phi,
          ErrorKind::consistency, "Stokes maps do not match the grid");
  SpinMap p(grid, 2), pc(grid, -2);
  for (int j = 0; j < grid.n_theta; ++j) {
    for (int k = 0; k < grid.n_phi; ++k) {
      p.values(j, k) = cdouble(s.q(j, k), s.u(j, k));
      pc.values(j, k) = cdouble(s.q(j, k), -s.u(j, k));
    }
  }
  return {std::move(p), std::move(pc)};
}

TensorComponents tensor_from_stokes(const StokesMaps& s) {
  return {s.q / 2, s.u / 2, -s.q / 2};
}

TensorComponents tensor_from_a_component(const SpinMap& a_component) {
  const Eigen::MatrixXd phi_phi = a_component.values.real() / 2;
  return {-phi_phi, a_component.values.imag() / 2, phi_phi};
}

cdouble covariance_series(const PowerSpectrum& spectrum, const EulerAnglesd& g12) {
  spectrum.validate();
  require_same_convention(g12.convention(), Convention::ZXZ);
  const int s = spectrum.spin;
  const int L = spectrum.l_max();
  std::vector<double> column(L + 1);
  wigner_d_column<double>(-s, -s, g12.theta(), column);
  double sum = 0;
  for (int l = std::abs(s); l <= L; ++l) {
    sum += spectrum.c_l[l] * (2 * l + 1) / kFourPi * column[l];
  }
  // T^l_{-s,-s} = e^{i s (phi1 + phi2)} d^l_{-s,-s}
  return std::polar(1.0, s * (g12.phi1() + g12.phi2())) * sum;
}

cdouble covariance_at_points(const PowerSpectrum& spectrum,
                             const SpherePointd& t1, const SpherePointd& t2) {
  return covariance_series(
      spectrum, compose(inverse(point_to_rotation(t1)), point_to_rotation(t2)));
}

}  // namespace sphfield
