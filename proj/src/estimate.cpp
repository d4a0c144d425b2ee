#include "sphfield/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

#include "sphfield/errors.hpp"
#include "sphfield/wigner.hpp"

namespace sphfield {

namespace {

bool same_shape(const TriangularCoefficients& a, const TriangularCoefficients& b) {
  return a.l_max() == b.l_max() && a.spin() == b.spin();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return (lo + hi) / 2;
}

CheckResult make_check(std::string name, double statistic, double threshold,
                       std::size_t n) {
  return {std::move(name), statistic, threshold, statistic <= threshold, n};
}

}  // namespace

SpectrumEstimate estimate_cl(const TriangularCoefficients& coeffs) {
  SpectrumEstimate est;
  est.spin = coeffs.spin();
  est.n_realizations = 1;
  est.c_hat = Eigen::VectorXd::Zero(coeffs.l_max() + 1);
  for (int l = 0; l <= coeffs.l_max(); ++l) {
    est.c_hat[l] = coeffs.values()
                       .segment(TriangularCoefficients::index(l, -l), 2 * l + 1)
                       .squaredNorm() /
                   (2 * l + 1);
  }
  return est;
}

SpectrumEstimate estimate_cl(std::span<const TriangularCoefficients> ensemble) {
  require(!ensemble.empty(), ErrorKind::sample_size, "empty ensemble");
  SpectrumEstimate total = estimate_cl(ensemble.front());
  for (std::size_t r = 1; r < ensemble.size(); ++r) {
    require(same_shape(ensemble[r], ensemble.front()), ErrorKind::consistency,
            "ensemble members differ in l_max or spin");
    total.c_hat += estimate_cl(ensemble[r]).c_hat;
  }
  total.c_hat /= static_cast<double>(ensemble.size());
  total.n_realizations = static_cast<int>(ensemble.size());
  return total;
}

GridPoint locate(const SphereGrid& grid, const SpherePointd& t, double tolerance) {
  for (int j = 0; j < grid.n_theta; ++j) {
    if (std::abs(grid.theta_nodes[j] - t.theta) > tolerance) continue;
    for (int k = 0; k < grid.n_phi; ++k) {
      if (std::abs(grid.phi_nodes[k] - t.phi) <= tolerance) return {j, k};
    }
  }
  throw Error(ErrorKind::index, "point (" + std::to_string(t.theta) + ", " +
                                    std::to_string(t.phi) +
                                    ") is not a grid node");
}

std::vector<CovarianceEstimate> empirical_covariance(
    std::span<const SpinMap> maps,
    std::span<const std::pair<SpherePointd, SpherePointd>> pairs) {
  require(maps.size() >= 2, ErrorKind::sample_size,
          "empirical covariance needs at least 2 realizations");
  const SphereGrid& grid = maps.front().grid;
  for (const auto& m : maps) {
    require(m.grid == grid && m.spin == maps.front().spin,
            ErrorKind::consistency, "ensemble maps differ in grid or spin");
  }
  const double n = static_cast<double>(maps.size());
  std::vector<CovarianceEstimate> out;
  for (const auto& [t1, t2] : pairs) {
    const GridPoint p1 = locate(grid, t1), p2 = locate(grid, t2);
    cdouble mean = 0;
    for (const auto& m : maps) {
      mean += m.values(p1.j, p1.k) * std::conj(m.values(p2.j, p2.k));
    }
    mean /= n;
    double ss = 0;
    for (const auto& m : maps) {
      ss += std::norm(m.values(p1.j, p1.k) * std::conj(m.values(p2.j, p2.k)) - mean);
    }
    out.push_back({mean, std::sqrt(ss / (n * (n - 1)))});
  }
  return out;
}

void CoefficientEnsemble::push_back(TriangularCoefficients z) {
  if (realizations.empty()) {
    l_max = z.l_max();
    spin = z.spin();
  }
  require(z.l_max() == l_max && z.spin() == spin, ErrorKind::consistency,
          "ensemble members differ in l_max or spin");
  realizations.push_back(std::move(z));
}

CoefficientEnsemble CoefficientEnsemble::from_coefficients(
    const PowerSpectrum& spectrum, std::span<const TriangularCoefficients> a) {
  for (int l = std::abs(spectrum.spin); l <= spectrum.l_max(); ++l) {
    require(spectrum.c_l[l] > 0, ErrorKind::consistency,
            "Z_lm cannot be recovered where c_l = 0 (l=" + std::to_string(l) + ")");
  }
  CoefficientEnsemble ens;
  ens.l_max = spectrum.l_max();
  ens.spin = spectrum.spin;
  for (const auto& coeffs : a) {
    require(coeffs.l_max() == spectrum.l_max() && coeffs.spin() == spectrum.spin,
            ErrorKind::consistency, "coefficients do not match the spectrum");
    TriangularCoefficients z(coeffs.l_max(), coeffs.spin());
    for (int l = std::abs(spectrum.spin); l <= spectrum.l_max(); ++l) {
      const double amp = std::sqrt(spectrum.c_l[l]);
      for (int m = -l; m <= l; ++m) {
        const int i = TriangularCoefficients::index(l, m);
        z.values()[i] = times_i_pow(coeffs.values()[i], -l) / amp;
      }
    }
    ens.push_back(std::move(z));
  }
  return ens;
}

const CheckResult& DiagnosticsReport::check(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw Error(ErrorKind::index, "no diagnostics check named " + name);
}

bool DiagnosticsReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

double jarque_bera(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  require(x.size() >= 2, ErrorKind::sample_size, "Jarque-Bera needs data");
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : x) {
    const double d = v - mean, d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (m2 == 0) return std::numeric_limits<double>::infinity();
  const double skew = m3 / std::pow(m2, 1.5);
  const double kurt = m4 / (m2 * m2);
  return n / 6 * (skew * skew + (kurt - 3) * (kurt - 3) / 4);
}

DiagnosticsReport coefficient_diagnostics(const CoefficientEnsemble& ensemble,
                                          const DiagnosticsConfig& config) {
  const std::size_t n_real = ensemble.size();
  if (n_real < config.min_realizations) {
    throw Error(ErrorKind::sample_size,
                "diagnostics need at least " +
                    std::to_string(config.min_realizations) +
                    " realizations, got " + std::to_string(n_real));
  }
  const double n = static_cast<double>(n_real);
  const double root_n = std::sqrt(n);
  const bool sym = config.conjugate_symmetric;
  const int L = ensemble.l_max;
  const int l_min = std::abs(ensemble.spin);

  // Columns of M: one per coefficient (l, m) with l >= |spin|.
  std::vector<std::pair<int, int>> index;
  for (int l = l_min; l <= L; ++l) {
    for (int m = -l; m <= l; ++m) index.emplace_back(l, m);
  }
  const int K = static_cast<int>(index.size());
  Eigen::MatrixXcd M(n_real, K);
  for (std::size_t r = 0; r < n_real; ++r) {
    const auto& v = ensemble.realizations[r].values();
    for (int c = 0; c < K; ++c) {
      M(r, c) = v[TriangularCoefficients::index(index[c].first, index[c].second)];
    }
  }

  DiagnosticsReport report;
  report.n_realizations = n_real;

  double max_mean = 0, max_var = 0, max_reim_var = 0, max_reim_corr = 0,
         max_cauchy = 0;
  std::size_t n_complex = 0;
  Eigen::MatrixXcd X(n_real, K);  // centered, unit-norm columns
  for (int c = 0; c < K; ++c) {
    const auto [l, m] = index[c];
    CoefficientStats st;
    st.l = l;
    st.m = m;
    st.mean = M.col(c).mean();
    const Eigen::VectorXcd centered = M.col(c).array() - st.mean;
    const Eigen::VectorXd re = centered.real(), im = centered.imag();
    st.variance = centered.squaredNorm() / (n - 1);
    st.re_variance = re.squaredNorm() / (n - 1);
    st.im_variance = im.squaredNorm() / (n - 1);
    const double denom = re.norm() * im.norm();
    st.re_im_correlation = denom > 0 ? re.dot(im) / denom : 0;

    const double norm = centered.norm();
    X.col(c) = norm > 0 ? Eigen::VectorXcd(centered / norm)
                        : Eigen::VectorXcd::Zero(n_real);

    max_mean = std::max(max_mean, std::abs(st.mean));
    max_var = std::max(max_var, std::abs(st.variance - 1));

    const bool free_complex = !sym || m > 0;
    if (free_complex) {
      ++n_complex;
      std::vector<double> ratio(n_real);
      for (std::size_t r = 0; r < n_real; ++r) {
        ratio[r] = std::abs(M(r, c).real() / M(r, c).imag());
      }
      st.median_abs_ratio = median(std::move(ratio));
      max_reim_var = std::max({max_reim_var, std::abs(st.re_variance - 0.5),
                               std::abs(st.im_variance - 0.5)});
      max_reim_corr = std::max(max_reim_corr, std::abs(st.re_im_correlation));
      max_cauchy = std::max(max_cauchy, std::abs(st.median_abs_ratio - 1));
    }
    report.coefficients.push_back(st);
  }

  // Hermitian and pseudo correlation matrices. In symmetric mode (l, m) and
  // (l, -m) are one variable: their Hermitian entry is the pseudo-variance
  // E[Z^2] and their pseudo entry is fixed to (-1)^{l-m}.
  const Eigen::MatrixXcd herm = X.adjoint() * X;
  const Eigen::MatrixXcd pseudo = X.transpose() * X;
  double max_corr = 0, max_pseudo = 0, max_pvar = 0;
  for (int a = 0; a < K; ++a) {
    const auto [la, ma] = index[a];
    for (int b = a; b < K; ++b) {
      const auto [lb, mb] = index[b];
      const bool partner = sym && la == lb && ma == -mb;
      if (partner) {
        max_pseudo = std::max(max_pseudo,
                              std::abs(pseudo(a, b) - double(parity_sign(la - ma))));
        if (a != b) max_pvar = std::max(max_pvar, std::abs(herm(a, b)));
      } else if (a == b) {
        max_pvar = std::max(max_pvar, std::abs(pseudo(a, a)));
      } else {
        max_corr = std::max(max_corr, std::abs(herm(a, b)));
        max_pseudo = std::max(max_pseudo, std::abs(pseudo(a, b)));
      }
    }
  }

  const std::size_t N = n_real;
  report.checks.push_back(make_check("a_mean", max_mean, config.mean_k / root_n, N));
  report.checks.push_back(make_check("b_variance", max_var,
                                     config.variance_k * std::sqrt(2 / n), N));
  report.checks.push_back(make_check("c_correlation", max_corr,
                                     config.correlation_k / root_n, N));
  report.checks.push_back(make_check("c_pseudo_correlation", max_pseudo,
                                     config.correlation_k / root_n, N));
  // |sum X^2| of a unit complex variable has standard error sqrt(2/N).
  report.checks.push_back(make_check("c_pseudo_variance", max_pvar,
                                     config.correlation_k * std::sqrt(2 / n), N));

  if (sym) {
    double residual = 0;
    for (const auto& z : ensemble.realizations) {
      for (int l = l_min; l <= L; ++l) {
        for (int m = -l; m <= l; ++m) {
          residual = std::max(
              residual, std::abs(std::conj(z(l, m)) - double(parity_sign(l - m)) * z(l, -m)));
        }
      }
    }
    report.checks.push_back(make_check("d_conjugation", residual, 0.0, N));
  }

  if (n_complex > 0) {
    report.checks.push_back(make_check("e_re_im_variance", max_reim_var,
                                       config.reim_variance_k * std::sqrt(2 / n), N));
    report.checks.push_back(make_check("e_re_im_correlation", max_reim_corr,
                                       config.correlation_k / root_n, N));
    report.checks.push_back(
        make_check("f_cauchy_median", max_cauchy, config.cauchy_tolerance, N));
  }

  // Pooled margins of independent variables, standardized by their
  // theoretical variance.
  std::vector<double> pooled;
  for (int c = 0; c < K; ++c) {
    const auto [l, m] = index[c];
    if (sym && m < 0) continue;
    for (std::size_t r = 0; r < n_real; ++r) {
      const cdouble z = M(r, c);
      if (sym && m == 0) {
        pooled.push_back(l % 2 == 0 ? z.real() : z.imag());
      } else {
        pooled.push_back(z.real() * std::sqrt(2.0));
        pooled.push_back(z.imag() * std::sqrt(2.0));
      }
    }
  }
  report.checks.push_back(make_check("g_normality", jarque_bera(pooled),
                                     -2 * std::log(config.normality_alpha),
                                     pooled.size()));
  return report;
}

void write_report(std::ostream& os, const DiagnosticsReport& report) {
  os << "# coefficient diagnostics, N = " << report.n_realizations << "\n";
  os << "# l m mean_re mean_im variance re_var im_var re_im_corr median_abs_ratio\n";
  os << std::setprecision(6);
  for (const auto& c : report.coefficients) {
    os << c.l << ' ' << c.m << ' ' << c.mean.real() << ' ' << c.mean.imag() << ' '
       << c.variance << ' ' << c.re_variance << ' ' << c.im_variance << ' '
       << c.re_im_correlation << ' ' << c.median_abs_ratio << "\n";
  }
  os << "# check statistic threshold result sample_size\n";
  for (const auto& c : report.checks) {
    os << c.name << ' ' << c.statistic << ' ' << c.threshold << ' '
       << (c.pass ? "pass" : "fail") << ' ' << c.sample_size << "\n";
  }
}

void write_summary(std::ostream& os, const DiagnosticsReport& report) {
  os << std::setprecision(6);
  for (const auto& c : report.checks) {
    os << c.name << ", " << c.statistic << ", " << c.threshold << ", "
       << (c.pass ? "pass" : "fail") << "\n";
  }
}

}  // namespace sphfield
