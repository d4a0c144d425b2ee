#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sphfield/fields.hpp"
#include "sphfield/harmonics.hpp"

namespace sphfield {

struct SpectrumEstimate {
  int spin = 0;
  Eigen::VectorXd c_hat;  // index l
  int n_realizations = 0;

  int l_max() const { return static_cast<int>(c_hat.size()) - 1; }
};

/// C_hat_l = (1/(2l+1)) sum_m |a_lm|^2.
SpectrumEstimate estimate_cl(const TriangularCoefficients& coeffs);

/// Ensemble mean of the per-realization estimates.
SpectrumEstimate estimate_cl(std::span<const TriangularCoefficients> ensemble);

struct GridPoint {
  int j = 0;  // theta row
  int k = 0;  // phi column
};

/// Node index of t; throws an index error if t is not a grid node.
GridPoint locate(const SphereGrid& grid, const SpherePointd& t,
                 double tolerance = 1e-12);

struct CovarianceEstimate {
  cdouble value;
  double standard_error = 0;  // of the sample mean, complex magnitude
};

/// Sample mean of X(t1) conj(X(t2)) over the ensemble, per point pair.
std::vector<CovarianceEstimate> empirical_covariance(
    std::span<const SpinMap> maps,
    std::span<const std::pair<SpherePointd, SpherePointd>> pairs);

/// Realizations of the unit variables Z_lm (a_lm = F_l Z_lm).
struct CoefficientEnsemble {
  int l_max = 0;
  int spin = 0;
  std::vector<TriangularCoefficients> realizations;

  std::size_t size() const { return realizations.size(); }
  void push_back(TriangularCoefficients z);

  /// Recovers Z_lm = a_lm / F_l; degrees with c_l = 0 stay zero.
  static CoefficientEnsemble from_coefficients(
      const PowerSpectrum& spectrum, std::span<const TriangularCoefficients> a);
};

struct DiagnosticsConfig {
  double mean_k = 4;          // (a) |mean| <= k / sqrt(N)
  double variance_k = 4;      // (b) |var - 1| <= k sqrt(2/N)
  double correlation_k = 4;   // (c) |corr| <= k / sqrt(N)
  double reim_variance_k = 2; // (e) |var - 1/2| <= k sqrt(2/N)
  double cauchy_tolerance = 0.15;
  double normality_alpha = 1e-4;
  bool conjugate_symmetric = true;
  std::size_t min_realizations = 100;
};

struct CoefficientStats {
  int l = 0;
  int m = 0;
  cdouble mean;
  double variance = 0;
  double re_variance = 0;
  double im_variance = 0;
  double re_im_correlation = 0;
  double median_abs_ratio = 0;
};

struct CheckResult {
  std::string name;
  double statistic = 0;
  double threshold = 0;
  bool pass = false;
  std::size_t sample_size = 0;
};

struct DiagnosticsReport {
  std::size_t n_realizations = 0;
  std::vector<CoefficientStats> coefficients;
  std::vector<CheckResult> checks;

  const CheckResult& check(const std::string& name) const;
  bool passed(const std::string& name) const { return check(name).pass; }
  bool all_passed() const;
};

DiagnosticsReport coefficient_diagnostics(const CoefficientEnsemble& ensemble,
                                          const DiagnosticsConfig& config = {});

/// Human-readable report with per-coefficient statistics.
void write_report(std::ostream& os, const DiagnosticsReport& report);

/// One "name, statistic, threshold, pass|fail" line per check.
void write_summary(std::ostream& os, const DiagnosticsReport& report);

/// Jarque-Bera statistic n/6 (S^2 + (K-3)^2/4) of a sample.
double jarque_bera(std::span<const double> x);

}  // namespace sphfield
