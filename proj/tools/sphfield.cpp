#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "sphfield/acceptance.hpp"
#include "sphfield/errors.hpp"
#include "sphfield/estimate.hpp"
#include "sphfield/fields.hpp"
#include "sphfield/io.hpp"
#include "sphfield/rodrigues.hpp"
#include "sphfield/wigner.hpp"

using namespace sphfield;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitParse = 3;
constexpr int kExitResolution = 4;
constexpr int kExitVerification = 5;

struct Options {
  int lmax = -1;
  int spin = 0;
  std::uint64_t seed = 1;
  std::string spectrum;
  std::string in;
  std::string out;
  std::string coef_out;
  std::string grid;
  std::string generator = "gaussian";
  std::string symmetry = "conj";
  int n_realizations = 2000;
  std::uint32_t realization = 0;
  int threads = 0;
  int n_angles = 19;
  bool diagnostics = false;
  std::string summary;
  std::vector<int> only;
  // wigner
  int l = 0, m = 0, n = 0;
  double theta = 0;
  std::string method = "recursion";
};

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse: return kExitParse;
    case ErrorKind::resolution: return kExitResolution;
    case ErrorKind::verification: return kExitVerification;
    default: return kExitConfig;
  }
}

void require_input(const std::string& path, const char* flag) {
  if (path.empty()) throw Error(ErrorKind::config, std::string(flag) + " is required");
  if (!std::filesystem::is_regular_file(path)) {
    throw Error(ErrorKind::io, "input file not found: " + path);
  }
}

void require_output(const std::string& path, const char* flag) {
  if (path.empty()) throw Error(ErrorKind::config, std::string(flag) + " is required");
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw Error(ErrorKind::io, "output directory does not exist: " + parent.string());
  }
}

Generator parse_generator(const std::string& s) {
  if (s == "gaussian") return Generator::gaussian;
  if (s == "fixed-modulus") return Generator::fixed_modulus;
  throw Error(ErrorKind::config, "unknown generator " + s);
}

Symmetry parse_symmetry(const std::string& s) {
  if (s == "conj") return Symmetry::conjugate_symmetric;
  if (s == "free") return Symmetry::unconstrained_complex;
  throw Error(ErrorKind::config, "unknown symmetry " + s);
}

SphereGrid parse_grid(const std::string& text, int lmax) {
  if (text.empty()) return build_grid(lmax);
  int nt = 0, np = 0;
  char x = 0, tail = 0;
  if (std::sscanf(text.c_str(), "%d%c%d%c", &nt, &x, &np, &tail) != 3 ||
      (x != 'x' && x != 'X') || nt <= 0 || np <= 0) {
    throw Error(ErrorKind::config, "--grid expects NTHETAxNPHI, got " + text);
  }
  return make_grid(nt, np);
}

void require_resolution(const SphereGrid& grid, int lmax) {
  if (grid.n_theta < lmax + 1 || grid.n_phi < 2 * lmax + 1) {
    throw Error(ErrorKind::resolution,
                "grid " + std::to_string(grid.n_theta) + "x" +
                    std::to_string(grid.n_phi) + " cannot resolve lmax " +
                    std::to_string(lmax));
  }
}

PowerSpectrum load_spectrum(const Options& o) {
  if (!o.spectrum.empty()) {
    require_input(o.spectrum, "--spectrum");
    PowerSpectrum s = read_spectrum(o.spectrum);
    if (o.lmax >= 0 && o.lmax != s.l_max()) {
      throw Error(ErrorKind::config, "--lmax disagrees with the spectrum file");
    }
    return s;
  }
  if (o.lmax < 0) throw Error(ErrorKind::config, "--lmax or --spectrum is required");
  return PowerSpectrum::flat(o.lmax, o.spin);
}

std::string header(const char* command, int lmax, int spin, std::uint64_t seed) {
  std::ostringstream os;
  os << "sphfield " << command << ", format 1, lmax " << lmax << ", spin " << spin
     << ", seed " << seed;
  return os.str();
}

int run_synth(const Options& o) {
  require_output(o.out, "--out");
  const std::string coef_out = o.coef_out.empty() ? o.out + ".sfc" : o.coef_out;
  require_output(coef_out, "--coef-out");
  FieldModel model;
  model.spectrum = load_spectrum(o);
  model.seed = o.seed;
  model.generator = parse_generator(o.generator);
  model.symmetry = parse_symmetry(o.symmetry);
  const int lmax = model.spectrum.l_max();
  const SphereGrid grid = parse_grid(o.grid, lmax);
  require_resolution(grid, lmax);

  const auto a = sample_coefficients(model, o.realization);
  const auto map = synthesize(a, grid, Parallelism{o.threads});
  write_map(o.out, map);
  write_coefficients(coef_out, a);
  std::cout << "# " << header("synth", lmax, model.spectrum.spin, o.seed)
            << ", realization " << o.realization << ", generator " << o.generator
            << ", symmetry " << o.symmetry << "\n"
            << "map " << o.out << " (SFM1 " << grid.n_theta << "x" << grid.n_phi
            << ")\ncoefficients " << coef_out << " (SFC1)\n";
  return kExitOk;
}

int run_analyze(const Options& o) {
  require_input(o.in, "--in");
  require_output(o.out, "--out");
  const SpinMap map = read_map(o.in);
  const int lmax = o.lmax >= 0 ? o.lmax : map.grid.max_band_limit();
  const auto a = analyze(map, lmax, Parallelism{o.threads});
  write_coefficients(o.out, a);
  std::cout << "# sphfield analyze, format 1, lmax " << lmax << ", spin " << map.spin
            << "\ncoefficients " << o.out << " (SFC1)\n";
  return kExitOk;
}

int run_spectrum(const Options& o) {
  require_input(o.in, "--in");
  require_output(o.out, "--out");
  const auto a = read_coefficients(o.in);
  const auto est = estimate_cl(a);
  const PowerSpectrum s(est.spin, est.c_hat);
  write_file_atomic(o.out, format_spectrum(s, {"sphfield spectrum, format 1, c_hat_l from " + o.in}));
  return kExitOk;
}

int run_cov(const Options& o) {
  const PowerSpectrum spectrum = load_spectrum(o);
  if (o.n_angles < 2) throw Error(ErrorKind::config, "--n-angles must be >= 2");
  std::ostringstream os;
  os << "# " << header("cov", spectrum.l_max(), spectrum.spin, o.seed) << "\n"
     << "# R(g12) at g12 = (0, theta, 0) in ZXZ; columns: theta re im\n";
  char buf[128];
  for (int i = 0; i < o.n_angles; ++i) {
    const double theta = std::numbers::pi * i / (o.n_angles - 1);
    const cdouble r = covariance_series(spectrum, EulerAnglesd(0, theta, 0));
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", theta, r.real(), r.imag());
    os << buf;
  }
  if (o.out.empty()) {
    std::cout << os.str();
  } else {
    require_output(o.out, "--out");
    write_file_atomic(o.out, os.str());
  }
  return kExitOk;
}

int run_diagnostics(const Options& o) {
  FieldModel model;
  model.spectrum = load_spectrum(o);
  model.seed = o.seed;
  model.generator = parse_generator(o.generator);
  model.symmetry = parse_symmetry(o.symmetry);
  if (o.n_realizations < 1) throw Error(ErrorKind::config, "--n-realizations must be positive");
  std::vector<TriangularCoefficients> a;
  for (int r = 0; r < o.n_realizations; ++r) {
    a.push_back(sample_coefficients(model, static_cast<std::uint32_t>(r)));
  }
  DiagnosticsConfig config;
  config.conjugate_symmetric = model.symmetry == Symmetry::conjugate_symmetric;
  const auto report = coefficient_diagnostics(
      CoefficientEnsemble::from_coefficients(model.spectrum, a), config);

  std::ostringstream text;
  text << "# " << header("verify --diagnostics", model.spectrum.l_max(),
                         model.spectrum.spin, o.seed)
       << ", generator " << o.generator << ", symmetry " << o.symmetry << "\n";
  write_report(text, report);
  if (o.out.empty()) {
    std::cout << text.str();
  } else {
    require_output(o.out, "--out");
    write_file_atomic(o.out, text.str());
  }
  std::ostringstream summary;
  write_summary(summary, report);
  if (!o.summary.empty()) {
    require_output(o.summary, "--summary");
    write_file_atomic(o.summary, summary.str());
  }
  std::cout << summary.str();
  return report.all_passed() ? kExitOk : kExitVerification;
}

int run_verify(const Options& o) {
  if (o.diagnostics) return run_diagnostics(o);
  AcceptanceOptions opts;
  opts.seed = o.seed;
  opts.max_workers = o.threads;
  opts.only = o.only;
  opts.log = &std::cout;
  std::cout << "# sphfield verify, seed " << o.seed << "\n";
  const auto results = run_acceptance(opts);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? kExitOk : kExitVerification;
}

int run_wigner(const Options& o) {
  if (!(o.theta >= 0 && o.theta <= std::numbers::pi)) {
    throw Error(ErrorKind::domain, "--theta must lie in [0, pi]");
  }
  double value = 0;
  if (o.method == "recursion") {
    value = wigner_d<double>({o.l, o.m, o.n}, o.theta);
  } else if (o.method == "rodrigues") {
    value = rodrigues_d({o.l, o.m, o.n}, o.theta);
  } else {
    throw Error(ErrorKind::config, "unknown method " + o.method);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", value);
  std::cout << buf << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin-weighted spherical random fields"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--threads", o.threads, "worker threads (0 = all cores)")
        ->check(CLI::NonNegativeNumber);
  };
  auto model_flags = [&](CLI::App* sub) {
    sub->add_option("--lmax", o.lmax, "band limit");
    sub->add_option("--spin", o.spin, "spin weight")->check(CLI::Range(-2, 2));
    sub->add_option("--seed", o.seed, "64-bit seed (default 1)");
    sub->add_option("--spectrum", o.spectrum, "spectrum text file");
    sub->add_option("--generator", o.generator, "gaussian|fixed-modulus");
    sub->add_option("--symmetry", o.symmetry, "conj|free");
  };

  auto* synth = app.add_subcommand("synth", "sample coefficients and synthesize a map");
  model_flags(synth);
  common(synth);
  synth->add_option("--out", o.out, "map file (SFM1)");
  synth->add_option("--coef-out", o.coef_out, "coefficient file (default <out>.sfc)");
  synth->add_option("--grid", o.grid, "NTHETAxNPHI");
  synth->add_option("--realization", o.realization, "realization index");

  auto* analyze_cmd = app.add_subcommand("analyze", "map to coefficients");
  common(analyze_cmd);
  analyze_cmd->add_option("--in", o.in, "map file (SFM1)");
  analyze_cmd->add_option("--out", o.out, "coefficient file (SFC1)");
  analyze_cmd->add_option("--lmax", o.lmax, "band limit (default: grid maximum)");

  auto* spectrum = app.add_subcommand("spectrum", "coefficients to C_hat_l text");
  spectrum->add_option("--in", o.in, "coefficient file (SFC1)");
  spectrum->add_option("--out", o.out, "spectrum text file");

  auto* cov = app.add_subcommand("cov", "covariance series over an angle grid");
  model_flags(cov);
  cov->add_option("--n-angles", o.n_angles, "number of angles in [0, pi]");
  cov->add_option("--out", o.out, "output text file (default stdout)");

  auto* verify = app.add_subcommand("verify", "acceptance suite or ensemble diagnostics");
  model_flags(verify);
  common(verify);
  verify->add_flag("--diagnostics", o.diagnostics, "run coefficient diagnostics only");
  verify->add_option("--n-realizations", o.n_realizations, "ensemble size");
  verify->add_option("--out", o.out, "diagnostics report file");
  verify->add_option("--summary", o.summary, "diagnostics summary file");
  verify->add_option("--only", o.only, "criteria to run");

  auto* wigner = app.add_subcommand("wigner", "print one d^l_mn(theta)");
  wigner->add_option("--l", o.l)->required();
  wigner->add_option("--m", o.m)->required();
  wigner->add_option("--n", o.n)->required();
  wigner->add_option("--theta", o.theta)->required();
  wigner->add_option("--method", o.method, "recursion|rodrigues");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (synth->parsed()) return run_synth(o);
    if (analyze_cmd->parsed()) return run_analyze(o);
    if (spectrum->parsed()) return run_spectrum(o);
    if (cov->parsed()) return run_cov(o);
    if (verify->parsed()) return run_verify(o);
    if (wigner->parsed()) return run_wigner(o);
  } catch (const ParseError& e) {
    std::cerr << "parse error (offset " << e.offset() << "): " << e.what() << "\n";
    return kExitParse;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
