#include "sphfield/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sphfield/errors.hpp"

namespace sphfield {

namespace {

class Writer {
 public:
  void magic(std::string_view m) { out_.append(m); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) {
    if (!std::isfinite(v)) throw Error(ErrorKind::domain, "refusing to write a non-finite value");
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  void magic(std::string_view m) {
    need(m.size(), "magic");
    if (bytes_.substr(0, m.size()) != m) {
      throw ParseError("bad magic: expected \"" + std::string(m) + "\"", 0);
    }
    pos_ += m.size();
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= std::uint32_t{static_cast<unsigned char>(bytes_[pos_ + i])} << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::int32_t i32(const char* what) { return static_cast<std::int32_t>(u32(what)); }
  double f64() {
    need(8, "value");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= std::uint64_t{static_cast<unsigned char>(bytes_[pos_ + i])} << (8 * i);
    }
    const double v = std::bit_cast<double>(bits);
    if (!std::isfinite(v)) throw ParseError("non-finite value", pos_);
    pos_ += 8;
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  std::size_t pos() const { return pos_; }
  void finish() const {
    if (pos_ != bytes_.size()) throw ParseError("trailing bytes after payload", pos_);
  }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw ParseError(std::string("truncated input while reading ") + what,
                       bytes_.size());
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

void require_payload(const Reader& r, std::uint64_t count) {
  if (r.remaining() != count * 16) {
    const bool truncated = r.remaining() < count * 16;
    throw ParseError(truncated ? "truncated payload" : "trailing bytes after payload",
                     truncated ? r.pos() + r.remaining() : r.pos() + count * 16);
  }
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string line_error(std::size_t line, const std::string& what) {
  return "line " + std::to_string(line) + ": " + what;
}

}  // namespace

std::string encode_map(const SpinMap& map) {
  require(map.values.rows() == map.grid.n_theta && map.values.cols() == map.grid.n_phi,
          ErrorKind::consistency, "map values do not match the grid");
  Writer w;
  w.magic("SFM1");
  w.u32(static_cast<std::uint32_t>(map.grid.n_theta));
  w.u32(static_cast<std::uint32_t>(map.grid.n_phi));
  w.i32(map.spin);
  for (int j = 0; j < map.grid.n_theta; ++j) {
    for (int k = 0; k < map.grid.n_phi; ++k) {
      w.f64(map.values(j, k).real());
      w.f64(map.values(j, k).imag());
    }
  }
  return w.take();
}

SpinMap decode_map(std::string_view bytes) {
  Reader r(bytes);
  r.magic("SFM1");
  const std::uint32_t nt = r.u32("n_theta");
  const std::uint32_t np = r.u32("n_phi");
  const std::int32_t spin = r.i32("spin");
  if (nt == 0 || np == 0 || nt > (1u << 20) || np > (1u << 21)) {
    throw ParseError("implausible grid dimensions", 4);
  }
  require_payload(r, std::uint64_t{nt} * np);
  SpinMap map(make_grid(static_cast<int>(nt), static_cast<int>(np)), spin);
  for (std::uint32_t j = 0; j < nt; ++j) {
    for (std::uint32_t k = 0; k < np; ++k) {
      const double re = r.f64();
      const double im = r.f64();
      map.values(j, k) = cdouble(re, im);
    }
  }
  r.finish();
  return map;
}

std::string encode_coefficients(const TriangularCoefficients& coeffs) {
  coeffs.validate();
  Writer w;
  w.magic("SFC1");
  w.u32(static_cast<std::uint32_t>(coeffs.l_max()));
  w.i32(coeffs.spin());
  for (const auto& v : coeffs.values()) {
    w.f64(v.real());
    w.f64(v.imag());
  }
  return w.take();
}

TriangularCoefficients decode_coefficients(std::string_view bytes) {
  Reader r(bytes);
  r.magic("SFC1");
  const std::uint32_t l_max = r.u32("l_max");
  const std::int32_t spin = r.i32("spin");
  if (l_max > (1u << 16)) throw ParseError("implausible l_max", 4);
  if (spin < -1000 || spin > 1000) throw ParseError("implausible spin", 8);
  const std::uint64_t count = std::uint64_t{l_max + 1} * (l_max + 1);
  require_payload(r, count);
  TriangularCoefficients coeffs(static_cast<int>(l_max), spin);
  const int zeros = std::min<int>(std::abs(spin), static_cast<int>(l_max) + 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t at = r.pos();
    const double re = r.f64();
    const double im = r.f64();
    if (static_cast<int>(i) < zeros * zeros && (re != 0 || im != 0)) {
      throw ParseError("nonzero coefficient below |spin|", at);
    }
    coeffs.values()[static_cast<Eigen::Index>(i)] = cdouble(re, im);
  }
  r.finish();
  return coeffs;
}

PowerSpectrum parse_spectrum(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  bool have_header = false;
  int spin = 0, l_max = -1;
  Eigen::VectorXd c;
  std::vector<bool> seen;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (!have_header) {
      int s = 0, L = 0;
      char tail = 0;
      if (std::sscanf(line.c_str(), "# spin %d , lmax %d %c", &s, &L, &tail) != 2) {
        throw ParseError(line_error(line_no, "expected header \"# spin s, lmax L\""),
                         line_no);
      }
      if (L < 0) throw ParseError(line_error(line_no, "negative lmax"), line_no);
      if (L > (1 << 16)) throw ParseError(line_error(line_no, "implausible lmax"), line_no);
      spin = s;
      l_max = L;
      c = Eigen::VectorXd::Zero(L + 1);
      seen.assign(L + 1, false);
      have_header = true;
      continue;
    }
    if (line.front() == '#') continue;

    std::istringstream fields(line);
    long long l = 0;
    std::string value_text, extra;
    if (!(fields >> l >> value_text) || (fields >> extra)) {
      throw ParseError(line_error(line_no, "expected \"l c_l\""), line_no);
    }
    double value = 0;
    const char* first = value_text.data();
    const char* last = first + value_text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
      throw ParseError(line_error(line_no, "malformed c_l \"" + value_text + "\""),
                       line_no);
    }
    if (l < 0 || l > l_max) {
      throw ParseError(line_error(line_no, "degree " + std::to_string(l) +
                                               " outside [0, lmax]"),
                       line_no);
    }
    if (!std::isfinite(value)) {
      throw ParseError(line_error(line_no, "non-finite c_l"), line_no);
    }
    if (value < 0) {
      throw ParseError(line_error(line_no, "negative c_l"), line_no);
    }
    if (l < std::abs(spin) && value != 0) {
      throw ParseError(line_error(line_no, "c_l must be 0 for l < |spin|"), line_no);
    }
    if (seen[l]) {
      throw ParseError(line_error(line_no, "duplicate degree " + std::to_string(l)),
                       line_no);
    }
    seen[l] = true;
    c[l] = value;
  }
  if (!have_header) throw ParseError("missing header \"# spin s, lmax L\"", line_no);
  for (int l = 0; l <= l_max; ++l) {
    if (!seen[l]) {
      throw ParseError("missing degree " + std::to_string(l) + " (end of input, line " +
                           std::to_string(line_no) + ")",
                       line_no);
    }
  }
  return PowerSpectrum(spin, std::move(c));
}

std::string format_spectrum(const PowerSpectrum& spectrum,
                            const std::vector<std::string>& comments) {
  std::ostringstream os;
  os << "# spin " << spectrum.spin << ", lmax " << spectrum.l_max() << "\n";
  for (const auto& c : comments) os << "# " << c << "\n";
  os << std::setprecision(17);
  for (int l = 0; l <= spectrum.l_max(); ++l) os << l << ' ' << spectrum.c_l[l] << "\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::io, "read failed: " + path);
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view bytes) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path() && !fs::is_directory(target.parent_path())) {
    throw Error(ErrorKind::io, "directory does not exist: " +
                                   target.parent_path().string());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorKind::io, "write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::io, "cannot rename into " + path);
  }
}

}  // namespace sphfield
