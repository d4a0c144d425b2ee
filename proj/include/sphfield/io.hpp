#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sphfield/fields.hpp"
#include "sphfield/harmonics.hpp"

namespace sphfield {

// SFM1: "SFM1", u32 n_theta, u32 n_phi, i32 spin, n_theta*n_phi (f64 re, f64 im)
// SFC1: "SFC1", u32 l_max, i32 spin, (l_max+1)^2 (f64 re, f64 im)
// All little-endian. Non-finite values are rejected in both directions.

std::string encode_map(const SpinMap& map);
SpinMap decode_map(std::string_view bytes);

std::string encode_coefficients(const TriangularCoefficients& coeffs);
TriangularCoefficients decode_coefficients(std::string_view bytes);

/// Text spectrum: header "# spin s, lmax L", then one "l c_l" line per degree.
/// Extra '#' lines are ignored. Errors carry 1-based line numbers.
PowerSpectrum parse_spectrum(std::string_view text);
std::string format_spectrum(const PowerSpectrum& spectrum,
                            const std::vector<std::string>& comments = {});

std::string read_file(const std::string& path);

/// Writes to a temporary sibling and renames it over path.
void write_file_atomic(const std::string& path, std::string_view bytes);

inline SpinMap read_map(const std::string& path) { return decode_map(read_file(path)); }
inline void write_map(const std::string& path, const SpinMap& map) {
  write_file_atomic(path, encode_map(map));
}
inline TriangularCoefficients read_coefficients(const std::string& path) {
  return decode_coefficients(read_file(path));
}
inline void write_coefficients(const std::string& path,
                               const TriangularCoefficients& coeffs) {
  write_file_atomic(path, encode_coefficients(coeffs));
}
inline PowerSpectrum read_spectrum(const std::string& path) {
  return parse_spectrum(read_file(path));
}

}  // namespace sphfield
