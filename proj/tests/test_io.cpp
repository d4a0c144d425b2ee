#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "sphfield/io.hpp"

using namespace sphfield;

namespace {

TriangularCoefficients random_coefficients(int l_max, int spin) {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  TriangularCoefficients a(l_max, spin);
  for (int l = std::abs(spin); l <= l_max; ++l) {
    for (int m = -l; m <= l; ++m) a.set(l, m, {normal(rng), normal(rng)});
  }
  return a;
}

template <typename F>
std::size_t parse_offset(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected a parse error");
  return 0;
}

}  // namespace

TEST_CASE("coefficient files round trip bit-exactly") {
  const auto a = random_coefficients(7, -2);
  const std::string bytes = encode_coefficients(a);
  CHECK(bytes.size() == 12 + 64 * 16);
  CHECK(bytes.substr(0, 4) == "SFC1");
  const auto b = decode_coefficients(bytes);
  CHECK(b.l_max() == 7);
  CHECK(b.spin() == -2);
  CHECK(std::memcmp(a.values().data(), b.values().data(), 64 * sizeof(cdouble)) == 0);
  CHECK(encode_coefficients(b) == bytes);
}

TEST_CASE("map files round trip bit-exactly") {
  const auto grid = make_grid(5, 9);
  SpinMap map(grid, 1);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (int i = 0; i < map.values.size(); ++i) map.values.data()[i] = {normal(rng), normal(rng)};
  const std::string bytes = encode_map(map);
  CHECK(bytes.size() == 16 + 45 * 16);
  const auto back = decode_map(bytes);
  CHECK(back.grid.n_theta == 5);
  CHECK(back.grid.n_phi == 9);
  CHECK(back.spin == 1);
  CHECK(back.values == map.values);
  // Header fields are little-endian.
  CHECK(static_cast<unsigned char>(bytes[4]) == 5);
  CHECK(static_cast<unsigned char>(bytes[8]) == 9);
}

TEST_CASE("malformed binary input") {
  const std::string good = encode_coefficients(random_coefficients(3, 0));
  std::string bad = good;
  bad[0] = 'X';
  CHECK(parse_offset([&] { decode_coefficients(bad); }) == 0);
  CHECK(parse_offset([&] { decode_map(good); }) == 0);
  CHECK(parse_offset([&] { decode_coefficients(good.substr(0, 6)); }) == 6);
  CHECK(parse_offset([&] { decode_coefficients(good.substr(0, good.size() - 3)); }) ==
        good.size() - 3);
  CHECK(parse_offset([&] { decode_coefficients(good + "x"); }) == good.size());

  std::string nan = good;
  const auto bits = std::bit_cast<std::uint64_t>(std::numeric_limits<double>::quiet_NaN());
  for (int i = 0; i < 8; ++i) nan[12 + 16 * 2 + i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  CHECK(parse_offset([&] { decode_coefficients(nan); }) == 12 + 16 * 2);

  std::string spin_zero = encode_coefficients(random_coefficients(3, 2));
  spin_zero[12] = 1;  // first byte of a_00
  CHECK(parse_offset([&] { decode_coefficients(spin_zero); }) == 12);

  TriangularCoefficients inf(2, 0);
  inf.values()[1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(encode_coefficients(inf), Error);
}

TEST_CASE("spectrum text") {
  const auto s = parse_spectrum("# spin 2, lmax 3\n0 0\n1 0\n2 1.5\n# note\n3 0.25\n");
  CHECK(s.spin == 2);
  CHECK(s.l_max() == 3);
  CHECK(s.c_l[2] == 1.5);
  CHECK(s.c_l[3] == 0.25);
  const auto again = parse_spectrum(format_spectrum(s, {"seed 1"}));
  CHECK(again.c_l == s.c_l);

  CHECK(parse_offset([] { parse_spectrum("# spin 0, lmax 2\n0 1\n1 -2\n2 1\n"); }) == 3);
  CHECK(parse_offset([] { parse_spectrum("0 1\n"); }) == 1);
  CHECK(parse_offset([] { parse_spectrum("# spin 0, lmax 1\n0 1\n0 1\n"); }) == 3);
  CHECK(parse_offset([] { parse_spectrum("# spin 0, lmax 1\n0 1\n1 abc\n"); }) == 3);
  CHECK(parse_offset([] { parse_spectrum("# spin 2, lmax 2\n0 1\n1 0\n2 1\n"); }) == 2);
  CHECK(parse_offset([] { parse_spectrum("# spin 0, lmax 2\n0 1\n1 1\n"); }) == 3);
  CHECK(parse_offset([] { parse_spectrum("# spin 0, lmax 1\n0 1\n5 1\n"); }) == 3);
  try {
    parse_spectrum("# spin 0, lmax 2\n0 1\n1 -2\n2 1\n");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("atomic file writes") {
  const auto dir = std::filesystem::temp_directory_path() / "sphfield_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "a.sfc").string();
  const auto a = random_coefficients(4, 1);
  write_coefficients(path, a);
  CHECK(read_coefficients(path).values() == a.values());
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  CHECK_THROWS_AS(read_file((dir / "missing").string()), Error);
  CHECK_THROWS_AS(write_file_atomic((dir / "no" / "such" / "x").string(), "x"), Error);
  std::filesystem::remove_all(dir);
}
