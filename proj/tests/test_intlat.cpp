#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "fgc/intlat.hpp"

using namespace fgc::lat;

namespace {

// brute-force reference: every box vector in the kernel and nothing else
Mat box_kernel_reference(const Mat& rows, long long bound) {
  Mat out;
  const size_t n = rows.size();
  Vec k(n, -bound);
  for (;;) {
    Vec img = mat_apply_left(k, rows);
    bool zero = true;
    for (long long x : img) zero &= (x == 0);
    bool allzero = true;
    for (long long x : k) allzero &= (x == 0);
    if (zero && !allzero) out.push_back(k);
    size_t i = 0;
    for (; i < n; ++i) {
      if (k[i] < bound) { ++k[i]; break; }
      k[i] = -bound;
    }
    if (i == n) break;
  }
  return out;
}

}  // namespace

TEST_CASE("left kernel of small integer matrices") {
  SECTION("free basis has zero kernel") {
    Mat rows = {{1, 0}, {0, 1}};
    REQUIRE(left_kernel(rows).empty());
  }
  SECTION("kernel of (1, 2) in Z") {
    Mat rows = {{1}, {2}};
    auto k = left_kernel(rows);
    REQUIRE(k.size() == 1);
    REQUIRE(lattice_equal(k, {{2, -1}}));
  }
  SECTION("kernel of (2, 3) in Z") {
    auto k = left_kernel({{2}, {3}});
    REQUIRE(lattice_equal(k, {{3, -2}}));
  }
  SECTION("every box kernel vector is spanned, and every basis vector kills the rows") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      size_t n = 1 + rng() % 4, m = 1 + rng() % 2;
      Mat rows(n, Vec(m));
      for (auto& r : rows)
        for (auto& x : r) x = (long long)(rng() % 9) - 4;
      auto basis = left_kernel(rows);
      for (const auto& v : basis) {
        Vec img = mat_apply_left(v, rows);
        for (long long x : img) REQUIRE(x == 0);
      }
      for (const auto& v : box_kernel_reference(rows, 3)) REQUIRE(lattice_member(basis, v));
    }
  }
}

TEST_CASE("hermite basis is canonical") {
  Mat a = {{2, 0}, {0, 3}};
  Mat b = {{2, 3}, {2, 0}, {4, 3}};
  REQUIRE(lattice_equal(a, b));
  REQUIRE_FALSE(lattice_equal(a, Mat{{1, 0}, {0, 3}}));
  REQUIRE(lattice_subset(Mat{{4, 0}}, a));
  REQUIRE_FALSE(lattice_subset(Mat{{1, 0}}, a));
}

TEST_CASE("smith normal form invariants") {
  std::mt19937_64 rng(11);
  auto det2 = [](const Mat& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; };
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = 2, m = 2 + rng() % 2;
    Mat a(n, Vec(m));
    for (auto& r : a)
      for (auto& x : r) x = (long long)(rng() % 11) - 5;
    auto s = smith_normal_form(a);
    REQUIRE(std::abs(det2(s.u)) == 1);
    // d = u * a * v
    Mat ua(n, Vec(m, 0));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < m; ++j)
        for (size_t t = 0; t < n; ++t) ua[i][j] += s.u[i][t] * a[t][j];
    Mat uav(n, Vec(m, 0));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < m; ++j)
        for (size_t t = 0; t < m; ++t) uav[i][j] += ua[i][t] * s.v[t][j];
    REQUIRE(uav == s.d);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < m; ++j)
        if (i != j) REQUIRE(s.d[i][j] == 0);
    // divisibility chain
    for (size_t i = 0; i + 1 < std::min(n, m); ++i)
      if (s.d[i][i] != 0 && s.d[i + 1][i + 1] != 0) REQUIRE(s.d[i + 1][i + 1] % s.d[i][i] == 0);
  }
}

TEST_CASE("separating characters") {
  SECTION("against the zero lattice") {
    auto phi = separating_character({}, {3, 0});
    Rat val(0);
    Vec v{3, 0};
    for (size_t i = 0; i < v.size(); ++i) val = val + v[i] * phi[i];
    REQUIRE_FALSE(val.is_integer());
  }
  SECTION("integral on the lattice, fractional on the witness") {
    Mat gens = {{2, 0}, {0, 3}};
    Vec v = {1, 0};
    auto phi = separating_character(gens, v);
    for (const auto& g : gens) {
      Rat val(0);
      for (size_t i = 0; i < g.size(); ++i) val = val + g[i] * phi[i];
      REQUIRE(val.is_integer());
    }
    Rat val(0);
    for (size_t i = 0; i < v.size(); ++i) val = val + v[i] * phi[i];
    REQUIRE_FALSE(val.is_integer());
  }
  SECTION("member vectors are rejected") {
    REQUIRE_THROWS_AS(separating_character({{2, 0}}, {4, 0}), std::invalid_argument);
  }
  SECTION("randomized: characters separate box vectors outside the lattice") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
      size_t n = 2 + rng() % 2;
      Mat gens(1 + rng() % 2, Vec(n));
      for (auto& r : gens)
        for (auto& x : r) x = (long long)(rng() % 7) - 3;
      gens = hermite_basis(gens);
      Vec v(n);
      for (auto& x : v) x = (long long)(rng() % 7) - 3;
      if (lattice_member(gens, v)) continue;
      auto phi = separating_character(gens, v);
      for (const auto& g : gens) {
        Rat val(0);
        for (size_t i = 0; i < n; ++i) val = val + g[i] * phi[i];
        REQUIRE(val.is_integer());
      }
      Rat val(0);
      for (size_t i = 0; i < n; ++i) val = val + v[i] * phi[i];
      REQUIRE_FALSE(val.is_integer());
    }
  }
}
