#pragma once

#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fgc::lat {

using Vec = std::vector<long long>;
using Mat = std::vector<Vec>;  // row-major

inline long long dot(const Vec& a, const Vec& b) {
  long long s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline Vec mat_apply_left(const Vec& k, const Mat& rows) {
  // k * rows : combination of the rows with coefficients k.
  Vec out(rows.empty() ? 0 : rows[0].size(), 0);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < out.size(); ++j) out[j] += k[i] * rows[i][j];
  return out;
}

namespace detail {

// Unimodular row combination: make m[r2][col] zero using m[r1][col],
// replacing the two rows by Bezout combinations.
inline void row_gcd_step(Mat& m, size_t r1, size_t r2, size_t col) {
  long long a = m[r1][col], b = m[r2][col];
  if (b == 0) return;
  if (a == 0) {
    std::swap(m[r1], m[r2]);
    return;
  }
  long long old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    long long q = old_r / r;
    old_r -= q * r; std::swap(old_r, r);
    old_s -= q * s; std::swap(old_s, s);
    old_t -= q * t; std::swap(old_t, t);
  }
  long long g = old_r, x = old_s, y = old_t;  // x*a + y*b == g
  Vec n1(m[r1].size()), n2(m[r1].size());
  for (size_t j = 0; j < m[r1].size(); ++j) {
    n1[j] = x * m[r1][j] + y * m[r2][j];
    n2[j] = -(b / g) * m[r1][j] + (a / g) * m[r2][j];
  }
  m[r1] = std::move(n1);
  m[r2] = std::move(n2);
}

}  // namespace detail

/// Row-style Hermite normal form of the lattice spanned by the given rows:
/// echelon, positive pivots, entries above a pivot reduced into [0, pivot).
/// Zero rows are dropped, so the result is a canonical basis of the lattice.
inline Mat hermite_basis(Mat rows) {
  if (rows.empty()) return rows;
  const size_t ncols = rows[0].size();
  size_t r = 0;
  for (size_t c = 0; c < ncols && r < rows.size(); ++c) {
    for (size_t i = r + 1; i < rows.size(); ++i) detail::row_gcd_step(rows, r, i, c);
    if (rows[r][c] == 0) continue;
    if (rows[r][c] < 0)
      for (auto& x : rows[r]) x = -x;
    for (size_t i = 0; i < r; ++i) {
      long long q = rows[i][c] / rows[r][c];
      if (rows[i][c] % rows[r][c] < 0) --q;
      if (q != 0)
        for (size_t j = 0; j < ncols; ++j) rows[i][j] -= q * rows[r][j];
    }
    ++r;
  }
  rows.resize(r);
  return rows;
}

/// Basis of the left kernel {k : k * rows == 0} of an n x m integer matrix.
inline Mat left_kernel(const Mat& rows) {
  const size_t n = rows.size();
  if (n == 0) return {};
  const size_t m = rows[0].size();
  Mat aug(n, Vec(m + n, 0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) aug[i][j] = rows[i][j];
    aug[i][m + i] = 1;
  }
  size_t r = 0;
  for (size_t c = 0; c < m && r < n; ++c) {
    for (size_t i = r + 1; i < n; ++i) detail::row_gcd_step(aug, r, i, c);
    if (aug[r][c] != 0) ++r;
  }
  Mat kernel;
  for (size_t i = r; i < n; ++i) {
    bool zero = true;
    for (size_t j = 0; j < m; ++j) zero &= (aug[i][j] == 0);
    if (!zero) throw std::logic_error("left_kernel: elimination failed");
    kernel.emplace_back(aug[i].begin() + m, aug[i].end());
  }
  return hermite_basis(std::move(kernel));
}

inline bool lattice_member(const Mat& hermite, const Vec& v) {
  Vec w = v;
  for (const auto& row : hermite) {
    size_t p = 0;
    while (p < row.size() && row[p] == 0) ++p;
    if (p == row.size()) continue;
    if (w[p] % row[p] != 0) {
      // only the pivot row can change coordinate p; fail fast below
    }
    long long q = w[p] / row[p];
    for (size_t j = 0; j < w.size(); ++j) w[j] -= q * row[j];
  }
  for (long long x : w)
    if (x != 0) return false;
  return true;
}

inline bool lattice_equal(const Mat& a, const Mat& b) {
  return hermite_basis(a) == hermite_basis(b);
}

/// Sublattice test: every row of `sub` lies in the lattice spanned by `super`.
inline bool lattice_subset(const Mat& sub, const Mat& super) {
  Mat h = hermite_basis(super);
  for (const auto& v : sub)
    if (!lattice_member(h, v)) return false;
  return true;
}

struct Smith {
  Mat u, d, v;  // u * a * v == d, with u and v unimodular, d diagonal
};

/// Smith normal form for small matrices.
inline Smith smith_normal_form(Mat a) {
  const size_t n = a.size();
  const size_t m = n ? a[0].size() : 0;
  Mat u(n, Vec(n, 0)), v(m, Vec(m, 0));
  for (size_t i = 0; i < n; ++i) u[i][i] = 1;
  for (size_t j = 0; j < m; ++j) v[j][j] = 1;

  auto row_op = [&](size_t r1, size_t r2, long long q) {  // row r2 -= q * row r1
    for (size_t j = 0; j < m; ++j) a[r2][j] -= q * a[r1][j];
    for (size_t j = 0; j < n; ++j) u[r2][j] -= q * u[r1][j];
  };
  auto col_op = [&](size_t c1, size_t c2, long long q) {  // col c2 -= q * col c1
    for (size_t i = 0; i < n; ++i) a[i][c2] -= q * a[i][c1];
    for (size_t i = 0; i < m; ++i) v[i][c2] -= q * v[i][c1];
  };
  auto swap_rows = [&](size_t r1, size_t r2) { std::swap(a[r1], a[r2]); std::swap(u[r1], u[r2]); };
  auto swap_cols = [&](size_t c1, size_t c2) {
    for (size_t i = 0; i < n; ++i) std::swap(a[i][c1], a[i][c2]);
    for (size_t i = 0; i < m; ++i) std::swap(v[i][c1], v[i][c2]);
  };

  for (size_t t = 0; t < std::min(n, m); ++t) {
    for (;;) {
      size_t pi = t, pj = t;
      long long best = 0;
      for (size_t i = t; i < n; ++i)
        for (size_t j = t; j < m; ++j)
          if (a[i][j] != 0 && (best == 0 || std::abs(a[i][j]) < best)) {
            best = std::abs(a[i][j]);
            pi = i; pj = j;
          }
      if (best == 0) { t = std::min(n, m); break; }
      swap_rows(t, pi);
      swap_cols(t, pj);
      bool clean = true;
      for (size_t i = t + 1; i < n; ++i)
        if (a[i][t] != 0) { row_op(t, i, a[i][t] / a[t][t]); clean &= (a[i][t] == 0); }
      for (size_t j = t + 1; j < m; ++j)
        if (a[t][j] != 0) { col_op(t, j, a[t][j] / a[t][t]); clean &= (a[t][j] == 0); }
      if (!clean) continue;
      // enforce divisibility of the remaining block
      bool fixed = false;
      for (size_t i = t + 1; i < n && !fixed; ++i)
        for (size_t j = t + 1; j < m && !fixed; ++j)
          if (a[i][j] % a[t][t] != 0) {
            row_op(i, t, -1);  // add row i to row t
            fixed = true;
          }
      if (!fixed) break;
    }
    if (t >= std::min(n, m)) break;
  }
  for (size_t t = 0; t < std::min(n, m); ++t)
    if (a[t][t] < 0) {
      for (size_t j = 0; j < m; ++j) a[t][j] = -a[t][j];
      for (size_t j = 0; j < n; ++j) u[t][j] = -u[t][j];
    }
  return Smith{std::move(u), std::move(a), std::move(v)};
}

/// Exact rational with normalized sign/gcd. Small-scale by construction.
struct Rat {
  long long num = 0, den = 1;
  Rat() = default;
  Rat(long long n) : num(n), den(1) {}
  Rat(long long n, long long d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rat: zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(std::abs(num), den);
    if (g > 1) { num /= g; den /= g; }
  }
  bool is_integer() const { return den == 1; }
  friend Rat operator+(const Rat& a, const Rat& b) { return Rat(a.num * b.den + b.num * a.den, a.den * b.den); }
  friend Rat operator-(const Rat& a, const Rat& b) { return Rat(a.num * b.den - b.num * a.den, a.den * b.den); }
  friend Rat operator*(const Rat& a, const Rat& b) { return Rat(a.num * b.num, a.den * b.den); }
  friend Rat operator*(long long a, const Rat& b) { return Rat(a * b.num, b.den); }
  auto operator<=>(const Rat&) const = default;
};

/// A rational functional phi with phi(L) ⊆ Z and phi(v) ∉ Z, witnessing
/// v ∉ L. Throws if v is in fact a member.
inline std::vector<Rat> separating_character(const Mat& lattice_gens, const Vec& v) {
  const size_t n = v.size();
  Mat gens = lattice_gens.empty() ? Mat{Vec(n, 0)} : lattice_gens;
  Smith s = smith_normal_form(gens);
  // lattice = { c * D * V^-1 }, and v in w-basis coordinates is a = v * V.
  Vec a(n, 0);
  for (size_t j = 0; j < n; ++j)
    for (size_t i = 0; i < n; ++i) a[j] += v[i] * s.v[i][j];
  size_t rank = 0;
  for (size_t t = 0; t < std::min(gens.size(), n); ++t)
    if (s.d[t][t] != 0) ++rank;
  for (size_t j = 0; j < n; ++j) {
    long long d = j < rank ? s.d[j][j] : 0;
    bool separated = d != 0 ? (a[j] % d != 0) : (a[j] != 0);
    if (separated) {
      long long denom = d != 0 ? d : std::abs(a[j]) + 1;
      std::vector<Rat> phi(n);
      for (size_t i = 0; i < n; ++i) phi[i] = Rat(s.v[i][j], denom);
      return phi;
    }
  }
  throw std::invalid_argument("separating_character: vector lies in the lattice");
}

/// All kernel vectors of max-norm <= bound (brute-force box scan).
inline Mat box_kernel(const Mat& rows, long long bound) {
  const size_t n = rows.size();
  Mat out;
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

}  // namespace fgc::lat
