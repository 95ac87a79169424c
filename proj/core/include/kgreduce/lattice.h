#pragma once

#include <array>
#include <cmath>
#include <cstdlib>

namespace kgr {

// Frequency indices live in Z^nu with nu <= kMaxNu. Components past nu are zero.
inline constexpr int kMaxNu = 3;

struct MultiIndex {
  std::array<int, kMaxNu> c{0, 0, 0};

  int& operator[](int i) { return c[static_cast<size_t>(i)]; }
  int operator[](int i) const { return c[static_cast<size_t>(i)]; }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) { return a.c == b.c; }
  friend bool operator!=(const MultiIndex& a, const MultiIndex& b) { return a.c != b.c; }

  MultiIndex operator+(const MultiIndex& o) const {
    return MultiIndex{{c[0] + o.c[0], c[1] + o.c[1], c[2] + o.c[2]}};
  }
  MultiIndex operator-(const MultiIndex& o) const {
    return MultiIndex{{c[0] - o.c[0], c[1] - o.c[1], c[2] - o.c[2]}};
  }
  MultiIndex operator-() const { return MultiIndex{{-c[0], -c[1], -c[2]}}; }

  int abs_sum() const { return std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]); }
  int abs_max() const {
    int m = std::abs(c[0]);
    if (std::abs(c[1]) > m) m = std::abs(c[1]);
    if (std::abs(c[2]) > m) m = std::abs(c[2]);
    return m;
  }
};

// Frequency vector omega in Lambda = [-1/2, 1/2]^nu.
struct Freq {
  std::array<double, kMaxNu> w{0.0, 0.0, 0.0};

  double& operator[](int i) { return w[static_cast<size_t>(i)]; }
  double operator[](int i) const { return w[static_cast<size_t>(i)]; }

  double dot(const MultiIndex& l) const {
    return w[0] * l.c[0] + w[1] * l.c[1] + w[2] * l.c[2];
  }
  double dist(const Freq& o) const {
    double s = 0.0;
    for (int i = 0; i < kMaxNu; ++i) s += (w[i] - o.w[i]) * (w[i] - o.w[i]);
    return std::sqrt(s);
  }
  friend bool operator==(const Freq& a, const Freq& b) { return a.w == b.w; }
};

// Rectangular truncation |l_i| <= K_phi componentwise, |j| <= K_x.
// The index set is symmetric under (l, j) -> (-l, -j).
struct LatticeBox {
  int nu = 1;
  int K_phi = 1;
  int K_x = 1;

  friend bool operator==(const LatticeBox& a, const LatticeBox& b) {
    return a.nu == b.nu && a.K_phi == b.K_phi && a.K_x == b.K_x;
  }

  int phi_side() const { return 2 * K_phi + 1; }
  int x_count() const { return 2 * K_x + 1; }
  int phi_count() const {
    int n = 1;
    for (int i = 0; i < nu; ++i) n *= phi_side();
    return n;
  }

  bool contains_phi(const MultiIndex& l) const {
    for (int i = 0; i < kMaxNu; ++i) {
      int b = i < nu ? K_phi : 0;
      if (std::abs(l[i]) > b) return false;
    }
    return true;
  }
  bool contains(const MultiIndex& l, int j) const {
    return std::abs(j) <= K_x && contains_phi(l);
  }

  // Row-major flattening of the phi box; component 0 is the slowest index.
  int phi_flat(const MultiIndex& l) const {
    int r = 0;
    for (int i = 0; i < nu; ++i) r = r * phi_side() + (l[i] + K_phi);
    return r;
  }
  MultiIndex phi_unflat(int r) const {
    MultiIndex l;
    for (int i = nu - 1; i >= 0; --i) {
      l[i] = r % phi_side() - K_phi;
      r /= phi_side();
    }
    return l;
  }

  int x_col(int j) const { return j + K_x; }
  int flat(const MultiIndex& l, int j) const { return phi_flat(l) * x_count() + x_col(j); }
  int flat_count() const { return phi_count() * x_count(); }
};

// <l> = max(1, |l|_1) and <l,j> = max(1, |l|_1, |j|).
inline double jap(int j) { return std::max(1, std::abs(j)); }
inline double jap(double xi) { return std::max(1.0, std::abs(xi)); }
inline double jap(const MultiIndex& l) { return std::max(1, l.abs_sum()); }
inline double jap(const MultiIndex& l, int j) {
  return std::max(std::max(1, l.abs_sum()), std::abs(j));
}

// Regularity thresholds: s* is the lowest usable index, s0 = s* + 1 the working one.
inline double s_star(int nu) { return std::ceil((nu + 5) / 2.0) + 0.5; }
inline double s_zero(int nu) { return s_star(nu) + 1.0; }

// Diophantine exponent must exceed 2 nu + 4.
inline double tau_floor(int nu) { return 2.0 * nu + 4.0; }

}  // namespace kgr
