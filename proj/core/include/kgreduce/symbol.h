#pragma once

#include <array>
#include <utility>
#include <vector>

#include "kgreduce/toeplitz.h"
#include "kgreduce/torus_function.h"

namespace kgr {

// Extension rule past the tabulated xi band: scale the edge slice by
// (<xi>/<K_xi>)^m, or extend by zero.
enum class TailModel { power_law, zero };

// Closed-form Fourier multipliers; their slices, tails and real-xi values come
// from the formula and are never interpolated.
enum class MultiplierKind {
  none,
  one,
  constant,
  xi,          // xi
  d_m,         // sqrt(xi^2 + m)
  d_m_inv,     // 1 / sqrt(xi^2 + m)
  xi_d_m_inv,  // xi / sqrt(xi^2 + m)
  jap_pow,     // <xi>^p, p = param
  chi,         // 0 at xi = 0, 1 at |xi| >= 1
  chi_plus,    // 1 for xi >= 1, 1/2 at 0, 0 for xi <= -1
  chi_minus,   // chi_plus(-xi)
  sign_xi,     // chi_plus - chi_minus
  abs_chi,     // |xi| chi(xi)
  d_m_tail     // sqrt(xi^2 + m) - |xi| chi(xi), order -1
};

// Symbol a(phi, x, xi) tabulated on integer xi in [-K_xi, K_xi], one
// TorusFunction slice per xi. K_xi >= 2 K_x so every xi + j shift used by the
// sharp product stays in band.
class Symbol {
 public:
  Symbol() = default;
  Symbol(const LatticeBox& box, double order_m, int K_xi = -1,
         TailModel tail = TailModel::power_law);

  const LatticeBox& box() const { return box_; }
  double order_m() const { return order_m_; }
  void set_order_m(double m) { order_m_ = m; }
  int K_xi() const { return K_xi_; }
  TailModel tail_model() const { return tail_; }
  void set_tail_model(TailModel t) { tail_ = t; }
  MultiplierKind multiplier_kind() const { return mult_; }
  double mass() const { return mass_; }

  const TorusFunction& slice(int xi) const;
  // Any integer xi; out of band uses the closed form or the tail model.
  TorusFunction slice_at(int xi) const;
  void set_slice(int xi, TorusFunction f);

  // Real xi via the closed form (multipliers) or 4-point Lagrange interpolation
  // through the integer slices.
  TorusFunction slice_real(double xi) const;
  Complex eval(const std::array<double, kMaxNu>& phi, double x, double xi) const;

  double max_abs() const;

  Symbol& operator+=(const Symbol& o);
  Symbol& operator-=(const Symbol& o);
  Symbol& operator*=(Complex z);
  friend Symbol operator+(Symbol a, const Symbol& b) { return a += b; }
  friend Symbol operator-(Symbol a, const Symbol& b) { return a -= b; }
  friend Symbol operator*(Symbol a, Complex z) { return a *= z; }
  friend Symbol operator*(Complex z, Symbol a) { return a *= z; }
  Symbol operator-() const { return *this * Complex(-1.0, 0.0); }

  static Symbol multiplier(const LatticeBox& box, MultiplierKind kind, double mass = 1.0,
                           double param = 0.0, Complex value = Complex(1.0, 0.0),
                           int K_xi = -1);
  // xi-independent symbol a(phi, x) of the given order.
  static Symbol from_x_function(const TorusFunction& f, double order_m = 0.0,
                                int K_xi = -1);

 private:
  Complex closed_form(double xi) const;
  Complex eval_integer_slice(int xi, const std::array<double, kMaxNu>& phi,
                             double x) const;

  LatticeBox box_;
  double order_m_ = 0.0;
  int K_xi_ = 0;
  TailModel tail_ = TailModel::power_law;
  MultiplierKind mult_ = MultiplierKind::none;
  double mass_ = 1.0;
  double param_ = 0.0;
  Complex value_ = Complex(1.0, 0.0);
  Complex scale_ = Complex(1.0, 0.0);
  std::vector<TorusFunction> slices_;
};

// Op(a): A_j^k(l) = a-hat(l, j - k, k), sampling the slice at the column index.
ToeplitzOperator quantize(const Symbol& a);

// Symbol of conj(Op(a)): conj a(phi, x, -xi).
Symbol conj_reflect(const Symbol& a);

// d/dxi by central finite differences of order fd_order in {2, 4}.
Symbol dxi(const Symbol& a, int fd_order = 4);

// max_{beta <= p} sup_xi ||d_xi^beta a(., ., xi)||_s <xi>^{-m + beta}.
double symbol_norm(const Symbol& a, double s, int p);

struct SharpMode {
  enum class Kind { full, graded, below, remainder };
  Kind kind = Kind::full;
  int n = 0;

  static SharpMode full() { return {Kind::full, 0}; }
  static SharpMode graded(int n) { return {Kind::graded, n}; }
  static SharpMode below(int N) { return {Kind::below, N}; }
  static SharpMode remainder(int N) { return {Kind::remainder, N}; }
};

// a#b(phi, x, xi) = sum_j a(phi, x, xi + j) b-hat(phi, j, xi) e^{ijx}; graded(n)
// is (1/(n! i^n)) d_xi^n a d_x^n b, below(N) sums graded 0..N-1, remainder(N)
// is full minus below(N).
Symbol compose_sharp(const Symbol& a, const Symbol& b, SharpMode mode = SharpMode::full());

// a#b - b#a; graded(1) is the first Poisson term -i{a, b}.
Symbol star_commutator(const Symbol& a, const Symbol& b,
                       SharpMode mode = SharpMode::full());

// (Id - Op(a))^{-1} = Id + Op(a) + Op(g_low) + Op(g_high): g_low holds the
// Neumann powers a#a ... up to rho - 1 computed below order rho, g_high the
// order -rho residue summed to 1e-14 relative. Requires order <= -1 and an
// operator-norm estimate at s0 below 1/2.
std::pair<Symbol, Symbol> neumann_inverse(const Symbol& a, int rho);

// exp(tau Op(a)) by scaling and squaring in the operator algebra; requires the
// order-0 symbol norm at s0 below 1.
ToeplitzOperator exp_symbol(const Symbol& a, double tau);

enum class CutoffKind { chi, chi_plus, chi_minus, sign };

Symbol cutoffs(const LatticeBox& box, CutoffKind kind, int K_xi = -1);

// Largest deviation from each structure identity, maximized over slices.
struct SymbolStructure {
  double real_to_real = 0.0;
  double reversible = 0.0;
  double reversibility_preserving = 0.0;
  double parity = 0.0;
};

SymbolStructure symbol_structure(const Symbol& a);

// 2x2 matrix of symbols for the +/- system; index 0 is +, 1 is -.
struct SymbolMatrix2x2 {
  std::array<std::array<Symbol, 2>, 2> comp;

  Symbol& at(int s, int sp) { return comp[static_cast<size_t>(s)][static_cast<size_t>(sp)]; }
  const Symbol& at(int s, int sp) const {
    return comp[static_cast<size_t>(s)][static_cast<size_t>(sp)];
  }

  static SymbolMatrix2x2 diag(const Symbol& p, const Symbol& m);
  // Real-to-real completion: the lower row is the conjugate-reflection of the
  // upper one, (-,-) from (+,+) and (-,+) from (+,-).
  static SymbolMatrix2x2 from_upper_row(const Symbol& pp, const Symbol& pm);
};

BlockOperator2x2 quantize(const SymbolMatrix2x2& A);
SymbolMatrix2x2 matrix_sharp(const SymbolMatrix2x2& A, const SymbolMatrix2x2& B,
                             SharpMode mode = SharpMode::full());

}  // namespace kgr
