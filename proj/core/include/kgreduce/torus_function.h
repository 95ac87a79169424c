#pragma once

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "kgreduce/lattice.h"

namespace kgr {

using Complex = std::complex<double>;

// Truncated Fourier series u(phi, x) = sum_{(l,j) in box} u_{l,j} e^{i(l.phi + j x)}.
// Coefficients outside the box are identically zero. Operations that would push
// mass outside the box drop it and add its H^0 size to the truncation budget.
class TorusFunction {
 public:
  TorusFunction() : TorusFunction(LatticeBox{}) {}
  explicit TorusFunction(const LatticeBox& box)
      : box_(box), data_(Eigen::MatrixXcd::Zero(box.phi_count(), box.x_count())) {}

  const LatticeBox& box() const { return box_; }
  Eigen::MatrixXcd& data() { return data_; }
  const Eigen::MatrixXcd& data() const { return data_; }

  Complex coeff(const MultiIndex& l, int j) const {
    if (!box_.contains(l, j)) return Complex(0.0, 0.0);
    return data_(box_.phi_flat(l), box_.x_col(j));
  }
  void set_coeff(const MultiIndex& l, int j, Complex v) {
    if (!box_.contains(l, j)) throw std::out_of_range("set_coeff: index outside box");
    data_(box_.phi_flat(l), box_.x_col(j)) = v;
  }
  void add_coeff(const MultiIndex& l, int j, Complex v) {
    if (!box_.contains(l, j)) throw std::out_of_range("add_coeff: index outside box");
    data_(box_.phi_flat(l), box_.x_col(j)) += v;
  }

  Complex mean() const { return coeff(MultiIndex{}, 0); }
  double max_abs() const { return data_.cwiseAbs().maxCoeff(); }

  double truncation_budget() const { return truncation_budget_; }
  void set_truncation_budget(double b) { truncation_budget_ = b; }
  void add_truncation_budget(double b) { truncation_budget_ += b; }

  // omega . d_phi u, multiplies u_{l,j} by i (omega . l).
  TorusFunction dphi(const Freq& omega) const;
  // d_x u, multiplies u_{l,j} by i j.
  TorusFunction dx() const;
  // u(-phi, x), u(phi, -x), pointwise complex conjugate.
  TorusFunction reflect_phi() const;
  TorusFunction reflect_x() const;
  TorusFunction conj() const;

  Complex eval(const std::array<double, kMaxNu>& phi, double x) const;

  TorusFunction& operator+=(const TorusFunction& o);
  TorusFunction& operator-=(const TorusFunction& o);
  TorusFunction& operator*=(Complex z);
  friend TorusFunction operator+(TorusFunction a, const TorusFunction& b) { return a += b; }
  friend TorusFunction operator-(TorusFunction a, const TorusFunction& b) { return a -= b; }
  friend TorusFunction operator*(TorusFunction a, Complex z) { return a *= z; }
  friend TorusFunction operator*(Complex z, TorusFunction a) { return a *= z; }
  TorusFunction operator-() const;

  static TorusFunction constant(const LatticeBox& box, Complex value);
  // Single mode c e^{i(l.phi + j x)}.
  static TorusFunction mode(const LatticeBox& box, const MultiIndex& l, int j, Complex c);
  // cos(l.phi + j x) and sin(l.phi + j x) as real two-mode series.
  static TorusFunction cosine(const LatticeBox& box, const MultiIndex& l, int j,
                              double amplitude = 1.0);
  static TorusFunction sine(const LatticeBox& box, const MultiIndex& l, int j,
                            double amplitude = 1.0);

 private:
  LatticeBox box_;
  Eigen::MatrixXcd data_;  // phi_count x x_count
  double truncation_budget_ = 0.0;
};

double sobolev_norm(const TorusFunction& u, double s);

// Lipschitz family over finitely many frequency samples, all on one box.
struct ParamFamily {
  std::vector<Freq> omegas;
  std::vector<TorusFunction> values;

  void push(const Freq& omega, TorusFunction value) {
    omegas.push_back(omega);
    values.push_back(std::move(value));
  }
  size_t size() const { return omegas.size(); }
};

// sup_omega ||u||_s + gamma * max_pairs ||u(w1) - u(w2)||_{s-1} / |w1 - w2|.
double lip_norm(const ParamFamily& fam, double s, double gamma);

// Exact coefficient convolution projected back onto the box. The H^0 norm of the
// dropped tail is added to the result's truncation budget (on top of the inputs').
TorusFunction multiply(const TorusFunction& u, const TorusFunction& v);

struct SymmetryReport {
  bool even_phi = false;
  bool odd_phi = false;
  bool even_x = false;
  bool odd_x = false;
  bool real_valued = false;
  double viol_even_phi = 0.0;
  double viol_odd_phi = 0.0;
  double viol_even_x = 0.0;
  double viol_odd_x = 0.0;
  double viol_real = 0.0;
  double tol = 0.0;
};

// Coefficient-level parity and reality flags, true iff the identity holds within
// tol = 1e-12 * (1 + ||u||_{s0}).
SymmetryReport symmetry_check(const TorusFunction& u);

// Values on the product grid phi_k = 2 pi k / n_phi (per phi axis), x_m = 2 pi m / n_x.
// Rows flatten the phi grid row-major, columns run over x.
Eigen::MatrixXcd eval_grid(const TorusFunction& u, int n_phi, int n_x);
// Inverse of eval_grid by direct DFT, truncated onto the box. Exact on functions
// band-limited to the box when n_phi > 2 K_phi and n_x > 2 K_x.
TorusFunction fit_grid(const Eigen::MatrixXcd& values, const LatticeBox& box, int n_phi,
                       int n_x);

inline int default_grid_phi(const LatticeBox& box) { return 4 * box.K_phi + 3; }
inline int default_grid_x(const LatticeBox& box) { return 4 * box.K_x + 3; }

// Pointwise map on a refinement grid followed by a refit onto the box. Used for
// analytic functions of small coefficients where the spectral tail is negligible.
TorusFunction pointwise(const TorusFunction& u, const std::function<Complex(Complex)>& f);
TorusFunction pointwise2(const TorusFunction& u, const TorusFunction& v,
                         const std::function<Complex(Complex, Complex)>& f);

// Drops the imaginary part of every coefficient pair so that u = conj-flip(u)
// exactly; no-op up to roundoff on functions that are already real valued.
TorusFunction enforce_real(const TorusFunction& u);

}  // namespace kgr
