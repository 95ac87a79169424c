#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "kgreduce/torus_function.h"

namespace kgr {

// Operator constant along the phi lattice: block A(ld) acts by convolution,
// (Au)(l) = sum_{l'} A(l - l') u(l'), each block an x-matrix over j in [-K_x, K_x].
// Blocks are stored for |ld|_inf <= band; band defaults to 2 K_phi so products of
// function-induced operators close. Mass pushed past the band is dropped and
// recorded in the truncation budget.
class ToeplitzOperator {
 public:
  ToeplitzOperator() : ToeplitzOperator(LatticeBox{}) {}
  explicit ToeplitzOperator(const LatticeBox& box, int band = -1);

  const LatticeBox& box() const { return box_; }
  int band() const { return band_; }
  int band_count() const { return static_cast<int>(blocks_.size()); }

  bool in_band(const MultiIndex& ld) const;
  int band_flat(const MultiIndex& ld) const;
  MultiIndex band_unflat(int r) const;

  Eigen::MatrixXcd& block(const MultiIndex& ld) { return blocks_[band_flat(ld)]; }
  const Eigen::MatrixXcd& block(const MultiIndex& ld) const {
    return blocks_[band_flat(ld)];
  }
  Eigen::MatrixXcd& block_at(int r) { return blocks_[static_cast<size_t>(r)]; }
  const Eigen::MatrixXcd& block_at(int r) const { return blocks_[static_cast<size_t>(r)]; }

  // Entry A_j^{jp}(ld); zero outside the band or the x box.
  Complex entry(const MultiIndex& ld, int j, int jp) const;
  void set_entry(const MultiIndex& ld, int j, int jp, Complex v);
  void add_entry(const MultiIndex& ld, int j, int jp, Complex v);

  double truncation_budget() const { return truncation_budget_; }
  void set_truncation_budget(double b) { truncation_budget_ = b; }
  void add_truncation_budget(double b) { truncation_budget_ += b; }

  double max_abs() const;
  double frobenius() const;

  ToeplitzOperator& operator+=(const ToeplitzOperator& o);
  ToeplitzOperator& operator-=(const ToeplitzOperator& o);
  ToeplitzOperator& operator*=(Complex z);
  friend ToeplitzOperator operator+(ToeplitzOperator a, const ToeplitzOperator& b) {
    return a += b;
  }
  friend ToeplitzOperator operator-(ToeplitzOperator a, const ToeplitzOperator& b) {
    return a -= b;
  }
  friend ToeplitzOperator operator*(ToeplitzOperator a, Complex z) { return a *= z; }
  friend ToeplitzOperator operator*(Complex z, ToeplitzOperator a) { return a *= z; }
  ToeplitzOperator operator-() const;

  static ToeplitzOperator identity(const LatticeBox& box);
  // Diagonal operator j -> fn(j), constant in phi.
  static ToeplitzOperator multiplier(const LatticeBox& box,
                                     const std::function<Complex(int)>& fn);
  // Multiplication operator by the function a: A_j^{jp}(ld) = a_hat(ld, j - jp).
  static ToeplitzOperator from_function(const TorusFunction& a);

 private:
  LatticeBox box_;
  int band_;
  std::vector<Eigen::MatrixXcd> blocks_;
  double truncation_budget_ = 0.0;
};

TorusFunction apply(const ToeplitzOperator& A, const TorusFunction& u);
ToeplitzOperator compose(const ToeplitzOperator& A, const ToeplitzOperator& B);

// Entrywise conjugate operator, (conj A)_j^{jp}(ld) = conj(A_{-j}^{-jp}(-ld)).
ToeplitzOperator conj_op(const ToeplitzOperator& A);
// Entrywise absolute values.
ToeplitzOperator majorant(const ToeplitzOperator& A);

// Commutator weights and projections.
ToeplitzOperator filter_dx(const ToeplitzOperator& A);
ToeplitzOperator filter_dphi(const ToeplitzOperator& A, int h);
ToeplitzOperator filter_jap_dphi_pow(const ToeplitzOperator& A, double b);
ToeplitzOperator filter_pi_N(const ToeplitzOperator& A, int N);
ToeplitzOperator filter_pi_N_perp(const ToeplitzOperator& A, int N);
enum class Side { left, right };
ToeplitzOperator filter_japD_pow(const ToeplitzOperator& A, double n, Side side);

struct NormEstimate {
  double value = 0.0;
  bool converged = true;
  int iterations = 0;
};
enum class NormMode { op, majorant, decay };

// H^{s_in} -> H^{s_out} norm. op/majorant modes use power iteration (50 steps,
// relative tolerance 1e-8, deterministic start) and flag non-convergence; decay
// mode is the exact finite sum over (p, h) of band suprema and uses s_out.
NormEstimate operator_norm(const ToeplitzOperator& A, double s_in, double s_out,
                           NormMode mode);

// C^2-valued function, components sigma = +, -.
struct Vec2 {
  TorusFunction plus, minus;

  Vec2() = default;
  explicit Vec2(const LatticeBox& box) : plus(box), minus(box) {}
  Vec2(TorusFunction p, TorusFunction m) : plus(std::move(p)), minus(std::move(m)) {}
};

// 2x2 matrix of Toeplitz blocks indexed by (sigma, sigma') with + = 0, - = 1.
class BlockOperator2x2 {
 public:
  BlockOperator2x2() = default;
  explicit BlockOperator2x2(const LatticeBox& box, int band = -1);

  const LatticeBox& box() const { return blocks_[0][0].box(); }
  ToeplitzOperator& block(int sigma, int sigma_p) {
    return blocks_[static_cast<size_t>(sigma)][static_cast<size_t>(sigma_p)];
  }
  const ToeplitzOperator& block(int sigma, int sigma_p) const {
    return blocks_[static_cast<size_t>(sigma)][static_cast<size_t>(sigma_p)];
  }

  double max_abs() const;
  double truncation_budget() const;

  BlockOperator2x2& operator+=(const BlockOperator2x2& o);
  BlockOperator2x2& operator-=(const BlockOperator2x2& o);
  BlockOperator2x2& operator*=(Complex z);
  friend BlockOperator2x2 operator+(BlockOperator2x2 a, const BlockOperator2x2& b) {
    return a += b;
  }
  friend BlockOperator2x2 operator-(BlockOperator2x2 a, const BlockOperator2x2& b) {
    return a -= b;
  }
  friend BlockOperator2x2 operator*(BlockOperator2x2 a, Complex z) { return a *= z; }
  friend BlockOperator2x2 operator*(Complex z, BlockOperator2x2 a) { return a *= z; }
  BlockOperator2x2 operator-() const;

  static BlockOperator2x2 identity(const LatticeBox& box);
  // diag(A, B).
  static BlockOperator2x2 diag(const ToeplitzOperator& A, const ToeplitzOperator& B);
  // A in every block (the all-ones matrix tensor A).
  static BlockOperator2x2 ones(const ToeplitzOperator& A);
  // Off-diagonal (0, B; C, 0).
  static BlockOperator2x2 off_diag(const ToeplitzOperator& B, const ToeplitzOperator& C);

 private:
  std::array<std::array<ToeplitzOperator, 2>, 2> blocks_;
};

Vec2 apply(const BlockOperator2x2& A, const Vec2& u);
BlockOperator2x2 compose(const BlockOperator2x2& A, const BlockOperator2x2& B);
// Left multiplication by E = diag(1, -1) and by the scalar z.
BlockOperator2x2 e_times(const BlockOperator2x2& A, Complex z = Complex(1.0, 0.0));
// conj blockwise with the sigma swap, (conj T)^{sigma sigma'} = conj_op(T^{-sigma -sigma'}).
BlockOperator2x2 conj_block(const BlockOperator2x2& A);

NormEstimate operator_norm(const BlockOperator2x2& A, double s_in, double s_out,
                           NormMode mode);

struct StructureReport {
  bool real_to_real = false;
  bool reversible = false;
  bool reversibility_preserving = false;
  bool parity_preserving = false;
  double viol_real_to_real = 0.0;
  double viol_reversible = 0.0;
  double viol_reversibility_preserving = 0.0;
  double viol_parity_preserving = 0.0;
  double tol = 0.0;
};

// Entrywise identities over (sigma, sigma', l, j, k):
//   real-to-real          A_{s,j}^{s',k}(l) =  conj(A_{-s,-j}^{-s',-k}(-l))
//   reversible            A_{s,j}^{s',k}(l) = -A_{-s,j}^{-s',k}(-l) = -conj(A_{s,-j}^{s',-k}(l))
//   reversibility pres.   A_{s,j}^{s',k}(l) =  A_{-s,j}^{-s',k}(-l) =  conj(A_{s,-j}^{s',-k}(l))
//   parity preserving     A_{s,j}^{s',k}(l) =  A_{s,-j}^{s',-k}(l)
StructureReport structure_check(const BlockOperator2x2& T);

// Diagonal normal-form data: eigenvalues are
//   lambda_{j,eta} = (1 + c_frak) sqrt(j^2 + mass) + r_j + eta r_j^-   (j >= 1)
//   lambda_{0}     = (1 + c_frak) sqrt(mass) + r_0
// with the stored pairs (r_j, r_j^-) raw; reports scale by <j> where requested.
struct NormalForm {
  double c_frak = 0.0;
  double mass = 1.0;
  std::vector<std::array<double, 2>> r_diag;  // index j = 0..K_x

  double eigenvalue(int j, int eta) const;
};

struct NormalFormProjection {
  std::vector<std::array<double, 2>> pairs;  // j = 0..K_x: {A_{+,j}^{+,j}(0), A_{+,j}^{+,-j}(0)}
  double max_imag = 0.0;                     // dropped imaginary mass, structure guarantees ~0
};

// Keeps the l = 0, sigma' = sigma, k = +/- j part; requires real-to-real,
// reversibility- and parity-preserving input (entries of the projection are then
// real). Returns the pair table and the remainder T - [T].
std::pair<NormalFormProjection, BlockOperator2x2> normal_form_project(
    const BlockOperator2x2& T);

}  // namespace kgr
