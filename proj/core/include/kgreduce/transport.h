#pragma once

#include <stdexcept>
#include <string>

#include "kgreduce/bony.h"
#include "kgreduce/diffeo.h"
#include "kgreduce/symbol.h"
#include "kgreduce/torus_function.h"

namespace kgr {

// First Melnikov test |omega . l - (1 + c) j| >= 2 gamma <l>^{-tau} failed at a
// box site; carries the offending pair so callers can excise the frequency.
class MelnikovFailure : public std::runtime_error {
 public:
  MelnikovFailure(const MultiIndex& l, int j, int nu, double divisor, double bound);

  MultiIndex ell;
  int j_x = 0;
  double divisor = 0.0;
  double bound = 0.0;
};

// Straightened transport data for the two characteristic directions: the drift
// constant c, the direct solutions beta_{+/-} of
//   omega . d_phi beta_+ - (1 + a)(1 + dx beta_+) = -(1 + c)
//   omega . d_phi beta_- + (1 + a)(1 + dx beta_-) =  (1 + c)
// and the inverse-map functions alpha_{+/-}: x -> x + alpha_sigma(phi, x)
// inverts y -> y + beta_sigma(phi, y). They satisfy
// alpha_sigma(phi, x) = -alpha_sigma(-phi, -x) and
// alpha_-(phi, x) = -alpha_+(phi, -x), the relations build_L checks.
struct StraighteningResult {
  double a_frak = 0.0;
  TorusFunction beta_plus;
  TorusFunction beta_minus;
  TorusFunction alpha_plus;
  TorusFunction alpha_minus;
  double residual = 0.0;
  int iterations = 0;
};

// Solves the plus transport equation by the quasi-Newton fixed point
//   beta^{k+1} = (omega . d_phi - (1 + c^k) dx)^{-1} [(a - c^k)(1 + dx beta^k)]
// with c^k = mean(a + a dx beta^k) enforcing zero-mode solvability, iterating
// until the H^{s0} residual of the equation is <= tol. Requires a real and even
// separately in phi and in x. Every sweep re-checks the Melnikov condition on
// the box at the current drift iterate and throws MelnikovFailure on violation;
// throws std::runtime_error when max_iter sweeps do not reach tol. beta_- is
// built by reflection and its equation residual is verified independently;
// the reported residual is the larger of the two.
StraighteningResult solve_transport(const TorusFunction& a, const Freq& omega,
                                    double gamma, double tau_dioph,
                                    double tol = 1.0e-11, int max_iter = 60);

// Conjugation of Op(w) by the composition operator C_alpha^tau at tau = 1:
//   C_alpha Op(w) C_alpha^{-1} = Op(q_principal + q_sub) + remainder.
// q_principal is the exact characteristic-flow substitution
//   q(phi, x, xi) = w(phi, x + alpha, xi / (1 + alpha_x)),
// q_sub stacks the graded corrections of orders m-1 .. m-depth_rho, each level
// integrated along the closed-form composite flow, and remainder_couple is the
// Bony representative of the defect with its <D>^{m1} . <D>^{m2} weighted norm
// (m1 = m2 = M/2, M = depth_rho + 1 - order) and the <d_phi>^b weighted variant.
struct EgorovResult {
  Symbol q_principal;
  Symbol q_sub;
  BonyCouple remainder_couple;
  double remainder_norm_plain = 0.0;
  double remainder_norm_weighted = 0.0;
  int depth_rho = 0;
};

// Principal symbol of the conjugation at time tau in [0, 1] (the k = 0 flow
// substitution alone).
Symbol egorov_principal(const Symbol& w, const TorusDiffeo& d, double tau);

// Requires depth_rho >= 1 and 1 + dx alpha > 0 on the grid (flow degeneracy is
// rejected with std::invalid_argument).
EgorovResult egorov_conjugate(const Symbol& w, const TorusDiffeo& d, int depth_rho,
                              int b);

// Straightening of the first order operator A = omega . d_phi - i (1 + a)|D|:
// builds alpha_{+/-} via solve_transport and inversion, L via build_L,
// conjugates A by explicit matrix products on the box and subtracts the
// constant-coefficient target omega . d_phi - i (1 + c)|D|. The remainder R is
// returned as a Bony couple of the +/- system together with the plain and the
// <d_phi>^b <D>^{M/2} . <D>^{M/2} weighted couple norms. R is checked to be
// reversible and parity preserving. The Melnikov exponent is
// tau_floor(nu) + 1/2.
struct StraightenResult {
  double a_frak = 0.0;
  LOperator L_pair;
  BonyCouple remainder_couple;
  double remainder_norm_plain = 0.0;
  double remainder_norm_weighted = 0.0;
  StraighteningResult transport;
};

StraightenResult straighten_first_order(const TorusFunction& a, const Freq& omega,
                                        double gamma, double M, int b);

}  // namespace kgr
