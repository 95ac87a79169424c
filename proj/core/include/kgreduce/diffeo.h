#pragma once

#include "kgreduce/bony.h"
#include "kgreduce/symbol.h"
#include "kgreduce/toeplitz.h"
#include "kgreduce/torus_function.h"

namespace kgr {

// Near-identity torus diffeomorphism x -> x + alpha(phi, x) together with its
// inverse map y -> y + alpha_inv(phi, y) and the measured round-trip residual
// max |y + alpha_inv(phi, y) - x| over a verification grid, y = x + alpha(phi, x).
struct TorusDiffeo {
  TorusFunction alpha;
  TorusFunction alpha_inv;
  double newton_residual = 0.0;

  const LatticeBox& box() const { return alpha.box(); }
};

// Inverts x -> x + alpha(phi, x) by Newton iteration on a collocation grid
// (3 K_x points in x by default, grid_x overrides) followed by a Fourier refit
// onto the box. Requires alpha real valued with ||dx alpha||_inf <= 0.5; throws
// std::runtime_error when the refit residual exceeds tol. When alpha is odd
// under (phi, x) -> (-phi, -x) the inverse inherits the oddness; this is checked.
TorusDiffeo invert_diffeo(const TorusFunction& alpha, int grid_x = 0,
                          double tol = 1.0e-12);

enum class DiffeoDirection { fwd, inv };

// Matrix of the composition operator u -> u(phi, x + tau alpha(phi, x)) in the
// Fourier basis: entries C_j^{jp}(ld) = t_hat(ld, j - jp, jp) where
// t(phi, x, xi) = exp(i xi tau alpha(phi, x)) and t_hat is its (phi, x)
// coefficient at frequency (ld, j - jp), computed by quadrature on a refinement
// grid. direction = inv builds the matrix of the inverse map from alpha_inv
// (re-inverting tau alpha when tau != 1). tau = 0 gives the identity.
ToeplitzOperator composition_operator(const TorusDiffeo& d, double tau,
                                      DiffeoDirection direction);

// Bony couple representing <D>^{-n1} (C_alpha^tau - Id) <D>^{-n2}. Requires the
// exponent margin n1 + n2 > floor(nu/2) + 3 + b and alpha small. The couple
// norms at the window top are measured with and without the <d_phi>^b weight.
struct DiffeoCoupleResult {
  BonyCouple couple;
  double norm_plain = 0.0;
  double norm_weighted = 0.0;
};
DiffeoCoupleResult diffeo_couple(const TorusDiffeo& d, double tau, double n1,
                                 double n2, int b);

enum class SzegoKind { pi_plus_vs_diffeo, pi_minus_vs_diffeo, opchi_vs_diffeo };

// Exact commutator [Pi_sigma, C_alpha] (or [Op(chi), C_alpha]) as a smoothing
// symbol g(phi, x, xi) = sum_k (cut(xi + k) - cut(xi)) t_hat(phi, k, xi) e^{ikx}
// truncated to the box; every nonzero x-coefficient satisfies |k| > |xi| - 1/2,
// which is asserted entry by entry. The result carries a zero tail model.
Symbol szego_commutator(const TorusDiffeo& d, SzegoKind which);

// Commutator [Pi_sigma, Op(r)] for a general symbol r, sigma in {+1, -1}; same
// support property and tail model as the diffeomorphism version.
Symbol szego_commutator(const Symbol& r, int sigma);

// Two-projector operator L = C_{alpha+} Pi_+ + C_{alpha-} Pi_- together with
// its inverse L^{-1} = Gamma (Id + R), Gamma = C_{alpha+}^{-1} Pi_+ +
// C_{alpha-}^{-1} Pi_-, R the Neumann correction of the defect Q = L Gamma - Id.
// The 2x2 forms are diag(L, conj L) and diag(L^{-1}, conj(L^{-1})); the inverse
// of conj L is computed independently and compared against conj(L^{-1}).
struct LOperator {
  BlockOperator2x2 L;
  BlockOperator2x2 L_inv;
  ToeplitzOperator scalar_l;
  ToeplitzOperator gamma;
  ToeplitzOperator defect;
  double conj_inverse_defect = 0.0;
};

// Requires the parity relations alpha_-(phi, x) = -alpha_+(phi, -x) and
// alpha_sigma(phi, x) = -alpha_sigma(-phi, -x); throws std::invalid_argument
// when they fail and std::runtime_error when the defect Neumann series
// diverges. diffeo_tol is forwarded to the internal inversions.
LOperator build_L(const TorusFunction& alpha_plus, const TorusFunction& alpha_minus,
                  double diffeo_tol = 1.0e-10);

}  // namespace kgr
