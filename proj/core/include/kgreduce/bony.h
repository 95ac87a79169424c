#pragma once

#include <vector>

#include "kgreduce/dense.h"

namespace kgr {

class Symbol;

// Pair (M, R): majorant-bounded part plus smoothing part, representing the
// operator M + R. Normed by sup_{s* <= p <= s1} |M|_{p,p} + |R|_{s*,s} with
// majorant operator norms; the sup is taken over a fixed 5-point p-grid.
// Scalar couples use comps == 1 operators, the +/- system uses comps == 2.
struct BonyCouple {
  DenseOperator M;
  DenseOperator R;
  double s_star = 0.0;
  double s1 = 0.0;

  const LatticeBox& box() const { return M.box(); }
  int comps() const { return M.comps(); }
};

using BonyCouple2x2 = BonyCouple;

// Keeps entries with |l - l'|_1 + |j - k| < (|l|_1 + |j|)/2 (row (l, j)) in M,
// the rest in R; M + R reassembles the operator exactly.
BonyCouple bony_split(const ToeplitzOperator& L, double s1_window = -1.0);
BonyCouple bony_split(const BlockOperator2x2& L, double s1_window = -1.0);
BonyCouple bony_split(const DenseOperator& L, double s_star_window, double s1_window);

// The represented operator M + R.
DenseOperator couple_total(const BonyCouple& A);

// Re-expresses the same operator with the Bony-split support convention.
BonyCouple couple_resplit(const BonyCouple& A);

double couple_norm(const BonyCouple& A, double s);

struct CoupleFamily {
  std::vector<Freq> omegas;
  std::vector<BonyCouple> values;
  void push(const Freq& omega, BonyCouple value) {
    omegas.push_back(omega);
    values.push_back(std::move(value));
  }
  size_t size() const { return omegas.size(); }
};

// sup-norm over the family plus gamma-weighted Lipschitz part in omega, the
// difference quotients measured at s - 1 (clamped to the window floor).
double couple_norm(const CoupleFamily& fam, double s, double gamma);

BonyCouple couple_identity(const LatticeBox& box, int comps, double s_star_window,
                           double s1_window);

// (M1 M2, M1 R2 + R1 M2 + R1 R2); representation homomorphism is exact.
BonyCouple couple_product(const BonyCouple& A, const BonyCouple& B);

// Neumann inverse of Id + Q; requires the couple norm of Q at s* to be < 1.
BonyCouple couple_invert(const BonyCouple& A);

BonyCouple exp_couple(const BonyCouple& Q);

// Symmetrizes both components over the structure orbit; the Bony mask is
// invariant under every structure involution, so the split survives.
BonyCouple symmetrize_couple(const BonyCouple& A, StructureKind kind);

// Couple of <D>^{-n1} Op(a) <D>^{-n2}; requires n1 + n2 = order of a.
BonyCouple couple_from_pseudo(const Symbol& a, double n1, double n2);

}  // namespace kgr
