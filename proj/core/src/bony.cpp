#include "kgreduce/bony.h"

#include <cmath>
#include <stdexcept>

namespace kgr {

namespace {

constexpr int kPGrid = 5;

void check_window(const BonyCouple& A, double s) {
  constexpr double kSlack = 1e-9;
  if (s < A.s_star - kSlack || s > A.s1 + kSlack)
    throw std::invalid_argument("couple_norm: s outside the [s*, s1] window");
}

BonyCouple split_dense(DenseOperator d, double s_star_window, double s1_window) {
  const LatticeBox& box = d.box();
  const int fc = box.flat_count();
  const int xc = box.x_count();
  BonyCouple out;
  out.M = DenseOperator(box, d.comps());
  out.R = DenseOperator(box, d.comps());
  out.s_star = s_star_window;
  out.s1 = s1_window;
  const int dim = d.dim();
  for (int r = 0; r < dim; ++r) {
    const int fr = r % fc;
    const MultiIndex lr = box.phi_unflat(fr / xc);
    const int j = fr % xc - box.K_x;
    for (int c = 0; c < dim; ++c) {
      const Complex v = d.mat()(r, c);
      if (v == Complex(0.0, 0.0)) continue;
      const int fcol = c % fc;
      const MultiIndex lc = box.phi_unflat(fcol / xc);
      const int k = fcol % xc - box.K_x;
      (bony_keep(lr, j, lc, k) ? out.M : out.R).mat()(r, c) = v;
    }
  }
  return out;
}

double window_default(const LatticeBox& box, double s1_window) {
  return s1_window > 0.0 ? s1_window : s_zero(box.nu) + 1.0;
}

}  // namespace

BonyCouple bony_split(const ToeplitzOperator& L, double s1_window) {
  return split_dense(DenseOperator::from_toeplitz(L), s_star(L.box().nu),
                     window_default(L.box(), s1_window));
}

BonyCouple bony_split(const BlockOperator2x2& L, double s1_window) {
  return split_dense(DenseOperator::from_block(L), s_star(L.box().nu),
                     window_default(L.box(), s1_window));
}

BonyCouple bony_split(const DenseOperator& L, double s_star_window, double s1_window) {
  return split_dense(L, s_star_window, s1_window);
}

DenseOperator couple_total(const BonyCouple& A) { return A.M + A.R; }

BonyCouple couple_resplit(const BonyCouple& A) {
  return split_dense(couple_total(A), A.s_star, A.s1);
}

double couple_norm(const BonyCouple& A, double s) {
  check_window(A, s);
  double m_part = 0.0;
  for (int t = 0; t < kPGrid; ++t) {
    const double p = A.s_star + (A.s1 - A.s_star) * double(t) / double(kPGrid - 1);
    m_part = std::max(m_part, dense_norm(A.M, p, p, NormMode::majorant).value);
  }
  return m_part + dense_norm(A.R, A.s_star, s, NormMode::majorant).value;
}

double couple_norm(const CoupleFamily& fam, double s, double gamma) {
  if (fam.size() == 0) throw std::invalid_argument("couple_norm: empty family");
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("couple_norm: gamma range");
  double sup = 0.0;
  for (const BonyCouple& A : fam.values) sup = std::max(sup, couple_norm(A, s));
  if (fam.size() == 1) return sup;
  double lip = 0.0;
  const double s_lip = std::max(s - 1.0, fam.values[0].s_star);
  for (size_t a = 0; a < fam.size(); ++a) {
    for (size_t b = a + 1; b < fam.size(); ++b) {
      const double d = fam.omegas[a].dist(fam.omegas[b]);
      if (d == 0.0) throw std::invalid_argument("couple_norm: repeated frequency sample");
      BonyCouple diff = fam.values[a];
      diff.M -= fam.values[b].M;
      diff.R -= fam.values[b].R;
      lip = std::max(lip, couple_norm(diff, s_lip) / d);
    }
  }
  return sup + gamma * lip;
}

BonyCouple couple_identity(const LatticeBox& box, int comps, double s_star_window,
                           double s1_window) {
  BonyCouple out;
  out.M = DenseOperator::identity(box, comps);
  out.R = DenseOperator(box, comps);
  out.s_star = s_star_window;
  out.s1 = s1_window;
  return out;
}

BonyCouple couple_product(const BonyCouple& A, const BonyCouple& B) {
  if (!(A.box() == B.box()) || A.comps() != B.comps() || A.s_star != B.s_star ||
      A.s1 != B.s1)
    throw std::invalid_argument("couple_product: couple shape mismatch");
  BonyCouple C;
  C.s_star = A.s_star;
  C.s1 = A.s1;
  C.M = compose(A.M, B.M);
  C.R = compose(A.M, B.R) + compose(A.R, B.M) + compose(A.R, B.R);
  return C;
}

BonyCouple couple_invert(const BonyCouple& A) {
  DenseOperator q_total = couple_total(A);
  q_total -= DenseOperator::identity(A.box(), A.comps());
  const BonyCouple q = bony_split(q_total, A.s_star, A.s1);
  const double small = couple_norm(q, q.s_star);
  if (!(small < 1.0))
    throw std::invalid_argument("couple_invert: couple norm of Q at s* is not < 1");

  const Eigen::MatrixXcd Q = couple_total(q).mat();
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(Q.rows(), Q.cols());
  Eigen::MatrixXcd acc = term;
  const double scale = 1.0 + Q.cwiseAbs().maxCoeff();
  bool converged = false;
  for (int k = 1; k <= 200; ++k) {
    term = -(term * Q);
    acc += term;
    if (term.cwiseAbs().maxCoeff() < 1e-16 * scale) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw std::runtime_error("couple_invert: Neumann series did not converge");
  DenseOperator inv(A.box(), A.comps());
  inv.mat() = acc;
  return bony_split(inv, A.s_star, A.s1);
}

BonyCouple exp_couple(const BonyCouple& Q) {
  const Eigen::MatrixXcd M = couple_total(Q).mat();
  const double scale = M.cwiseAbs().maxCoeff() * double(M.rows());
  int squarings = 0;
  if (scale > 0.5) squarings = std::min(40, int(std::ceil(std::log2(scale / 0.5))));
  const Eigen::MatrixXcd T = M / std::pow(2.0, squarings);
  Eigen::MatrixXcd term = Eigen::MatrixXcd::Identity(M.rows(), M.cols());
  Eigen::MatrixXcd acc = term;
  for (int k = 1; k <= 60; ++k) {
    term = (term * T) / double(k);
    acc += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * (1.0 + acc.cwiseAbs().maxCoeff())) break;
  }
  for (int i = 0; i < squarings; ++i) acc = acc * acc;
  DenseOperator e(Q.box(), Q.comps());
  e.mat() = acc;
  return bony_split(e, Q.s_star, Q.s1);
}

BonyCouple symmetrize_couple(const BonyCouple& A, StructureKind kind) {
  BonyCouple out = A;
  out.M = symmetrize(A.M, kind);
  out.R = symmetrize(A.R, kind);
  return out;
}

}  // namespace kgr
