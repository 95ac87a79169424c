#include "kgreduce/dense.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "detail.h"

namespace kgr {

namespace {

// Flat-index permutation realizing (sigma, l, j) -> (swapped sigma, +-l, +-j).
std::vector<int> index_map(const LatticeBox& box, int comps, bool swap_sigma, bool neg_l,
                           bool neg_j) {
  const int fc = box.flat_count();
  std::vector<int> perm(static_cast<size_t>(comps) * fc);
  for (int s = 0; s < comps; ++s) {
    const int s_out = (swap_sigma && comps == 2) ? 1 - s : s;
    for (int f = 0; f < fc; ++f) {
      const MultiIndex l = box.phi_unflat(f / box.x_count());
      const int j = f % box.x_count() - box.K_x;
      const MultiIndex lm = neg_l ? -l : l;
      const int jm = neg_j ? -j : j;
      perm[static_cast<size_t>(s * fc + f)] = s_out * fc + box.flat(lm, jm);
    }
  }
  return perm;
}

Eigen::MatrixXcd apply_involution(const Eigen::MatrixXcd& M, const std::vector<int>& perm,
                                  bool conjugate, double sign) {
  const int n = static_cast<int>(M.rows());
  Eigen::MatrixXcd out(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      Complex v = M(perm[static_cast<size_t>(r)], perm[static_cast<size_t>(c)]);
      if (conjugate) v = std::conj(v);
      out(r, c) = sign * v;
    }
  return out;
}

}  // namespace

DenseOperator DenseOperator::from_toeplitz(const ToeplitzOperator& A) {
  const LatticeBox& box = A.box();
  DenseOperator d(box, 1);
  const int pc = box.phi_count();
  const int xc = box.x_count();
  for (int r = 0; r < A.band_count(); ++r) {
    const Eigen::MatrixXcd& blk = A.block_at(r);
    if (blk.isZero(0.0)) continue;
    const MultiIndex ld = A.band_unflat(r);
    for (int fc = 0; fc < pc; ++fc) {
      const MultiIndex lc = box.phi_unflat(fc);
      const MultiIndex lr = ld + lc;
      if (!box.contains_phi(lr)) continue;
      const int fr = box.phi_flat(lr);
      d.mat_.block(fr * xc, fc * xc, xc, xc) += blk;
    }
  }
  return d;
}

DenseOperator DenseOperator::from_block(const BlockOperator2x2& A) {
  const LatticeBox& box = A.box();
  DenseOperator d(box, 2);
  const int fc = box.flat_count();
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp)
      d.mat_.block(s * fc, sp * fc, fc, fc) =
          from_toeplitz(A.block(s, sp)).mat();
  return d;
}

ToeplitzOperator DenseOperator::to_toeplitz(int band, double* defect) const {
  if (comps_ != 1)
    throw std::invalid_argument("DenseOperator::to_toeplitz requires a scalar operator");
  ToeplitzOperator T(box_, band);
  const int pc = box_.phi_count();
  const int xc = box_.x_count();
  double worst = 0.0;
  for (int r = 0; r < T.band_count(); ++r) {
    const MultiIndex ld = T.band_unflat(r);
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(xc, xc);
    int count = 0;
    for (int fc = 0; fc < pc; ++fc) {
      const MultiIndex lc = box_.phi_unflat(fc);
      const MultiIndex lr = ld + lc;
      if (!box_.contains_phi(lr)) continue;
      avg += mat_.block(box_.phi_flat(lr) * xc, fc * xc, xc, xc);
      ++count;
    }
    if (count == 0) continue;
    avg /= double(count);
    for (int fc = 0; fc < pc; ++fc) {
      const MultiIndex lc = box_.phi_unflat(fc);
      const MultiIndex lr = ld + lc;
      if (!box_.contains_phi(lr)) continue;
      worst = std::max(
          worst, (mat_.block(box_.phi_flat(lr) * xc, fc * xc, xc, xc) - avg)
                     .cwiseAbs()
                     .maxCoeff());
    }
    T.block(ld) = avg;
  }
  if (defect != nullptr) *defect = worst;
  return T;
}

BlockOperator2x2 DenseOperator::to_block(int band, double* defect) const {
  if (comps_ != 2)
    throw std::invalid_argument("DenseOperator::to_block requires a two-component operator");
  BlockOperator2x2 T(box_, band);
  const int fc = box_.flat_count();
  double worst = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) {
      DenseOperator sub(box_, 1);
      sub.mat() = mat_.block(s * fc, sp * fc, fc, fc);
      double d = 0.0;
      T.block(s, sp) = sub.to_toeplitz(band, &d);
      worst = std::max(worst, d);
    }
  if (defect != nullptr) *defect = worst;
  return T;
}

DenseOperator compose(const DenseOperator& A, const DenseOperator& B) {
  if (!(A.box() == B.box()) || A.comps() != B.comps())
    throw std::invalid_argument("compose: dense operator shape mismatch");
  DenseOperator C(A.box(), A.comps());
  C.mat() = A.mat() * B.mat();
  return C;
}

NormEstimate dense_norm(const DenseOperator& A, double s_in, double s_out, NormMode mode) {
  const LatticeBox& box = A.box();
  const int fc = box.flat_count();
  const int xc = box.x_count();
  if (mode == NormMode::decay) {
    const LatticeBox diff{box.nu, 2 * box.K_phi, 2 * box.K_x};
    double acc = 0.0;
    for (int s = 0; s < A.comps(); ++s)
      for (int sp = 0; sp < A.comps(); ++sp) {
        std::vector<double> sup(static_cast<size_t>(diff.flat_count()), 0.0);
        for (int fr = 0; fr < fc; ++fr) {
          const MultiIndex lr = box.phi_unflat(fr / xc);
          const int j = fr % xc - box.K_x;
          for (int fcol = 0; fcol < fc; ++fcol) {
            const double a = std::abs(A.mat()(s * fc + fr, sp * fc + fcol));
            if (a == 0.0) continue;
            const MultiIndex lc = box.phi_unflat(fcol / xc);
            const int k = fcol % xc - box.K_x;
            const int idx = diff.flat(lr - lc, j - k);
            sup[static_cast<size_t>(idx)] = std::max(sup[static_cast<size_t>(idx)], a);
          }
        }
        for (int f = 0; f < diff.flat_count(); ++f) {
          if (sup[static_cast<size_t>(f)] == 0.0) continue;
          const MultiIndex p = diff.phi_unflat(f / diff.x_count());
          const int h = f % diff.x_count() - diff.K_x;
          acc += std::pow(jap(p, h), 2.0 * s_out) * sup[static_cast<size_t>(f)] *
                 sup[static_cast<size_t>(f)];
        }
      }
    return NormEstimate{std::sqrt(acc), true, 0};
  }
  Eigen::VectorXd w_out(A.dim()), w_in_inv(A.dim());
  for (int s = 0; s < A.comps(); ++s)
    for (int f = 0; f < fc; ++f) {
      const MultiIndex l = box.phi_unflat(f / xc);
      const int j = f % xc - box.K_x;
      const double base = jap(l, j);
      w_out[s * fc + f] = std::pow(base, s_out);
      w_in_inv[s * fc + f] = std::pow(base, -s_in);
    }
  Eigen::MatrixXcd M = mode == NormMode::majorant
                           ? A.mat().cwiseAbs().cast<Complex>().eval()
                           : A.mat();
  for (int r = 0; r < A.dim(); ++r) M.row(r) *= w_out[r];
  for (int c = 0; c < A.dim(); ++c) M.col(c) *= w_in_inv[c];
  return detail::power_norm(M);
}

DenseOperator symmetrize(const DenseOperator& A, StructureKind kind) {
  const LatticeBox& box = A.box();
  const int comps = A.comps();
  DenseOperator out(box, comps);
  switch (kind) {
    case StructureKind::real_to_real: {
      const auto rho = index_map(box, comps, true, true, true);
      out.mat() = 0.5 * (A.mat() + apply_involution(A.mat(), rho, true, 1.0));
      break;
    }
    case StructureKind::reversible:
    case StructureKind::reversibility_preserving: {
      const double sign = kind == StructureKind::reversible ? -1.0 : 1.0;
      const auto rho_phi = index_map(box, comps, true, true, false);
      const auto rho_x = index_map(box, comps, false, false, true);
      const Eigen::MatrixXcd a1 = apply_involution(A.mat(), rho_phi, false, sign);
      const Eigen::MatrixXcd a2 = apply_involution(A.mat(), rho_x, true, sign);
      const Eigen::MatrixXcd a12 = apply_involution(a1, rho_x, true, sign);
      out.mat() = 0.25 * (A.mat() + a1 + a2 + a12);
      break;
    }
    case StructureKind::parity_preserving: {
      const auto rho_p = index_map(box, comps, false, false, true);
      out.mat() = 0.5 * (A.mat() + apply_involution(A.mat(), rho_p, false, 1.0));
      break;
    }
  }
  return out;
}

bool bony_keep(const MultiIndex& l, int j, const MultiIndex& lp, int k) {
  const MultiIndex dl = l - lp;
  return 2 * (dl.abs_sum() + std::abs(j - k)) < l.abs_sum() + std::abs(j);
}

}  // namespace kgr
