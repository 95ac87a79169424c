#include "kgreduce/toeplitz.h"

#include <cmath>
#include <random>
#include <stdexcept>

#include "detail.h"

namespace kgr {

namespace {

int band_side(int band) { return 2 * band + 1; }

int band_count_for(int nu, int band) {
  int n = 1;
  for (int i = 0; i < nu; ++i) n *= band_side(band);
  return n;
}

}  // namespace

ToeplitzOperator::ToeplitzOperator(const LatticeBox& box, int band)
    : box_(box), band_(band < 0 ? 2 * box.K_phi : band) {
  const int xc = box_.x_count();
  blocks_.assign(static_cast<size_t>(band_count_for(box_.nu, band_)),
                 Eigen::MatrixXcd::Zero(xc, xc));
}

bool ToeplitzOperator::in_band(const MultiIndex& ld) const {
  for (int i = 0; i < kMaxNu; ++i) {
    int b = i < box_.nu ? band_ : 0;
    if (std::abs(ld[i]) > b) return false;
  }
  return true;
}

int ToeplitzOperator::band_flat(const MultiIndex& ld) const {
  int r = 0;
  for (int i = 0; i < box_.nu; ++i) r = r * band_side(band_) + (ld[i] + band_);
  return r;
}

MultiIndex ToeplitzOperator::band_unflat(int r) const {
  MultiIndex ld;
  for (int i = box_.nu - 1; i >= 0; --i) {
    ld[i] = r % band_side(band_) - band_;
    r /= band_side(band_);
  }
  return ld;
}

Complex ToeplitzOperator::entry(const MultiIndex& ld, int j, int jp) const {
  if (!in_band(ld) || std::abs(j) > box_.K_x || std::abs(jp) > box_.K_x)
    return Complex(0.0, 0.0);
  return blocks_[static_cast<size_t>(band_flat(ld))](box_.x_col(j), box_.x_col(jp));
}

void ToeplitzOperator::set_entry(const MultiIndex& ld, int j, int jp, Complex v) {
  if (!in_band(ld) || std::abs(j) > box_.K_x || std::abs(jp) > box_.K_x)
    throw std::out_of_range("ToeplitzOperator::set_entry outside band");
  blocks_[static_cast<size_t>(band_flat(ld))](box_.x_col(j), box_.x_col(jp)) = v;
}

void ToeplitzOperator::add_entry(const MultiIndex& ld, int j, int jp, Complex v) {
  if (!in_band(ld) || std::abs(j) > box_.K_x || std::abs(jp) > box_.K_x)
    throw std::out_of_range("ToeplitzOperator::add_entry outside band");
  blocks_[static_cast<size_t>(band_flat(ld))](box_.x_col(j), box_.x_col(jp)) += v;
}

double ToeplitzOperator::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

double ToeplitzOperator::frobenius() const {
  double acc = 0.0;
  for (const auto& b : blocks_) acc += b.squaredNorm();
  return std::sqrt(acc);
}

ToeplitzOperator& ToeplitzOperator::operator+=(const ToeplitzOperator& o) {
  if (!(box_ == o.box_)) throw std::invalid_argument("ToeplitzOperator: box mismatch");
  if (band_ == o.band_) {
    for (size_t i = 0; i < blocks_.size(); ++i) blocks_[i] += o.blocks_[i];
  } else {
    for (int r = 0; r < o.band_count(); ++r) {
      const MultiIndex ld = o.band_unflat(r);
      if (in_band(ld))
        blocks_[static_cast<size_t>(band_flat(ld))] += o.block_at(r);
      else
        truncation_budget_ += o.block_at(r).norm();
    }
  }
  truncation_budget_ += o.truncation_budget_;
  return *this;
}

ToeplitzOperator& ToeplitzOperator::operator-=(const ToeplitzOperator& o) {
  ToeplitzOperator neg = o;
  for (auto& b : neg.blocks_) b = -b;
  return *this += neg;
}

ToeplitzOperator& ToeplitzOperator::operator*=(Complex z) {
  for (auto& b : blocks_) b *= z;
  return *this;
}

ToeplitzOperator ToeplitzOperator::operator-() const {
  ToeplitzOperator r = *this;
  for (auto& b : r.blocks_) b = -b;
  return r;
}

ToeplitzOperator ToeplitzOperator::identity(const LatticeBox& box) {
  ToeplitzOperator A(box);
  A.block(MultiIndex{}).setIdentity();
  return A;
}

ToeplitzOperator ToeplitzOperator::multiplier(const LatticeBox& box,
                                              const std::function<Complex(int)>& fn) {
  ToeplitzOperator A(box);
  Eigen::MatrixXcd& b = A.block(MultiIndex{});
  for (int j = -box.K_x; j <= box.K_x; ++j) b(box.x_col(j), box.x_col(j)) = fn(j);
  return A;
}

ToeplitzOperator ToeplitzOperator::from_function(const TorusFunction& a) {
  const LatticeBox& box = a.box();
  ToeplitzOperator A(box);
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex l = box.phi_unflat(p);
    for (int n = -box.K_x; n <= box.K_x; ++n) {
      const Complex c = a.data()(p, box.x_col(n));
      if (c == Complex(0.0, 0.0)) continue;
      Eigen::MatrixXcd& b = A.block(l);
      for (int jp = -box.K_x; jp <= box.K_x; ++jp) {
        const int j = jp + n;
        if (std::abs(j) <= box.K_x) b(box.x_col(j), box.x_col(jp)) += c;
      }
    }
  }
  A.set_truncation_budget(a.truncation_budget());
  return A;
}

TorusFunction apply(const ToeplitzOperator& A, const TorusFunction& u) {
  const LatticeBox& box = u.box();
  if (!(box == A.box())) throw std::invalid_argument("apply: box mismatch");
  TorusFunction out(box);
  double dropped = 0.0;
  for (int r = 0; r < A.band_count(); ++r) {
    const Eigen::MatrixXcd& blk = A.block_at(r);
    if (blk.isZero(0.0)) continue;
    const MultiIndex ld = A.band_unflat(r);
    for (int p = 0; p < box.phi_count(); ++p) {
      const MultiIndex lp = box.phi_unflat(p);
      const Eigen::VectorXcd v = u.data().row(p).transpose();
      if (v.isZero(0.0)) continue;
      const MultiIndex lt = ld + lp;
      const Eigen::VectorXcd w = blk * v;
      if (box.contains_phi(lt))
        out.data().row(box.phi_flat(lt)) += w.transpose();
      else
        dropped += w.squaredNorm();
    }
  }
  out.set_truncation_budget(A.truncation_budget() + u.truncation_budget() +
                            std::sqrt(dropped));
  return out;
}

ToeplitzOperator compose(const ToeplitzOperator& A, const ToeplitzOperator& B) {
  if (!(A.box() == B.box())) throw std::invalid_argument("compose: box mismatch");
  ToeplitzOperator C(A.box(), std::max(A.band(), B.band()));
  double dropped = 0.0;
  for (int ra = 0; ra < A.band_count(); ++ra) {
    const Eigen::MatrixXcd& ba = A.block_at(ra);
    if (ba.isZero(0.0)) continue;
    const MultiIndex la = A.band_unflat(ra);
    for (int rb = 0; rb < B.band_count(); ++rb) {
      const Eigen::MatrixXcd& bb = B.block_at(rb);
      if (bb.isZero(0.0)) continue;
      const MultiIndex lt = la + B.band_unflat(rb);
      if (C.in_band(lt))
        C.block(lt) += ba * bb;
      else
        dropped += (ba * bb).squaredNorm();
    }
  }
  C.set_truncation_budget(A.truncation_budget() + B.truncation_budget() +
                          std::sqrt(dropped));
  return C;
}

ToeplitzOperator conj_op(const ToeplitzOperator& A) {
  const LatticeBox& box = A.box();
  ToeplitzOperator C(box, A.band());
  for (int r = 0; r < A.band_count(); ++r) {
    const MultiIndex ld = A.band_unflat(r);
    const Eigen::MatrixXcd& src = A.block(-ld);
    Eigen::MatrixXcd& dst = C.block_at(r);
    for (int j = -box.K_x; j <= box.K_x; ++j)
      for (int jp = -box.K_x; jp <= box.K_x; ++jp)
        dst(box.x_col(j), box.x_col(jp)) =
            std::conj(src(box.x_col(-j), box.x_col(-jp)));
  }
  C.set_truncation_budget(A.truncation_budget());
  return C;
}

ToeplitzOperator majorant(const ToeplitzOperator& A) {
  ToeplitzOperator M = A;
  for (int r = 0; r < M.band_count(); ++r)
    M.block_at(r) = M.block_at(r).cwiseAbs().cast<Complex>();
  return M;
}

ToeplitzOperator filter_dx(const ToeplitzOperator& A) {
  const LatticeBox& box = A.box();
  ToeplitzOperator C = A;
  for (int r = 0; r < C.band_count(); ++r) {
    Eigen::MatrixXcd& b = C.block_at(r);
    for (int j = -box.K_x; j <= box.K_x; ++j)
      for (int jp = -box.K_x; jp <= box.K_x; ++jp)
        b(box.x_col(j), box.x_col(jp)) *= Complex(0.0, j - jp);
  }
  return C;
}

ToeplitzOperator filter_dphi(const ToeplitzOperator& A, int h) {
  ToeplitzOperator C = A;
  for (int r = 0; r < C.band_count(); ++r)
    C.block_at(r) *= Complex(0.0, C.band_unflat(r)[h]);
  return C;
}

ToeplitzOperator filter_jap_dphi_pow(const ToeplitzOperator& A, double b) {
  ToeplitzOperator C = A;
  for (int r = 0; r < C.band_count(); ++r)
    C.block_at(r) *= std::pow(jap(C.band_unflat(r)), b);
  return C;
}

ToeplitzOperator filter_pi_N(const ToeplitzOperator& A, int N) {
  ToeplitzOperator C = A;
  for (int r = 0; r < C.band_count(); ++r)
    if (C.band_unflat(r).abs_sum() > N) C.block_at(r).setZero();
  return C;
}

ToeplitzOperator filter_pi_N_perp(const ToeplitzOperator& A, int N) {
  ToeplitzOperator C = A;
  for (int r = 0; r < C.band_count(); ++r)
    if (C.band_unflat(r).abs_sum() <= N) C.block_at(r).setZero();
  return C;
}

ToeplitzOperator filter_japD_pow(const ToeplitzOperator& A, double n, Side side) {
  const LatticeBox& box = A.box();
  ToeplitzOperator C = A;
  for (int r = 0; r < C.band_count(); ++r) {
    Eigen::MatrixXcd& b = C.block_at(r);
    for (int j = -box.K_x; j <= box.K_x; ++j) {
      const double w = std::pow(jap(j), n);
      if (side == Side::left)
        b.row(box.x_col(j)) *= w;
      else
        b.col(box.x_col(j)) *= w;
    }
  }
  return C;
}

namespace {

// Flattened weighted matrix D_{s_out} A D_{s_in}^{-1} over the (l, j) box.
Eigen::MatrixXcd weighted_dense(const ToeplitzOperator& A, double s_in, double s_out,
                                bool absolute) {
  const LatticeBox& box = A.box();
  const int dim = box.flat_count();
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
  for (int r = 0; r < A.band_count(); ++r) {
    const Eigen::MatrixXcd& blk = A.block_at(r);
    if (blk.isZero(0.0)) continue;
    const MultiIndex ld = A.band_unflat(r);
    for (int pc = 0; pc < box.phi_count(); ++pc) {
      const MultiIndex lc = box.phi_unflat(pc);
      const MultiIndex lr = ld + lc;
      if (!box.contains_phi(lr)) continue;
      const int pr = box.phi_flat(lr);
      for (int j = -box.K_x; j <= box.K_x; ++j) {
        for (int jp = -box.K_x; jp <= box.K_x; ++jp) {
          Complex v = blk(box.x_col(j), box.x_col(jp));
          if (v == Complex(0.0, 0.0)) continue;
          if (absolute) v = std::abs(v);
          const double w =
              std::pow(jap(lr, j), s_out) / std::pow(jap(lc, jp), s_in);
          M(pr * box.x_count() + box.x_col(j), pc * box.x_count() + box.x_col(jp)) =
              v * w;
        }
      }
    }
  }
  return M;
}

}  // namespace

namespace detail {

NormEstimate power_norm(const Eigen::MatrixXcd& M) {
  NormEstimate est;
  if (M.isZero(0.0)) return est;
  std::mt19937 rng(20240901u);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(M.cols());
  for (int i = 0; i < v.size(); ++i) v(i) = Complex(gauss(rng), gauss(rng));
  v.normalize();
  double sigma = 0.0;
  constexpr int kMaxIters = 50;
  constexpr double kRelTol = 1e-8;
  est.converged = false;
  for (int it = 0; it < kMaxIters; ++it) {
    Eigen::VectorXcd w = M * v;
    const double s_new = w.norm();
    Eigen::VectorXcd v2 = M.adjoint() * w;
    const double n2 = v2.norm();
    est.iterations = it + 1;
    if (n2 == 0.0 || s_new == 0.0) {
      sigma = s_new;
      est.converged = true;
      break;
    }
    v = v2 / n2;
    if (it > 0 && std::abs(s_new - sigma) <= kRelTol * s_new) {
      sigma = s_new;
      est.converged = true;
      break;
    }
    sigma = s_new;
  }
  est.value = sigma;
  return est;
}

}  // namespace detail

NormEstimate operator_norm(const ToeplitzOperator& A, double s_in, double s_out,
                           NormMode mode) {
  if (mode == NormMode::decay) {
    const LatticeBox& box = A.box();
    double acc = 0.0;
    for (int r = 0; r < A.band_count(); ++r) {
      const Eigen::MatrixXcd& blk = A.block_at(r);
      if (blk.isZero(0.0)) continue;
      const MultiIndex p = A.band_unflat(r);
      for (int h = -2 * box.K_x; h <= 2 * box.K_x; ++h) {
        double sup = 0.0;
        for (int j = -box.K_x; j <= box.K_x; ++j) {
          const int jp = j - h;
          if (std::abs(jp) > box.K_x) continue;
          sup = std::max(sup, std::abs(blk(box.x_col(j), box.x_col(jp))));
        }
        if (sup > 0.0) acc += std::pow(jap(p, h), 2.0 * s_out) * sup * sup;
      }
    }
    return NormEstimate{std::sqrt(acc), true, 0};
  }
  return detail::power_norm(weighted_dense(A, s_in, s_out, mode == NormMode::majorant));
}

BlockOperator2x2::BlockOperator2x2(const LatticeBox& box, int band) {
  for (auto& row : blocks_)
    for (auto& b : row) b = ToeplitzOperator(box, band);
}

double BlockOperator2x2::max_abs() const {
  double m = 0.0;
  for (const auto& row : blocks_)
    for (const auto& b : row) m = std::max(m, b.max_abs());
  return m;
}

double BlockOperator2x2::truncation_budget() const {
  double t = 0.0;
  for (const auto& row : blocks_)
    for (const auto& b : row) t += b.truncation_budget();
  return t;
}

BlockOperator2x2& BlockOperator2x2::operator+=(const BlockOperator2x2& o) {
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) block(s, sp) += o.block(s, sp);
  return *this;
}

BlockOperator2x2& BlockOperator2x2::operator-=(const BlockOperator2x2& o) {
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) block(s, sp) -= o.block(s, sp);
  return *this;
}

BlockOperator2x2& BlockOperator2x2::operator*=(Complex z) {
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) block(s, sp) *= z;
  return *this;
}

BlockOperator2x2 BlockOperator2x2::operator-() const {
  BlockOperator2x2 r = *this;
  return r *= Complex(-1.0, 0.0);
}

BlockOperator2x2 BlockOperator2x2::identity(const LatticeBox& box) {
  BlockOperator2x2 T(box);
  T.block(0, 0) = ToeplitzOperator::identity(box);
  T.block(1, 1) = ToeplitzOperator::identity(box);
  return T;
}

BlockOperator2x2 BlockOperator2x2::diag(const ToeplitzOperator& A,
                                        const ToeplitzOperator& B) {
  BlockOperator2x2 T(A.box(), A.band());
  T.block(0, 0) = A;
  T.block(1, 1) = B;
  return T;
}

BlockOperator2x2 BlockOperator2x2::ones(const ToeplitzOperator& A) {
  BlockOperator2x2 T(A.box(), A.band());
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) T.block(s, sp) = A;
  return T;
}

BlockOperator2x2 BlockOperator2x2::off_diag(const ToeplitzOperator& B,
                                            const ToeplitzOperator& C) {
  BlockOperator2x2 T(B.box(), B.band());
  T.block(0, 1) = B;
  T.block(1, 0) = C;
  return T;
}

Vec2 apply(const BlockOperator2x2& A, const Vec2& u) {
  Vec2 out;
  out.plus = apply(A.block(0, 0), u.plus) + apply(A.block(0, 1), u.minus);
  out.minus = apply(A.block(1, 0), u.plus) + apply(A.block(1, 1), u.minus);
  return out;
}

BlockOperator2x2 compose(const BlockOperator2x2& A, const BlockOperator2x2& B) {
  BlockOperator2x2 C(A.box(), std::max(A.block(0, 0).band(), B.block(0, 0).band()));
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp)
      C.block(s, sp) =
          compose(A.block(s, 0), B.block(0, sp)) + compose(A.block(s, 1), B.block(1, sp));
  return C;
}

BlockOperator2x2 e_times(const BlockOperator2x2& A, Complex z) {
  BlockOperator2x2 C = A;
  for (int sp = 0; sp < 2; ++sp) {
    C.block(0, sp) *= z;
    C.block(1, sp) *= -z;
  }
  return C;
}

BlockOperator2x2 conj_block(const BlockOperator2x2& A) {
  BlockOperator2x2 C(A.box(), A.block(0, 0).band());
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) C.block(s, sp) = conj_op(A.block(1 - s, 1 - sp));
  return C;
}

NormEstimate operator_norm(const BlockOperator2x2& A, double s_in, double s_out,
                           NormMode mode) {
  if (mode == NormMode::decay) {
    double acc = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int sp = 0; sp < 2; ++sp) {
        const NormEstimate e = operator_norm(A.block(s, sp), s_in, s_out, mode);
        acc += e.value * e.value;
      }
    return NormEstimate{std::sqrt(acc), true, 0};
  }
  const int dim = A.box().flat_count();
  Eigen::MatrixXcd M(2 * dim, 2 * dim);
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp)
      M.block(s * dim, sp * dim, dim, dim) =
          weighted_dense(A.block(s, sp), s_in, s_out, mode == NormMode::majorant);
  return detail::power_norm(M);
}

StructureReport structure_check(const BlockOperator2x2& T) {
  const LatticeBox& box = T.box();
  StructureReport rep;
  rep.tol = 1e-12 * (1.0 + T.max_abs());
  const int bc = T.block(0, 0).band_count();
  for (int s = 0; s < 2; ++s) {
    for (int sp = 0; sp < 2; ++sp) {
      const ToeplitzOperator& B = T.block(s, sp);
      const ToeplitzOperator& Bs = T.block(1 - s, 1 - sp);
      for (int r = 0; r < bc; ++r) {
        const MultiIndex ld = B.band_unflat(r);
        for (int j = -box.K_x; j <= box.K_x; ++j) {
          for (int k = -box.K_x; k <= box.K_x; ++k) {
            const Complex c = B.entry(ld, j, k);
            const Complex swap_neg = Bs.entry(-ld, -j, -k);
            const Complex swap_same_jk = Bs.entry(-ld, j, k);
            const Complex same_neg = B.entry(ld, -j, -k);
            rep.viol_real_to_real =
                std::max(rep.viol_real_to_real, std::abs(c - std::conj(swap_neg)));
            rep.viol_reversible = std::max(
                {rep.viol_reversible, std::abs(c + swap_same_jk),
                 std::abs(c + std::conj(same_neg))});
            rep.viol_reversibility_preserving = std::max(
                {rep.viol_reversibility_preserving, std::abs(c - swap_same_jk),
                 std::abs(c - std::conj(same_neg))});
            rep.viol_parity_preserving =
                std::max(rep.viol_parity_preserving, std::abs(c - same_neg));
          }
        }
      }
    }
  }
  rep.real_to_real = rep.viol_real_to_real <= rep.tol;
  rep.reversible = rep.viol_reversible <= rep.tol;
  rep.reversibility_preserving = rep.viol_reversibility_preserving <= rep.tol;
  rep.parity_preserving = rep.viol_parity_preserving <= rep.tol;
  return rep;
}

double NormalForm::eigenvalue(int j, int eta) const {
  const int a = std::abs(j);
  const double base = (1.0 + c_frak) * std::sqrt(double(a) * a + mass);
  if (static_cast<size_t>(a) >= r_diag.size()) return base;
  const double rj = r_diag[static_cast<size_t>(a)][0];
  const double rm = a == 0 ? 0.0 : r_diag[static_cast<size_t>(a)][1];
  return base + rj + eta * rm;
}

std::pair<NormalFormProjection, BlockOperator2x2> normal_form_project(
    const BlockOperator2x2& T) {
  const StructureReport rep = structure_check(T);
  if (!rep.real_to_real || !rep.reversibility_preserving || !rep.parity_preserving)
    throw std::invalid_argument(
        "normal_form_project: input must be real-to-real, reversibility and parity "
        "preserving");

  const LatticeBox& box = T.box();
  NormalFormProjection proj;
  proj.pairs.assign(static_cast<size_t>(box.K_x) + 1, {0.0, 0.0});
  const MultiIndex zero{};
  for (int j = 0; j <= box.K_x; ++j) {
    const Complex a = j == 0 ? T.block(0, 0).entry(zero, 0, 0)
                             : 0.5 * (T.block(0, 0).entry(zero, j, j) +
                                      T.block(0, 0).entry(zero, -j, -j));
    const Complex b = j == 0 ? Complex(0.0, 0.0)
                             : 0.5 * (T.block(0, 0).entry(zero, j, -j) +
                                      T.block(0, 0).entry(zero, -j, j));
    proj.max_imag = std::max({proj.max_imag, std::abs(a.imag()), std::abs(b.imag())});
    proj.pairs[static_cast<size_t>(j)] = {a.real(), b.real()};
  }

  BlockOperator2x2 rem = T;
  for (int s = 0; s < 2; ++s) {
    for (int j = -box.K_x; j <= box.K_x; ++j) {
      const auto& pr = proj.pairs[static_cast<size_t>(std::abs(j))];
      rem.block(s, s).add_entry(zero, j, j, Complex(-pr[0], 0.0));
      if (j != 0) rem.block(s, s).add_entry(zero, j, -j, Complex(-pr[1], 0.0));
    }
  }
  return {proj, rem};
}

}  // namespace kgr
