#include "kgreduce/diffeo.h"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace kgr {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Per phi-grid-row x-mode profiles: P(r, K_x + j) = sum_l u_hat(l, j) e^{i l phi_r}
// on the grid phi_k = 2 pi k / n_phi per axis, rows flattened row-major.
Eigen::MatrixXcd phi_profiles(const TorusFunction& u, int n_phi) {
  const LatticeBox& box = u.box();
  int rows = 1;
  for (int i = 0; i < box.nu; ++i) rows *= n_phi;
  Eigen::MatrixXcd prof = Eigen::MatrixXcd::Zero(rows, box.x_count());
  for (int r = 0; r < rows; ++r) {
    std::array<double, kMaxNu> phi{0.0, 0.0, 0.0};
    int rem = r;
    for (int i = box.nu - 1; i >= 0; --i) {
      phi[i] = kTwoPi * double(rem % n_phi) / double(n_phi);
      rem /= n_phi;
    }
    for (int p = 0; p < box.phi_count(); ++p) {
      const MultiIndex l = box.phi_unflat(p);
      double arg = 0.0;
      for (int i = 0; i < box.nu; ++i) arg += l.c[i] * phi[i];
      const Complex tw = std::polar(1.0, arg);
      for (int j = -box.K_x; j <= box.K_x; ++j)
        prof(r, box.x_col(j)) += tw * u.coeff(l, j);
    }
  }
  return prof;
}

double profile_value(const Eigen::MatrixXcd& prof, const LatticeBox& box, int row,
                     double x) {
  Complex acc = 0.0;
  for (int j = -box.K_x; j <= box.K_x; ++j)
    acc += prof(row, box.x_col(j)) * std::polar(1.0, j * x);
  return acc.real();
}

double profile_slope(const Eigen::MatrixXcd& prof, const LatticeBox& box, int row,
                     double x) {
  Complex acc = 0.0;
  for (int j = -box.K_x; j <= box.K_x; ++j)
    acc += Complex(0.0, double(j)) * prof(row, box.x_col(j)) * std::polar(1.0, j * x);
  return acc.real();
}

double wrap_angle(double t) {
  while (t > 0.5 * kTwoPi) t -= kTwoPi;
  while (t < -0.5 * kTwoPi) t += kTwoPi;
  return t;
}

// max |u_hat(l, j) + u_hat(-l, -j)|: zero iff u is odd under (phi, x) -> (-phi, -x).
double oddness_violation(const TorusFunction& u) {
  const LatticeBox& box = u.box();
  double worst = 0.0;
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex l = box.phi_unflat(p);
    MultiIndex ln;
    for (int i = 0; i < box.nu; ++i) ln.c[i] = -l.c[i];
    for (int j = -box.K_x; j <= box.K_x; ++j)
      worst = std::max(worst, std::abs(u.coeff(l, j) + u.coeff(ln, -j)));
  }
  return worst;
}

double cutoff_value(SzegoKind which, int n) {
  switch (which) {
    case SzegoKind::pi_plus_vs_diffeo:
      return n > 0 ? 1.0 : (n == 0 ? 0.5 : 0.0);
    case SzegoKind::pi_minus_vs_diffeo:
      return n < 0 ? 1.0 : (n == 0 ? 0.5 : 0.0);
    case SzegoKind::opchi_vs_diffeo:
      return n == 0 ? 0.0 : 1.0;
  }
  return 0.0;
}

// Coefficients of exp(i xi a) over the target box by quadrature on an
// oversampled grid; a_values holds Re a on that grid.
TorusFunction phase_coefficients(const Eigen::MatrixXd& a_values, int xi,
                                 const LatticeBox& target, int n_phi, int n_x) {
  Eigen::MatrixXcd vals(a_values.rows(), a_values.cols());
  for (int r = 0; r < a_values.rows(); ++r)
    for (int c = 0; c < a_values.cols(); ++c)
      vals(r, c) = std::polar(1.0, double(xi) * a_values(r, c));
  return fit_grid(vals, target, n_phi, n_x);
}

ToeplitzOperator neumann_series(const ToeplitzOperator& Q) {
  ToeplitzOperator term = Q * Complex(-1.0, 0.0);
  ToeplitzOperator acc = term;
  for (int k = 2; k <= 120; ++k) {
    term = compose(term, Q) * Complex(-1.0, 0.0);
    acc += term;
    if (term.max_abs() < 1.0e-16 * (1.0 + acc.max_abs())) return acc;
  }
  throw std::runtime_error("build_L: defect Neumann series did not converge");
}

}  // namespace

TorusDiffeo invert_diffeo(const TorusFunction& alpha, int grid_x, double tol) {
  const LatticeBox& box = alpha.box();
  if (!symmetry_check(alpha).real_valued)
    throw std::invalid_argument("invert_diffeo: alpha must be real valued");

  const int n_phi = default_grid_phi(box);
  const int n_x = grid_x > 0 ? grid_x : std::max(3 * box.K_x, 2 * box.K_x + 1);
  if (n_x <= 2 * box.K_x)
    throw std::invalid_argument("invert_diffeo: collocation grid too coarse");

  const Eigen::MatrixXcd prof = phi_profiles(alpha, n_phi);
  const int rows = int(prof.rows());

  double slope_max = 0.0;
  for (int r = 0; r < rows; ++r)
    for (int m = 0; m < 4 * n_x; ++m)
      slope_max = std::max(
          slope_max, std::abs(profile_slope(prof, box, r, kTwoPi * m / (4.0 * n_x))));
  if (!(slope_max <= 0.5))
    throw std::invalid_argument("invert_diffeo: ||dx alpha||_inf exceeds 1/2");

  Eigen::MatrixXcd vals(rows, n_x);
  for (int r = 0; r < rows; ++r) {
    for (int m = 0; m < n_x; ++m) {
      const double y = kTwoPi * m / double(n_x);
      double x = y - profile_value(prof, box, r, y);
      double f = 0.0;
      bool done = false;
      for (int it = 0; it < 30; ++it) {
        f = x + profile_value(prof, box, r, x) - y;
        if (std::abs(f) <= 1.0e-14) {
          done = true;
          break;
        }
        x -= f / (1.0 + profile_slope(prof, box, r, x));
      }
      if (!done && std::abs(f) > 1.0e-13)
        throw std::runtime_error("invert_diffeo: Newton iteration did not converge");
      vals(r, m) = Complex(wrap_angle(x - y), 0.0);
    }
  }

  TorusDiffeo out;
  out.alpha = alpha;
  out.alpha_inv = enforce_real(fit_grid(vals, box, n_phi, n_x));

  const int n_xv = default_grid_x(box) + 4;
  const Eigen::MatrixXcd prof_inv = phi_profiles(out.alpha_inv, n_phi);
  double residual = 0.0;
  for (int r = 0; r < rows; ++r) {
    for (int m = 0; m < n_xv; ++m) {
      const double x = kTwoPi * m / double(n_xv);
      const double y = x + profile_value(prof, box, r, x);
      const double back = y + profile_value(prof_inv, box, r, y);
      residual = std::max(residual, std::abs(wrap_angle(back - x)));
    }
  }
  out.newton_residual = residual;
  if (!(residual <= tol))
    throw std::runtime_error("invert_diffeo: round-trip residual above tolerance");

  const double scale = 1.0 + alpha.max_abs();
  if (oddness_violation(alpha) <= 1.0e-12 * scale &&
      oddness_violation(out.alpha_inv) > 1.0e-10 * scale)
    throw std::runtime_error("invert_diffeo: inverse lost oddness of alpha");
  return out;
}

ToeplitzOperator composition_operator(const TorusDiffeo& d, double tau,
                                      DiffeoDirection direction) {
  const LatticeBox& box = d.box();
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::invalid_argument("composition_operator: tau must lie in [0, 1]");

  TorusFunction a(box);
  if (direction == DiffeoDirection::fwd) {
    a = d.alpha * Complex(tau, 0.0);
  } else if (tau == 1.0) {
    a = d.alpha_inv;
  } else {
    const double tol = std::max(1.0e-10, 10.0 * d.newton_residual);
    a = invert_diffeo(d.alpha * Complex(tau, 0.0), 0, tol).alpha_inv;
  }

  const LatticeBox wide{box.nu, 2 * box.K_phi, 2 * box.K_x};
  const int n_phi = 4 * wide.K_phi + 3;
  const int n_x = 4 * (box.K_x + box.K_x) + 3;
  const Eigen::MatrixXd avals = eval_grid(a, n_phi, n_x).real();

  ToeplitzOperator C(box);
  for (int xi = -box.K_x; xi <= box.K_x; ++xi) {
    const TorusFunction t = phase_coefficients(avals, xi, wide, n_phi, n_x);
    for (int r = 0; r < C.band_count(); ++r) {
      const MultiIndex ld = C.band_unflat(r);
      for (int j = -box.K_x; j <= box.K_x; ++j)
        C.set_entry(ld, j, xi, t.coeff(ld, j - xi));
    }
  }
  return C;
}

DiffeoCoupleResult diffeo_couple(const TorusDiffeo& d, double tau, double n1,
                                 double n2, int b) {
  const LatticeBox& box = d.box();
  if (b < 0) throw std::invalid_argument("diffeo_couple: weight power must be >= 0");
  if (!(n1 + n2 > std::floor(box.nu / 2.0) + 3.0 + b))
    throw std::invalid_argument("diffeo_couple: exponent condition violated");
  if (!(sobolev_norm(d.alpha, s_zero(box.nu)) <= 0.5))
    throw std::invalid_argument("diffeo_couple: alpha too large");

  ToeplitzOperator P = composition_operator(d, tau, DiffeoDirection::fwd) -
                       ToeplitzOperator::identity(box);
  P = filter_japD_pow(P, -n1, Side::left);
  P = filter_japD_pow(P, -n2, Side::right);

  DiffeoCoupleResult out{bony_split(P), 0.0, 0.0};
  out.norm_plain = couple_norm(out.couple, out.couple.s1);
  const BonyCouple weighted = bony_split(filter_jap_dphi_pow(P, double(b)));
  out.norm_weighted = couple_norm(weighted, weighted.s1);
  return out;
}

Symbol szego_commutator(const TorusDiffeo& d, SzegoKind which) {
  const LatticeBox& box = d.box();
  // Same oversampled grid as composition_operator, so the symbol slices agree
  // with the operator entries bitwise on the shared modes.
  const int n_phi = 4 * (2 * box.K_phi) + 3;
  const int n_x = 4 * (box.K_x + box.K_x) + 3;
  const Eigen::MatrixXd avals = eval_grid(d.alpha, n_phi, n_x).real();

  Symbol g(box, 0.0, -1, TailModel::zero);
  for (int xi = -g.K_xi(); xi <= g.K_xi(); ++xi) {
    const TorusFunction t = phase_coefficients(avals, xi, box, n_phi, n_x);
    TorusFunction slice(box);
    for (int p = 0; p < box.phi_count(); ++p) {
      const MultiIndex l = box.phi_unflat(p);
      for (int k = -box.K_x; k <= box.K_x; ++k) {
        const double w = cutoff_value(which, xi + k) - cutoff_value(which, xi);
        if (w == 0.0) continue;
        if (!(std::abs(k) > std::abs(xi) - 0.5))
          throw std::logic_error("szego_commutator: support condition violated");
        slice.set_coeff(l, k, Complex(w, 0.0) * t.coeff(l, k));
      }
    }
    g.set_slice(xi, slice);
  }
  return g;
}

Symbol szego_commutator(const Symbol& r, int sigma) {
  if (sigma != 1 && sigma != -1)
    throw std::invalid_argument("szego_commutator: sigma must be +1 or -1");
  const LatticeBox& box = r.box();
  const SzegoKind which =
      sigma == 1 ? SzegoKind::pi_plus_vs_diffeo : SzegoKind::pi_minus_vs_diffeo;

  Symbol f(box, 0.0, r.K_xi(), TailModel::zero);
  for (int xi = -r.K_xi(); xi <= r.K_xi(); ++xi) {
    const TorusFunction& s = r.slice(xi);
    TorusFunction out(box);
    for (int p = 0; p < box.phi_count(); ++p) {
      const MultiIndex l = box.phi_unflat(p);
      for (int k = -box.K_x; k <= box.K_x; ++k) {
        const double w = cutoff_value(which, xi + k) - cutoff_value(which, xi);
        if (w == 0.0) continue;
        if (!(std::abs(k) > std::abs(xi) - 0.5))
          throw std::logic_error("szego_commutator: support condition violated");
        out.set_coeff(l, k, Complex(w, 0.0) * s.coeff(l, k));
      }
    }
    f.set_slice(xi, out);
  }
  return f;
}

LOperator build_L(const TorusFunction& alpha_plus, const TorusFunction& alpha_minus,
                  double diffeo_tol) {
  const LatticeBox& box = alpha_plus.box();
  const double scale = 1.0 + alpha_plus.max_abs() + alpha_minus.max_abs();
  if (oddness_violation(alpha_plus) > 1.0e-10 * scale ||
      oddness_violation(alpha_minus) > 1.0e-10 * scale)
    throw std::invalid_argument("build_L: alpha is not odd in (phi, x)");
  double cross = 0.0;
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex l = box.phi_unflat(p);
    for (int j = -box.K_x; j <= box.K_x; ++j)
      cross = std::max(cross,
                       std::abs(alpha_minus.coeff(l, j) + alpha_plus.coeff(l, -j)));
  }
  if (cross > 1.0e-10 * scale)
    throw std::invalid_argument(
        "build_L: alpha_minus(phi, x) must equal -alpha_plus(phi, -x)");

  const TorusDiffeo dp = invert_diffeo(alpha_plus, 0, diffeo_tol);
  const TorusDiffeo dm = invert_diffeo(alpha_minus, 0, diffeo_tol);
  const ToeplitzOperator Cp = composition_operator(dp, 1.0, DiffeoDirection::fwd);
  const ToeplitzOperator Cm = composition_operator(dm, 1.0, DiffeoDirection::fwd);
  const ToeplitzOperator Cpi = composition_operator(dp, 1.0, DiffeoDirection::inv);
  const ToeplitzOperator Cmi = composition_operator(dm, 1.0, DiffeoDirection::inv);

  const ToeplitzOperator Pip = ToeplitzOperator::multiplier(box, [](int n) {
    return Complex(n > 0 ? 1.0 : (n == 0 ? 0.5 : 0.0), 0.0);
  });
  const ToeplitzOperator Pim = ToeplitzOperator::multiplier(box, [](int n) {
    return Complex(n < 0 ? 1.0 : (n == 0 ? 0.5 : 0.0), 0.0);
  });

  const ToeplitzOperator Id = ToeplitzOperator::identity(box);
  const ToeplitzOperator Lsc = compose(Cp, Pip) + compose(Cm, Pim);
  const ToeplitzOperator Gam = compose(Cpi, Pip) + compose(Cmi, Pim);
  const ToeplitzOperator Q = compose(Lsc, Gam) - Id;

  const double s0 = s_zero(box.nu);
  const double est = operator_norm(Q, s0, s0, NormMode::op).value;
  if (!(est < 0.5))
    throw std::runtime_error("build_L: defect too large for Neumann inversion");
  const ToeplitzOperator Linv_sc = compose(Gam, Id + neumann_series(Q));

  const ToeplitzOperator Lc = conj_op(Lsc);
  const ToeplitzOperator Gc = conj_op(Gam);
  const ToeplitzOperator Qc = compose(Lc, Gc) - Id;
  const ToeplitzOperator Linv_c = compose(Gc, Id + neumann_series(Qc));

  LOperator out{BlockOperator2x2::diag(Lsc, Lc),
                BlockOperator2x2::diag(Linv_sc, Linv_c),
                Lsc,
                Gam,
                Q,
                (Linv_c - conj_op(Linv_sc)).max_abs()};
  return out;
}

}  // namespace kgr
