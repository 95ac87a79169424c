#include "kgreduce/transport.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace kgr {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string melnikov_message(const MultiIndex& l, int j, int nu, double divisor,
                             double bound) {
  std::string s = "melnikov test failed at ell = (";
  for (int i = 0; i < nu; ++i) {
    if (i) s += ", ";
    s += std::to_string(l[i]);
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "), j = %d: divisor %.3e below bound %.3e", j,
                divisor, bound);
  return s + buf;
}

// |omega . l - (1 + c) j| >= 2 gamma <l>^{-tau} over the box minus the origin.
void melnikov_check(const LatticeBox& box, const Freq& omega, double c, double gamma,
                    double tau_dioph) {
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex l = box.phi_unflat(p);
    for (int j = -box.K_x; j <= box.K_x; ++j) {
      if (l.abs_sum() == 0 && j == 0) continue;
      const double divisor = std::abs(omega.dot(l) - (1.0 + c) * j);
      const double bound = 2.0 * gamma * std::pow(jap(l), -tau_dioph);
      if (divisor < bound) throw MelnikovFailure(l, j, box.nu, divisor, bound);
    }
  }
}

// Solves (omega . d_phi - (1 + c) dx) beta = S with beta mean-free; S must be
// mean-free up to roundoff (guaranteed by the drift choice).
TorusFunction divide_transport(const TorusFunction& S, const Freq& omega, double c) {
  const LatticeBox& box = S.box();
  TorusFunction beta(box);
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex l = box.phi_unflat(p);
    for (int j = -box.K_x; j <= box.K_x; ++j) {
      if (l.abs_sum() == 0 && j == 0) continue;
      const Complex divisor(0.0, omega.dot(l) - (1.0 + c) * j);
      beta.set_coeff(l, j, S.coeff(l, j) / divisor);
    }
  }
  return beta;
}

// Projection onto beta(phi, x) = -beta(-phi, -x) followed by realification.
TorusFunction project_joint_odd(const TorusFunction& u) {
  return enforce_real((u - u.reflect_phi().reflect_x()) * Complex(0.5, 0.0));
}

Complex ipow(int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return Complex(1.0, 0.0);
    case 1: return Complex(0.0, 1.0);
    case 2: return Complex(-1.0, 0.0);
    default: return Complex(0.0, -1.0);
  }
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Gauss-Legendre nodes and weights shifted to (0, 1).
constexpr int kGaussN = 8;
constexpr double kGaussNode[kGaussN] = {
    0.019855071751231884, 0.101666761293186630, 0.237233795041835507,
    0.408282678752175098, 0.591717321247824902, 0.762766204958164493,
    0.898333238706813370, 0.980144928248768116};
constexpr double kGaussWeight[kGaussN] = {
    0.050614268145188130, 0.111190517226687235, 0.156853322938943644,
    0.181341891689180991, 0.181341891689180991, 0.156853322938943644,
    0.111190517226687235, 0.050614268145188130};

// Evaluation grid of the substitution maps: point (r, m) carries the shifted
// abscissa X and the xi dilation factor G of the characteristic flow.
struct FlowGrid {
  int rows = 0;
  int n_x = 0;
  std::vector<std::array<double, kMaxNu>> phis;
  std::vector<double> xs;
  Eigen::MatrixXd X;
  Eigen::MatrixXd G;
};

FlowGrid base_grid(const LatticeBox& box) {
  FlowGrid g;
  const int n_phi = default_grid_phi(box);
  g.n_x = default_grid_x(box);
  g.rows = 1;
  for (int i = 0; i < box.nu; ++i) g.rows *= n_phi;
  g.phis.resize(static_cast<size_t>(g.rows));
  for (int r = 0; r < g.rows; ++r) {
    std::array<double, kMaxNu> phi{0.0, 0.0, 0.0};
    int rem = r;
    for (int i = box.nu - 1; i >= 0; --i) {
      phi[static_cast<size_t>(i)] = kTwoPi * (rem % n_phi) / n_phi;
      rem /= n_phi;
    }
    g.phis[static_cast<size_t>(r)] = phi;
  }
  g.xs.resize(static_cast<size_t>(g.n_x));
  for (int m = 0; m < g.n_x; ++m) g.xs[static_cast<size_t>(m)] = kTwoPi * m / g.n_x;
  g.X.resize(g.rows, g.n_x);
  g.G.resize(g.rows, g.n_x);
  return g;
}

// gamma^{tau, 0}: X = x + tau alpha(phi, x), G = 1 / (1 + tau alpha_x(phi, x)).
FlowGrid flow_grid(const TorusDiffeo& d, double tau) {
  const LatticeBox& box = d.box();
  FlowGrid g = base_grid(box);
  const int n_phi = default_grid_phi(box);
  const Eigen::MatrixXcd av = eval_grid(d.alpha, n_phi, g.n_x);
  const Eigen::MatrixXcd axv = eval_grid(d.alpha.dx(), n_phi, g.n_x);
  for (int r = 0; r < g.rows; ++r)
    for (int m = 0; m < g.n_x; ++m) {
      const double den = 1.0 + tau * axv(r, m).real();
      if (den <= 0.05)
        throw std::invalid_argument("egorov: flow degeneracy, 1 + tau dx alpha too small");
      g.X(r, m) = g.xs[static_cast<size_t>(m)] + tau * av(r, m).real();
      g.G(r, m) = 1.0 / den;
    }
  return g;
}

// gamma^{0, sigma} gamma^{tau, 0}: X = y + brv(phi, y) with y = x + tau alpha,
// G = 1 / ((1 + tau alpha_x)(1 + brv_x(phi, y))), brv the inverse-map function
// of x -> x + sigma alpha.
FlowGrid composite_grid(const TorusDiffeo& d, double tau, const TorusFunction& brv,
                        const TorusFunction& brv_dx) {
  FlowGrid g = flow_grid(d, tau);
  for (int r = 0; r < g.rows; ++r)
    for (int m = 0; m < g.n_x; ++m) {
      const double y = g.X(r, m);
      const double bx = brv_dx.eval(g.phis[static_cast<size_t>(r)], y).real();
      const double den = 1.0 + bx;
      if (den <= 0.05)
        throw std::invalid_argument("egorov: flow degeneracy on the return leg");
      g.X(r, m) = y + brv.eval(g.phis[static_cast<size_t>(r)], y).real();
      g.G(r, m) *= 1.0 / den;
    }
  return g;
}

// a(phi, X(phi, x), xi G(phi, x)) refit slice by slice onto the box.
Symbol flow_substitute(const Symbol& a, const FlowGrid& g, const LatticeBox& box) {
  const int n_phi = default_grid_phi(box);
  Symbol out(box, a.order_m(), a.K_xi(), a.tail_model());
  Eigen::MatrixXcd vals(g.rows, g.n_x);
  for (int xi = -a.K_xi(); xi <= a.K_xi(); ++xi) {
    for (int r = 0; r < g.rows; ++r)
      for (int m = 0; m < g.n_x; ++m)
        vals(r, m) = a.eval(g.phis[static_cast<size_t>(r)], g.X(r, m), xi * g.G(r, m));
    out.set_slice(xi, fit_grid(vals, box, n_phi, g.n_x));
  }
  return out;
}

uint64_t double_key(double t) {
  uint64_t u = 0;
  std::memcpy(&u, &t, sizeof(u));
  return u;
}

struct InverseLeg {
  TorusFunction brv;
  TorusFunction brv_dx;
};

struct EgorovCtx {
  const Symbol* w = nullptr;
  const TorusDiffeo* d = nullptr;
  LatticeBox box;
  double invert_tol = 1.0e-10;
  std::map<uint64_t, InverseLeg> legs;
  std::map<uint64_t, TorusFunction> avec;  // generator A(sigma) = alpha / (1 + sigma alpha_x)
  std::map<std::pair<int, uint64_t>, Symbol> levels;
};

const InverseLeg& inverse_leg(EgorovCtx& C, double sigma) {
  auto it = C.legs.find(double_key(sigma));
  if (it != C.legs.end()) return it->second;
  const TorusDiffeo ds =
      invert_diffeo(C.d->alpha * Complex(sigma, 0.0), 0, C.invert_tol);
  InverseLeg leg{ds.alpha_inv, ds.alpha_inv.dx()};
  return C.legs.emplace(double_key(sigma), std::move(leg)).first->second;
}

// A(sigma; phi, x) = alpha / (1 + sigma alpha_x), the xi-linear generator slope.
const TorusFunction& generator_slope(EgorovCtx& C, double sigma) {
  auto it = C.avec.find(double_key(sigma));
  if (it != C.avec.end()) return it->second;
  const int n_phi = default_grid_phi(C.box);
  const int n_x = default_grid_x(C.box);
  const Eigen::MatrixXcd av = eval_grid(C.d->alpha, n_phi, n_x);
  const Eigen::MatrixXcd axv = eval_grid(C.d->alpha.dx(), n_phi, n_x);
  Eigen::MatrixXcd vals(av.rows(), av.cols());
  for (int r = 0; r < av.rows(); ++r)
    for (int m = 0; m < av.cols(); ++m)
      vals(r, m) = av(r, m).real() / (1.0 + sigma * axv(r, m).real());
  TorusFunction A = enforce_real(fit_grid(vals, C.box, n_phi, n_x));
  return C.avec.emplace(double_key(sigma), std::move(A)).first->second;
}

const Symbol& q_level(EgorovCtx& C, int k, double tau);

// Graded source r_{m-k} at time sigma: each lower level h < k contributes
// -(1 / (w! i^w)) (d_xi^w q_{m-h}) (d_x^w chi) with w = k - h + 1 and
// chi = i A(sigma) xi, so the slice at xi carries the factor xi itself.
Symbol graded_source(EgorovCtx& C, int k, double sigma) {
  const Symbol& w0 = *C.w;
  Symbol r(C.box, w0.order_m() - k, w0.K_xi(), TailModel::power_law);
  const TorusFunction& A = generator_slope(C, sigma);
  for (int h = 0; h < k; ++h) {
    const int wd = k - h + 1;
    Symbol dq = q_level(C, h, sigma);
    for (int t = 0; t < wd; ++t) dq = dxi(dq);
    TorusFunction Aw = A;
    for (int t = 0; t < wd; ++t) Aw = Aw.dx();
    const Complex coef = -ipow(1 - wd) / factorial(wd);
    for (int xi = -w0.K_xi(); xi <= w0.K_xi(); ++xi) {
      if (xi == 0) continue;
      r.set_slice(xi, r.slice(xi) + multiply(dq.slice(xi), Aw) * (coef * double(xi)));
    }
  }
  return r;
}

const Symbol& q_level(EgorovCtx& C, int k, double tau) {
  const std::pair<int, uint64_t> key{k, double_key(tau)};
  auto it = C.levels.find(key);
  if (it != C.levels.end()) return it->second;
  Symbol q;
  if (k == 0) {
    q = flow_substitute(*C.w, flow_grid(*C.d, tau), C.box);
  } else {
    q = Symbol(C.box, C.w->order_m() - k, C.w->K_xi(), TailModel::power_law);
    if (tau > 0.0) {
      for (int i = 0; i < kGaussN; ++i) {
        const double sigma = tau * kGaussNode[i];
        const Symbol rs = graded_source(C, k, sigma);
        const InverseLeg& leg = inverse_leg(C, sigma);
        const FlowGrid g = composite_grid(*C.d, tau, leg.brv, leg.brv_dx);
        q += flow_substitute(rs, g, C.box) * Complex(tau * kGaussWeight[i], 0.0);
      }
      q.set_order_m(C.w->order_m() - k);
    }
  }
  return C.levels.emplace(key, std::move(q)).first->second;
}

// Row (l, j), column (lp, k) weights <j>^{m1} <k>^{m2} <l - lp>^{b}.
DenseOperator weight_dense(const DenseOperator& A, double m1, double m2, double b) {
  const LatticeBox& box = A.box();
  DenseOperator out = A;
  const int fc = box.flat_count();
  const int xc = box.x_count();
  for (int row = 0; row < out.mat().rows(); ++row) {
    const int ri = row % fc;
    const MultiIndex lr = box.phi_unflat(ri / xc);
    const int j = ri % xc - box.K_x;
    for (int col = 0; col < out.mat().cols(); ++col) {
      const int ci = col % fc;
      const MultiIndex lc = box.phi_unflat(ci / xc);
      const int kx = ci % xc - box.K_x;
      double f = std::pow(jap(j), m1) * std::pow(jap(kx), m2);
      if (b != 0.0) f *= std::pow(jap(lr - lc), b);
      out.mat()(row, col) *= f;
    }
  }
  return out;
}

double dense_max_abs(const DenseOperator& A) {
  return A.mat().cwiseAbs().maxCoeff();
}

double structure_defect(const DenseOperator& A, StructureKind kind) {
  return dense_max_abs(A - symmetrize(A, kind));
}

}  // namespace

MelnikovFailure::MelnikovFailure(const MultiIndex& l, int j, int nu, double div,
                                 double bnd)
    : std::runtime_error(melnikov_message(l, j, nu, div, bnd)),
      ell(l),
      j_x(j),
      divisor(div),
      bound(bnd) {}

StraighteningResult solve_transport(const TorusFunction& a, const Freq& omega,
                                    double gamma, double tau_dioph, double tol,
                                    int max_iter) {
  const LatticeBox& box = a.box();
  const SymmetryReport rep = symmetry_check(a);
  if (!rep.real_valued)
    throw std::invalid_argument("solve_transport: coefficient must be real valued");
  if (!rep.even_phi || !rep.even_x)
    throw std::invalid_argument(
        "solve_transport: coefficient must be even separately in phi and in x");
  if (!(gamma > 0.0 && gamma < 0.5))
    throw std::invalid_argument("solve_transport: gamma outside (0, 1/2)");

  const double s0 = s_zero(box.nu);
  TorusFunction beta(box);
  double c = 0.0;
  double res = 0.0;
  int sweeps = 0;
  bool converged = false;
  for (; sweeps <= max_iter; ++sweeps) {
    const TorusFunction dxb = beta.dx();
    const TorusFunction adxb = multiply(a, dxb);
    c = (a.mean() + adxb.mean()).real();
    melnikov_check(box, omega, c, gamma, tau_dioph);
    // Residual of omega . d_phi beta - (1 + a)(1 + dx beta) + (1 + c).
    const TorusFunction resid = beta.dphi(omega) - dxb - adxb - a +
                                TorusFunction::constant(box, Complex(c, 0.0));
    res = sobolev_norm(resid, s0);
    if (res <= tol) {
      converged = true;
      break;
    }
    // Exact regrouping of the equation: the source (a - c)(1 + dx beta) keeps
    // the fixed point on the equation itself while the left side carries the
    // full (1 + c) transport speed whose divisors the Melnikov test guards.
    const TorusFunction source =
        a - TorusFunction::constant(box, Complex(c, 0.0)) + adxb - dxb * Complex(c, 0.0);
    beta = project_joint_odd(divide_transport(source, omega, c));
  }
  if (!converged)
    throw std::runtime_error("solve_transport: no convergence within max_iter sweeps");

  StraighteningResult out;
  out.a_frak = c;
  out.beta_plus = beta;
  out.beta_minus = -beta.reflect_x();
  out.iterations = sweeps;

  // Independent check of the reflected direction:
  // omega . d_phi beta_- + (1 + a)(1 + dx beta_-) = 1 + c.
  const TorusFunction dxbm = out.beta_minus.dx();
  const TorusFunction resid_m = out.beta_minus.dphi(omega) + dxbm +
                                multiply(a, dxbm) + a -
                                TorusFunction::constant(box, Complex(c, 0.0));
  const double res_m = sobolev_norm(resid_m, s0);
  if (res_m > std::max(tol, 10.0 * res) + 1.0e-14)
    throw std::runtime_error("solve_transport: reflected direction residual above tolerance");
  out.residual = std::max(res, res_m);

  const double invert_tol = std::max(1.0e-10, 10.0 * tol);
  const TorusDiffeo dp = invert_diffeo(out.beta_plus, 0, invert_tol);
  out.alpha_plus = project_joint_odd(dp.alpha_inv);
  out.alpha_minus = -out.alpha_plus.reflect_x();
  // The reflected inverse must agree with the inverse of the reflected map.
  const TorusDiffeo dm = invert_diffeo(out.beta_minus, 0, invert_tol);
  const double cross = (dm.alpha_inv - out.alpha_minus).max_abs();
  if (cross > 100.0 * invert_tol)
    throw std::runtime_error("solve_transport: direction inverses are inconsistent");
  return out;
}

Symbol egorov_principal(const Symbol& w, const TorusDiffeo& d, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0))
    throw std::invalid_argument("egorov_principal: tau outside [0, 1]");
  if (!(w.box() == d.box()))
    throw std::invalid_argument("egorov_principal: symbol and map boxes differ");
  return flow_substitute(w, flow_grid(d, tau), w.box());
}

EgorovResult egorov_conjugate(const Symbol& w, const TorusDiffeo& d, int depth_rho,
                              int b) {
  if (depth_rho < 1)
    throw std::invalid_argument("egorov_conjugate: depth_rho must be >= 1");
  if (!(w.box() == d.box()))
    throw std::invalid_argument("egorov_conjugate: symbol and map boxes differ");
  const LatticeBox& box = w.box();

  EgorovCtx C;
  C.w = &w;
  C.d = &d;
  C.box = box;
  C.invert_tol = std::max(1.0e-10, 10.0 * d.newton_residual);

  EgorovResult out;
  out.depth_rho = depth_rho;
  out.q_principal = q_level(C, 0, 1.0);
  out.q_sub = Symbol(box, w.order_m() - 1.0, w.K_xi(), TailModel::power_law);
  for (int k = 1; k <= depth_rho; ++k) out.q_sub += q_level(C, k, 1.0);
  out.q_sub.set_order_m(w.order_m() - 1.0);

  const ToeplitzOperator Cf = composition_operator(d, 1.0, DiffeoDirection::fwd);
  const ToeplitzOperator Ci = composition_operator(d, 1.0, DiffeoDirection::inv);
  const DenseOperator lhs =
      compose(compose(DenseOperator::from_toeplitz(Cf),
                      DenseOperator::from_toeplitz(quantize(w))),
              DenseOperator::from_toeplitz(Ci));
  const DenseOperator rhs =
      DenseOperator::from_toeplitz(quantize(out.q_principal + out.q_sub));
  const DenseOperator R = lhs - rhs;

  const double s_st = s_star(box.nu);
  const double s1w = s_zero(box.nu) + 1.0;
  out.remainder_couple = bony_split(R, s_st, s1w);
  const double M = std::max(0.0, double(depth_rho) + 1.0 - w.order_m());
  out.remainder_norm_plain =
      couple_norm(bony_split(weight_dense(R, M / 2.0, M / 2.0, 0.0), s_st, s1w), s1w);
  out.remainder_norm_weighted = couple_norm(
      bony_split(weight_dense(R, M / 2.0, M / 2.0, double(b)), s_st, s1w), s1w);
  return out;
}

StraightenResult straighten_first_order(const TorusFunction& a, const Freq& omega,
                                        double gamma, double M, int b) {
  const LatticeBox& box = a.box();
  StraightenResult out;
  out.transport = solve_transport(a, omega, gamma, tau_floor(box.nu) + 0.5);
  out.a_frak = out.transport.a_frak;
  out.L_pair = build_L(out.transport.alpha_plus, out.transport.alpha_minus);

  const int n = box.flat_count();
  const ToeplitzOperator absD = ToeplitzOperator::multiplier(
      box, [](int j) { return Complex(std::abs(j), 0.0); });
  const ToeplitzOperator B =
      compose(ToeplitzOperator::from_function(a) + ToeplitzOperator::identity(box), absD);

  DenseOperator A2(box, 2);
  DenseOperator T2(box, 2);
  for (int s = 0; s < 2; ++s) {
    const double sgn = s == 0 ? -1.0 : 1.0;
    for (int p = 0; p < box.phi_count(); ++p) {
      const MultiIndex l = box.phi_unflat(p);
      for (int j = -box.K_x; j <= box.K_x; ++j) {
        const int idx = A2.flat(s, l, j);
        A2.mat()(idx, idx) = Complex(0.0, omega.dot(l));
        T2.mat()(idx, idx) =
            Complex(0.0, omega.dot(l) + sgn * (1.0 + out.a_frak) * std::abs(j));
      }
    }
  }
  A2.mat().block(0, 0, n, n) += Complex(0.0, -1.0) * DenseOperator::from_toeplitz(B).mat();
  A2.mat().block(n, n, n, n) +=
      Complex(0.0, 1.0) * DenseOperator::from_toeplitz(conj_op(B)).mat();

  const DenseOperator R =
      compose(compose(DenseOperator::from_block(out.L_pair.L), A2),
              DenseOperator::from_block(out.L_pair.L_inv)) -
      T2;

  const double scale = 1.0 + dense_max_abs(R);
  if (structure_defect(R, StructureKind::reversible) > 1.0e-9 * scale)
    throw std::runtime_error("straighten_first_order: remainder is not reversible");
  if (structure_defect(R, StructureKind::parity_preserving) > 1.0e-9 * scale)
    throw std::runtime_error("straighten_first_order: remainder is not parity preserving");

  const double s_st = s_star(box.nu);
  const double s1w = s_zero(box.nu) + 1.0;
  out.remainder_couple = bony_split(R, s_st, s1w);
  out.remainder_norm_plain =
      couple_norm(bony_split(weight_dense(R, M / 2.0, M / 2.0, 0.0), s_st, s1w), s1w);
  out.remainder_norm_weighted = couple_norm(
      bony_split(weight_dense(R, M / 2.0, M / 2.0, double(b)), s_st, s1w), s1w);
  return out;
}

}  // namespace kgr
