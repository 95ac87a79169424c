#include "kgreduce/symbol.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kgreduce/bony.h"

namespace kgr {

namespace {

int default_k_xi(const LatticeBox& box) { return 2 * box.K_x + 4; }

double smoothstep(double t) {
  t = std::clamp(t, 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

// 0 for |x| <= 1/2, 1 for |x| >= 2/3; on the integer lattice the transition
// region is empty, so values are exactly 0/1 there.
double ramp_abs(double x) {
  const double t = std::abs(x);
  if (t <= 0.5) return 0.0;
  if (t >= 2.0 / 3.0) return 1.0;
  return smoothstep((t - 0.5) / (2.0 / 3.0 - 0.5));
}

double sgn_ramp(double x) { return x >= 0.0 ? ramp_abs(x) : -ramp_abs(-x); }

}  // namespace

Symbol::Symbol(const LatticeBox& box, double order_m, int K_xi, TailModel tail)
    : box_(box),
      order_m_(order_m),
      K_xi_(K_xi < 0 ? default_k_xi(box) : K_xi),
      tail_(tail) {
  if (K_xi_ < 2 * box.K_x)
    throw std::invalid_argument("Symbol: K_xi must be at least 2 K_x");
  slices_.assign(static_cast<size_t>(2 * K_xi_ + 1), TorusFunction(box));
}

Complex Symbol::closed_form(double xi) const {
  double v = 0.0;
  switch (mult_) {
    case MultiplierKind::none:
      throw std::logic_error("Symbol::closed_form on a tabulated symbol");
    case MultiplierKind::one:
      v = 1.0;
      break;
    case MultiplierKind::constant:
      return scale_ * value_;
    case MultiplierKind::xi:
      v = xi;
      break;
    case MultiplierKind::d_m:
      v = std::sqrt(xi * xi + mass_);
      break;
    case MultiplierKind::d_m_inv:
      v = 1.0 / std::sqrt(xi * xi + mass_);
      break;
    case MultiplierKind::xi_d_m_inv:
      v = xi / std::sqrt(xi * xi + mass_);
      break;
    case MultiplierKind::jap_pow:
      v = std::pow(jap(xi), param_);
      break;
    case MultiplierKind::chi:
      v = ramp_abs(xi);
      break;
    case MultiplierKind::chi_plus:
      v = 0.5 * (1.0 + sgn_ramp(xi));
      break;
    case MultiplierKind::chi_minus:
      v = 0.5 * (1.0 - sgn_ramp(xi));
      break;
    case MultiplierKind::sign_xi:
      v = sgn_ramp(xi);
      break;
    case MultiplierKind::abs_chi:
      v = std::abs(xi) * ramp_abs(xi);
      break;
    case MultiplierKind::d_m_tail:
      v = std::sqrt(xi * xi + mass_) - std::abs(xi) * ramp_abs(xi);
      break;
  }
  return scale_ * v;
}

const TorusFunction& Symbol::slice(int xi) const {
  if (std::abs(xi) > K_xi_) throw std::out_of_range("Symbol::slice outside the xi band");
  return slices_[static_cast<size_t>(xi + K_xi_)];
}

TorusFunction Symbol::slice_at(int xi) const {
  if (std::abs(xi) <= K_xi_) return slices_[static_cast<size_t>(xi + K_xi_)];
  if (mult_ != MultiplierKind::none)
    return TorusFunction::constant(box_, closed_form(xi));
  if (tail_ == TailModel::zero) return TorusFunction(box_);
  const int edge = xi > 0 ? K_xi_ : -K_xi_;
  const double factor = std::pow(jap(double(xi)) / jap(double(K_xi_)), order_m_);
  return slices_[static_cast<size_t>(edge + K_xi_)] * Complex(factor, 0.0);
}

void Symbol::set_slice(int xi, TorusFunction f) {
  if (std::abs(xi) > K_xi_)
    throw std::out_of_range("Symbol::set_slice outside the xi band");
  if (!(f.box() == box_)) throw std::invalid_argument("Symbol::set_slice box mismatch");
  slices_[static_cast<size_t>(xi + K_xi_)] = std::move(f);
  mult_ = MultiplierKind::none;
}

TorusFunction Symbol::slice_real(double xi) const {
  if (mult_ != MultiplierKind::none)
    return TorusFunction::constant(box_, closed_form(xi));
  const double r = std::round(xi);
  if (std::abs(xi - r) < 1e-12 && std::abs(r) <= double(K_xi_))
    return slice_at(int(r));
  if (std::abs(xi) > double(K_xi_)) {
    if (tail_ == TailModel::zero) return TorusFunction(box_);
    const int edge = xi > 0 ? K_xi_ : -K_xi_;
    const double factor = std::pow(jap(xi) / jap(double(K_xi_)), order_m_);
    return slices_[static_cast<size_t>(edge + K_xi_)] * Complex(factor, 0.0);
  }
  const int lo = std::clamp(int(std::floor(xi)) - 1, -K_xi_, K_xi_ - 3);
  TorusFunction out(box_);
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int t = 0; t < 4; ++t)
      if (t != i) w *= (xi - double(lo + t)) / double(i - t);
    out += slice_at(lo + i) * Complex(w, 0.0);
  }
  return out;
}

Complex Symbol::eval_integer_slice(int xi, const std::array<double, kMaxNu>& phi,
                                   double x) const {
  if (std::abs(xi) <= K_xi_) return slices_[static_cast<size_t>(xi + K_xi_)].eval(phi, x);
  if (tail_ == TailModel::zero) return Complex(0.0, 0.0);
  const int edge = xi > 0 ? K_xi_ : -K_xi_;
  const double factor = std::pow(jap(double(xi)) / jap(double(K_xi_)), order_m_);
  return factor * slices_[static_cast<size_t>(edge + K_xi_)].eval(phi, x);
}

Complex Symbol::eval(const std::array<double, kMaxNu>& phi, double x, double xi) const {
  if (mult_ != MultiplierKind::none) return closed_form(xi);
  const double r = std::round(xi);
  if (std::abs(xi - r) < 1e-12) return eval_integer_slice(int(r), phi, x);
  if (std::abs(xi) > double(K_xi_)) {
    if (tail_ == TailModel::zero) return Complex(0.0, 0.0);
    const int edge = xi > 0 ? K_xi_ : -K_xi_;
    const double factor = std::pow(jap(xi) / jap(double(K_xi_)), order_m_);
    return factor * slices_[static_cast<size_t>(edge + K_xi_)].eval(phi, x);
  }
  const int lo = std::clamp(int(std::floor(xi)) - 1, -K_xi_, K_xi_ - 3);
  Complex out(0.0, 0.0);
  for (int i = 0; i < 4; ++i) {
    double w = 1.0;
    for (int t = 0; t < 4; ++t)
      if (t != i) w *= (xi - double(lo + t)) / double(i - t);
    out += w * eval_integer_slice(lo + i, phi, x);
  }
  return out;
}

double Symbol::max_abs() const {
  double m = 0.0;
  for (const TorusFunction& s : slices_) m = std::max(m, s.max_abs());
  return m;
}

Symbol& Symbol::operator+=(const Symbol& o) {
  if (!(box_ == o.box_) || K_xi_ != o.K_xi_)
    throw std::invalid_argument("Symbol: shape mismatch");
  for (size_t i = 0; i < slices_.size(); ++i) slices_[i] += o.slices_[i];
  order_m_ = std::max(order_m_, o.order_m_);
  if (tail_ == TailModel::zero && o.tail_ == TailModel::zero)
    tail_ = TailModel::zero;
  else
    tail_ = TailModel::power_law;
  mult_ = MultiplierKind::none;
  scale_ = Complex(1.0, 0.0);
  return *this;
}

Symbol& Symbol::operator-=(const Symbol& o) {
  Symbol neg = o;
  neg *= Complex(-1.0, 0.0);
  return *this += neg;
}

Symbol& Symbol::operator*=(Complex z) {
  for (TorusFunction& s : slices_) s *= z;
  if (mult_ != MultiplierKind::none) scale_ *= z;
  return *this;
}

Symbol Symbol::multiplier(const LatticeBox& box, MultiplierKind kind, double mass,
                          double param, Complex value, int K_xi) {
  double order = 0.0;
  switch (kind) {
    case MultiplierKind::xi:
    case MultiplierKind::d_m:
    case MultiplierKind::abs_chi:
      order = 1.0;
      break;
    case MultiplierKind::d_m_inv:
    case MultiplierKind::d_m_tail:
      order = -1.0;
      break;
    case MultiplierKind::jap_pow:
      order = param;
      break;
    default:
      order = 0.0;
      break;
  }
  Symbol a(box, order, K_xi);
  a.mult_ = kind;
  a.mass_ = mass;
  a.param_ = param;
  a.value_ = value;
  for (int xi = -a.K_xi_; xi <= a.K_xi_; ++xi)
    a.slices_[static_cast<size_t>(xi + a.K_xi_)] =
        TorusFunction::constant(box, a.closed_form(double(xi)));
  return a;
}

Symbol Symbol::from_x_function(const TorusFunction& f, double order_m, int K_xi) {
  Symbol a(f.box(), order_m, K_xi);
  for (TorusFunction& s : a.slices_) s = f;
  return a;
}

ToeplitzOperator quantize(const Symbol& a) {
  const LatticeBox& box = a.box();
  ToeplitzOperator T(box);
  for (int r = 0; r < T.band_count(); ++r) {
    const MultiIndex ld = T.band_unflat(r);
    Eigen::MatrixXcd& blk = T.block_at(r);
    for (int k = -box.K_x; k <= box.K_x; ++k) {
      const TorusFunction& sl = a.slice(k);
      for (int j = -box.K_x; j <= box.K_x; ++j) {
        if (std::abs(j - k) > box.K_x) continue;
        blk(box.x_col(j), box.x_col(k)) = sl.coeff(ld, j - k);
      }
    }
  }
  return T;
}

Symbol conj_reflect(const Symbol& a) {
  Symbol out(a.box(), a.order_m(), a.K_xi(), a.tail_model());
  for (int xi = -a.K_xi(); xi <= a.K_xi(); ++xi)
    out.set_slice(xi, a.slice_at(-xi).conj());
  return out;
}

Symbol dxi(const Symbol& a, int fd_order) {
  if (fd_order != 2 && fd_order != 4)
    throw std::invalid_argument("dxi: finite-difference order must be 2 or 4");
  Symbol out(a.box(), a.order_m() - 1.0, a.K_xi(), TailModel::power_law);
  for (int xi = -a.K_xi(); xi <= a.K_xi(); ++xi) {
    TorusFunction d(a.box());
    if (fd_order == 2) {
      d = (a.slice_at(xi + 1) - a.slice_at(xi - 1)) * Complex(0.5, 0.0);
    } else {
      d = (a.slice_at(xi - 2) - a.slice_at(xi + 2)) * Complex(1.0 / 12.0, 0.0) +
          (a.slice_at(xi + 1) - a.slice_at(xi - 1)) * Complex(8.0 / 12.0, 0.0);
    }
    out.set_slice(xi, std::move(d));
  }
  return out;
}

double symbol_norm(const Symbol& a, double s, int p) {
  if (p < 0) throw std::invalid_argument("symbol_norm: negative derivative depth");
  if (2 * p > a.K_xi())
    throw std::invalid_argument("symbol_norm: p too large for the K_xi stencil");
  double best = 0.0;
  Symbol cur = a;
  for (int beta = 0; beta <= p; ++beta) {
    if (beta > 0) cur = dxi(cur);
    double sup = 0.0;
    for (int xi = -a.K_xi(); xi <= a.K_xi(); ++xi) {
      const double w = std::pow(jap(double(xi)), -a.order_m() + double(beta));
      sup = std::max(sup, sobolev_norm(cur.slice(xi), s) * w);
    }
    best = std::max(best, sup);
  }
  return best;
}

namespace {

// sum over n in [n_lo, n_hi) of (1/(n! i^n)) d_xi^n a . d_x^n b, slicewise.
Symbol graded_sum(const Symbol& a, const Symbol& b, int n_lo, int n_hi) {
  const LatticeBox& box = a.box();
  Symbol out(box, a.order_m() + b.order_m(), a.K_xi(), TailModel::power_law);
  Symbol da = a;
  std::vector<TorusFunction> db;
  db.reserve(static_cast<size_t>(2 * b.K_xi() + 1));
  for (int xi = -b.K_xi(); xi <= b.K_xi(); ++xi) db.push_back(b.slice(xi));
  Complex fac(1.0, 0.0);
  for (int n = 0; n < n_hi; ++n) {
    if (n > 0) {
      da = dxi(da);
      for (TorusFunction& f : db) f = f.dx();
      fac /= Complex(0.0, 1.0) * double(n);
    }
    if (n < n_lo) continue;
    for (int xi = -out.K_xi(); xi <= out.K_xi(); ++xi)
      out.set_slice(xi, out.slice(xi) + multiply(da.slice(xi), db[static_cast<size_t>(
                                                     xi + b.K_xi())]) *
                                            fac);
  }
  return out;
}

Symbol sharp_full(const Symbol& a, const Symbol& b) {
  const LatticeBox& box = a.box();
  const int pc = box.phi_count();
  Symbol out(box, a.order_m() + b.order_m(), a.K_xi(), TailModel::power_law);
  for (int xi = -out.K_xi(); xi <= out.K_xi(); ++xi) {
    TorusFunction acc(box);
    const TorusFunction& b_sl = b.slice(xi);
    double dropped2 = 0.0;
    double a_budget = 0.0;
    for (int j = -box.K_x; j <= box.K_x; ++j) {
      bool used = false;
      TorusFunction a_sl;
      for (int pg = 0; pg < pc; ++pg) {
        const Complex g = b_sl.data()(pg, box.x_col(j));
        if (g == Complex(0.0, 0.0)) continue;
        if (!used) {
          a_sl = a.slice_at(xi + j);
          a_budget = std::max(a_budget, a_sl.truncation_budget());
          used = true;
        }
        const MultiIndex lg = box.phi_unflat(pg);
        for (int pa = 0; pa < pc; ++pa) {
          const MultiIndex la = box.phi_unflat(pa);
          const MultiIndex lo = lg + la;
          const bool phi_ok = box.contains_phi(lo);
          for (int ka = -box.K_x; ka <= box.K_x; ++ka) {
            const Complex ca = a_sl.data()(pa, box.x_col(ka));
            if (ca == Complex(0.0, 0.0)) continue;
            const Complex v = ca * g;
            const int ko = ka + j;
            if (phi_ok && std::abs(ko) <= box.K_x)
              acc.data()(box.phi_flat(lo), box.x_col(ko)) += v;
            else
              dropped2 += std::norm(v);
          }
        }
      }
    }
    acc.add_truncation_budget(std::sqrt(dropped2) + b_sl.truncation_budget() + a_budget);
    out.set_slice(xi, std::move(acc));
  }
  return out;
}

}  // namespace

Symbol compose_sharp(const Symbol& a, const Symbol& b, SharpMode mode) {
  if (!(a.box() == b.box()) || a.K_xi() != b.K_xi())
    throw std::invalid_argument("compose_sharp: symbol shape mismatch");
  constexpr int kMaxDepth = 8;
  switch (mode.kind) {
    case SharpMode::Kind::full:
      return sharp_full(a, b);
    case SharpMode::Kind::graded: {
      if (mode.n > kMaxDepth)
        throw std::invalid_argument("compose_sharp: graded depth stencil overflow");
      Symbol g = graded_sum(a, b, mode.n, mode.n + 1);
      g.set_order_m(a.order_m() + b.order_m() - double(mode.n));
      return g;
    }
    case SharpMode::Kind::below: {
      if (mode.n > kMaxDepth)
        throw std::invalid_argument("compose_sharp: below depth stencil overflow");
      return graded_sum(a, b, 0, mode.n);
    }
    case SharpMode::Kind::remainder: {
      if (mode.n > kMaxDepth)
        throw std::invalid_argument("compose_sharp: remainder depth stencil overflow");
      Symbol r = sharp_full(a, b);
      r -= graded_sum(a, b, 0, mode.n);
      r.set_order_m(a.order_m() + b.order_m() - double(mode.n));
      return r;
    }
  }
  throw std::logic_error("compose_sharp: unreachable");
}

Symbol star_commutator(const Symbol& a, const Symbol& b, SharpMode mode) {
  Symbol s = compose_sharp(a, b, mode);
  s -= compose_sharp(b, a, mode);
  const double base = a.order_m() + b.order_m();
  switch (mode.kind) {
    case SharpMode::Kind::full:
    case SharpMode::Kind::below:
      s.set_order_m(base - 1.0);
      break;
    case SharpMode::Kind::graded:
    case SharpMode::Kind::remainder:
      s.set_order_m(base - double(std::max(mode.n, 1)));
      break;
  }
  return s;
}

std::pair<Symbol, Symbol> neumann_inverse(const Symbol& a, int rho) {
  if (rho < 2) throw std::invalid_argument("neumann_inverse: rho must be at least 2");
  if (a.order_m() > -1.0 + 1e-12)
    throw std::invalid_argument("neumann_inverse: symbol order must be <= -1");
  const double s0 = s_zero(a.box().nu);
  const double est = operator_norm(quantize(a), s0, s0, NormMode::op).value;
  if (!(est <= 0.5))
    throw std::invalid_argument("neumann_inverse: contraction threshold violated");

  Symbol g_low(a.box(), 2.0 * a.order_m(), a.K_xi(), TailModel::power_law);
  Symbol power = a;
  for (int k = 2; k <= rho - 1; ++k) {
    power = compose_sharp(power, a, SharpMode::below(rho));
    g_low += power;
  }
  g_low.set_order_m(2.0 * a.order_m());

  Symbol term = compose_sharp(a, a, SharpMode::full());
  Symbol g_full = term;
  for (int k = 3; k <= 200; ++k) {
    term = compose_sharp(term, a, SharpMode::full());
    g_full += term;
    if (term.max_abs() < 1e-14 * (1.0 + g_full.max_abs())) break;
  }
  Symbol g_high = g_full - g_low;
  g_high.set_order_m(-double(rho));
  return {g_low, g_high};
}

ToeplitzOperator exp_symbol(const Symbol& a, double tau) {
  const double s0 = s_zero(a.box().nu);
  if (!(symbol_norm(a, s0, 0) < 1.0))
    throw std::invalid_argument("exp_symbol: symbol norm threshold violated");
  ToeplitzOperator B = quantize(a);
  B *= Complex(tau, 0.0);
  const double est = operator_norm(B, s0, s0, NormMode::op).value;
  int squarings = 0;
  if (est > 0.25)
    squarings = std::min(40, int(std::ceil(std::log2(est / 0.25))));
  B *= Complex(std::pow(2.0, -squarings), 0.0);
  ToeplitzOperator acc = ToeplitzOperator::identity(a.box());
  ToeplitzOperator term = acc;
  for (int k = 1; k <= 30; ++k) {
    term = compose(term, B);
    term *= Complex(1.0 / double(k), 0.0);
    acc += term;
    if (term.frobenius() < 1e-16 * (1.0 + acc.frobenius())) break;
  }
  for (int i = 0; i < squarings; ++i) acc = compose(acc, acc);
  return acc;
}

Symbol cutoffs(const LatticeBox& box, CutoffKind kind, int K_xi) {
  switch (kind) {
    case CutoffKind::chi:
      return Symbol::multiplier(box, MultiplierKind::chi, 1.0, 0.0, Complex(1.0, 0.0),
                                K_xi);
    case CutoffKind::chi_plus:
      return Symbol::multiplier(box, MultiplierKind::chi_plus, 1.0, 0.0,
                                Complex(1.0, 0.0), K_xi);
    case CutoffKind::chi_minus:
      return Symbol::multiplier(box, MultiplierKind::chi_minus, 1.0, 0.0,
                                Complex(1.0, 0.0), K_xi);
    case CutoffKind::sign:
      return Symbol::multiplier(box, MultiplierKind::sign_xi, 1.0, 0.0,
                                Complex(1.0, 0.0), K_xi);
  }
  throw std::logic_error("cutoffs: unreachable");
}

SymbolStructure symbol_structure(const Symbol& a) {
  SymbolStructure st;
  for (int xi = -a.K_xi(); xi <= a.K_xi(); ++xi) {
    const TorusFunction& sl = a.slice(xi);
    const TorusFunction refl = a.slice_at(-xi);
    st.real_to_real = std::max(st.real_to_real, (sl - refl.conj()).max_abs());
    st.reversible =
        std::max(st.reversible, (sl.reflect_phi() + refl.conj()).max_abs());
    st.reversibility_preserving =
        std::max(st.reversibility_preserving, (sl.reflect_phi() - refl.conj()).max_abs());
    st.parity = std::max(st.parity, (sl - refl.reflect_x()).max_abs());
  }
  return st;
}

SymbolMatrix2x2 SymbolMatrix2x2::diag(const Symbol& p, const Symbol& m) {
  SymbolMatrix2x2 A;
  A.at(0, 0) = p;
  A.at(1, 1) = m;
  A.at(0, 1) = Symbol(p.box(), p.order_m(), p.K_xi(), TailModel::zero);
  A.at(1, 0) = A.at(0, 1);
  return A;
}

SymbolMatrix2x2 SymbolMatrix2x2::from_upper_row(const Symbol& pp, const Symbol& pm) {
  SymbolMatrix2x2 A;
  A.at(0, 0) = pp;
  A.at(0, 1) = pm;
  A.at(1, 0) = conj_reflect(pm);
  A.at(1, 1) = conj_reflect(pp);
  return A;
}

BlockOperator2x2 quantize(const SymbolMatrix2x2& A) {
  BlockOperator2x2 T(A.at(0, 0).box());
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) T.block(s, sp) = quantize(A.at(s, sp));
  return T;
}

SymbolMatrix2x2 matrix_sharp(const SymbolMatrix2x2& A, const SymbolMatrix2x2& B,
                             SharpMode mode) {
  SymbolMatrix2x2 C;
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) {
      Symbol t = compose_sharp(A.at(s, 0), B.at(0, sp), mode);
      t += compose_sharp(A.at(s, 1), B.at(1, sp), mode);
      C.at(s, sp) = std::move(t);
    }
  return C;
}

BonyCouple couple_from_pseudo(const Symbol& a, double n1, double n2) {
  if (std::abs(n1 + n2 - a.order_m()) > 1e-9)
    throw std::invalid_argument("couple_from_pseudo: n1 + n2 must equal the symbol order");
  ToeplitzOperator op = quantize(a);
  op = filter_japD_pow(op, -n1, Side::left);
  op = filter_japD_pow(op, -n2, Side::right);
  return bony_split(op);
}

}  // namespace kgr
