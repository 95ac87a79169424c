#include "kgreduce/torus_function.h"

#include <cmath>

namespace kgr {

namespace {

// Applies T (rows out, cols in) along one axis of a row-major tensor.
std::vector<Complex> transform_axis(const std::vector<Complex>& in, std::vector<int>& dims,
                                    int axis, const Eigen::MatrixXcd& T) {
  int pre = 1, post = 1;
  for (int i = 0; i < axis; ++i) pre *= dims[static_cast<size_t>(i)];
  for (size_t i = static_cast<size_t>(axis) + 1; i < dims.size(); ++i) post *= dims[i];
  const int n_in = dims[static_cast<size_t>(axis)];
  const int n_out = static_cast<int>(T.rows());

  std::vector<Complex> out(static_cast<size_t>(pre) * n_out * post, Complex(0.0, 0.0));
  for (int p = 0; p < pre; ++p) {
    for (int o = 0; o < n_out; ++o) {
      Complex* dst = out.data() + (static_cast<size_t>(p) * n_out + o) * post;
      for (int i = 0; i < n_in; ++i) {
        const Complex w = T(o, i);
        if (w == Complex(0.0, 0.0)) continue;
        const Complex* src = in.data() + (static_cast<size_t>(p) * n_in + i) * post;
        for (int q = 0; q < post; ++q) dst[q] += w * src[q];
      }
    }
  }
  dims[static_cast<size_t>(axis)] = n_out;
  return out;
}

// DFT matrix e^{i k theta_g} with k = row_index - K on an n-point uniform grid.
Eigen::MatrixXcd synthesis_matrix(int n, int K) {
  Eigen::MatrixXcd T(n, 2 * K + 1);
  for (int g = 0; g < n; ++g) {
    const double theta = 2.0 * M_PI * g / n;
    for (int k = -K; k <= K; ++k) T(g, k + K) = std::polar(1.0, k * theta);
  }
  return T;
}

}  // namespace

TorusFunction TorusFunction::dphi(const Freq& omega) const {
  TorusFunction r(box_);
  for (int p = 0; p < box_.phi_count(); ++p) {
    const MultiIndex l = box_.phi_unflat(p);
    const Complex w(0.0, omega.dot(l));
    r.data_.row(p) = w * data_.row(p);
  }
  r.truncation_budget_ = truncation_budget_;
  return r;
}

TorusFunction TorusFunction::dx() const {
  TorusFunction r(box_);
  for (int j = -box_.K_x; j <= box_.K_x; ++j)
    r.data_.col(box_.x_col(j)) = Complex(0.0, j) * data_.col(box_.x_col(j));
  r.truncation_budget_ = truncation_budget_;
  return r;
}

TorusFunction TorusFunction::reflect_phi() const {
  TorusFunction r(box_);
  for (int p = 0; p < box_.phi_count(); ++p) {
    const MultiIndex l = box_.phi_unflat(p);
    r.data_.row(box_.phi_flat(-l)) = data_.row(p);
  }
  r.truncation_budget_ = truncation_budget_;
  return r;
}

TorusFunction TorusFunction::reflect_x() const {
  TorusFunction r(box_);
  for (int j = -box_.K_x; j <= box_.K_x; ++j)
    r.data_.col(box_.x_col(-j)) = data_.col(box_.x_col(j));
  r.truncation_budget_ = truncation_budget_;
  return r;
}

TorusFunction TorusFunction::conj() const {
  TorusFunction r(box_);
  for (int p = 0; p < box_.phi_count(); ++p) {
    const MultiIndex l = box_.phi_unflat(p);
    const int q = box_.phi_flat(-l);
    for (int j = -box_.K_x; j <= box_.K_x; ++j)
      r.data_(q, box_.x_col(-j)) = std::conj(data_(p, box_.x_col(j)));
  }
  r.truncation_budget_ = truncation_budget_;
  return r;
}

Complex TorusFunction::eval(const std::array<double, kMaxNu>& phi, double x) const {
  Complex s(0.0, 0.0);
  for (int p = 0; p < box_.phi_count(); ++p) {
    const MultiIndex l = box_.phi_unflat(p);
    double lphi = 0.0;
    for (int i = 0; i < box_.nu; ++i) lphi += l[i] * phi[static_cast<size_t>(i)];
    for (int j = -box_.K_x; j <= box_.K_x; ++j) {
      const Complex c = data_(p, box_.x_col(j));
      if (c != Complex(0.0, 0.0)) s += c * std::polar(1.0, lphi + j * x);
    }
  }
  return s;
}

TorusFunction& TorusFunction::operator+=(const TorusFunction& o) {
  if (!(box_ == o.box_)) throw std::invalid_argument("TorusFunction: box mismatch");
  data_ += o.data_;
  truncation_budget_ += o.truncation_budget_;
  return *this;
}

TorusFunction& TorusFunction::operator-=(const TorusFunction& o) {
  if (!(box_ == o.box_)) throw std::invalid_argument("TorusFunction: box mismatch");
  data_ -= o.data_;
  truncation_budget_ += o.truncation_budget_;
  return *this;
}

TorusFunction& TorusFunction::operator*=(Complex z) {
  data_ *= z;
  return *this;
}

TorusFunction TorusFunction::operator-() const {
  TorusFunction r = *this;
  r.data_ = -r.data_;
  return r;
}

TorusFunction TorusFunction::constant(const LatticeBox& box, Complex value) {
  TorusFunction u(box);
  u.set_coeff(MultiIndex{}, 0, value);
  return u;
}

TorusFunction TorusFunction::mode(const LatticeBox& box, const MultiIndex& l, int j,
                                  Complex c) {
  TorusFunction u(box);
  u.set_coeff(l, j, c);
  return u;
}

TorusFunction TorusFunction::cosine(const LatticeBox& box, const MultiIndex& l, int j,
                                    double amplitude) {
  TorusFunction u(box);
  u.add_coeff(l, j, Complex(amplitude / 2.0, 0.0));
  u.add_coeff(-l, -j, Complex(amplitude / 2.0, 0.0));
  return u;
}

TorusFunction TorusFunction::sine(const LatticeBox& box, const MultiIndex& l, int j,
                                  double amplitude) {
  TorusFunction u(box);
  u.add_coeff(l, j, Complex(0.0, -amplitude / 2.0));
  u.add_coeff(-l, -j, Complex(0.0, amplitude / 2.0));
  return u;
}

double sobolev_norm(const TorusFunction& u, double s) {
  const LatticeBox& box = u.box();
  double acc = 0.0;
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex l = box.phi_unflat(p);
    for (int j = -box.K_x; j <= box.K_x; ++j) {
      const double a = std::abs(u.data()(p, box.x_col(j)));
      if (a == 0.0) continue;
      acc += std::pow(jap(l, j), 2.0 * s) * a * a;
    }
  }
  return std::sqrt(acc);
}

double lip_norm(const ParamFamily& fam, double s, double gamma) {
  if (fam.size() == 0) throw std::invalid_argument("lip_norm: empty family");
  if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("lip_norm: gamma range");
  double sup = 0.0;
  for (const TorusFunction& u : fam.values) sup = std::max(sup, sobolev_norm(u, s));
  if (fam.size() == 1) return sup;
  if (s < 1.0) throw std::invalid_argument("lip_norm: s < 1 with several samples");
  double lip = 0.0;
  for (size_t a = 0; a < fam.size(); ++a) {
    for (size_t b = a + 1; b < fam.size(); ++b) {
      const double d = fam.omegas[a].dist(fam.omegas[b]);
      if (d == 0.0) throw std::invalid_argument("lip_norm: repeated frequency sample");
      lip = std::max(lip, sobolev_norm(fam.values[a] - fam.values[b], s - 1.0) / d);
    }
  }
  return sup + gamma * lip;
}

TorusFunction multiply(const TorusFunction& u, const TorusFunction& v) {
  const LatticeBox& box = u.box();
  if (!(box == v.box())) throw std::invalid_argument("multiply: box mismatch");

  // Full convolution on the doubled box, then projection back.
  LatticeBox wide{box.nu, 2 * box.K_phi, 2 * box.K_x};
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(wide.phi_count(), wide.x_count());
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex lu = box.phi_unflat(p);
    for (int ju = -box.K_x; ju <= box.K_x; ++ju) {
      const Complex cu = u.data()(p, box.x_col(ju));
      if (cu == Complex(0.0, 0.0)) continue;
      for (int q = 0; q < box.phi_count(); ++q) {
        const MultiIndex lv = box.phi_unflat(q);
        const int row = wide.phi_flat(lu + lv);
        for (int jv = -box.K_x; jv <= box.K_x; ++jv) {
          const Complex cv = v.data()(q, box.x_col(jv));
          if (cv == Complex(0.0, 0.0)) continue;
          acc(row, wide.x_col(ju + jv)) += cu * cv;
        }
      }
    }
  }

  TorusFunction r(box);
  double dropped = 0.0;
  for (int p = 0; p < wide.phi_count(); ++p) {
    const MultiIndex l = wide.phi_unflat(p);
    for (int j = -wide.K_x; j <= wide.K_x; ++j) {
      const Complex c = acc(p, wide.x_col(j));
      if (c == Complex(0.0, 0.0)) continue;
      if (box.contains(l, j))
        r.data()(box.phi_flat(l), box.x_col(j)) = c;
      else
        dropped += std::norm(c);
    }
  }
  r.set_truncation_budget(u.truncation_budget() + v.truncation_budget() +
                          std::sqrt(dropped));
  return r;
}

SymmetryReport symmetry_check(const TorusFunction& u) {
  const LatticeBox& box = u.box();
  SymmetryReport rep;
  rep.tol = 1e-12 * (1.0 + sobolev_norm(u, s_zero(box.nu)));
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex l = box.phi_unflat(p);
    const int pm = box.phi_flat(-l);
    for (int j = -box.K_x; j <= box.K_x; ++j) {
      const Complex c = u.data()(p, box.x_col(j));
      const Complex c_mphi = u.data()(pm, box.x_col(j));
      const Complex c_mx = u.data()(p, box.x_col(-j));
      const Complex c_mboth = u.data()(pm, box.x_col(-j));
      rep.viol_even_phi = std::max(rep.viol_even_phi, std::abs(c - c_mphi));
      rep.viol_odd_phi = std::max(rep.viol_odd_phi, std::abs(c + c_mphi));
      rep.viol_even_x = std::max(rep.viol_even_x, std::abs(c - c_mx));
      rep.viol_odd_x = std::max(rep.viol_odd_x, std::abs(c + c_mx));
      rep.viol_real = std::max(rep.viol_real, std::abs(c - std::conj(c_mboth)));
    }
  }
  rep.even_phi = rep.viol_even_phi <= rep.tol;
  rep.odd_phi = rep.viol_odd_phi <= rep.tol;
  rep.even_x = rep.viol_even_x <= rep.tol;
  rep.odd_x = rep.viol_odd_x <= rep.tol;
  rep.real_valued = rep.viol_real <= rep.tol;
  return rep;
}

Eigen::MatrixXcd eval_grid(const TorusFunction& u, int n_phi, int n_x) {
  const LatticeBox& box = u.box();
  std::vector<int> dims;
  for (int i = 0; i < box.nu; ++i) dims.push_back(box.phi_side());
  dims.push_back(box.x_count());

  std::vector<Complex> buf(u.data().data(), u.data().data() + u.data().size());
  // Eigen stores column-major; rebuild row-major tensor (phi axes then x).
  {
    std::vector<Complex> rm(buf.size());
    const int pc = box.phi_count(), xc = box.x_count();
    for (int p = 0; p < pc; ++p)
      for (int c = 0; c < xc; ++c) rm[static_cast<size_t>(p) * xc + c] = u.data()(p, c);
    buf = std::move(rm);
  }

  const Eigen::MatrixXcd Fphi = synthesis_matrix(n_phi, box.K_phi);
  const Eigen::MatrixXcd Fx = synthesis_matrix(n_x, box.K_x);
  for (int i = 0; i < box.nu; ++i) buf = transform_axis(buf, dims, i, Fphi);
  buf = transform_axis(buf, dims, box.nu, Fx);

  int rows = 1;
  for (int i = 0; i < box.nu; ++i) rows *= n_phi;
  Eigen::MatrixXcd out(rows, n_x);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < n_x; ++c) out(r, c) = buf[static_cast<size_t>(r) * n_x + c];
  return out;
}

TorusFunction fit_grid(const Eigen::MatrixXcd& values, const LatticeBox& box, int n_phi,
                       int n_x) {
  std::vector<int> dims;
  for (int i = 0; i < box.nu; ++i) dims.push_back(n_phi);
  dims.push_back(n_x);

  std::vector<Complex> buf(static_cast<size_t>(values.rows()) * values.cols());
  for (int r = 0; r < values.rows(); ++r)
    for (int c = 0; c < values.cols(); ++c)
      buf[static_cast<size_t>(r) * values.cols() + c] = values(r, c);

  const Eigen::MatrixXcd Aphi = synthesis_matrix(n_phi, box.K_phi).adjoint() / double(n_phi);
  const Eigen::MatrixXcd Ax = synthesis_matrix(n_x, box.K_x).adjoint() / double(n_x);
  for (int i = 0; i < box.nu; ++i) buf = transform_axis(buf, dims, i, Aphi);
  buf = transform_axis(buf, dims, box.nu, Ax);

  TorusFunction u(box);
  const int xc = box.x_count();
  for (int p = 0; p < box.phi_count(); ++p)
    for (int c = 0; c < xc; ++c) u.data()(p, c) = buf[static_cast<size_t>(p) * xc + c];
  return u;
}

TorusFunction pointwise(const TorusFunction& u, const std::function<Complex(Complex)>& f) {
  const int n_phi = default_grid_phi(u.box());
  const int n_x = default_grid_x(u.box());
  Eigen::MatrixXcd g = eval_grid(u, n_phi, n_x);
  for (int r = 0; r < g.rows(); ++r)
    for (int c = 0; c < g.cols(); ++c) g(r, c) = f(g(r, c));
  TorusFunction out = fit_grid(g, u.box(), n_phi, n_x);
  out.set_truncation_budget(u.truncation_budget());
  return out;
}

TorusFunction pointwise2(const TorusFunction& u, const TorusFunction& v,
                         const std::function<Complex(Complex, Complex)>& f) {
  if (!(u.box() == v.box())) throw std::invalid_argument("pointwise2: box mismatch");
  const int n_phi = default_grid_phi(u.box());
  const int n_x = default_grid_x(u.box());
  Eigen::MatrixXcd gu = eval_grid(u, n_phi, n_x);
  Eigen::MatrixXcd gv = eval_grid(v, n_phi, n_x);
  for (int r = 0; r < gu.rows(); ++r)
    for (int c = 0; c < gu.cols(); ++c) gu(r, c) = f(gu(r, c), gv(r, c));
  TorusFunction out = fit_grid(gu, u.box(), n_phi, n_x);
  out.set_truncation_budget(u.truncation_budget() + v.truncation_budget());
  return out;
}

TorusFunction enforce_real(const TorusFunction& u) {
  TorusFunction r = u.conj();
  r += u;
  r *= Complex(0.5, 0.0);
  r.set_truncation_budget(u.truncation_budget());
  return r;
}

}  // namespace kgr
