#pragma once

#include <Eigen/Core>

#include "kgreduce/toeplitz.h"

namespace kgr {

// Operator on the flattened lattice, rows and columns indexed by (sigma, l, j)
// with sigma running over comps components (1 for scalar, 2 for the +/- pair).
// Unlike ToeplitzOperator the kernel may depend on l and l' separately; this is
// the home of Bony-split components, brute-force oracles and assembled
// conjugators.
class DenseOperator {
 public:
  DenseOperator() = default;
  DenseOperator(const LatticeBox& box, int comps)
      : box_(box),
        comps_(comps),
        mat_(Eigen::MatrixXcd::Zero(comps * box.flat_count(), comps * box.flat_count())) {}

  const LatticeBox& box() const { return box_; }
  int comps() const { return comps_; }
  int dim() const { return static_cast<int>(mat_.rows()); }
  Eigen::MatrixXcd& mat() { return mat_; }
  const Eigen::MatrixXcd& mat() const { return mat_; }

  int flat(int sigma, const MultiIndex& l, int j) const {
    return sigma * box_.flat_count() + box_.flat(l, j);
  }

  double max_abs() const { return mat_.size() == 0 ? 0.0 : mat_.cwiseAbs().maxCoeff(); }

  DenseOperator& operator+=(const DenseOperator& o) {
    mat_ += o.mat_;
    return *this;
  }
  DenseOperator& operator-=(const DenseOperator& o) {
    mat_ -= o.mat_;
    return *this;
  }
  DenseOperator& operator*=(Complex z) {
    mat_ *= z;
    return *this;
  }
  friend DenseOperator operator+(DenseOperator a, const DenseOperator& b) { return a += b; }
  friend DenseOperator operator-(DenseOperator a, const DenseOperator& b) { return a -= b; }
  friend DenseOperator operator*(DenseOperator a, Complex z) { return a *= z; }
  friend DenseOperator operator*(Complex z, DenseOperator a) { return a *= z; }

  static DenseOperator identity(const LatticeBox& box, int comps) {
    DenseOperator d(box, comps);
    d.mat_.setIdentity();
    return d;
  }
  static DenseOperator from_toeplitz(const ToeplitzOperator& A);
  static DenseOperator from_block(const BlockOperator2x2& A);

  // Averages entries over each l-difference diagonal; *defect reports the
  // largest deviation from the average (0 when the operator is translation
  // invariant in phi).
  ToeplitzOperator to_toeplitz(int band = -1, double* defect = nullptr) const;
  BlockOperator2x2 to_block(int band = -1, double* defect = nullptr) const;

 private:
  LatticeBox box_;
  int comps_ = 1;
  Eigen::MatrixXcd mat_;
};

DenseOperator compose(const DenseOperator& A, const DenseOperator& B);

// H^{s_in} -> H^{s_out} norms with <l,j>^s weights; decay mode generalizes the
// translation-invariant sum by taking suprema over index differences.
NormEstimate dense_norm(const DenseOperator& A, double s_in, double s_out, NormMode mode);

enum class StructureKind {
  real_to_real,
  reversible,
  reversibility_preserving,
  parity_preserving
};

// Averages the operator over the symmetry orbit of the given structure class;
// fixed points are exactly the operators satisfying the class identities.
DenseOperator symmetrize(const DenseOperator& A, StructureKind kind);

// Row (l, j), column (l', k). The Bony part keeps |l - l'|_1 + |j - k| < (|l|_1 + |j|) / 2.
bool bony_keep(const MultiIndex& l, int j, const MultiIndex& lp, int k);

}  // namespace kgr
