#include "kgreduce/toeplitz.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace kgr {
namespace {

static constexpr double kTolerance = 1.0e-13;

TorusFunction RandomFunction(const LatticeBox& box, std::mt19937& rng,
                             bool real_valued = false) {
  std::normal_distribution<double> dist(0.0, 1.0);
  TorusFunction u(box);
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex l = box.phi_unflat(p);
    for (int j = -box.K_x; j <= box.K_x; ++j)
      u.set_coeff(l, j, Complex(dist(rng), dist(rng)));
  }
  return real_valued ? enforce_real(u) : u;
}

// Random operator with kernel support |ld|_1 <= supp inside the full band.
ToeplitzOperator RandomToeplitz(const LatticeBox& box, std::mt19937& rng, int supp) {
  std::normal_distribution<double> dist(0.0, 1.0);
  ToeplitzOperator A(box);
  for (int r = 0; r < A.band_count(); ++r) {
    if (A.band_unflat(r).abs_sum() > supp) continue;
    Eigen::MatrixXcd& b = A.block_at(r);
    for (int row = 0; row < b.rows(); ++row)
      for (int col = 0; col < b.cols(); ++col)
        b(row, col) = Complex(dist(rng), dist(rng));
  }
  return A;
}

double MaxDiff(const ToeplitzOperator& A, const ToeplitzOperator& B) {
  double m = 0.0;
  for (int r = 0; r < A.band_count(); ++r)
    m = std::max(m, (A.block_at(r) - B.block_at(r)).cwiseAbs().maxCoeff());
  return m;
}

double BlockMaxDiff(const BlockOperator2x2& A, const BlockOperator2x2& B) {
  double m = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) m = std::max(m, MaxDiff(A.block(s, sp), B.block(s, sp)));
  return m;
}

// Entry involutions used to build structured instances.
ToeplitzOperator FlipX(const ToeplitzOperator& A, bool conjugate) {
  const LatticeBox& box = A.box();
  ToeplitzOperator C(box, A.band());
  for (int r = 0; r < A.band_count(); ++r) {
    const MultiIndex ld = A.band_unflat(r);
    for (int j = -box.K_x; j <= box.K_x; ++j)
      for (int k = -box.K_x; k <= box.K_x; ++k) {
        const Complex v = A.entry(ld, -j, -k);
        C.set_entry(ld, j, k, conjugate ? std::conj(v) : v);
      }
  }
  return C;
}

ToeplitzOperator NegPhi(const ToeplitzOperator& A) {
  ToeplitzOperator C(A.box(), A.band());
  for (int r = 0; r < A.band_count(); ++r)
    C.block_at(r) = A.block(-A.band_unflat(r));
  return C;
}

BlockOperator2x2 SymStep(const BlockOperator2x2& T, bool swap_sigma, bool neg_phi,
                         bool flip_conj_x, double sign) {
  BlockOperator2x2 U(T.box(), T.block(0, 0).band());
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) {
      ToeplitzOperator piece = T.block(swap_sigma ? 1 - s : s, swap_sigma ? 1 - sp : sp);
      if (neg_phi) piece = NegPhi(piece);
      if (flip_conj_x) piece = FlipX(piece, true);
      U.block(s, sp) = piece * Complex(sign, 0.0);
    }
  BlockOperator2x2 R = T;
  R += U;
  R *= Complex(0.5, 0.0);
  return R;
}

BlockOperator2x2 RandomBlock(const LatticeBox& box, std::mt19937& rng, int supp) {
  BlockOperator2x2 T(box);
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) T.block(s, sp) = RandomToeplitz(box, rng, supp);
  return T;
}

BlockOperator2x2 MakeRealToReal(BlockOperator2x2 T) {
  BlockOperator2x2 C = conj_block(T);
  T += C;
  T *= Complex(0.5, 0.0);
  return T;
}

BlockOperator2x2 MakeReversibilityPreserving(BlockOperator2x2 T) {
  T = SymStep(T, true, true, false, 1.0);
  T = SymStep(T, false, false, true, 1.0);
  return T;
}

BlockOperator2x2 MakeParityPreserving(BlockOperator2x2 T) {
  BlockOperator2x2 U(T.box(), T.block(0, 0).band());
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) U.block(s, sp) = FlipX(T.block(s, sp), false);
  T += U;
  T *= Complex(0.5, 0.0);
  return T;
}

ToeplitzOperator MassMultiplier(const LatticeBox& box, double mass) {
  return ToeplitzOperator::multiplier(
      box, [mass](int j) { return Complex(std::sqrt(j * j + mass), 0.0); });
}

TEST(Apply, IdentityAndMultiplier) {
  const LatticeBox box{1, 3, 4};
  std::mt19937 rng(21u);
  const TorusFunction u = RandomFunction(box, rng);
  EXPECT_NEAR((apply(ToeplitzOperator::identity(box), u) - u).max_abs(), 0.0, kTolerance);

  const ToeplitzOperator D = MassMultiplier(box, 1.0);
  EXPECT_NEAR(std::abs(D.entry(MultiIndex{}, 3, 3) - Complex(std::sqrt(10.0), 0.0)), 0.0,
              kTolerance);
  EXPECT_NEAR(std::abs(D.entry(MultiIndex{}, 3, 2)), 0.0, kTolerance);
  const TorusFunction m3 = TorusFunction::mode(box, MultiIndex{{1, 0, 0}}, 3, 1.0);
  const TorusFunction Dm3 = apply(D, m3);
  EXPECT_NEAR(std::abs(Dm3.coeff(MultiIndex{{1, 0, 0}}, 3) - std::sqrt(10.0)), 0.0,
              kTolerance);
}

TEST(Apply, FunctionOperatorMatchesConvolution) {
  const LatticeBox box{1, 3, 4};
  std::mt19937 rng(22u);
  const TorusFunction a = RandomFunction(box, rng, true);
  const TorusFunction u = RandomFunction(box, rng);
  const TorusFunction via_op = apply(ToeplitzOperator::from_function(a), u);
  const TorusFunction via_conv = multiply(a, u);
  EXPECT_NEAR((via_op - via_conv).max_abs(), 0.0, kTolerance);
}

TEST(Compose, IdentityNeutral) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(23u);
  const ToeplitzOperator A = RandomToeplitz(box, rng, 2);
  const ToeplitzOperator I = ToeplitzOperator::identity(box);
  EXPECT_NEAR(MaxDiff(compose(A, I), A), 0.0, kTolerance);
  EXPECT_NEAR(MaxDiff(compose(I, A), A), 0.0, kTolerance);
}

TEST(Compose, MatchesDenseProductOnInteriorRows) {
  const LatticeBox box{1, 2, 2};
  std::mt19937 rng(24u);
  const ToeplitzOperator A = ToeplitzOperator::from_function(RandomFunction(box, rng));
  const ToeplitzOperator B = ToeplitzOperator::from_function(RandomFunction(box, rng));
  const ToeplitzOperator C = compose(A, B);

  const int n = box.flat_count();
  auto flatten = [&](const ToeplitzOperator& T) {
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int p = 0; p < box.phi_count(); ++p)
      for (int q = 0; q < box.phi_count(); ++q) {
        const MultiIndex l = box.phi_unflat(p), lp = box.phi_unflat(q);
        for (int j = -box.K_x; j <= box.K_x; ++j)
          for (int k = -box.K_x; k <= box.K_x; ++k)
            M(box.flat(l, j), box.flat(lp, k)) = T.entry(l - lp, j, k);
      }
    return M;
  };
  const Eigen::MatrixXcd dense = flatten(A) * flatten(B);
  const Eigen::MatrixXcd flatC = flatten(C);
  // Rows at l = 0 see every intermediate mode inside the box: exact agreement.
  for (int j = -box.K_x; j <= box.K_x; ++j) {
    const int row = box.flat(MultiIndex{}, j);
    EXPECT_NEAR((flatC.row(row) - dense.row(row)).cwiseAbs().maxCoeff(), 0.0, 1.0e-12);
  }
}

TEST(Compose, AssociativeWithApplyWhenSupportsFit) {
  const LatticeBox box{1, 2, 2};
  std::mt19937 rng(25u);
  const ToeplitzOperator A = RandomToeplitz(box, rng, 4);
  const ToeplitzOperator B = RandomToeplitz(box, rng, 1);
  const TorusFunction u = TorusFunction::mode(box, MultiIndex{}, 1, 1.0);
  const TorusFunction left = apply(compose(A, B), u);
  const TorusFunction right = apply(A, apply(B, u));
  EXPECT_NEAR((left - right).max_abs(), 0.0, 1.0e-12);
}

TEST(Compose, RecordsDroppedBandMass) {
  const LatticeBox box{1, 2, 2};
  ToeplitzOperator A(box), B(box);
  A.set_entry(MultiIndex{{3, 0, 0}}, 0, 0, Complex(1.0, 0.0));
  B.set_entry(MultiIndex{{2, 0, 0}}, 0, 0, Complex(1.0, 0.0));
  const ToeplitzOperator C = compose(A, B);
  EXPECT_GT(C.truncation_budget(), 0.0);
  EXPECT_THROW(A.set_entry(MultiIndex{{5, 0, 0}}, 0, 0, Complex(1.0, 0.0)),
               std::out_of_range);
}

TEST(Filters, CommutatorWeightsMatchDerivatives) {
  const LatticeBox box{1, 3, 4};
  std::mt19937 rng(26u);
  const TorusFunction a = RandomFunction(box, rng);
  const ToeplitzOperator A = ToeplitzOperator::from_function(a);
  EXPECT_NEAR(MaxDiff(filter_dx(A), ToeplitzOperator::from_function(a.dx())), 0.0,
              kTolerance);
  const Freq e1{{1.0, 0.0, 0.0}};
  EXPECT_NEAR(MaxDiff(filter_dphi(A, 0), ToeplitzOperator::from_function(a.dphi(e1))),
              0.0, kTolerance);
}

TEST(Filters, AngleWeightAndProjections) {
  const LatticeBox box{1, 3, 3};
  std::mt19937 rng(27u);
  const ToeplitzOperator A = RandomToeplitz(box, rng, 3);
  const ToeplitzOperator W = filter_jap_dphi_pow(A, 3.0);
  const MultiIndex two{{2, 0, 0}};
  EXPECT_NEAR(MaxDiff(filter_pi_N(A, 1) + filter_pi_N_perp(A, 1), A), 0.0, kTolerance);
  EXPECT_NEAR((W.block(two) - 8.0 * A.block(two)).cwiseAbs().maxCoeff(), 0.0, kTolerance);
  EXPECT_NEAR((W.block(MultiIndex{}) - A.block(MultiIndex{})).cwiseAbs().maxCoeff(), 0.0,
              kTolerance);
  const ToeplitzOperator P = filter_pi_N(A, 1);
  EXPECT_NEAR(P.block(two).cwiseAbs().maxCoeff(), 0.0, kTolerance);

  const ToeplitzOperator J =
      filter_japD_pow(ToeplitzOperator::identity(box), 1.5, Side::left);
  const ToeplitzOperator Jm = ToeplitzOperator::multiplier(
      box, [](int j) { return Complex(std::pow(jap(j), 1.5), 0.0); });
  EXPECT_NEAR(MaxDiff(J, Jm), 0.0, kTolerance);
}

TEST(OperatorNorm, IdentityAndMultiplierOracles) {
  const LatticeBox box{1, 3, 4};
  for (NormMode mode : {NormMode::op, NormMode::majorant, NormMode::decay}) {
    const NormEstimate est = operator_norm(ToeplitzOperator::identity(box), 2.0, 2.0, mode);
    EXPECT_NEAR(est.value, 1.0, 1.0e-8);
  }
  const ToeplitzOperator M = ToeplitzOperator::multiplier(
      box, [](int j) { return Complex(1.0 / (1.0 + j * j), 0.0); });
  const NormEstimate est = operator_norm(M, 1.5, 1.5, NormMode::op);
  EXPECT_TRUE(est.converged);
  EXPECT_NEAR(est.value, 1.0, 1.0e-8);
}

TEST(OperatorNorm, DecayNormOfMultiplicationEqualsFunctionNorm) {
  const LatticeBox box{1, 3, 4};
  std::mt19937 rng(28u);
  const TorusFunction a = RandomFunction(box, rng);
  const double s = 2.5;
  const NormEstimate est =
      operator_norm(ToeplitzOperator::from_function(a), s, s, NormMode::decay);
  EXPECT_NEAR(est.value, sobolev_norm(a, s), 1.0e-12 * (1.0 + est.value));
}

TEST(OperatorNorm, OpBoundedByMajorant) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(29u);
  for (int trial = 0; trial < 5; ++trial) {
    const ToeplitzOperator A = RandomToeplitz(box, rng, 2);
    const double op = operator_norm(A, 2.0, 2.0, NormMode::op).value;
    const double maj = operator_norm(A, 2.0, 2.0, NormMode::majorant).value;
    EXPECT_LE(op, maj * (1.0 + 1.0e-6) + 1.0e-10);
  }
}

TEST(OperatorNorm, MajorantSubmultiplicative) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(30u);
  const double s = 2.0, s1 = 2.5, sp = 2.0;
  for (int trial = 0; trial < 5; ++trial) {
    const ToeplitzOperator A = RandomToeplitz(box, rng, 1);
    const ToeplitzOperator B = RandomToeplitz(box, rng, 1);
    const double lhs = operator_norm(compose(A, B), s, sp, NormMode::majorant).value;
    const double rhs = operator_norm(A, s1, sp, NormMode::majorant).value *
                       operator_norm(B, s, s1, NormMode::majorant).value;
    EXPECT_LE(lhs, rhs * (1.0 + 1.0e-6) + 1.0e-10);
  }
}

TEST(OperatorNorm, MajorantBoundedByCommutatorNorms) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(31u);
  const double s = 2.0;
  const int beta = box.nu / 2 + 1;
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const ToeplitzOperator A = RandomToeplitz(box, rng, 2);
    auto dphi_pow = [&](ToeplitzOperator T) {
      for (int b = 0; b < beta; ++b) T = filter_dphi(T, 0);
      return T;
    };
    const double rhs = operator_norm(A, s, s, NormMode::op).value +
                       operator_norm(filter_dx(A), s, s, NormMode::op).value +
                       std::max(operator_norm(dphi_pow(A), s, s, NormMode::op).value,
                                operator_norm(filter_dx(dphi_pow(A)), s, s, NormMode::op).value);
    const double lhs = operator_norm(A, s, s, NormMode::majorant).value;
    worst = std::max(worst, lhs / rhs);
  }
  RecordProperty("measured_majorant_constant", std::to_string(worst));
  EXPECT_LT(worst, 100.0);
}

TEST(Structure, DiagonalDispersionFlags) {
  const LatticeBox box{1, 2, 3};
  const ToeplitzOperator D = MassMultiplier(box, 1.0);
  const BlockOperator2x2 T = e_times(BlockOperator2x2::diag(D, D), Complex(0.0, 1.0));
  const StructureReport rep = structure_check(T);
  EXPECT_TRUE(rep.real_to_real);
  EXPECT_TRUE(rep.reversible);
  EXPECT_TRUE(rep.parity_preserving);
  EXPECT_FALSE(rep.reversibility_preserving);
}

TEST(Structure, RealEvenMultiplicationFlags) {
  const LatticeBox box{1, 2, 3};
  const TorusFunction a =
      multiply(TorusFunction::cosine(box, MultiIndex{{1, 0, 0}}, 0),
               TorusFunction::cosine(box, MultiIndex{}, 1));
  const ToeplitzOperator A = ToeplitzOperator::from_function(a);
  const StructureReport rep = structure_check(BlockOperator2x2::diag(A, A));
  EXPECT_TRUE(rep.reversibility_preserving);
  EXPECT_TRUE(rep.parity_preserving);
  EXPECT_TRUE(rep.real_to_real);
  EXPECT_FALSE(rep.reversible);
}

TEST(Structure, CompositionClosure) {
  const LatticeBox box{1, 2, 3};
  const ToeplitzOperator D = MassMultiplier(box, 1.0);
  const BlockOperator2x2 rev = e_times(BlockOperator2x2::diag(D, D), Complex(0.0, 1.0));
  const TorusFunction a =
      multiply(TorusFunction::cosine(box, MultiIndex{{1, 0, 0}}, 0),
               TorusFunction::cosine(box, MultiIndex{}, 1));
  const ToeplitzOperator A = ToeplitzOperator::from_function(a);
  const BlockOperator2x2 rp = BlockOperator2x2::diag(A, A);

  StructureReport rep = structure_check(compose(rp, rev));
  EXPECT_TRUE(rep.reversible);
  EXPECT_FALSE(rep.reversibility_preserving);
  rep = structure_check(compose(rev, rev));
  EXPECT_TRUE(rep.reversibility_preserving);
  EXPECT_FALSE(rep.reversible);
}

TEST(Structure, GeneratorsSatisfyCheckedIdentities) {
  const LatticeBox box{1, 2, 2};
  std::mt19937 rng(32u);
  BlockOperator2x2 T = RandomBlock(box, rng, 2);
  T = MakeRealToReal(T);
  EXPECT_TRUE(structure_check(T).real_to_real);
  EXPECT_NEAR(BlockMaxDiff(conj_block(T), T), 0.0, kTolerance);

  T = MakeReversibilityPreserving(T);
  StructureReport rep = structure_check(T);
  EXPECT_TRUE(rep.real_to_real);
  EXPECT_TRUE(rep.reversibility_preserving);

  T = MakeParityPreserving(T);
  rep = structure_check(T);
  EXPECT_TRUE(rep.real_to_real);
  EXPECT_TRUE(rep.reversibility_preserving);
  EXPECT_TRUE(rep.parity_preserving);
}

TEST(Structure, SupCollapsedNormSandwich) {
  const LatticeBox box{1, 2, 2};
  std::mt19937 rng(33u);
  const double s = 2.0, sp = 2.0;
  for (int trial = 0; trial < 3; ++trial) {
    const BlockOperator2x2 T = MakeParityPreserving(RandomBlock(box, rng, 2));
    BlockOperator2x2 check = T;
    for (int si = 0; si < 2; ++si)
      for (int spi = 0; spi < 2; ++spi) {
        const ToeplitzOperator& B = T.block(si, spi);
        ToeplitzOperator& C = check.block(si, spi);
        for (int r = 0; r < B.band_count(); ++r) {
          const MultiIndex ld = B.band_unflat(r);
          for (int j = 0; j <= box.K_x; ++j)
            for (int k = 0; k <= box.K_x; ++k) {
              double m = 0.0;
              for (int js : {j, -j})
                for (int ks : {k, -k}) m = std::max(m, std::abs(B.entry(ld, js, ks)));
              for (int js : {j, -j})
                for (int ks : {k, -k}) C.set_entry(ld, js, ks, Complex(m, 0.0));
            }
        }
      }
    const double norm_a = operator_norm(T, s, sp, NormMode::majorant).value;
    const double norm_check = operator_norm(check, s, sp, NormMode::majorant).value;
    EXPECT_LE(0.25 * norm_check, norm_a * (1.0 + 1.0e-6));
    EXPECT_LE(norm_a, norm_check * (1.0 + 1.0e-6));
  }
}

TEST(Conjugation, EntryRuleExact) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(34u);
  const ToeplitzOperator A = RandomToeplitz(box, rng, 2);
  const ToeplitzOperator C = conj_op(A);
  for (int r = 0; r < A.band_count(); ++r) {
    const MultiIndex ld = A.band_unflat(r);
    for (int j = -box.K_x; j <= box.K_x; ++j)
      for (int k = -box.K_x; k <= box.K_x; ++k)
        EXPECT_NEAR(std::abs(C.entry(ld, j, k) - std::conj(A.entry(-ld, -j, -k))), 0.0,
                    kTolerance);
  }
  const TorusFunction a = RandomFunction(box, rng, true);
  const ToeplitzOperator M = ToeplitzOperator::from_function(a);
  EXPECT_NEAR(MaxDiff(conj_op(M), M), 0.0, kTolerance);
}

TEST(NormalForm, EigenvalueFormula) {
  NormalForm nf;
  nf.c_frak = 0.1;
  nf.mass = 1.0;
  nf.r_diag.assign(5, {0.0, 0.0});
  nf.r_diag[3] = {0.02, 0.005};
  EXPECT_NEAR(nf.eigenvalue(3, +1), 1.1 * std::sqrt(10.0) + 0.02 + 0.005, kTolerance);
  EXPECT_NEAR(nf.eigenvalue(3, -1), 1.1 * std::sqrt(10.0) + 0.02 - 0.005, kTolerance);
  EXPECT_NEAR(nf.eigenvalue(0, +1), 1.1, kTolerance);
}

TEST(NormalForm, ProjectionOracles) {
  const LatticeBox box{1, 2, 3};
  const ToeplitzOperator M = ToeplitzOperator::multiplier(
      box, [](int j) { return Complex(0.5 + 0.1 * j * j, 0.0); });
  const BlockOperator2x2 T = BlockOperator2x2::diag(M, M);
  const auto [proj, rem] = normal_form_project(T);
  EXPECT_NEAR(proj.max_imag, 0.0, kTolerance);
  EXPECT_NEAR(rem.max_abs(), 0.0, kTolerance);
  for (int j = 0; j <= box.K_x; ++j) {
    EXPECT_NEAR(proj.pairs[static_cast<size_t>(j)][0], 0.5 + 0.1 * j * j, kTolerance);
    EXPECT_NEAR(proj.pairs[static_cast<size_t>(j)][1], 0.0, kTolerance);
  }
}

TEST(NormalForm, OffZeroModesProjectToZero) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(35u);
  BlockOperator2x2 T = RandomBlock(box, rng, 2);
  T = MakeParityPreserving(MakeReversibilityPreserving(MakeRealToReal(T)));
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) T.block(s, sp).block(MultiIndex{}).setZero();
  const auto [proj, rem] = normal_form_project(T);
  for (const auto& p : proj.pairs) {
    EXPECT_NEAR(p[0], 0.0, kTolerance);
    EXPECT_NEAR(p[1], 0.0, kTolerance);
  }
  EXPECT_NEAR(BlockMaxDiff(rem, T), 0.0, kTolerance);
}

TEST(NormalForm, RandomStructuredProjectionIsRealAndExhaustive) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(36u);
  BlockOperator2x2 T = RandomBlock(box, rng, 2);
  T = MakeParityPreserving(MakeReversibilityPreserving(MakeRealToReal(T)));
  const auto [proj, rem] = normal_form_project(T);
  EXPECT_NEAR(proj.max_imag, 0.0, 1.0e-12);
  // The kept part lives on l = 0, sigma' = sigma, k = +/- j only.
  const BlockOperator2x2 kept = T - rem;
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) {
      const ToeplitzOperator& B = kept.block(s, sp);
      for (int r = 0; r < B.band_count(); ++r) {
        const MultiIndex ld = B.band_unflat(r);
        for (int j = -box.K_x; j <= box.K_x; ++j)
          for (int k = -box.K_x; k <= box.K_x; ++k) {
            const bool keep = (ld.abs_sum() == 0) && (s == sp) && (k == j || k == -j);
            if (!keep) EXPECT_NEAR(std::abs(B.entry(ld, j, k)), 0.0, kTolerance);
          }
      }
    }
  // The remainder projects to zero pairs.
  const auto [proj2, rem2] = normal_form_project(rem);
  for (const auto& p : proj2.pairs) {
    EXPECT_NEAR(p[0], 0.0, 1.0e-12);
    EXPECT_NEAR(p[1], 0.0, 1.0e-12);
  }
}

TEST(NormalForm, RejectsUnstructuredInput) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(37u);
  const BlockOperator2x2 T = RandomBlock(box, rng, 2);
  EXPECT_THROW(normal_form_project(T), std::invalid_argument);
}

}  // namespace
}  // namespace kgr
