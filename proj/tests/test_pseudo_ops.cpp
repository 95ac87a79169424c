#include "kgreduce/symbol.h"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace kgr {
namespace {

static constexpr double kTolerance = 1.0e-13;

double MaxDiff(const ToeplitzOperator& A, const ToeplitzOperator& B) {
  double m = 0.0;
  for (int r = 0; r < A.band_count(); ++r)
    m = std::max(m, (A.block_at(r) - B.block_at(r)).cwiseAbs().maxCoeff());
  return m;
}

TorusFunction RandomFunction(const LatticeBox& box, std::mt19937& rng, double amplitude,
                             int x_supp, int phi_supp) {
  std::normal_distribution<double> dist(0.0, 1.0);
  TorusFunction f(box);
  for (int p = 0; p < box.phi_count(); ++p) {
    const MultiIndex l = box.phi_unflat(p);
    if (l.abs_sum() > phi_supp) continue;
    for (int j = -std::min(box.K_x, x_supp); j <= std::min(box.K_x, x_supp); ++j)
      f.set_coeff(l, j, amplitude * Complex(dist(rng), dist(rng)));
  }
  return f;
}

Symbol RandomSymbol(const LatticeBox& box, std::mt19937& rng, double order,
                    double amplitude, int x_supp, int phi_supp) {
  Symbol a(box, order);
  for (int xi = -a.K_xi(); xi <= a.K_xi(); ++xi) {
    const double scale = amplitude * std::pow(jap(xi), order);
    a.set_slice(xi, RandomFunction(box, rng, scale, x_supp, phi_supp));
  }
  return a;
}

// Symbol-level reversibility involution a -> -conj a(-phi, x, -xi); the fixed
// points are the reversible symbols. sign = +1 gives the preserving variant.
Symbol SymmetrizeReversible(const Symbol& b, double sign) {
  Symbol a = b;
  for (int xi = -b.K_xi(); xi <= b.K_xi(); ++xi) {
    TorusFunction flip = b.slice_at(-xi).conj().reflect_phi() * Complex(sign, 0.0);
    flip += b.slice(xi);
    a.set_slice(xi, flip * Complex(0.5, 0.0));
  }
  return a;
}

TEST(Quantize, ConstantOneIsIdentity) {
  const LatticeBox box{1, 2, 3};
  const Symbol one = Symbol::multiplier(box, MultiplierKind::one);
  EXPECT_NEAR(MaxDiff(quantize(one), ToeplitzOperator::identity(box)), 0.0, kTolerance);
}

TEST(Quantize, DispersionMultiplierDiagonal) {
  const LatticeBox box{1, 2, 3};
  const Symbol dm = Symbol::multiplier(box, MultiplierKind::d_m, 1.0);
  const ToeplitzOperator D = quantize(dm);
  EXPECT_NEAR(std::abs(D.entry(MultiIndex{}, 3, 3) - Complex(std::sqrt(10.0), 0.0)), 0.0,
              kTolerance);
  EXPECT_NEAR(std::abs(D.entry(MultiIndex{}, 2, 3)), 0.0, kTolerance);
  EXPECT_NEAR(std::abs(D.entry(MultiIndex{{1, 0, 0}}, 3, 3)), 0.0, kTolerance);
}

TEST(Quantize, XiIndependentSymbolIsMultiplication) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(41u);
  const TorusFunction f = enforce_real(RandomFunction(box, rng, 1.0, box.K_x, box.K_phi));
  const Symbol a = Symbol::from_x_function(f);
  EXPECT_NEAR(MaxDiff(quantize(a), ToeplitzOperator::from_function(f)), 0.0, kTolerance);
}

TEST(SymbolNorm, WeightAndOrderOracles) {
  const LatticeBox box{1, 2, 3};
  const Symbol japm = Symbol::multiplier(box, MultiplierKind::jap_pow, 1.0, 1.7);
  EXPECT_NEAR(symbol_norm(japm, 2.5, 0), 1.0, kTolerance);

  const TorusFunction c = TorusFunction::cosine(box, MultiIndex{}, 1);
  const Symbol a = Symbol::from_x_function(c);
  EXPECT_NEAR(symbol_norm(a, 2.0, 0), sobolev_norm(c, 2.0), kTolerance);

  Symbol dm = Symbol::multiplier(box, MultiplierKind::d_m, 1.0);
  const double at_order_one = symbol_norm(dm, 2.0, 0);
  dm.set_order_m(2.0);
  EXPECT_LE(symbol_norm(dm, 2.0, 0), at_order_one + kTolerance);

  EXPECT_THROW(symbol_norm(a, 2.0, -1), std::invalid_argument);
  EXPECT_THROW(symbol_norm(a, 2.0, a.K_xi()), std::invalid_argument);
}

TEST(Symbol, RejectsTooNarrowXiBand) {
  const LatticeBox box{1, 2, 3};
  EXPECT_THROW(Symbol(box, 0.0, box.K_x), std::invalid_argument);
}

TEST(Symbol, TailModels) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(42u);
  Symbol a = RandomSymbol(box, rng, -1.0, 1.0, 2, 2);
  const int K = a.K_xi();
  const TorusFunction edge = a.slice(K);
  const TorusFunction far = a.slice_at(K + 3);
  const double ratio = std::pow(jap(double(K + 3)) / jap(double(K)), -1.0);
  EXPECT_NEAR((far - edge * Complex(ratio, 0.0)).max_abs(), 0.0, kTolerance);
  a.set_tail_model(TailModel::zero);
  EXPECT_NEAR(a.slice_at(K + 3).max_abs(), 0.0, kTolerance);

  const Symbol dm = Symbol::multiplier(box, MultiplierKind::d_m, 1.0);
  EXPECT_NEAR(std::abs(dm.slice_real(2.5).mean() - std::sqrt(2.5 * 2.5 + 1.0)), 0.0,
              kTolerance);
  EXPECT_NEAR((dm.slice_real(1.0) - dm.slice_at(1)).max_abs(), 0.0, kTolerance);
}

TEST(Sharp, XiIndependentLeftFactorIsPointwiseProduct) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(43u);
  const TorusFunction f = RandomFunction(box, rng, 1.0, box.K_x, box.K_phi);
  const Symbol a = Symbol::from_x_function(f);
  const Symbol b = RandomSymbol(box, rng, 0.0, 1.0, box.K_x, box.K_phi);
  const Symbol ab = compose_sharp(a, b);
  for (int xi = -b.K_xi(); xi <= b.K_xi(); ++xi)
    EXPECT_NEAR((ab.slice(xi) - multiply(f, b.slice(xi))).max_abs(), 0.0, 1.0e-12);
  for (int n = 1; n <= 3; ++n)
    EXPECT_NEAR(compose_sharp(a, b, SharpMode::graded(n)).max_abs(), 0.0, kTolerance);
}

TEST(Sharp, LinearSymbolClosedForm) {
  const LatticeBox box{1, 2, 3};
  const Symbol xi = Symbol::multiplier(box, MultiplierKind::xi);
  const TorusFunction c = TorusFunction::cosine(box, MultiIndex{}, 1);
  const TorusFunction s = TorusFunction::sine(box, MultiIndex{}, 1);
  const Symbol b = Symbol::from_x_function(c);
  const Symbol full = compose_sharp(xi, b);
  const Symbol below2 = compose_sharp(xi, b, SharpMode::below(2));
  for (int k = -full.K_xi(); k <= full.K_xi(); ++k) {
    TorusFunction expected = c * Complex(double(k), 0.0);
    expected += s * Complex(0.0, 1.0);
    EXPECT_NEAR((full.slice(k) - expected).max_abs(), 0.0, 1.0e-12);
    EXPECT_NEAR((below2.slice(k) - expected).max_abs(), 0.0, 1.0e-12);
  }
}

TEST(Sharp, QuantizationHomomorphismOnInteriorModes) {
  const LatticeBox box{1, 2, 6};
  std::mt19937 rng(44u);
  const Symbol a = RandomSymbol(box, rng, 0.0, 1.0, box.K_x, box.K_phi);
  const Symbol b = RandomSymbol(box, rng, 0.0, 1.0, 2, box.K_phi);
  const ToeplitzOperator lhs = quantize(compose_sharp(a, b));
  const ToeplitzOperator rhs = compose(quantize(a), quantize(b));
  double worst = 0.0;
  for (int r = 0; r < lhs.band_count(); ++r) {
    const MultiIndex ld = lhs.band_unflat(r);
    if (ld.abs_sum() > box.K_phi) continue;
    for (int j = -box.K_x; j <= box.K_x; ++j)
      for (int k = -(box.K_x - 2); k <= box.K_x - 2; ++k) {
        if (std::abs(j - k) > box.K_x) continue;
        worst = std::max(worst, std::abs(lhs.entry(ld, j, k) - rhs.entry(ld, j, k)));
      }
  }
  EXPECT_NEAR(worst, 0.0, 1.0e-11);
}

TEST(Star, SelfCommutatorVanishes) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(45u);
  const Symbol a = RandomSymbol(box, rng, 0.0, 1.0, 2, 2);
  EXPECT_NEAR(star_commutator(a, a).max_abs(), 0.0, kTolerance);
}

TEST(Star, PoissonBracketWithFrequency) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(46u);
  const Symbol xi = Symbol::multiplier(box, MultiplierKind::xi);
  const TorusFunction f = enforce_real(RandomFunction(box, rng, 1.0, box.K_x, box.K_phi));
  const Symbol b = Symbol::from_x_function(f);
  const Symbol lead = star_commutator(xi, b, SharpMode::graded(1));
  const TorusFunction expected = f.dx() * Complex(0.0, -1.0);
  for (int k = -lead.K_xi(); k <= lead.K_xi(); ++k)
    EXPECT_NEAR((lead.slice(k) - expected).max_abs(), 0.0, 1.0e-12);
}

TEST(Star, TransportCommutatorLeadingTerm) {
  const LatticeBox box{1, 2, 4};
  std::mt19937 rng(47u);
  const double c = 0.07;
  const TorusFunction d = enforce_real(RandomFunction(box, rng, 1.0, 2, 2));
  const Symbol ds = Symbol::from_x_function(d);
  const Symbol X = Symbol::multiplier(box, MultiplierKind::d_m, 1.0) * Complex(1.0 + c, 0.0);
  const Symbol lead = star_commutator(ds, X, SharpMode::graded(1));
  const TorusFunction dxd = d.dx();
  double worst = 0.0;
  for (int k = -lead.K_xi(); k <= lead.K_xi(); ++k) {
    const double slope = double(k) / std::sqrt(double(k) * k + 1.0);
    const TorusFunction expected = dxd * Complex(0.0, (1.0 + c) * slope);
    worst = std::max(worst, (lead.slice(k) - expected).max_abs());
  }
  // The only deviation is the h = 1 finite-difference error on the dispersion slope.
  EXPECT_LE(worst, 0.08 * (1.0 + c) * dxd.max_abs());
}

TEST(Neumann, ZeroSymbolGivesZeroCorrections) {
  const LatticeBox box{1, 2, 3};
  const Symbol a(box, -1.0);
  const auto [g_low, g_high] = neumann_inverse(a, 3);
  EXPECT_NEAR(g_low.max_abs(), 0.0, kTolerance);
  EXPECT_NEAR(g_high.max_abs(), 0.0, kTolerance);
}

TEST(Neumann, GeometricSeriesForDecayingMultiplier) {
  const LatticeBox box{1, 2, 3};
  const Symbol a = Symbol::multiplier(box, MultiplierKind::jap_pow, 1.0, -1.0) *
                   Complex(0.1, 0.0);
  const auto [g_low, g_high] = neumann_inverse(a, 3);
  ToeplitzOperator T = ToeplitzOperator::identity(box) + quantize(a);
  T += quantize(g_low);
  T += quantize(g_high);
  for (int k = -box.K_x; k <= box.K_x; ++k) {
    const double expected = 1.0 / (1.0 - 0.1 / jap(k));
    EXPECT_NEAR(std::abs(T.entry(MultiIndex{}, k, k) - Complex(expected, 0.0)), 0.0,
                1.0e-10);
  }
  const ToeplitzOperator R =
      compose(ToeplitzOperator::identity(box) - quantize(a), T) -
      ToeplitzOperator::identity(box);
  EXPECT_NEAR(R.max_abs(), 0.0, 1.0e-12);
}

TEST(Neumann, RandomOrderMinusOneResidual) {
  const LatticeBox box{1, 2, 6};
  std::mt19937 rng(48u);
  Symbol a = RandomSymbol(box, rng, -1.0, 1.0, 2, 2);
  const double s0 = s_zero(box.nu);
  const double raw = operator_norm(quantize(a), s0, s0, NormMode::op).value;
  a *= Complex(1.0e-3 / raw, 0.0);
  const auto [g_low, g_high] = neumann_inverse(a, 3);
  EXPECT_NEAR(g_low.order_m(), -2.0, kTolerance);
  EXPECT_NEAR(g_high.order_m(), -3.0, kTolerance);
  ToeplitzOperator T = ToeplitzOperator::identity(box) + quantize(a);
  T += quantize(g_low);
  T += quantize(g_high);
  const ToeplitzOperator R =
      compose(ToeplitzOperator::identity(box) - quantize(a), T) -
      ToeplitzOperator::identity(box);
  double worst = 0.0;
  for (int r = 0; r < R.band_count(); ++r) {
    const MultiIndex ld = R.band_unflat(r);
    for (int j = -(box.K_x - 2); j <= box.K_x - 2; ++j)
      for (int k = -2; k <= 2; ++k)
        worst = std::max(worst, std::abs(R.entry(ld, j, k)));
  }
  EXPECT_NEAR(worst, 0.0, 1.0e-10);
  EXPECT_THROW(neumann_inverse(a, 1), std::invalid_argument);
  const Symbol bad = Symbol::multiplier(box, MultiplierKind::one);
  EXPECT_THROW(neumann_inverse(bad, 3), std::invalid_argument);
}

TEST(ExpSymbol, ScalarOracles) {
  const LatticeBox box{1, 2, 3};
  const Symbol zero(box, 0.0);
  EXPECT_NEAR(MaxDiff(exp_symbol(zero, 1.0), ToeplitzOperator::identity(box)), 0.0,
              kTolerance);
  const Symbol c = Symbol::multiplier(box, MultiplierKind::constant, 1.0, 0.0,
                                      Complex(0.3, 0.0));
  const ToeplitzOperator E = exp_symbol(c, 1.2);
  EXPECT_NEAR(MaxDiff(E, ToeplitzOperator::identity(box) * Complex(std::exp(0.36), 0.0)),
              0.0, 1.0e-12);
  const Symbol big = Symbol::multiplier(box, MultiplierKind::constant, 1.0, 0.0,
                                        Complex(2.0, 0.0));
  EXPECT_THROW(exp_symbol(big, 1.0), std::invalid_argument);
}

TEST(ExpSymbol, GroupInverse) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(49u);
  const Symbol a = RandomSymbol(box, rng, 0.0, 1.0e-4, 2, 2);
  const ToeplitzOperator P = compose(exp_symbol(a, 1.0), exp_symbol(a, -1.0));
  EXPECT_NEAR(MaxDiff(P, ToeplitzOperator::identity(box)), 0.0, 1.0e-12);
}

TEST(Cutoffs, IntegerValuesAndProjectors) {
  const LatticeBox box{1, 2, 3};
  const Symbol chi = cutoffs(box, CutoffKind::chi);
  const Symbol chi_p = cutoffs(box, CutoffKind::chi_plus);
  const Symbol chi_m = cutoffs(box, CutoffKind::chi_minus);
  const Symbol sgn = cutoffs(box, CutoffKind::sign);
  EXPECT_NEAR(chi.slice_at(0).max_abs(), 0.0, kTolerance);
  EXPECT_NEAR(std::abs(chi.slice_at(1).mean() - 1.0), 0.0, kTolerance);
  EXPECT_NEAR(std::abs(chi.slice_at(-4).mean() - 1.0), 0.0, kTolerance);
  EXPECT_NEAR(std::abs(chi_p.slice_at(0).mean() - 0.5), 0.0, kTolerance);
  EXPECT_NEAR(std::abs(chi_p.slice_at(2).mean() - 1.0), 0.0, kTolerance);
  EXPECT_NEAR(chi_p.slice_at(-2).max_abs(), 0.0, kTolerance);
  EXPECT_NEAR(sgn.slice_at(0).max_abs(), 0.0, kTolerance);
  EXPECT_NEAR(std::abs(sgn.slice_at(3).mean() - 1.0), 0.0, kTolerance);
  EXPECT_NEAR(std::abs(sgn.slice_at(-3).mean() + 1.0), 0.0, kTolerance);

  const ToeplitzOperator Pp = quantize(chi_p), Pm = quantize(chi_m);
  EXPECT_NEAR(MaxDiff(Pp + Pm, ToeplitzOperator::identity(box)), 0.0, kTolerance);
  const ToeplitzOperator PpPm = compose(Pp, Pm);
  for (int j = -box.K_x; j <= box.K_x; ++j)
    for (int k = -box.K_x; k <= box.K_x; ++k) {
      const Complex expected = (j == 0 && k == 0) ? Complex(0.25, 0.0) : Complex(0.0, 0.0);
      EXPECT_NEAR(std::abs(PpPm.entry(MultiIndex{}, j, k) - expected), 0.0, kTolerance);
    }
}

TEST(Conjugation, SymbolRuleMatchesOperatorRule) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(50u);
  const Symbol a = RandomSymbol(box, rng, 0.0, 1.0, box.K_x, box.K_phi);
  EXPECT_NEAR(MaxDiff(conj_op(quantize(a)), quantize(conj_reflect(a))), 0.0, kTolerance);
}

TEST(Structure, ReversibilityPredicateMatchesOperatorCheck) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(51u);
  const Symbol b = RandomSymbol(box, rng, 0.0, 1.0, 2, 2);
  const Symbol rev = SymmetrizeReversible(b, -1.0);
  EXPECT_NEAR(symbol_structure(rev).reversible, 0.0, 1.0e-12);

  const Symbol zero(box, 0.0);
  const BlockOperator2x2 T = quantize(SymbolMatrix2x2::from_upper_row(rev, zero));
  const StructureReport rep = structure_check(T);
  EXPECT_TRUE(rep.real_to_real);
  EXPECT_TRUE(rep.reversible);

  EXPECT_GT(symbol_structure(b).reversible, 1.0e-3);
  EXPECT_FALSE(
      structure_check(quantize(SymbolMatrix2x2::from_upper_row(b, zero))).reversible);
}

TEST(Structure, PreservingSharpReversibleIsReversible) {
  const LatticeBox box{1, 2, 3};
  std::mt19937 rng(52u);
  const Symbol p = SymmetrizeReversible(RandomSymbol(box, rng, 0.0, 1.0, 2, 2), 1.0);
  const Symbol r = SymmetrizeReversible(RandomSymbol(box, rng, 0.0, 1.0, 2, 2), -1.0);
  EXPECT_NEAR(symbol_structure(p).reversibility_preserving, 0.0, 1.0e-12);
  const Symbol c = compose_sharp(p, r);
  EXPECT_NEAR(symbol_structure(c).reversible, 0.0, 1.0e-11 * (1.0 + c.max_abs()));
}

TEST(Dispersion, SplitsThroughProjectorsUpToSmoothing) {
  const LatticeBox box{1, 2, 12};
  const double mass = 1.0;
  const ToeplitzOperator Dm = quantize(Symbol::multiplier(box, MultiplierKind::d_m, mass));
  const ToeplitzOperator Dx = ToeplitzOperator::multiplier(
      box, [](int j) { return Complex(0.0, double(j)); });
  const ToeplitzOperator Pp = quantize(cutoffs(box, CutoffKind::chi_plus));
  const ToeplitzOperator Pm = quantize(cutoffs(box, CutoffKind::chi_minus));
  const ToeplitzOperator R =
      Dm * Complex(0.0, 1.0) - (compose(Pp, Dx) - compose(Pm, Dx));
  for (int j = -box.K_x; j <= box.K_x; ++j) {
    const Complex r = R.entry(MultiIndex{}, j, j);
    const double expected = mass / (std::sqrt(double(j) * j + mass) + std::abs(double(j)));
    EXPECT_NEAR(std::abs(r - Complex(0.0, expected)), 0.0, kTolerance);
  }
  const double edge = std::abs(R.entry(MultiIndex{}, box.K_x, box.K_x));
  EXPECT_NEAR(edge * box.K_x, 0.5 * mass, 0.01);
}

TEST(MatrixSharp, MatchesBlockCompositionOnInteriorModes) {
  const LatticeBox box{1, 2, 6};
  std::mt19937 rng(53u);
  const SymbolMatrix2x2 A = SymbolMatrix2x2::from_upper_row(
      RandomSymbol(box, rng, 0.0, 1.0, 2, box.K_phi),
      RandomSymbol(box, rng, 0.0, 1.0, 2, box.K_phi));
  const SymbolMatrix2x2 B = SymbolMatrix2x2::from_upper_row(
      RandomSymbol(box, rng, 0.0, 1.0, 2, box.K_phi),
      RandomSymbol(box, rng, 0.0, 1.0, 2, box.K_phi));
  const BlockOperator2x2 lhs = quantize(matrix_sharp(A, B));
  const BlockOperator2x2 rhs = compose(quantize(A), quantize(B));
  double worst = 0.0;
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) {
      const ToeplitzOperator& L = lhs.block(s, sp);
      const ToeplitzOperator& Rb = rhs.block(s, sp);
      for (int r = 0; r < L.band_count(); ++r) {
        const MultiIndex ld = L.band_unflat(r);
        if (ld.abs_sum() > box.K_phi) continue;
        for (int j = -box.K_x; j <= box.K_x; ++j)
          for (int k = -(box.K_x - 4); k <= box.K_x - 4; ++k)
            worst = std::max(worst, std::abs(L.entry(ld, j, k) - Rb.entry(ld, j, k)));
      }
    }
  EXPECT_NEAR(worst, 0.0, 1.0e-11);
}

}  // namespace
}  // namespace kgr
