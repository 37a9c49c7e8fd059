// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "hamfactor/errors.hpp"
#include "hamfactor/fcidump.hpp"
#include "hamfactor/norms.hpp"
#include "hamfactor/oracle.hpp"
#include "hamfactor/shift.hpp"
#include "hamfactor/xdf.hpp"
#include "support.hpp"

namespace hamfactor {
namespace {

using testing::random_vector;

double split_error(const Vector& w, double alpha, const ShiftedFactorPair& s) {
  const Eigen::Index n = w.size();
  const Matrix target =
      w * w.transpose() - alpha * Matrix::Ones(n, n);
  const Matrix got = s.p * s.p.transpose() - s.q * s.q.transpose();
  return (target - got).cwiseAbs().maxCoeff();
}

TEST(OneBodyShift, OddMedian) {
  Vector f(3);
  f << 3, 1, 2;
  const OneBodyShift s = one_body_shift(f);
  EXPECT_EQ(s.a1_prime, 2.0);
  EXPECT_EQ(s.shifted_norm, 2.0);
}

TEST(OneBodyShift, ConstantVector) {
  const OneBodyShift s = one_body_shift(Vector::Constant(3, 0.7));
  EXPECT_EQ(s.a1_prime, 0.7);
  EXPECT_EQ(s.shifted_norm, 0.0);
}

TEST(OneBodyShift, EvenCountUsesMidpoint) {
  Vector f(4);
  f << 4, 1, 3, 2;
  EXPECT_EQ(one_body_shift(f).a1_prime, 2.5);
}

TEST(OneBodyShift, GridSearchOracle) {
  std::mt19937_64 rng(8);
  const Vector f = random_vector(11, rng, 2.0);
  const OneBodyShift s = one_body_shift(f);
  double best = std::numeric_limits<double>::infinity();
  const double lo = f.minCoeff(), hi = f.maxCoeff();
  const int steps = 200000;
  for (int i = 0; i <= steps; ++i) {
    const double a = lo + (hi - lo) * i / steps;
    best = std::min(best, (f.array() - a).abs().sum());
  }
  EXPECT_LE(s.shifted_norm, best + 1e-12);
  EXPECT_NEAR(s.shifted_norm, best, 11 * (hi - lo) / steps);
}

TEST(OneBodyShift, NeverHurts) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector f = random_vector(1 + trial % 7, rng);
    const OneBodyShift s = one_body_shift(f);
    EXPECT_LE(s.shifted_norm, f.cwiseAbs().sum() + 1e-15);
  }
  Vector f(3);
  f << -1, 0, 2;
  EXPECT_EQ(one_body_shift(f).shifted_norm, f.cwiseAbs().sum());
}

TEST(GlobalShift, ZeroTensor) {
  const GlobalShiftResult r = global_two_body_shift(TwoElectronTensor(3), 9, 1e-4);
  EXPECT_EQ(r.a2_prime, 0.0);
  EXPECT_EQ(r.two_body_norm, 0.0);
}

TEST(GlobalShift, PureNumberSquaredTensor) {
  const double c = 0.37;
  const TwoElectronTensor g = subtract_number_squared(TwoElectronTensor(3), -c);
  const GlobalShiftResult r = global_two_body_shift(g, 9, 1e-4);
  EXPECT_NEAR(r.a2_prime, c, 1e-6);
  EXPECT_LT(r.two_body_norm, 1e-5);
  EXPECT_NEAR(r.unshifted_two_body_norm, 0.25 * 9 * c, 1e-12);
}

TEST(GlobalShift, MatchesDenseGridScan) {
  const TwoElectronTensor g = testing::random_psd_tensor(4, 6, 13, 0.8);
  const int n_df = 16;
  const GlobalShiftResult r = global_two_body_shift(g, n_df, 1e-4);
  EXPECT_LE(r.two_body_norm, r.unshifted_two_body_norm);
  double lo = 0.0, hi = 0.0;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      lo = std::min(lo, g(p, p, q, q));
      hi = std::max(hi, g(p, p, q, q));
    }
  double best = std::numeric_limits<double>::infinity();
  const int steps = 2000;
  for (int i = 0; i <= steps; ++i)
    best = std::min(best, shifted_two_body_norm(g, lo + (hi - lo) * i / steps,
                                                n_df, 1e-4));
  EXPECT_NEAR(r.two_body_norm, best, 1e-4);
}

TEST(GlobalShift, BundledInstanceImproves) {
  const FcidumpData d = read_fcidump(testing::fcidump_path("h4_chain_sto3g"));
  const GlobalShiftResult r = global_two_body_shift(d.g, 16, 1e-4);
  EXPECT_LT(r.two_body_norm, r.unshifted_two_body_norm);
  EXPECT_GT(r.a2_prime, 0.0);
  EXPECT_EQ(r.fact.a2_prime, r.a2_prime);
  EXPECT_NEAR(two_body_norm_burg(r.fact), r.two_body_norm, 1e-12);
}

TEST(GlobalShift, FrobeniusObjectiveUsesDiagonalMedian) {
  const FcidumpData d = read_fcidump(testing::fcidump_path("h4_chain_sto3g"));
  std::vector<double> diag;
  for (int p = 0; p < 4; ++p)
    for (int r = 0; r < 4; ++r) diag.push_back(d.g(p, p, r, r));
  const GlobalShiftResult r =
      global_two_body_shift(d.g, 16, 1e-4, ShiftObjective::frobenius);
  EXPECT_EQ(r.a2_prime, median(diag));
}

TEST(Split, ZeroAlpha) {
  Vector w(2);
  w << 1, 1;
  const ShiftedFactorPair s = split_shifted_factor(w, 0.0);
  EXPECT_EQ(s.p, w);
  EXPECT_EQ(s.q, Vector::Zero(2));
  EXPECT_EQ(s.theta, 0);
}

TEST(Split, UnitAlphaTwoByTwo) {
  Vector w(2);
  w << 1, 0;
  const ShiftedFactorPair s = split_shifted_factor(w, 1.0);
  // W (x) W - 1 (x) 1 = [[0, -1], [-1, -1]], eigenvalues (-1 +- sqrt 5) / 2.
  Matrix target(2, 2);
  target << 0, -1, -1, -1;
  const Matrix got = s.p * s.p.transpose() - s.q * s.q.transpose();
  EXPECT_LT((got - target).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(s.p.squaredNorm(), (std::sqrt(5.0) - 1) / 2, 1e-12);
  EXPECT_NEAR(s.q.squaredNorm(), (std::sqrt(5.0) + 1) / 2, 1e-12);
}

TEST(Split, RandomRankTwo) {
  std::mt19937_64 rng(10);
  const Vector w = random_vector(10, rng);
  const ShiftedFactorPair s = split_shifted_factor(w, 0.3);
  EXPECT_LT(split_error(w, 0.3, s), 1e-10);
  const Matrix m = w * w.transpose() - 0.3 * Matrix::Ones(10, 10);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < 10; ++i)
    if (std::abs(eig.eigenvalues()(i)) > 1e-10 * scale) ++rank;
  EXPECT_EQ(rank, 2);
  // The split is the dense eigendecomposition restricted to its two modes.
  EXPECT_NEAR(s.p.squaredNorm(), eig.eigenvalues().maxCoeff(), 1e-10);
  EXPECT_NEAR(s.q.squaredNorm(), -eig.eigenvalues().minCoeff(), 1e-10);
}

TEST(Split, ParallelToOnes) {
  const Vector w = Vector::Constant(4, 0.5);
  for (double alpha : {0.1, 0.25, 0.4}) {
    const ShiftedFactorPair s = split_shifted_factor(w, alpha);
    EXPECT_LT(split_error(w, alpha, s), 1e-14);
  }
}

TEST(Split, NegativeAlphaRejected) {
  EXPECT_THROW(split_shifted_factor(Vector::Ones(3), -0.1), InvalidShiftSplit);
}

TEST(Split, PropertyOverRandomInputs) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(1, 32);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const Vector w = random_vector(size(rng), rng);
    const double alpha = 2.0 * unit(rng) * w.cwiseAbs().maxCoeff();
    EXPECT_LT(split_error(w, alpha, split_shifted_factor(w, alpha)), 1e-10);
  }
}

TEST(AlphaThreshold, DropsSmallShifts) {
  DoubleFactorization f;
  f.n_orbitals = 2;
  for (double a : {1e-5, 0.2, 5e-4}) {
    Leaf leaf;
    leaf.rotation = Matrix::Identity(2, 2);
    leaf.factor = Vector::Ones(2);
    leaf.alpha = a;
    leaf.xi = 2;
    f.leaves.push_back(leaf);
  }
  const DoubleFactorization t = apply_alpha_threshold(f, 1e-3);
  EXPECT_EQ(t.leaves[0].alpha, 0.0);
  EXPECT_EQ(t.leaves[1].alpha, 0.2);
  EXPECT_EQ(t.leaves[2].alpha, 0.0);
  EXPECT_EQ(t.n_alpha(), 1);
}

TEST(AlphaThreshold, AllBelowThresholdGivesUnshiftedNorm) {
  DoubleFactorization f;
  f.n_orbitals = 3;
  std::mt19937_64 rng(4);
  for (int t = 0; t < 3; ++t) {
    Leaf leaf;
    leaf.rotation = testing::random_orthogonal(3, rng);
    leaf.factor = random_vector(3, rng);
    leaf.alpha = 1e-4 * (t + 1);
    leaf.xi = 3;
    f.leaves.push_back(leaf);
  }
  DoubleFactorization plain = f;
  for (Leaf& leaf : plain.leaves) leaf.alpha = 0.0;
  const DoubleFactorization t = finalize_shifts(f, 1e-3);
  EXPECT_EQ(t.n_alpha(), 0);
  EXPECT_EQ(two_body_norm_burg(t), two_body_norm_burg(plain));
}

TEST(Finalize, SplitStoredAndTruncated) {
  DoubleFactorization f;
  f.n_orbitals = 4;
  f.thresholds.delta_df = 1e-4;
  Leaf leaf;
  leaf.rotation = Matrix::Identity(4, 4);
  leaf.factor = Vector::Constant(4, 0.5);
  leaf.factor(3) = 0.2;
  leaf.alpha = 0.1;
  leaf.xi = 4;
  f.leaves.push_back(leaf);
  const DoubleFactorization t = finalize_shifts(f, 1e-3);
  const Leaf& out = t.leaves[0];
  ASSERT_EQ(out.p.size(), 4);
  EXPECT_EQ(out.theta, static_cast<int>((out.q.array() != 0.0).count()));
  EXPECT_LT(split_error(leaf.factor, 0.1, {out.p, out.q, out.theta}), 1e-10);
}

TEST(BurgOptimalAlpha, NoWorseThanMedianOrZero) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    Vector w = random_vector(6, rng);
    if (trial % 2 == 0) w.array() += 1.0;
    const double a = burg_optimal_alpha(w);
    EXPECT_GE(a, 0.0);
    std::vector<double> products;
    for (int k = 0; k < 6; ++k)
      for (int l = 0; l < 6; ++l) products.push_back(w(k) * w(l));
    const double med = std::max(0.0, median(products));
    EXPECT_LE(split_burg_norm(w, a), split_burg_norm(w, med) + 1e-12);
    EXPECT_LE(split_burg_norm(w, a), split_burg_norm(w, 0.0) + 1e-12);
  }
}

TEST(BurgOptimalAlpha, GridScanOracle) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    Vector w = random_vector(5, rng);
    w.array() += 0.8;
    const double a = burg_optimal_alpha(w);
    const double hi = w.cwiseAbs().maxCoeff() * w.cwiseAbs().maxCoeff();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 20000; ++i)
      best = std::min(best, split_burg_norm(w, hi * i / 20000.0));
    EXPECT_LE(split_burg_norm(w, a), best + 1e-9);
  }
}

TEST(Correction, Zero) {
  EXPECT_EQ(correction_energy({0.0, 0.0, 4}), 0.0);
}

TEST(Correction, LinearAndQuadraticTerms) {
  EXPECT_EQ(correction_energy({-1.0, 0.0, 4}), -4.0);
  EXPECT_EQ(correction_energy({0.5, 0.25, 3}), 1.5 + 2.25);
}

TEST(Correction, OneBodyShiftCoefficient) {
  // -1/2 sum_k (f_k - a1') y_k with y_k = 2 - 2 n_k carries -a1' n_k, so the
  // encoded operator is H - a1' N_e: the N_e coefficient equals a1'.
  DoubleFactorization f;
  f.n_orbitals = 3;
  f.a1_prime = 2.0;
  const ShiftCorrection c = shift_correction(f, 4);
  EXPECT_EQ(c.a1, 2.0);
  EXPECT_EQ(c.a2, 0.0);
  EXPECT_EQ(correction_energy(c), 8.0);
}

TEST(Correction, TwoBodyShiftCoefficients) {
  DoubleFactorization f;
  f.n_orbitals = 4;
  f.a2_prime = 0.3;
  Leaf leaf;
  leaf.rotation = Matrix::Identity(4, 4);
  leaf.factor = Vector::Ones(4);
  leaf.alpha = 0.2;
  leaf.sign = -1;
  leaf.xi = 4;
  f.leaves.push_back(leaf);
  const ShiftCorrection c = shift_correction(f, 2);
  const double alpha_total = 0.3 - 0.2;
  EXPECT_DOUBLE_EQ(c.a2, 0.5 * alpha_total);
  EXPECT_DOUBLE_EQ(c.a1, -4 * alpha_total);
}

// Exact energy bookkeeping on an untruncated shifted factorization: the
// encoded operator differs from H only by the number-operator polynomial.
class ShiftedSpectrum : public ::testing::TestWithParam<std::string> {};

TEST_P(ShiftedSpectrum, EigenvaluesShiftByCorrection) {
  const FcidumpData d = read_fcidump(testing::fcidump_path(GetParam()));
  const int n = d.g.n_orbitals();
  GlobalShiftResult gs = global_two_body_shift(d.g, n * n, 0.0);
  DoubleFactorization f = gs.fact;
  f.a1_prime = one_body_shift(d.one_body.eig_values).a1_prime;
  ASSERT_NE(f.a2_prime, 0.0);
  const DenseHamiltonian exact =
      build_from_integrals(d.one_body.k, d.g, d.one_body.e_nuc);
  const DenseHamiltonian encoded = build_from_factorization(f, d.one_body);
  for (int ne = 0; ne <= 2 * n; ++ne) {
    const double corr = correction_energy(shift_correction(f, ne));
    const Vector a = spectrum(exact, ne);
    const Vector b = spectrum(encoded, ne);
    EXPECT_LT((a - (b.array() + corr).matrix()).cwiseAbs().maxCoeff(), 1e-10)
        << "n_e = " << ne;
  }
}

INSTANTIATE_TEST_SUITE_P(Data, ShiftedSpectrum,
                         ::testing::Values("h2_sto3g", "h4_chain_sto3g"));

}  // namespace
}  // namespace hamfactor
