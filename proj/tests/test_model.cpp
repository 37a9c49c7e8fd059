// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "hamfactor/errors.hpp"
#include "hamfactor/fcidump.hpp"
#include "hamfactor/model.hpp"
#include "support.hpp"

namespace hamfactor {
namespace {

using testing::fcidump_path;
using testing::max_abs_diff;

FcidumpData parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

TEST(Fcidump, ConstantOnlyInput) {
  const FcidumpData d = parse_text(" &FCI NORB=2,NELEC=2,MS2=0,\n &END\n"
                                   "  0.5 0 0 0 0\n");
  EXPECT_EQ(d.g.n_orbitals(), 2);
  for (double v : d.g.values()) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(d.one_body.h.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(d.one_body.e_nuc, 0.5);
  EXPECT_FALSE(d.metadata.core_energy_missing);
}

TEST(Fcidump, SingleTwoBodyEntry) {
  const FcidumpData d = parse_text("&FCI NORB=2, NELEC=2, MS2=0 &END\n"
                                   "1.0 1 1 1 1\n0.0 0 0 0 0\n");
  EXPECT_EQ(d.g(0, 0, 0, 0), 1.0);
  double others = 0.0;
  for (double v : d.g.values()) others += std::abs(v);
  EXPECT_EQ(others, 1.0);
  EXPECT_DOUBLE_EQ(d.one_body.k(0, 0), -0.5);
}

TEST(Fcidump, MalformedLineReportsLineNumber) {
  try {
    parse_text("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 1 1 1 1\nabc 1 1\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(Fcidump, IndexOutOfRange) {
  EXPECT_THROW(parse_text("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n0.5 3 1 1 1\n"),
               ValidationError);
}

TEST(Fcidump, MissingCoreEnergyIsFlagged) {
  const FcidumpData d =
      parse_text("&FCI NORB=1,NELEC=1,MS2=1,\n&END\n0.25 1 1 1 1\n");
  EXPECT_TRUE(d.metadata.core_energy_missing);
  EXPECT_FALSE(d.metadata.warnings.empty());
  EXPECT_EQ(d.one_body.e_nuc, 0.0);
}

TEST(Fcidump, FortranExponentAndMultilineHeader) {
  const FcidumpData d = parse_text(
      " &FCI NORB=   2,NELEC= 2,MS2=0,\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n"
      " 0.5D+00 2 1 0 0\n 1.0 0 0 0 0\n");
  EXPECT_EQ(d.metadata.n_electrons, 2);
  EXPECT_EQ(d.metadata.orbsym.size(), 2u);
  EXPECT_EQ(d.one_body.h(0, 1), 0.5);
  EXPECT_EQ(d.one_body.h(1, 0), 0.5);
}

TEST(Fcidump, ExternalH2RoundTrip) {
  const FcidumpData a = read_fcidump(fcidump_path("h2_sto3g"));
  std::stringstream buf;
  write_fcidump(buf, a.g, a.one_body.h, a.one_body.e_nuc,
                a.metadata.n_electrons, a.metadata.ms2);
  const FcidumpData b = parse_fcidump(buf);
  EXPECT_LT(max_abs_diff(a.g, b.g), 1e-12);
  EXPECT_LT((a.one_body.h - b.one_body.h).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(std::abs(a.one_body.e_nuc - b.one_body.e_nuc), 1e-12);
  EXPECT_EQ(b.metadata.n_electrons, 2);
}

class BundledInstance : public ::testing::TestWithParam<std::string> {};

TEST_P(BundledInstance, SymmetryAndFixedPoint) {
  const FcidumpData a = read_fcidump(fcidump_path(GetParam()));
  EXPECT_LT(a.g.max_symmetry_violation(), 1e-12);
  const Matrix m = a.g.matrix();
  EXPECT_LT((m - m.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  std::stringstream buf;
  write_fcidump(buf, a.g, a.one_body.h, a.one_body.e_nuc,
                a.metadata.n_electrons);
  const FcidumpData b = parse_fcidump(buf);
  EXPECT_LT(max_abs_diff(a.g, b.g), 1e-12);
  EXPECT_LT((a.one_body.f - b.one_body.f).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_P(BundledInstance, OneBodyInvariants) {
  const OneBodyTensors ob = read_fcidump(fcidump_path(GetParam())).one_body;
  for (const Matrix* m : {&ob.h, &ob.k, &ob.f})
    EXPECT_LT((*m - m->transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT(testing::orthogonality_error(ob.eig_vectors), 1e-10);
  const Matrix rebuilt =
      ob.eig_vectors * ob.eig_values.asDiagonal() * ob.eig_vectors.transpose();
  EXPECT_LT((rebuilt - ob.f).cwiseAbs().maxCoeff(), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Data, BundledInstance,
                         ::testing::Values("h2_sto3g", "h4_chain_sto3g",
                                           "lih_sto3g", "h6_chain_sto3g",
                                           "h2o_sto3g", "h8_chain_sto3g"));

TEST(DeriveOneBody, ZeroTwoBody) {
  const OneBodyTensors ob =
      derive_one_body(Matrix::Identity(2, 2), TwoElectronTensor(2), 0.0);
  EXPECT_EQ(ob.k, Matrix::Identity(2, 2));
  EXPECT_EQ(ob.f, Matrix::Identity(2, 2));
  EXPECT_NEAR(ob.eig_values(0), 1.0, 1e-14);
  EXPECT_NEAR(ob.eig_values(1), 1.0, 1e-14);
}

TEST(DeriveOneBody, CoulombOnlyEntry) {
  const double c = 0.7;
  TwoElectronTensor g(2);
  g.set_symmetric(0, 0, 1, 1, c);
  const OneBodyTensors ob = derive_one_body(Matrix::Zero(2, 2), g, 0.0);
  EXPECT_EQ(ob.k(0, 0), 0.0);
  EXPECT_EQ(ob.k(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(ob.f(0, 0), c);
  EXPECT_DOUBLE_EQ(ob.f(1, 1), c);
}

TEST(DeriveOneBody, ContractionsMatchLoops) {
  std::mt19937_64 rng(3);
  const int n = 5;
  const Matrix h = testing::random_symmetric(n, rng);
  const TwoElectronTensor g = testing::random_psd_tensor(n, 4, 11);
  const OneBodyTensors ob = derive_one_body(h, g, 1.25);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double k = h(p, q), f = 0.0;
      for (int r = 0; r < n; ++r) {
        k -= 0.5 * g(p, r, r, q);
        f += g(p, q, r, r);
      }
      EXPECT_NEAR(ob.k(p, q), k, 1e-13);
      EXPECT_NEAR(ob.f(q, p), k + f, 1e-13);
    }
  EXPECT_LT((ob.f - ob.f.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  const Matrix rebuilt =
      ob.eig_vectors * ob.eig_values.asDiagonal() * ob.eig_vectors.transpose();
  EXPECT_LT((rebuilt - ob.f).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(DeriveOneBody, Idempotent) {
  const FcidumpData d = read_fcidump(fcidump_path("lih_sto3g"));
  const OneBodyTensors again =
      derive_one_body(d.one_body.h, d.g, d.one_body.e_nuc);
  EXPECT_EQ(again.k, d.one_body.k);
  EXPECT_EQ(again.f, d.one_body.f);
  EXPECT_EQ(again.eig_values, d.one_body.eig_values);
}

TEST(DeriveOneBody, RejectsAsymmetricH) {
  Matrix h = Matrix::Zero(2, 2);
  h(0, 1) = 1e-6;
  EXPECT_THROW(derive_one_body(h, TwoElectronTensor(2), 0.0), ValidationError);
}

TEST(Synthetic, SingleRankOneFactor) {
  Matrix l = Matrix::Zero(2, 2);
  l(0, 0) = 1.0;
  const std::vector<Matrix> factors{l};
  const TwoElectronTensor g = tensor_from_factors(factors);
  EXPECT_EQ(g(0, 0, 0, 0), 1.0);
  double total = 0.0;
  for (double v : g.values()) total += std::abs(v);
  EXPECT_EQ(total, 1.0);
}

TEST(Synthetic, RankMatchesComponentCount) {
  SyntheticSpec spec;
  spec.n_orbitals = 4;
  spec.n_components = 3;
  spec.rng_seed = 7;
  const SyntheticInstance inst = synthesize_instance(spec);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Matrix(inst.g.matrix()));
  int nonzero = 0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    EXPECT_GT(eig.eigenvalues()(i), -1e-10);
    if (std::abs(eig.eigenvalues()(i)) > 1e-10) ++nonzero;
  }
  EXPECT_EQ(nonzero, 3);
  EXPECT_EQ(inst.factors.size(), 3u);
}

TEST(Synthetic, GeneratingFactorsReproduceTensor) {
  SyntheticSpec spec;
  spec.n_orbitals = 3;
  spec.n_components = 2;
  spec.rng_seed = 5;
  const SyntheticInstance inst = synthesize_instance(spec);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) {
          double v = 0.0;
          for (const Matrix& l : inst.factors) v += l(p, q) * l(r, s);
          EXPECT_NEAR(inst.g(p, q, r, s), v, 1e-14);
        }
}

TEST(Synthetic, ExactSymmetry) {
  SyntheticSpec spec;
  spec.n_orbitals = 6;
  spec.n_components = 10;
  const TwoElectronTensor g = synthesize_instance(spec).g;
  EXPECT_EQ(g.max_symmetry_violation(), 0.0);
}

TEST(Synthetic, Deterministic) {
  SyntheticSpec spec;
  spec.n_orbitals = 4;
  spec.rng_seed = 42;
  EXPECT_EQ(max_abs_diff(synthesize_instance(spec).g,
                         synthesize_instance(spec).g),
            0.0);
}

TEST(Tensor, SubtractNumberSquared) {
  const TwoElectronTensor g = testing::random_psd_tensor(3, 2, 1);
  const TwoElectronTensor s = subtract_number_squared(g, 0.3);
  for (int p = 0; p < 3; ++p)
    for (int q = 0; q < 3; ++q)
      for (int r = 0; r < 3; ++r)
        for (int t = 0; t < 3; ++t)
          EXPECT_DOUBLE_EQ(s(p, q, r, t),
                           g(p, q, r, t) - ((p == q && r == t) ? 0.3 : 0.0));
}

}  // namespace
}  // namespace hamfactor
