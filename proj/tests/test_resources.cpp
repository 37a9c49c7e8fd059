// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "hamfactor/dfopt.hpp"
#include "hamfactor/errors.hpp"
#include "hamfactor/fcidump.hpp"
#include "hamfactor/norms.hpp"
#include "hamfactor/resources.hpp"
#include "hamfactor/xdf.hpp"
#include "support.hpp"

namespace hamfactor {
namespace {

std::int64_t term(const ResourceEstimate& e, const std::string& name) {
  for (const CostTerm& t : e.breakdown)
    if (t.name == name) return t.value;
  ADD_FAILURE() << "missing term " << name;
  return -1;
}

TEST(Qrom, ConventionalCase) {
  const QromCost c = qrom_cost(128, 16, 1);
  EXPECT_EQ(c.toffolis, 128);
  EXPECT_EQ(c.ancillae, 7);
}

TEST(Qrom, WorkedExamples) {
  QromCost c = qrom_cost(128, 16, 4);
  EXPECT_EQ(c.toffolis, 80);
  EXPECT_EQ(c.ancillae, 53);
  c = qrom_cost(100, 10, 2);
  EXPECT_EQ(c.toffolis, 60);
  EXPECT_EQ(c.ancillae, 16);
}

TEST(Qrom, RejectsBadK) {
  EXPECT_THROW(qrom_cost(128, 16, 3), ValidationError);
  EXPECT_THROW(qrom_cost(128, 16, 0), ValidationError);
}

TEST(Qrom, CeilingsOnNonDivisibleL) {
  for (std::int64_t l = 1; l <= 300; ++l) {
    const QromCost c = qrom_cost(l, 1, 1);
    EXPECT_EQ(c.toffolis, l);
    EXPECT_EQ(c.ancillae,
              static_cast<std::int64_t>(std::ceil(std::log2(static_cast<double>(l)))));
  }
}

TEST(OptimalK, TieGoesToSmallerK) { EXPECT_EQ(optimal_k(128, 16), 2); }

TEST(OptimalK, LEqualsB) {
  for (std::int64_t b : {1, 7, 16, 100}) EXPECT_EQ(optimal_k(b, b), 1);
}

TEST(OptimalK, ExhaustiveSweep) {
  for (std::int64_t b : {10, 16, 20})
    for (int e = 4; e <= 20; ++e) {
      const std::int64_t l = std::int64_t{1} << e;
      const std::int64_t best = qrom_cost(l, b, optimal_k(l, b)).toffolis;
      for (std::int64_t k = 1; k <= l; k *= 2)
        EXPECT_LE(best, qrom_cost(l, b, k).toffolis) << "L=" << l << " b=" << b;
    }
}

TEST(OptimalK, QubitCap) {
  const std::int64_t k = optimal_k(1024, 16, KObjective::qubit_cap, 60);
  EXPECT_LE(qrom_cost(1024, 16, k).ancillae, 60);
  EXPECT_GT(qrom_cost(1024, 16, 2 * k).ancillae, 60);
  EXPECT_EQ(optimal_k(1024, 16, KObjective::qubit_cap, 0), 1);
}

TEST(RotationLookup, Examples) {
  QromCost c = rotation_lookup_cost(1024, 32, 16, 1);
  EXPECT_EQ(c.toffolis, 1024);
  EXPECT_EQ(c.ancillae, 10);
  c = rotation_lookup_cost(1024, 32, 16, 2);
  EXPECT_EQ(c.toffolis, 1024);
  EXPECT_EQ(c.ancillae, 521);
  const QromCost a = rotation_lookup_cost(1024, 32, 16, 0);
  EXPECT_LE(a.toffolis, std::min(rotation_lookup_cost(1024, 32, 16, 1).toffolis,
                                 rotation_lookup_cost(1024, 32, 16, 2).toffolis));
}

TEST(Estimate, IterationRule) {
  const CostModelConfig c;
  const ResourceEstimate e = estimate_from_counts(10.0, 4, 12, 3, c);
  EXPECT_EQ(e.iterations, 9818);
  EXPECT_EQ(e.toffoli_total, e.iterations * e.toffoli_per_step);
}

TEST(Estimate, LinearInLambdaAndInverseEpsilon) {
  CostModelConfig c;
  const ResourceEstimate a = estimate_from_counts(10.0, 4, 12, 3, c);
  const ResourceEstimate b = estimate_from_counts(20.0, 4, 12, 3, c);
  EXPECT_EQ(a.toffoli_per_step, b.toffoli_per_step);
  EXPECT_LE(std::abs(b.iterations - 2 * a.iterations), 1);
  c.epsilon /= 2;
  const ResourceEstimate d = estimate_from_counts(10.0, 4, 12, 3, c);
  EXPECT_LE(std::abs(d.iterations - 2 * a.iterations), 1);
}

TEST(Estimate, BreakdownReproducesTotals) {
  CostModelConfig c;
  const ResourceEstimate e = estimate_from_counts(50.0, 8, 200, 32, c);
  const std::int64_t n = 8, beta = c.bits_rotations;
  const QromCost rot = qrom_cost(200, n * beta, e.k_r_used);
  EXPECT_EQ(term(e, "rotation_lookup"), rot.toffolis);
  EXPECT_EQ(term(e, "rotation_ancillae"), rot.ancillae);
  EXPECT_EQ(term(e, "rotation_swaps"), c.swap_toffolis_per_angle_bit * n * beta);
  EXPECT_EQ(term(e, "givens_application"), c.givens_toffolis_per_orbital * n);
  EXPECT_EQ(e.toffoli_per_step,
            term(e, "rotation_lookup") + term(e, "state_prep_lookup") +
                term(e, "rotation_swaps") + term(e, "givens_application"));
  std::int64_t qubits = 0;
  for (const char* name :
       {"system_qubits", "rotation_output_qubits", "rotation_ancillae",
        "state_prep_output_qubits", "state_prep_ancillae",
        "phase_estimation_qubits", "phase_gradient_qubits", "bookkeeping_qubits"})
    qubits += term(e, name);
  EXPECT_EQ(e.logical_qubits, qubits);
  for (const CostTerm& t : e.breakdown) EXPECT_GE(t.value, 0) << t.name;
}

TEST(Estimate, BetaOnlyChangesRotationTerms) {
  CostModelConfig c;
  c.k_r = 1;
  const ResourceEstimate a = estimate_from_counts(50.0, 8, 200, 32, c);
  c.bits_rotations = 20;
  const ResourceEstimate b = estimate_from_counts(50.0, 8, 200, 32, c);
  EXPECT_EQ(term(a, "rotation_output_qubits"), 8 * 16);
  EXPECT_EQ(term(b, "rotation_output_qubits"), 8 * 20);
  for (const char* name : {"iterations", "state_prep_lookup", "system_qubits",
                           "state_prep_ancillae", "givens_application"})
    EXPECT_EQ(term(a, name), term(b, name)) << name;
}

TEST(Estimate, RejectsBadInputs) {
  CostModelConfig c;
  EXPECT_THROW(estimate_from_counts(0.0, 4, 12, 3, c), ValidationError);
  c.k_r = 3;
  EXPECT_THROW(estimate_from_counts(1.0, 4, 12, 3, c), ValidationError);
  c.k_r = 0;
  c.epsilon = 0.0;
  EXPECT_THROW(estimate_from_counts(1.0, 4, 12, 3, c), ValidationError);
}

TEST(Estimate, UnfinalizedFactorizationRejected) {
  const FcidumpData d = read_fcidump(testing::fcidump_path("h4_chain_sto3g"));
  DoubleFactorization f = factorize_xdf(d.g, 16, 1e-4);
  f.leaves[0].alpha = 0.01;
  EXPECT_THROW(estimate(f, d.one_body, CostModelConfig{}), ValidationError);
}

TEST(Estimate, TighterTruncationNeverCostsMorePerStep) {
  const FcidumpData d = read_fcidump(testing::fcidump_path("lih_sto3g"));
  std::int64_t previous = std::numeric_limits<std::int64_t>::max();
  for (double delta : {0.0, 1e-4, 1e-3, 1e-2}) {
    const DoubleFactorization f = factorize_xdf(d.g, 24, delta);
    CostModelConfig c;
    const ResourceEstimate e = estimate(f, d.one_body, c);
    EXPECT_LE(e.toffoli_per_step, previous) << delta;
    previous = e.toffoli_per_step;
  }
}

TEST(Estimate, FemocoXdfRowOrderOfMagnitude) {
  // Reported XDF row: N = 54 spatial orbitals, N_DF = 4N, Xi = 54,
  // lambda = 293.9 Ha, 9.6e9 Toffolis, 3,722 logical qubits.
  const CostModelConfig c;
  const ResourceEstimate e = estimate_from_counts(293.9, 54, 216 * 54, 216, c);
  EXPECT_GT(e.toffoli_total, 9.6e9 / 2);
  EXPECT_LT(e.toffoli_total, 9.6e9 * 2);
  EXPECT_GT(e.logical_qubits, 3722 / 1.5);
  EXPECT_LT(e.logical_qubits, 3722 * 1.5);
}

class Tradeoff : public ::testing::Test {
 protected:
  void SetUp() override {
    data = read_fcidump(testing::fcidump_path("h6_chain_sto3g"));
    fact = factorize_xdf(data.g, 24, 1e-4);
    rows = kr_tradeoff_sweep(fact, data.one_body, CostModelConfig{});
  }
  FcidumpData data;
  DoubleFactorization fact;
  std::vector<TradeoffRow> rows;
};

TEST_F(Tradeoff, AutoRowIsMinimal) {
  ASSERT_FALSE(rows.empty());
  const auto it = std::find_if(rows.begin(), rows.end(),
                               [](const TradeoffRow& r) { return r.is_auto; });
  ASSERT_NE(it, rows.end());
  for (const TradeoffRow& r : rows) EXPECT_LE(it->toffoli_total, r.toffoli_total);
}

TEST_F(Tradeoff, KOneHasFewestRotationAncillae) {
  EXPECT_EQ(rows.front().k_r, 1);
  for (const TradeoffRow& r : rows)
    EXPECT_LE(rows.front().rotation_ancillae, r.rotation_ancillae);
}

TEST_F(Tradeoff, UnimodalAroundOptimum) {
  std::size_t i = 0;
  while (i + 1 < rows.size() && rows[i + 1].toffoli_total <= rows[i].toffoli_total) ++i;
  for (std::size_t j = i; j + 1 < rows.size(); ++j)
    EXPECT_GE(rows[j + 1].toffoli_total, rows[j].toffoli_total);
}

TEST(Entries, CountsPerLeafKind) {
  DoubleFactorization f;
  f.n_orbitals = 4;
  Leaf plain;
  plain.factor = Vector::Ones(4);
  plain.xi = 3;
  Leaf shifted = plain;
  shifted.alpha = 0.5;
  shifted.p = Vector::Ones(4);
  shifted.p(0) = 0.0;
  shifted.q = Vector::Ones(4);
  shifted.theta = 2;
  Leaf full;
  full.core = Matrix::Identity(4, 4);
  full.xi = 2;
  f.leaves = {plain, shifted, full};
  EXPECT_EQ(rotation_entries(f), 3 + (3 + 2) + 2 * 4);
  EXPECT_EQ(state_prep_entries(f), 1 + 2 + 2);
}

}  // namespace
}  // namespace hamfactor
