// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hamfactor/model.hpp"
#include "json.hpp"

namespace hamfactor {

struct CostModelConfig {
  int bits_state_prep = 10;
  int bits_rotations = 16;  // beta
  double epsilon = 1.6e-3;  // Ha
  int k_r = 0;              // 0 selects the Toffoli-optimal power of two
  /// iterations = ceil(iteration_constant * lambda / epsilon).
  double iteration_constant = 1.5707963267948966;
  // Per-step terms beyond the two lookups, calibrated to the FeMoco XDF row.
  int swap_toffolis_per_angle_bit = 32;  // c1 * N * beta
  int givens_toffolis_per_orbital = 2;   // c2 * N
  int bookkeeping_qubits = 33;
};

struct QromCost {
  std::int64_t toffolis = 0;
  std::int64_t ancillae = 0;
};

struct CostTerm {
  std::string name;
  std::string formula;
  std::int64_t value = 0;
};

struct ResourceEstimate {
  double lambda = 0.0;
  std::int64_t iterations = 0;
  std::int64_t toffoli_per_step = 0;
  std::int64_t toffoli_total = 0;
  std::int64_t logical_qubits = 0;
  int k_r_used = 1;
  int k_sp_used = 1;
  std::int64_t rotation_entries = 0;  // L for the angle lookup
  std::int64_t state_prep_entries = 0;
  std::vector<CostTerm> breakdown;  // Toffoli and qubit terms, by name
};

bool is_power_of_two(std::int64_t k);

/// ceil(L/k) + b(k-1) Toffolis, b(k-1) + ceil(log2(ceil(L/k))) ancillae.
QromCost qrom_cost(std::int64_t entries, std::int64_t bits, std::int64_t k);

enum class KObjective { toffoli, qubit_cap };

/**
 * `toffoli`: the cheaper of the two powers of two around sqrt(L/b), ties to
 * the smaller k. `qubit_cap`: the largest power of two k <= L whose
 * ancilla count is <= ancilla_cap (1 if none fits).
 */
std::int64_t optimal_k(std::int64_t entries, std::int64_t bits,
                       KObjective objective = KObjective::toffoli,
                       std::int64_t ancilla_cap = 0);

/// Angle lookup: L = N_DF * Xi records of N * beta bits. k_r = 0 means auto.
QromCost rotation_lookup_cost(std::int64_t entries, int n_orbitals, int beta,
                              std::int64_t k_r);

/// Stored angle sets: Xi per plain leaf, nnz(P) + Theta per shifted leaf,
/// rank * N per full-core leaf.
std::int64_t rotation_entries(const DoubleFactorization& fact);
std::int64_t state_prep_entries(const DoubleFactorization& fact);

ResourceEstimate estimate(const DoubleFactorization& fact,
                          const OneBodyTensors& one_body,
                          const CostModelConfig& config);

/// Same model from explicit inputs (used when only a lambda is known).
ResourceEstimate estimate_from_counts(double lambda, int n_orbitals,
                                      std::int64_t rotation_entries,
                                      std::int64_t state_prep_entries,
                                      const CostModelConfig& config);

struct TradeoffRow {
  int k_r = 1;
  bool is_auto = false;
  std::int64_t toffoli_total = 0;
  std::int64_t toffoli_per_step = 0;
  std::int64_t logical_qubits = 0;
  std::int64_t rotation_ancillae = 0;
};

/// Powers of two k_r = 1 .. 2 * k_auto.
std::vector<TradeoffRow> kr_tradeoff_sweep(const DoubleFactorization& fact,
                                           const OneBodyTensors& one_body,
                                           const CostModelConfig& config);

nlohmann::json to_json(const ResourceEstimate& e);
nlohmann::json to_json(const std::vector<TradeoffRow>& rows);
nlohmann::json to_json(const CostModelConfig& c);

}  // namespace hamfactor
