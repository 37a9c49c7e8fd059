// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/resources.hpp"

#include <cmath>

#include "hamfactor/errors.hpp"
#include "hamfactor/norms.hpp"

namespace hamfactor {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::int64_t ceil_log2(std::int64_t x) {
  std::int64_t bits = 0;
  while ((std::int64_t{1} << bits) < x) ++bits;
  return bits;
}

std::int64_t nonzeros(const Vector& v) { return (v.array() != 0.0).count(); }

}  // namespace

bool is_power_of_two(std::int64_t k) { return k >= 1 && (k & (k - 1)) == 0; }

QromCost qrom_cost(std::int64_t entries, std::int64_t bits, std::int64_t k) {
  if (!is_power_of_two(k))
    throw ValidationError("QROM k must be a power of two, got " +
                          std::to_string(k));
  if (entries < 1) throw ValidationError("QROM needs at least one entry");
  if (bits < 0) throw ValidationError("QROM bit width must be >= 0");
  const std::int64_t blocks = ceil_div(entries, k);
  return {blocks + bits * (k - 1), bits * (k - 1) + ceil_log2(blocks)};
}

std::int64_t optimal_k(std::int64_t entries, std::int64_t bits,
                       KObjective objective, std::int64_t ancilla_cap) {
  if (entries < 1 || bits < 1)
    throw ValidationError("optimal_k needs L >= 1 and b >= 1");
  if (objective == KObjective::qubit_cap) {
    std::int64_t best = 1;
    for (std::int64_t k = 1; k <= entries; k *= 2)
      if (qrom_cost(entries, bits, k).ancillae <= ancilla_cap) best = k;
    return best;
  }
  const double target =
      std::sqrt(static_cast<double>(entries) / static_cast<double>(bits));
  std::int64_t lo = 1;
  while (static_cast<double>(lo * 2) <= target) lo *= 2;
  const std::int64_t hi = lo * 2;
  if (hi > entries) return lo;
  return qrom_cost(entries, bits, hi).toffolis <
                 qrom_cost(entries, bits, lo).toffolis
             ? hi
             : lo;
}

QromCost rotation_lookup_cost(std::int64_t entries, int n_orbitals, int beta,
                              std::int64_t k_r) {
  const std::int64_t bits = static_cast<std::int64_t>(n_orbitals) * beta;
  if (k_r == 0) k_r = optimal_k(entries, bits);
  return qrom_cost(entries, bits, k_r);
}

std::int64_t rotation_entries(const DoubleFactorization& fact) {
  std::int64_t total = 0;
  for (const Leaf& leaf : fact.leaves) {
    if (leaf.full_rank())
      total += static_cast<std::int64_t>(leaf.xi) * fact.n_orbitals;
    else if (leaf.shifted())
      total += nonzeros(leaf.p) + leaf.theta;
    else
      total += leaf.xi;
  }
  return total;
}

std::int64_t state_prep_entries(const DoubleFactorization& fact) {
  std::int64_t total = 0;
  for (const Leaf& leaf : fact.leaves) {
    if (leaf.full_rank())
      total += leaf.xi;
    else if (leaf.shifted())
      total += (nonzeros(leaf.p) > 0) + (leaf.theta > 0);
    else
      total += 1;
  }
  return total;
}

ResourceEstimate estimate_from_counts(double lambda, int n_orbitals,
                                      std::int64_t rot_entries,
                                      std::int64_t sp_entries,
                                      const CostModelConfig& c) {
  if (!(lambda > 0) || !std::isfinite(lambda))
    throw ValidationError("resource estimate needs a positive lambda");
  if (!(c.epsilon > 0)) throw ValidationError("epsilon must be > 0");
  if (c.k_r != 0 && !is_power_of_two(c.k_r))
    throw ValidationError("k_r must be a power of two or auto");
  rot_entries = std::max<std::int64_t>(rot_entries, 1);
  sp_entries = std::max<std::int64_t>(sp_entries, 1);

  const std::int64_t n = n_orbitals;
  const std::int64_t beta = c.bits_rotations;
  ResourceEstimate e;
  e.lambda = lambda;
  e.rotation_entries = rot_entries;
  e.state_prep_entries = sp_entries;
  e.iterations = static_cast<std::int64_t>(
      std::ceil(c.iteration_constant * lambda / c.epsilon));

  const std::int64_t rot_bits = n * beta;
  e.k_r_used = static_cast<int>(c.k_r ? c.k_r : optimal_k(rot_entries, rot_bits));
  const QromCost rot = qrom_cost(rot_entries, rot_bits, e.k_r_used);

  const std::int64_t sp_bits = c.bits_state_prep + ceil_log2(sp_entries);
  e.k_sp_used = static_cast<int>(optimal_k(sp_entries, std::max<std::int64_t>(sp_bits, 1)));
  const QromCost sp = qrom_cost(sp_entries, sp_bits, e.k_sp_used);

  const std::int64_t swaps = c.swap_toffolis_per_angle_bit * n * beta;
  const std::int64_t givens = c.givens_toffolis_per_orbital * n;
  e.toffoli_per_step = rot.toffolis + sp.toffolis + swaps + givens;
  e.toffoli_total = e.iterations * e.toffoli_per_step;

  const std::int64_t phase_register = ceil_log2(e.iterations);
  e.logical_qubits = 2 * n + rot_bits + rot.ancillae + sp_bits + sp.ancillae +
                     phase_register + beta + c.bookkeeping_qubits;

  e.breakdown = {
      {"iterations", "ceil(c_it * lambda / eps)", e.iterations},
      {"rotation_lookup", "ceil(L_rot/k_r) + N*beta*(k_r-1)", rot.toffolis},
      {"state_prep_lookup", "ceil(L_sp/k_sp) + b_sp*(k_sp-1)", sp.toffolis},
      {"rotation_swaps", "c1 * N * beta", swaps},
      {"givens_application", "c2 * N", givens},
      {"system_qubits", "2N", 2 * n},
      {"rotation_output_qubits", "N * beta", rot_bits},
      {"rotation_ancillae", "N*beta*(k_r-1) + ceil(log2(ceil(L_rot/k_r)))",
       rot.ancillae},
      {"state_prep_output_qubits", "bits_sp + ceil(log2 L_sp)", sp_bits},
      {"state_prep_ancillae", "b_sp*(k_sp-1) + ceil(log2(ceil(L_sp/k_sp)))",
       sp.ancillae},
      {"phase_estimation_qubits", "ceil(log2 iterations)", phase_register},
      {"phase_gradient_qubits", "beta", beta},
      {"bookkeeping_qubits", "constant", c.bookkeeping_qubits},
  };
  return e;
}

ResourceEstimate estimate(const DoubleFactorization& fact,
                          const OneBodyTensors& one_body,
                          const CostModelConfig& config) {
  for (const Leaf& leaf : fact.leaves)
    if (leaf.shifted() && !leaf.full_rank() && leaf.p.size() == 0)
      throw ValidationError(
          "factorization is not finalized: shifted leaf without (P, Q) split");
  if (one_body.n_orbitals() != fact.n_orbitals)
    throw ValidationError("one-body tensors do not match the factorization");
  return estimate_from_counts(lambda_burg(fact, one_body), fact.n_orbitals,
                              rotation_entries(fact), state_prep_entries(fact),
                              config);
}

std::vector<TradeoffRow> kr_tradeoff_sweep(const DoubleFactorization& fact,
                                           const OneBodyTensors& one_body,
                                           const CostModelConfig& config) {
  CostModelConfig c = config;
  c.k_r = 0;
  const ResourceEstimate best = estimate(fact, one_body, c);
  std::vector<TradeoffRow> rows;
  for (int k = 1; k <= 2 * best.k_r_used; k *= 2) {
    c.k_r = k;
    if (k > best.rotation_entries) break;
    const ResourceEstimate e = estimate(fact, one_body, c);
    TradeoffRow row;
    row.k_r = k;
    row.is_auto = k == best.k_r_used;
    row.toffoli_total = e.toffoli_total;
    row.toffoli_per_step = e.toffoli_per_step;
    row.logical_qubits = e.logical_qubits;
    for (const CostTerm& t : e.breakdown)
      if (t.name == "rotation_ancillae") row.rotation_ancillae = t.value;
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json to_json(const ResourceEstimate& e) {
  nlohmann::json terms = nlohmann::json::array();
  for (const CostTerm& t : e.breakdown)
    terms.push_back({{"name", t.name}, {"formula", t.formula}, {"value", t.value}});
  return {{"lambda", e.lambda},
          {"iterations", e.iterations},
          {"toffoli_per_step", e.toffoli_per_step},
          {"toffoli_total", e.toffoli_total},
          {"logical_qubits", e.logical_qubits},
          {"k_r_used", e.k_r_used},
          {"k_sp_used", e.k_sp_used},
          {"rotation_entries", e.rotation_entries},
          {"state_prep_entries", e.state_prep_entries},
          {"breakdown", std::move(terms)}};
}

nlohmann::json to_json(const std::vector<TradeoffRow>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const TradeoffRow& r : rows)
    out.push_back({{"k_r", r.k_r},
                   {"auto", r.is_auto},
                   {"toffoli_total", r.toffoli_total},
                   {"toffoli_per_step", r.toffoli_per_step},
                   {"logical_qubits", r.logical_qubits},
                   {"rotation_ancillae", r.rotation_ancillae}});
  return out;
}

nlohmann::json to_json(const CostModelConfig& c) {
  return {{"bits_state_prep", c.bits_state_prep},
          {"bits_rotations", c.bits_rotations},
          {"epsilon", c.epsilon},
          {"k_r", c.k_r == 0 ? nlohmann::json("auto") : nlohmann::json(c.k_r)},
          {"iteration_constant", c.iteration_constant},
          {"swap_toffolis_per_angle_bit", c.swap_toffolis_per_angle_bit},
          {"givens_toffolis_per_orbital", c.givens_toffolis_per_orbital},
          {"bookkeeping_qubits", c.bookkeeping_qubits}};
}

}  // namespace hamfactor
