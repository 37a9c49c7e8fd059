// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "hamfactor/model.hpp"

namespace hamfactor {

/// Largest spin-orbital count for a dense build. The full Fock space is
/// limited to kMaxFullSpinOrbitals.
inline constexpr int kMaxSpinOrbitals = 14;
inline constexpr int kMaxFullSpinOrbitals = 12;

/**
 * Dense Jordan-Wigner Hamiltonian on determinants. Spin orbital p is the
 * alpha spin of spatial orbital p and p + N its beta partner; bit i of a
 * basis string is the occupation of spin orbital i.
 * n_electrons = -1 means the full Fock space.
 */
struct DenseHamiltonian {
  int n_spin_orbitals = 0;
  int n_electrons = -1;
  std::vector<std::uint32_t> basis;
  Matrix matrix;

  int n_orbitals() const { return n_spin_orbitals / 2; }
};

/// Determinant strings with the given electron count (or all, for -1) in
/// ascending order.
std::vector<std::uint32_t> fock_basis(int n_spin_orbitals, int n_electrons);

/// E_nuc + sum k_pq E_pq + 1/2 sum g_pqrs E_pq E_rs.
DenseHamiltonian build_from_integrals(const Matrix& k,
                                      const TwoElectronTensor& g, double e_nuc,
                                      int n_electrons = -1);

/**
 * Builds the encoded operator H_B of the factorization from rotated Z
 * terms: a constant, -1/2 sum_k (f_k - a1') y_k in the f eigenbasis, and
 * 1/8 s_t [(sum P_k y_k)^2 - (sum Q_k y_k)^2] per leaf in its own basis,
 * with y_k = Z_k + Z_kbar. Each basis change is the determinant-space
 * image of the orbital rotation (Thouless), so det U = -1 needs no
 * special handling. H_B = H - a1 N_e - a2 N_e^2 for the operator H the
 * factorization represents.
 */
DenseHamiltonian build_from_factorization(const DoubleFactorization& fact,
                                          const OneBodyTensors& one_body,
                                          int n_electrons = -1);

/// Determinant-space matrix of the orbital rotation a+_q -> sum_p U_pq a+_p.
Matrix determinant_rotation(const Matrix& u,
                            const std::vector<std::uint32_t>& basis, int n);

/// Scalar part of H_B.
double encoded_constant(const DoubleFactorization& fact,
                        const OneBodyTensors& one_body);

/**
 * The two-body tensor the encoding represents: sum_t s_t U (P(x)P - Q(x)Q)
 * U^T over shifted leaves, U (W(x)W or V) U^T otherwise, plus
 * alpha_total delta delta. Equals reconstruct_tensor up to the
 * truncation of the (P, Q) split.
 */
TwoElectronTensor encoded_tensor(const DoubleFactorization& fact);

/// One-body matrix k such that (k, encoded_tensor) reproduce f exactly.
Matrix encoded_one_body(const DoubleFactorization& fact,
                        const OneBodyTensors& one_body);

struct EigenPair {
  double energy = 0.0;
  Vector state;  // in the sector basis
  std::vector<std::uint32_t> basis;
};

/// Lowest eigenpair of the n_e block. Throws ValidationError if empty.
EigenPair ground_state(const DenseHamiltonian& h, int n_electrons);
double ground_energy(const DenseHamiltonian& h, int n_electrons);

/// Full spectrum of the n_e block (or everything for -1), ascending.
Vector spectrum(const DenseHamiltonian& h, int n_electrons = -1);

/// Diagonal matrix of the electron count on h's basis.
Matrix number_operator(const DenseHamiltonian& h);

}  // namespace hamfactor
