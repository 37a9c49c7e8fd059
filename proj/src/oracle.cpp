// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/oracle.hpp"

#include <bit>
#include <unordered_map>

#include "hamfactor/errors.hpp"
#include "hamfactor/shift.hpp"
#include "linalg.hpp"

namespace hamfactor {

namespace {

void check_size(int n_spin, int n_electrons) {
  if (n_spin > kMaxSpinOrbitals)
    throw ValidationError("dense Hamiltonian limited to " +
                          std::to_string(kMaxSpinOrbitals) +
                          " spin orbitals, got " + std::to_string(n_spin));
  if (n_electrons < 0 && n_spin > kMaxFullSpinOrbitals)
    throw ValidationError("full Fock space limited to " +
                          std::to_string(kMaxFullSpinOrbitals) +
                          " spin orbitals; pass an electron count");
  if (n_electrons > n_spin) throw ValidationError("too many electrons");
}

/// a+_i a_j on determinant b. Returns 0 when the result vanishes.
int excite(std::uint32_t b, int i, int j, std::uint32_t& out) {
  if (!((b >> j) & 1u)) return 0;
  std::uint32_t c = b & ~(1u << j);
  int sign = (std::popcount(c & ((1u << j) - 1u)) & 1) ? -1 : 1;
  if ((c >> i) & 1u) return 0;
  if (std::popcount(c & ((1u << i) - 1u)) & 1) sign = -sign;
  out = c | (1u << i);
  return sign;
}

std::vector<int> index_map(const std::vector<std::uint32_t>& basis,
                           int n_spin) {
  std::vector<int> map(std::size_t{1} << n_spin, -1);
  for (std::size_t i = 0; i < basis.size(); ++i)
    map[basis[i]] = static_cast<int>(i);
  return map;
}

/// y_k = Z_k + Z_kbar on a determinant: 2 - 2 (n_k + n_kbar).
Vector y_values(std::uint32_t b, int n) {
  Vector y(n);
  for (int k = 0; k < n; ++k)
    y(k) = 2.0 - 2.0 * (((b >> k) & 1u) + ((b >> (k + n)) & 1u));
  return y;
}

double leaf_diagonal(const Leaf& leaf, const Vector& y) {
  if (leaf.full_rank()) return 0.125 * leaf.sign * y.dot(leaf.core * y);
  if (!leaf.shifted()) {
    const double a = leaf.factor.dot(y);
    return 0.125 * leaf.sign * a * a;
  }
  ShiftedFactorPair pair;
  if (leaf.p.size() > 0) {
    pair.p = leaf.p;
    pair.q = leaf.q;
  } else {
    pair = split_shifted_factor(leaf.factor, leaf.alpha);
  }
  const double a = pair.p.dot(y);
  const double c = pair.q.dot(y);
  return 0.125 * leaf.sign * (a * a - c * c);
}

std::vector<std::vector<int>> alpha_count_blocks(
    const std::vector<std::uint32_t>& basis, int n) {
  std::vector<std::vector<int>> blocks(n + 1);
  const std::uint32_t mask = (1u << n) - 1u;
  for (std::size_t i = 0; i < basis.size(); ++i)
    blocks[std::popcount(basis[i] & mask)].push_back(static_cast<int>(i));
  return blocks;
}

/// H += R diag(d) R^T, done separately on each alpha-count block.
void add_rotated_diagonal(Matrix& h, const Matrix& u,
                          const std::vector<std::uint32_t>& basis, int n,
                          const Vector& d) {
  for (const std::vector<int>& block : alpha_count_blocks(basis, n)) {
    if (block.empty()) continue;
    std::vector<std::uint32_t> sub(block.size());
    Vector dd(block.size());
    for (std::size_t i = 0; i < block.size(); ++i) {
      sub[i] = basis[block[i]];
      dd(i) = d(block[i]);
    }
    const Matrix r = determinant_rotation(u, sub, n);
    const Matrix contrib = r * dd.asDiagonal() * r.transpose();
    for (std::size_t i = 0; i < block.size(); ++i)
      for (std::size_t j = 0; j < block.size(); ++j)
        h(block[i], block[j]) += contrib(i, j);
  }
}

double block_sum(const Leaf& leaf) {
  if (leaf.full_rank()) return leaf.core.sum();
  if (!leaf.shifted()) {
    const double s = leaf.factor.sum();
    return s * s;
  }
  ShiftedFactorPair pair;
  if (leaf.p.size() > 0) {
    pair.p = leaf.p;
    pair.q = leaf.q;
  } else {
    pair = split_shifted_factor(leaf.factor, leaf.alpha);
  }
  const double a = pair.p.sum();
  const double c = pair.q.sum();
  return a * a - c * c;
}

}  // namespace

std::vector<std::uint32_t> fock_basis(int n_spin_orbitals, int n_electrons) {
  check_size(n_spin_orbitals, n_electrons);
  std::vector<std::uint32_t> out;
  const std::uint32_t end = 1u << n_spin_orbitals;
  for (std::uint32_t b = 0; b < end; ++b)
    if (n_electrons < 0 || std::popcount(b) == n_electrons) out.push_back(b);
  return out;
}

DenseHamiltonian build_from_integrals(const Matrix& k,
                                      const TwoElectronTensor& g, double e_nuc,
                                      int n_electrons) {
  const int n = g.n_orbitals();
  if (k.rows() != n || k.cols() != n)
    throw ValidationError("one-body matrix does not match orbital count");
  DenseHamiltonian h;
  h.n_spin_orbitals = 2 * n;
  h.n_electrons = n_electrons;
  h.basis = fock_basis(2 * n, n_electrons);
  const std::vector<int> map = index_map(h.basis, 2 * n);
  const Eigen::Index dim = static_cast<Eigen::Index>(h.basis.size());
  h.matrix = Matrix::Zero(dim, dim);

  for (Eigen::Index col = 0; col < dim; ++col) {
    const std::uint32_t b = h.basis[col];
    h.matrix(col, col) += e_nuc;
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s)
        for (int sigma = 0; sigma < 2; ++sigma) {
          std::uint32_t b1;
          const int s1 = excite(b, r + sigma * n, s + sigma * n, b1);
          if (!s1) continue;
          if (k(r, s) != 0.0) h.matrix(map[b1], col) += s1 * k(r, s);
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) {
              const double v = g(p, q, r, s);
              if (v == 0.0) continue;
              for (int tau = 0; tau < 2; ++tau) {
                std::uint32_t b2;
                const int s2 = excite(b1, p + tau * n, q + tau * n, b2);
                if (s2) h.matrix(map[b2], col) += 0.5 * s1 * s2 * v;
              }
            }
        }
  }
  return h;
}

Matrix determinant_rotation(const Matrix& u,
                            const std::vector<std::uint32_t>& basis, int n) {
  const std::uint32_t mask = (1u << n) - 1u;
  std::unordered_map<std::uint64_t, double> cache;
  auto det = [&](std::uint32_t rows, std::uint32_t cols) {
    const std::uint64_t key = (static_cast<std::uint64_t>(rows) << 32) | cols;
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const int m = std::popcount(rows);
    double value = 1.0;
    if (m > 0) {
      Matrix sub(m, m);
      int i = 0;
      for (int p = 0; p < n; ++p) {
        if (!((rows >> p) & 1u)) continue;
        int j = 0;
        for (int q = 0; q < n; ++q)
          if ((cols >> q) & 1u) sub(i, j++) = u(p, q);
        ++i;
      }
      value = sub.determinant();
    }
    cache.emplace(key, value);
    return value;
  };

  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  Matrix r = Matrix::Zero(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const std::uint32_t ma = basis[j] & mask;
    const std::uint32_t mb = basis[j] >> n;
    for (Eigen::Index i = 0; i < dim; ++i) {
      const std::uint32_t na = basis[i] & mask;
      const std::uint32_t nb = basis[i] >> n;
      if (std::popcount(na) != std::popcount(ma) ||
          std::popcount(nb) != std::popcount(mb))
        continue;
      r(i, j) = det(na, ma) * det(nb, mb);
    }
  }
  return r;
}

double encoded_constant(const DoubleFactorization& fact,
                        const OneBodyTensors& one_body) {
  double c = one_body.e_nuc +
             (one_body.eig_values.array() - fact.a1_prime).sum();
  for (const Leaf& leaf : fact.leaves) c -= 0.5 * leaf.sign * block_sum(leaf);
  return c;
}

DenseHamiltonian build_from_factorization(const DoubleFactorization& fact,
                                          const OneBodyTensors& one_body,
                                          int n_electrons) {
  const int n = fact.n_orbitals;
  if (one_body.n_orbitals() != n)
    throw ValidationError("one-body tensors do not match the factorization");
  DenseHamiltonian h;
  h.n_spin_orbitals = 2 * n;
  h.n_electrons = n_electrons;
  h.basis = fock_basis(2 * n, n_electrons);
  const Eigen::Index dim = static_cast<Eigen::Index>(h.basis.size());
  h.matrix = Matrix::Identity(dim, dim) * encoded_constant(fact, one_body);

  std::vector<Vector> ys(dim);
  for (Eigen::Index i = 0; i < dim; ++i) ys[i] = y_values(h.basis[i], n);

  const Vector shifted_f = one_body.eig_values.array() - fact.a1_prime;
  Vector d(dim);
  for (Eigen::Index i = 0; i < dim; ++i) d(i) = -0.5 * shifted_f.dot(ys[i]);
  add_rotated_diagonal(h.matrix, one_body.eig_vectors, h.basis, n, d);

  for (const Leaf& leaf : fact.leaves) {
    for (Eigen::Index i = 0; i < dim; ++i) d(i) = leaf_diagonal(leaf, ys[i]);
    add_rotated_diagonal(h.matrix, leaf.rotation, h.basis, n, d);
  }
  return h;
}

TwoElectronTensor encoded_tensor(const DoubleFactorization& fact) {
  const int n = fact.n_orbitals;
  TwoElectronTensor g(n);
  auto m = g.matrix();
  for (const Leaf& leaf : fact.leaves) {
    if (leaf.full_rank()) {
      const Matrix c = detail::outer_columns(leaf.rotation);
      m.noalias() += leaf.sign * (c * leaf.core * c.transpose());
    } else if (!leaf.shifted()) {
      const Vector a = detail::leaf_vector(leaf.rotation, leaf.factor);
      m.noalias() += leaf.sign * (a * a.transpose());
    } else {
      ShiftedFactorPair pair;
      if (leaf.p.size() > 0) {
        pair.p = leaf.p;
        pair.q = leaf.q;
      } else {
        pair = split_shifted_factor(leaf.factor, leaf.alpha);
      }
      const Vector a = detail::leaf_vector(leaf.rotation, pair.p);
      const Vector b = detail::leaf_vector(leaf.rotation, pair.q);
      m.noalias() += leaf.sign * (a * a.transpose() - b * b.transpose());
    }
  }
  const double alpha = fact.alpha_total();
  if (alpha != 0.0)
    for (int p = 0; p < n; ++p)
      for (int r = 0; r < n; ++r) g(p, p, r, r) += alpha;
  return g;
}

Matrix encoded_one_body(const DoubleFactorization& fact,
                        const OneBodyTensors& one_body) {
  const TwoElectronTensor g = encoded_tensor(fact);
  const int n = fact.n_orbitals;
  Matrix k = one_body.f;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r) k(p, q) -= g(p, q, r, r);
  return 0.5 * (k + k.transpose());
}

namespace {

std::vector<int> sector_indices(const DenseHamiltonian& h, int n_electrons) {
  std::vector<int> idx;
  for (std::size_t i = 0; i < h.basis.size(); ++i)
    if (n_electrons < 0 || std::popcount(h.basis[i]) == n_electrons)
      idx.push_back(static_cast<int>(i));
  return idx;
}

Matrix sector_block(const DenseHamiltonian& h, const std::vector<int>& idx) {
  const Eigen::Index d = static_cast<Eigen::Index>(idx.size());
  Matrix block(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) block(i, j) = h.matrix(idx[i], idx[j]);
  return 0.5 * (block + block.transpose());
}

}  // namespace

EigenPair ground_state(const DenseHamiltonian& h, int n_electrons) {
  const std::vector<int> idx = sector_indices(h, n_electrons);
  if (idx.empty())
    throw ValidationError("no determinants with " +
                          std::to_string(n_electrons) + " electrons");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sector_block(h, idx));
  if (eig.info() != Eigen::Success)
    throw NumericalError("dense diagonalization failed");
  EigenPair out;
  out.energy = eig.eigenvalues()(0);
  out.state = eig.eigenvectors().col(0);
  for (int i : idx) out.basis.push_back(h.basis[i]);
  return out;
}

double ground_energy(const DenseHamiltonian& h, int n_electrons) {
  return spectrum(h, n_electrons)(0);
}

Vector spectrum(const DenseHamiltonian& h, int n_electrons) {
  const std::vector<int> idx = sector_indices(h, n_electrons);
  if (idx.empty())
    throw ValidationError("no determinants with " +
                          std::to_string(n_electrons) + " electrons");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sector_block(h, idx),
                                            Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw NumericalError("dense diagonalization failed");
  return eig.eigenvalues();
}

Matrix number_operator(const DenseHamiltonian& h) {
  const Eigen::Index d = static_cast<Eigen::Index>(h.basis.size());
  Matrix out = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) out(i, i) = std::popcount(h.basis[i]);
  return out;
}

}  // namespace hamfactor
