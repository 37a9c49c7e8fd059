// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hamfactor {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * Dense two-electron integrals (pq|rs) in chemists' notation.
 *
 * Storage is the column-major N^2 x N^2 matrix M[(pq),(rs)] with composite
 * index pq = p*N + q, so matrix() is a zero-copy view of the same buffer.
 */
class TwoElectronTensor {
 public:
  TwoElectronTensor() = default;
  explicit TwoElectronTensor(int n_orbitals);

  int n_orbitals() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(int p, int q, int r, int s) const {
    return data_[index(p, q, r, s)];
  }
  double& operator()(int p, int q, int r, int s) {
    return data_[index(p, q, r, s)];
  }

  /// Writes `value` into all eight permutational images of (pq|rs).
  void set_symmetric(int p, int q, int r, int s, double value);

  Eigen::Map<const Matrix> matrix() const {
    return {data_.data(), n_ * n_, n_ * n_};
  }
  Eigen::Map<Matrix> matrix() { return {data_.data(), n_ * n_, n_ * n_}; }

  std::span<const double> values() const noexcept { return data_; }

  /// Largest deviation among the eight images of any element.
  double max_symmetry_violation() const;

  double frobenius_norm() const;

  TwoElectronTensor& operator+=(const TwoElectronTensor& other);
  TwoElectronTensor& operator-=(const TwoElectronTensor& other);

 private:
  std::size_t index(int p, int q, int r, int s) const noexcept {
    const std::size_t n = static_cast<std::size_t>(n_);
    return (static_cast<std::size_t>(p) * n + q) +
           n * n * (static_cast<std::size_t>(r) * n + s);
  }

  int n_ = 0;
  std::vector<double> data_;
};

double frobenius_distance(const TwoElectronTensor& a,
                          const TwoElectronTensor& b);

/// g_pqrs - shift * delta_pq delta_rs.
TwoElectronTensor subtract_number_squared(const TwoElectronTensor& g,
                                          double shift);

/**
 * One-body quantities derived from (h, g).
 *
 * k = h - 1/2 sum_r g_prrq, f = k + sum_r g_pqrr, f = U diag(f_eig) U^T.
 * constant_term is the scalar left over when the exact, unshifted
 * factorized Hamiltonian is written with rotated Z operators:
 * E_nuc + tr f - 1/2 sum_pr g_pprr.
 */
struct OneBodyTensors {
  Matrix h;
  Matrix k;
  Matrix f;
  Matrix eig_vectors;
  Vector eig_values;
  double e_nuc = 0.0;
  double constant_term = 0.0;

  int n_orbitals() const { return static_cast<int>(h.rows()); }
};

OneBodyTensors derive_one_body(const Matrix& h, const TwoElectronTensor& g,
                               double e_nuc);

/// Recipe for a random positive semidefinite instance g = sum_c L^c (x) L^c.
struct SyntheticSpec {
  int n_orbitals = 4;
  int n_components = 3;
  std::uint64_t rng_seed = 1;
  /// Added to every L^c as scale * I; mimics the dominant Coulomb
  /// (density-like) direction of molecular integrals. Zero gives plain
  /// Gaussian factors.
  double identity_bias = 0.0;
};

struct SyntheticInstance {
  TwoElectronTensor g;
  std::vector<Matrix> factors;  // the exact L^c used to build g
};

SyntheticInstance synthesize_instance(const SyntheticSpec& spec);

/// Builds g = sum_c L^c (x) L^c from explicit symmetric factors.
TwoElectronTensor tensor_from_factors(std::span<const Matrix> factors);

enum class Method { XDF, CDF, RCDF, SCDF };

std::string to_string(Method m);
Method method_from_string(const std::string& s);

enum class TruncationMode { component, combined };

struct Thresholds {
  double delta_df = 0.0;
  double delta_alpha = 0.0;
  double rho = 0.0;
};

/**
 * One leaf t of a double factorization: rotation U^t and either a rank-one
 * core W^t (x) W^t or, for CDF/RCDF, a full symmetric core V^t.
 *
 * `sign` is -1 for leaves coming from negative eigenvalues of a shifted
 * tensor; the leaf then contributes -U (W (x) W) U^T.
 * `p`/`q` hold the truncated rank-two split of W (x) W - alpha 1 (x) 1 once
 * the factorization has been finalized; both are empty while alpha == 0.
 */
struct Leaf {
  Matrix rotation;
  Vector factor;
  Matrix core;
  double alpha = 0.0;
  int sign = 1;
  int xi = 0;
  Vector p;
  Vector q;
  int theta = 0;

  bool full_rank() const { return core.size() > 0; }
  bool shifted() const { return alpha != 0.0; }
};

struct DoubleFactorization {
  int n_orbitals = 0;
  Method method = Method::XDF;
  std::vector<Leaf> leaves;
  /// Median shift of the one-body eigenvalues; zero when not applied.
  double a1_prime = 0.0;
  /// Global shift g - a2' delta delta applied before factorizing (XDF+shift).
  double a2_prime = 0.0;
  Thresholds thresholds;
  TruncationMode truncation = TruncationMode::component;
  std::string variant;  // free-form label, e.g. "xdf_shift"

  int n_leaves() const { return static_cast<int>(leaves.size()); }
  int n_alpha() const;
  double alpha_total() const;
  double mean_xi() const;
  std::vector<int> leaf_ranks() const;
  bool full_rank() const;
};

}  // namespace hamfactor
