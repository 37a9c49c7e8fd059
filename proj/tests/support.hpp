// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the test binaries: fixture paths, random instances and
// naive-loop reference implementations.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hamfactor/model.hpp"

namespace hamfactor::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(HAMFACTOR_DATA_DIR) / name;
}

inline std::filesystem::path fcidump_path(const std::string& name) {
  return data_path(name + ".fcidump");
}

inline Matrix random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = normal(rng);
  return a;
}

inline Vector random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

inline Matrix random_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(n, n);
}

inline TwoElectronTensor random_psd_tensor(int n, int components,
                                           std::uint64_t seed,
                                           double identity_bias = 0.0) {
  SyntheticSpec spec;
  spec.n_orbitals = n;
  spec.n_components = components;
  spec.rng_seed = seed;
  spec.identity_bias = identity_bias;
  return synthesize_instance(spec).g;
}

/// sum_t s_t sum_kl U_pk U_qk V_kl U_rl U_sl by explicit loops.
inline TwoElectronTensor naive_reconstruction(const std::vector<Matrix>& u,
                                              const std::vector<Matrix>& v,
                                              const std::vector<int>& signs = {}) {
  const int n = static_cast<int>(u.front().rows());
  TwoElectronTensor g(n);
  for (std::size_t t = 0; t < u.size(); ++t) {
    const double s = signs.empty() ? 1.0 : signs[t];
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        for (int r = 0; r < n; ++r)
          for (int w = 0; w < n; ++w) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
              for (int l = 0; l < n; ++l)
                acc += u[t](p, k) * u[t](q, k) * v[t](k, l) * u[t](r, l) *
                       u[t](w, l);
            g(p, q, r, w) += s * acc;
          }
  }
  return g;
}

inline double max_abs_diff(const TwoElectronTensor& a,
                           const TwoElectronTensor& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

inline double orthogonality_error(const Matrix& u) {
  const Matrix i = Matrix::Identity(u.rows(), u.cols());
  return std::max((u * u.transpose() - i).cwiseAbs().maxCoeff(),
                  (u.transpose() * u - i).cwiseAbs().maxCoeff());
}

}  // namespace hamfactor::testing
