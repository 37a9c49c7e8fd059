// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>

#include "hamfactor/model.hpp"
#include "json.hpp"

namespace hamfactor {

using Json = nlohmann::json;

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/**
 * Factorization document:
 * {n_orbitals, method, leaves: [{U, W, alpha, xi, ...}], a1_prime,
 *  thresholds: {delta_df, delta_alpha, rho}, shift: {...}}
 * Doubles are written in shortest round-trip form, so a reload is
 * bit-identical.
 */
Json factorization_to_json(const DoubleFactorization& fact);
DoubleFactorization factorization_from_json(const Json& j);

void save_json(const std::filesystem::path& path, const Json& j);
Json load_json(const std::filesystem::path& path);

}  // namespace hamfactor
