// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/serialize.hpp"

#include <fstream>

#include "hamfactor/errors.hpp"

namespace hamfactor {

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("matrix must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols =
      rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw ValidationError("ragged matrix in JSON");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("vector must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[i].get<double>();
  return v;
}

Json factorization_to_json(const DoubleFactorization& fact) {
  Json leaves = Json::array();
  for (const Leaf& leaf : fact.leaves) {
    Json l;
    l["U"] = matrix_to_json(leaf.rotation);
    if (leaf.full_rank())
      l["V"] = matrix_to_json(leaf.core);
    else
      l["W"] = vector_to_json(leaf.factor);
    l["alpha"] = leaf.alpha;
    l["xi"] = leaf.xi;
    if (leaf.sign != 1) l["sign"] = leaf.sign;
    if (leaf.p.size() > 0) {
      l["P"] = vector_to_json(leaf.p);
      l["Q"] = vector_to_json(leaf.q);
      l["theta"] = leaf.theta;
    }
    leaves.push_back(std::move(l));
  }
  Json j;
  j["n_orbitals"] = fact.n_orbitals;
  j["method"] = to_string(fact.method);
  if (!fact.variant.empty()) j["variant"] = fact.variant;
  j["leaves"] = std::move(leaves);
  j["a1_prime"] = fact.a1_prime;
  j["thresholds"] = {{"delta_df", fact.thresholds.delta_df},
                     {"delta_alpha", fact.thresholds.delta_alpha},
                     {"rho", fact.thresholds.rho}};
  j["truncation"] =
      fact.truncation == TruncationMode::combined ? "combined" : "component";
  Json alphas = Json::array();
  for (const Leaf& leaf : fact.leaves) alphas.push_back(leaf.alpha);
  j["shift"] = {{"a1_prime", fact.a1_prime},
                {"a2_prime", fact.a2_prime},
                {"alpha", std::move(alphas)},
                {"n_alpha", fact.n_alpha()},
                {"alpha_total", fact.alpha_total()}};
  return j;
}

DoubleFactorization factorization_from_json(const Json& j) {
  try {
    DoubleFactorization fact;
    fact.n_orbitals = j.at("n_orbitals").get<int>();
    fact.method = method_from_string(j.at("method").get<std::string>());
    fact.variant = j.value("variant", std::string{});
    fact.a1_prime = j.value("a1_prime", 0.0);
    if (j.contains("shift")) fact.a2_prime = j["shift"].value("a2_prime", 0.0);
    if (j.contains("thresholds")) {
      const Json& t = j["thresholds"];
      fact.thresholds = {t.value("delta_df", 0.0), t.value("delta_alpha", 0.0),
                         t.value("rho", 0.0)};
    }
    fact.truncation = j.value("truncation", std::string{"component"}) ==
                              "combined"
                          ? TruncationMode::combined
                          : TruncationMode::component;
    for (const Json& l : j.at("leaves")) {
      Leaf leaf;
      leaf.rotation = matrix_from_json(l.at("U"));
      if (l.contains("V"))
        leaf.core = matrix_from_json(l["V"]);
      else
        leaf.factor = vector_from_json(l.at("W"));
      leaf.alpha = l.value("alpha", 0.0);
      leaf.xi = l.value("xi", 0);
      leaf.sign = l.value("sign", 1);
      if (l.contains("P")) {
        leaf.p = vector_from_json(l["P"]);
        leaf.q = vector_from_json(l.at("Q"));
        leaf.theta = l.value("theta", 0);
      }
      if (leaf.rotation.rows() != fact.n_orbitals ||
          leaf.rotation.cols() != fact.n_orbitals)
        throw ValidationError("leaf rotation has wrong shape");
      fact.leaves.push_back(std::move(leaf));
    }
    return fact;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("invalid factorization JSON: ") +
                          e.what());
  }
}

void save_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << j.dump(1) << "\n";
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ValidationError("'" + path.string() + "' is not valid JSON: " +
                          e.what());
  }
}

}  // namespace hamfactor
