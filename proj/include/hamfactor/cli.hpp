// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

// Pipeline glue shared by the `hamfactor` executable and the tests.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hamfactor/dfopt.hpp"
#include "hamfactor/model.hpp"
#include "hamfactor/resources.hpp"
#include "hamfactor/shift.hpp"
#include "json.hpp"

namespace hamfactor {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// "4N" / "x4" / "4xN" -> 4 * n_orbitals, plain integers as-is.
int parse_ndf(const std::string& spec, int n_orbitals);

/// Factorization recipe: xdf, xdf-shift, cdf, rcdf, scdf.
struct FactorizeConfig {
  std::string method = "xdf";
  std::string ndf = "4N";
  double delta_df = 1e-4;
  double delta_alpha = 1e-3;
  TruncationMode truncation = TruncationMode::component;
  ShiftObjective shift_objective = ShiftObjective::burg;
  OptimizerConfig optimizer;
};

nlohmann::json to_json(const FactorizeConfig& c);

struct Instance {
  std::string name;
  TwoElectronTensor g;
  OneBodyTensors one_body;
  int n_electrons = 0;
};

/// FCIDUMP path, or "synthetic:N,components,seed[,identity_bias]".
Instance load_instance(const std::string& source);

struct FactorizeResult {
  DoubleFactorization fact;
  std::vector<TraceRecord> trace;
  std::string stop_reason;
  nlohmann::json summary;
};

FactorizeResult factorize_instance(const Instance& inst,
                                   const FactorizeConfig& config);

struct LogLogFit {
  bool defined = false;
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares fit of log y = slope * log x + intercept.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Runs the command line. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace hamfactor
