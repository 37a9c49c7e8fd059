// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "hamfactor/model.hpp"

namespace hamfactor {

struct FcidumpMetadata {
  int n_orbitals = 0;
  int n_electrons = 0;
  int ms2 = 0;
  std::vector<int> orbsym;
  /// No `value 0 0 0 0` line was present; e_nuc was defaulted to zero.
  bool core_energy_missing = false;
  std::vector<std::string> warnings;
};

struct FcidumpData {
  TwoElectronTensor g;
  OneBodyTensors one_body;
  FcidumpMetadata metadata;
};

/// Reads the namelist header and integral lines. Indices are 1-based,
/// integrals are chemists' notation and every symmetry image is filled.
FcidumpData parse_fcidump(std::istream& in);
FcidumpData read_fcidump(const std::filesystem::path& path);

/// Emits the symmetry-unique entries in canonical order with 17 significant
/// digits, zeros skipped.
void write_fcidump(std::ostream& out, const TwoElectronTensor& g,
                   const Matrix& h, double e_nuc, int n_electrons,
                   int ms2 = 0);
void write_fcidump(const std::filesystem::path& path, const FcidumpData& data);

}  // namespace hamfactor
