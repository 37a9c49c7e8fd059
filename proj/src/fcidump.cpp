// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/fcidump.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hamfactor/errors.hpp"

namespace hamfactor {
namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

bool is_header_end(const std::string& line) {
  const std::string u = upper(line);
  return u.find("&END") != std::string::npos ||
         u.find("$END") != std::string::npos ||
         (u.find_first_not_of(" \t\r") != std::string::npos &&
          u.substr(u.find_first_not_of(" \t\r"), 1) == "/");
}

// Pulls KEY=v1,v2,... pairs out of a Fortran namelist body.
void parse_namelist(const std::string& body, FcidumpMetadata& meta,
                    bool& have_norb) {
  std::string text = upper(body);
  for (const char* tag : {"&FCI", "$FCI", "&END", "$END"}) {
    for (auto pos = text.find(tag); pos != std::string::npos;
         pos = text.find(tag))
      text.replace(pos, std::char_traits<char>::length(tag), " ");
  }
  std::replace(text.begin(), text.end(), '/', ' ');

  std::string key;
  std::vector<std::string> values;
  auto flush = [&] {
    if (key.empty()) return;
    auto as_int = [&](std::size_t i) {
      try {
        return std::stoi(values.at(i));
      } catch (const std::exception&) {
        throw ParseError(1, "bad value for " + key + " in FCIDUMP header");
      }
    };
    if (key == "NORB") {
      meta.n_orbitals = as_int(0);
      have_norb = true;
    } else if (key == "NELEC") {
      meta.n_electrons = as_int(0);
    } else if (key == "MS2") {
      meta.ms2 = as_int(0);
    } else if (key == "ORBSYM") {
      meta.orbsym.clear();
      for (std::size_t i = 0; i < values.size(); ++i)
        meta.orbsym.push_back(as_int(i));
    }
    key.clear();
    values.clear();
  };

  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',') {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
           text[j] != ',' && text[j] != '=')
      ++j;
    std::string token = text.substr(i, j - i);
    std::size_t k = j;
    while (k < text.size() && std::isspace(static_cast<unsigned char>(text[k]))) ++k;
    if (k < text.size() && text[k] == '=') {
      flush();
      key = token;
      i = k + 1;
    } else {
      if (!token.empty()) values.push_back(token);
      i = j;
    }
  }
  flush();
}

}  // namespace

FcidumpData parse_fcidump(std::istream& in) {
  FcidumpMetadata meta;
  std::string line;
  std::string header;
  int line_no = 0;
  bool in_header = false;
  bool have_norb = false;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string u = upper(line);
    if (!in_header) {
      if (u.find("&FCI") == std::string::npos &&
          u.find("$FCI") == std::string::npos) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        throw ParseError(line_no, "expected &FCI namelist header");
      }
      in_header = true;
    }
    header += line + "\n";
    if (is_header_end(line) && line_no >= 1) break;
  }
  if (!in_header) throw ParseError(line_no, "empty FCIDUMP stream");
  parse_namelist(header, meta, have_norb);
  if (!have_norb || meta.n_orbitals < 1)
    throw ParseError(line_no, "NORB missing or not positive");

  const int n = meta.n_orbitals;
  TwoElectronTensor g(n);
  Matrix h = Matrix::Zero(n, n);
  double e_nuc = 0.0;
  bool have_core = false;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::string value_token;
    int idx[4];
    ls >> value_token >> idx[0] >> idx[1] >> idx[2] >> idx[3];
    if (!ls) throw ParseError(line_no, "malformed integral line '" + line + "'");
    std::string trailing;
    if (ls >> trailing)
      throw ParseError(line_no, "unexpected trailing text '" + trailing + "'");
    // Fortran writers sometimes use D exponents.
    std::replace(value_token.begin(), value_token.end(), 'D', 'e');
    std::replace(value_token.begin(), value_token.end(), 'd', 'e');
    double value = 0.0;
    const char* first = value_token.data();
    const char* last = first + value_token.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
      throw ParseError(line_no, "bad numeric value '" + value_token + "'");

    for (int v : idx)
      if (v < 0 || v > n)
        throw ValidationError("line " + std::to_string(line_no) +
                              ": orbital index " + std::to_string(v) +
                              " outside [1, " + std::to_string(n) + "]");
    const auto [i, j, k, l] = std::tuple{idx[0], idx[1], idx[2], idx[3]};
    if (i == 0 && j == 0 && k == 0 && l == 0) {
      e_nuc = value;
      have_core = true;
    } else if (k == 0 && l == 0) {
      if (j == 0) continue;  // orbital energy, not needed
      if (i == 0)
        throw ValidationError("line " + std::to_string(line_no) +
                              ": zero index in one-body entry");
      h(i - 1, j - 1) = value;
      h(j - 1, i - 1) = value;
    } else {
      if (i == 0 || j == 0 || k == 0 || l == 0)
        throw ValidationError("line " + std::to_string(line_no) +
                              ": zero index in two-body entry");
      g.set_symmetric(i - 1, j - 1, k - 1, l - 1, value);
    }
  }

  if (!have_core) {
    meta.core_energy_missing = true;
    meta.warnings.push_back("no core energy line; E_nuc defaulted to 0");
  }
  FcidumpData out{std::move(g), {}, std::move(meta)};
  out.one_body = derive_one_body(h, out.g, e_nuc);
  return out;
}

FcidumpData read_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open FCIDUMP '" + path.string() + "'");
  return parse_fcidump(in);
}

void write_fcidump(std::ostream& out, const TwoElectronTensor& g,
                   const Matrix& h, double e_nuc, int n_electrons, int ms2) {
  const int n = g.n_orbitals();
  char buf[96];
  out << " &FCI NORB=" << n << ",NELEC=" << n_electrons << ",MS2=" << ms2
      << ",\n  ORBSYM=";
  for (int i = 0; i < n; ++i) out << "1,";
  out << "\n  ISYM=1,\n &END\n";
  auto emit = [&](double v, int i, int j, int k, int l) {
    std::snprintf(buf, sizeof(buf), "%25.17e %4d %4d %4d %4d\n", v, i, j, k,
                  l);
    out << buf;
  };
  // Canonical order: i >= j, k >= l, (ij) >= (kl).
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k <= i; ++k)
        for (int l = 0; l <= k; ++l) {
          if (i * (i + 1) / 2 + j < k * (k + 1) / 2 + l) continue;
          const double v = g(i, j, k, l);
          if (v != 0.0) emit(v, i + 1, j + 1, k + 1, l + 1);
        }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j)
      if (h(i, j) != 0.0) emit(h(i, j), i + 1, j + 1, 0, 0);
  emit(e_nuc, 0, 0, 0, 0);
}

void write_fcidump(const std::filesystem::path& path, const FcidumpData& data) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  write_fcidump(out, data.g, data.one_body.h, data.one_body.e_nuc,
                data.metadata.n_electrons, data.metadata.ms2);
}

}  // namespace hamfactor
