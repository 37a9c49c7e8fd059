// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/cli.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <map>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hamfactor/errors.hpp"
#include "hamfactor/fcidump.hpp"
#include "hamfactor/norms.hpp"
#include "hamfactor/oracle.hpp"
#include "hamfactor/serialize.hpp"
#include "hamfactor/xdf.hpp"

namespace hamfactor {

int parse_ndf(const std::string& spec, int n_orbitals) {
  std::string s;
  for (char c : spec)
    if (!std::isspace(static_cast<unsigned char>(c)))
      s.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (s.empty()) throw ValidationError("empty n_df");
  bool relative = false;
  auto strip = [&](const std::string& token) {
    if (s.size() >= token.size() &&
        s.compare(s.size() - token.size(), token.size(), token) == 0) {
      s.erase(s.size() - token.size());
      relative = true;
      return true;
    }
    return false;
  };
  if (!strip("XN")) strip("N");
  if (!relative && !s.empty() && s.front() == 'X') {
    s.erase(0, 1);
    relative = true;
  }
  if (s.empty()) s = "1";
  int value = 0;
  std::size_t used = 0;
  try {
    value = std::stoi(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("cannot parse n_df '" + spec + "'");
  }
  if (used != s.size() || value < 1)
    throw ValidationError("n_df must be a positive integer or multiple of N, got '" +
                          spec + "'");
  return relative ? value * n_orbitals : value;
}

nlohmann::json to_json(const FactorizeConfig& c) {
  const OptimizerConfig& o = c.optimizer;
  return {{"method", c.method},
          {"ndf", c.ndf},
          {"delta_df", c.delta_df},
          {"delta_alpha", c.delta_alpha},
          {"truncation",
           c.truncation == TruncationMode::combined ? "combined" : "component"},
          {"shift_objective",
           c.shift_objective == ShiftObjective::frobenius ? "frobenius" : "burg"},
          {"optimizer",
           {{"rho", o.rho},
            {"gamma", o.gamma},
            {"max_outer_iters", o.max_outer_iters},
            {"max_inner_iters", o.max_inner_iters},
            {"lbfgs_tolerance", o.lbfgs_tolerance},
            {"lbfgs_memory", o.lbfgs_memory},
            {"norm_plateau_threshold", o.norm_plateau_threshold},
            {"plateau_window", o.plateau_window},
            {"rng_seed", o.rng_seed},
            {"init_mode", to_string(o.init_mode)},
            {"n_starts", o.n_starts}}}};
}

Instance load_instance(const std::string& source) {
  Instance inst;
  const std::string prefix = "synthetic:";
  if (source.rfind(prefix, 0) == 0) {
    std::vector<double> parts;
    std::stringstream ss(source.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        parts.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ValidationError("bad synthetic spec '" + source + "'");
      }
    }
    if (parts.size() < 3)
      throw ValidationError("synthetic spec is synthetic:N,components,seed[,bias]");
    SyntheticSpec spec;
    spec.n_orbitals = static_cast<int>(parts[0]);
    spec.n_components = static_cast<int>(parts[1]);
    spec.rng_seed = static_cast<std::uint64_t>(parts[2]);
    if (parts.size() > 3) spec.identity_bias = parts[3];
    inst.g = synthesize_instance(spec).g;
    inst.one_body = derive_one_body(Matrix::Zero(spec.n_orbitals, spec.n_orbitals),
                                    inst.g, 0.0);
    inst.n_electrons = spec.n_orbitals;
    inst.name = source;
    return inst;
  }
  FcidumpData data = read_fcidump(source);
  inst.g = std::move(data.g);
  inst.one_body = std::move(data.one_body);
  inst.n_electrons = data.metadata.n_electrons;
  inst.name = source;
  return inst;
}

namespace {

std::string normalized_method(std::string m) {
  std::transform(m.begin(), m.end(), m.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  std::replace(m.begin(), m.end(), '_', '-');
  if (m == "xdf+shift" || m == "xdfshift") m = "xdf-shift";
  return m;
}

nlohmann::json one_body_json(const Instance& inst) {
  return {{"eig_values", vector_to_json(inst.one_body.eig_values)},
          {"e_nuc", inst.one_body.e_nuc},
          {"n_electrons", inst.n_electrons}};
}

}  // namespace

FactorizeResult factorize_instance(const Instance& inst,
                                   const FactorizeConfig& config) {
  const int n = inst.g.n_orbitals();
  const int n_df = parse_ndf(config.ndf, n);
  const std::string method = normalized_method(config.method);
  OptimizerConfig opt = config.optimizer;
  opt.delta_df = config.delta_df;
  opt.delta_alpha = config.delta_alpha;

  FactorizeResult out;
  int n_df_used = n_df;
  if (method == "xdf" || method == "xdf-shift") {
    // The N^2 x N^2 integral matrix has only N^2 eigenpairs.
    n_df_used = std::min(n_df, n * n);
    if (method == "xdf") {
      out.fact = factorize_xdf(inst.g, n_df_used, config.delta_df, config.truncation);
    } else {
      out.fact = global_two_body_shift(inst.g, n_df_used, config.delta_df,
                                       config.shift_objective, config.truncation)
                     .fact;
      out.fact.a1_prime = one_body_shift(inst.one_body.eig_values).a1_prime;
    }
    out.stop_reason = "explicit";
  } else {
    OptimizationResult r;
    if (method == "scdf")
      r = optimize_scdf(inst.g, n_df, opt, &inst.one_body);
    else if (method == "cdf")
      r = optimize_cdf(inst.g, n_df, opt, &inst.one_body);
    else if (method == "rcdf")
      r = optimize_rcdf(inst.g, n_df, opt, &inst.one_body);
    else
      throw ValidationError("unknown method '" + config.method + "'");
    out.fact = std::move(r.fact);
    out.trace = std::move(r.trace);
    out.stop_reason = r.stop_reason;
  }

  const NormReport rep = norm_report(out.fact, inst.one_body);
  const double frob = frobenius_distance(reconstruct_tensor(out.fact), inst.g);
  out.summary = {{"instance", inst.name},
                 {"method", method},
                 {"n_orbitals", n},
                 {"n_df", n_df},
                 {"n_df_used", n_df_used},
                 {"n_leaves", out.fact.n_leaves()},
                 {"mean_xi", rep.mean_xi},
                 {"n_alpha", rep.n_alpha},
                 {"lambda_lcu", rep.lambda_lcu},
                 {"lambda_burg", rep.lambda_burg},
                 {"lambda_burg_no_alpha", rep.lambda_burg_no_alpha},
                 {"a1_prime", out.fact.a1_prime},
                 {"a2_prime", out.fact.a2_prime},
                 {"frobenius_error", frob},
                 {"stop_reason", out.stop_reason}};
  return out;
}

LogLogFit fit_loglog(const std::vector<double>& x,
                     const std::vector<double>& y) {
  LogLogFit fit;
  if (x.size() != y.size()) throw ValidationError("fit needs paired values");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0))
      throw ValidationError("log-log fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const std::size_t m = lx.size();
  if (m < 2) return fit;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) return fit;
  fit.defined = true;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

namespace {

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string stage = "startup";
};

void add_factorize_options(CLI::App* cmd, FactorizeConfig& c,
                           std::string& init_mode, std::string& truncation,
                           std::string& shift_objective) {
  OptimizerConfig& o = c.optimizer;
  cmd->add_option("--method", c.method, "xdf, xdf-shift, cdf, rcdf or scdf")
      ->capture_default_str();
  cmd->add_option("--ndf", c.ndf, "leaf count, absolute or xN (e.g. 4N)")
      ->capture_default_str();
  cmd->add_option("--delta-df", c.delta_df)->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--delta-alpha", c.delta_alpha)->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--rho", o.rho)->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--gamma", o.gamma)->check(CLI::IsMember({1, 2}))
      ->capture_default_str();
  cmd->add_option("--seed", o.rng_seed)->capture_default_str();
  cmd->add_option("--max-outer", o.max_outer_iters)->capture_default_str();
  cmd->add_option("--max-inner", o.max_inner_iters)->capture_default_str();
  cmd->add_option("--lbfgs-tol", o.lbfgs_tolerance)->capture_default_str();
  cmd->add_option("--lbfgs-memory", o.lbfgs_memory)->capture_default_str();
  cmd->add_option("--plateau", o.norm_plateau_threshold,
                  "stop when lambda drops less than this over the window (Ha)")
      ->capture_default_str();
  cmd->add_option("--plateau-window", o.plateau_window)->capture_default_str();
  cmd->add_option("--init", init_mode, "auto, from_xdf, from_xdf_shift or random")
      ->capture_default_str();
  cmd->add_option("--starts", o.n_starts)->capture_default_str();
  cmd->add_option("--truncation", truncation, "component or combined")
      ->capture_default_str();
  cmd->add_option("--shift-objective", shift_objective, "burg or frobenius")
      ->capture_default_str();
}

void resolve_factorize_options(FactorizeConfig& c, const std::string& init_mode,
                               const std::string& truncation,
                               const std::string& shift_objective) {
  c.optimizer.init_mode = init_mode_from_string(init_mode);
  if (truncation == "component")
    c.truncation = TruncationMode::component;
  else if (truncation == "combined")
    c.truncation = TruncationMode::combined;
  else
    throw ValidationError("unknown truncation mode '" + truncation + "'");
  if (shift_objective == "burg")
    c.shift_objective = ShiftObjective::burg;
  else if (shift_objective == "frobenius")
    c.shift_objective = ShiftObjective::frobenius;
  else
    throw ValidationError("unknown shift objective '" + shift_objective + "'");
  c.method = normalized_method(c.method);
}

void add_cost_options(CLI::App* cmd, CostModelConfig& c, std::string& kr) {
  cmd->add_option("--eps", c.epsilon, "target accuracy (Ha)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--kr", kr, "auto or a power of two")->capture_default_str();
  cmd->add_option("--beta", c.bits_rotations, "bits per rotation angle")
      ->capture_default_str();
  cmd->add_option("--bits-sp", c.bits_state_prep, "bits for state preparation")
      ->capture_default_str();
}

void resolve_kr(CostModelConfig& c, const std::string& kr) {
  if (kr == "auto") {
    c.k_r = 0;
    return;
  }
  try {
    std::size_t used = 0;
    c.k_r = std::stoi(kr, &used);
    if (used != kr.size()) throw std::invalid_argument(kr);
  } catch (const std::exception&) {
    throw ValidationError("--kr must be auto or a power of two, got '" + kr + "'");
  }
  if (!is_power_of_two(c.k_r))
    throw ValidationError("--kr must be a power of two, got " + kr);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write '" + path + "'");
  f << text;
}

std::string format_sci(double v, int digits = 2) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits) << v;
  return os.str();
}

int cmd_factorize(Context& ctx, const std::string& input, FactorizeConfig cfg,
                  const std::string& out_path, const std::string& trace_path,
                  const std::string& summary_path) {
  ctx.stage = "load";
  const Instance inst = load_instance(input);
  ctx.stage = "factorize";
  const FactorizeResult r = factorize_instance(inst, cfg);

  ctx.stage = "write";
  const nlohmann::json config = to_json(cfg);
  Json doc = factorization_to_json(r.fact);
  doc["config"] = config;
  doc["one_body"] = one_body_json(inst);
  doc["summary"] = r.summary;
  if (!out_path.empty()) save_json(out_path, doc);
  if (!trace_path.empty()) {
    std::ofstream f(trace_path);
    if (!f) throw ValidationError("cannot write '" + trace_path + "'");
    f << nlohmann::json{{"config", config}}.dump() << '\n';
    write_trace_jsonl(f, r.trace);
  }
  nlohmann::json summary = r.summary;
  summary["config"] = config;
  if (!summary_path.empty()) write_text(summary_path, summary.dump(1) + "\n");
  ctx.out << summary.dump(1) << '\n';
  return kExitOk;
}

struct LoadedFactorization {
  DoubleFactorization fact;
  OneBodyTensors one_body;
  int n_electrons = 0;
  nlohmann::json doc;
};

LoadedFactorization load_factorization(const std::string& path) {
  LoadedFactorization out;
  if (!std::filesystem::exists(path))
    throw ValidationError("factorization file '" + path + "' not found");
  out.doc = load_json(path);
  out.fact = factorization_from_json(out.doc);
  if (out.doc.contains("one_body")) {
    const Json& ob = out.doc["one_body"];
    out.one_body.eig_values = vector_from_json(ob.at("eig_values"));
    out.one_body.e_nuc = ob.value("e_nuc", 0.0);
    out.n_electrons = ob.value("n_electrons", 0);
    const int n = out.fact.n_orbitals;
    if (out.one_body.eig_values.size() != n)
      throw ValidationError("one_body eigenvalues do not match n_orbitals");
    out.one_body.h = Matrix::Zero(n, n);
  }
  return out;
}

void print_resource_table(std::ostream& os, const std::string& method, int n_df,
                          double mean_xi, const ResourceEstimate& e,
                          const std::vector<TradeoffRow>& rows) {
  os << std::left << std::setw(10) << "method" << std::setw(8) << "N_DF"
     << std::setw(8) << "Xi" << std::setw(12) << "lambda(Ha)" << std::setw(6)
     << "k_r" << std::setw(12) << "Toffoli" << "qubits\n";
  auto line = [&](int kr, std::int64_t toff, std::int64_t qubits) {
    std::ostringstream xi;
    xi << std::fixed << std::setprecision(1) << mean_xi;
    std::ostringstream lam;
    lam << std::fixed << std::setprecision(2) << e.lambda;
    os << std::left << std::setw(10) << method << std::setw(8) << n_df
       << std::setw(8) << xi.str() << std::setw(12) << lam.str() << std::setw(6)
       << kr << std::setw(12) << format_sci(static_cast<double>(toff))
       << qubits << '\n';
  };
  line(e.k_r_used, e.toffoli_total, e.logical_qubits);
  for (const TradeoffRow& r : rows)
    if (r.k_r != e.k_r_used) line(r.k_r, r.toffoli_total, r.logical_qubits);
}

int cmd_resources(Context& ctx, const std::string& path, CostModelConfig cost,
                  const std::string& kr, const std::string& out_path, bool table) {
  ctx.stage = "load";
  resolve_kr(cost, kr);
  const LoadedFactorization lf = load_factorization(path);
  if (lf.one_body.eig_values.size() == 0)
    throw ValidationError("factorization file has no one_body section");
  ctx.stage = "resources";
  const ResourceEstimate e = estimate(lf.fact, lf.one_body, cost);
  const std::vector<TradeoffRow> rows = kr_tradeoff_sweep(lf.fact, lf.one_body, cost);
  nlohmann::json report = {{"config", to_json(cost)},
                           {"factorization", path},
                           {"method", to_string(lf.fact.method)},
                           {"variant", lf.fact.variant},
                           {"n_df", lf.fact.n_leaves()},
                           {"mean_xi", lf.fact.mean_xi()},
                           {"n_alpha", lf.fact.n_alpha()},
                           {"estimate", to_json(e)},
                           {"kr_sweep", to_json(rows)}};
  ctx.stage = "write";
  if (!out_path.empty()) write_text(out_path, report.dump(1) + "\n");
  if (table)
    print_resource_table(ctx.out, lf.fact.variant.empty() ? to_string(lf.fact.method)
                                                          : lf.fact.variant,
                         lf.fact.n_leaves(), lf.fact.mean_xi(), e, rows);
  else
    ctx.out << report.dump(1) << '\n';
  return kExitOk;
}

int cmd_verify(Context& ctx, const std::string& path, const std::string& input,
               bool fci, int nelec, const std::string& out_path) {
  ctx.stage = "load";
  const LoadedFactorization lf = load_factorization(path);
  const Instance inst = load_instance(input);
  if (inst.g.n_orbitals() != lf.fact.n_orbitals)
    throw ValidationError("factorization and input differ in orbital count");

  ctx.stage = "reconstruct";
  nlohmann::json report = {{"factorization", path}, {"input", input}};
  report["frobenius_error"] =
      frobenius_distance(reconstruct_tensor(lf.fact), inst.g);
  report["encoded_frobenius_error"] =
      frobenius_distance(encoded_tensor(lf.fact), inst.g);

  if (fci) {
    ctx.stage = "fci";
    const int n = inst.g.n_orbitals();
    if (2 * n > kMaxSpinOrbitals)
      throw ValidationError("--fci needs N <= " + std::to_string(kMaxSpinOrbitals / 2) +
                            ", got N = " + std::to_string(n));
    const int ne = nelec >= 0 ? nelec : inst.n_electrons;
    report["n_electrons"] = ne;
    const DenseHamiltonian exact =
        build_from_integrals(inst.one_body.k, inst.g, inst.one_body.e_nuc, ne);
    const DenseHamiltonian encoded =
        build_from_factorization(lf.fact, inst.one_body, ne);
    const DenseHamiltonian represented =
        build_from_integrals(encoded_one_body(lf.fact, inst.one_body),
                             encoded_tensor(lf.fact), inst.one_body.e_nuc, ne);
    const double e_exact = ground_energy(exact, ne);
    const double e_encoded = ground_energy(encoded, ne);
    const double e_represented = ground_energy(represented, ne);
    const double corr = correction_energy(shift_correction(lf.fact, ne));
    report["fci"] = {{"e_exact", e_exact},
                     {"e_encoded", e_encoded},
                     {"correction_energy", corr},
                     {"e_factorized", e_encoded + corr},
                     {"delta", e_encoded + corr - e_exact},
                     {"shift_correction_residual",
                      std::abs(e_encoded + corr - e_represented)}};
  }
  ctx.stage = "write";
  if (!out_path.empty()) write_text(out_path, report.dump(1) + "\n");
  ctx.out << report.dump(1) << '\n';
  return kExitOk;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_sweep(Context& ctx, const std::vector<std::string>& inputs,
              const std::string& methods, FactorizeConfig cfg,
              CostModelConfig cost, const std::string& kr,
              const std::string& out_path) {
  ctx.stage = "load";
  resolve_kr(cost, kr);
  const std::vector<std::string> method_list = split_list(methods);
  if (inputs.empty()) throw ValidationError("sweep needs at least one input");
  nlohmann::json rows = nlohmann::json::array();
  std::map<std::string, std::vector<std::array<double, 4>>> series;
  for (const std::string& input : inputs) {
    ctx.stage = "load " + input;
    const Instance inst = load_instance(input);
    for (const std::string& m : method_list) {
      ctx.stage = "factorize " + m + " on " + input;
      FactorizeConfig c = cfg;
      c.method = m;
      const FactorizeResult r = factorize_instance(inst, c);
      ctx.stage = "resources " + m + " on " + input;
      DoubleFactorization fact = r.fact;
      const ResourceEstimate e = estimate(fact, inst.one_body, cost);
      rows.push_back({{"instance", input},
                      {"method", normalized_method(m)},
                      {"n_orbitals", inst.g.n_orbitals()},
                      {"summary", r.summary},
                      {"estimate", to_json(e)}});
      series[normalized_method(m)].push_back(
          {static_cast<double>(inst.g.n_orbitals()), e.lambda,
           static_cast<double>(e.toffoli_total),
           static_cast<double>(e.logical_qubits)});
    }
  }
  ctx.stage = "fit";
  nlohmann::json fits = nlohmann::json::object();
  const char* names[] = {"lambda", "toffoli", "qubits"};
  for (const auto& [method, pts] : series) {
    nlohmann::json entry = nlohmann::json::object();
    std::vector<double> xs;
    for (const auto& p : pts) xs.push_back(p[0]);
    for (int q = 0; q < 3; ++q) {
      std::vector<double> ys;
      for (const auto& p : pts) ys.push_back(p[q + 1]);
      const LogLogFit f = fit_loglog(xs, ys);
      entry[names[q]] = f.defined
                            ? nlohmann::json{{"slope", f.slope},
                                             {"intercept", f.intercept},
                                             {"r2", f.r2}}
                            : nlohmann::json{{"slope", nullptr},
                                             {"note", "undefined: fewer than two distinct N"}};
    }
    fits[method] = entry;
  }
  nlohmann::json report = {{"config", {{"factorize", to_json(cfg)}, {"cost", to_json(cost)}}},
                           {"methods", method_list},
                           {"rows", rows},
                           {"fits", fits}};
  ctx.stage = "write";
  if (!out_path.empty()) write_text(out_path, report.dump(1) + "\n");
  ctx.out << std::left << std::setw(12) << "method" << std::setw(16) << "lambda slope"
          << std::setw(16) << "Toffoli slope" << std::setw(16) << "qubit slope" << '\n';
  for (const auto& [method, entry] : fits.items()) {
    ctx.out << std::left << std::setw(12) << method;
    for (const char* q : names) {
      const auto& f = entry[q];
      std::ostringstream cell;
      if (f["slope"].is_null())
        cell << "undefined";
      else
        cell << std::fixed << std::setprecision(2) << f["slope"].get<double>()
             << " (R2 " << std::setprecision(3) << f["r2"].get<double>() << ")";
      ctx.out << std::setw(16) << cell.str();
    }
    ctx.out << '\n';
  }
  if (out_path.empty()) ctx.out << report.dump(1) << '\n';
  return kExitOk;
}

void apply_thread_limit() {
  if (const char* env = std::getenv("HAMFACTOR_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) Eigen::setNbThreads(n);
  }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  Context ctx{out, err};
  apply_thread_limit();

  CLI::App app{"Double-factorized Hamiltonians: factorization, 1-norms, QPE resources"};
  app.require_subcommand(1);

  FactorizeConfig fcfg;
  std::string init_mode = "auto", truncation = "component",
              shift_objective = "burg";
  std::string f_input, f_out, f_trace, f_summary;
  CLI::App* factorize = app.add_subcommand("factorize", "factorize an instance");
  factorize->add_option("input", f_input, "FCIDUMP path or synthetic:N,c,seed")
      ->required();
  add_factorize_options(factorize, fcfg, init_mode, truncation, shift_objective);
  factorize->add_option("--out,-o", f_out, "factorization JSON");
  factorize->add_option("--trace", f_trace, "optimization trace (JSON lines)");
  factorize->add_option("--summary", f_summary, "summary JSON");

  CostModelConfig cost;
  std::string kr = "auto";
  std::string r_fact, r_out;
  bool r_table = false;
  CLI::App* resources = app.add_subcommand("resources", "QPE resource estimate");
  resources->add_option("factorization", r_fact)->required();
  add_cost_options(resources, cost, kr);
  resources->add_option("--out,-o", r_out, "report JSON");
  resources->add_flag("--table", r_table, "print a table instead of JSON");

  std::string v_fact, v_input, v_out;
  bool v_fci = false;
  int v_nelec = -1;
  CLI::App* verify = app.add_subcommand("verify", "check a factorization");
  verify->add_option("factorization", v_fact)->required();
  verify->add_option("--input", v_input, "FCIDUMP path or synthetic spec")->required();
  verify->add_flag("--fci", v_fci, "compare FCI ground energies");
  verify->add_option("--nelec", v_nelec, "electron count (default: from input)");
  verify->add_option("--out,-o", v_out, "report JSON");

  FactorizeConfig scfg;
  std::string s_init = "auto", s_trunc = "component", s_shift = "burg";
  std::vector<std::string> s_inputs;
  std::string s_methods = "xdf,xdf-shift,scdf", s_out, s_kr = "auto";
  CostModelConfig s_cost;
  CLI::App* sweep = app.add_subcommand("sweep", "scaling study over instances");
  sweep->add_option("inputs", s_inputs, "FCIDUMP paths or synthetic specs")->required();
  sweep->add_option("--methods", s_methods, "comma-separated methods")
      ->capture_default_str();
  add_factorize_options(sweep, scfg, s_init, s_trunc, s_shift);
  add_cost_options(sweep, s_cost, s_kr);
  sweep->add_option("--out,-o", s_out, "report JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*factorize) {
      resolve_factorize_options(fcfg, init_mode, truncation, shift_objective);
      return cmd_factorize(ctx, f_input, fcfg, f_out, f_trace, f_summary);
    }
    if (*resources) return cmd_resources(ctx, r_fact, cost, kr, r_out, r_table);
    if (*verify) return cmd_verify(ctx, v_fact, v_input, v_fci, v_nelec, v_out);
    if (*sweep) {
      resolve_factorize_options(scfg, s_init, s_trunc, s_shift);
      return cmd_sweep(ctx, s_inputs, s_methods, scfg, s_cost, s_kr, s_out);
    }
  } catch (const ValidationError& e) {
    err << "hamfactor: " << ctx.stage << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "hamfactor: " << ctx.stage << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "hamfactor: " << ctx.stage << ": " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace hamfactor
