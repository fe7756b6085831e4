// Command-line front end: resonance tables, coupling directions, scattering
// matrices, transmission sweeps, convergence tables and the invariant suite,
// emitted as deterministic CSV or JSON.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "starscat/errors.hpp"
#include "starscat/numerics.hpp"
#include "starscat/profile.hpp"
#include "starscat/resonance.hpp"
#include "starscat/scattering.hpp"
#include "starscat/verify.hpp"
#include "starscat/version.hpp"

namespace {

using nlohmann::json;

// exit codes: 0 ok, 1 verify failure, 2 config error, 3 argument error,
// 4 domain error
constexpr int kExitVerifyFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitArgumentError = 3;
constexpr int kExitDomainError = 4;

struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::string profile_arg = "paper-rect";
  std::string format = "csv";
  std::string out_path;
  int threads = 1;
  bool quiet = false;
};

/// Echo of one run: everything needed to reproduce the output bit-for-bit,
/// plus the wall time (kept out of the data files themselves).
struct RunManifest {
  std::string command;
  std::string profile_source;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string tool_version = starscat::version();
  double wall_ms = 0.0;

  json to_json(bool with_wall_time) const {
    json j;
    j["command"] = command;
    j["profile"] = profile_source;
    json params = json::object();
    for (const auto& [k, v] : parameters) params[k] = v;
    j["parameters"] = params;
    j["version"] = tool_version;
    if (with_wall_time) j["wall_ms"] = wall_ms;
    return j;
  }

  std::vector<std::string> comment_lines() const {
    std::vector<std::string> lines;
    lines.push_back("# tool: starscat " + tool_version);
    lines.push_back("# command: " + command);
    lines.push_back("# profile: " + profile_source);
    std::string params;
    for (const auto& [k, v] : parameters) params += " " + k + "=" + v;
    lines.push_back("# params:" + (params.empty() ? " (none)" : params));
    return lines;
  }
};

std::string fmt15(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

starscat::PotentialProfile load_profile(const std::string& arg) {
  if (arg == "paper-rect" || arg == "symmetric-rect")
    return starscat::builtin_profile(arg);
  std::ifstream in(arg);
  if (!in) throw starscat::MalformedConfig("cannot open profile file: " + arg);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return starscat::parse_profile(buffer.str());
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw ArgumentError(std::string(what) + ": cannot parse number \"" + item + "\"");
    }
  }
  if (out.empty()) throw ArgumentError(std::string(what) + ": empty list");
  return out;
}

std::vector<double> parse_colon_tuple(const std::string& text, std::size_t count,
                                      const char* what) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t pos = 0;
      parts.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ArgumentError(std::string(what) + ": cannot parse \"" + item + "\"");
    }
  }
  if (parts.size() != count)
    throw ArgumentError(std::string(what) + ": expected " + std::to_string(count) +
                        " colon-separated values");
  return parts;
}

void write_output(const GlobalOptions& global, const RunManifest& manifest,
                  const std::string& body) {
  if (global.out_path.empty()) {
    std::cout << body;
    return;
  }
  {
    std::ofstream out(global.out_path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write output file: " + global.out_path);
    out << body;
  }
  std::ofstream mout(global.out_path + ".manifest.json", std::ios::binary);
  mout << manifest.to_json(true).dump(2) << "\n";
  if (!global.quiet)
    std::cerr << "wrote " << global.out_path << " and " << global.out_path
              << ".manifest.json\n";
}

std::string csv_table(const RunManifest& manifest, const std::string& header,
                      const std::vector<std::string>& rows,
                      const std::vector<std::string>& footers = {}) {
  std::string out;
  for (const auto& line : manifest.comment_lines()) out += line + "\n";
  out += header + "\n";
  for (const auto& row : rows) out += row + "\n";
  for (const auto& f : footers) out += f + "\n";
  return out;
}

std::string json_table(const RunManifest& manifest, const std::vector<std::string>& columns,
                       const json& rows, const json& extra = json::object()) {
  json root;
  root["manifest"] = manifest.to_json(false);
  root["columns"] = columns;
  root["rows"] = rows;
  for (auto it = extra.begin(); it != extra.end(); ++it) root[it.key()] = it.value();
  return root.dump(2) + "\n";
}

// --- subcommand implementations ---------------------------------------------

struct ResonanceArgs {
  std::string range;
  double step = 0.01;
  bool coupling_only = false;
};

int run_resonances(const GlobalOptions& global, const ResonanceArgs& args,
                   RunManifest& manifest) {
  const auto bounds = parse_colon_tuple(args.range, 2, "--range");
  if (!(bounds[0] < bounds[1]))
    throw ArgumentError("--range: lower bound must be below upper bound");
  if (!(args.step > 0.0)) throw ArgumentError("--step must be positive");

  manifest.parameters = {{"range", args.range}, {"step", fmt15(args.step)}};

  const auto profile = load_profile(global.profile_arg);
  std::vector<std::string> warnings;
  const auto points =
      starscat::find_resonances(profile, bounds[0], bounds[1], args.step, &warnings);
  if (!global.quiet)
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

  std::vector<std::string> columns;
  if (args.coupling_only)
    columns = {"alpha", "theta1", "theta2", "theta3"};
  else
    columns = {"alpha", "multiplicity", "theta1", "theta2", "theta3", "h1_residual"};

  std::string body;
  if (global.format == "json") {
    json rows = json::array();
    for (const auto& p : points) {
      json row = json::array();
      row.push_back(p.alpha);
      if (!args.coupling_only) row.push_back(p.multiplicity);
      for (int i = 0; i < 3; ++i) row.push_back(p.theta.theta(i));
      if (!args.coupling_only) row.push_back(p.h1_residual);
      rows.push_back(row);
    }
    body = json_table(manifest, columns, rows);
  } else {
    std::string header;
    for (std::size_t i = 0; i < columns.size(); ++i)
      header += (i ? "," : "") + columns[i];
    std::vector<std::string> rows;
    for (const auto& p : points) {
      std::string row = fmt15(p.alpha);
      if (!args.coupling_only) row += "," + std::to_string(p.multiplicity);
      for (int i = 0; i < 3; ++i) row += "," + fmt15(p.theta.theta(i));
      if (!args.coupling_only) row += "," + fmt15(p.h1_residual);
      rows.push_back(row);
    }
    body = csv_table(manifest, header, rows);
  }
  write_output(global, manifest, body);
  return 0;
}

struct SmatrixArgs {
  double alpha = 0.0;
  bool limit = false;
  std::optional<double> kappa;
};

int run_smatrix(const GlobalOptions& global, const SmatrixArgs& args,
                RunManifest& manifest) {
  if (args.limit == args.kappa.has_value())
    throw ArgumentError("smatrix needs exactly one of --limit or --kappa");
  if (args.kappa && !(*args.kappa > 0.0)) throw ArgumentError("--kappa must be positive");

  const auto profile = load_profile(global.profile_arg);
  Eigen::Matrix3cd entries;
  double alpha_used = args.alpha;

  if (args.limit) {
    auto refined = starscat::refine_nearest_resonance(profile, args.alpha, 0.5);
    constexpr double kAcceptWindow = 0.05;
    if (!refined || std::abs(refined->alpha - args.alpha) > kAcceptWindow) {
      // widen the search so the error can name the nearest resonance
      for (const double halfwidth : {5.0, 25.0}) {
        if (refined) break;
        refined = starscat::refine_nearest_resonance(profile, args.alpha, halfwidth);
      }
      std::ostringstream os;
      os << "--limit requires a resonant intensity; alpha = " << args.alpha
         << " is not within " << kAcceptWindow << " of a root";
      if (refined) os << " (nearest resonance: " << fmt15(refined->alpha) << ")";
      throw starscat::NonResonantIntensity(os.str());
    }
    alpha_used = refined->alpha;
    entries = starscat::limit_smatrix(refined->theta, refined->multiplicity).entries;
    if (!global.quiet)
      std::cerr << "refined alpha " << fmt15(args.alpha) << " -> " << fmt15(alpha_used)
                << " (multiplicity " << refined->multiplicity << ")\n";
    manifest.parameters = {{"alpha", fmt15(args.alpha)},
                           {"alpha_refined", fmt15(alpha_used)},
                           {"mode", "limit"}};
  } else {
    entries = starscat::eps_smatrix(profile, args.alpha, *args.kappa).entries;
    manifest.parameters = {{"alpha", fmt15(args.alpha)},
                           {"kappa", fmt15(*args.kappa)},
                           {"mode", "epsilon"}};
  }

  std::string body;
  if (global.format == "json") {
    json rows = json::array();
    for (int n = 0; n < 3; ++n) {
      for (int m = 0; m < 3; ++m) {
        json row = json::array({n + 1, m + 1, entries(n, m).real()});
        if (!args.limit) row.push_back(entries(n, m).imag());
        rows.push_back(row);
      }
    }
    const std::vector<std::string> columns =
        args.limit ? std::vector<std::string>{"n", "m", "re"}
                   : std::vector<std::string>{"n", "m", "re", "im"};
    body = json_table(manifest, columns, rows,
                      json{{"alpha_used", alpha_used}});
  } else {
    const std::string header = args.limit ? "n,m,re" : "n,m,re,im";
    std::vector<std::string> rows;
    for (int n = 0; n < 3; ++n) {
      for (int m = 0; m < 3; ++m) {
        std::string row = std::to_string(n + 1) + "," + std::to_string(m + 1) + "," +
                          fmt15(entries(n, m).real());
        if (!args.limit) row += "," + fmt15(entries(n, m).imag());
        rows.push_back(row);
      }
    }
    body = csv_table(manifest, header, rows);
  }
  write_output(global, manifest, body);
  return 0;
}

struct SweepArgs {
  std::string alphas;
  double kappa = 1e-4;
  std::string pair = "3:1";
};

int run_sweep(const GlobalOptions& global, const SweepArgs& args, RunManifest& manifest) {
  const auto spec = parse_colon_tuple(args.alphas, 3, "--alphas");
  const double lo = spec[0], hi = spec[1], step = spec[2];
  if (!(step > 0.0)) throw ArgumentError("--alphas: step must be positive");
  if (hi < lo) throw ArgumentError("--alphas: upper bound below lower bound");
  if (!(args.kappa > 0.0)) throw ArgumentError("--kappa must be positive");
  const auto pair = parse_colon_tuple(args.pair, 2, "--pair");
  const int from = static_cast<int>(pair[0]), to = static_cast<int>(pair[1]);
  if (from < 1 || from > 3 || to < 1 || to > 3)
    throw ArgumentError("--pair: edges must be in 1..3");

  manifest.parameters = {{"alphas", args.alphas},
                         {"kappa", fmt15(args.kappa)},
                         {"pair", args.pair},
                         {"threads", std::to_string(global.threads)}};

  const auto profile = load_profile(global.profile_arg);
  std::vector<double> grid;
  for (double a = lo; a < hi; a += step) grid.push_back(a);
  if (hi > lo) grid.push_back(hi);

  const auto rows = starscat::transmission_sweep(profile, grid, args.kappa, from, to,
                                                 global.threads);

  const std::vector<std::string> columns = {"alpha", "T2", "log10T2", "argT", "status"};
  std::string body;
  if (global.format == "json") {
    json jrows = json::array();
    for (const auto& r : rows) {
      if (r.ok) {
        jrows.push_back(json::array({r.alpha, r.probability,
                                     std::log10(std::max(r.probability, 1e-300)), r.phase,
                                     "ok"}));
      } else {
        jrows.push_back(json::array({r.alpha, nullptr, nullptr, nullptr, "singular"}));
      }
    }
    body = json_table(manifest, columns, jrows);
  } else {
    std::vector<std::string> lines;
    for (const auto& r : rows) {
      if (r.ok) {
        lines.push_back(fmt15(r.alpha) + "," + fmt15(r.probability) + "," +
                        fmt15(std::log10(std::max(r.probability, 1e-300))) + "," +
                        fmt15(r.phase) + ",ok");
      } else {
        lines.push_back(fmt15(r.alpha) + ",nan,nan,nan,singular");
      }
    }
    body = csv_table(manifest, "alpha,T2,log10T2,argT,status", lines);
  }
  write_output(global, manifest, body);
  return 0;
}

struct ConvergeArgs {
  double alpha = 0.0;
  double k = 1.0;
  std::string eps_list;
};

int run_converge(const GlobalOptions& global, const ConvergeArgs& args,
                 RunManifest& manifest) {
  const auto epsilons = parse_number_list(args.eps_list, "--eps-list");
  for (const double e : epsilons)
    if (!(e > 0.0)) throw ArgumentError("--eps-list: epsilon values must be positive");
  if (!(args.k > 0.0)) throw ArgumentError("--k must be positive");

  const auto profile = load_profile(global.profile_arg);

  // users type table values; snap to the nearest root when one is close
  double alpha_used = args.alpha;
  const auto refined = starscat::refine_nearest_resonance(profile, args.alpha, 0.5);
  if (refined && std::abs(refined->alpha - args.alpha) <= 0.05)
    alpha_used = refined->alpha;

  manifest.parameters = {{"alpha", fmt15(args.alpha)},
                         {"alpha_used", fmt15(alpha_used)},
                         {"k", fmt15(args.k)},
                         {"eps_list", args.eps_list}};

  const auto table = starscat::convergence_table(profile, alpha_used, args.k, epsilons);
  if (!global.quiet && alpha_used != args.alpha)
    std::cerr << "refined alpha " << fmt15(args.alpha) << " -> " << fmt15(alpha_used)
              << "\n";

  std::string body;
  if (global.format == "json") {
    json rows = json::array();
    for (const auto& r : table.rows) rows.push_back(json::array({r.epsilon, r.deviation}));
    body = json_table(manifest, {"epsilon", "deviation"}, rows,
                      json{{"resonant", table.resonant}, {"slope", table.slope}});
  } else {
    std::vector<std::string> rows;
    for (const auto& r : table.rows)
      rows.push_back(fmt15(r.epsilon) + "," + fmt15(r.deviation));
    const std::vector<std::string> footers = {
        std::string("# mode: ") + (table.resonant ? "resonant" : "non-resonant"),
        "# slope: " + fmt15(table.slope)};
    body = csv_table(manifest, "epsilon,deviation", rows, footers);
  }
  write_output(global, manifest, body);
  return 0;
}

struct VerifyArgs {
  std::uint64_t seed = 0;
};

int run_verify(const GlobalOptions& global, const VerifyArgs& args, RunManifest& manifest) {
  manifest.parameters = {{"seed", std::to_string(args.seed)}};
  const auto profile = load_profile(global.profile_arg);
  const auto report = starscat::run_verification(profile, args.seed);

  std::string body;
  if (global.format == "json") {
    json rows = json::array();
    for (const auto& c : report.checks) {
      rows.push_back(json::array({c.name, c.pass ? "PASS" : "FAIL", c.measured,
                                  c.measured_must_exceed ? ">=" : "<=", c.bound, c.note}));
    }
    body = json_table(manifest, {"check", "status", "measured", "direction", "bound", "note"},
                      rows, json{{"all_pass", report.all_pass()}});
  } else {
    std::vector<std::string> rows;
    for (const auto& c : report.checks) {
      std::string row = c.name;
      row += std::string(",") + (c.pass ? "PASS" : "FAIL");
      row += "," + fmt15(c.measured);
      row += std::string(",") + (c.measured_must_exceed ? ">=" : "<=");
      row += "," + fmt15(c.bound);
      row += "," + (c.note.empty() ? std::string("-") : c.note);
      rows.push_back(row);
    }
    body = csv_table(manifest, "check,status,measured,direction,bound,note", rows);
  }
  write_output(global, manifest, body);
  return report.all_pass() ? 0 : kExitVerifyFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonances, coupling directions and scattering matrices for a "
               "shrinking vertex potential on a three-edge star graph"};
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--profile", global.profile_arg,
                 "profile JSON file or builtin name (paper-rect, symmetric-rect)");
  app.add_option("--format", global.format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", global.out_path, "write output to this file (plus manifest)");
  app.add_option("--threads", global.threads, "worker threads for sweeps")
      ->check(CLI::Range(1, 64));
  app.add_flag("--quiet", global.quiet, "suppress notes on standard error");

  ResonanceArgs res_args;
  auto* cmd_res = app.add_subcommand("resonances", "locate resonant intensities");
  cmd_res->add_option("--range", res_args.range, "scan range lo:hi")->required();
  cmd_res->add_option("--step", res_args.step, "scan grid step");

  ResonanceArgs coup_args;
  coup_args.coupling_only = true;
  auto* cmd_coup = app.add_subcommand("coupling", "coupling directions only");
  cmd_coup->add_option("--range", coup_args.range, "scan range lo:hi")->required();
  cmd_coup->add_option("--step", coup_args.step, "scan grid step");

  SmatrixArgs sm_args;
  auto* cmd_sm = app.add_subcommand("smatrix", "scattering matrix at one intensity");
  cmd_sm->add_option("--alpha", sm_args.alpha, "intensity")->required();
  cmd_sm->add_flag("--limit", sm_args.limit, "zero-range limit matrix (resonant alpha)");
  double kappa_opt = 0.0;
  auto* kopt = cmd_sm->add_option("--kappa", kappa_opt, "dimensionless wavenumber eps*k");

  SweepArgs sweep_args;
  auto* cmd_sweep = app.add_subcommand("sweep", "transmission probability over a grid");
  cmd_sweep->add_option("--alphas", sweep_args.alphas, "grid lo:hi:step")->required();
  cmd_sweep->add_option("--kappa", sweep_args.kappa, "dimensionless wavenumber")->required();
  cmd_sweep->add_option("--pair", sweep_args.pair, "incoming:observed edges (default 3:1)");

  ConvergeArgs conv_args;
  auto* cmd_conv = app.add_subcommand("converge", "deviation from the limit matrix");
  cmd_conv->add_option("--alpha", conv_args.alpha, "intensity")->required();
  cmd_conv->add_option("--k", conv_args.k, "wavenumber (kappa = eps*k)");
  cmd_conv->add_option("--eps-list", conv_args.eps_list, "comma-separated epsilons")
      ->required();

  VerifyArgs verify_args;
  auto* cmd_verify = app.add_subcommand("verify", "run the invariant suite");
  cmd_verify->add_option("--seed", verify_args.seed, "random seed");

  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgumentError;
  }

  RunManifest manifest;
  manifest.profile_source = global.profile_arg;

  const auto started = std::chrono::steady_clock::now();
  try {
    int rc = 0;
    if (cmd_res->parsed()) {
      manifest.command = "resonances";
      rc = run_resonances(global, res_args, manifest);
    } else if (cmd_coup->parsed()) {
      manifest.command = "coupling";
      rc = run_resonances(global, coup_args, manifest);
    } else if (cmd_sm->parsed()) {
      manifest.command = "smatrix";
      if (kopt->count() > 0) sm_args.kappa = kappa_opt;
      rc = run_smatrix(global, sm_args, manifest);
    } else if (cmd_sweep->parsed()) {
      manifest.command = "sweep";
      rc = run_sweep(global, sweep_args, manifest);
    } else if (cmd_conv->parsed()) {
      manifest.command = "converge";
      rc = run_converge(global, conv_args, manifest);
    } else if (cmd_verify->parsed()) {
      manifest.command = "verify";
      rc = run_verify(global, verify_args, manifest);
    }
    manifest.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
            .count();
    return rc;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgumentError;
  } catch (const starscat::MalformedConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const starscat::InvalidProfile& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const starscat::UnknownProfile& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const starscat::InvalidRange& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgumentError;
  } catch (const starscat::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
}
