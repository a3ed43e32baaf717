#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "hkd/cli.hpp"
#include "hkd/errors.hpp"

namespace hkd::cli {

namespace {

void add_common(CLI::App& cmd, RunConfig& c, std::string& format) {
  cmd.add_option("--example", c.example, "Gallery system");
  cmd.add_option("--h", c.h_spec, "First growth rate (exp:a, poly:a, logpoly, table:path)")->capture_default_str();
  cmd.add_option("--k", c.k_spec, "Second growth rate")->capture_default_str();
  cmd.add_option("--u", c.u_spec, "Scalar profile for scalar-ulnu (exp-shift:c, linear:a:b)");
  cmd.add_option("--tmax", c.tmax, "Grid horizon")->capture_default_str();
  cmd.add_option("--grid-points", c.grid_points, "Number of grid points")->capture_default_str();
  cmd.add_option_function<double>("--tol", [&c](double t) { c.structural_tol = c.envelope_tol = t; },
                                  "Tolerance for every check (default 1e-9 structural, 1e-6 envelopes)");
  cmd.add_option("--seed", c.seed, "Probe seed")->capture_default_str();
  cmd.add_option("--out", c.out, "Write the report here instead of stdout");
  cmd.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  cmd.add_flag("--timing", c.timing, "Record wall time in the report (breaks byte-identity)");
}

int emit(const CommandResult& result, const RunConfig& config, double seconds, std::ostream& out,
         std::ostream& err) {
  Report report = result.report;
  if (config.timing) report.meta["wall_time_s"] = seconds;
  const std::string text = report.render(config.format);
  if (config.out) {
    std::ofstream file(*config.out, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << *config.out << "\n";
      return kExitUsage;
    }
    file << text;
  } else {
    out << text;
  }
  for (const auto& m : result.messages) err << m << "\n";
  return result.exit_code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"hkdlab: numerical checks for (h,k)-dichotomies of evolution operators"};
  // -h would collide with --h.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  RunConfig config;
  std::string format = "json";

  auto* check = app.add_subcommand("check", "Structural checks, envelopes and the uniformity verdict");
  add_common(*check, config, format);

  auto* norms = app.add_subcommand("norms", "Lyapunov norm tables");
  add_common(*norms, config, format);
  std::string kind_text;
  std::vector<std::string> probe_texts;
  norms->add_option("--kind", kind_text, "growth or dichotomy")->required()->check(CLI::IsMember({"growth", "dichotomy"}));
  norms->add_option("--probe", probe_texts, "Probe vector as comma-separated components (repeatable)");

  auto* reproduce = app.add_subcommand("reproduce", "Pinned configurations with golden comparisons");
  add_common(*reproduce, config, format);
  std::string target;
  reproduce->add_option("target", target, "nonuniform-example, growth-not-dicho, theorem1 or theorem2")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }
  config.format = format == "csv" ? Format::csv : Format::json;

  const auto start = std::chrono::steady_clock::now();
  try {
    CommandResult result;
    if (check->parsed()) {
      result = cmd_check(config);
    } else if (norms->parsed()) {
      config.validate();
      const auto dim = config.system()->space().dimension();
      std::vector<Vector> probes;
      for (const auto& p : probe_texts) probes.push_back(parse_probe(p, dim));
      result = cmd_norms(config, kind_text == "growth" ? NormFamilyKind::growth : NormFamilyKind::dichotomy,
                         std::move(probes));
    } else {
      result = cmd_reproduce(target, config);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return emit(result, config, seconds, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFail;
  }
}

}  // namespace hkd::cli
