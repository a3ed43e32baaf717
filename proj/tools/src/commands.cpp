#include <cmath>
#include <sstream>

#include "hkd/cli.hpp"
#include "hkd/errors.hpp"

namespace hkd::cli {

namespace {

Json meta_json(std::string_view command) {
  return Json{{"schema_version", kSchemaVersion}, {"tool", "hkdlab"}, {"version", "0.1.0"},
              {"command", std::string(command)}};
}

Json location(const TimeGrid& grid, const PairProbe& at) {
  return Json{{"t", grid[at.t]}, {"s", grid[at.s]}, {"probe", at.probe}};
}

Json identity_json(const IdentityResult& r) {
  return Json{{"pass", r.pass}, {"worst_relative", number_or_null(r.worst_relative)}};
}

Json rate_json(const GrowthRate& rate, const TimeGrid& grid) {
  const auto c = check_growth_rate(rate, grid.points());
  Json j{{"spec", rate.spec()}, {"pass", c.pass}, {"divergence_plausible", c.divergence_plausible}};
  if (c.first_violation)
    j["first_violation"] = Json{{"t", c.first_violation->t}, {"reason", c.first_violation->reason}};
  return j;
}

struct Structural {
  Json json;
  bool pass = true;
  bool invariant = false;
};

Structural structural_checks(const RunConfig& config, const SystemPtr& system, const SampledSystem& sampled,
                             std::span<const Vector> probes, Report& report) {
  Structural out;
  const double tol = config.structural_tol;
  const TimeGrid& grid = sampled.grid();
  Json& j = out.json;

  j["rates"] = Json{{"h", rate_json(config.h(), grid)}, {"k", rate_json(config.k(), grid)}};
  const bool rates_ok = j["rates"]["h"]["pass"].get<bool>() && j["rates"]["k"]["pass"].get<bool>();
  if (!rates_ok) report.add_violation("rate", "a growth rate fails the codomain or monotonicity check");

  const auto evo = check_evolution_property(sampled, tol);
  j["e1"] = Json{{"pass", evo.identity_defect <= tol}, {"identity_defect", number_or_null(evo.identity_defect)}};
  j["e2"] = Json{{"pass", evo.pass},
                 {"worst_defect", number_or_null(evo.worst_defect)},
                 {"at", {{"t", grid[evo.worst.t]}, {"s", grid[evo.worst.s]}, {"t0", grid[evo.worst.t0]}}}};
  if (!evo.pass) {
    std::ostringstream os;
    os << "evolution property defect " << format_number(evo.worst_defect) << " at (t, s, t0) = ("
       << grid[evo.worst.t] << ", " << grid[evo.worst.s] << ", " << grid[evo.worst.t0] << ")";
    report.add_violation("evolution", os.str());
  }

  const auto proj = check_projector_family(sampled);
  j["projectors"] = Json{{"pass", proj.pass},
                         {"worst_defect", number_or_null(proj.worst_defect)},
                         {"at", grid[proj.worst_index]},
                         {"max_entry", number_or_null(proj.max_projector_entry)}};
  if (!proj.pass) report.add_violation("projector", "P(t) is not idempotent at t = " + format_number(grid[proj.worst_index]));

  const auto inv = check_invariance(sampled, probes, tol);
  out.invariant = inv.pass;
  Json from_origin = Json::array();
  const auto dim = static_cast<Eigen::Index>(sampled.space().dimension());
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (Eigen::Index c = 0; c < dim; ++c)
      from_origin.push_back({{"t", grid[i]},
                             {"s", grid[0]},
                             {"probe", c},
                             {"defect", number_or_null(invariance_defect(*system, grid[i], grid[0],
                                                                         Vector::Unit(dim, c)))}});
  j["invariance"] = Json{{"pass", inv.pass},
                         {"worst_relative", number_or_null(inv.worst_relative)},
                         {"worst_defect", number_or_null(inv.worst_defect)},
                         {"at", location(grid, inv.worst)},
                         {"q_worst_relative", number_or_null(inv.q_worst_relative)},
                         {"from_origin", std::move(from_origin)}};
  if (!inv.pass) {
    std::ostringstream os;
    os << "invariance defect " << format_number(inv.worst_defect) << " at (t, s) = (" << grid[inv.worst.t]
       << ", " << grid[inv.worst.s] << "), probe " << inv.worst.probe;
    report.add_violation("invariance", os.str());
  }

  Json v = Json{{"compatible", false}};
  bool v_ok = false;
  if (inv.pass) {
    try {
      KernelInverse kernel(std::make_shared<const SampledSystem>(sampled));
      kernel.build_all();
      const auto ids = check_v_identities(kernel, probes, tol);
      v = Json{{"compatible", true},
               {"v1", identity_json(ids.v1)},
               {"v2", identity_json(ids.v2)},
               {"v3", identity_json(ids.v3)},
               {"v4", identity_json(ids.v4)}};
      v_ok = ids.pass();
      if (!v_ok) report.add_violation("kernel-inverse", "an identity v1-v4 fails");
    } catch (const NotCompatibleError& e) {
      v["detail"] = e.what();
      report.add_violation("compatibility", e.what());
    }
  } else {
    v["detail"] = "skipped: projector family is not invariant";
  }
  j["kernel_inverse"] = std::move(v);

  out.pass = rates_ok && evo.identity_defect <= tol && evo.pass && proj.pass && inv.pass && v_ok;
  j["pass"] = out.pass;
  return out;
}

void add_envelope_violations(const EnvelopeReport& env, Report& report) {
  for (const auto& v : env.violations)
    report.add_violation(std::string(to_string(env.kind)) + "-envelope-" + v.kind,
                         v.which + " requirement at t = " + format_number(env.times[v.index]) + ": " +
                             format_number(v.value));
}

}  // namespace

CommandResult cmd_check(const RunConfig& config) {
  config.validate();
  const SystemPtr system = config.system();
  const GrowthRate h = config.h(), k = config.k();
  const TimeGrid grid = config.grid();

  CommandResult result;
  Report& report = result.report;
  report.config = config_json(config);
  report.meta = meta_json("check");

  const auto probes = standard_probes(system->space(), config.seed);
  const SampledSystem sampled(system, grid);
  const Structural structural = structural_checks(config, system, sampled, probes, report);
  report.structural = structural.json;

  report.csv_header = {"t", "N1_req", "N2_req", "hull", "M1_req", "M2_req", "growth_hull"};
  if (structural.invariant) {
    const SampledSystem wide(system, grid.doubled());
    const auto d1 = dichotomy_envelope(sampled, h, k, probes, config.structural_tol);
    const auto d2 = dichotomy_envelope(wide, h, k, probes, config.structural_tol);
    const auto g1 = growth_envelope(sampled, h, k, probes, config.structural_tol);
    const auto g2 = growth_envelope(wide, h, k, probes, config.structural_tol);
    add_envelope_violations(d1, report);
    add_envelope_violations(g1, report);
    const auto ud = classify_uniformity(d1, d2);
    const auto ug = classify_uniformity(g1, g2);
    const auto hz = classify_horizon_growth(d1.first_req, d2.first_req);
    const auto verdict_json = [](const UniformityVerdict& u) {
      return Json{{"verdict", std::string(to_string(u.verdict))},
                  {"max_T", number_or_null(u.max_small)},
                  {"max_2T", number_or_null(u.max_large)},
                  {"ratio", number_or_null(u.ratio)},
                  {"delta", kUniformityDelta}};
    };
    report.envelopes = Json{{"dichotomy", envelope_json(d1)},
                            {"growth", envelope_json(g1)},
                            {"uniformity",
                             {{"dichotomy", verdict_json(ud)},
                              {"growth", verdict_json(ug)},
                              {"first_requirement_horizon",
                               {{"verdict", std::string(to_string(hz.verdict))},
                                {"worst_ratio", number_or_null(hz.worst_ratio)},
                                {"at", grid[hz.worst_index]}}}}}};
    for (std::size_t i = 0; i < grid.size(); ++i)
      report.csv_rows.push_back({format_number(grid[i]), format_number(d1.first_req[i]),
                                 format_number(d1.second_req[i]), format_number(d1.hull[i]),
                                 format_number(g1.first_req[i]), format_number(g1.second_req[i]),
                                 format_number(g1.hull[i])});
  } else {
    report.envelopes = Json{{"skipped", "projector family is not invariant"}};
  }

  result.exit_code = structural.pass ? kExitPass : kExitFail;
  if (!structural.pass) result.messages.push_back("structural checks failed for " + system->label());
  return result;
}

CommandResult cmd_norms(const RunConfig& config, NormFamilyKind kind, std::vector<Vector> probes) {
  config.validate();
  const SystemPtr system = config.system();
  const GrowthRate h = config.h(), k = config.k();
  const TimeGrid grid = config.grid();
  const auto& space = system->space();

  if (probes.empty())
    for (std::size_t c = 0; c < space.dimension(); ++c)
      probes.push_back(Vector::Unit(static_cast<Eigen::Index>(space.dimension()), static_cast<Eigen::Index>(c)));
  for (const auto& x : probes)
    if (static_cast<std::size_t>(x.size()) != space.dimension()) throw UsageError("--probe has the wrong dimension");

  CommandResult result;
  Report& report = result.report;
  report.config = config_json(config);
  report.config["kind"] = std::string(to_string(kind));
  report.meta = meta_json("norms");
  report.csv_header = {"t", "probe", "value", "lower_bound", "upper_bound"};

  // The bound is certified on the grid for every probe in the scan set.
  auto scan = standard_probes(space, config.seed);
  for (const auto& x : probes)
    if (space.norm(x) >= kSkipNorm) scan.push_back(x);

  CheckOptions opts;
  opts.structural_tol = config.structural_tol;
  std::string failure;
  auto sampled = std::make_shared<const SampledSystem>(system, grid);
  if (kind == NormFamilyKind::dichotomy) {
    const auto pre = check_dichotomy_precondition(system, h, k, grid, scan, opts);
    report.structural = Json{{"invariant", pre.invariant}, {"compatible", pre.compatible}, {"finite", pre.finite},
                             {"first_requirement_horizon", std::string(to_string(pre.p_part.verdict))}};
    if (!pre.ok()) failure = pre.detail.empty() ? "dichotomy precondition fails" : pre.detail;
  } else {
    const auto pre = check_growth_precondition(*sampled, h, k, scan, opts);
    report.structural = Json{{"invariant", pre.invariant}, {"compatible", pre.compatible}, {"finite", pre.finite}};
    if (!pre.ok()) failure = pre.detail.empty() ? "growth precondition fails" : pre.detail;
  }
  if (!failure.empty()) {
    report.norms = Json{{"kind", std::string(to_string(kind))}, {"verdict", std::string(to_string(Verdict::precondition_failed))}};
    report.add_violation("precondition", failure);
    result.messages.push_back("precondition failed: " + failure);
    result.exit_code = kExitFail;
    return result;
  }

  auto kernel = std::make_shared<const KernelInverse>(sampled);
  const NormFamily family(kind, kernel, h, k);
  const EnvelopeKind env_kind = kind == NormFamilyKind::dichotomy ? EnvelopeKind::dichotomy : EnvelopeKind::growth;
  const auto env = env_kind == EnvelopeKind::dichotomy ? dichotomy_envelope(*sampled, h, k, scan, opts.structural_tol)
                                                       : growth_envelope(*sampled, h, k, scan, opts.structural_tol);
  const auto primed = primed_second_requirement(*kernel, env_kind, k, scan);
  std::vector<double> gain(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gain[i] = std::max(env.first_req[i], primed[i]);
  gain = monotone_hull(gain);

  Json rows = Json::array();
  Json probe_list = Json::array();
  for (const auto& x : probes) probe_list.push_back(to_json(std::span<const double>(x.data(), static_cast<std::size_t>(x.size()))));
  bool bounds_hold = true;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const Vector& x = probes[p];
      const double value = family.value(i, x);
      const double lower = space.norm(x);
      const double upper = gain[i] * (space.norm(sampled->p(i) * x) + space.norm(sampled->q(i) * x));
      const double slack = 1e-12 * std::max(1.0, upper);
      if (value < lower - slack || value > upper + slack) bounds_hold = false;
      rows.push_back({{"t", grid[i]}, {"probe", p}, {"value", number_or_null(value)},
                      {"lower_bound", number_or_null(lower)}, {"upper_bound", number_or_null(upper)}});
      report.csv_rows.push_back({format_number(grid[i]), std::to_string(p), format_number(value),
                                 format_number(lower), format_number(upper)});
    }
  }
  report.norms = Json{{"kind", std::string(to_string(kind))},
                      {"verdict", std::string(to_string(bounds_hold ? Verdict::pass : Verdict::fail))},
                      {"probes", std::move(probe_list)},
                      {"gain", to_json(gain)},
                      {"rows", std::move(rows)}};
  if (!bounds_hold) {
    report.add_violation("norm-bounds", "a norm value lies outside its certified bounds");
    result.exit_code = kExitFail;
  }
  return result;
}

}  // namespace hkd::cli
