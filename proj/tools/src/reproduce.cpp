#include <cmath>
#include <sstream>

#include "hkd/cli.hpp"
#include "hkd/errors.hpp"

namespace hkd::cli {

namespace {

// Closed-form reference values.
constexpr double kLogpolyAt10 = 27.9734451965026797676585935491;
constexpr double kLogpolyAt20 = 65.5865693121645229827082077087;

class Goldens {
 public:
  explicit Goldens(std::vector<GoldenCheck>& out) : out_(out) {}

  void at_most(std::string name, double actual, double bound) {
    push({std::move(name), "<=", bound, number_or_null(actual), 0.0, actual <= bound});
  }
  void at_least(std::string name, double actual, double bound) {
    push({std::move(name), ">=", bound, number_or_null(actual), 0.0, actual >= bound});
  }
  void near(std::string name, double actual, double expected, double rel) {
    const bool ok = std::abs(actual - expected) <= rel * std::abs(expected);
    push({std::move(name), "~rel", expected, number_or_null(actual), rel, ok});
  }
  void equal(std::string name, const std::string& actual, const std::string& expected) {
    push({std::move(name), "==", expected, actual, 0.0, actual == expected});
  }

 private:
  void push(GoldenCheck c) { out_.push_back(std::move(c)); }
  std::vector<GoldenCheck>& out_;
};

double r(double t) { return logpoly(t); }

double max_ratio_to_logpoly(const EnvelopeReport& env, bool both) {
  double worst = 0.0;
  for (std::size_t i = 0; i < env.times.size(); ++i) {
    const double v = both ? std::max(env.first_req[i], env.second_req[i]) : env.first_req[i];
    worst = std::max(worst, v / r(env.times[i]));
  }
  return worst;
}

Json inequality_json(const InequalityResult& r, const TimeGrid& grid) {
  return Json{{"verdict", std::string(to_string(r.verdict))},
              {"worst_slack", number_or_null(r.worst_slack)},
              {"at", {{"t", grid[r.worst.t]}, {"s", grid[r.worst.s]}, {"probe", r.worst.probe}}}};
}

void reproduce_nonuniform(const RunConfig& config, Report& report, Goldens& g) {
  const GrowthRate e = GrowthRate::exponential(1.0);
  const auto system = example_gallery("dicho-2d-constantP");
  const TimeGrid grid = TimeGrid::uniform(10.0, 101);
  const auto probes = standard_probes(system->space(), config.seed);
  const auto small = dichotomy_envelope(SampledSystem(system, grid), e, e, probes);
  const auto large = dichotomy_envelope(SampledSystem(system, grid.doubled()), e, e, probes);
  const auto u = classify_uniformity(small, large);

  report.envelopes = Json{{"T", envelope_json(small)}, {"2T", envelope_json(large)},
                          {"uniformity", {{"verdict", std::string(to_string(u.verdict))},
                                          {"max_T", u.max_small}, {"max_2T", u.max_large}, {"ratio", u.ratio}}}};
  for (std::size_t i = 0; i < grid.size(); ++i)
    report.csv_rows.push_back({format_number(grid[i]), format_number(small.first_req[i]),
                               format_number(small.second_req[i]), format_number(small.hull[i])});

  g.at_most("N1_req(s) / r(s)", max_ratio_to_logpoly(small, false), 1.0 + 1e-9);
  g.near("N2_req(10)", small.second_req.back(), kLogpolyAt10, 0.01);
  g.equal("N2_req(10) attained at s", format_number(grid[small.second_argmax.back()]), "0");
  g.near("envelope max at T=10", u.max_small, kLogpolyAt10, 0.01);
  g.near("envelope max at T=20", u.max_large, kLogpolyAt20, 0.01);
  g.equal("uniformity", std::string(to_string(u.verdict)), "nonuniform");
}

void reproduce_growth_not_dicho(const RunConfig& config, Report& report, Goldens& g) {
  const GrowthRate r_rate = GrowthRate::log_polynomial();
  GalleryOptions opts;
  opts.h = opts.k = r_rate;
  const auto system = example_gallery("growth-not-dicho", opts);
  const TimeGrid grid = TimeGrid::uniform(10.0, 101);
  const TimeGrid wide = grid.doubled();
  const auto probes = standard_probes(system->space(), config.seed);
  const SampledSystem sampled(system, grid), sampled_wide(system, wide);

  const auto witness = class_g_witness(r_rate, r_rate, wide.points());
  const auto growth = growth_envelope(sampled_wide, r_rate, r_rate, probes);
  const auto d_small = dichotomy_envelope(sampled, r_rate, r_rate, probes);
  const auto d_large = dichotomy_envelope(sampled_wide, r_rate, r_rate, probes);
  const auto horizon = classify_horizon_growth(d_small.first_req, d_large.first_req);

  report.structural = Json{{"class_g", {{"pass", witness.pass}, {"worst_margin", witness.worst_margin},
                                        {"at", witness.worst_t}}}};
  report.envelopes = Json{{"growth_2T", envelope_json(growth)},
                          {"dichotomy_T", envelope_json(d_small)},
                          {"dichotomy_2T", envelope_json(d_large)},
                          {"first_requirement_horizon",
                           {{"verdict", std::string(to_string(horizon.verdict))},
                            {"worst_ratio", number_or_null(horizon.worst_ratio)},
                            {"at", grid[horizon.worst_index]}}}};
  report.csv_header = {"t", "M1_req", "M2_req", "N1_req"};
  for (std::size_t i = 0; i < wide.size(); ++i)
    report.csv_rows.push_back({format_number(wide[i]), format_number(growth.first_req[i]),
                               format_number(growth.second_req[i]), format_number(d_large.first_req[i])});

  g.near("class-G margin (logpoly witnessed by logpoly)", witness.worst_margin, 1.0, 1e-12);
  g.at_most("M_req(t) / r(t)", max_ratio_to_logpoly(growth, true), 1.0 + 1e-6);
  g.at_least("N1_req(0) over [0,20]", d_large.first_req.front(), 65.0);
  g.equal("N1_req horizon growth", std::string(to_string(horizon.verdict)), "growing");
}

struct GalleryCase {
  std::string_view name;
  std::string_view theorem1;  // expected verdict
  std::string_view theorem2;
};

constexpr GalleryCase kGalleryCases[] = {
    {"scalar-ulnu", "pass", "pass"},
    {"dicho-2d-literal", "precondition-failed", "precondition-failed"},
    {"dicho-2d-repaired", "pass", "pass"},
    {"dicho-2d-constantP", "pass", "pass"},
    {"growth-not-dicho", "precondition-failed", "fail"},
    {"split-exp", "pass", "pass"},
    {"identity-2d", "precondition-failed", "fail"},
};

void reproduce_theorem1(const RunConfig& config, Report& report, Goldens& g) {
  const GrowthRate e = GrowthRate::exponential(1.0);
  const TimeGrid grid = TimeGrid::default_grid();
  report.csv_header = {"system", "verdict", "hd1_slack", "kd2_slack", "sufficiency_deviation", "sufficiency_slack"};
  Json systems = Json::object();
  for (const auto& c : kGalleryCases) {
    const auto system = example_gallery(c.name);
    const auto probes = standard_probes(system->space(), config.seed);
    const auto t1 = check_theorem1(system, e, e, grid, probes);
    const std::string name(c.name);
    systems[name] = Json{{"verdict", std::string(to_string(t1.verdict))},
                         {"precondition",
                          {{"invariant", t1.precondition.invariant},
                           {"compatible", t1.precondition.compatible},
                           {"finite", t1.precondition.finite},
                           {"first_requirement_horizon", std::string(to_string(t1.precondition.p_part.verdict))},
                           {"detail", t1.precondition.detail}}},
                         {"hd1", inequality_json(t1.hd1, grid)},
                         {"kd2", inequality_json(t1.kd2, grid)},
                         {"sufficiency_deviation", number_or_null(t1.sufficiency_deviation)},
                         {"sufficiency_slack", number_or_null(t1.sufficiency_slack)},
                         {"derived_gain", to_json(t1.derived_hull)}};
    report.csv_rows.push_back({name, std::string(to_string(t1.verdict)), format_number(t1.hd1.worst_slack),
                               format_number(t1.kd2.worst_slack), format_number(t1.sufficiency_deviation),
                               format_number(t1.sufficiency_slack)});
    g.equal(name + " verdict", std::string(to_string(t1.verdict)), std::string(c.theorem1));
    if (t1.precondition.ok()) {
      g.at_most(name + " hd1 slack", t1.hd1.worst_slack, 1e-9);
      g.at_most(name + " kd2 slack", t1.kd2.worst_slack, 1e-9);
      g.at_most(name + " sufficiency deviation", t1.sufficiency_deviation, 1e-6);
    }
  }
  report.theorems["theorem1"] = std::move(systems);
}

void reproduce_theorem2(const RunConfig& config, Report& report, Goldens& g) {
  const GrowthRate e = GrowthRate::exponential(1.0);
  const TimeGrid grid = TimeGrid::default_grid();
  report.csv_header = {"system", "verdict", "horizon", "sufficiency_slack", "necessity_slack"};
  Json systems = Json::object();
  for (const auto& c : kGalleryCases) {
    const auto system = example_gallery(c.name);
    const auto probes = standard_probes(system->space(), config.seed);
    const auto t2 = check_theorem2(system, e, e, grid, probes);
    const std::string name(c.name);
    systems[name] = Json{{"verdict", std::string(to_string(t2.verdict))},
                         {"precondition",
                          {{"invariant", t2.precondition.invariant},
                           {"compatible", t2.precondition.compatible},
                           {"finite", t2.precondition.finite},
                           {"detail", t2.precondition.detail}}},
                         {"hd1", std::string(to_string(t2.hd1.verdict))},
                         {"kd2", std::string(to_string(t2.kd2.verdict))},
                         {"horizon", {{"verdict", std::string(to_string(t2.horizon.verdict))},
                                      {"worst_ratio", number_or_null(t2.horizon.worst_ratio)}}},
                         {"sufficiency_slack", number_or_null(t2.sufficiency_slack)},
                         {"necessity_slack", number_or_null(t2.necessity_slack)},
                         {"fitted_gain", to_json(t2.fitted_hull)},
                         {"growth_gain", to_json(t2.growth_hull)},
                         {"product_gain", to_json(t2.product_gain)}};
    report.csv_rows.push_back({name, std::string(to_string(t2.verdict)), std::string(to_string(t2.horizon.verdict)),
                               format_number(t2.sufficiency_slack), format_number(t2.necessity_slack)});
    g.equal(name + " verdict", std::string(to_string(t2.verdict)), std::string(c.theorem2));
    if (t2.precondition.ok()) g.at_most(name + " product gain slack", t2.sufficiency_slack, 1e-6);
  }
  report.theorems["theorem2"] = std::move(systems);
}

}  // namespace

CommandResult cmd_reproduce(std::string_view name, const RunConfig& config) {
  CommandResult result;
  Report& report = result.report;
  report.config = Json{{"reproduce", std::string(name)}, {"seed", config.seed}};
  report.meta = Json{{"schema_version", kSchemaVersion}, {"tool", "hkdlab"}, {"version", "0.1.0"},
                     {"command", "reproduce"}};
  report.csv_header = {"t", "N1_req", "N2_req", "hull"};
  Goldens g(report.goldens);
  if (name == "nonuniform-example")
    reproduce_nonuniform(config, report, g);
  else if (name == "growth-not-dicho")
    reproduce_growth_not_dicho(config, report, g);
  else if (name == "theorem1")
    reproduce_theorem1(config, report, g);
  else if (name == "theorem2")
    reproduce_theorem2(config, report, g);
  else
    throw UsageError("unknown reproduce target '" + std::string(name) + "'");

  for (const auto& c : report.goldens) {
    if (c.pass) continue;
    result.exit_code = kExitFail;
    std::ostringstream os;
    os << "golden mismatch: " << c.name << ": expected " << c.relation << " " << c.expected.dump() << ", got "
       << c.actual.dump();
    if (c.expected.is_number() && c.actual.is_number())
      os << " (delta " << format_number(c.actual.get<double>() - c.expected.get<double>()) << ")";
    result.messages.push_back(os.str());
    report.add_violation("golden", os.str());
  }
  return result;
}

}  // namespace hkd::cli
