#include <charconv>
#include <cmath>
#include <string>

#include "hkd/cli.hpp"
#include "hkd/errors.hpp"

namespace hkd::cli {

void RunConfig::validate() const {
  if (!(tmax > 0.0) || !std::isfinite(tmax)) throw UsageError("--tmax must be positive and finite");
  // One point is allowed: the grid {0} on which every check is trivial.
  if (grid_points < 1) throw UsageError("--grid-points must be at least 1");
  if (!(structural_tol > 0.0) || !(envelope_tol > 0.0)) throw UsageError("--tol must be positive");
}

TimeGrid RunConfig::grid() const { return TimeGrid::uniform(tmax, grid_points); }

namespace {

GrowthRate parse_rate(const std::string& spec, const char* flag) {
  try {
    return GrowthRate::parse(spec);
  } catch (const DomainError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

}  // namespace

GrowthRate RunConfig::h() const { return parse_rate(h_spec, "--h"); }
GrowthRate RunConfig::k() const { return parse_rate(k_spec, "--k"); }

SystemPtr RunConfig::system() const {
  if (example.empty()) throw UsageError("--example is required");
  GalleryOptions opts;
  opts.h = h();
  opts.k = k();
  opts.validation_grid = grid();
  try {
    if (u_spec) opts.u = ScalarProfile::parse(*u_spec);
    return example_gallery(example, opts);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
}

Json config_json(const RunConfig& c) {
  Json j;
  j["example"] = c.example;
  j["h"] = c.h_spec;
  j["k"] = c.k_spec;
  j["u"] = c.u_spec ? Json(*c.u_spec) : Json(nullptr);
  j["tmax"] = c.tmax;
  j["grid_points"] = c.grid_points;
  j["structural_tol"] = c.structural_tol;
  j["envelope_tol"] = c.envelope_tol;
  j["seed"] = c.seed;
  return j;
}

Vector parse_probe(std::string_view text, std::size_t dimension) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view field = text.substr(start, comma - start);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty() || !std::isfinite(v))
      throw UsageError("--probe: cannot parse '" + std::string(text) + "'");
    values.push_back(v);
    start = comma + 1;
  }
  if (values.size() != dimension)
    throw UsageError("--probe: expected " + std::to_string(dimension) + " components, got " +
                     std::to_string(values.size()));
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace hkd::cli
