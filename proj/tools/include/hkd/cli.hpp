#pragma once

// The hkdlab command line: configuration, report documents and the three
// commands (check, norms, reproduce). Everything here runs in-process so the
// tests can drive it without spawning the executable.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hkd/grid.hpp"
#include "hkd/lyap_norms.hpp"
#include "hkd/systems.hpp"
#include "hkd/verify.hpp"

namespace hkd::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

inline constexpr int kSchemaVersion = 1;

/// Bad flags, unknown names, malformed specifiers. Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Format { json, csv };

struct RunConfig {
  std::string example;
  std::string h_spec = "exp:1";
  std::string k_spec = "exp:1";
  std::optional<std::string> u_spec;
  double tmax = kDefaultHorizon;
  std::size_t grid_points = kDefaultGridPoints;
  double structural_tol = kStructuralTol;
  double envelope_tol = kEnvelopeTol;
  std::uint64_t seed = kDefaultSeed;
  std::optional<std::string> out;
  Format format = Format::json;
  bool timing = false;

  /// Throws UsageError when a field is out of range.
  void validate() const;
  TimeGrid grid() const;
  GrowthRate h() const;
  GrowthRate k() const;
  /// The configured gallery system; UsageError for unknown names or profiles.
  SystemPtr system() const;
};

using Json = nlohmann::ordered_json;

struct GoldenCheck {
  std::string name;
  std::string relation;  // "<=", ">=", "~rel", "=="
  Json expected;
  Json actual;
  double tolerance = 0.0;
  bool pass = false;
};

/// The document every command emits, plus the CSV view of its main table.
struct Report {
  Json config = Json::object();
  Json structural = Json::object();
  Json envelopes = Json::object();
  Json norms = Json::object();
  Json theorems = Json::object();
  Json violations = Json::array();
  Json meta = Json::object();

  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;

  std::vector<GoldenCheck> goldens;

  Json to_json() const;
  std::string render(Format format) const;
  void add_violation(std::string kind, std::string detail);
};

struct CommandResult {
  int exit_code = kExitPass;
  Report report;
  /// Human-readable diagnostics for stderr.
  std::vector<std::string> messages;
};

Json config_json(const RunConfig& config);
/// Shortest round-trip decimal; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double value);
Json number_or_null(double value);
Json to_json(std::span<const double> values);
Json envelope_json(const EnvelopeReport& report);

/// Structural checks, dichotomy and growth envelopes at T and 2T and the
/// uniformity verdicts. Exit 1 iff a structural check fails.
CommandResult cmd_check(const RunConfig& config);

/// Norm tables for the given probes (canonical basis when empty).
CommandResult cmd_norms(const RunConfig& config, NormFamilyKind kind, std::vector<Vector> probes);

inline constexpr std::array<std::string_view, 4> kReproduceNames = {
    "nonuniform-example", "growth-not-dicho", "theorem1", "theorem2"};

/// Runs a pinned configuration and compares against golden values. Only the
/// seed, output and format fields of `config` are honored.
CommandResult cmd_reproduce(std::string_view name, const RunConfig& config);

/// Parses "a,b,c" into a vector of the given dimension.
Vector parse_probe(std::string_view text, std::size_t dimension);

/// Full command line, including the program name in args[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hkd::cli
