#include <charconv>
#include <cmath>
#include <sstream>

#include "hkd/cli.hpp"

namespace hkd::cli {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

Json number_or_null(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

Json to_json(std::span<const double> values) {
  Json a = Json::array();
  for (double v : values) a.push_back(number_or_null(v));
  return a;
}

Json envelope_json(const EnvelopeReport& r) {
  Json j;
  j["kind"] = std::string(to_string(r.kind));
  j["system"] = r.system_label;
  j["h"] = r.h_spec;
  j["k"] = r.k_spec;
  j["max"] = number_or_null(r.max_value());
  j["t"] = to_json(r.times);
  j["first_req"] = to_json(r.first_req);
  j["second_req"] = to_json(r.second_req);
  j["first_argmax"] = r.first_argmax;
  j["second_argmax"] = r.second_argmax;
  j["hull"] = to_json(r.hull);
  j["skipped_ratios"] = r.skipped_ratios;
  return j;
}

void Report::add_violation(std::string kind, std::string detail) {
  violations.push_back(Json{{"kind", std::move(kind)}, {"detail", std::move(detail)}});
}

Json Report::to_json() const {
  Json doc;
  doc["config"] = config;
  doc["structural"] = structural;
  doc["envelopes"] = envelopes;
  doc["norms"] = norms;
  Json th = theorems;
  if (!goldens.empty()) {
    Json g = Json::array();
    for (const auto& c : goldens)
      g.push_back({{"name", c.name},
                   {"relation", c.relation},
                   {"expected", c.expected},
                   {"actual", c.actual},
                   {"tolerance", c.tolerance},
                   {"pass", c.pass}});
    th["golden"] = std::move(g);
  }
  doc["theorems"] = std::move(th);
  doc["violations"] = violations;
  doc["meta"] = meta;
  return doc;
}

std::string Report::render(Format format) const {
  if (format == Format::json) return to_json().dump(2) + "\n";
  std::ostringstream os;
  const auto line = [&os](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << fields[i];
    os << '\n';
  };
  line(csv_header);
  for (const auto& row : csv_rows) line(row);
  return os.str();
}

}  // namespace hkd::cli
