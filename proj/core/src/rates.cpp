#include "hkd/rates.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>

#include "hkd/errors.hpp"

namespace hkd {
namespace {

double parse_positive(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty())
    throw DomainError(std::string(what) + ": cannot parse number '" + std::string(text) + "'");
  if (!(value > 0.0) || !std::isfinite(value))
    throw DomainError(std::string(what) + ": rate parameter must be positive");
  return value;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::vector<std::pair<double, double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open rate table '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DomainError("rate table '" + path + "' is empty");
  std::vector<std::pair<double, double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw DomainError("rate table line " + std::to_string(line_no) + ": expected 't,value'");
    double t = 0.0, v = 0.0;
    const std::string_view ts(line.data(), comma);
    const std::string_view vs(line.data() + comma + 1, line.size() - comma - 1);
    auto r1 = std::from_chars(ts.data(), ts.data() + ts.size(), t);
    auto r2 = std::from_chars(vs.data(), vs.data() + vs.size(), v);
    if (r1.ec != std::errc() || r2.ec != std::errc() || r1.ptr != ts.data() + ts.size() ||
        r2.ptr != vs.data() + vs.size())
      throw DomainError("rate table line " + std::to_string(line_no) + ": malformed number");
    rows.emplace_back(t, v);
  }
  return rows;
}

}  // namespace

double logpoly(double t) { return (t + 1.0) * std::log(t + std::numbers::e); }

GrowthRate GrowthRate::exponential(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("exp rate needs alpha > 0");
  return GrowthRate(RateKind::exponential, alpha, "exp:" + format_number(alpha));
}

GrowthRate GrowthRate::polynomial(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("poly rate needs alpha > 0");
  return GrowthRate(RateKind::polynomial, alpha, "poly:" + format_number(alpha));
}

GrowthRate GrowthRate::log_polynomial() { return GrowthRate(RateKind::logpoly, 0.0, "logpoly"); }

GrowthRate GrowthRate::table(std::vector<std::pair<double, double>> samples, std::string source) {
  if (samples.empty()) throw DomainError("rate table has no samples");
  if (samples.front().first != 0.0) throw DomainError("rate table must start at t = 0");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto [t, v] = samples[i];
    if (!std::isfinite(t) || !std::isfinite(v))
      throw DomainError("rate table contains non-finite values");
    if (i > 0 && !(t > samples[i - 1].first))
      throw DomainError("rate table times must be strictly increasing");
  }
  GrowthRate rate(RateKind::custom, 0.0, "table:" + source);
  rate.samples_ = std::move(samples);
  return rate;
}

GrowthRate GrowthRate::parse(std::string_view spec) {
  if (spec == "logpoly") return log_polynomial();
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw DomainError("unknown rate '" + std::string(spec) + "'");
  const auto head = spec.substr(0, colon);
  const auto tail = spec.substr(colon + 1);
  if (head == "exp") return exponential(parse_positive(tail, spec));
  if (head == "poly") return polynomial(parse_positive(tail, spec));
  if (head == "table") {
    if (tail.empty()) throw DomainError("table rate needs a path");
    const std::string path(tail);
    return table(read_table(path), path);
  }
  throw DomainError("unknown rate '" + std::string(spec) + "'");
}

double GrowthRate::domain_end() const {
  return kind_ == RateKind::custom ? samples_.back().first
                                   : std::numeric_limits<double>::infinity();
}

double GrowthRate::operator()(double t) const {
  if (!(t >= 0.0)) throw DomainError("growth rate evaluated at negative time");
  switch (kind_) {
    case RateKind::exponential:
      return std::exp(alpha_ * t);
    case RateKind::polynomial:
      return std::pow(t + 1.0, alpha_);
    case RateKind::logpoly:
      return logpoly(t);
    case RateKind::custom: {
      if (t > samples_.back().first)
        throw DomainError("rate table " + spec_ + " does not extend to t = " + format_number(t));
      auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                                 [](const auto& s, double x) { return s.first < x; });
      if (it->first == t) return it->second;
      const auto& [t1, v1] = *it;
      const auto& [t0, v0] = *std::prev(it);
      const double w = (t - t0) / (t1 - t0);
      return v0 + w * (v1 - v0);
    }
  }
  return 0.0;
}

RateCheck check_growth_rate(const GrowthRate& rate, std::span<const double> grid) {
  if (grid.empty()) throw DomainError("check_growth_rate: empty grid");
  RateCheck result;
  double previous = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    const double v = rate(t);
    if (!(v >= 1.0)) {
      result.first_violation = RateViolation{t, "value " + format_number(v) + " < 1"};
      return result;
    }
    if (i > 0 && v < previous) {
      result.first_violation = RateViolation{t, "decreasing: " + format_number(v) + " < " +
                                                    format_number(previous)};
      return result;
    }
    previous = v;
  }
  result.pass = true;
  result.divergence_plausible = rate(grid.back()) >= rate(grid.front()) + kDivergenceGap;
  return result;
}

WitnessCheck class_g_witness(const GrowthRate& h, const GrowthRate& g,
                             std::span<const double> grid) {
  if (grid.empty()) throw DomainError("class_g_witness: empty grid");
  WitnessCheck result;
  result.worst_margin = std::numeric_limits<double>::infinity();
  for (double t : grid) {
    const double ht = h(t);
    const double margin = ht * ht / (logpoly(t) * g(t));
    if (margin < result.worst_margin) {
      result.worst_margin = margin;
      result.worst_t = t;
    }
  }
  result.pass = result.worst_margin >= 1.0 - 1e-12;
  return result;
}

}  // namespace hkd
