#include "hkd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <random>
#include <string>

#include "hkd/errors.hpp"

namespace hkd {
namespace {

bool same_time(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw DomainError("time grid is empty");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i]) || points_[i] < 0.0)
      throw DomainError("time grid point " + std::to_string(i) + " is negative or not finite");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw DomainError("time grid is not strictly increasing at index " + std::to_string(i));
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t count) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw DomainError("grid horizon must be positive");
  if (count == 0) throw DomainError("grid needs at least one point");
  if (count == 1) return TimeGrid({0.0});
  std::vector<double> pts(count);
  const double step = horizon / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) pts[i] = static_cast<double>(i) * step;
  pts.back() = horizon;
  return TimeGrid(std::move(pts));
}

std::optional<std::size_t> TimeGrid::index_of(double t) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t);
  for (auto cand : {it, it == points_.begin() ? it : std::prev(it)}) {
    if (cand != points_.end() && same_time(*cand, t))
      return static_cast<std::size_t>(cand - points_.begin());
  }
  return std::nullopt;
}

TimeGrid TimeGrid::doubled() const {
  const std::size_t n = points_.size();
  if (n == 1) return TimeGrid({points_[0]});
  const TimeGrid as_uniform = uniform(points_.back(), n);
  if (points_ == as_uniform.points_) return uniform(2.0 * points_.back(), 2 * n - 1);
  std::vector<double> pts = points_;
  const double shift = points_.back() - points_.front();
  for (std::size_t i = 1; i < n; ++i) pts.push_back(points_[i] + shift);
  return TimeGrid(std::move(pts));
}

bool TimeGrid::is_prefix_of(const TimeGrid& other) const {
  if (size() > other.size()) return false;
  for (std::size_t i = 0; i < size(); ++i)
    if (!same_time(points_[i], other.points_[i])) return false;
  return true;
}

std::vector<Vector> standard_probes(const StateSpace& space, std::uint64_t seed,
                                    std::size_t random_count) {
  const auto n = static_cast<Eigen::Index>(space.dimension());
  std::vector<Vector> probes;
  probes.reserve(space.dimension() + random_count);
  for (Eigen::Index i = 0; i < n; ++i) probes.push_back(Vector::Unit(n, i));

  // Raw mt19937_64 output mapped to [-1, 1); distribution objects are not
  // portable across standard libraries.
  std::mt19937_64 engine(seed);
  const auto uniform = [&engine] {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  };
  while (probes.size() < space.dimension() + random_count) {
    Vector x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = uniform();
    const double len = space.norm(x);
    if (len < 1e-3) continue;
    probes.push_back(x / len);
  }
  return probes;
}

}  // namespace hkd
