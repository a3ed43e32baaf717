#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hkd/linops.hpp"

namespace hkd {

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;
inline constexpr double kDefaultHorizon = 10.0;
inline constexpr std::size_t kDefaultGridPoints = 101;

/// Strictly increasing, nonnegative sequence of sample times.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> points);

  /// `count` equispaced points on [0, horizon]; `count == 1` yields {0}.
  static TimeGrid uniform(double horizon, std::size_t count);
  static TimeGrid default_grid() { return uniform(kDefaultHorizon, kDefaultGridPoints); }

  std::size_t size() const noexcept { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }
  double front() const { return points_.front(); }
  double back() const { return points_.back(); }
  std::span<const double> points() const noexcept { return points_; }

  /// Index of the grid point equal to `t` (relative match 1e-12), if any.
  std::optional<std::size_t> index_of(double t) const;

  /// This grid followed by every point shifted by back(); a uniform grid on
  /// [0, T] becomes the uniform grid on [0, 2T] with the same step.
  TimeGrid doubled() const;

  /// True if every point of this grid appears (to 1e-12 relative) in `other`
  /// at the same index.
  bool is_prefix_of(const TimeGrid& other) const;

 private:
  std::vector<double> points_;
};

/// Canonical basis vectors followed by `random_count` pseudo-random unit
/// vectors (unit in the space's base norm), drawn from mt19937_64(seed).
std::vector<Vector> standard_probes(const StateSpace& space,
                                    std::uint64_t seed = kDefaultSeed,
                                    std::size_t random_count = 8);

}  // namespace hkd
