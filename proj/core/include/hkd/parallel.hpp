#pragma once

#include <cstddef>
#include <functional>

namespace hkd::parallel {

/// Worker count: `HKDLAB_THREADS` if set and positive, otherwise the
/// hardware concurrency. Never less than 1.
std::size_t worker_count();

/// Runs body(i) for every i in [0, count), interleaved across worker
/// threads. Bodies must only write to state owned by their index. If bodies
/// throw, one of the exceptions is rethrown after all workers finish.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace hkd::parallel

#include <cmath>
#include <limits>
#include <vector>

namespace hkd {

/// Running maximum with the location where it was attained. Ties keep the
/// smaller location and NaN counts as +inf, so merging partial results in any
/// order gives the same record.
template <class Location>
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  Location where{};
  bool seen = false;

  void offer(double v, const Location& loc) {
    if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
    if (!seen || v > value || (v == value && loc < where)) {
      value = v;
      where = loc;
      seen = true;
    }
  }
  void merge(const Worst& other) {
    if (other.seen) offer(other.value, other.where);
  }
};

/// Maps body over [0, count) in parallel and folds the per-index records in
/// index order.
template <class Location, class Body>
Worst<Location> parallel_worst(std::size_t count, Body&& body) {
  std::vector<Worst<Location>> slots(count);
  parallel::for_each_index(count, [&](std::size_t i) { slots[i] = body(i); });
  Worst<Location> total;
  for (const auto& s : slots) total.merge(s);
  return total;
}

}  // namespace hkd
