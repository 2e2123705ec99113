#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qlink/core/error.hpp"

namespace qlink {

/// Raised by parallel_for when a work item throws. `completed` marks the items
/// that finished before the pool stopped.
class SweepFailure : public Error {
 public:
  SweepFailure(std::size_t failed_index, std::vector<char> completed, const std::string& message)
      : Error("work item " + std::to_string(failed_index) + " failed: " + message),
        failed_index_(failed_index),
        completed_(std::move(completed)) {}
  std::size_t failed_index() const { return failed_index_; }
  const std::vector<char>& completed() const { return completed_; }

 private:
  std::size_t failed_index_;
  std::vector<char> completed_;
};

/// Runs fn(0..n-1) on up to `workers` threads (<= 0 means hardware
/// concurrency). Items are handed out in index order; after the first
/// failure no new items start.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

/// Seed for work item `index` of a run seeded with `master`. Depends only on
/// the pair, so results do not change with the worker count.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace qlink
