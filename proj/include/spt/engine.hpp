#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spt/task.hpp"

namespace spt {

/// Measured complexity of one run under the cost model.
///
/// - leaf: its own work/span (serial inside)
/// - call bookkeeping: +1 work, +1 span
/// - fork of k: k-1 work and ceil(log2 k) span to fork, the same to join
/// - parallel-for of k: k-1 work, ceil(log2 k) span
/// - alloc of s elements: ceil(log2(s+1)) work and span; dealloc: 1 and 1
///
/// `peak_space` counts live output, plane and run-time allocated elements.
/// Read-only operands are not part of it.
struct ExecMetrics {
  std::int64_t work = 0;
  std::int64_t span = 0;
  std::int64_t peak_space = 0;
  std::int64_t forks = 0;
  std::int64_t madds = 0;

  friend bool operator==(const ExecMetrics&, const ExecMetrics&) = default;
};

struct Access {
  buffer_id buffer;
  std::uint64_t index;
  bool write;

  friend bool operator==(const Access&, const Access&) = default;
};

/// Stores every access; fine for desk-scale traces.
class TraceRecorder final : public AccessSink {
 public:
  void on_access(buffer_id buffer, std::uint64_t index, bool write) override {
    trace_.push_back(Access{buffer, index, write});
  }
  const std::vector<Access>& trace() const { return trace_; }
  std::vector<Access> take() { return std::move(trace_); }

 private:
  std::vector<Access> trace_;
};

/// Complexity of a tree without executing it. Metrics depend only on the
/// tree shape, never on data.
ExecMetrics analyze(const Program& program);
ExecMetrics analyze(const Task& root);

/// Runs leaves serially, children left to right. When `trace` is non-null
/// every element access is forwarded to it in execution order.
ExecMetrics run_instrumented(Program& program, AccessSink* trace = nullptr);

struct RaceViolation {
  std::vector<int> path;  // child indices from the root to the parallel node
  std::string kernel;     // tag of that node, if any
  int first_child = -1;
  int second_child = -1;
  buffer_id buffer = 0;
  std::string buffer_name;
  std::uint64_t index = 0;
  bool write_write = true;

  std::string describe() const;
};

struct RaceReport {
  std::optional<RaceViolation> violation;
  bool ok() const { return !violation.has_value(); }
};

/// Checks that the children of every fork and parallel-for touch disjoint
/// elements wherever at least one of them writes.
RaceReport check_race_freedom(const Program& program, const Workspace* ws = nullptr);

struct ParallelResult {
  double seconds = 0.0;
};

/// Executes the same DAG on up to `threads` worker threads.
ParallelResult run_parallel(Program& program, int threads);

}  // namespace spt
