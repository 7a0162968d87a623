#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "spt/config.hpp"
#include "spt/storage.hpp"

namespace spt {

/// Receives element accesses in program order.
class AccessSink {
 public:
  virtual ~AccessSink() = default;
  virtual void on_access(buffer_id buffer, std::uint64_t index, bool write) = 0;
};

/// Cost of one leaf under the cost model: `work` and `span` in unit
/// operations, `madds` counts multiply-adds only.
struct LeafCost {
  std::int64_t work = 0;
  std::int64_t span = 0;
  std::int64_t madds = 0;
};

/// A serial base-case kernel invocation.
class Leaf {
 public:
  virtual ~Leaf() = default;
  virtual void run() = 0;
  /// Replays the accesses run() performs, in the same order, without
  /// touching data.
  virtual void accesses(AccessSink& sink) const = 0;
  virtual LeafCost cost() const = 0;
};

enum class TaskKind : std::uint8_t { leaf, fork, parallel_for, sequence, alloc, dealloc };

/// Structural annotations that tests use to inspect a tree; they never
/// affect execution.
struct TaskTag {
  const char* kernel = nullptr;
  int plane_lo = -1;
  int plane_hi = -1;
  index_t a = 0;
  index_t b = 0;
  index_t c = 0;
};

class Task {
 public:
  /// The empty task: a sequence with no children.
  Task() = default;

  static Task leaf(std::unique_ptr<Leaf> kernel);
  static Task fork(std::vector<Task> children);
  static Task parallel_for(std::vector<Task> children);
  static Task sequence(std::vector<Task> children);
  static Task alloc(StorageBase* buffer);
  static Task dealloc(StorageBase* buffer);

  /// Marks this node as a recursive call; it is charged one unit of
  /// bookkeeping work and span.
  Task&& as_call() && {
    call_ = true;
    return std::move(*this);
  }
  Task&& tagged(const TaskTag& tag) && {
    tag_ = tag;
    return std::move(*this);
  }
  void set_tag(const TaskTag& tag) { tag_ = tag; }

  TaskKind kind() const { return kind_; }
  bool is_call() const { return call_; }
  const TaskTag& tag() const { return tag_; }
  const std::vector<Task>& children() const { return children_; }
  Leaf* kernel() const { return leaf_.get(); }
  StorageBase* buffer() const { return buffer_; }
  bool empty() const { return kind_ == TaskKind::sequence && children_.empty(); }

 private:
  TaskKind kind_ = TaskKind::sequence;
  bool call_ = false;
  TaskTag tag_{};
  std::vector<Task> children_;
  std::unique_ptr<Leaf> leaf_;
  StorageBase* buffer_ = nullptr;
};

/// A task tree plus the entry conditions it assumes.
struct Program {
  Task root;
  /// Buffers zero filled before either executor starts (outputs and planes).
  std::vector<StorageBase*> zero_on_entry;
  /// Elements of statically allocated output/plane storage live for the whole run.
  index_t resident_space = 0;
};

}  // namespace spt
