#include "spt/engine.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

#include "spt/error.hpp"

namespace spt {

// ---------------------------------------------------------------------------
// Task constructors

Task Task::leaf(std::unique_ptr<Leaf> kernel) {
  Task t;
  t.kind_ = TaskKind::leaf;
  t.leaf_ = std::move(kernel);
  return t;
}

Task Task::fork(std::vector<Task> children) {
  Task t;
  t.kind_ = TaskKind::fork;
  t.children_ = std::move(children);
  return t;
}

Task Task::parallel_for(std::vector<Task> children) {
  Task t;
  t.kind_ = TaskKind::parallel_for;
  t.children_ = std::move(children);
  return t;
}

Task Task::sequence(std::vector<Task> children) {
  Task t;
  t.kind_ = TaskKind::sequence;
  t.children_ = std::move(children);
  return t;
}

Task Task::alloc(StorageBase* buffer) {
  Task t;
  t.kind_ = TaskKind::alloc;
  t.buffer_ = buffer;
  return t;
}

Task Task::dealloc(StorageBase* buffer) {
  Task t;
  t.kind_ = TaskKind::dealloc;
  t.buffer_ = buffer;
  return t;
}

// ---------------------------------------------------------------------------
// Cost analysis

namespace {

struct Eval {
  std::int64_t work = 0;
  std::int64_t span = 0;
  std::int64_t madds = 0;
  std::int64_t forks = 0;
  std::int64_t peak = 0;  // peak live dynamic space inside this subtree
  std::int64_t net = 0;   // allocated minus freed on exit
};

Eval evaluate(const Task& t) {
  Eval e;
  switch (t.kind()) {
    case TaskKind::leaf: {
      const LeafCost c = t.kernel()->cost();
      e.work = c.work;
      e.span = c.span;
      e.madds = c.madds;
      break;
    }
    case TaskKind::sequence: {
      std::int64_t live = 0;
      for (const Task& child : t.children()) {
        const Eval c = evaluate(child);
        e.work += c.work;
        e.span += c.span;
        e.madds += c.madds;
        e.forks += c.forks;
        e.peak = std::max(e.peak, live + c.peak);
        live += c.net;
      }
      e.net = live;
      e.peak = std::max(e.peak, live);
      break;
    }
    case TaskKind::fork:
    case TaskKind::parallel_for: {
      const auto k = static_cast<std::int64_t>(t.children().size());
      std::int64_t longest = 0;
      for (const Task& child : t.children()) {
        const Eval c = evaluate(child);
        e.work += c.work;
        e.madds += c.madds;
        e.forks += c.forks;
        e.peak += c.peak;  // children may all be at their peak at once
        e.net += c.net;
        longest = std::max(longest, c.span);
      }
      const std::int64_t depth = log2_ceil(static_cast<std::uint64_t>(std::max<std::int64_t>(k, 1)));
      const std::int64_t binary_forks = std::max<std::int64_t>(k - 1, 0);
      e.forks += binary_forks;
      if (t.kind() == TaskKind::fork) {
        e.work += 2 * binary_forks;
        e.span = longest + 2 * depth;
      } else {
        e.work += binary_forks;
        e.span = longest + depth;
      }
      break;
    }
    case TaskKind::alloc: {
      const std::int64_t s = t.buffer()->size();
      const std::int64_t c = log2_ceil(static_cast<std::uint64_t>(s) + 1);
      e.work = c;
      e.span = c;
      e.peak = s;
      e.net = s;
      break;
    }
    case TaskKind::dealloc:
      e.work = 1;
      e.span = 1;
      e.net = -t.buffer()->size();
      break;
  }
  if (t.is_call()) {
    e.work += 1;
    e.span += 1;
  }
  return e;
}

void zero_entry_buffers(Program& program) {
  for (StorageBase* b : program.zero_on_entry) {
    if (!b->allocated()) b->allocate();
    b->zero();
  }
}

void run_serial(const Task& t, AccessSink* trace) {
  switch (t.kind()) {
    case TaskKind::leaf:
      t.kernel()->run();
      if (trace != nullptr) t.kernel()->accesses(*trace);
      break;
    case TaskKind::sequence:
    case TaskKind::fork:
    case TaskKind::parallel_for:
      for (const Task& child : t.children()) run_serial(child, trace);
      break;
    case TaskKind::alloc:
      t.buffer()->allocate();
      break;
    case TaskKind::dealloc:
      t.buffer()->release();
      break;
  }
}

void run_tbb(const Task& t) {
  switch (t.kind()) {
    case TaskKind::leaf:
      t.kernel()->run();
      break;
    case TaskKind::sequence:
      for (const Task& child : t.children()) run_tbb(child);
      break;
    case TaskKind::fork:
    case TaskKind::parallel_for: {
      const auto& kids = t.children();
      if (kids.size() == 1) {
        run_tbb(kids.front());
        break;
      }
      tbb::parallel_for(std::size_t{0}, kids.size(), [&](std::size_t i) { run_tbb(kids[i]); });
      break;
    }
    case TaskKind::alloc:
      t.buffer()->allocate();
      break;
    case TaskKind::dealloc:
      t.buffer()->release();
      break;
  }
}

}  // namespace

ExecMetrics analyze(const Task& root) {
  const Eval e = evaluate(root);
  return ExecMetrics{e.work, e.span, e.peak, e.forks, e.madds};
}

ExecMetrics analyze(const Program& program) {
  ExecMetrics m = analyze(program.root);
  m.peak_space += program.resident_space;
  return m;
}

ExecMetrics run_instrumented(Program& program, AccessSink* trace) {
  zero_entry_buffers(program);
  run_serial(program.root, trace);
  return analyze(program);
}

// ---------------------------------------------------------------------------
// Race detection

namespace {

using Key = std::uint64_t;

constexpr Key make_key(buffer_id b, std::uint64_t index) { return (Key{b} << 40) | index; }
constexpr buffer_id key_buffer(Key k) { return static_cast<buffer_id>(k >> 40); }
constexpr std::uint64_t key_index(Key k) { return k & ((Key{1} << 40) - 1); }

struct AccessSet {
  std::vector<Key> reads;
  std::vector<Key> writes;
};

class SetCollector final : public AccessSink {
 public:
  explicit SetCollector(AccessSet& out) : out_(out) {}
  void on_access(buffer_id buffer, std::uint64_t index, bool write) override {
    (write ? out_.writes : out_.reads).push_back(make_key(buffer, index));
  }

 private:
  AccessSet& out_;
};

void normalize(std::vector<Key>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<Key> merge_unique(const std::vector<Key>& a, const std::vector<Key>& b) {
  std::vector<Key> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct Owner {
  Key key;
  int child;
  bool operator<(const Owner& o) const { return key != o.key ? key < o.key : child < o.child; }
};

class RaceChecker {
 public:
  explicit RaceChecker(const Workspace* ws) : ws_(ws) {}

  std::optional<RaceViolation> found;

  AccessSet collect(const Task& t, std::vector<int>& path) {
    AccessSet set;
    if (found) return set;
    switch (t.kind()) {
      case TaskKind::leaf: {
        SetCollector sink(set);
        t.kernel()->accesses(sink);
        normalize(set.reads);
        normalize(set.writes);
        return set;
      }
      case TaskKind::alloc:
      case TaskKind::dealloc:
        return set;
      case TaskKind::sequence:
      case TaskKind::fork:
      case TaskKind::parallel_for:
        break;
    }
    std::vector<AccessSet> kids;
    kids.reserve(t.children().size());
    for (std::size_t i = 0; i < t.children().size(); ++i) {
      path.push_back(static_cast<int>(i));
      kids.push_back(collect(t.children()[i], path));
      path.pop_back();
      if (found) return set;
    }
    if (t.kind() != TaskKind::sequence) check(t, kids, path);
    for (AccessSet& k : kids) {
      set.reads = merge_unique(set.reads, k.reads);
      set.writes = merge_unique(set.writes, k.writes);
    }
    return set;
  }

 private:
  void check(const Task& t, const std::vector<AccessSet>& kids, const std::vector<int>& path) {
    std::vector<Owner> writers;
    for (std::size_t c = 0; c < kids.size(); ++c) {
      for (Key k : kids[c].writes) writers.push_back(Owner{k, static_cast<int>(c)});
    }
    std::sort(writers.begin(), writers.end());
    for (std::size_t i = 1; i < writers.size(); ++i) {
      if (writers[i].key == writers[i - 1].key) {
        report(t, path, writers[i - 1].child, writers[i].child, writers[i].key, true);
        return;
      }
    }
    for (std::size_t c = 0; c < kids.size(); ++c) {
      for (Key k : kids[c].reads) {
        auto it = std::lower_bound(writers.begin(), writers.end(), Owner{k, -1});
        for (; it != writers.end() && it->key == k; ++it) {
          if (it->child != static_cast<int>(c)) {
            report(t, path, std::min<int>(it->child, static_cast<int>(c)),
                   std::max<int>(it->child, static_cast<int>(c)), k, false);
            return;
          }
        }
      }
    }
  }

  void report(const Task& t, const std::vector<int>& path, int a, int b, Key key, bool ww) {
    RaceViolation v;
    v.path = path;
    v.kernel = t.tag().kernel != nullptr ? t.tag().kernel : "";
    v.first_child = a;
    v.second_child = b;
    v.buffer = key_buffer(key);
    v.index = key_index(key);
    v.write_write = ww;
    if (ws_ != nullptr && v.buffer < ws_->buffer_count()) v.buffer_name = ws_->buffer(v.buffer).name();
    found = std::move(v);
  }

  const Workspace* ws_;
};

}  // namespace

std::string RaceViolation::describe() const {
  std::ostringstream os;
  os << (write_write ? "write-write" : "read-write") << " conflict at node [";
  for (std::size_t i = 0; i < path.size(); ++i) os << (i ? "," : "") << path[i];
  os << "]";
  if (!kernel.empty()) os << " (" << kernel << ")";
  os << " between children " << first_child << " and " << second_child << " on buffer " << buffer;
  if (!buffer_name.empty()) os << " '" << buffer_name << "'";
  os << " element " << index;
  return os.str();
}

RaceReport check_race_freedom(const Program& program, const Workspace* ws) {
  RaceChecker checker(ws);
  std::vector<int> path;
  checker.collect(program.root, path);
  return RaceReport{checker.found};
}

// ---------------------------------------------------------------------------
// Parallel execution

ParallelResult run_parallel(Program& program, int threads) {
  if (threads < 1) throw Error(Errc::invalid_argument, "thread count must be positive");
#ifndef NDEBUG
  if (const RaceReport report = check_race_freedom(program); !report.ok()) {
    throw Error(Errc::race, report.violation->describe());
  }
#endif
  if (program.root.empty() && program.zero_on_entry.empty()) return {};
  const auto start = std::chrono::steady_clock::now();
  zero_entry_buffers(program);
  tbb::task_arena arena(threads);
  arena.execute([&] { run_tbb(program.root); });
  const auto stop = std::chrono::steady_clock::now();
  return ParallelResult{std::chrono::duration<double>(stop - start).count()};
}

}  // namespace spt
