#include "spt/spt.h"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <variant>

#include "spt/analytics.hpp"
#include "spt/cache_sim.hpp"
#include "spt/engine.hpp"
#include "spt/error.hpp"
#include "spt/mm.hpp"
#include "spt/random.hpp"
#include "spt/rmm.hpp"
#include "spt/suites.hpp"
#include "spt/tc.hpp"
#include "spt/tensor_file.hpp"

using spt::Errc;
using spt::Error;
using spt::ModP;

struct spt_context {
  spt::ScalarKind kind = spt::ScalarKind::modp;
  spt::KernelConfig cfg;
  spt::Workspace ws;
};

struct spt_matrix {
  spt_context* ctx = nullptr;
  std::variant<spt::Matrix<ModP>, spt::Matrix<double>> view;
};

struct spt_tensor {
  spt_context* ctx = nullptr;
  std::variant<spt::Tensor<ModP>, spt::Tensor<double>> view;
};

namespace {

thread_local std::string g_last_error;

spt_status code_of(Errc e) {
  switch (e) {
    case Errc::invalid_argument: return SPT_E_INVALID_ARGUMENT;
    case Errc::shape_mismatch: return SPT_E_SHAPE_MISMATCH;
    case Errc::degenerate_split: return SPT_E_DEGENERATE_SPLIT;
    case Errc::invalid_planes: return SPT_E_INVALID_PLANES;
    case Errc::unsupported: return SPT_E_UNSUPPORTED;
    case Errc::io: return SPT_E_IO;
    case Errc::config: return SPT_E_CONFIG;
    case Errc::race: return SPT_E_RACE;
  }
  return SPT_E_INTERNAL;
}

template <class F>
spt_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return SPT_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return code_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SPT_E_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SPT_E_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::invalid_argument, what);
}

spt::KernelConfig to_cpp(const spt_kernel_config& c) {
  spt::KernelConfig k;
  k.mm_base = c.mm_base;
  k.block = c.block;
  k.tc_base = c.tc_base;
  k.inject_plane_overlap = c.inject_plane_overlap != 0;
  if (k.mm_base < 1 || k.block < 1 || k.tc_base < 1) throw Error(Errc::config, "thresholds and block must be >= 1");
  return k;
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class T>
T from_double(double v) {
  if constexpr (std::is_same_v<T, ModP>) {
    require(v >= 0 && v < ModP::kModulus && std::floor(v) == v, "integer scalars must be whole numbers in [0, 2^31-1)");
    return ModP(static_cast<std::uint64_t>(v));
  } else {
    return v;
  }
}

template <class T>
double to_double(const T& v) {
  if constexpr (std::is_same_v<T, ModP>) {
    return static_cast<double>(v.value());
  } else {
    return v;
  }
}

class TeeSink final : public spt::AccessSink {
 public:
  TeeSink(spt::AccessSink* a, spt::AccessSink* b) : a_(a), b_(b) {}
  void on_access(spt::buffer_id buffer, std::uint64_t index, bool write) override {
    if (a_ != nullptr) a_->on_access(buffer, index, write);
    if (b_ != nullptr) b_->on_access(buffer, index, write);
  }

 private:
  spt::AccessSink* a_;
  spt::AccessSink* b_;
};

void execute(spt_context* ctx, spt::Program& prog, const spt_run_options* in, spt_metrics* out, int planes) {
  spt_run_options o;
  spt_run_options_default(&o);
  if (in != nullptr) o = *in;
  if (o.check_races != 0) {
    const spt::RaceReport rep = spt::check_race_freedom(prog, &ctx->ws);
    if (!rep.ok()) throw Error(Errc::race, rep.violation->describe());
  }
  spt_metrics m{};
  m.planes = planes;
  if (o.mode == SPT_EXEC_PARALLEL) {
    require(o.threads >= 1, "thread count must be positive");
    const spt::ExecMetrics em = spt::analyze(prog);
    const spt::ParallelResult pr = spt::run_parallel(prog, o.threads);
    m.work = em.work;
    m.span = em.span;
    m.peak_space = em.peak_space;
    m.forks = em.forks;
    m.madds = em.madds;
    m.seconds = pr.seconds;
  } else {
    std::optional<spt::LruCache> cache;
    if (o.cache_words > 0) {
      spt::CacheConfig cc;
      cc.capacity = o.cache_words;
      cc.line = o.line_words;
      cc.validate();
      cache.emplace(cc);
    }
    std::optional<spt::TraceRecorder> trace;
    if (o.trace_path != nullptr) trace.emplace();
    TeeSink tee(cache ? &*cache : nullptr, trace ? &*trace : nullptr);
    const auto t0 = std::chrono::steady_clock::now();
    const spt::ExecMetrics em = spt::run_instrumented(prog, (cache || trace) ? &tee : nullptr);
    const auto t1 = std::chrono::steady_clock::now();
    m.work = em.work;
    m.span = em.span;
    m.peak_space = em.peak_space;
    m.forks = em.forks;
    m.madds = em.madds;
    m.seconds = std::chrono::duration<double>(t1 - t0).count();
    if (cache) {
      m.cache_misses = cache->misses();
      m.accesses = cache->accesses();
    }
    if (trace) {
      if (!cache) m.accesses = static_cast<std::int64_t>(trace->trace().size());
      spt::write_trace_file(o.trace_path, trace->trace());
    }
  }
  if (out != nullptr) *out = m;
}

/// Drops buffers a run created, however it exits.
struct ScratchScope {
  spt::Workspace& ws;
  std::size_t mark;
  explicit ScratchScope(spt::Workspace& w) : ws(w), mark(w.buffer_count()) {}
  ~ScratchScope() { ws.truncate(mark); }
};

template <class T>
void mm_run_typed(spt_context* ctx, const std::string& algo, const spt::Matrix<T>& x, const spt::Matrix<T>& u,
                  const spt::Matrix<T>& v, int r, std::int64_t processors, const spt_run_options* opts,
                  spt_metrics* metrics) {
  const spt::KernelConfig& cfg = ctx->cfg;
  if (algo == "loop") {
    x.storage()->zero();
    spt::mm_loop(x, u, v);
    if (metrics != nullptr) {
      *metrics = spt_metrics{};
      metrics->madds = metrics->work = metrics->span = u.rows() * u.cols() * v.cols();
      metrics->planes = 1;
    }
    return;
  }
  ScratchScope scratch(ctx->ws);
  int planes = 1;
  {
    spt::Program prog;
    if (algo == "mm") {
      prog = spt::mm_program(x, u, v, cfg);
    } else if (algo == "mm-hd") {
      prog = spt::mm_hd(ctx->ws, x, u, v, r, cfg);
      planes = r;
    } else if (algo == "mm-opt") {
      prog = spt::mm_opt(ctx->ws, x, u, v, r, cfg);
      planes = r;
    } else if (algo == "mm-nd") {
      prog = spt::mm_nd(ctx->ws, x, u, v, cfg);
      planes = static_cast<int>(x.rows());
    } else if (algo == "mm-ns") {
      prog = spt::mm_ns(ctx->ws, x, u, v, cfg);
      planes = static_cast<int>(x.rows());
    } else if (algo == "mm-tradeoff") {
      spt::TradeoffChoice choice;
      prog = spt::mm_tradeoff(ctx->ws, x, u, v, processors, cfg, &choice);
      planes = choice.planes;
    } else if (algo == "rmm") {
      prog.root = spt::rmm(x, u, v, cfg);
      prog.zero_on_entry = {x.storage()};
      prog.resident_space = x.size();
    } else if (algo == "rmm-opt") {
      prog = spt::rmm_opt(ctx->ws, x, u, v, r, cfg);
      planes = r;
    } else {
      throw Error(Errc::invalid_argument, "unknown matrix algorithm '" + algo + "'");
    }
    execute(ctx, prog, opts, metrics, planes);
  }
}

spt::ContractionSpec spec_for(int ox, int ou, int ov, const char* ul, const char* vl) {
  if (ul != nullptr || vl != nullptr) {
    require(ul != nullptr && vl != nullptr, "give labels for both U and V");
    return spt::ContractionSpec::parse(ul, vl);
  }
  const int twice_u = ou + ox - ov;
  const int twice_v = ov + ox - ou;
  const int twice_x = ou + ov - ox;
  require(twice_u % 2 == 0 && twice_v % 2 == 0 && twice_x % 2 == 0, "tensor orders do not form a contraction");
  spt::ContractionSpec s = spt::ContractionSpec::canonical(twice_u / 2, twice_v / 2, twice_x / 2);
  s.validate();
  return s;
}

template <class T>
void tc_run_typed(spt_context* ctx, const std::string& algo, const spt::Tensor<T>& x, const spt::Tensor<T>& u,
                  const spt::Tensor<T>& v, const spt::ContractionSpec& spec, int r, bool row_major,
                  const spt_run_options* opts, spt_metrics* metrics) {
  const spt::KernelConfig& cfg = ctx->cfg;
  if (algo == "loop") {
    spt::tc_loop(x, u, v, spec);
    if (metrics != nullptr) {
      *metrics = spt_metrics{};
      metrics->madds = metrics->work = metrics->span = spt::ipow(x.side(), spec.w());
      metrics->planes = 1;
    }
    return;
  }
  ScratchScope scratch(ctx->ws);
  {
    spt::Program prog;
    if (algo == "tc") {
      prog = spt::tc_program(x, u, v, spec, cfg);
      r = 1;
    } else if (algo == "tc-hs") {
      prog = spt::tc_hs(ctx->ws, x, u, v, spec, r, cfg);
    } else if (algo == "tc-mm-opt") {
      prog = spt::tc_mm_opt(ctx->ws, x, u, v, spec, r, cfg,
                            row_major ? spt::FlattenOrder::row_major : spt::FlattenOrder::morton);
    } else {
      throw Error(Errc::invalid_argument, "unknown contraction algorithm '" + algo + "'");
    }
    execute(ctx, prog, opts, metrics, r);
  }
}

template <class T>
void fill(spt::Storage<T>* s, std::uint64_t seed) {
  spt::Rng rng(seed);
  spt::fill_random(*s, rng);
}

}  // namespace

extern "C" {

const char* spt_last_error(void) { return g_last_error.c_str(); }

const char* spt_status_string(spt_status status) {
  switch (status) {
    case SPT_OK: return "ok";
    case SPT_E_INVALID_ARGUMENT: return "invalid argument";
    case SPT_E_SHAPE_MISMATCH: return "shape mismatch";
    case SPT_E_DEGENERATE_SPLIT: return "degenerate split";
    case SPT_E_INVALID_PLANES: return "invalid plane count";
    case SPT_E_UNSUPPORTED: return "unsupported";
    case SPT_E_IO: return "i/o error";
    case SPT_E_CONFIG: return "invalid configuration";
    case SPT_E_RACE: return "race detected";
    case SPT_E_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void spt_string_free(char* s) { std::free(s); }

void spt_kernel_config_default(spt_kernel_config* cfg) {
  if (cfg == nullptr) return;
  const spt::KernelConfig k;
  cfg->mm_base = k.mm_base;
  cfg->block = k.block;
  cfg->tc_base = k.tc_base;
  cfg->inject_plane_overlap = 0;
}

void spt_run_options_default(spt_run_options* o) {
  if (o == nullptr) return;
  o->mode = SPT_EXEC_INSTRUMENTED;
  o->threads = 1;
  o->check_races = 0;
  o->cache_words = 0;
  o->line_words = 8;
  o->trace_path = nullptr;
}

void spt_verify_options_default(spt_verify_options* o) {
  if (o == nullptr) return;
  *o = spt_verify_options{};
  spt_kernel_config_default(&o->config);
  o->seed = 42;
  o->scalar = SPT_SCALAR_INT;
}

void spt_cell_default(spt_cell* c) {
  if (c == nullptr) return;
  *c = spt_cell{};
  c->kernel = "mm";
  c->n = 4;
  c->r = 1;
  c->processors = 1;
  c->a = c->b = c->c = 1;
  c->u = c->v = c->x = 1;
}

spt_status spt_context_create(spt_scalar scalar, const spt_kernel_config* cfg, spt_context** out) {
  return guard([&] {
    require(out != nullptr, "null output pointer");
    require(scalar == SPT_SCALAR_INT || scalar == SPT_SCALAR_F64, "unknown scalar kind");
    auto ctx = std::make_unique<spt_context>();
    ctx->kind = scalar == SPT_SCALAR_INT ? spt::ScalarKind::modp : spt::ScalarKind::f64;
    if (cfg != nullptr) ctx->cfg = to_cpp(*cfg);
    *out = ctx.release();
  });
}

void spt_context_destroy(spt_context* ctx) { delete ctx; }

spt_status spt_context_set_config(spt_context* ctx, const spt_kernel_config* cfg) {
  return guard([&] {
    require(ctx != nullptr && cfg != nullptr, "null argument");
    ctx->cfg = to_cpp(*cfg);
  });
}

spt_status spt_matrix_create(spt_context* ctx, int64_t rows, int64_t cols, spt_matrix** out) {
  return guard([&] {
    require(ctx != nullptr && out != nullptr, "null argument");
    auto m = std::make_unique<spt_matrix>();
    m->ctx = ctx;
    if (ctx->kind == spt::ScalarKind::modp) {
      m->view = spt::make_matrix<ModP>(ctx->ws, rows, cols, "matrix");
    } else {
      m->view = spt::make_matrix<double>(ctx->ws, rows, cols, "matrix");
    }
    *out = m.release();
  });
}

void spt_matrix_destroy(spt_matrix* m) {
  if (m == nullptr) return;
  std::visit([&](auto& v) { m->ctx->ws.release(v.storage()->id()); }, m->view);
  delete m;
}

spt_status spt_matrix_fill_random(spt_matrix* m, uint64_t seed) {
  return guard([&] {
    require(m != nullptr, "null matrix");
    std::visit([&](auto& v) { fill(v.storage(), seed); }, m->view);
  });
}

spt_status spt_matrix_get(const spt_matrix* m, int64_t i, int64_t j, double* out) {
  return guard([&] {
    require(m != nullptr && out != nullptr, "null argument");
    std::visit(
        [&](const auto& v) {
          require(i >= 0 && i < v.rows() && j >= 0 && j < v.cols(), "index out of range");
          *out = to_double(v(i, j));
        },
        m->view);
  });
}

spt_status spt_matrix_set(spt_matrix* m, int64_t i, int64_t j, double value) {
  return guard([&] {
    require(m != nullptr, "null matrix");
    std::visit(
        [&](auto& v) {
          using T = std::remove_reference_t<decltype(v(0, 0))>;
          require(i >= 0 && i < v.rows() && j >= 0 && j < v.cols(), "index out of range");
          v(i, j) = from_double<T>(value);
        },
        m->view);
  });
}

spt_status spt_matrix_equal(const spt_matrix* a, const spt_matrix* b, int* equal) {
  return guard([&] {
    require(a != nullptr && b != nullptr && equal != nullptr, "null argument");
    require(a->view.index() == b->view.index(), "matrices hold different scalar kinds");
    std::visit(
        [&](const auto& va) {
          const auto& vb = std::get<std::decay_t<decltype(va)>>(b->view);
          bool eq = va.rows() == vb.rows() && va.cols() == vb.cols();
          for (int64_t i = 0; eq && i < va.rows(); ++i)
            for (int64_t j = 0; eq && j < va.cols(); ++j) eq = va(i, j) == vb(i, j);
          *equal = eq ? 1 : 0;
        },
        a->view);
  });
}

spt_status spt_tensor_create(spt_context* ctx, int order, int64_t side, spt_tensor** out) {
  return guard([&] {
    require(ctx != nullptr && out != nullptr, "null argument");
    auto t = std::make_unique<spt_tensor>();
    t->ctx = ctx;
    if (ctx->kind == spt::ScalarKind::modp) {
      t->view = spt::make_tensor<ModP>(ctx->ws, order, side, "tensor");
    } else {
      t->view = spt::make_tensor<double>(ctx->ws, order, side, "tensor");
    }
    *out = t.release();
  });
}

void spt_tensor_destroy(spt_tensor* t) {
  if (t == nullptr) return;
  std::visit([&](auto& v) { t->ctx->ws.release(v.storage()->id()); }, t->view);
  delete t;
}

spt_status spt_tensor_shape(const spt_tensor* t, int* order, int64_t* side) {
  return guard([&] {
    require(t != nullptr, "null tensor");
    std::visit(
        [&](const auto& v) {
          if (order != nullptr) *order = v.order();
          if (side != nullptr) *side = v.side();
        },
        t->view);
  });
}

spt_status spt_tensor_fill_random(spt_tensor* t, uint64_t seed) {
  return guard([&] {
    require(t != nullptr, "null tensor");
    std::visit([&](auto& v) { fill(v.storage(), seed); }, t->view);
  });
}

spt_status spt_tensor_get(const spt_tensor* t, const int64_t* index, double* out) {
  return guard([&] {
    require(t != nullptr && index != nullptr && out != nullptr, "null argument");
    std::visit(
        [&](const auto& v) {
          for (int a = 0; a < v.order(); ++a) require(index[a] >= 0 && index[a] < v.side(), "index out of range");
          *out = to_double(v[std::span<const int64_t>(index, static_cast<std::size_t>(v.order()))]);
        },
        t->view);
  });
}

spt_status spt_tensor_set(spt_tensor* t, const int64_t* index, double value) {
  return guard([&] {
    require(t != nullptr && index != nullptr, "null argument");
    std::visit(
        [&](auto& v) {
          for (int a = 0; a < v.order(); ++a) require(index[a] >= 0 && index[a] < v.side(), "index out of range");
          auto& cell = v[std::span<const int64_t>(index, static_cast<std::size_t>(v.order()))];
          cell = from_double<std::remove_reference_t<decltype(cell)>>(value);
        },
        t->view);
  });
}

spt_status spt_tensor_equal(const spt_tensor* a, const spt_tensor* b, int* equal) {
  return guard([&] {
    require(a != nullptr && b != nullptr && equal != nullptr, "null argument");
    require(a->view.index() == b->view.index(), "tensors hold different scalar kinds");
    std::visit(
        [&](const auto& va) {
          const auto& vb = std::get<std::decay_t<decltype(va)>>(b->view);
          bool eq = va.order() == vb.order() && va.side() == vb.side();
          const auto* da = va.storage()->data();
          const auto* db = vb.storage()->data();
          for (int64_t e = 0; eq && e < va.size(); ++e) eq = da[e] == db[e];
          *equal = eq ? 1 : 0;
        },
        a->view);
  });
}

spt_status spt_tensor_load(spt_context* ctx, const char* path, spt_tensor** out) {
  return guard([&] {
    require(ctx != nullptr && path != nullptr && out != nullptr, "null argument");
    auto t = std::make_unique<spt_tensor>();
    t->ctx = ctx;
    if (ctx->kind == spt::ScalarKind::modp) {
      t->view = spt::load_tensor<ModP>(ctx->ws, path, "tensor");
    } else {
      t->view = spt::load_tensor<double>(ctx->ws, path, "tensor");
    }
    *out = t.release();
  });
}

spt_status spt_tensor_save(const spt_tensor* t, const char* path) {
  return guard([&] {
    require(t != nullptr && path != nullptr, "null argument");
    std::visit([&](const auto& v) { spt::save_tensor(path, v); }, t->view);
  });
}

spt_status spt_mm_run(spt_context* ctx, const char* algo, spt_matrix* x, const spt_matrix* u, const spt_matrix* v,
                      int r, int64_t processors, const spt_run_options* opts, spt_metrics* metrics) {
  return guard([&] {
    require(ctx != nullptr && algo != nullptr && x != nullptr && u != nullptr && v != nullptr, "null argument");
    require(x->ctx == ctx && u->ctx == ctx && v->ctx == ctx, "operands belong to another context");
    if (ctx->kind == spt::ScalarKind::modp) {
      mm_run_typed<ModP>(ctx, algo, std::get<0>(x->view), std::get<0>(u->view), std::get<0>(v->view), r, processors,
                         opts, metrics);
    } else {
      mm_run_typed<double>(ctx, algo, std::get<1>(x->view), std::get<1>(u->view), std::get<1>(v->view), r,
                           processors, opts, metrics);
    }
  });
}

spt_status spt_tc_run(spt_context* ctx, const char* algo, spt_tensor* x, const spt_tensor* u, const spt_tensor* v,
                      const char* u_labels, const char* v_labels, int r, int flatten_row_major,
                      const spt_run_options* opts, spt_metrics* metrics) {
  return guard([&] {
    require(ctx != nullptr && algo != nullptr && x != nullptr && u != nullptr && v != nullptr, "null argument");
    require(x->ctx == ctx && u->ctx == ctx && v->ctx == ctx, "operands belong to another context");
    if (ctx->kind == spt::ScalarKind::modp) {
      const auto& tx = std::get<0>(x->view);
      const auto& tu = std::get<0>(u->view);
      const auto& tv = std::get<0>(v->view);
      tc_run_typed<ModP>(ctx, algo, tx, tu, tv, spec_for(tx.order(), tu.order(), tv.order(), u_labels, v_labels), r,
                         flatten_row_major != 0, opts, metrics);
    } else {
      const auto& tx = std::get<1>(x->view);
      const auto& tu = std::get<1>(u->view);
      const auto& tv = std::get<1>(v->view);
      tc_run_typed<double>(ctx, algo, tx, tu, tv, spec_for(tx.order(), tu.order(), tv.order(), u_labels, v_labels),
                           r, flatten_row_major != 0, opts, metrics);
    }
  });
}

spt_status spt_verify(const spt_verify_options* opts, char** csv, int* cells, int* failures) {
  return guard([&] {
    require(opts != nullptr, "null options");
    spt::VerifyOptions o;
    if (opts->kernel != nullptr) o.kernel = opts->kernel;
    o.n = opts->n;
    o.r = opts->r;
    o.processors = opts->processors;
    o.u = opts->u;
    o.v = opts->v;
    o.x = opts->x;
    if (opts->u_labels != nullptr) o.u_labels = opts->u_labels;
    if (opts->v_labels != nullptr) o.v_labels = opts->v_labels;
    o.cfg = to_cpp(opts->config);
    o.seed = opts->seed;
    o.scalar = opts->scalar == SPT_SCALAR_F64 ? spt::ScalarKind::f64 : spt::ScalarKind::modp;
    const auto results = spt::run_verify(o);
    int failed = 0;
    for (const auto& r : results) failed += r.pass() ? 0 : 1;
    if (cells != nullptr) *cells = static_cast<int>(results.size());
    if (failures != nullptr) *failures = failed;
    if (csv != nullptr) *csv = dup_string(spt::verify_csv(results));
  });
}

spt_status spt_tradeoff_csv(int64_t n, const int* rs, size_t count, int64_t cache_words, int64_t line_words,
                            const spt_kernel_config* cfg, char** csv) {
  return guard([&] {
    require(csv != nullptr && (rs != nullptr || count == 0), "null argument");
    spt::KernelConfig k;
    if (cfg != nullptr) k = to_cpp(*cfg);
    std::vector<int> list(rs, rs + count);
    *csv = dup_string(spt::tradeoff_csv(n, list, cache_words, line_words, k));
  });
}

spt_status spt_cachescan_csv(const spt_cell* cell, const int64_t* caches, size_t count, int64_t line_words,
                             const spt_kernel_config* cfg, uint64_t seed, char** csv) {
  return guard([&] {
    require(cell != nullptr && csv != nullptr && (caches != nullptr || count == 0), "null argument");
    spt::CellSpec c;
    c.kernel = cell->kernel != nullptr ? cell->kernel : "mm";
    c.n = cell->n;
    c.r = cell->r;
    c.processors = cell->processors;
    c.a = cell->a;
    c.b = cell->b;
    c.c = cell->c;
    if (cell->u_labels != nullptr || cell->v_labels != nullptr) {
      require(cell->u_labels != nullptr && cell->v_labels != nullptr, "give labels for both U and V");
      c.contraction = spt::ContractionSpec::parse(cell->u_labels, cell->v_labels);
    } else {
      c.contraction = spt::ContractionSpec::canonical(cell->u, cell->v, cell->x);
    }
    c.flatten = cell->flatten_row_major != 0 ? spt::FlattenOrder::row_major : spt::FlattenOrder::morton;
    spt::KernelConfig k;
    if (cfg != nullptr) k = to_cpp(*cfg);
    std::vector<std::int64_t> list(caches, caches + count);
    *csv = dup_string(spt::cachescan_csv(c, list, line_words, k, seed));
  });
}

spt_status spt_cachesim_file(const char* trace_path, int64_t cache_words, int64_t line_words, int64_t* misses,
                             int64_t* accesses) {
  return guard([&] {
    require(trace_path != nullptr, "null path");
    spt::CacheConfig cc;
    cc.capacity = cache_words;
    cc.line = line_words;
    cc.validate();
    const auto trace = spt::read_trace_file(trace_path);
    if (misses != nullptr) *misses = spt::simulate(trace, cc);
    if (accesses != nullptr) *accesses = static_cast<int64_t>(trace.size());
  });
}

spt_status spt_predict(const char* algo, const spt_predict_params* params, spt_prediction* out) {
  return guard([&] {
    require(algo != nullptr && params != nullptr && out != nullptr, "null argument");
    spt::PredictParams p;
    p.n = params->n;
    p.r = params->r;
    p.u = params->u;
    p.v = params->v;
    p.x = params->x;
    p.a = params->a;
    p.b = params->b;
    p.c = params->c;
    p.cache = params->cache_words;
    p.line = params->line_words;
    const spt::Prediction pr = spt::predict(spt::parse_algo(algo), p);
    *out = spt_prediction{};
    out->t1 = pr.t1;
    out->tinf = pr.tinf;
    out->sinf = pr.sinf;
    out->q1 = pr.q1;
    std::strncpy(out->note, pr.note.c_str(), sizeof out->note - 1);
  });
}

}  // extern "C"
