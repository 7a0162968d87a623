#include "spt/suites.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <memory>
#include <set>
#include <sstream>

#include "spt/analytics.hpp"
#include "spt/cache_sim.hpp"
#include "spt/engine.hpp"
#include "spt/error.hpp"
#include "spt/mm.hpp"
#include "spt/random.hpp"
#include "spt/rmm.hpp"
#include "spt/tc.hpp"

namespace spt {

namespace {

constexpr double kF64Tolerance = 1e-9;

template <class T>
bool same(const T& got, const T& want) {
  if constexpr (std::is_same_v<T, double>) {
    return std::fabs(got - want) <= kF64Tolerance * std::max(1.0, std::fabs(want));
  } else {
    return got == want;
  }
}

template <class T>
std::string show(const T& v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

template <class T>
std::string compare_matrices(const Matrix<T>& got, const Matrix<T>& want) {
  for (index_t i = 0; i < want.rows(); ++i) {
    for (index_t j = 0; j < want.cols(); ++j) {
      if (!same(got(i, j), want(i, j))) {
        return "X(" + std::to_string(i) + " " + std::to_string(j) + ") = " + show(got(i, j)) + " expected " +
               show(want(i, j));
      }
    }
  }
  return {};
}

template <class T>
std::string compare_tensors(const Tensor<T>& got, const Tensor<T>& want) {
  const T* g = got.storage()->data();
  const T* w = want.storage()->data();
  for (index_t e = 0; e < want.size(); ++e) {
    if (!same(g[e], w[e])) return "X[" + std::to_string(e) + "] = " + show(g[e]) + " expected " + show(w[e]);
  }
  return {};
}

template <class T>
struct Built {
  Workspace ws;
  Program program;
  std::function<std::string()> compare;
  std::int64_t expected_madds = 0;
};

bool is_mm_square(const std::string& k) {
  return k == "mm" || k == "mm-hd" || k == "mm-opt" || k == "mm-nd" || k == "mm-ns" || k == "mm-tradeoff";
}
bool is_rmm(const std::string& k) { return k == "rmm" || k == "rmm-opt"; }
bool is_tc(const std::string& k) { return k == "tc" || k == "tc-hs" || k == "tc-mm-opt"; }

template <class T>
std::unique_ptr<Built<T>> build(const CellSpec& cell, const KernelConfig& cfg, Rng& rng) {
  auto out = std::make_unique<Built<T>>();
  Workspace& ws = out->ws;
  const std::string& k = cell.kernel;
  if (is_mm_square(k) || is_rmm(k)) {
    const index_t a = is_rmm(k) ? cell.a : cell.n;
    const index_t b = is_rmm(k) ? cell.b : cell.n;
    const index_t c = is_rmm(k) ? cell.c : cell.n;
    const Matrix<T> u = make_matrix<T>(ws, a, b, "U");
    const Matrix<T> v = make_matrix<T>(ws, b, c, "V");
    const Matrix<T> x = make_matrix<T>(ws, a, c, "X");
    const Matrix<T> want = make_matrix<T>(ws, a, c, "oracle");
    fill_random(*u.storage(), rng);
    fill_random(*v.storage(), rng);
    fill_random(*x.storage(), rng);
    mm_loop(want, u, v);
    if (k == "mm") {
      out->program = mm_program(x, u, v, cfg);
    } else if (k == "mm-hd") {
      out->program = mm_hd(ws, x, u, v, cell.r, cfg);
    } else if (k == "mm-opt") {
      out->program = mm_opt(ws, x, u, v, cell.r, cfg);
    } else if (k == "mm-nd") {
      out->program = mm_nd(ws, x, u, v, cfg);
    } else if (k == "mm-ns") {
      out->program = mm_ns(ws, x, u, v, cfg);
    } else if (k == "mm-tradeoff") {
      out->program = mm_tradeoff(ws, x, u, v, cell.processors, cfg);
    } else if (k == "rmm") {
      out->program.root = rmm(x, u, v, cfg);
      out->program.zero_on_entry = {x.storage()};
      out->program.resident_space = x.size();
    } else {
      out->program = rmm_opt(ws, x, u, v, cell.r, cfg);
    }
    out->compare = [x, want]() { return compare_matrices(x, want); };
    out->expected_madds = a * b * c;
    return out;
  }
  if (is_tc(k)) {
    const ContractionSpec& s = cell.contraction;
    s.validate();
    const Tensor<T> u = make_tensor<T>(ws, s.u + s.x, cell.n, "U");
    const Tensor<T> v = make_tensor<T>(ws, s.v + s.x, cell.n, "V");
    const Tensor<T> x = make_tensor<T>(ws, s.u + s.v, cell.n, "X");
    const Tensor<T> want = make_tensor<T>(ws, s.u + s.v, cell.n, "oracle");
    fill_random(*u.storage(), rng);
    fill_random(*v.storage(), rng);
    fill_random(*x.storage(), rng);
    tc_loop(want, u, v, s);
    if (k == "tc") {
      out->program = tc_program(x, u, v, s, cfg);
    } else if (k == "tc-hs") {
      out->program = tc_hs(ws, x, u, v, s, cell.r, cfg);
    } else {
      out->program = tc_mm_opt(ws, x, u, v, s, cell.r, cfg, cell.flatten);
    }
    out->compare = [x, want]() { return compare_tensors(x, want); };
    out->expected_madds = ipow(cell.n, s.w());
    return out;
  }
  throw Error(Errc::invalid_argument, "unknown kernel '" + k + "'");
}

template <class T>
CellResult run_cell_typed(const CellSpec& cell, const KernelConfig& cfg, std::uint64_t seed) {
  CellResult res;
  res.cell = cell;
  Rng rng(seed);
  try {
    auto built = build<T>(cell, cfg, rng);
    const RaceReport race = check_race_freedom(built->program, &built->ws);
    res.race = race.ok();
    const ExecMetrics m = run_instrumented(built->program);
    res.madds = m.madds;
    res.span = m.span;
    res.peak_space = m.peak_space;
    res.work = m.madds == built->expected_madds;
    const std::string mismatch = built->compare();
    res.oracle = mismatch.empty();
    if (!race.ok()) {
      res.detail = race.violation->describe();
    } else if (!res.oracle) {
      res.detail = mismatch;
    } else if (!res.work) {
      res.detail = "multiply-adds " + std::to_string(m.madds) + " expected " + std::to_string(built->expected_madds);
    }
  } catch (const Error& e) {
    res.detail = std::string(to_string(e.code())) + ": " + e.what();
  }
  return res;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::vector<index_t> sides(const VerifyOptions& o, std::vector<index_t> fallback) {
  if (o.n > 0) return {o.n};
  return fallback;
}

// An explicit r must be a power of two; sizes it does not fit are skipped.
std::vector<int> pow2_upto(std::int64_t limit, int only) {
  if (only > 0) {
    if (!is_pow2(only)) throw Error(Errc::invalid_planes, "plane count must be a power of two");
    if (only > limit) return {};
    return {only};
  }
  std::vector<int> out;
  for (std::int64_t r = 1; r <= limit; r *= 2) out.push_back(static_cast<int>(r));
  return out;
}

std::vector<ContractionSpec> contraction_grid(const VerifyOptions& o) {
  if (!o.u_labels.empty() || !o.v_labels.empty()) return {ContractionSpec::parse(o.u_labels, o.v_labels)};
  if (o.u > 0 || o.v > 0 || o.x > 0) {
    return {ContractionSpec::canonical(std::max(o.u, 1), std::max(o.v, 1), std::max(o.x, 1))};
  }
  return {ContractionSpec::canonical(1, 1, 1), ContractionSpec::canonical(1, 1, 2), ContractionSpec::canonical(2, 1, 1),
          ContractionSpec::canonical(1, 2, 1), ContractionSpec::canonical(2, 2, 2),
          ContractionSpec::parse("i1,k1,i2,k2", "j1,j2,k2,k1")};
}

bool canonical_layout(const ContractionSpec& s) {
  const ContractionSpec c = ContractionSpec::canonical(s.u, s.v, s.x);
  return c.u_axes == s.u_axes && c.v_axes == s.v_axes;
}

}  // namespace

std::string CellSpec::describe() const {
  std::ostringstream os;
  if (is_rmm(kernel)) {
    os << "a=" << a << " b=" << b << " c=" << c << " r=" << r;
  } else if (is_tc(kernel)) {
    os << "u=" << contraction.u << " v=" << contraction.v << " x=" << contraction.x;
    if (!canonical_layout(contraction)) {
      os << " U=(";
      for (std::size_t i = 0; i < contraction.u_axes.size(); ++i) os << (i ? " " : "") << to_string(contraction.u_axes[i]);
      os << ") V=(";
      for (std::size_t i = 0; i < contraction.v_axes.size(); ++i) os << (i ? " " : "") << to_string(contraction.v_axes[i]);
      os << ")";
    }
    os << " n=" << n << " r=" << r;
    if (kernel == "tc-mm-opt" && flatten == FlattenOrder::row_major) os << " row-major";
  } else if (kernel == "mm-tradeoff") {
    os << "n=" << n << " p=" << processors;
  } else {
    os << "n=" << n << " r=" << r;
  }
  return os.str();
}

const std::vector<std::string>& verify_kernels() {
  static const std::vector<std::string> k = {"mm",  "mm-hd",   "mm-opt", "mm-nd", "mm-ns",    "mm-tradeoff",
                                             "rmm", "rmm-opt", "tc",     "tc-hs", "tc-mm-opt"};
  return k;
}

CellResult run_cell(const CellSpec& cell, const KernelConfig& cfg, std::uint64_t seed, ScalarKind scalar) {
  return scalar == ScalarKind::modp ? run_cell_typed<ModP>(cell, cfg, seed) : run_cell_typed<double>(cell, cfg, seed);
}

std::vector<CellSpec> verify_grid(const VerifyOptions& o) {
  std::vector<std::string> kernels;
  if (o.kernel.empty() || o.kernel == "all") {
    kernels = verify_kernels();
  } else {
    const auto& known = verify_kernels();
    if (std::find(known.begin(), known.end(), o.kernel) == known.end()) {
      throw Error(Errc::invalid_argument, "unknown kernel '" + o.kernel + "'");
    }
    kernels = {o.kernel};
  }
  std::vector<CellSpec> cells;
  for (const std::string& k : kernels) {
    CellSpec base;
    base.kernel = k;
    if (is_mm_square(k)) {
      for (index_t n : sides(o, {2, 4, 8, 16, 32})) {
        base.n = n;
        if (k == "mm") {
          base.r = 1;
          cells.push_back(base);
        } else if (k == "mm-nd" || k == "mm-ns") {
          base.r = static_cast<int>(n);
          cells.push_back(base);
        } else if (k == "mm-tradeoff") {
          std::set<std::int64_t> ps;
          if (o.processors > 0) {
            ps.insert(o.processors);
          } else {
            ps = {1, n * n, n * n + 1, 3 * n * n, n * n * n};
          }
          for (std::int64_t p : ps) {
            base.processors = p;
            base.r = mm_tradeoff_choice(n, p).planes;
            cells.push_back(base);
          }
        } else {
          for (int r : pow2_upto(n, o.r)) {
            base.r = r;
            cells.push_back(base);
          }
        }
      }
    } else if (is_rmm(k)) {
      for (index_t a : {1, 2, 4, 8}) {
        for (index_t b : {1, 2, 4, 8}) {
          for (index_t c : {1, 2, 4, 8}) {
            base.a = a;
            base.b = b;
            base.c = c;
            if (k == "rmm") {
              base.r = 1;
              cells.push_back(base);
              continue;
            }
            for (int r : pow2_upto(b, o.r)) {
              base.r = r;
              cells.push_back(base);
            }
          }
        }
      }
    } else {
      for (const ContractionSpec& s : contraction_grid(o)) {
        base.contraction = s;
        for (index_t n : sides(o, {2, 4})) {
          base.n = n;
          const std::int64_t nx = ipow(n, s.x);
          if (k == "tc") {
            base.r = 1;
            cells.push_back(base);
          } else if (k == "tc-hs") {
            if (o.r > 0) {
              if (!is_pow2(o.r) || log2_floor(static_cast<std::uint64_t>(o.r)) % s.x != 0) {
                throw Error(Errc::invalid_planes, "instance count must be a power of 2^x");
              }
              if (o.r <= nx) {
                base.r = o.r;
                cells.push_back(base);
              }
              continue;
            }
            for (std::int64_t r = 1; r <= nx; r *= ipow(2, s.x)) {
              base.r = static_cast<int>(r);
              cells.push_back(base);
            }
          } else {
            for (int r : pow2_upto(nx, o.r)) {
              base.r = r;
              cells.push_back(base);
            }
          }
        }
      }
    }
  }
  return cells;
}

std::vector<CellResult> run_verify(const VerifyOptions& o) {
  std::vector<CellResult> out;
  const auto cells = verify_grid(o);
  out.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    out.push_back(run_cell(cells[i], o.cfg, o.seed + i, o.scalar));
  }
  return out;
}

std::string verify_csv(const std::vector<CellResult>& results) {
  std::ostringstream os;
  os << "kernel,shape,oracle,race,work,madds,span,peak_space,result,detail\n";
  auto pf = [](bool b) { return b ? "pass" : "fail"; };
  for (const CellResult& r : results) {
    os << csv_field(r.cell.kernel) << ',' << csv_field(r.cell.describe()) << ',' << pf(r.oracle) << ','
       << pf(r.race) << ',' << pf(r.work) << ',' << r.madds << ',' << r.span << ',' << r.peak_space << ','
       << pf(r.pass()) << ',' << csv_field(r.detail) << '\n';
  }
  return os.str();
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string tradeoff_csv(index_t n, const std::vector<int>& rs, std::int64_t cache, std::int64_t line,
                         const KernelConfig& cfg) {
  std::ostringstream os;
  os << "r,space,predicted_span,measured_span,measured_q1,regime\n";
  for (const TradeoffRow& row : tradeoff_table(n, rs, cache, line, cfg)) {
    os << row.r << ',' << row.space << ',' << format_number(row.predicted_span) << ',' << row.measured_span << ','
       << row.measured_q1 << ',' << csv_field(row.regime) << '\n';
  }
  return os.str();
}

std::string cachescan_csv(const CellSpec& cell, const std::vector<std::int64_t>& caches, std::int64_t line,
                          const KernelConfig& cfg, std::uint64_t seed) {
  for (std::int64_t m : caches) {
    CacheConfig cc;
    cc.capacity = m;
    cc.line = line;
    cc.validate();
  }
  Rng rng(seed);
  auto built = build<ModP>(cell, cfg, rng);
  TraceRecorder rec;
  run_instrumented(built->program, &rec);
  const std::int64_t cold = distinct_lines(rec.trace(), line);
  std::ostringstream os;
  os << "kernel,shape,M,B,q1,accesses,distinct_lines\n";
  for (std::int64_t m : caches) {
    CacheConfig cc;
    cc.capacity = m;
    cc.line = line;
    os << csv_field(cell.kernel) << ',' << csv_field(cell.describe()) << ',' << m << ',' << line << ','
       << simulate(rec.trace(), cc) << ',' << rec.trace().size() << ',' << cold << '\n';
  }
  return os.str();
}

}  // namespace spt
