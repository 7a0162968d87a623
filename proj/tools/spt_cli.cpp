#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "spt/spt.h"

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct CsvString {
  char* text = nullptr;
  ~CsvString() { spt_string_free(text); }
};

int status_exit(spt_status s) {
  switch (s) {
    case SPT_OK: return kPass;
    case SPT_E_INVALID_ARGUMENT:
    case SPT_E_SHAPE_MISMATCH:
    case SPT_E_DEGENERATE_SPLIT:
    case SPT_E_INVALID_PLANES:
    case SPT_E_UNSUPPORTED:
    case SPT_E_CONFIG:
      return kUsage;
    default:
      return kFail;
  }
}

int report(spt_status s) {
  std::cerr << "spt: " << spt_status_string(s) << ": " << spt_last_error() << "\n";
  return status_exit(s);
}

bool emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return true;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  if (!out) {
    std::cerr << "spt: cannot write " << path << "\n";
    return false;
  }
  return true;
}

std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        fields.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.emplace_back();
    } else {
      fields.back() += ch;
    }
  }
  return fields;
}

void print_table(const std::string& csv, std::ostream& os) {
  struct Tally {
    int pass = 0, fail = 0;
    std::string first_failure;
  };
  std::map<std::string, Tally> per_kernel;
  std::vector<std::string> order;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto f = split_csv_row(line);
    if (f.size() < 10) continue;
    if (!per_kernel.count(f[0])) order.push_back(f[0]);
    Tally& t = per_kernel[f[0]];
    if (f[8] == "pass") {
      ++t.pass;
    } else {
      ++t.fail;
      if (t.first_failure.empty()) t.first_failure = f[1] + ": " + f[9];
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-12s %6s %6s  %s\n", "kernel", "pass", "fail", "result");
  os << buf;
  for (const auto& k : order) {
    const Tally& t = per_kernel[k];
    std::snprintf(buf, sizeof buf, "%-12s %6d %6d  %s\n", k.c_str(), t.pass, t.fail, t.fail == 0 ? "PASS" : "FAIL");
    os << buf;
    if (!t.first_failure.empty()) os << "  first failure: " << t.first_failure << "\n";
  }
}

spt_scalar parse_scalar(const std::string& s) { return s == "f64" ? SPT_SCALAR_F64 : SPT_SCALAR_INT; }

struct Common {
  std::int64_t n = 0;
  int r = 0;
  std::int64_t processors = 0;
  int u = 0, v = 0, x = 0;
  std::string u_axes, v_axes;
  std::uint64_t seed = 42;
  std::int64_t base = 0;
  std::int64_t block = 0;
  std::int64_t tc_base = 0;
  std::string out;
};

spt_kernel_config make_config(const Common& c, bool inject) {
  spt_kernel_config cfg;
  spt_kernel_config_default(&cfg);
  if (c.base > 0) cfg.mm_base = c.base;
  if (c.block > 0) cfg.block = c.block;
  if (c.tc_base > 0) cfg.tc_base = c.tc_base;
  cfg.inject_plane_overlap = inject ? 1 : 0;
  return cfg;
}

void add_config_flags(CLI::App* app, Common& c) {
  app->add_option("--base", c.base, "MM recursion threshold (side)")->check(CLI::PositiveNumber);
  app->add_option("--tc-base", c.tc_base, "TC recursion threshold (elements)")->check(CLI::PositiveNumber);
  app->add_option("--block", c.block, "reducer block size")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--out", c.out, "write CSV here instead of stdout");
}

void add_shape_flags(CLI::App* app, Common& c) {
  app->add_option("--n", c.n, "side length")->check(CLI::PositiveNumber);
  app->add_option("--r", c.r, "plane count")->check(CLI::PositiveNumber);
  app->add_option("--p", c.processors, "processor budget for mm-tradeoff")->check(CLI::PositiveNumber);
  app->add_option("--u", c.u, "free axes of U")->check(CLI::PositiveNumber);
  app->add_option("--v", c.v, "free axes of V")->check(CLI::PositiveNumber);
  app->add_option("--x", c.x, "contracted axes")->check(CLI::PositiveNumber);
  app->add_option("--u-axes", c.u_axes, "U axis labels, e.g. i1,k1,i2,k2");
  app->add_option("--v-axes", c.v_axes, "V axis labels, e.g. j1,j2,k2,k1");
}

int cmd_verify(const std::string& kernel, bool all, bool inject, const std::string& scalar, const Common& c) {
  spt_verify_options o;
  spt_verify_options_default(&o);
  o.kernel = all || kernel.empty() ? "all" : kernel.c_str();
  o.n = c.n;
  o.r = c.r;
  o.processors = c.processors;
  o.u = c.u;
  o.v = c.v;
  o.x = c.x;
  o.u_labels = c.u_axes.empty() ? nullptr : c.u_axes.c_str();
  o.v_labels = c.v_axes.empty() ? nullptr : c.v_axes.c_str();
  o.config = make_config(c, inject);
  o.seed = c.seed;
  o.scalar = parse_scalar(scalar);
  CsvString csv;
  int cells = 0, failures = 0;
  const spt_status s = spt_verify(&o, &csv.text, &cells, &failures);
  if (s != SPT_OK) return report(s);
  if (c.out.empty()) {
    std::cout << csv.text;
    print_table(csv.text, std::cerr);
  } else {
    if (!emit(csv.text, c.out)) return kFail;
    print_table(csv.text, std::cout);
  }
  if (cells == 0) {
    std::cerr << "spt: selector matched no cells\n";
    return kUsage;
  }
  return failures == 0 ? kPass : kFail;
}

int cmd_tradeoff(const Common& c, const std::vector<int>& rs, std::int64_t cache, std::int64_t line) {
  spt_kernel_config cfg = make_config(c, false);
  if (c.base == 0) cfg.mm_base = 1;  // span sweep: recurse to unit blocks unless told otherwise
  std::vector<int> sweep = rs;
  if (sweep.empty()) {
    for (std::int64_t r = 1; r <= c.n; r *= 2) sweep.push_back(static_cast<int>(r));
  }
  CsvString csv;
  const spt_status s = spt_tradeoff_csv(c.n, sweep.data(), sweep.size(), cache, line, &cfg, &csv.text);
  if (s != SPT_OK) return report(s);
  return emit(csv.text, c.out) ? kPass : kFail;
}

spt_cell make_cell(const std::string& kernel, const Common& c, std::int64_t a, std::int64_t b, std::int64_t cc,
                   bool row_major) {
  spt_cell cell;
  spt_cell_default(&cell);
  cell.kernel = kernel.c_str();
  if (c.n > 0) cell.n = c.n;
  if (c.r > 0) cell.r = c.r;
  if (c.processors > 0) cell.processors = c.processors;
  cell.a = a;
  cell.b = b;
  cell.c = cc;
  if (c.u > 0) cell.u = c.u;
  if (c.v > 0) cell.v = c.v;
  if (c.x > 0) cell.x = c.x;
  cell.u_labels = c.u_axes.empty() ? nullptr : c.u_axes.c_str();
  cell.v_labels = c.v_axes.empty() ? nullptr : c.v_axes.c_str();
  cell.flatten_row_major = row_major ? 1 : 0;
  return cell;
}

int cmd_cachescan(const std::string& kernel, const Common& c, const std::vector<std::int64_t>& caches,
                  std::int64_t line, std::int64_t a, std::int64_t b, std::int64_t cc, bool row_major) {
  const spt_kernel_config cfg = make_config(c, false);
  const spt_cell cell = make_cell(kernel, c, a, b, cc, row_major);
  CsvString csv;
  const spt_status s = spt_cachescan_csv(&cell, caches.data(), caches.size(), line, &cfg, c.seed, &csv.text);
  if (s != SPT_OK) return report(s);
  return emit(csv.text, c.out) ? kPass : kFail;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_predict(const std::string& algo, const Common& c, std::int64_t cache, std::int64_t line, std::int64_t a,
                std::int64_t b, std::int64_t cc) {
  spt_predict_params p{};
  p.n = c.n > 0 ? c.n : 8;
  p.r = c.r > 0 ? c.r : 1;
  p.u = c.u > 0 ? c.u : 1;
  p.v = c.v > 0 ? c.v : 1;
  p.x = c.x > 0 ? c.x : 1;
  p.a = a;
  p.b = b;
  p.c = cc;
  p.cache_words = cache;
  p.line_words = line;
  spt_prediction out;
  const spt_status s = spt_predict(algo.c_str(), &p, &out);
  if (s != SPT_OK) return report(s);
  std::string text = "algo,n,r,t1,tinf,sinf,q1,note\n";
  text += algo + "," + std::to_string(p.n) + "," + std::to_string(p.r) + "," + fmt_double(out.t1) + "," +
          fmt_double(out.tinf) + "," + fmt_double(out.sinf) + "," + fmt_double(out.q1) + "," + out.note + "\n";
  return emit(text, c.out) ? kPass : kFail;
}

struct Context {
  spt_context* ctx = nullptr;
  ~Context() { spt_context_destroy(ctx); }
};

int cmd_bench(const std::string& kernel, const std::string& scalar, const Common& c, int threads, int repeats,
              std::int64_t a, std::int64_t b, std::int64_t cc, bool row_major) {
  const spt_kernel_config cfg = make_config(c, false);
  Context context;
  spt_status s = spt_context_create(parse_scalar(scalar), &cfg, &context.ctx);
  if (s != SPT_OK) return report(s);
  spt_run_options opts;
  spt_run_options_default(&opts);
  opts.mode = SPT_EXEC_PARALLEL;
  opts.threads = threads;
  const std::int64_t n = c.n > 0 ? c.n : 64;
  const int r = c.r > 0 ? c.r : 1;
  const bool is_tc = kernel.rfind("tc", 0) == 0;
  std::string text = "kernel,n,r,threads,repeat,work,span,peak_space,madds,planes,seconds\n";
  for (int rep = 0; rep < repeats; ++rep) {
    spt_metrics m{};
    if (is_tc) {
      const int u = c.u > 0 ? c.u : 1, v = c.v > 0 ? c.v : 1, x = c.x > 0 ? c.x : 1;
      spt_tensor *tx = nullptr, *tu = nullptr, *tv = nullptr;
      s = spt_tensor_create(context.ctx, u + v, n, &tx);
      if (s == SPT_OK) s = spt_tensor_create(context.ctx, u + x, n, &tu);
      if (s == SPT_OK) s = spt_tensor_create(context.ctx, v + x, n, &tv);
      if (s == SPT_OK) s = spt_tensor_fill_random(tu, c.seed);
      if (s == SPT_OK) s = spt_tensor_fill_random(tv, c.seed + 1);
      if (s == SPT_OK) {
        s = spt_tc_run(context.ctx, kernel.c_str(), tx, tu, tv, c.u_axes.empty() ? nullptr : c.u_axes.c_str(),
                       c.v_axes.empty() ? nullptr : c.v_axes.c_str(), r, row_major ? 1 : 0, &opts, &m);
      }
      spt_tensor_destroy(tx);
      spt_tensor_destroy(tu);
      spt_tensor_destroy(tv);
    } else {
      const bool rect = kernel.rfind("rmm", 0) == 0;
      const std::int64_t rows = rect ? a : n, inner = rect ? b : n, cols = rect ? cc : n;
      spt_matrix *mx = nullptr, *mu = nullptr, *mv = nullptr;
      s = spt_matrix_create(context.ctx, rows, cols, &mx);
      if (s == SPT_OK) s = spt_matrix_create(context.ctx, rows, inner, &mu);
      if (s == SPT_OK) s = spt_matrix_create(context.ctx, inner, cols, &mv);
      if (s == SPT_OK) s = spt_matrix_fill_random(mu, c.seed);
      if (s == SPT_OK) s = spt_matrix_fill_random(mv, c.seed + 1);
      if (s == SPT_OK) {
        s = spt_mm_run(context.ctx, kernel.c_str(), mx, mu, mv, r, c.processors > 0 ? c.processors : 1, &opts, &m);
      }
      spt_matrix_destroy(mx);
      spt_matrix_destroy(mu);
      spt_matrix_destroy(mv);
    }
    if (s != SPT_OK) return report(s);
    text += kernel + "," + std::to_string(n) + "," + std::to_string(m.planes) + "," + std::to_string(threads) + "," +
            std::to_string(rep) + "," + std::to_string(m.work) + "," + std::to_string(m.span) + "," +
            std::to_string(m.peak_space) + "," + std::to_string(m.madds) + "," + std::to_string(m.planes) + "," +
            fmt_double(m.seconds) + "\n";
  }
  return emit(text, c.out) ? kPass : kFail;
}

int cmd_cachesim(const std::string& path, std::int64_t cache, std::int64_t line) {
  std::int64_t misses = 0, accesses = 0;
  const spt_status s = spt_cachesim_file(path.c_str(), cache, line, &misses, &accesses);
  if (s != SPT_OK) return report(s);
  std::cout << "M,B,accesses,q1\n" << cache << "," << line << "," << accesses << "," << misses << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"space, span and cache trade-offs for matrix multiplication and tensor contraction"};
  app.require_subcommand(1);

  Common common;
  std::string kernel;
  std::string scalar;
  bool all = false;
  bool inject = false;
  std::vector<int> rs;
  std::vector<std::int64_t> caches;
  std::int64_t cache = 1024;
  std::int64_t line = 8;
  std::int64_t a = 4, b = 4, cc = 4;
  bool row_major = false;
  int threads = 1;
  int repeats = 1;
  std::string trace;

  auto* verify = app.add_subcommand("verify", "check kernels against the loop oracle and for races");
  verify->add_option("kernel", kernel, "kernel name (default: all)");
  verify->add_flag("--all", all, "run the full grid");
  verify->add_flag("--inject-fault", inject, "overlap sibling plane ranges (must be reported as a race)");
  verify->add_option("--scalar", scalar, "int or f64")->check(CLI::IsMember({"int", "f64"}))->default_str("int");
  add_shape_flags(verify, common);
  add_config_flags(verify, common);

  auto* tradeoff = app.add_subcommand("tradeoff", "space/span/cache table for mm-opt over plane counts");
  tradeoff->add_option("--n", common.n, "side length")->required()->check(CLI::PositiveNumber);
  tradeoff->add_option("--r", rs, "plane counts (default: powers of two up to n)")->delimiter(',');
  tradeoff->add_option("--M", cache, "cache words");
  tradeoff->add_option("--B", line, "line words");
  add_config_flags(tradeoff, common);

  auto* cachescan = app.add_subcommand("cachescan", "simulated cache misses of one kernel across cache sizes");
  cachescan->add_option("kernel", kernel, "kernel name")->required();
  add_shape_flags(cachescan, common);
  cachescan->add_option("--M", caches, "cache sizes in words")->delimiter(',')->required();
  cachescan->add_option("--B", line, "line words");
  cachescan->add_option("--a", a, "rmm rows");
  cachescan->add_option("--b", b, "rmm inner dimension");
  cachescan->add_option("--c", cc, "rmm columns");
  cachescan->add_flag("--row-major", row_major, "flatten row-major instead of Morton");
  add_config_flags(cachescan, common);

  auto* predict = app.add_subcommand("predict", "closed-form work, span, space and cache predictions");
  predict->add_option("algo", kernel, "algorithm name")->required();
  add_shape_flags(predict, common);
  predict->add_option("--M", cache, "cache words");
  predict->add_option("--B", line, "line words");
  predict->add_option("--a", a, "rmm rows");
  predict->add_option("--b", b, "rmm inner dimension");
  predict->add_option("--c", cc, "rmm columns");
  add_config_flags(predict, common);

  auto* bench = app.add_subcommand("bench", "time one kernel on the parallel runtime");
  bench->add_option("kernel", kernel, "kernel name")->required();
  bench->add_option("--scalar", scalar, "int or f64")->check(CLI::IsMember({"int", "f64"}))->default_str("f64");
  bench->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--repeat", repeats, "repetitions")->check(CLI::PositiveNumber);
  bench->add_option("--a", a, "rmm rows");
  bench->add_option("--b", b, "rmm inner dimension");
  bench->add_option("--c", cc, "rmm columns");
  bench->add_flag("--row-major", row_major, "flatten row-major instead of Morton");
  add_shape_flags(bench, common);
  add_config_flags(bench, common);

  auto* cachesim = app.add_subcommand("cachesim", "replay a recorded access trace through the LRU cache");
  cachesim->add_option("trace", trace, "trace file")->required()->check(CLI::ExistingFile);
  cachesim->add_option("--M", cache, "cache words");
  cachesim->add_option("--B", line, "line words");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }

  if (verify->parsed()) {
    return cmd_verify(kernel, all, inject, scalar.empty() ? "int" : scalar, common);
  }
  if (tradeoff->parsed()) return cmd_tradeoff(common, rs, cache, line);
  if (cachescan->parsed()) return cmd_cachescan(kernel, common, caches, line, a, b, cc, row_major);
  if (predict->parsed()) return cmd_predict(kernel, common, cache, line, a, b, cc);
  if (bench->parsed()) return cmd_bench(kernel, scalar.empty() ? "f64" : scalar, common, threads, repeats, a, b, cc,
                                        row_major);
  if (cachesim->parsed()) return cmd_cachesim(trace, cache, line);
  return kUsage;
}
