#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spt/config.hpp"
#include "spt/contraction.hpp"
#include "spt/layout.hpp"
#include "spt/scalar.hpp"

namespace spt {

/// One concrete kernel invocation.
struct CellSpec {
  /// mm, mm-hd, mm-opt, mm-nd, mm-ns, mm-tradeoff, rmm, rmm-opt, tc, tc-hs, tc-mm-opt
  std::string kernel = "mm";
  index_t n = 4;
  int r = 1;
  std::int64_t processors = 1;  // mm-tradeoff only
  index_t a = 1, b = 1, c = 1;  // rmm family only
  ContractionSpec contraction = ContractionSpec::canonical(1, 1, 1);
  FlattenOrder flatten = FlattenOrder::morton;

  /// Short human readable shape, e.g. "n=8 r=4" or "u=2 v=1 x=1 n=4 r=2".
  std::string describe() const;
};

const std::vector<std::string>& verify_kernels();

struct CellResult {
  CellSpec cell;
  bool oracle = false;
  bool race = false;
  bool work = false;
  std::int64_t madds = 0;
  std::int64_t span = 0;
  std::int64_t peak_space = 0;
  std::string detail;

  bool pass() const { return oracle && race && work; }
};

/// Builds the cell on random operands, runs it serially, compares against
/// the loop oracle, checks race freedom and the multiply-add count.
CellResult run_cell(const CellSpec& cell, const KernelConfig& cfg, std::uint64_t seed, ScalarKind scalar);

struct VerifyOptions {
  std::string kernel;  // empty: every kernel
  index_t n = 0;       // 0: the kernel's full grid of sides
  int r = 0;           // 0: every legal r
  std::int64_t processors = 0;
  int u = 0, v = 0, x = 0;  // 0: every tested (u, v, x)
  std::string u_labels, v_labels;
  KernelConfig cfg;
  std::uint64_t seed = 42;
  ScalarKind scalar = ScalarKind::modp;
};

/// Expands the options into the cells of the verification grid.
std::vector<CellSpec> verify_grid(const VerifyOptions& opts);
std::vector<CellResult> run_verify(const VerifyOptions& opts);
std::string verify_csv(const std::vector<CellResult>& results);

std::string tradeoff_csv(index_t n, const std::vector<int>& rs, std::int64_t cache, std::int64_t line,
                         const KernelConfig& cfg);

/// Simulated serial cache misses of one cell per cache size.
std::string cachescan_csv(const CellSpec& cell, const std::vector<std::int64_t>& caches, std::int64_t line,
                          const KernelConfig& cfg, std::uint64_t seed);

/// Shortest round-trip decimal form, stable across runs.
std::string format_number(double v);

}  // namespace spt
