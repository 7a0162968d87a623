#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spt/config.hpp"

namespace spt {

enum class Algo : std::uint8_t { mm, mm_hd, mm_opt, mm_nd, mm_ns, rmm, rmm_opt, tc, tc_hs, tc_mm_opt };

const char* to_string(Algo a);
/// Accepts the names printed by to_string ("mm-opt", "tc-hs", ...).
Algo parse_algo(const std::string& name);

struct PredictParams {
  index_t n = 8;
  std::int64_t r = 1;
  int u = 1, v = 1, x = 1;
  index_t a = 1, b = 1, c = 1;
  std::int64_t cache = 1024;  // M
  std::int64_t line = 8;      // B
  double alpha = 1.0;
};

/// Recurrences evaluated numerically with every hidden constant set to 1.
struct Prediction {
  Algo algo = Algo::mm;
  PredictParams params;
  double t1 = 0;
  double tinf = 0;
  double sinf = 0;
  double q1 = 0;
  /// Which cache-recurrence branch was taken, e.g. "Q1 case A".
  std::string note;

  /// Parallel cache bound from measured (or predicted) Q1 and span.
  static double qp(double q1, double tinf, std::int64_t processors, std::int64_t cache, std::int64_t line);
};

/// Throws Error(invalid_argument) for parameters the algorithm does not accept.
Prediction predict(Algo algo, const PredictParams& params);

struct TradeoffRow {
  int r = 1;
  std::int64_t space = 0;
  double predicted_span = 0;
  std::int64_t measured_span = 0;
  std::int64_t measured_q1 = 0;
  /// Dominant span term: "n/r" or "log n + B".
  std::string regime;
};

/// One MM-OPT run per r (integer mode, engine-measured span, simulated Q1).
std::vector<TradeoffRow> tradeoff_table(index_t n, const std::vector<int>& rs, std::int64_t cache, std::int64_t line,
                                        const KernelConfig& cfg = {});

}  // namespace spt
