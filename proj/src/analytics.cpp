#include "spt/analytics.hpp"

#include <algorithm>
#include <cmath>

#include "spt/cache_sim.hpp"
#include "spt/engine.hpp"
#include "spt/error.hpp"
#include "spt/mm.hpp"
#include "spt/scalar.hpp"

namespace spt {

namespace {

struct AlgoName {
  Algo algo;
  const char* name;
};

constexpr AlgoName kNames[] = {
    {Algo::mm, "mm"},       {Algo::mm_hd, "mm-hd"},   {Algo::mm_opt, "mm-opt"},
    {Algo::mm_nd, "mm-nd"}, {Algo::mm_ns, "mm-ns"},   {Algo::rmm, "rmm"},
    {Algo::rmm_opt, "rmm-opt"}, {Algo::tc, "tc"},     {Algo::tc_hs, "tc-hs"},
    {Algo::tc_mm_opt, "tc-mm-opt"},
};

double lg(double v) { return v <= 1 ? 0.0 : std::log2(v); }

/// Square in-place MM recurrences.
struct MmRec {
  double m, line, alpha;

  double t1(double n) const { return n <= 1 ? 1 : 8 * t1(n / 2) + 1; }
  double tinf(double n) const { return n <= 1 ? 1 : 2 * tinf(n / 2) + 1; }
  double s(double n) const { return n <= 1 ? 1 : 4 * s(n / 2) + 1; }
  double q1(double n) const {
    if (n * n <= alpha * m || n <= 1) return n * n / line + n;
    return 8 * q1(n / 2) + 1;
  }
  /// Closed-form base bound used when a hybrid switches to in-place MM.
  double reduce_span(double n) const { return lg(n) + line; }
};

struct HybridMm {
  const MmRec& mm;
  bool dynamic;

  double t1(double n, double r) const { return r <= 1 ? mm.t1(n) : 8 * t1(n / 2, r / 2) + (dynamic ? n * n : 1); }
  double tinf(double n, double r) const {
    if (r <= 1) return mm.tinf(n);
    return tinf(n / 2, r / 2) + (dynamic ? mm.reduce_span(n) : 1);
  }
  double s(double n, double r) const { return r <= 1 ? mm.s(n) : 8 * s(n / 2, r / 2) + 1; }
  double step_q(double n) const { return dynamic ? n * n / mm.line + n : 1; }
  double qa(double n, double r) const { return r <= 1 ? mm.q1(n) : 8 * qa(n / 2, r / 2) + step_q(n); }
  double qb(double n, double r) const {
    if (r * n * n <= mm.alpha * mm.m) return r * n * n / mm.line + r * n;
    if (r <= 1) return mm.q1(n);
    return 8 * qb(n / 2, r / 2) + step_q(n);
  }
};

/// Rectangular recursion shape with the kernel's tie order (a, then b, then c).
struct RmmRec {
  double m, line;

  double t1(double a, double b, double c) const {
    if (a <= 1 && b <= 1 && c <= 1) return 1;
    if (a >= std::max(b, c)) return 2 * t1(a / 2, b, c) + 1;
    if (b >= std::max(a, c)) return 2 * t1(a, b / 2, c) + 1;
    return 2 * t1(a, b, c / 2) + 1;
  }
  /// Supersteps: a- and c-splits are parallel, b-splits sequential at r = 1.
  double steps(double a, double b, double c, double r) const {
    if (a <= 1 && b <= 1 && c <= 1) return 1;
    if (a >= std::max(b, c)) return steps(a / 2, b, c, r) + 1;
    if (b >= std::max(a, c)) return r > 1 ? steps(a, b / 2, c, r / 2) + 1 : 2 * steps(a, b / 2, c, 1) + 1;
    return steps(a, b, c / 2, r) + 1;
  }
  double q1_base(double a, double b, double c) const {
    const double abc = a * b * c;
    return abc / (line * std::sqrt(m)) + abc / m + (a * b + b * c + c * a) / line + (a + b + c);
  }
  double q1(double a, double b, double c, double r) const {
    const double bp = b / r;
    const double ap = std::min(a, bp);
    const double cp = std::min(c, bp);
    return (r * a * c / (ap * cp)) * q1_base(ap, bp, cp);
  }
};

struct TcRec {
  int u, v, x;
  double m, line, alpha;

  int w() const { return u + v + x; }
  int s() const { return std::max({u + x, v + x, u + v}); }
  double t1(double n) const { return n <= 1 ? 1 : std::pow(2.0, w()) * t1(n / 2) + 1; }
  double tinf(double n) const { return n <= 1 ? 1 : std::pow(2.0, x) * (tinf(n / 2) + (u + v)); }
  double sp(double n) const { return n <= 1 ? 1 : std::pow(2.0, u + v) * sp(n / 2) + 1; }
  double q1(double n) const {
    const double space = std::pow(n, u + x) + std::pow(n, v + x) + std::pow(n, u + v);
    if (space <= alpha * m || n <= 1) return space / line + space / n;
    return std::pow(2.0, w()) * q1(n / 2) + 1;
  }
  double hs_t1(double n, double r) const { return r <= 1 ? t1(n) : std::pow(2.0, w()) * hs_t1(n / 2, r / std::pow(2.0, x)) + 1; }
  double hs_tinf(double n, double r) const { return r <= 1 ? tinf(n) : hs_tinf(n / 2, r / std::pow(2.0, x)) + w(); }
  double hs_s(double n, double r) const { return r <= 1 ? sp(n) : std::pow(2.0, w()) * hs_s(n / 2, r / std::pow(2.0, x)) + 1; }
  double hs_q1(double n, double r) const { return r <= 1 ? q1(n) : std::pow(2.0, w()) * hs_q1(n / 2, r / std::pow(2.0, x)) + 1; }
};

/// Span of the recursive transposition / flattening of an order-d tensor.
double layout_span(double n, int d) { return n <= 1 ? 1 : layout_span(n / 2, d) + d; }

void require(bool ok, const char* what) {
  if (!ok) throw Error(Errc::invalid_argument, what);
}

}  // namespace

const char* to_string(Algo a) {
  for (const auto& e : kNames) {
    if (e.algo == a) return e.name;
  }
  return "?";
}

Algo parse_algo(const std::string& name) {
  for (const auto& e : kNames) {
    if (name == e.name) return e.algo;
  }
  throw Error(Errc::invalid_argument, "unknown algorithm '" + name + "'");
}

double Prediction::qp(double q1, double tinf, std::int64_t processors, std::int64_t cache, std::int64_t line) {
  return q1 + static_cast<double>(processors) * tinf * static_cast<double>(cache) / static_cast<double>(line);
}

Prediction predict(Algo algo, const PredictParams& p) {
  require(p.cache >= 1 && p.line >= 1 && p.line <= p.cache, "cache needs M >= B >= 1");
  Prediction out;
  out.algo = algo;
  out.params = p;
  const double m = static_cast<double>(p.cache);
  const double line = static_cast<double>(p.line);
  const MmRec mm{m, line, p.alpha};

  auto square = [&]() {
    require(is_pow2(p.n), "n must be a power of two");
    return static_cast<double>(p.n);
  };
  auto hybrid = [&](bool dynamic, double r) {
    const double n = square();
    require(r >= 1 && is_pow2(static_cast<index_t>(r)) && r <= n, "r must be a power of two in [1, n]");
    const HybridMm h{mm, dynamic};
    out.t1 = h.t1(n, r);
    out.tinf = h.tinf(n, r);
    out.sinf = h.s(n, r);
    if (r < n / std::sqrt(m)) {
      out.q1 = h.qa(n, r);
      out.note = "Q1 case A";
    } else {
      out.q1 = h.qb(n, r);
      out.note = "Q1 case B";
    }
    if (!dynamic && r > 1) {
      out.t1 += r * n * n;
      out.tinf += mm.reduce_span(n);
      out.q1 += r * n * n / line + r * n;
    }
  };

  switch (algo) {
    case Algo::mm: {
      const double n = square();
      out.t1 = mm.t1(n);
      out.tinf = mm.tinf(n);
      out.sinf = mm.s(n);
      out.q1 = mm.q1(n);
      break;
    }
    case Algo::mm_hd: hybrid(true, static_cast<double>(p.r)); break;
    case Algo::mm_opt: hybrid(false, static_cast<double>(p.r)); break;
    case Algo::mm_nd: hybrid(true, static_cast<double>(square())); break;
    case Algo::mm_ns: hybrid(false, static_cast<double>(square())); break;
    case Algo::rmm:
    case Algo::rmm_opt: {
      require(is_pow2(p.a) && is_pow2(p.b) && is_pow2(p.c), "a, b, c must be powers of two");
      const double a = static_cast<double>(p.a);
      const double b = static_cast<double>(p.b);
      const double c = static_cast<double>(p.c);
      const double r = algo == Algo::rmm ? 1.0 : static_cast<double>(p.r);
      require(r >= 1 && is_pow2(static_cast<index_t>(r)) && r <= b, "r must be a power of two in [1, b]");
      const RmmRec rr{m, line};
      out.t1 = rr.t1(a, b, c);
      out.tinf = rr.steps(a, b, c, r);
      out.sinf = r * a * c;
      out.q1 = rr.q1(a, b, c, r);
      if (r > 1) {
        out.t1 += r * a * c;
        out.tinf += lg(a * c) + line;
        out.q1 += r * a * c / line + r * (a + c);
      }
      break;
    }
    case Algo::tc:
    case Algo::tc_hs:
    case Algo::tc_mm_opt: {
      const double n = square();
      require(p.u >= 1 && p.v >= 1 && p.x >= 1, "u, v, x must be at least 1");
      const TcRec t{p.u, p.v, p.x, m, line, p.alpha};
      const double r = algo == Algo::tc ? 1.0 : static_cast<double>(p.r);
      if (algo == Algo::tc_mm_opt) {
        const double a = std::pow(n, p.u);
        const double b = std::pow(n, p.x);
        const double c = std::pow(n, p.v);
        require(r >= 1 && is_pow2(static_cast<index_t>(r)) && r <= b, "r must be a power of two in [1, n^x]");
        const RmmRec rr{m, line};
        const double su = std::pow(n, p.u + p.x);
        const double sv = std::pow(n, p.v + p.x);
        out.t1 = 2 * su + 2 * sv + rr.t1(a, b, c) + (r > 1 ? r * a * c : 0) + a * c;
        out.tinf = 2 * layout_span(n, p.u + p.x) + 2 * layout_span(n, p.v + p.x) + rr.steps(a, b, c, r) +
                   (r > 1 ? lg(a * c) + line : 0) + layout_span(n, p.u + p.v);
        out.sinf = 2 * su + 2 * sv + r * a * c + a * c;
        out.q1 = rr.q1(a, b, c, r) + (r > 1 ? r * a * c / line + r * (a + c) : 0);
        break;
      }
      require(r >= 1 && is_pow2(static_cast<index_t>(r)) && log2_floor(static_cast<std::uint64_t>(r)) % p.x == 0 &&
                  r <= std::pow(n, p.x),
              "r must be (2^x)^i with r <= n^x");
      out.t1 = t.hs_t1(n, r);
      out.tinf = t.hs_tinf(n, r);
      out.sinf = t.hs_s(n, r);
      out.q1 = t.hs_q1(n, r);
      if (r > 1) {
        const double xs = std::pow(n, p.u + p.v);
        out.t1 += r * xs;
        out.tinf += lg(xs) + line;
        out.q1 += r * xs / line + r * n;
      }
      break;
    }
  }
  return out;
}

std::vector<TradeoffRow> tradeoff_table(index_t n, const std::vector<int>& rs, std::int64_t cache, std::int64_t line,
                                        const KernelConfig& cfg) {
  CacheConfig cc;
  cc.capacity = cache;
  cc.line = line;
  cc.validate();
  KernelConfig kc = cfg;
  kc.block = line;
  std::vector<TradeoffRow> rows;
  for (int r : rs) {
    check_plane_count(n, r);
    Workspace ws;
    const Matrix<ModP> x = make_matrix<ModP>(ws, n, n, "X");
    const Matrix<ModP> u = make_matrix<ModP>(ws, n, n, "U");
    const Matrix<ModP> v = make_matrix<ModP>(ws, n, n, "V");
    Program prog = mm_opt(ws, x, u, v, r, kc);
    LruCache lru(cc);
    const ExecMetrics em = run_instrumented(prog, &lru);
    PredictParams pp;
    pp.n = n;
    pp.r = r;
    pp.cache = cache;
    pp.line = line;
    TradeoffRow row;
    row.r = r;
    row.space = static_cast<std::int64_t>(r) * n * n;
    row.predicted_span = predict(Algo::mm_opt, pp).tinf;
    row.measured_span = em.span;
    row.measured_q1 = lru.misses();
    const double nr = static_cast<double>(n) / r;
    row.regime = nr >= lg(static_cast<double>(n)) + static_cast<double>(line) ? "n/r" : "log n + B";
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace spt
