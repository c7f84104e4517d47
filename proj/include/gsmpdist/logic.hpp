#pragma once

#include <functional>
#include <memory>
#include <string>

#include "gsmpdist/config.hpp"
#include "gsmpdist/model.hpp"
#include "gsmpdist/trace.hpp"

namespace gsmpdist {

// Real-valued function expressions, two-sorted:
//
//   F ::= 1 | p | val | min(F, F) | clamp(a, b, F) | int G
//   G ::= L(F, t) | min(G, G) | clamp(a, b, G)
//
// F-expressions evaluate at generalized states, G-expressions on timed
// traces. clamp(a, b, x) = min(1, max(0, a*x + b)) with |a| <= 1, so every
// clamp is a 1-Lipschitz map into [0,1]; L(F, t) is the upper Lipschitz
// smoothing sup_t' { F(f(t')) - |t' - t| }; (int G) takes the k-discounted
// expectation of G over traces sampled from the state. The `val` leaf reads
// the scalar value of a piecewise-linear trace and is only meaningful in
// scalar preview mode (eval_g_scalar); model evaluation rejects it.

struct FExpr;
struct GExpr;
using FPtr = std::shared_ptr<const FExpr>;
using GPtr = std::shared_ptr<const GExpr>;

struct FExpr {
  enum class Kind { one, prop, val, min, clamp, integral };
  Kind kind = Kind::one;
  std::string prop;         // kind == prop
  double a = 1.0, b = 0.0;  // kind == clamp
  FPtr f1, f2;              // min children; clamp child in f1
  GPtr g;                   // integral body
};

struct GExpr {
  enum class Kind { smooth, min, clamp };
  Kind kind = Kind::smooth;
  double t = 0.0;           // kind == smooth: the query time of L(F, t)
  double a = 1.0, b = 0.0;  // kind == clamp
  FPtr f;                   // smooth body
  GPtr g1, g2;              // min children; clamp child in g1
};

// Constructors; each validates its node (|a| <= 1, t >= 0, non-null
// children) and throws Error on violation.
FPtr f_one();
FPtr f_prop(std::string prop);
FPtr f_val();
FPtr f_min(FPtr x, FPtr y);
FPtr f_clamp(double a, double b, FPtr x);
FPtr f_integral(GPtr g);
GPtr g_smooth(FPtr f, double t);
GPtr g_min(GPtr x, GPtr y);
GPtr g_clamp(double a, double b, GPtr x);

// S-expression text, e.g. (int (L (clamp 1 -0.3 (prop "p")) 0.5)). The bare
// atom 1 denotes the constant-one expression. parse_* throw ParseError with
// line/column positions; to_string prints the canonical round-trip form.
FPtr parse_f(const std::string& text);
GPtr parse_g(const std::string& text);
std::string to_string(const FExpr& e);
std::string to_string(const GExpr& e);

// Largest time queried by any L node; 0 for expressions without one.
double max_time(const FExpr& e);
double max_time(const GExpr& e);

// Evaluates an F-expression at a generalized state. Integrals take
// cfg.samples traces at the top level and cfg.inner_samples inside another
// integral, all on horizon cfg.horizon with graphs at cfg.grid; trace i
// always uses the random stream derived from (cfg.seed, i), so evaluations
// at two states are coupled sample-by-sample. Deterministic given cfg.seed.
// Throws HorizonTooShort when the expression queries a time beyond
// cfg.horizon, Error on a (val) leaf.
double eval_f(const FExpr& e, const GsmpModel& model, const GeneralizedState& gs,
              const RunConfig& cfg);

// Evaluates a G-expression on one trace, with F-leaves interpreted by the
// given valuation at each graph point (graphs built at the given grid). The
// sup of every L node additionally probes the exact query time, so
// L(1, t) is exactly 1 whenever t lies inside the horizon.
using PointValuation =
    std::function<double(const FExpr&, const GeneralizedState&)>;
double eval_g(const GExpr& e, const GsmpModel& model, const TimedTrace& trace,
              const PointValuation& valuation, double grid);

// Model-mode convenience: valuation = eval_f under cfg.
double eval_g(const GExpr& e, const GsmpModel& model, const TimedTrace& trace,
              const RunConfig& cfg);

// Scalar preview mode for piecewise-linear traces: F-leaves must be built
// from val / 1 / min / clamp (prop and integral throw Error).
double eval_g_scalar(const GExpr& e, const ScalarTrace& trace, double grid);

// Family search for a lower bound on the logic metric
// d(x, y) = sup_F |F(x) - F(y)|.
struct DkFamily {
  int count = 200;       // generated expressions (on top of the seeded ones)
  int max_depth = 2;     // expression tree depth of generated candidates
  int local_iters = 40;  // local-search rounds on the best candidate
  // Generated integrals never nest by default: nested integrals multiply
  // evaluation cost and rarely discriminate better at these depths. The
  // evaluator itself supports nesting either way.
  bool allow_nested = false;
};

struct DkEstimate {
  double value = 0.0;  // certified lower bound up to evaluation error
  std::string best;    // s-expression attaining it
};

// Maximizes |eval_f(e, gs1) - eval_f(e, gs2)| over a deterministic family:
// the constant, every bare proposition of the model, `count` random
// expressions, then local search over clamp coefficients and L times of the
// incumbent. A lower bound only; never an estimate of the metric itself.
DkEstimate dk_estimate(const GsmpModel& model, const GeneralizedState& gs1,
                       const GeneralizedState& gs2, const DkFamily& family,
                       const RunConfig& cfg);

}  // namespace gsmpdist
