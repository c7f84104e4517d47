#pragma once

#include <cstdint>
#include <string>

#include "gsmpdist/errors.hpp"

namespace gsmpdist {

// Every numeric tolerance used anywhere in the library, in one record.
struct Tolerances {
  double row_sum = 1e-9;     // transition row sums must match 1 this closely
  double weight_sum = 1e-9;  // discrete distribution mass check
  double tie = 1e-12;        // first-expiry uniqueness tolerance
  double dual_feas = 1e-9;   // dual witness constraint slack
  double dwell = 1e-9;       // segment dwell vs expiry-time agreement
  double merge = 1e-12;      // delay(): prefix/evolution match for merging
};

inline const Tolerances& tol() {
  static const Tolerances t;
  return t;
}

// Knobs shared by the CLI, the estimator and the logic evaluator.
// Defaults are the documented desk-scale settings.
struct RunConfig {
  double k = 0.5;          // discount, 0 < k <= 1/2
  int depth = 3;           // fixpoint iterations
  int samples = 200;       // Monte-Carlo traces per side at the top level
  double grid = 0.01;      // graph sampling step (delta_g)
  double horizon = 10.0;   // trace horizon
  std::uint64_t seed = 0;
  int jobs = 0;            // 0 -> hardware concurrency

  std::uint64_t zeno_guard = 1000000;  // max events per sampled trace
  int retry_budget = 100;              // resampling attempts on expiry ties

  // Estimator internals. Inner (recursive) levels run with fewer samples and
  // a coarser cache lattice; all of it is accounted in the reported budget.
  int inner_samples = 24;
  double deep_quantum = 0.05;    // clock quantum for recursive cache lookups
  double refine_tol = 0.02;      // target width of refined J2 intervals
  int refine_cap = 2048;         // fresh recursive evaluations per estimate
  std::uint64_t work_limit = 50000;  // recursive estimates per engine
  int bootstrap = 24;            // bootstrap resamples, top level
  int inner_bootstrap = 8;       // bootstrap resamples, recursive levels
  double horizon_factor = 2.0;   // horizon budget probe factor; 0 disables
  double cluster_eps = -1.0;     // support clustering radius; <0 -> grid

  void check() const;  // throws Error on out-of-range values
};

inline void RunConfig::check() const {
  auto fail = [](const std::string& what) { throw Error("bad config: " + what); };
  if (!(k > 0.0 && k <= 0.5)) fail("k must satisfy 0 < k <= 1/2");
  if (depth < 0) fail("depth must be >= 0");
  if (samples < 1) fail("samples must be >= 1");
  if (!(grid > 0.0)) fail("grid must be positive");
  if (!(horizon > 0.0)) fail("horizon must be positive");
  if (inner_samples < 1) fail("inner_samples must be >= 1");
  if (!(deep_quantum > 0.0)) fail("deep_quantum must be positive");
  if (!(refine_tol >= 0.0)) fail("refine_tol must be >= 0");
  if (horizon_factor != 0.0 && horizon_factor <= 1.0)
    fail("horizon_factor must be 0 (off) or > 1");
}

}  // namespace gsmpdist
