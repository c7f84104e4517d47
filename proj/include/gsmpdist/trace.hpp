#pragma once

#include <cstdint>
#include <vector>

#include "gsmpdist/model.hpp"

namespace gsmpdist {

// One maximal constant-state stretch. `evolve` is true for genuine GSMP
// segments (clocks run down within the segment); delay() prefixes may freeze
// the state instead, which is still a cadlag path into generalized states.
struct TraceSegment {
  GeneralizedState start;
  double dwell = 0.0;
  bool evolve = true;
};

struct TimedTrace {
  std::vector<TraceSegment> segments;
  double horizon = 0.0;
};

// Simulates from gs0 until the horizon. The last segment is truncated at the
// horizon; every earlier dwell equals its segment's first-expiry time.
TimedTrace sample_trace(const GsmpModel& model, const GeneralizedState& gs0,
                        double horizon, Rng& rng,
                        std::uint64_t zeno_guard = 1000000, int retry_budget = 100);

// f(t) for t in [0, horizon): the segment state advanced by (t - segment
// start). Right-continuous at jumps. Throws OutOfHorizon outside the domain.
GeneralizedState trace_at(const GsmpModel& model, const TimedTrace& trace, double t);

// Interior segment boundaries, in increasing order.
std::vector<double> jump_times(const TimedTrace& trace);

struct DelayPrefix {
  enum class Kind {
    constant,     // u(t) = f(0), clocks frozen
    clock_linear  // u(t) runs clocks down into f(0): u(r) = f(0)
  };
  Kind kind = Kind::constant;
};

// Shifts the trace right by r and fills [0, r) with the prefix. A
// clock-linear prefix extends the first segment's evolution backwards and is
// merged into it; a constant prefix becomes a new leading segment. Horizon
// grows by r.
TimedTrace delay(const GsmpModel& model, const TimedTrace& trace,
                 DelayPrefix prefix, double r);

// Piecewise-linear cadlag scalar trace on [0, horizon): value(t) =
// pieces[i].value + pieces[i].slope * (t - pieces[i].t) on [t_i, t_{i+1}).
struct ScalarTrace {
  struct Piece {
    double t = 0.0;
    double value = 0.0;
    double slope = 0.0;
  };
  std::vector<Piece> pieces;  // strictly increasing t, pieces[0].t == 0
  double horizon = 0.0;
};

double scalar_at(const ScalarTrace& trace, double t);

}  // namespace gsmpdist
