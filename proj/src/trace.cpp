#include "gsmpdist/trace.hpp"

#include <algorithm>
#include <cmath>

namespace gsmpdist {

TimedTrace sample_trace(const GsmpModel& model, const GeneralizedState& gs0,
                        double horizon, Rng& rng, std::uint64_t zeno_guard,
                        int retry_budget) {
  if (!(horizon > 0)) throw Error("sample_trace: horizon must be positive");
  TimedTrace trace;
  trace.horizon = horizon;
  GeneralizedState cur = gs0;
  double t = 0.0;
  std::uint64_t events = 0;
  while (true) {
    const ExpiryInfo e = time_to_first_expiry(model, cur);
    if (t + e.time >= horizon || e.slot < 0) {
      trace.segments.push_back({cur, horizon - t, true});
      return trace;
    }
    StepResult s = step(model, cur, rng, retry_budget);
    trace.segments.push_back({cur, s.dwell, true});
    cur = std::move(s.next);
    t += s.dwell;
    if (++events > zeno_guard)
      throw ZenoGuardExceeded("more than zeno_guard events before the horizon");
  }
}

namespace {

// Index of the segment containing t, given segment start times.
int segment_at(const std::vector<double>& starts, double t) {
  auto it = std::upper_bound(starts.begin(), starts.end(), t);
  return static_cast<int>(it - starts.begin()) - 1;
}

std::vector<double> segment_starts(const TimedTrace& trace) {
  std::vector<double> starts(trace.segments.size());
  double t = 0.0;
  for (size_t i = 0; i < trace.segments.size(); ++i) {
    starts[i] = t;
    t += trace.segments[i].dwell;
  }
  return starts;
}

}  // namespace

GeneralizedState trace_at(const GsmpModel& model, const TimedTrace& trace,
                          double t) {
  if (t < 0 || t >= trace.horizon)
    throw OutOfHorizon("trace evaluated outside [0, horizon)");
  const auto starts = segment_starts(trace);
  const int i = segment_at(starts, t);
  const TraceSegment& seg = trace.segments[i];
  return seg.evolve ? advance(model, seg.start, t - starts[i]) : seg.start;
}

std::vector<double> jump_times(const TimedTrace& trace) {
  std::vector<double> times;
  double t = 0.0;
  for (size_t i = 0; i + 1 < trace.segments.size(); ++i) {
    t += trace.segments[i].dwell;
    times.push_back(t);
  }
  return times;
}

TimedTrace delay(const GsmpModel& model, const TimedTrace& trace,
                 DelayPrefix prefix, double r) {
  if (r < 0) throw Error("delay: negative shift");
  TimedTrace out = trace;
  out.horizon += r;
  if (r == 0 || trace.segments.empty()) return out;
  const GeneralizedState& f0 = trace.segments.front().start;
  if (prefix.kind == DelayPrefix::Kind::clock_linear) {
    // Run the first segment's evolution backwards: u(0) has every clock
    // raised by rate * r, so u(r) == f(0) and the segment merges.
    GeneralizedState u0 = f0;
    const auto& slots = model.states[f0.state].slots;
    for (size_t i = 0; i < slots.size(); ++i)
      u0.clocks[i] += slots[i].rate * r;
    out.segments.front().start = std::move(u0);
    out.segments.front().dwell += r;
  } else {
    out.segments.insert(out.segments.begin(), {f0, r, false});
  }
  return out;
}

double scalar_at(const ScalarTrace& trace, double t) {
  if (t < 0 || t >= trace.horizon)
    throw OutOfHorizon("scalar trace evaluated outside [0, horizon)");
  std::vector<double> starts(trace.pieces.size());
  for (size_t i = 0; i < trace.pieces.size(); ++i) starts[i] = trace.pieces[i].t;
  const int i = segment_at(starts, t);
  const auto& p = trace.pieces[i];
  return p.value + p.slope * (t - p.t);
}

}  // namespace gsmpdist
