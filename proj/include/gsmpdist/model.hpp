#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gsmpdist/config.hpp"
#include "gsmpdist/errors.hpp"
#include "gsmpdist/rng.hpp"

namespace gsmpdist {

using StateId = int;
using EventId = int;

struct ResetDistribution {
  enum class Kind { exponential, uniform, weibull, point };
  Kind kind = Kind::point;
  // exponential: a = lambda; uniform: [a, b]; weibull: a = shape, b = scale;
  // point: a = value.
  double a = 1.0;
  double b = 0.0;

  double sample(Rng& rng) const;
  double mean() const;
};

struct EventSlot {
  EventId event = -1;
  double rate = 1.0;
};

struct StateRecord {
  std::string id;
  std::vector<std::string> props;  // sorted, unique
  std::vector<EventSlot> slots;    // sorted by event id
  int prop_class = -1;             // states share a class iff props equal
};

// Precomputed per (state, fired slot, target state): which target slots carry
// over (and from where) and which are freshly sampled (and from what).
struct TransitionPlan {
  std::vector<std::pair<int, int>> carried;             // (target slot, source slot)
  std::vector<std::pair<int, ResetDistribution>> fresh; // (target slot, dist)
};

struct GsmpModel {
  std::vector<StateRecord> states;
  std::vector<std::string> event_names;

  // next[s][slot][s'] = transition probability; empty row vector means the
  // slot has no transition row recorded (validation error if reachable).
  std::vector<std::vector<std::vector<double>>> next;

  // resets[s][slot][s'][target slot] — parallel to states[s'].slots; entries
  // for carried slots are ignored. has_reset mirrors which entries were set.
  std::vector<std::vector<std::vector<std::vector<ResetDistribution>>>> resets;
  std::vector<std::vector<std::vector<std::vector<char>>>> has_reset;

  // Derived; filled by finalize().
  std::vector<std::vector<std::vector<TransitionPlan>>> plans;
  double max_rate = 0.0;

  void finalize();

  StateId state_index(const std::string& id) const;  // -1 if unknown
  EventId event_index(const std::string& id) const;  // -1 if unknown
  int slot_index(StateId s, EventId e) const;        // -1 if absent
};

struct GeneralizedState {
  StateId state = -1;
  std::vector<double> clocks;  // aligned with states[state].slots

  bool operator==(const GeneralizedState&) const = default;
};

struct Issue {
  std::string path;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  bool ok() const { return errors.empty(); }
};

ValidationReport validate_model(const GsmpModel& model);

// Clock keys must match the state's events; first expiry must be unique.
GeneralizedState make_state(const GsmpModel& model, StateId s,
                            const std::vector<std::pair<EventId, double>>& clocks);

struct ExpiryInfo {
  double time = 0.0;  // infinity when the state has no events
  int slot = -1;
};

// min_i c_i / r_i with its arg; ties within tol().tie throw UniquenessViolation.
ExpiryInfo time_to_first_expiry(const GsmpModel& model, const GeneralizedState& gs);

// Runs clocks down for t time units (c_i -> c_i - r_i * t).
GeneralizedState advance(const GsmpModel& model, const GeneralizedState& gs, double t);

struct StepResult {
  GeneralizedState next;
  int fired_slot = -1;
  double dwell = 0.0;
};

// One jump: fire the first-expiring event, pick the successor state, carry
// surviving clocks, sample fresh ones. Fresh clocks are resampled (same
// successor) up to retry_budget times if the successor ties its first expiry.
StepResult step(const GsmpModel& model, const GeneralizedState& gs, Rng& rng,
                int retry_budget = 100);

// 0 when props coincide, 1 otherwise: the prop-discrimination floor every
// metric in the lattice must respect.
inline double prop_metric(const GsmpModel& m, const GeneralizedState& x,
                          const GeneralizedState& y) {
  return m.states[x.state].prop_class == m.states[y.state].prop_class ? 0.0 : 1.0;
}

bool has_prop(const GsmpModel& m, StateId s, const std::string& prop);

}  // namespace gsmpdist
