#pragma once
// Hand-built models shared by the unit tests.

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "gsmpdist/model.hpp"

namespace gsmpdist::testing {

struct Builder {
  GsmpModel m;

  int event(const std::string& name) {
    int e = m.event_index(name);
    if (e < 0) {
      m.event_names.push_back(name);
      e = static_cast<int>(m.event_names.size()) - 1;
    }
    return e;
  }

  void state(const std::string& id, std::vector<std::string> props,
             std::vector<std::pair<std::string, double>> events) {
    StateRecord st;
    st.id = id;
    std::sort(props.begin(), props.end());
    st.props = std::move(props);
    for (auto& [name, rate] : events) st.slots.push_back({event(name), rate});
    std::sort(st.slots.begin(), st.slots.end(),
              [](const EventSlot& a, const EventSlot& b) { return a.event < b.event; });
    m.states.push_back(std::move(st));
  }

  // Sizes next/resets/has_reset once all states exist; rows start all-zero.
  void allocate() {
    const size_t n = m.states.size();
    m.next.assign(n, {});
    m.resets.assign(n, {});
    m.has_reset.assign(n, {});
    for (size_t s = 0; s < n; ++s) {
      const size_t k = m.states[s].slots.size();
      m.next[s].assign(k, std::vector<double>(n, 0.0));
      m.resets[s].resize(k);
      m.has_reset[s].resize(k);
      for (size_t i = 0; i < k; ++i) {
        m.resets[s][i].resize(n);
        m.has_reset[s][i].resize(n);
        for (size_t t = 0; t < n; ++t) {
          m.resets[s][i][t].resize(m.states[t].slots.size());
          m.has_reset[s][i][t].assign(m.states[t].slots.size(), 0);
        }
      }
    }
  }

  void arc(const std::string& from, const std::string& ev, const std::string& to,
           double p) {
    const int s = m.state_index(from);
    m.next[s][m.slot_index(s, m.event_index(ev))][m.state_index(to)] = p;
  }

  void reset(const std::string& from, const std::string& ev, const std::string& to,
             const std::string& clock, ResetDistribution d) {
    const int s = m.state_index(from);
    const int i = m.slot_index(s, m.event_index(ev));
    const int t = m.state_index(to);
    const int j = m.slot_index(t, m.event_index(clock));
    m.resets[s][i][t][j] = d;
    m.has_reset[s][i][t][j] = 1;
  }

  GsmpModel done() {
    m.finalize();
    return m;
  }
};

inline ResetDistribution expdist(double lambda) {
  return {ResetDistribution::Kind::exponential, lambda, 0.0};
}
inline ResetDistribution unif(double a, double b) {
  return {ResetDistribution::Kind::uniform, a, b};
}
inline ResetDistribution weib(double shape, double scale) {
  return {ResetDistribution::Kind::weibull, shape, scale};
}
inline ResetDistribution point(double v) {
  return {ResetDistribution::Kind::point, v, 0.0};
}

// Two-state deterministic alternator: tick ~ point(1), props tell sides apart.
inline GsmpModel pingpong() {
  Builder b;
  b.state("up", {"up"}, {{"tick", 1.0}});
  b.state("down", {"down"}, {{"tick", 1.0}});
  b.allocate();
  b.arc("up", "tick", "down", 1.0);
  b.arc("down", "tick", "up", 1.0);
  b.reset("up", "tick", "down", "tick", point(1.0));
  b.reset("down", "tick", "up", "tick", point(1.0));
  return b.done();
}

// A --go--> B where "keep" stays active across the jump and B eventually
// returns to A. Used for carried-clock checks.
inline GsmpModel carry_model(double keep_rate_a = 1.0, double keep_rate_b = 1.0) {
  Builder b;
  b.state("A", {"a"}, {{"go", 1.0}, {"keep", keep_rate_a}});
  b.state("B", {"b"}, {{"keep", keep_rate_b}});
  b.allocate();
  b.arc("A", "go", "B", 1.0);
  b.arc("A", "keep", "B", 1.0);
  b.arc("B", "keep", "A", 1.0);
  b.reset("A", "keep", "B", "keep", unif(0.5, 1.5));
  b.reset("B", "keep", "A", "go", unif(0.5, 1.5));
  b.reset("B", "keep", "A", "keep", unif(0.5, 1.5));
  return b.done();
}

}  // namespace gsmpdist::testing
