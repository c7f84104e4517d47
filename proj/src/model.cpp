#include "gsmpdist/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace gsmpdist {

double ResetDistribution::sample(Rng& rng) const {
  const double u = rng.uniform01();
  switch (kind) {
    case Kind::exponential:
      return -std::log1p(-u) / a;
    case Kind::uniform:
      return a + (b - a) * u;
    case Kind::weibull:
      return b * std::pow(-std::log1p(-u), 1.0 / a);
    case Kind::point:
      return a;
  }
  return a;
}

double ResetDistribution::mean() const {
  switch (kind) {
    case Kind::exponential:
      return 1.0 / a;
    case Kind::uniform:
      return 0.5 * (a + b);
    case Kind::weibull:
      return b * std::tgamma(1.0 + 1.0 / a);
    case Kind::point:
      return a;
  }
  return a;
}

void GsmpModel::finalize() {
  // Prop classes: states share a class iff their (sorted) prop sets coincide.
  std::map<std::vector<std::string>, int> classes;
  for (auto& st : states) {
    auto [it, _] = classes.try_emplace(st.props, static_cast<int>(classes.size()));
    st.prop_class = it->second;
  }

  max_rate = 0.0;
  for (const auto& st : states)
    for (const auto& slot : st.slots) max_rate = std::max(max_rate, slot.rate);

  const int n = static_cast<int>(states.size());
  plans.assign(n, {});
  for (int s = 0; s < n; ++s) {
    const auto& slots = states[s].slots;
    plans[s].resize(slots.size());
    for (size_t i = 0; i < slots.size(); ++i) {
      plans[s][i].resize(n);
      for (int t = 0; t < n; ++t) {
        TransitionPlan& plan = plans[s][i][t];
        const auto& tslots = states[t].slots;
        for (size_t j = 0; j < tslots.size(); ++j) {
          // Carried: event active in both states and not the one that fired.
          const int src = slot_index(s, tslots[j].event);
          const bool fired = src == static_cast<int>(i);
          if (src >= 0 && !fired) {
            plan.carried.emplace_back(static_cast<int>(j), src);
          } else {
            ResetDistribution d;
            if (s < static_cast<int>(has_reset.size()) &&
                i < has_reset[s].size() &&
                t < static_cast<int>(has_reset[s][i].size()) &&
                j < has_reset[s][i][t].size() && has_reset[s][i][t][j])
              d = resets[s][i][t][j];
            plan.fresh.emplace_back(static_cast<int>(j), d);
          }
        }
      }
    }
  }
}

StateId GsmpModel::state_index(const std::string& id) const {
  for (size_t i = 0; i < states.size(); ++i)
    if (states[i].id == id) return static_cast<StateId>(i);
  return -1;
}

EventId GsmpModel::event_index(const std::string& id) const {
  for (size_t i = 0; i < event_names.size(); ++i)
    if (event_names[i] == id) return static_cast<EventId>(i);
  return -1;
}

int GsmpModel::slot_index(StateId s, EventId e) const {
  const auto& slots = states[s].slots;
  for (size_t i = 0; i < slots.size(); ++i)
    if (slots[i].event == e) return static_cast<int>(i);
  return -1;
}

bool has_prop(const GsmpModel& m, StateId s, const std::string& prop) {
  const auto& props = m.states[s].props;
  return std::binary_search(props.begin(), props.end(), prop);
}

namespace {

void check_dist(const ResetDistribution& d, const std::string& path,
                ValidationReport& rep) {
  using K = ResetDistribution::Kind;
  switch (d.kind) {
    case K::exponential:
      if (!(d.a > 0)) rep.errors.push_back({path, "exponential rate must be > 0"});
      break;
    case K::uniform:
      if (!(d.a >= 0)) rep.errors.push_back({path, "uniform lower bound must be >= 0"});
      if (!(d.b > d.a)) rep.errors.push_back({path, "uniform needs a < b"});
      break;
    case K::weibull:
      if (!(d.a > 0) || !(d.b > 0))
        rep.errors.push_back({path, "weibull needs shape > 0 and scale > 0"});
      break;
    case K::point:
      if (!(d.a > 0)) rep.errors.push_back({path, "point mass must be > 0"});
      rep.warnings.push_back({path, "point-mass reset: non-conforming, testing only"});
      break;
  }
}

}  // namespace

ValidationReport validate_model(const GsmpModel& model) {
  ValidationReport rep;
  std::set<std::string> seen;
  for (const auto& st : model.states) {
    if (st.id.empty()) rep.errors.push_back({"states", "empty state id"});
    if (!seen.insert(st.id).second)
      rep.errors.push_back({"states/" + st.id, "duplicate state id"});
    for (const auto& slot : st.slots)
      if (!(slot.rate > 0))
        rep.errors.push_back({"states/" + st.id + "/events/" +
                                  model.event_names[slot.event],
                              "rate must be strictly positive"});
  }

  const int n = static_cast<int>(model.states.size());
  for (int s = 0; s < n; ++s) {
    const auto& st = model.states[s];
    for (size_t i = 0; i < st.slots.size(); ++i) {
      const std::string path =
          "next/" + st.id + "/" + model.event_names[st.slots[i].event];
      if (s >= static_cast<int>(model.next.size()) ||
          i >= model.next[s].size() || model.next[s][i].empty()) {
        rep.errors.push_back({path, "missing transition row"});
        continue;
      }
      const auto& row = model.next[s][i];
      double sum = 0.0;
      bool neg = false;
      for (double p : row) {
        sum += p;
        neg = neg || p < 0;
      }
      if (neg) rep.errors.push_back({path, "negative transition probability"});
      if (std::abs(sum - 1.0) > tol().row_sum)
        rep.errors.push_back({path, "row sums to " + std::to_string(sum) +
                                        ", expected 1 within 1e-9"});

      // Every positive-probability target needs a reset distribution for each
      // freshly sampled clock, and carried clocks should keep their rate.
      for (int t = 0; t < n; ++t) {
        if (row[t] <= 0) continue;
        const auto& tslots = model.states[t].slots;
        for (size_t j = 0; j < tslots.size(); ++j) {
          const int src = model.slot_index(s, tslots[j].event);
          const bool fired = src == static_cast<int>(i);
          const std::string rpath = path + "->" + model.states[t].id + "/" +
                                    model.event_names[tslots[j].event];
          if (src >= 0 && !fired) {
            if (st.slots[src].rate != tslots[j].rate)
              rep.warnings.push_back(
                  {rpath, "carried clock changes rate across this transition"});
            continue;
          }
          const bool have = s < static_cast<int>(model.has_reset.size()) &&
                            i < model.has_reset[s].size() &&
                            t < static_cast<int>(model.has_reset[s][i].size()) &&
                            j < model.has_reset[s][i][t].size() &&
                            model.has_reset[s][i][t][j];
          if (!have)
            rep.errors.push_back({rpath, "missing reset distribution"});
          else
            check_dist(model.resets[s][i][t][j], rpath, rep);
        }
      }
    }
  }
  return rep;
}

GeneralizedState make_state(const GsmpModel& model, StateId s,
                            const std::vector<std::pair<EventId, double>>& clocks) {
  if (s < 0 || s >= static_cast<int>(model.states.size()))
    throw Error("make_state: unknown state index");
  const auto& slots = model.states[s].slots;
  if (clocks.size() != slots.size())
    throw UniquenessViolation("clock keys do not match the state's events");
  GeneralizedState gs;
  gs.state = s;
  gs.clocks.assign(slots.size(), -1.0);
  for (const auto& [event, value] : clocks) {
    const int slot = model.slot_index(s, event);
    if (slot < 0 || gs.clocks[slot] >= 0)
      throw UniquenessViolation("clock keys do not match the state's events");
    if (!(value >= 0)) throw Error("make_state: clocks must be >= 0");
    gs.clocks[slot] = value;
  }
  time_to_first_expiry(model, gs);  // throws on ties
  return gs;
}

ExpiryInfo time_to_first_expiry(const GsmpModel& model, const GeneralizedState& gs) {
  const auto& slots = model.states[gs.state].slots;
  ExpiryInfo best;
  best.time = std::numeric_limits<double>::infinity();
  double second = best.time;
  for (size_t i = 0; i < slots.size(); ++i) {
    const double t = gs.clocks[i] / slots[i].rate;
    if (t < best.time) {
      second = best.time;
      best.time = t;
      best.slot = static_cast<int>(i);
    } else if (t < second) {
      second = t;
    }
  }
  if (best.slot >= 0 && second - best.time <= tol().tie)
    throw UniquenessViolation("tied first expiry in state " +
                              model.states[gs.state].id);
  return best;
}

GeneralizedState advance(const GsmpModel& model, const GeneralizedState& gs,
                         double t) {
  if (t < 0) throw Error("advance: negative time");
  const ExpiryInfo e = time_to_first_expiry(model, gs);
  if (t > e.time + tol().dwell)
    throw AdvanceBeyondExpiry("advance past first expiry");
  const auto& slots = model.states[gs.state].slots;
  GeneralizedState out = gs;
  for (size_t i = 0; i < slots.size(); ++i)
    out.clocks[i] = std::max(0.0, gs.clocks[i] - slots[i].rate * t);
  return out;
}

StepResult step(const GsmpModel& model, const GeneralizedState& gs, Rng& rng,
                int retry_budget) {
  const ExpiryInfo e = time_to_first_expiry(model, gs);
  if (e.slot < 0) throw Error("step: state has no events");

  // Successor choice first; retries only resample the fresh clocks.
  const auto& row = model.next[gs.state][e.slot];
  const double u = rng.uniform01();
  int target = static_cast<int>(row.size()) - 1;
  double acc = 0.0;
  for (size_t t = 0; t < row.size(); ++t) {
    acc += row[t];
    if (u <= acc) {
      target = static_cast<int>(t);
      break;
    }
  }

  const GeneralizedState at_jump = advance(model, gs, e.time);
  const TransitionPlan& plan = model.plans[gs.state][e.slot][target];
  StepResult res;
  res.fired_slot = e.slot;
  res.dwell = e.time;
  res.next.state = target;
  res.next.clocks.assign(model.states[target].slots.size(), 0.0);
  for (const auto& [dst, src] : plan.carried)
    res.next.clocks[dst] = at_jump.clocks[src];

  for (int attempt = 0; attempt <= retry_budget; ++attempt) {
    for (const auto& [dst, dist] : plan.fresh)
      res.next.clocks[dst] = dist.sample(rng);
    try {
      time_to_first_expiry(model, res.next);
      return res;
    } catch (const UniquenessViolation&) {
      if (plan.fresh.empty()) break;  // nothing to resample
    }
  }
  throw DegenerateModel("could not sample a successor with a unique first expiry");
}

}  // namespace gsmpdist
