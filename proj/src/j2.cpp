#include "gsmpdist/j2.hpp"

#include <algorithm>
#include <limits>

namespace gsmpdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Directed sup-inf under min(1, max(|dt|, value)). Expands from the nearest-
// in-time partner outward, stopping a side once its time gap alone rules it
// out; a point whose inf falls to the running sup is abandoned early (it
// cannot raise the sup). Returns the sup and, via arg, its witness index.
// The sup ranges over the first `limit` a-points (all when limit < 0);
// partners always range over all of tb.
template <class Value>
double directed(const std::vector<double>& ta, const std::vector<double>& tb,
                Value&& value, int* arg = nullptr, int limit = -1) {
  const int n = limit < 0 ? static_cast<int>(ta.size())
                          : std::min(limit, static_cast<int>(ta.size()));
  const int m = static_cast<int>(tb.size());
  double worst = 0.0;
  int anchor = -1;  // last index with tb[anchor] <= ta[i]
  for (int i = 0; i < n; ++i) {
    while (anchor + 1 < m && tb[anchor + 1] <= ta[i]) ++anchor;
    int l = anchor, r = anchor + 1;
    double best = 1.0;  // the clamp: every product distance is <= 1
    bool abandoned = false;
    while (true) {
      const double dl = l >= 0 ? ta[i] - tb[l] : kInf;
      const double dr = r < m ? tb[r] - ta[i] : kInf;
      if (std::min(dl, dr) >= best) break;
      if (dl <= dr) {
        best = std::min(best, std::min(1.0, std::max(dl, value(i, l))));
        --l;
      } else {
        best = std::min(best, std::min(1.0, std::max(dr, value(i, r))));
        ++r;
      }
      if (best <= worst) {
        abandoned = true;
        break;
      }
    }
    if (!abandoned && best > worst) {
      worst = best;
      if (arg) *arg = i;
    }
  }
  return worst;
}

}  // namespace

double graph_hausdorff(const std::vector<double>& ta, const std::vector<double>& tb,
                       const std::function<double(int, int)>& base, int na, int nb) {
  if (ta.empty() || tb.empty()) throw Error("hausdorff: empty graph");
  const double ab = directed(ta, tb, base, nullptr, na);
  const double ba =
      directed(tb, ta, [&](int j, int i) { return base(i, j); }, nullptr, nb);
  return std::max(ab, ba);
}

namespace {

// One direction of the thresholded check: every a-point needs some partner at
// product distance <= thresh, and only partners with |dt| <= thresh qualify.
// Checks the first `limit` a-points (all when limit < 0).
template <class Value>
bool within_directed(const std::vector<double>& ta, const std::vector<double>& tb,
                     Value&& value, double thresh, int limit = -1) {
  const int n = limit < 0 ? static_cast<int>(ta.size())
                          : std::min(limit, static_cast<int>(ta.size()));
  const int m = static_cast<int>(tb.size());
  int anchor = -1;
  for (int i = 0; i < n; ++i) {
    while (anchor + 1 < m && tb[anchor + 1] <= ta[i]) ++anchor;
    int l = anchor, r = anchor + 1;
    bool ok = false;
    while (!ok) {
      const double dl = l >= 0 ? ta[i] - tb[l] : kInf;
      const double dr = r < m ? tb[r] - ta[i] : kInf;
      if (std::min(dl, dr) > thresh) break;
      if (dl <= dr) {
        ok = std::min(1.0, std::max(dl, value(i, l))) <= thresh;
        --l;
      } else {
        ok = std::min(1.0, std::max(dr, value(i, r))) <= thresh;
        ++r;
      }
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool hausdorff_within(const std::vector<double>& ta, const std::vector<double>& tb,
                      const std::function<double(int, int)>& base, double thresh,
                      int na, int nb) {
  if (ta.empty() || tb.empty()) throw Error("hausdorff: empty graph");
  if (thresh >= 1.0) return true;  // the product metric is clamped at 1
  return within_directed(ta, tb, base, thresh, na) &&
         within_directed(
             tb, ta, [&](int j, int i) { return base(i, j); }, thresh, nb);
}

BoundPair graph_hausdorff_bounds(const std::vector<double>& ta,
                                 const std::vector<double>& tb,
                                 const std::function<BoundPair(int, int)>& base,
                                 RefineTarget* target, int na, int nb) {
  if (ta.empty() || tb.empty()) throw Error("hausdorff: empty graph");
  auto lo_ab = [&](int i, int j) { return base(i, j).lo; };
  auto hi_ab = [&](int i, int j) { return base(i, j).hi; };

  BoundPair h;
  h.lo = std::max(
      directed(ta, tb, lo_ab, nullptr, na),
      directed(tb, ta, [&](int j, int i) { return base(i, j).lo; }, nullptr, nb));
  int arg_ab = -1, arg_ba = -1;
  const double hi_1 = directed(ta, tb, hi_ab, &arg_ab, na);
  const double hi_2 =
      directed(tb, ta, [&](int j, int i) { return base(i, j).hi; }, &arg_ba, nb);
  h.hi = std::max(hi_1, hi_2);

  if (target) {
    *target = {};
    const bool from_a = hi_1 >= hi_2;
    target->from_a = from_a;
    const int p = from_a ? arg_ab : arg_ba;
    const double contribution = h.hi;
    if (p >= 0) {
      // Among partners that could still undercut the hi bound (their lo is
      // below it), pick the widest base interval; tight pairs can't move.
      const std::vector<double>& tp = from_a ? ta : tb;
      const std::vector<double>& tq = from_a ? tb : ta;
      const double t0 = tp[p];
      const auto it = std::lower_bound(tq.begin(), tq.end(), t0);
      int l = static_cast<int>(it - tq.begin()) - 1, r = l + 1;
      const int m = static_cast<int>(tq.size());
      double widest = 1e-12;
      while (true) {
        const double dl = l >= 0 ? t0 - tq[l] : kInf;
        const double dr = r < m ? tq[r] - t0 : kInf;
        if (std::min(dl, dr) >= contribution) break;
        int q;
        if (dl <= dr) {
          q = l--;
        } else {
          q = r++;
        }
        const BoundPair b = from_a ? base(p, q) : base(q, p);
        const double dt = std::abs(t0 - tq[q]);
        if (std::max(dt, b.lo) < contribution && b.hi - b.lo > widest) {
          widest = b.hi - b.lo;
          target->p = p;
          target->q = q;
        }
      }
    }
  }
  return h;
}

namespace {

// Grid indices strictly inside (t0, t1), skipping near-coincidence with the
// segment ends (the jump points already carry both one-sided values there).
std::pair<long long, long long> grid_range(double t0, double t1, double grid) {
  const double eps = tol().merge;
  long long k0 = static_cast<long long>(std::floor(t0 / grid)) + 1;
  while (k0 * grid <= t0 + eps) ++k0;
  long long k1 = k0;
  while (k1 * grid < t1 - eps) ++k1;  // first excluded index
  return {k0, k1};
}

}  // namespace

TraceGraph build_graph(const GsmpModel& model, const TimedTrace& trace, double grid) {
  if (!(grid > 0)) throw Error("build_graph: grid must be positive");
  if (trace.segments.empty()) throw Error("build_graph: empty trace");
  TraceGraph g;
  double t0 = 0.0;
  for (const TraceSegment& seg : trace.segments) {
    const double t1 = t0 + seg.dwell;
    g.times.push_back(t0);
    g.points.push_back(seg.start);
    const auto [k0, k1] = grid_range(t0, t1, grid);
    for (long long k = k0; k < k1; ++k) {
      const double t = static_cast<double>(k) * grid;
      g.times.push_back(t);
      g.points.push_back(seg.evolve ? advance(model, seg.start, t - t0)
                                    : seg.start);
    }
    // Left limit at the segment end (the horizon for the last segment).
    g.times.push_back(t1);
    g.points.push_back(seg.evolve ? advance(model, seg.start, seg.dwell)
                                  : seg.start);
    t0 = t1;
  }
  return g;
}

ScalarGraph build_scalar_graph(const ScalarTrace& trace, double grid) {
  if (!(grid > 0)) throw Error("build_scalar_graph: grid must be positive");
  if (trace.pieces.empty()) throw Error("build_scalar_graph: empty trace");
  ScalarGraph g;
  const size_t n = trace.pieces.size();
  for (size_t i = 0; i < n; ++i) {
    const auto& p = trace.pieces[i];
    const double t1 = i + 1 < n ? trace.pieces[i + 1].t : trace.horizon;
    g.times.push_back(p.t);
    g.values.push_back(p.value);
    const auto [k0, k1] = grid_range(p.t, t1, grid);
    for (long long k = k0; k < k1; ++k) {
      const double t = static_cast<double>(k) * grid;
      g.times.push_back(t);
      g.values.push_back(p.value + p.slope * (t - p.t));
    }
    g.times.push_back(t1);
    g.values.push_back(p.value + p.slope * (t1 - p.t));
  }
  return g;
}

J2Result j2_distance(const GsmpModel& model, const TimedTrace& f,
                     const TimedTrace& g, double grid, const StateDist& base) {
  const TraceGraph gf = build_graph(model, f, grid);
  const TraceGraph gg = build_graph(model, g, grid);
  J2Result res;
  res.value = graph_hausdorff(gf.times, gg.times, [&](int i, int j) {
    return base(gf.points[i], gg.points[j]);
  });
  res.grid_error = grid * (1.0 + model.max_rate);
  return res;
}

J2Result j2_scalar(const ScalarTrace& f, const ScalarTrace& g, double grid) {
  const ScalarGraph gf = build_scalar_graph(f, grid);
  const ScalarGraph gg = build_scalar_graph(g, grid);
  J2Result res;
  res.value = graph_hausdorff(gf.times, gg.times, [&](int i, int j) {
    return std::abs(gf.values[i] - gg.values[j]);
  });
  double slope = 0.0;
  for (const auto& p : f.pieces) slope = std::max(slope, std::abs(p.slope));
  for (const auto& p : g.pieces) slope = std::max(slope, std::abs(p.slope));
  res.grid_error = grid * (1.0 + slope);
  return res;
}

}  // namespace gsmpdist
