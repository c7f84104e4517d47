#pragma once
// Skorohod J2 distance: Hausdorff distance between discretized trace graphs
// under the product metric max(time gap, base distance), clamped at 1.

#include <cmath>
#include <functional>
#include <vector>

#include "gsmpdist/trace.hpp"

namespace gsmpdist {

// Discretized graph of a cadlag trace: global grid points (multiples of the
// grid step) plus every jump with both one-sided values, left limit first,
// plus the left limit at the horizon. Times are nondecreasing and cover
// [0, horizon] with gaps <= grid.
struct TraceGraph {
  std::vector<double> times;
  std::vector<GeneralizedState> points;
};

TraceGraph build_graph(const GsmpModel& model, const TimedTrace& trace, double grid);

struct ScalarGraph {
  std::vector<double> times;
  std::vector<double> values;
};

ScalarGraph build_scalar_graph(const ScalarTrace& trace, double grid);

inline double product_distance(double t1, double t2, double base) {
  return std::min(1.0, std::max(std::abs(t1 - t2), base));
}

// Exact two-sided Hausdorff between time-ordered point sets under the product
// metric; base(i, j) is the value distance between a-point i and b-point j.
// Windowed: since product >= |time gap|, only near-in-time pairs are probed.
// na/nb anchor the sup at the first na (nb) points of each side while
// partners range over everything (-1 anchors all): points past an anchor
// prefix only serve as match targets. Lets a truncated window borrow matches
// from a lookahead buffer; with one full time unit of buffer the anchored
// values equal their untruncated counterparts, because products clamp at 1.
double graph_hausdorff(const std::vector<double>& ta, const std::vector<double>& tb,
                       const std::function<double(int, int)>& base, int na = -1,
                       int nb = -1);

// True iff the two-sided Hausdorff is <= thresh. Only partners within thresh
// in time can qualify, so a near join costs O(n) instead of a full
// evaluation; used to probe cluster joins cheaply. na/nb as above.
bool hausdorff_within(const std::vector<double>& ta, const std::vector<double>& tb,
                      const std::function<double(int, int)>& base, double thresh,
                      int na = -1, int nb = -1);

struct J2Result {
  double value = 0.0;       // min(1, Hausdorff on the sampled graphs)
  double grid_error = 0.0;  // grid * (1 + max drift rate)
};

using StateDist =
    std::function<double(const GeneralizedState&, const GeneralizedState&)>;

// J2 between GSMP traces under a base pseudometric on generalized states.
// Horizon alignment is the caller's concern: graphs are compared as given, so
// a deliberately longer trace (e.g. a delayed copy) keeps its full graph.
J2Result j2_distance(const GsmpModel& model, const TimedTrace& f,
                     const TimedTrace& g, double grid, const StateDist& base);

// J2 between scalar traces under |x - y|.
J2Result j2_scalar(const ScalarTrace& f, const ScalarTrace& g, double grid);

// Interval form, for bases that are expensive to evaluate exactly: each pair
// carries certified bounds, and the Hausdorff inherits them.
struct BoundPair {
  double lo = 0.0;
  double hi = 1.0;
};

// Where to spend the next base-metric evaluation to shrink the hi bound: the
// point driving the hi Hausdorff and, among its candidate partners that could
// still undercut it, the pair with the widest base interval. found() is false
// when the hi bound is already supported by tight pairs on both sides.
struct RefineTarget {
  bool from_a = true;  // p indexes side a (q side b) when true, else swapped
  int p = -1;
  int q = -1;
  bool found() const { return p >= 0 && q >= 0; }
};

// Exact Hausdorff of the lo and hi surrogate distances (valid bounds by
// monotonicity). If target is non-null it receives the refinement suggestion.
// na/nb anchor the sup as in graph_hausdorff.
BoundPair graph_hausdorff_bounds(const std::vector<double>& ta,
                                 const std::vector<double>& tb,
                                 const std::function<BoundPair(int, int)>& base,
                                 RefineTarget* target = nullptr, int na = -1,
                                 int nb = -1);

}  // namespace gsmpdist
