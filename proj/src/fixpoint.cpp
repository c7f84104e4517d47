#include "gsmpdist/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>

#include "gsmpdist/j2.hpp"
#include "gsmpdist/rng.hpp"
#include "gsmpdist/trace.hpp"
#include "gsmpdist/transport.hpp"

namespace gsmpdist {

double convergence_bound(double k, int n) {
  if (!(k > 0.0 && k < 1.0)) throw Error("convergence_bound: k must lie in (0, 1)");
  if (n < 0) throw Error("convergence_bound: depth must be >= 0");
  return std::pow(k, n + 1) / (1.0 - k);
}

namespace {

// Traces are sampled one extra time unit past the horizon so that points
// near the cut can still find their match. The product metric clamps at 1,
// so a partner more than one time unit away never improves an infimum below
// the clamp: with this buffer, the directed value at every anchored point
// equals its untruncated counterpart.
constexpr double kMatchBuffer = 1.0;

struct EvalResult {
  double value = 0.0;
  double samp = 0.0;  // statistical part of the error, discounted per level
  double grd = 0.0;   // discretization part, discounted per level
};

struct SideKey {
  int state = -1;
  std::vector<long long> qc;  // clocks quantized at deep_quantum
  bool operator<(const SideKey& o) const {
    return std::tie(state, qc) < std::tie(o.state, o.qc);
  }
};

struct MemoKey {
  int depth = 0;
  SideKey a, b;  // normalized: a <= b
  bool operator<(const MemoKey& o) const {
    return std::tie(depth, a, b) < std::tie(o.depth, o.a, o.b);
  }
};

// One side of a cost-matrix computation: the clustered trace measure.
struct SideData {
  std::vector<TraceGraph> graphs;  // representatives only
  std::vector<int> anchors;        // per graph: #points inside the horizon
  std::vector<double> weights;
  std::vector<int> assign;  // sample index -> representative position
  int nsamp = 0;
};

struct Level {
  int samples = 1;
  double grid = 0.0;
  int bootstrap = 0;
  double cluster_eps = 0.0;
};

bool state_lex_less(const GeneralizedState& x, const GeneralizedState& y) {
  if (x.state != y.state) return x.state < y.state;
  return x.clocks < y.clocks;
}

int pick_index(Rng& rng, int n) {
  return static_cast<int>(rng.next() % static_cast<std::uint64_t>(n));
}

}  // namespace

struct MetricEngine::Impl {
  GsmpModel model;
  RunConfig cfg;
  double horizon;
  std::uint64_t work = 0;
  std::map<MemoKey, EvalResult> memo;

  Impl(const GsmpModel& m, const RunConfig& c, double h)
      : model(m), cfg(c), horizon(h) {}

  int prop_class(const GeneralizedState& g) const {
    return model.states[g.state].prop_class;
  }

  void check_state(const GeneralizedState& g) const {
    if (g.state < 0 || g.state >= static_cast<int>(model.states.size()))
      throw Error("metric estimate: state index out of range");
    if (g.clocks.size() != model.states[g.state].slots.size())
      throw Error("metric estimate: clock vector does not match the state's events");
  }

  SideKey qkey(const GeneralizedState& g) const {
    SideKey k;
    k.state = g.state;
    k.qc.resize(g.clocks.size());
    for (std::size_t i = 0; i < g.clocks.size(); ++i)
      k.qc[i] = llround(g.clocks[i] / cfg.deep_quantum);
    return k;
  }

  // Cell representative. Rounding can manufacture expiry ties; nudge them
  // apart deterministically (the nudge is far below the quantum already
  // charged to the budget).
  GeneralizedState rep_of(const SideKey& k) const {
    GeneralizedState g;
    g.state = k.state;
    g.clocks.resize(k.qc.size());
    for (std::size_t i = 0; i < k.qc.size(); ++i)
      g.clocks[i] = static_cast<double>(k.qc[i]) * cfg.deep_quantum;
    for (int attempt = 0; attempt < 4; ++attempt) {
      try {
        time_to_first_expiry(model, g);
        return g;
      } catch (const UniquenessViolation&) {
        for (std::size_t i = 0; i < g.clocks.size(); ++i)
          g.clocks[i] += cfg.deep_quantum * 1e-3 * static_cast<double>(i + 1);
      }
    }
    return g;  // let downstream sampling report the degenerate cell
  }

  Level level_for(bool top) const {
    Level l;
    if (top) {
      l.samples = cfg.samples;
      l.grid = cfg.grid;
      l.bootstrap = cfg.bootstrap;
      l.cluster_eps = cfg.cluster_eps < 0.0 ? cfg.grid : cfg.cluster_eps;
    } else {
      l.samples = cfg.inner_samples;
      l.grid = std::max(cfg.grid, cfg.deep_quantum);
      l.bootstrap = cfg.inner_bootstrap;
      l.cluster_eps = std::max(cfg.grid, cfg.deep_quantum);
    }
    return l;
  }

  // Common random numbers: the i-th trace uses the same stream on every side,
  // every level and every query, so coupled states produce coupled samples.
  // Sampling runs past the horizon by the match buffer; the extra points only
  // serve as match targets, never as anchors of the Hausdorff sup.
  TimedTrace trace_for(const GeneralizedState& gs, int i) const {
    Rng rng = stream(cfg.seed, {static_cast<std::uint64_t>(i)});
    return sample_trace(model, gs, horizon + kMatchBuffer, rng, cfg.zeno_guard,
                        cfg.retry_budget);
  }

  int anchor_count(const TraceGraph& g) const {
    const auto it = std::upper_bound(g.times.begin(), g.times.end(),
                                     horizon + tol().merge);
    return static_cast<int>(it - g.times.begin());
  }

  SideData sample_side(const GeneralizedState& gs, const Level& lv, int base_depth) {
    std::vector<TraceGraph> graphs(lv.samples);
    std::vector<int> anch(lv.samples);
    for (int i = 0; i < lv.samples; ++i) {
      graphs[i] = build_graph(model, trace_for(gs, i), lv.grid);
      anch[i] = anchor_count(graphs[i]);
    }
    // Join when an upper bound on the cost metric is within eps/2; the cap
    // dominates J2 under any admissible base at this depth, so cells have
    // true diameter <= eps and clustering shifts W by at most 2*eps.
    auto joinable = [&](int i, int j) {
      const TraceGraph& f = graphs[i];
      const TraceGraph& g = graphs[j];
      auto cap = [&](int p, int q) {
        const GeneralizedState& u = f.points[p];
        const GeneralizedState& v = g.points[q];
        if (prop_class(u) != prop_class(v)) return 1.0;
        if (base_depth == 0) return 0.0;
        if (u.state == v.state && u.clocks == v.clocks) return 0.0;
        return cfg.k;
      };
      return hausdorff_within(f.times, g.times, cap, lv.cluster_eps / 2.0, anch[i],
                              anch[j]);
    };
    Clustering cl = cluster_measure(
        lv.samples, [&](int i, int j) { return joinable(i, j) ? 0.0 : 1.0; },
        lv.cluster_eps);
    SideData side;
    side.nsamp = lv.samples;
    side.weights = cl.weights;
    side.assign = cl.assign;
    side.graphs.reserve(cl.reps.size());
    side.anchors.reserve(cl.reps.size());
    for (int r : cl.reps) {
      side.graphs.push_back(std::move(graphs[r]));
      side.anchors.push_back(anch[r]);
    }
    return side;
  }

  EvalResult eval(GeneralizedState a, GeneralizedState b, int depth, bool top) {
    if (state_lex_less(b, a)) std::swap(a, b);  // exact symmetry by construction
    if (prop_class(a) != prop_class(b)) return {1.0, 0.0, 0.0};
    if (depth == 0) return {0.0, 0.0, 0.0};
    if (a.state == b.state && a.clocks == b.clocks) return {0.0, 0.0, 0.0};

    if (++work > cfg.work_limit)
      throw WorkLimitExceeded("metric estimate exceeded the configured work limit");

    const Level lv = level_for(top);
    const int dm1 = depth - 1;
    const SideData pa = sample_side(a, lv, dm1);
    const SideData pb = sample_side(b, lv, dm1);
    const int ra = static_cast<int>(pa.graphs.size());
    const int rb = static_cast<int>(pb.graphs.size());

    // Cost entries as certified intervals on the discretized J2. The initial
    // pass uses only the free tiers: exact values where the base metric is
    // known (prop mismatch, identical points, depth-1 base), [0, k] elsewhere.
    std::vector<BoundPair> ent(static_cast<std::size_t>(ra) * rb);
    double child_samp = 0.0, child_grd = 0.0;
    bool used_cache = false;

    auto tier_bounds = [&](const TraceGraph& f, const TraceGraph& g, bool probe_cache,
                           int p, int q) -> BoundPair {
      const GeneralizedState& u = f.points[p];
      const GeneralizedState& v = g.points[q];
      if (prop_class(u) != prop_class(v)) return {1.0, 1.0};
      if (u.state == v.state && u.clocks == v.clocks) return {0.0, 0.0};
      if (dm1 == 0) return {0.0, 0.0};
      if (probe_cache) {
        SideKey ku = qkey(u), kv = qkey(v);
        if (kv < ku) std::swap(ku, kv);
        const auto it = memo.find(MemoKey{dm1, std::move(ku), std::move(kv)});
        if (it != memo.end()) {
          used_cache = true;
          child_samp = std::max(child_samp, it->second.samp);
          child_grd = std::max(child_grd, it->second.grd);
          const double w = std::clamp(it->second.value, 0.0, cfg.k);
          return {w, w};
        }
      }
      return {0.0, cfg.k};
    };

    for (int i = 0; i < ra; ++i) {
      for (int j = 0; j < rb; ++j) {
        const TraceGraph& f = pa.graphs[i];
        const TraceGraph& g = pb.graphs[j];
        ent[static_cast<std::size_t>(i) * rb + j] = graph_hausdorff_bounds(
            f.times, g.times,
            [&](int p, int q) { return tier_bounds(f, g, false, p, q); }, nullptr,
            pa.anchors[i], pb.anchors[j]);
      }
    }

    // Evaluates the quantized representatives of (u, v) one level down and
    // caches the result; false when the cell is already cached.
    auto force_eval = [&](const GeneralizedState& u, const GeneralizedState& v) {
      SideKey ku = qkey(u), kv = qkey(v);
      if (kv < ku) std::swap(ku, kv);
      MemoKey key{dm1, std::move(ku), std::move(kv)};
      if (memo.count(key)) return false;
      EvalResult r = eval(rep_of(key.a), rep_of(key.b), dm1, false);
      memo.emplace(std::move(key), r);
      return true;
    };

    int credits = cfg.refine_cap;

    // Narrows one cost entry: repeatedly evaluate the suggested base pair one
    // level down until the interval is tight enough or nothing can move.
    // Returns whether the stored entry changed (cache hits from earlier
    // refinements can tighten it without spending any credits).
    auto refine_entry = [&](int i, int j) {
      const TraceGraph& f = pa.graphs[i];
      const TraceGraph& g = pb.graphs[j];
      auto fn = [&](int p, int q) { return tier_bounds(f, g, true, p, q); };
      bool moved = false;
      while (true) {
        RefineTarget tgt;
        const BoundPair bp = graph_hausdorff_bounds(f.times, g.times, fn, &tgt,
                                                    pa.anchors[i], pb.anchors[j]);
        BoundPair& slot = ent[static_cast<std::size_t>(i) * rb + j];
        if (bp.lo != slot.lo || bp.hi != slot.hi) moved = true;
        slot = bp;
        if (bp.hi - bp.lo <= cfg.refine_tol || !tgt.found() || credits <= 0)
          return moved;
        const GeneralizedState& u = tgt.from_a ? f.points[tgt.p] : f.points[tgt.q];
        const GeneralizedState& v = tgt.from_a ? g.points[tgt.q] : g.points[tgt.p];
        if (!force_eval(u, v)) return moved;  // cell cached; interval cannot move
        --credits;
      }
    };

    struct WSolve {
      double value = 0.0;
      std::vector<std::tuple<double, int, int>> support;  // (mass, i, j)
    };
    auto solve_w = [&](const std::vector<double>& wa, const std::vector<double>& wb,
                       bool hi) {
      std::vector<int> ia, ib;  // bootstrap reweighting can zero a cell out
      for (int i = 0; i < ra; ++i)
        if (wa[i] > 0.0) ia.push_back(i);
      for (int j = 0; j < rb; ++j)
        if (wb[j] > 0.0) ib.push_back(j);
      Matrix c(static_cast<int>(ia.size()), static_cast<int>(ib.size()));
      std::vector<double> p(ia.size()), q(ib.size());
      for (std::size_t x = 0; x < ia.size(); ++x) p[x] = wa[ia[x]];
      for (std::size_t y = 0; y < ib.size(); ++y) q[y] = wb[ib[y]];
      for (std::size_t x = 0; x < ia.size(); ++x)
        for (std::size_t y = 0; y < ib.size(); ++y) {
          const BoundPair& e = ent[static_cast<std::size_t>(ia[x]) * rb + ib[y]];
          c.at(static_cast<int>(x), static_cast<int>(y)) = hi ? e.hi : e.lo;
        }
      const TransportResult res = wasserstein(p, q, c);
      WSolve out;
      out.value = res.value;
      for (int x = 0; x < c.rows; ++x)
        for (int y = 0; y < c.cols; ++y)
          if (res.coupling.at(x, y) > 1e-15)
            out.support.emplace_back(res.coupling.at(x, y), ia[x], ib[y]);
      return out;
    };

    // Optimistic-verification loop: both marginal solves nominate the entries
    // their couplings lean on; refining the widest of them either confirms a
    // cheap plan (the upper value drops) or refutes it (the lower one rises).
    WSolve lo, hi;
    while (true) {
      lo = solve_w(pa.weights, pb.weights, false);
      hi = solve_w(pa.weights, pb.weights, true);
      if (cfg.k * (hi.value - lo.value) / 2.0 <= cfg.refine_tol || credits <= 0) break;
      std::vector<std::tuple<double, int, int>> cand;
      for (const auto& sup : {lo.support, hi.support})
        for (const auto& [mass, i, j] : sup) {
          const BoundPair& e = ent[static_cast<std::size_t>(i) * rb + j];
          if (e.hi - e.lo > 1e-12) cand.emplace_back(-mass * (e.hi - e.lo), i, j);
        }
      if (cand.empty()) break;
      std::sort(cand.begin(), cand.end());
      cand.erase(std::unique(cand.begin(), cand.end(),
                             [](const auto& x, const auto& y) {
                               return std::get<1>(x) == std::get<1>(y) &&
                                      std::get<2>(x) == std::get<2>(y);
                             }),
                 cand.end());
      const int before = credits;
      bool moved = false;
      const int batch = std::min<int>(32, static_cast<int>(cand.size()));
      for (int t = 0; t < batch && credits > 0; ++t)
        if (refine_entry(std::get<1>(cand[t]), std::get<2>(cand[t]))) moved = true;
      // Stop only when the batch neither spent credits nor tightened any
      // entry; entries can move for free when earlier refinements already
      // cached the cells they depend on, and those moves need a re-solve.
      if (credits == before && !moved) break;
    }

    const double vmid = cfg.k * (lo.value + hi.value) / 2.0;

    // Statistical half-width: reweight both empirical measures by resampling
    // trace indices and track the spread of the estimate.
    double vmin = vmid, vmax = vmid;
    for (int bres = 0; bres < lv.bootstrap; ++bres) {
      Rng rng = stream(cfg.seed, {0xb001ULL, static_cast<std::uint64_t>(depth),
                                  static_cast<std::uint64_t>(bres)});
      std::vector<double> wa(ra, 0.0), wb(rb, 0.0);
      for (int i = 0; i < pa.nsamp; ++i)
        wa[pa.assign[pick_index(rng, pa.nsamp)]] += 1.0 / pa.nsamp;
      for (int i = 0; i < pb.nsamp; ++i)
        wb[pb.assign[pick_index(rng, pb.nsamp)]] += 1.0 / pb.nsamp;
      const double v =
          cfg.k * (solve_w(wa, wb, false).value + solve_w(wa, wb, true).value) / 2.0;
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }

    EvalResult out;
    out.value = std::clamp(vmid, 0.0, 1.0);
    out.samp = (vmax - vmin) / 2.0 + cfg.k * child_samp;
    // Per-level discretization: both graphs' grid drift, clustering on both
    // sides, the cache quantum when cached cells were substituted for exact
    // base values, the children's own folded terms, and whatever interval
    // width refinement left unresolved.
    const double local = 2.0 * lv.grid * (1.0 + model.max_rate) +
                         4.0 * lv.cluster_eps +
                         (used_cache ? cfg.deep_quantum : 0.0) + child_grd;
    out.grd = cfg.k * local + cfg.k * (hi.value - lo.value) / 2.0;
    return out;
  }

  MetricEstimate run(const GeneralizedState& g1, const GeneralizedState& g2) {
    check_state(g1);
    check_state(g2);
    MetricEstimate est;
    est.params = cfg;
    const EvalResult r = eval(g1, g2, cfg.depth, true);
    est.value = std::clamp(r.value, 0.0, 1.0);
    est.budget.depth_term = convergence_bound(cfg.k, cfg.depth);
    est.budget.sampling_term = r.samp;
    est.budget.grid_term = r.grd;
    const bool trivial = prop_class(g1) != prop_class(g2) || cfg.depth == 0 ||
                         (g1.state == g2.state && g1.clocks == g2.clocks);
    if (!trivial && cfg.horizon_factor > 0.0) {
      Impl probe(model, cfg, horizon * cfg.horizon_factor);
      const EvalResult far = probe.eval(g1, g2, cfg.depth, true);
      est.budget.horizon_term = std::abs(far.value - r.value);
    }
    return est;
  }
};

namespace {
const RunConfig& checked(const RunConfig& c) {
  c.check();
  return c;
}
}  // namespace

MetricEngine::MetricEngine(const GsmpModel& model, const RunConfig& cfg)
    : impl_(std::make_unique<Impl>(model, checked(cfg), cfg.horizon)) {}

MetricEngine::~MetricEngine() = default;
MetricEngine::MetricEngine(MetricEngine&&) noexcept = default;
MetricEngine& MetricEngine::operator=(MetricEngine&&) noexcept = default;

MetricEstimate MetricEngine::estimate(const GeneralizedState& gs1,
                                      const GeneralizedState& gs2) {
  return impl_->run(gs1, gs2);
}

std::uint64_t MetricEngine::work_used() const { return impl_->work; }

MetricEstimate metric_estimate(const GsmpModel& model, const GeneralizedState& gs1,
                               const GeneralizedState& gs2, const RunConfig& cfg) {
  MetricEngine engine(model, cfg);
  return engine.estimate(gs1, gs2);
}

std::vector<BisimCheck> check_metric_bisimulation(
    const GsmpModel& model, const CandidateMetric& candidate,
    const std::vector<std::pair<GeneralizedState, GeneralizedState>>& pairs,
    const RunConfig& cfg, double tolerance) {
  cfg.check();
  auto cand = [&](const GeneralizedState& u, const GeneralizedState& v) {
    const double w = candidate(u, v);
    if (model.states[u.state].prop_class != model.states[v.state].prop_class &&
        w != 1.0)
      throw NotInLattice("candidate metric must equal 1 on prop-differing pairs");
    if (!(w >= 0.0 && w <= 1.0))
      throw Error("candidate metric value outside [0, 1]");
    return w;
  };
  const double eps = cfg.cluster_eps < 0.0 ? cfg.grid : cfg.cluster_eps;

  struct Bundle {
    std::vector<TraceGraph> graphs;
    std::vector<int> anchors;
    std::vector<double> weights;
  };
  auto side = [&](const GeneralizedState& gs) {
    std::vector<TraceGraph> graphs(cfg.samples);
    std::vector<int> anch(cfg.samples);
    for (int i = 0; i < cfg.samples; ++i) {
      Rng rng = stream(cfg.seed, {static_cast<std::uint64_t>(i)});
      graphs[i] = build_graph(model,
                              sample_trace(model, gs, cfg.horizon + kMatchBuffer,
                                           rng, cfg.zeno_guard, cfg.retry_budget),
                              cfg.grid);
      const auto it = std::upper_bound(graphs[i].times.begin(),
                                       graphs[i].times.end(),
                                       cfg.horizon + tol().merge);
      anch[i] = static_cast<int>(it - graphs[i].times.begin());
    }
    // The candidate itself is the cost metric here, so cluster directly in it.
    Clustering cl = cluster_measure(
        cfg.samples,
        [&](int i, int j) {
          return hausdorff_within(
                     graphs[i].times, graphs[j].times,
                     [&](int p, int q) {
                       return cand(graphs[i].points[p], graphs[j].points[q]);
                     },
                     eps / 2.0, anch[i], anch[j])
                     ? 0.0
                     : 1.0;
        },
        eps);
    Bundle b;
    b.weights = cl.weights;
    b.graphs.reserve(cl.reps.size());
    b.anchors.reserve(cl.reps.size());
    for (int r : cl.reps) {
      b.graphs.push_back(std::move(graphs[r]));
      b.anchors.push_back(anch[r]);
    }
    return b;
  };

  std::vector<BisimCheck> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const double lhs = cand(a, b);
    const Bundle sa = side(a), sb = side(b);
    const int ra = static_cast<int>(sa.graphs.size());
    const int rb = static_cast<int>(sb.graphs.size());
    Matrix c(ra, rb);
    for (int i = 0; i < ra; ++i)
      for (int j = 0; j < rb; ++j)
        c.at(i, j) = graph_hausdorff(
            sa.graphs[i].times, sb.graphs[j].times,
            [&](int p, int q) {
              return cand(sa.graphs[i].points[p], sb.graphs[j].points[q]);
            },
            sa.anchors[i], sb.anchors[j]);
    const double rhs = cfg.k * wasserstein(sa.weights, sb.weights, c).value;
    BisimCheck chk;
    chk.candidate = lhs;
    chk.rhs = rhs;
    chk.margin = lhs - rhs;
    chk.pass = chk.margin >= -tolerance;
    out.push_back(chk);
  }
  return out;
}

}  // namespace gsmpdist
