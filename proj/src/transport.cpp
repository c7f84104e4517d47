#include "gsmpdist/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gsmpdist/config.hpp"

namespace gsmpdist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_weights(const std::vector<double>& w, const char* side) {
  double sum = 0.0;
  for (double x : w) {
    if (x < 0) throw BadDistribution(std::string(side) + ": negative weight");
    sum += x;
  }
  if (std::abs(sum - 1.0) > tol().weight_sum)
    throw BadDistribution(std::string(side) + ": weights sum to " +
                          std::to_string(sum));
}

}  // namespace

TransportResult wasserstein(const std::vector<double>& p,
                            const std::vector<double>& q, const Matrix& cost) {
  const int n = static_cast<int>(p.size());
  const int m = static_cast<int>(q.size());
  if (cost.rows != n || cost.cols != m)
    throw Error("wasserstein: cost matrix shape mismatch");
  check_weights(p, "p");
  check_weights(q, "q");

  TransportResult res;
  res.coupling = Matrix(n, m, 0.0);
  std::vector<double> supply = p, demand = q;

  // Node x is row x for x < n, else column x - n. Row potential pot[i]
  // equals -u_i and column potential pot[n+j] equals v_j, so the forward
  // reduced cost c_ij + pot[i] - pot[n+j] = c_ij - u_i - v_j stays >= 0
  // (the dual feasibility u_i + v_j <= c_ij).
  const int nodes = n + m;
  std::vector<double> pot(nodes, 0.0), dist(nodes);
  std::vector<int> parent(nodes);  // cols: feeding row; rows: feeding col
  std::vector<char> done(nodes);

  // Residual mass below this is treated as exhausted; weights are ~1e-2..1,
  // so 1e-13 is far below any meaningful weight but above accumulated error.
  const double kMassEps = 1e-13;

  while (true) {
    bool any = false;
    for (int i = 0; i < n; ++i) any = any || supply[i] > kMassEps;
    if (!any) break;

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (int i = 0; i < n; ++i)
      if (supply[i] > kMassEps) dist[i] = 0.0;

    int target = -1;
    while (true) {
      int best = -1;
      double bd = kInf;
      for (int x = 0; x < nodes; ++x)
        if (!done[x] && dist[x] < bd) {
          bd = dist[x];
          best = x;
        }
      if (best < 0) break;
      done[best] = 1;
      if (best >= n && demand[best - n] > kMassEps) {
        target = best - n;
        break;
      }
      if (best < n) {
        const int i = best;
        for (int j = 0; j < m; ++j) {
          const double rc = std::max(0.0, cost.at(i, j) + pot[i] - pot[n + j]);
          if (dist[i] + rc < dist[n + j]) {
            dist[n + j] = dist[i] + rc;
            parent[n + j] = i;
          }
        }
      } else {
        const int j = best - n;
        for (int i = 0; i < n; ++i) {
          if (res.coupling.at(i, j) <= 0) continue;
          const double rc = std::max(0.0, -cost.at(i, j) + pot[n + j] - pot[i]);
          if (dist[n + j] + rc < dist[i]) {
            dist[i] = dist[n + j] + rc;
            parent[i] = j;
          }
        }
      }
    }
    if (target < 0)
      throw Error("wasserstein: disconnected transportation instance");

    const double dt = dist[n + target];
    for (int x = 0; x < nodes; ++x) pot[x] += std::min(dist[x], dt);

    double bottleneck = demand[target];
    for (int x = n + target; true;) {
      if (x >= n) {
        const int i = parent[x];
        if (i < 0) throw Error("wasserstein: internal path corruption");
        if (parent[i] < 0) {
          bottleneck = std::min(bottleneck, supply[i]);
          break;
        }
        x = i;
      } else {
        const int j = parent[x];
        bottleneck = std::min(bottleneck, res.coupling.at(x, j));
        x = n + j;
      }
    }

    for (int x = n + target; true;) {
      if (x >= n) {
        const int i = parent[x];
        res.coupling.at(i, x - n) += bottleneck;
        if (parent[i] < 0) {
          supply[i] -= bottleneck;
          break;
        }
        x = i;
      } else {
        const int j = parent[x];
        res.coupling.at(x, j) -= bottleneck;
        x = n + j;
      }
    }
    demand[target] -= bottleneck;
  }

  double value = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) value += res.coupling.at(i, j) * cost.at(i, j);
  res.value = value;
  res.row_dual.assign(n, 0.0);
  res.col_dual.assign(m, 0.0);
  for (int i = 0; i < n; ++i) res.row_dual[i] = -pot[i];
  for (int j = 0; j < m; ++j) res.col_dual[j] = pot[n + j];
  return res;
}

double dual_lower_bound(const std::vector<double>& p, const std::vector<double>& q,
                        const Matrix& cost, const std::vector<double>& hp,
                        const std::vector<double>& hq) {
  const int n = static_cast<int>(p.size());
  const int m = static_cast<int>(q.size());
  if (static_cast<int>(hp.size()) != n || static_cast<int>(hq.size()) != m)
    throw Error("dual_lower_bound: witness shape mismatch");
  check_weights(p, "p");
  check_weights(q, "q");
  const double slack = tol().dual_feas;
  for (double h : hp)
    if (h < -slack || h > 1 + slack)
      throw InfeasibleWitness("witness leaves [0, 1]");
  for (double h : hq)
    if (h < -slack || h > 1 + slack)
      throw InfeasibleWitness("witness leaves [0, 1]");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j)
      if (std::abs(hp[i] - hq[j]) > cost.at(i, j) + slack)
        throw InfeasibleWitness("witness violates the Lipschitz constraint");
  double val = 0.0;
  for (int i = 0; i < n; ++i) val += p[i] * hp[i];
  for (int j = 0; j < m; ++j) val -= q[j] * hq[j];
  return val;
}

std::pair<std::vector<double>, std::vector<double>> optimal_dual_witness(
    const std::vector<double>& p, const std::vector<double>& q,
    const Matrix& cost) {
  const TransportResult res = wasserstein(p, q, cost);
  const int n = static_cast<int>(p.size());
  const int m = static_cast<int>(q.size());
  // hp - hq form: hp = u, hq = -v gives sum(p hp) - sum(q hq) = dual value.
  std::vector<double> hp(n), hq(m);
  for (int i = 0; i < n; ++i) hp[i] = res.row_dual[i];
  for (int j = 0; j < m; ++j) hq[j] = -res.col_dual[j];

  // Double c-transform. For a cost that is (the cross-part of) a metric
  // clamped at 1 this is exact: hp rises (objective up), hq falls (objective
  // up), the result satisfies both Lipschitz sides, and with weak duality the
  // value is pinned to the primal optimum. Repeating the pair of transforms
  // handles numerically-almost-metric inputs; genuinely non-metric costs have
  // no exact symmetric witness at all, which we surface as InfeasibleWitness.
  for (int round = 0; round < 4; ++round) {
    for (int i = 0; i < n; ++i) {
      double best = kInf;
      for (int j = 0; j < m; ++j) best = std::min(best, hq[j] + cost.at(i, j));
      hp[i] = best;
    }
    for (int j = 0; j < m; ++j) {
      double best = -kInf;
      for (int i = 0; i < n; ++i) best = std::max(best, hp[i] - cost.at(i, j));
      hq[j] = best;
    }
    double viol = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j)
        viol = std::max(viol, std::abs(hp[i] - hq[j]) - cost.at(i, j));
    if (viol <= tol().dual_feas / 2) break;
    if (round == 3)
      throw InfeasibleWitness(
          "optimal_dual_witness requires a metrically closed cost matrix");
  }

  // For clamped-metric costs every pairwise difference (cross via the
  // constraints, within-side via the reverse triangle inequality) is <= 1,
  // so one shift lands the witness in [0, 1]; the clamp is a no-op guard.
  double lo = kInf;
  for (double h : hp) lo = std::min(lo, h);
  for (double h : hq) lo = std::min(lo, h);
  for (double& h : hp) h = std::clamp(h - lo, 0.0, 1.0);
  for (double& h : hq) h = std::clamp(h - lo, 0.0, 1.0);
  return {hp, hq};
}

Clustering cluster_measure(int n, const std::function<double(int, int)>& dist,
                           double eps) {
  if (n <= 0) throw Error("cluster_measure: empty sample set");
  Clustering c;
  c.assign.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    for (size_t r = 0; r < c.reps.size(); ++r) {
      if (dist(i, c.reps[r]) <= eps / 2) {
        c.assign[i] = static_cast<int>(r);
        break;
      }
    }
    if (c.assign[i] < 0) {
      c.assign[i] = static_cast<int>(c.reps.size());
      c.reps.push_back(i);
    }
  }
  c.weights.assign(c.reps.size(), 0.0);
  for (int i = 0; i < n; ++i) c.weights[c.assign[i]] += 1.0 / n;
  return c;
}

}  // namespace gsmpdist
