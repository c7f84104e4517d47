#pragma once

#include <functional>
#include <vector>

#include "gsmpdist/errors.hpp"

namespace gsmpdist {

struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}
  double at(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
};

struct TransportResult {
  double value = 0.0;
  Matrix coupling;              // rows x cols, marginals p and q
  std::vector<double> row_dual; // u_i
  std::vector<double> col_dual; // v_j, with u_i + v_j <= c_ij at optimality
};

// Exact Kantorovich optimum for discrete weights p, q (each nonnegative,
// summing to 1 within tol().weight_sum) under the given cost matrix.
// Successive shortest augmenting paths with Johnson potentials; deterministic.
TransportResult wasserstein(const std::vector<double>& p,
                            const std::vector<double>& q, const Matrix& cost);

// Value of the dual objective sum(p*hp) - sum(q*hq) after verifying
// 0 <= h <= 1 and |hp_i - hq_j| <= cost(i,j) (within tol().dual_feas);
// throws InfeasibleWitness otherwise. Any feasible witness lower-bounds the
// primal optimum (weak duality).
double dual_lower_bound(const std::vector<double>& p, const std::vector<double>& q,
                        const Matrix& cost, const std::vector<double>& hp,
                        const std::vector<double>& hq);

// Feasible witness whose dual value matches the primal optimum (tested to
// 1e-6 on small instances): solver duals tightened by a double c-transform,
// shifted into [0, 1]. Requires the cost matrix to be the cross-section of a
// metric clamped at 1 on a shared point set (true for every pseudometric cost
// built by this library); a cost admitting shortcuts through the other side
// has no exact symmetric witness and raises InfeasibleWitness.
std::pair<std::vector<double>, std::vector<double>> optimal_dual_witness(
    const std::vector<double>& p, const std::vector<double>& q, const Matrix& cost);

struct Clustering {
  std::vector<int> reps;       // representative sample indices
  std::vector<double> weights; // probability of each representative's cell
  std::vector<int> assign;     // sample index -> index into reps
};

// Greedy eps-net over sample indices 0..n-1: a sample joins the first
// representative within eps/2, so every cell has diameter <= eps and the
// clustered measure is within 2*eps of the empirical one in Wasserstein
// distance. Deterministic in input order.
Clustering cluster_measure(int n, const std::function<double(int, int)>& dist,
                           double eps);

}  // namespace gsmpdist
