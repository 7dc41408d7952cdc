#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace evcrp::lp {

// max c^T x  subject to  A x <= b,  lower <= x <= upper.
// The all-slack basis with structurals at their lower bounds must be
// feasible (b - A * lower >= 0); otherwise the solve reports Infeasible.
// That covers every relaxation this toolkit builds, where lower bounds
// encode pinned assignments and right-hand sides are residual capacities.
struct LpProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper; // +inf allowed

  int num_rows() const { return static_cast<int>(A.rows()); }
  int num_vars() const { return static_cast<int>(A.cols()); }
};

enum class SimplexStatus { Optimal, Infeasible, IterationLimit };

enum class PivotRule { Bland, Dantzig };

struct SimplexOptions {
  PivotRule rule = PivotRule::Bland; // anti-cycling by default
  double tol = 1e-9;
  std::int64_t max_iterations = 0; // 0 -> 200 * (rows + vars) + 1000
};

enum class VarState : std::uint8_t { Basic, AtLower, AtUpper };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::Infeasible;
  Eigen::VectorXd x; // structural variables only
  double objective = 0.0;
  std::int64_t iterations = 0;
  std::vector<int> basis;          // row -> variable (slacks >= num_vars)
  std::vector<VarState> var_state; // num_vars + num_rows entries
};

SimplexResult solve(const LpProblem& lp, const SimplexOptions& options = {});

// Optimality certificate recomputed from the original data: basis duals via
// an LU factorization, reduced-cost sign checks per bound state, primal
// residuals, and the primal/dual objective gap. Independent of the
// iteratively updated tableau.
struct Certificate {
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double duality_gap = 0.0;

  bool ok(double tol) const {
    return primal_infeasibility <= tol && dual_infeasibility <= tol &&
           duality_gap <= tol;
  }
};

Certificate certify(const LpProblem& lp, const SimplexResult& result);

// Structural reduced costs c - A^T y with the basis duals y recomputed by
// LU from the original data. For a nonbasic variable at its lower bound,
// objective(x_j forced to u_j) <= objective + d_j * (u_j - l_j); the
// symmetric statement holds at the upper bound. Basic variables carry no
// such guarantee.
Eigen::VectorXd reduced_costs(const LpProblem& lp, const SimplexResult& result);

}  // namespace evcrp::lp
