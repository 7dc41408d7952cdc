#include "evcrp/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace evcrp::lp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

SimplexResult solve(const LpProblem& lp, const SimplexOptions& options) {
  const int m = lp.num_rows();
  const int n = lp.num_vars();
  const int total = n + m; // structurals then slacks
  const double tol = options.tol;
  const std::int64_t max_iter =
      options.max_iterations > 0 ? options.max_iterations
                                 : 200LL * (m + n) + 1000;

  SimplexResult res;
  res.x = Eigen::VectorXd::Zero(n);
  res.basis.resize(static_cast<std::size_t>(m));
  res.var_state.assign(static_cast<std::size_t>(total), VarState::AtLower);

  auto lower_of = [&](int j) { return j < n ? lp.lower(j) : 0.0; };
  auto upper_of = [&](int j) { return j < n ? lp.upper(j) : kInf; };

  // Tableau T = B^{-1} [A | I]; starts with the slack basis, so T = [A | I].
  Eigen::MatrixXd T(m, total);
  T.leftCols(n) = lp.A;
  T.rightCols(m) = Eigen::MatrixXd::Identity(m, m);

  // Basic values with nonbasic structurals sitting at their lower bounds.
  Eigen::VectorXd xB = lp.b;
  if (n > 0) xB.noalias() -= lp.A * lp.lower;
  for (int i = 0; i < m; ++i) {
    res.basis[static_cast<std::size_t>(i)] = n + i;
    res.var_state[static_cast<std::size_t>(n + i)] = VarState::Basic;
    if (xB(i) < -tol) {
      res.status = SimplexStatus::Infeasible;
      return res;
    }
  }

  // Reduced-cost row, updated alongside the tableau.
  Eigen::VectorXd d = Eigen::VectorXd::Zero(total);
  d.head(n) = lp.c;

  Eigen::VectorXd col(m); // entering column snapshot

  std::int64_t iter = 0;
  while (true) {
    if (++iter > max_iter) {
      res.status = SimplexStatus::IterationLimit;
      res.iterations = iter - 1;
      return res;
    }

    // Entering variable. Fixed variables (zero range) can never improve.
    int enter = -1;
    int direction = 0; // +1 rising from lower, -1 falling from upper
    if (options.rule == PivotRule::Bland) {
      for (int j = 0; j < total && enter < 0; ++j) {
        const VarState st = res.var_state[static_cast<std::size_t>(j)];
        if (st == VarState::Basic) continue;
        if (upper_of(j) - lower_of(j) <= tol) continue;
        if (st == VarState::AtLower && d(j) > tol) {
          enter = j;
          direction = +1;
        } else if (st == VarState::AtUpper && d(j) < -tol) {
          enter = j;
          direction = -1;
        }
      }
    } else {
      double best = tol;
      for (int j = 0; j < total; ++j) {
        const VarState st = res.var_state[static_cast<std::size_t>(j)];
        if (st == VarState::Basic) continue;
        if (upper_of(j) - lower_of(j) <= tol) continue;
        const double score = st == VarState::AtLower ? d(j) : -d(j);
        if (score > best) {
          best = score;
          enter = j;
          direction = st == VarState::AtLower ? +1 : -1;
        }
      }
    }

    if (enter < 0) break; // optimal

    col = T.col(enter);

    // Ratio test: how far the entering variable can move.
    double limit = upper_of(enter) - lower_of(enter);
    int leave_row = -1; // -1 means a clean bound flip
    for (int i = 0; i < m; ++i) {
      const double coef = direction * col(i);
      const int bi = res.basis[static_cast<std::size_t>(i)];
      double step = kInf;
      if (coef > tol)
        step = (xB(i) - lower_of(bi)) / coef;
      else if (coef < -tol && upper_of(bi) < kInf)
        step = (upper_of(bi) - xB(i)) / (-coef);
      else
        continue;
      if (step < 0.0) step = 0.0; // numerical drift; degenerate pivot
      if (step < limit - 1e-12 ||
          (step <= limit + 1e-12 && leave_row >= 0 &&
           bi < res.basis[static_cast<std::size_t>(leave_row)])) {
        limit = std::max(step, 0.0);
        leave_row = i;
      }
    }

    if (!(limit < kInf)) {
      // All variables in this toolkit's problems are bounded above or have
      // zero objective weight, so an unbounded ray means malformed input.
      throw std::runtime_error("simplex: unbounded problem");
    }

    const double delta = direction * limit;
    xB.noalias() -= col * delta;

    if (leave_row < 0) {
      // Entering variable runs to its other bound; basis unchanged.
      res.var_state[static_cast<std::size_t>(enter)] =
          direction > 0 ? VarState::AtUpper : VarState::AtLower;
      continue;
    }

    const int leaving = res.basis[static_cast<std::size_t>(leave_row)];
    const double enter_from =
        res.var_state[static_cast<std::size_t>(enter)] == VarState::AtLower
            ? lower_of(enter)
            : upper_of(enter);

    // Leaving variable stops at whichever of its bounds it ran into.
    res.var_state[static_cast<std::size_t>(leaving)] =
        direction * col(leave_row) > 0 ? VarState::AtLower : VarState::AtUpper;
    res.var_state[static_cast<std::size_t>(enter)] = VarState::Basic;
    res.basis[static_cast<std::size_t>(leave_row)] = enter;
    xB(leave_row) = enter_from + delta;

    // Gauss-Jordan elimination on the entering column.
    const double piv = col(leave_row);
    T.row(leave_row) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave_row) continue;
      const double f = col(i);
      if (f != 0.0) T.row(i).noalias() -= f * T.row(leave_row);
    }
    const double dj = d(enter);
    if (dj != 0.0) d.noalias() -= dj * T.row(leave_row).transpose();
  }

  // Read the structural solution off the bound states and basic values.
  for (int j = 0; j < n; ++j) {
    switch (res.var_state[static_cast<std::size_t>(j)]) {
      case VarState::AtLower: res.x(j) = lp.lower(j); break;
      case VarState::AtUpper: res.x(j) = lp.upper(j); break;
      case VarState::Basic: break;
    }
  }
  for (int i = 0; i < m; ++i) {
    const int bi = res.basis[static_cast<std::size_t>(i)];
    if (bi < n) res.x(bi) = xB(i);
  }
  res.objective = lp.c.dot(res.x);
  res.iterations = iter - 1;
  res.status = SimplexStatus::Optimal;
  return res;
}

namespace {

Eigen::VectorXd basis_duals(const LpProblem& lp, const SimplexResult& result) {
  const int m = lp.num_rows();
  const int n = lp.num_vars();
  Eigen::MatrixXd B(m, m);
  Eigen::VectorXd cB(m);
  for (int i = 0; i < m; ++i) {
    const int bi = result.basis[static_cast<std::size_t>(i)];
    if (bi < n) {
      B.col(i) = lp.A.col(bi);
      cB(i) = lp.c(bi);
    } else {
      B.col(i) = Eigen::VectorXd::Unit(m, bi - n);
      cB(i) = 0.0;
    }
  }
  return B.transpose().partialPivLu().solve(cB);
}

}  // namespace

Eigen::VectorXd reduced_costs(const LpProblem& lp,
                              const SimplexResult& result) {
  const Eigen::VectorXd y = basis_duals(lp, result);
  return lp.c - lp.A.transpose() * y;
}

Certificate certify(const LpProblem& lp, const SimplexResult& result) {
  Certificate cert;
  const int m = lp.num_rows();
  const int n = lp.num_vars();
  if (result.status != SimplexStatus::Optimal) {
    cert.primal_infeasibility = kInf;
    cert.dual_infeasibility = kInf;
    cert.duality_gap = kInf;
    return cert;
  }

  // Primal side.
  const Eigen::VectorXd residual = lp.A * result.x - lp.b;
  for (int i = 0; i < m; ++i)
    cert.primal_infeasibility =
        std::max(cert.primal_infeasibility, residual(i));
  for (int j = 0; j < n; ++j) {
    cert.primal_infeasibility =
        std::max(cert.primal_infeasibility, lp.lower(j) - result.x(j));
    if (lp.upper(j) < kInf)
      cert.primal_infeasibility =
          std::max(cert.primal_infeasibility, result.x(j) - lp.upper(j));
  }

  const Eigen::VectorXd y = basis_duals(lp, result);

  // Row duals must be non-negative for <= rows in a maximization.
  for (int i = 0; i < m; ++i)
    cert.dual_infeasibility = std::max(cert.dual_infeasibility, -y(i));

  // Reduced-cost signs by bound state, and the dual objective.
  double dual_obj = y.dot(lp.b);
  const Eigen::VectorXd dvec = lp.c - lp.A.transpose() * y;
  for (int j = 0; j < n; ++j) {
    const double dj = dvec(j);
    const double width = lp.upper(j) - lp.lower(j);
    if (width > 0.0) {
      switch (result.var_state[static_cast<std::size_t>(j)]) {
        case VarState::Basic:
          cert.dual_infeasibility =
              std::max(cert.dual_infeasibility, std::abs(dj));
          break;
        case VarState::AtLower:
          cert.dual_infeasibility = std::max(cert.dual_infeasibility, dj);
          break;
        case VarState::AtUpper:
          cert.dual_infeasibility = std::max(cert.dual_infeasibility, -dj);
          break;
      }
    }
    if (dj > 0.0) {
      if (lp.upper(j) == kInf)
        cert.dual_infeasibility = std::max(cert.dual_infeasibility, dj);
      else
        dual_obj += dj * lp.upper(j);
    } else {
      dual_obj += dj * lp.lower(j);
    }
  }
  cert.duality_gap = std::abs(dual_obj - result.objective) /
                     std::max(1.0, std::abs(result.objective));
  return cert;
}

}  // namespace evcrp::lp
