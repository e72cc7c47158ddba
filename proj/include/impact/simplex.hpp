#pragma once

#include <Eigen/Dense>

// Dense two-phase primal simplex for desk-scale instances:
//   max c'x  s.t.  A x <= rhs,  x free.
// Free variables are split into positive parts; Dantzig pricing with a Bland
// fallback after 2*(rows+cols) iterations.

namespace impact::lp {

struct LinearProgram {
  Eigen::MatrixXd A;
  Eigen::VectorXd rhs;
  Eigen::VectorXd c;
};

enum class LpStatus { Optimal, Unbounded, Infeasible, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::IterationLimit;
  double value = 0.0;
  Eigen::VectorXd x;      // primal optimizer (original free variables)
  Eigen::VectorXd duals;  // y >= 0 with A'y ~= c at optimality
  long iterations = 0;
};

LpSolution solve_lp(const LinearProgram& lp);

}  // namespace impact::lp
