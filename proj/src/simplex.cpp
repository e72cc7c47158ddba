#include "impact/simplex.hpp"

#include <stdexcept>
#include <vector>

namespace impact::lp {

namespace {

constexpr double kPivTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr long kMaxIterations = 100000;

struct Tableau {
  Eigen::MatrixXd T;        // rows x ncols, columns are B^{-1} A_j
  Eigen::VectorXd b;        // B^{-1} rhs, kept >= 0
  std::vector<int> basis;   // basic column per row
  int rows = 0;
  int ncols = 0;
};

// One simplex phase maximizing cost'x over the current tableau.
// allowed[j] == false bars column j from entering.
LpStatus run_phase(Tableau& t, const Eigen::VectorXd& cost, const std::vector<bool>& allowed,
                   long& iterations) {
  const long bland_after = 2L * (t.rows + t.ncols);
  long local = 0;
  while (true) {
    if (++iterations > kMaxIterations) return LpStatus::IterationLimit;
    const bool bland = ++local > bland_after;

    // Reduced costs: d_j = cost_j - cost_B' T_j.
    Eigen::VectorXd cb(t.rows);
    for (int i = 0; i < t.rows; ++i) cb[i] = cost[t.basis[i]];

    int enter = -1;
    double best = kCostTol;
    for (int j = 0; j < t.ncols; ++j) {
      if (!allowed[j]) continue;
      double d = cost[j] - cb.dot(t.T.col(j));
      if (d > best) {
        enter = j;
        if (bland) break;
        best = d;
      }
    }
    if (enter < 0) return LpStatus::Optimal;

    // Ratio test.
    int leave = -1;
    double ratio = 0.0;
    for (int i = 0; i < t.rows; ++i) {
      double aij = t.T(i, enter);
      if (aij > kPivTol) {
        double r = t.b[i] / aij;
        if (leave < 0 || r < ratio - 1e-12 ||
            (r < ratio + 1e-12 && t.basis[i] < t.basis[leave])) {
          leave = i;
          ratio = r;
        }
      }
    }
    if (leave < 0) return LpStatus::Unbounded;

    // Pivot.
    double piv = t.T(leave, enter);
    t.T.row(leave) /= piv;
    t.b[leave] /= piv;
    for (int i = 0; i < t.rows; ++i) {
      if (i == leave) continue;
      double f = t.T(i, enter);
      if (f != 0.0) {
        t.T.row(i) -= f * t.T.row(leave);
        t.b[i] -= f * t.b[leave];
      }
    }
    t.basis[leave] = enter;
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int m = static_cast<int>(lp.A.rows());
  const int n = static_cast<int>(lp.A.cols());
  if (lp.rhs.size() != m || lp.c.size() != n)
    throw std::invalid_argument("solve_lp: inconsistent LP dimensions");

  // Columns: [u (n), w (n), slack (m), artificial (<= m)], x = u - w.
  std::vector<int> art_rows;
  for (int i = 0; i < m; ++i)
    if (lp.rhs[i] < 0.0) art_rows.push_back(i);
  const int nart = static_cast<int>(art_rows.size());
  const int ncols = 2 * n + m + nart;

  Tableau t;
  t.rows = m;
  t.ncols = ncols;
  t.T = Eigen::MatrixXd::Zero(m, ncols);
  t.b = lp.rhs;
  t.basis.assign(m, -1);

  t.T.block(0, 0, m, n) = lp.A;
  t.T.block(0, n, m, n) = -lp.A;
  for (int i = 0; i < m; ++i) t.T(i, 2 * n + i) = 1.0;

  // Negative-rhs rows are negated so b >= 0; those rows get artificials.
  int a = 0;
  for (int i = 0; i < m; ++i) {
    if (lp.rhs[i] < 0.0) {
      t.T.row(i) = -t.T.row(i);
      t.b[i] = -t.b[i];
      t.T(i, 2 * n + m + a) = 1.0;
      t.basis[i] = 2 * n + m + a;
      ++a;
    } else {
      t.basis[i] = 2 * n + i;
    }
  }

  LpSolution sol;

  if (nart > 0) {
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(ncols);
    for (int j = 2 * n + m; j < ncols; ++j) c1[j] = -1.0;
    std::vector<bool> allowed(ncols, true);
    LpStatus st = run_phase(t, c1, allowed, sol.iterations);
    if (st == LpStatus::IterationLimit) {
      sol.status = st;
      return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (t.basis[i] >= 2 * n + m) infeas += t.b[i];
    if (infeas > 1e-7) {
      sol.status = LpStatus::Infeasible;
      return sol;
    }
    // Drive remaining zero-level artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
      if (t.basis[i] < 2 * n + m) continue;
      int enter = -1;
      for (int j = 0; j < 2 * n + m; ++j) {
        if (std::abs(t.T(i, j)) > kPivTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) continue;  // redundant row
      double piv = t.T(i, enter);
      t.T.row(i) /= piv;
      t.b[i] /= piv;
      for (int k = 0; k < m; ++k) {
        if (k == i) continue;
        double f = t.T(k, enter);
        if (f != 0.0) {
          t.T.row(k) -= f * t.T.row(i);
          t.b[k] -= f * t.b[i];
        }
      }
      t.basis[i] = enter;
    }
  }

  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(ncols);
  c2.head(n) = lp.c;
  c2.segment(n, n) = -lp.c;
  std::vector<bool> allowed(ncols, true);
  for (int j = 2 * n + m; j < ncols; ++j) allowed[j] = false;
  LpStatus st = run_phase(t, c2, allowed, sol.iterations);
  sol.status = st;
  if (st != LpStatus::Optimal) return sol;

  Eigen::VectorXd full = Eigen::VectorXd::Zero(ncols);
  for (int i = 0; i < m; ++i) full[t.basis[i]] = t.b[i];
  sol.x = full.head(n) - full.segment(n, n);
  sol.value = lp.c.dot(sol.x);

  // Dual of slack column i is cost_B' T(:, slack_i).
  Eigen::VectorXd cb(m);
  for (int i = 0; i < m; ++i) cb[i] = c2[t.basis[i]];
  sol.duals = Eigen::VectorXd(m);
  for (int i = 0; i < m; ++i) sol.duals[i] = cb.dot(t.T.col(2 * n + i));
  return sol;
}

}  // namespace impact::lp
