#pragma once

// Dense two-phase simplex for small standard-form problems:
//   maximize c.x  subject to  A x = b,  x >= 0.
// Bland's rule throughout, so it terminates on degenerate problems.

#include <Eigen/Dense>

namespace scqc {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Eigen::VectorXd x;
    double objective = 0.0;
};

LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  double tol = 1e-11);

}  // namespace scqc
