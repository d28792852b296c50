#include "scqc/simplex.hpp"

#include <vector>

#include "scqc/errors.hpp"

namespace scqc {

namespace {

// Tableau with rows 0..m-1 constraints and row m the (negated) objective.
class Tableau {
public:
    Tableau(Eigen::MatrixXd t, std::vector<int> basis, double tol)
        : t_(std::move(t)), basis_(std::move(basis)), tol_(tol) {}

    // Returns false when unbounded. `allowed` limits entering columns.
    bool optimize(int allowed) {
        const int m = static_cast<int>(basis_.size());
        for (int iter = 0; iter < 100000; ++iter) {
            int enter = -1;
            for (int j = 0; j < allowed; ++j)
                if (t_(m, j) < -tol_) {
                    enter = j;
                    break;
                }
            if (enter < 0) return true;
            int leave = -1;
            double best = 0.0;
            for (int i = 0; i < m; ++i) {
                if (t_(i, enter) > tol_) {
                    const double ratio = t_(i, t_.cols() - 1) / t_(i, enter);
                    if (leave < 0 || ratio < best - tol_ ||
                        (ratio <= best + tol_ && basis_[i] < basis_[leave])) {
                        leave = i;
                        best = ratio;
                    }
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
        throw NumericalError("simplex: iteration limit reached");
    }

    void pivot(int row, int col) {
        t_.row(row) /= t_(row, col);
        for (int i = 0; i < t_.rows(); ++i)
            if (i != row && t_(i, col) != 0.0) t_.row(i) -= t_(i, col) * t_.row(row);
        basis_[row] = col;
    }

    Eigen::MatrixXd& table() { return t_; }
    std::vector<int>& basis() { return basis_; }

private:
    Eigen::MatrixXd t_;
    std::vector<int> basis_;
    double tol_;
};

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                  double tol) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (b.size() != m || c.size() != n) throw ValidationError("solve_lp: dimension mismatch");

    // Phase 1: artificials n..n+m-1, minimize their sum.
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m + 1, n + m + 1);
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) {
        const double sign = b(i) < 0.0 ? -1.0 : 1.0;
        t.row(i).head(n) = sign * a.row(i);
        t(i, n + i) = 1.0;
        t(i, n + m) = sign * b(i);
        basis[i] = n + i;
    }
    for (int i = 0; i < m; ++i) t.row(m) -= t.row(i);
    for (int i = 0; i < m; ++i) t(m, n + i) = 0.0;

    Tableau tab(std::move(t), std::move(basis), tol);
    tab.optimize(n + m);
    LpResult out;
    const double scale = 1.0 + b.cwiseAbs().maxCoeff();
    if (-tab.table()(m, n + m) > 1e3 * tol * scale) {
        out.status = LpStatus::Infeasible;
        return out;
    }
    // Drive remaining artificials out of the basis where possible.
    for (int i = 0; i < m; ++i) {
        if (tab.basis()[i] < n) continue;
        for (int j = 0; j < n; ++j)
            if (std::abs(tab.table()(i, j)) > tol) {
                tab.pivot(i, j);
                break;
            }
    }

    // Phase 2 on the original objective; artificial columns are frozen out.
    Eigen::MatrixXd& tt = tab.table();
    tt.row(m).setZero();
    tt.row(m).head(n) = -c.transpose();
    for (int i = 0; i < m; ++i) {
        const int bi = tab.basis()[i];
        if (bi < n && tt(m, bi) != 0.0) tt.row(m) -= tt(m, bi) * tt.row(i);
    }
    if (!tab.optimize(n)) {
        out.status = LpStatus::Unbounded;
        return out;
    }
    out.status = LpStatus::Optimal;
    out.x = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < m; ++i)
        if (tab.basis()[i] < n) out.x(tab.basis()[i]) = tt(i, n + m);
    out.objective = c.dot(out.x);
    return out;
}

}  // namespace scqc
