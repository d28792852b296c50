#pragma once

// Integrators for the 2x2 Schrödinger-type systems used by sim.

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "scqc/errors.hpp"
#include "scqc/su2.hpp"

namespace scqc {

struct Rk45Options {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double initial_step = 0.0;  // 0: pick from the interval length
    long max_steps = 20'000'000;
};

struct Rk45Stats {
    long accepted = 0;
    long rejected = 0;
};

/// Dormand-Prince 5(4) for y' = f(t, y) with y a 2x2 complex matrix, from t0 to t1.
/// Throws NumericalError naming the time where the step size underflowed.
Mat2 dormand_prince(const std::function<Mat2(double, const Mat2&)>& f, double t0, double t1,
                    Mat2 y, const Rk45Options& opt = {}, Rk45Stats* stats = nullptr);

/// One step of the fourth-order commutator-free Magnus scheme (two exponentials)
/// for i U' = H(t) U.
Mat2 cf4_step(const std::function<Mat2(double)>& hamiltonian, double t, double h, const Mat2& u);

/// Fixed-step CF4 over [t0, t1] with `steps` equal steps.
Mat2 cf4_propagate(const std::function<Mat2(double)>& hamiltonian, double t0, double t1,
                   const Mat2& u0, int steps);

}  // namespace scqc
