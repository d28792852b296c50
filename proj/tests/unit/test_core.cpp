#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "scqc/chebyshev.hpp"
#include "scqc/errors.hpp"
#include "scqc/expr.hpp"
#include "scqc/ode.hpp"
#include "scqc/quadrature.hpp"
#include "scqc/simplex.hpp"
#include "scqc/su2.hpp"

using namespace scqc;
using std::numbers::pi;

TEST(Expression, PrecedenceAndPower) {
    EXPECT_DOUBLE_EQ(Expression::parse("1 + 2*3")(0.0), 7.0);
    EXPECT_DOUBLE_EQ(Expression::parse("2^3^2")(0.0), 512.0);
    EXPECT_DOUBLE_EQ(Expression::parse("-2^2")(0.0), -4.0);
    EXPECT_DOUBLE_EQ(Expression::parse("(1+t)/2")(3.0), 2.0);
    EXPECT_NEAR(Expression::parse("sin(pi/2) + cos(0) + sqrt(4)")(0.0), 4.0, 1e-15);
    EXPECT_NEAR(Expression::parse("sin(l)*cos(l)^2")(0.3), std::sin(0.3) * std::pow(std::cos(0.3), 2), 1e-15);
    EXPECT_NEAR(Expression::parse("exp(log(lambda))")(2.5), 2.5, 1e-14);
    EXPECT_DOUBLE_EQ(Expression::parse("1.5e1")(0.0), 15.0);
}

TEST(Expression, JetDerivativesMatchClosedForm) {
    const Expression e = Expression::parse("sin(t)*t^2");
    const double x = 0.7;
    const Jet3 j = e(Jet3::variable(x));
    const double s = std::sin(x), c = std::cos(x);
    EXPECT_NEAR(j.derivative(0), s * x * x, 1e-14);
    EXPECT_NEAR(j.derivative(1), c * x * x + 2 * x * s, 1e-14);
    EXPECT_NEAR(j.derivative(2), -s * x * x + 4 * x * c + 2 * s, 1e-13);
    EXPECT_NEAR(j.derivative(3), -c * x * x - 6 * x * s + 6 * c, 1e-13);
}

TEST(Expression, RejectsMalformedInputWithColumn) {
    for (const char* bad : {"", "1+", "sin(t", "foo(t)", "t t", "2**3", "x"}) {
        EXPECT_THROW(Expression::parse(bad), ValidationError) << bad;
    }
    try {
        Expression::parse("1 + $");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("column 5"), std::string::npos) << e.what();
    }
}

TEST(Simplex, SmallLpOptimum) {
    // max x + y s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
    Eigen::MatrixXd a(2, 4);
    a << 1, 2, 1, 0, 3, 1, 0, 1;
    Eigen::VectorXd b(2), c(4);
    b << 4, 6;
    c << 1, 1, 0, 0;
    const LpResult r = solve_lp(a, b, c);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_NEAR(r.objective, 2.8, 1e-12);
    EXPECT_NEAR(r.x[0], 1.6, 1e-12);
    EXPECT_NEAR(r.x[1], 1.2, 1e-12);
}

TEST(Simplex, InfeasibleAndUnbounded) {
    Eigen::MatrixXd a(1, 2);
    a << 1, 1;
    Eigen::VectorXd b(1), c(2);
    b << -1;
    c << 1, 0;
    EXPECT_EQ(solve_lp(a, b, c).status, LpStatus::Infeasible);
    a << 1, -1;
    b << 0;
    EXPECT_EQ(solve_lp(a, b, c).status, LpStatus::Unbounded);
}

TEST(Su2, PauliAlgebra) {
    const Mat2 i2 = Mat2::Identity();
    EXPECT_NEAR((pauli::x() * pauli::x() - i2).norm(), 0.0, 1e-15);
    EXPECT_NEAR((pauli::x() * pauli::y() - cplx(0, 1) * pauli::z()).norm(), 0.0, 1e-15);
    const Vec3 v(0.3, -1.2, 0.5);
    EXPECT_NEAR((pauli_components(sigma_dot(v)) - v).norm(), 0.0, 1e-15);
}

TEST(Su2, RotationsAndExponential) {
    EXPECT_NEAR((x_rotation(pi) - cplx(0, -1) * pauli::x()).norm(), 0.0, 1e-15);
    const Vec3 v(0.4, 0.1, -0.9);
    const Mat2 u = rotation(v);
    EXPECT_NEAR(unitarity_defect(u), 0.0, 1e-15);
    EXPECT_NEAR((expm_hermitian(0.5 * sigma_dot(v)) - u).norm(), 0.0, 1e-15);
    // Adjoint action rotates a.sigma by the right-handed angle about v, inverted.
    const Mat3 r = adjoint_rotation(z_rotation(0.3));
    EXPECT_NEAR(r(0, 0), std::cos(0.3), 1e-15);
    EXPECT_NEAR(std::abs(r(0, 1)), std::sin(0.3), 1e-15);
}

TEST(Su2, ZxzRoundTripOnRandomUnitaries) {
    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    for (int k = 0; k < 50; ++k) {
        const Mat2 u = rotation(Vec3(g(rng), g(rng), g(rng)) * 2.0);
        const ZxzAngles a = decompose_zxz(u);
        const Mat2 back = z_rotation(a.pre) * x_rotation(a.theta) * z_rotation(a.post);
        const Mat2 m = back.adjoint() * u;
        EXPECT_NEAR(std::abs(m.trace()), 2.0, 1e-12);
        EXPECT_GE(a.theta, 0.0);
        EXPECT_LE(a.theta, pi + 1e-15);
    }
}

TEST(Su2, PolarProjection) {
    Mat2 m = rotation(Vec3(0.2, 0.3, 0.4));
    m(0, 0) += 1e-7;
    const Mat2 p = polar_unitary(m);
    EXPECT_LT(unitarity_defect(p), 1e-15);
    EXPECT_LT((p - m).norm(), 2e-7);
}

TEST(Ode, RabiClosedForm) {
    const double omega = 1.3;
    auto f = [&](double, const Mat2& y) -> Mat2 { return cplx(0, -0.5 * omega) * (pauli::x() * y); };
    Rk45Stats stats;
    const Mat2 u = dormand_prince(f, 0.0, 2.0, Mat2::Identity(), {}, &stats);
    EXPECT_NEAR((u - x_rotation(2.0 * omega)).norm(), 0.0, 1e-9);
    EXPECT_GT(stats.accepted, 0);
}

TEST(Ode, Cf4IsFourthOrder) {
    // Time-dependent H with a known exact solution: rotating-frame Rabi drive.
    auto h = [](double t) -> Mat2 {
        return 0.5 * (std::cos(2 * t) * pauli::x() + std::sin(2 * t) * pauli::y()) + 0.3 * pauli::z();
    };
    auto f = [&](double t, const Mat2& y) -> Mat2 { return cplx(0, -1) * (h(t) * y); };
    Rk45Options tight;
    tight.rel_tol = 1e-13;
    tight.abs_tol = 1e-15;
    const Mat2 ref = dormand_prince(f, 0.0, 3.0, Mat2::Identity(), tight);
    const double e1 = (cf4_propagate(h, 0.0, 3.0, Mat2::Identity(), 20) - ref).norm();
    const double e2 = (cf4_propagate(h, 0.0, 3.0, Mat2::Identity(), 40) - ref).norm();
    EXPECT_GT(e1 / e2, 14.0);
    EXPECT_LT(e1 / e2, 18.5);
}

TEST(Ode, StepUnderflowNamesTime) {
    // Right-hand side undefined past t = 0.5.
    auto f = [](double t, const Mat2& y) -> Mat2 {
        return cplx(0, -1) * (t > 0.5 ? std::nan("") : 1.0) * (pauli::z() * y);
    };
    try {
        dormand_prince(f, 0.0, 1.0, Mat2::Identity());
        FAIL();
    } catch (const NumericalError& e) {
        const std::string msg = e.what();
        const auto at = msg.find("t = ");
        ASSERT_NE(at, std::string::npos) << msg;
        EXPECT_NEAR(std::stod(msg.substr(at + 4)), 0.5, 1e-9) << msg;
    }
}

TEST(Chebyshev, FitDerivativeIntegral) {
    auto f = [](double x) { return std::exp(std::sin(3 * x)); };
    const auto p = PiecewiseChebyshev::fit(f, -1.0, 2.0);
    for (double x : {-1.0, -0.3, 0.5, 1.99, 2.0}) EXPECT_NEAR(p(x), f(x), 1e-12);
    EXPECT_NEAR(p.derivative(0.4), 3 * std::cos(1.2) * f(0.4), 1e-9);
    const auto ip = p.integral();
    EXPECT_NEAR(ip(2.0), integrate(f, -1.0, 2.0), 1e-12);
}

TEST(Chebyshev, InverseOfMonotoneFunction) {
    const auto fwd = PiecewiseChebyshev::fit([](double x) { return x + 0.5 * std::sin(x); }, 0.0, 6.0);
    const auto inv = inverse_function(fwd);
    for (double y : {0.0, 1.0, 2.5, 5.0, fwd(6.0)}) EXPECT_NEAR(fwd(inv(y)), y, 1e-11);
}

TEST(Quadrature, KinkedIntegrandWithBreak) {
    auto f = [](double x) { return std::abs(x - 0.3); };
    const double breaks[] = {0.3};
    EXPECT_NEAR(integrate(f, 0.0, 1.0, breaks), 0.5 * (0.09 + 0.49), 1e-14);
}

TEST(Chebyshev, NarrowPeakMissedByCoarseSweep) {
    // Peak of height 1e6 and width 1e-3: the 16-point scale sweep never sees it.
    const auto f = [](double t) { return 1.0 / (1e-6 + (t - 0.3137) * (t - 0.3137)); };
    const auto p = PiecewiseChebyshev::fit(f, 0.0, 1.0, {});
    EXPECT_LT(p.panels().size(), 400u);
    for (int i = 0; i <= 5000; ++i) {
        const double t = i / 5000.0;
        EXPECT_LT(std::abs(p(t) - f(t)), 1e-11 * 1e6) << t;
    }
}

TEST(Chebyshev, ExhaustedBudgetThrows) {
    ChebFitOptions opt;
    opt.max_panels = 4;
    EXPECT_THROW(PiecewiseChebyshev::fit([](double t) { return std::abs(t - 0.3); }, 0.0, 1.0, {}, opt),
                 NumericalError);
}
