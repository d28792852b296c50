#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/hull_oracle.hpp"
#include "scqc/errors.hpp"
#include "scqc/robustness/robustness.hpp"

using namespace scqc;
using std::numbers::pi;

namespace {

ArclengthCurve expr_curve(const char* x, const char* y, const char* z, double a, double b) {
    return arclength_reparameterize(SpaceCurve::from_expressions(
        {Expression::parse(x), Expression::parse(y), Expression::parse(z)}, a, b));
}

ArclengthCurve parity() { return expr_curve("sin(l/2)", "sin(l)*cos(l)^2", "sin(l)", 0.0, 4.0 * pi); }

}  // namespace

TEST(Residuals, ParityCurveCancelsAllThree) {
    const auto c = parity();
    EXPECT_LT(closure_residual(c).norm(), 1e-8);
    EXPECT_LT(tangent_area_residual(c).norm(), 1e-8);
    EXPECT_LT(projected_area_residual(c).norm(), 1e-8);
    const auto rep = robustness_report(c);
    EXPECT_TRUE(rep.closure_ok());
    EXPECT_TRUE(rep.tangent_area_ok());
    EXPECT_TRUE(rep.projected_area_ok());
    EXPECT_TRUE(to_json(rep)["doubly_robust"].get<bool>());
}

TEST(Residuals, CircleSweepsFullArea) {
    const auto c = expr_curve("2*cos(t)", "2*sin(t)", "0", 0.0, 2.0 * pi);
    EXPECT_LT(closure_residual(c).norm(), 1e-12);
    // Tantrix is the unit equator traversed once: area 2 pi about z.
    EXPECT_NEAR((tangent_area_residual(c) - Vec3(0, 0, 2 * pi)).norm(), 0.0, 1e-11);
    EXPECT_NEAR((projected_area_residual(c) - Vec3(0, 0, 8 * pi)).norm(), 0.0, 1e-10);
    const auto rep = robustness_report(c);
    EXPECT_TRUE(rep.closure_ok());
    EXPECT_FALSE(rep.tangent_area_ok());
}

TEST(Residuals, OpenHelixClosureIsDisplacement) {
    const auto c = expr_curve("cos(t)", "sin(t)", "t", 0.0, 3.0);
    const Vec3 d = c.position(c.total_time()) - c.position(0.0);
    EXPECT_NEAR((closure_residual(c) - d).norm(), 0.0, 1e-11);
    EXPECT_NEAR(d.z(), 3.0, 1e-12);
}

TEST(Magnus, FirstOrderTermForCircle) {
    const auto c = expr_curve("cos(t)", "sin(t)", "0", 0.0, 2.0 * pi);
    const Mat2 p = first_order_magnus(c, {0.1, 0.0});
    EXPECT_NEAR((pauli_components(p) - Vec3(0, 0, -0.1 * pi)).norm(), 0.0, 1e-11);
    EXPECT_NEAR(magnus_norm(p), 0.1 * pi, 1e-11);
    // Closed curve: dephasing term vanishes.
    EXPECT_LT(magnus_norm(first_order_magnus(c, {0.0, 0.3})), 1e-12);
}

TEST(DynamicalPhase, CircleAndDetuning) {
    const auto c = expr_curve("cos(t)", "sin(t)", "0", 0.0, 2.0 * pi);
    EXPECT_NEAR(dynamical_phase(c, {}, Vec3::UnitZ()), -pi, 1e-11);
    // Constant detuning adds delta times the closure residual, zero here.
    EXPECT_NEAR(dynamical_phase(c, [](double) { return 0.7; }, Vec3::UnitZ()), -pi, 1e-11);
    EXPECT_NEAR(dynamical_phase(c, {}, Vec3::UnitX()), 0.0, 1e-11);
}

TEST(Closability, SixAxesGiveUniformWeights) {
    std::vector<Vec3> p;
    for (int k = 0; k < 3; ++k) {
        p.push_back(Vec3::Unit(k));
        p.push_back(-Vec3::Unit(k));
    }
    const auto r = closability_check(p);
    EXPECT_TRUE(r.closable);
    EXPECT_TRUE(r.interior);
    ASSERT_EQ(r.weights.size(), 6u);
    for (double w : r.weights) EXPECT_NEAR(w, 1.0 / 6.0, 1e-12);
}

TEST(Closability, HemisphereIsNotClosable) {
    const std::vector<Vec3> p{{1, 0, 0.2}, {0, 1, 0.2}, {-1, 0, 0.2}, {0, -1, 0.2}};
    const auto r = closability_check(p);
    EXPECT_FALSE(r.closable);
    EXPECT_TRUE(r.weights.empty());
    EXPECT_FALSE(to_json(r)["closable"].get<bool>());
}

TEST(Closability, BoundaryWitnessIsNotInterior) {
    // Origin on an edge: only the antipodal pair can carry weight.
    const std::vector<Vec3> p{{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, 1, 1}};
    const auto r = closability_check(p);
    EXPECT_TRUE(r.closable);
    EXPECT_FALSE(r.interior);
}

TEST(Closability, DegenerateInputIsRejected) {
    EXPECT_THROW(closability_check(std::vector<Vec3>(5, Vec3::Zero())), ValidationError);
    EXPECT_THROW(closability_check(std::vector<Vec3>{}), ValidationError);
}

TEST(Closability, AgreesWithFacetOracleOnRandomClouds) {
    std::mt19937 rng(2024);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> shift(0.0, 1.2);
    int closable = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const Vec3 c = Vec3(g(rng), g(rng), g(rng)).normalized() * shift(rng);
        std::vector<Vec3> p;
        const int n = 5 + trial % 12;
        for (int k = 0; k < n; ++k) p.push_back((Vec3(g(rng), g(rng), g(rng)).normalized() + c).normalized());
        const bool lp = closability_check(p).closable;
        EXPECT_EQ(lp, oracle::origin_in_hull(p)) << "trial " << trial;
        closable += lp;
    }
    // The suite must exercise both outcomes.
    EXPECT_GT(closable, 20);
    EXPECT_LT(closable, 130);
}

TEST(Closability, TangentOfParityIsClosable) {
    const auto track = FrenetTrack::build(parity());
    const auto r = closability_check(tangent_of(track));
    EXPECT_TRUE(r.closable);
}
