#pragma once

// Piecewise Chebyshev interpolants. Used wherever a smooth function of time
// must be evaluated many times at near machine precision: arclength maps,
// curvature and torsion tracks, and the integrated phase field.

#include <functional>
#include <span>
#include <vector>

namespace scqc {

struct ChebFitOptions {
    int degree = 32;              // nodes per panel
    double rel_tol = 1e-13;       // tail tolerance relative to the global scale
    double abs_floor = 1e-300;    // lower bound for the tolerance
    double min_width_frac = 1e-9; // stop splitting below this fraction of the domain
    int max_panels = 1 << 16;
};

class PiecewiseChebyshev {
public:
    struct Panel {
        double a = 0.0;
        double b = 0.0;
        std::vector<double> coef;  // f = sum coef[k] T_k(x), x in [-1, 1]
    };

    PiecewiseChebyshev() = default;
    explicit PiecewiseChebyshev(std::vector<Panel> panels);

    /// Adaptive fit on [a, b]. `breaks` are interior points where f may be
    /// non-smooth; panels never straddle them. Nodes are Chebyshev points of
    /// the first kind, so f is never evaluated exactly at a panel edge.
    static PiecewiseChebyshev fit(const std::function<double(double)>& f, double a, double b,
                                  std::span<const double> breaks = {},
                                  const ChebFitOptions& opt = {});

    double operator()(double t) const;
    /// Value at t taken from the panel on the left when t is a panel edge.
    double left_limit(double t) const;
    double derivative(double t) const;

    /// Continuous antiderivative with value `c0` at the left end.
    PiecewiseChebyshev integral(double c0 = 0.0) const;

    double lower() const { return panels_.front().a; }
    double upper() const { return panels_.back().b; }
    bool empty() const { return panels_.empty(); }
    std::size_t panel_count() const { return panels_.size(); }
    const std::vector<Panel>& panels() const { return panels_; }

    /// Panel edges, including both domain ends.
    std::vector<double> knots() const;

private:
    std::size_t locate(double t) const;
    double eval_panel(std::size_t i, double t) const;
    std::vector<Panel> panels_;
};

/// Chebyshev coefficients of f sampled at first-kind nodes on [a, b].
std::vector<double> chebyshev_coefficients(const std::function<double(double)>& f, double a,
                                           double b, int n);

double clenshaw(std::span<const double> coef, double x);

/// Interpolant of the inverse of a nondecreasing piecewise Chebyshev function,
/// each node solved by safeguarded Newton. `breaks` are in the output domain.
PiecewiseChebyshev inverse_function(const PiecewiseChebyshev& forward,
                                    std::span<const double> breaks = {},
                                    const ChebFitOptions& opt = {});

}  // namespace scqc
