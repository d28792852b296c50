#include "scqc/geom/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "scqc/errors.hpp"

namespace scqc {

class SpaceCurve::Source {
public:
    virtual ~Source() = default;
    virtual double lower() const = 0;
    virtual double upper() const = 0;
    virtual Vec3 position(double lambda) const = 0;
    virtual CurveJet derivatives(double lambda, Side side) const = 0;
    virtual const std::vector<double>& breaks() const = 0;
    virtual DerivativeScheme scheme() const = 0;
};

namespace {

Vec3 values(const std::array<Jet3, 3>& j, std::size_t order) {
    return {j[0].derivative(order), j[1].derivative(order), j[2].derivative(order)};
}

class AnalyticSource final : public SpaceCurve::Source {
public:
    AnalyticSource(PositionJetFn fn, double a, double b, std::vector<double> breaks)
        : fn_(std::move(fn)), a_(a), b_(b), breaks_(std::move(breaks)) {}

    double lower() const override { return a_; }
    double upper() const override { return b_; }
    Vec3 position(double lambda) const override { return values(fn_(Jet3(lambda)), 0); }
    CurveJet derivatives(double lambda, Side) const override {
        const auto j = fn_(Jet3::variable(lambda));
        return {values(j, 0), values(j, 1), values(j, 2), values(j, 3)};
    }
    const std::vector<double>& breaks() const override { return breaks_; }
    DerivativeScheme scheme() const override { return DerivativeScheme::Analytic; }

private:
    PositionJetFn fn_;
    double a_, b_;
    std::vector<double> breaks_;
};

class VelocitySource final : public SpaceCurve::Source {
public:
    VelocitySource(std::vector<VelocityPiece> pieces, const Vec3& origin)
        : pieces_(std::move(pieces)), origin_(origin) {
        if (pieces_.empty()) throw ValidationError("velocity curve: no pieces");
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            if (!(pieces_[i].upper > pieces_[i].lower))
                throw ValidationError("velocity curve: empty piece " + std::to_string(i));
            if (i > 0 && pieces_[i].lower != pieces_[i - 1].upper)
                throw ValidationError("velocity curve: pieces are not contiguous at piece " +
                                      std::to_string(i));
            if (i > 0) breaks_.push_back(pieces_[i].lower);
        }
        ChebFitOptions opt;
        opt.rel_tol = 1e-14;
        for (int c = 0; c < 3; ++c) {
            auto comp = [this, c](double x) {
                return pieces_[locate(x, Side::Right)].velocity(Jet3(x))[c].value();
            };
            integral_[c] = PiecewiseChebyshev::fit(comp, lower(), upper(), breaks_, opt).integral(0.0);
        }
    }

    double lower() const override { return pieces_.front().lower; }
    double upper() const override { return pieces_.back().upper; }
    Vec3 position(double lambda) const override {
        return origin_ + Vec3(integral_[0](lambda), integral_[1](lambda), integral_[2](lambda));
    }
    CurveJet derivatives(double lambda, Side side) const override {
        const auto v = pieces_[locate(lambda, side)].velocity(Jet3::variable(lambda));
        return {position(lambda), values(v, 0), values(v, 1), values(v, 2)};
    }
    const std::vector<double>& breaks() const override { return breaks_; }
    DerivativeScheme scheme() const override { return DerivativeScheme::Analytic; }

private:
    std::size_t locate(double x, Side side) const {
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const bool inside = side == Side::Right ? x < pieces_[i].upper : x <= pieces_[i].upper;
            if (inside) return i;
        }
        return pieces_.size() - 1;
    }

    std::vector<VelocityPiece> pieces_;
    Vec3 origin_;
    std::vector<double> breaks_;
    std::array<PiecewiseChebyshev, 3> integral_;
};

class SampledSource final : public SpaceCurve::Source {
public:
    SampledSource(std::vector<Vec3> pts, double a, double b) : pts_(std::move(pts)), a_(a), b_(b) {
        if (pts_.size() < 4) throw ValidationError("sampled curve: need at least 4 samples");
        if (!(b > a)) throw ValidationError("sampled curve: empty domain");
        step_ = (b_ - a_) / static_cast<double>(pts_.size() - 1);
        fd_step_ = (b_ - a_) / (8.0 * static_cast<double>(pts_.size()));
    }

    double lower() const override { return a_; }
    double upper() const override { return b_; }

    // Degree-7 Lagrange interpolation on the 8 samples nearest to lambda.
    Vec3 position(double lambda) const override {
        const int n = static_cast<int>(pts_.size());
        const int width = std::min(8, n);
        const double u = (lambda - a_) / step_;
        int first = static_cast<int>(std::floor(u)) - width / 2 + 1;
        first = std::clamp(first, 0, n - width);
        Vec3 out = Vec3::Zero();
        for (int i = 0; i < width; ++i) {
            double w = 1.0;
            for (int j = 0; j < width; ++j)
                if (j != i) w *= (u - (first + j)) / static_cast<double>(i - j);
            out += w * pts_[first + i];
        }
        return out;
    }

    CurveJet derivatives(double lambda, Side) const override {
        const double h = fd_step_;
        auto p = [&](int k) { return position(lambda + k * h); };
        const Vec3 m3 = p(-3), m2 = p(-2), m1 = p(-1), z = p(0), p1 = p(1), p2 = p(2), p3 = p(3);
        CurveJet j;
        j.r = z;
        j.d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
        j.d2 = (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h);
        j.d3 = (-p3 + 8.0 * p2 - 13.0 * p1 + 13.0 * m1 - 8.0 * m2 + m3) / (8.0 * h * h * h);
        return j;
    }
    const std::vector<double>& breaks() const override { return breaks_; }
    DerivativeScheme scheme() const override { return DerivativeScheme::FiniteDifference; }

private:
    std::vector<Vec3> pts_;
    double a_, b_, step_, fd_step_;
    std::vector<double> breaks_;
};

class RotatedSource final : public SpaceCurve::Source {
public:
    RotatedSource(std::shared_ptr<const SpaceCurve::Source> base, const Mat3& r)
        : base_(std::move(base)), r_(r) {}

    double lower() const override { return base_->lower(); }
    double upper() const override { return base_->upper(); }
    Vec3 position(double lambda) const override { return r_ * base_->position(lambda); }
    CurveJet derivatives(double lambda, Side side) const override {
        const CurveJet j = base_->derivatives(lambda, side);
        return {r_ * j.r, r_ * j.d1, r_ * j.d2, r_ * j.d3};
    }
    const std::vector<double>& breaks() const override { return base_->breaks(); }
    DerivativeScheme scheme() const override { return base_->scheme(); }

private:
    std::shared_ptr<const SpaceCurve::Source> base_;
    Mat3 r_;
};

}  // namespace

SpaceCurve SpaceCurve::analytic(PositionJetFn position, double lower, double upper,
                                std::vector<double> breaks) {
    if (!(upper > lower)) throw ValidationError("curve domain is empty");
    return SpaceCurve(
        std::make_shared<AnalyticSource>(std::move(position), lower, upper, std::move(breaks)));
}

SpaceCurve SpaceCurve::from_expressions(const std::array<Expression, 3>& c, double lower,
                                        double upper) {
    return analytic(
        [c](const Jet3& x) { return std::array<Jet3, 3>{c[0](x), c[1](x), c[2](x)}; }, lower,
        upper);
}

SpaceCurve SpaceCurve::from_velocity(std::vector<VelocityPiece> pieces, const Vec3& origin) {
    return SpaceCurve(std::make_shared<VelocitySource>(std::move(pieces), origin));
}

SpaceCurve SpaceCurve::sampled(std::vector<Vec3> points, double lower, double upper) {
    return SpaceCurve(std::make_shared<SampledSource>(std::move(points), lower, upper));
}

double SpaceCurve::lower() const { return src_->lower(); }
double SpaceCurve::upper() const { return src_->upper(); }
Vec3 SpaceCurve::position(double lambda) const { return src_->position(lambda); }
CurveJet SpaceCurve::derivatives(double lambda, Side side) const {
    return src_->derivatives(lambda, side);
}
const std::vector<double>& SpaceCurve::breaks() const { return src_->breaks(); }
DerivativeScheme SpaceCurve::scheme() const { return src_->scheme(); }

SpaceCurve SpaceCurve::rotated(const Mat3& rotation) const {
    return SpaceCurve(std::make_shared<RotatedSource>(src_, rotation));
}

ArclengthCurve::ArclengthCurve(SpaceCurve curve, PiecewiseChebyshev time_of_param,
                               PiecewiseChebyshev param_of_time)
    : curve_(std::move(curve)),
      time_of_param_(std::move(time_of_param)),
      param_of_time_(std::move(param_of_time)),
      total_(time_of_param_(curve_.upper())) {}

double ArclengthCurve::parameter(double t) const {
    if (t <= 0.0) return curve_.lower();
    if (t >= total_) return curve_.upper();
    return param_of_time_(t);
}

double ArclengthCurve::time(double lambda) const {
    if (lambda <= curve_.lower()) return 0.0;
    if (lambda >= curve_.upper()) return total_;
    return time_of_param_(lambda);
}

Vec3 ArclengthCurve::position(double t) const { return curve_.position(parameter(t)); }

Vec3 ArclengthCurve::tangent(double t, Side side) const {
    return curve_.derivatives(parameter(t), side).d1.normalized();
}

std::vector<double> ArclengthCurve::time_breaks() const {
    std::vector<double> out;
    for (double b : curve_.breaks()) out.push_back(time(b));
    return out;
}

ArclengthCurve arclength_reparameterize(const SpaceCurve& curve, const ArclengthOptions& opt) {
    if (opt.n_samples < 16) throw ValidationError("arclength_reparameterize: n_samples must be >= 16");
    const double a = curve.lower();
    const double b = curve.upper();
    for (int k = 0; k <= opt.n_samples; ++k) {
        const double lambda = a + (b - a) * k / opt.n_samples;
        const double right = curve.derivatives(lambda, Side::Right).d1.norm();
        const double left = curve.derivatives(lambda, Side::Left).d1.norm();
        if (!(std::min(left, right) >= opt.min_speed)) {
            std::ostringstream os;
            os.precision(17);
            os << "degenerate parameterization: speed " << std::min(left, right)
               << " at lambda = " << lambda;
            throw DegenerateCurveError(os.str());
        }
    }

    const std::vector<double>& breaks = curve.breaks();
    auto speed = [&](double lambda) { return curve.derivatives(lambda).d1.norm(); };
    PiecewiseChebyshev t_of_l = PiecewiseChebyshev::fit(speed, a, b, breaks, opt.fit).integral(0.0);
    std::vector<double> time_breaks;
    for (double br : breaks) time_breaks.push_back(t_of_l(br));
    PiecewiseChebyshev l_of_t = inverse_function(t_of_l, time_breaks, opt.fit);
    return ArclengthCurve(curve, std::move(t_of_l), std::move(l_of_t));
}

}  // namespace scqc
