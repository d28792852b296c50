#include "scqc/geom/frenet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "scqc/errors.hpp"

namespace scqc {

Mat3 FrenetFrame::matrix() const {
    Mat3 m;
    m.col(0) = tangent;
    m.col(1) = normal;
    m.col(2) = binormal;
    return m;
}

namespace {

// Some unit vector perpendicular to t, chosen deterministically.
Vec3 any_perpendicular(const Vec3& t) {
    const Vec3 axis = std::abs(t.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return t.cross(axis).normalized();
}

struct Singular {
    double lambda;
    double time;
};

}  // namespace

FrenetTrack FrenetTrack::build(const ArclengthCurve& curve, const FrenetOptions& opt) {
    if (opt.scan_samples < 16) throw ValidationError("frenet: scan_samples must be >= 16");
    FrenetTrack tr(curve);
    tr.opt_ = opt;
    const SpaceCurve& c = curve.curve();
    const double total = curve.total_time();
    const double a = c.lower();
    const double b = c.upper();
    tr.window_ = opt.torsion_window * total;
    for (double br : c.breaks()) tr.break_times_.emplace_back(curve.time(br), br);

    auto kappa_at = [&](double lambda, Side side) {
        const CurveJet j = c.derivatives(lambda, side);
        return j.d1.cross(j.d2).norm() / std::pow(j.d1.norm(), 3);
    };
    auto bvec = [&](double lambda, Side side) {
        const CurveJet j = c.derivatives(lambda, side);
        return Vec3(j.d1.cross(j.d2));
    };

    std::vector<double> edges{a};
    for (double x : c.breaks()) edges.push_back(x);
    edges.push_back(b);

    std::vector<Singular> inflect;
    std::vector<Singular> flat;
    const int per_segment =
        std::max(16, opt.scan_samples / static_cast<int>(edges.size() - 1));
    for (std::size_t seg = 0; seg + 1 < edges.size(); ++seg) {
        const double lo = edges[seg];
        const double hi = edges[seg + 1];
        Vec3 ref = Vec3::Zero();
        double ref_lambda = lo;
        bool have_ref = false;
        int zero_run = 0;
        double zero_start = lo;
        for (int k = 0; k <= per_segment; ++k) {
            const double lambda = lo + (hi - lo) * k / per_segment;
            const Side side = k == per_segment ? Side::Left : Side::Right;
            const double kap = kappa_at(lambda, side);
            if (kap < opt.zero_curvature) {
                if (zero_run == 0) zero_start = lambda;
                ++zero_run;
                continue;
            }
            if (zero_run >= 3) {
                const double prev = lo + (hi - lo) * (k - 1) / per_segment;
                tr.undefined_.emplace_back(curve.time(zero_start), curve.time(prev));
            }
            zero_run = 0;
            const Vec3 bk = bvec(lambda, side);
            if (have_ref && bk.dot(ref) < 0.0) {
                // Bisect the sign of b . ref between the last good sample and this one.
                double x0 = ref_lambda;
                double x1 = lambda;
                for (int it = 0; it < 200 && x1 - x0 > 4.0 * std::numeric_limits<double>::epsilon() *
                                                           std::max(1.0, std::abs(x1));
                     ++it) {
                    const double m = 0.5 * (x0 + x1);
                    const double g = bvec(m, Side::Right).dot(ref);
                    if (g > 0.0)
                        x0 = m;
                    else if (g < 0.0)
                        x1 = m;
                    else {
                        x0 = x1 = m;
                        break;
                    }
                }
                const double root = 0.5 * (x0 + x1);
                if (kappa_at(root, Side::Right) < opt.zero_curvature)
                    inflect.push_back({root, curve.time(root)});
            }
            ref = bk;
            ref_lambda = lambda;
            have_ref = true;
        }
        if (zero_run >= 3) tr.undefined_.emplace_back(curve.time(zero_start), curve.time(hi));
    }
    // Zero curvature at the ends of the domain is not an inflection but still
    // makes torsion a removable singularity.
    if (kappa_at(a, Side::Right) < opt.zero_curvature) flat.push_back({a, 0.0});
    if (kappa_at(b, Side::Left) < opt.zero_curvature) flat.push_back({b, total});

    for (const auto& s : inflect) tr.inflections_.push_back(s.time);
    for (const auto& s : flat) tr.flat_.push_back(s.time);
    for (const auto& s : inflect) tr.singular_lambda_.push_back(s.lambda);
    for (const auto& s : flat) tr.singular_lambda_.push_back(s.lambda);
    std::sort(tr.singular_lambda_.begin(), tr.singular_lambda_.end());

    // Corners: the tangent must be continuous, the normal may jump.
    for (double br : c.breaks()) {
        const double t = curve.time(br);
        const FrenetFrame before = tr.frame(t, Side::Left);
        const FrenetFrame after = tr.frame(t, Side::Right);
        if ((before.tangent - after.tangent).norm() > 1e-8) {
            std::ostringstream os;
            os << "tangent is discontinuous at t = " << t << " (a kink in the space curve)";
            throw ValidationError(os.str());
        }
        const double angle =
            std::atan2(after.normal.dot(before.binormal), after.normal.dot(before.normal));
        tr.corners_.push_back({t, angle});
    }

    std::vector<double> kbreaks = curve.time_breaks();
    for (double t : tr.inflections_) kbreaks.push_back(t);
    tr.kappa_fit_ = PiecewiseChebyshev::fit([&tr](double t) { return tr.signed_curvature(t); }, 0.0,
                                            total, kbreaks, opt.fit);
    tr.tau_fit_ = PiecewiseChebyshev::fit([&tr](double t) { return tr.torsion(t); }, 0.0, total,
                                          tr.breakpoints(), opt.fit);
    return tr;
}

int FrenetTrack::sign_at(double t, Side side) const {
    int flips = 0;
    for (double ti : inflections_)
        if (ti < t || (ti == t && side == Side::Right)) ++flips;
    return flips % 2 == 0 ? 1 : -1;
}

double FrenetTrack::lambda_at(double t) const {
    const double tol = 1e-12 * std::max(1.0, total_time());
    for (const auto& [tb, lb] : break_times_)
        if (std::abs(t - tb) <= tol) return lb;
    return curve_.parameter(t);
}

FrenetFrame FrenetTrack::frame(double t, Side side) const {
    const SpaceCurve& c = curve_.curve();
    const double lambda = lambda_at(t);
    const CurveJet j = c.derivatives(lambda, side);
    const Vec3 tangent = j.d1.normalized();
    const Vec3 b = j.d1.cross(j.d2);
    const double kappa = b.norm() / std::pow(j.d1.norm(), 3);

    Vec3 bhat;
    if (kappa >= opt_.zero_curvature) {
        bhat = b / b.norm();
    } else {
        // Near an isolated zero b ~ (lambda - lambda*) r' x r''', so the limit
        // direction is known up to the side we approach from.
        const double span = c.upper() - c.lower();
        auto it = std::min_element(singular_lambda_.begin(), singular_lambda_.end(),
                                   [&](double x, double y) {
                                       return std::abs(x - lambda) < std::abs(y - lambda);
                                   });
        const Vec3 dir = j.d1.cross(j.d3);
        if (it != singular_lambda_.end() && std::abs(*it - lambda) < 1e-6 * span &&
            dir.norm() > 0.0) {
            const double ts = curve_.time(*it);
            const bool right = t > ts || (t == ts && side == Side::Right);
            bhat = (right ? 1.0 : -1.0) * dir.normalized();
        } else {
            bhat = any_perpendicular(tangent);
        }
    }
    FrenetFrame f;
    f.tangent = tangent;
    f.binormal = sign_at(t, side) * bhat;
    f.normal = f.binormal.cross(tangent);
    return f;
}

double FrenetTrack::signed_curvature(double t, Side side) const {
    const CurveJet j = curve_.curve().derivatives(lambda_at(t), side);
    return sign_at(t, side) * j.d1.cross(j.d2).norm() / std::pow(j.d1.norm(), 3);
}

double FrenetTrack::raw_torsion(double t, Side side) const {
    const CurveJet j = curve_.curve().derivatives(lambda_at(t), side);
    const Vec3 b = j.d1.cross(j.d2);
    return b.dot(j.d3) / b.squaredNorm();
}

double FrenetTrack::torsion(double t) const {
    for (const auto& [lo, hi] : undefined_)
        if (t >= lo && t <= hi) return 0.0;
    const double w = window_;
    const double total = total_time();
    for (double ts : flat_) {
        if (ts == 0.0 && t < w) {
            const double t1 = raw_torsion(w, Side::Right);
            const double t2 = raw_torsion(2.0 * w, Side::Right);
            return t1 + (t - w) * (t2 - t1) / w;
        }
        if (ts == total && t > total - w) {
            const double t1 = raw_torsion(total - w, Side::Left);
            const double t2 = raw_torsion(total - 2.0 * w, Side::Left);
            return t1 + (total - w - t) * (t2 - t1) / w;
        }
    }
    for (double ts : inflections_) {
        if (std::abs(t - ts) < w) {
            const double left = raw_torsion(ts - w, Side::Right);
            const double right = raw_torsion(ts + w, Side::Right);
            return left + (t - (ts - w)) * (right - left) / (2.0 * w);
        }
    }
    return raw_torsion(t, Side::Right);
}

std::vector<double> FrenetTrack::breakpoints() const {
    std::vector<double> out = curve_.time_breaks();
    const double total = total_time();
    for (double ts : inflections_) {
        out.push_back(ts);
        out.push_back(ts - window_);
        out.push_back(ts + window_);
    }
    for (double ts : flat_) {
        out.push_back(ts == 0.0 ? window_ : total - window_);
    }
    for (const auto& [lo, hi] : undefined_) {
        out.push_back(lo);
        out.push_back(hi);
    }
    std::sort(out.begin(), out.end());
    std::vector<double> unique;
    for (double x : out)
        if (x > 0.0 && x < total && (unique.empty() || x > unique.back())) unique.push_back(x);
    return unique;
}

FrenetProfile frenet_profile(const FrenetTrack& track, int n_samples) {
    if (n_samples < 2) throw ValidationError("frenet_profile: need at least 2 samples");
    FrenetProfile p;
    const double total = track.total_time();
    for (int k = 0; k < n_samples; ++k) {
        const double t = total * k / (n_samples - 1);
        const Side side = k == n_samples - 1 ? Side::Left : Side::Right;
        const FrenetFrame f = track.frame(t, side);
        p.t_grid.push_back(t);
        p.tangent.push_back(f.tangent);
        p.normal.push_back(f.normal);
        p.binormal.push_back(f.binormal);
        p.kappa.push_back(track.signed_curvature(t, side));
        p.tau.push_back(track.torsion(t));
    }
    p.inflection_times = track.inflection_times();
    p.torsion_undefined = track.torsion_undefined();
    return p;
}

FrenetProfile frenet_profile(const ArclengthCurve& curve, int n_samples) {
    return frenet_profile(FrenetTrack::build(curve), n_samples);
}

TangentCurve::TangentCurve(std::function<Vec3(double)> tangent_of_s, double length,
                           std::function<double(double)> time_of_s)
    : fn_(std::move(tangent_of_s)), length_(length), time_of_s_(std::move(time_of_s)) {}

std::vector<Vec3> TangentCurve::sample(int n) const {
    if (n < 1) throw ValidationError("TangentCurve::sample: n must be positive");
    std::vector<Vec3> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) out.push_back(fn_(n == 1 ? 0.0 : length_ * k / (n - 1)));
    return out;
}

TangentCurve tangent_of(const FrenetTrack& track) {
    const ArclengthCurve& curve = track.curve();
    const double total = track.total_time();
    std::vector<double> breaks = curve.time_breaks();
    for (double t : track.inflection_times()) breaks.push_back(t);
    const FrenetTrack* tr = &track;
    PiecewiseChebyshev s_of_t =
        PiecewiseChebyshev::fit([tr](double t) { return std::abs(tr->signed_curvature(t)); }, 0.0,
                                total, breaks)
            .integral(0.0);
    const double length = s_of_t(total);
    if (length < 1e-12) {
        const Vec3 fixed = curve.tangent(0.0);
        return TangentCurve([fixed](double) { return fixed; }, 0.0, [](double) { return 0.0; });
    }
    std::vector<double> sbreaks;
    for (double t : breaks) sbreaks.push_back(s_of_t(t));
    auto t_of_s = std::make_shared<PiecewiseChebyshev>(inverse_function(s_of_t, sbreaks));
    return TangentCurve(
        [curve, t_of_s, length, total](double s) {
            const double t = s <= 0.0 ? 0.0 : s >= length ? total : (*t_of_s)(s);
            return curve.tangent(t, t >= total ? Side::Left : Side::Right);
        },
        length, [t_of_s, length, total](double s) {
            return s <= 0.0 ? 0.0 : s >= length ? total : (*t_of_s)(s);
        });
}

TangentCurve tangent_of(const ArclengthCurve& curve) { return tangent_of(FrenetTrack::build(curve)); }

}  // namespace scqc
