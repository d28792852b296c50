#include "scqc/su2.hpp"

#include <cmath>
#include <numbers>

namespace scqc {

namespace pauli {
Mat2 x() {
    Mat2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}
Mat2 y() {
    Mat2 m;
    m << 0.0, cplx(0.0, -1.0), cplx(0.0, 1.0), 0.0;
    return m;
}
Mat2 z() {
    Mat2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}
}  // namespace pauli

Mat2 sigma_dot(const Vec3& v) {
    Mat2 m;
    m << cplx(v.z(), 0.0), cplx(v.x(), -v.y()), cplx(v.x(), v.y()), cplx(-v.z(), 0.0);
    return m;
}

Vec3 pauli_components(const Mat2& m) {
    // Tr(sigma_i M) / 2, real part (exact for Hermitian M).
    return {0.5 * (m(0, 1) + m(1, 0)).real(), 0.5 * (m(1, 0) - m(0, 1)).imag(),
            0.5 * (m(0, 0) - m(1, 1)).real()};
}

Mat2 expm_hermitian(const Mat2& h) {
    const double h0 = 0.5 * (h(0, 0) + h(1, 1)).real();
    const Vec3 v = pauli_components(h);
    const double n = v.norm();
    const cplx phase = std::exp(cplx(0.0, -h0));
    Mat2 r = Mat2::Identity() * std::cos(n);
    if (n > 0.0) r -= cplx(0.0, std::sin(n) / n) * sigma_dot(v);
    return phase * r;
}

Mat2 rotation(const Vec3& v) { return expm_hermitian(sigma_dot(0.5 * v)); }

Mat2 z_rotation(double angle) { return rotation(Vec3(0.0, 0.0, angle)); }
Mat2 x_rotation(double angle) { return rotation(Vec3(angle, 0.0, 0.0)); }

double unitarity_defect(const Mat2& u) { return (u.adjoint() * u - Mat2::Identity()).norm(); }

Mat2 polar_unitary(const Mat2& m) {
    Mat2 x = m;
    for (int i = 0; i < 6; ++i) {
        const Mat2 next = 0.5 * (x + x.adjoint().inverse());
        const double step = (next - x).norm();
        x = next;
        if (step < 1e-16) break;
    }
    return x;
}

Mat3 adjoint_rotation(const Mat2& u) {
    Mat3 r;
    const Mat2 s[3] = {pauli::x(), pauli::y(), pauli::z()};
    for (int j = 0; j < 3; ++j) r.col(j) = pauli_components(u.adjoint() * s[j] * u);
    return r;
}

ZxzAngles decompose_zxz(const Mat2& u) {
    // U = e^{ig} Z_p X_theta Z_q: arg U00 = g - P, arg U11 = g + P,
    // arg U01 = g - pi/2 - D, arg U10 = g - pi/2 + D with P = (p+q)/2, D = (p-q)/2.
    const double c = 0.5 * (std::abs(u(0, 0)) + std::abs(u(1, 1)));
    const double s = 0.5 * (std::abs(u(0, 1)) + std::abs(u(1, 0)));
    ZxzAngles out;
    out.theta = 2.0 * std::atan2(s, c);
    double big_p = 0.0, big_d = 0.0;
    if (c >= s) {
        const double a00 = std::arg(u(0, 0));
        big_p = 0.5 * std::arg(u(1, 1) / u(0, 0));
        const double g = a00 + big_p;
        if (s > 1e-12) big_d = std::arg(std::polar(1.0, g - 0.5 * std::numbers::pi) / u(0, 1));
    } else {
        const double a01 = std::arg(u(0, 1));
        big_d = 0.5 * std::arg(u(1, 0) / u(0, 1));
        const double g = a01 + 0.5 * std::numbers::pi + big_d;
        if (c > 1e-12) big_p = std::arg(std::polar(1.0, g) / u(0, 0));
    }
    out.pre = big_p + big_d;
    out.post = big_p - big_d;
    return out;
}

}  // namespace scqc
