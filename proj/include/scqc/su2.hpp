#pragma once

// Two-level algebra shared by the robustness and simulation modules.

#include <Eigen/Dense>
#include <complex>

namespace scqc {

using Mat2 = Eigen::Matrix2cd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using cplx = std::complex<double>;

namespace pauli {
Mat2 x();
Mat2 y();
Mat2 z();
}  // namespace pauli

/// v . sigma
Mat2 sigma_dot(const Vec3& v);

/// Real vector v with M = v0 * 1 + v . sigma, dropping the identity part.
Vec3 pauli_components(const Mat2& m);

/// exp(-i * H) for Hermitian 2x2 H, exact closed form.
Mat2 expm_hermitian(const Mat2& h);

/// exp(-i (v . sigma) / 2): rotation by |v| about v.
Mat2 rotation(const Vec3& v);

/// e^{-i angle sigma_z / 2}
Mat2 z_rotation(double angle);
/// e^{-i angle sigma_x / 2}
Mat2 x_rotation(double angle);

/// || U^dagger U - 1 || (Frobenius).
double unitarity_defect(const Mat2& u);

/// Nearest unitary in the polar-decomposition sense.
Mat2 polar_unitary(const Mat2& m);

/// 3x3 rotation R with U^dagger (a . sigma) U = (R a) . sigma.
Mat3 adjoint_rotation(const Mat2& u);

/// Z_p X_theta Z_q factorization of a unitary, up to global phase.
struct ZxzAngles {
    double pre = 0.0;    // p, applied last
    double theta = 0.0;  // x-rotation angle in [0, pi]
    double post = 0.0;   // q, applied first
};
ZxzAngles decompose_zxz(const Mat2& u);

}  // namespace scqc
