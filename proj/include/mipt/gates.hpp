#pragma once

// Trapped-ion native gate set: fixed-angle Molmer-Sorensen interaction
// composed with discrete pi/2 single-qubit rotations, plus a Haar-random
// 4x4 alternative for benchmark ensembles.

#include <Eigen/Dense>

#include "mipt/linalg.hpp"
#include "mipt/rng.hpp"

namespace mipt {

using Eigen::Matrix2cd;
using Eigen::Matrix4cd;

enum class RotationAxis { X = 0, Y = 1, XYDiag = 2 };

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// R(n) = exp(-i pi/4 n.sigma) = (I - i n.sigma)/sqrt(2), a pi/2 rotation.
inline Matrix2cd rotation_gate(RotationAxis axis) {
    const cplx mi(0.0, -1.0);
    Matrix2cd ns;
    switch (axis) {
        case RotationAxis::X:
            ns << 0, 1, 1, 0;
            break;
        case RotationAxis::Y:
            ns << 0, cplx(0, -1), cplx(0, 1), 0;
            break;
        case RotationAxis::XYDiag:
            ns << 0, cplx(kInvSqrt2, -kInvSqrt2), cplx(kInvSqrt2, kInvSqrt2), 0;
            break;
    }
    return kInvSqrt2 * (Matrix2cd::Identity() + mi * ns);
}

// M = exp(-i pi/4 X (x) X) = (I - i X(x)X)/sqrt(2).
inline Matrix4cd ms_interaction() {
    Matrix4cd xx = Matrix4cd::Zero();
    xx(0, 3) = xx(1, 2) = xx(2, 1) = xx(3, 0) = 1.0;
    return kInvSqrt2 * (Matrix4cd::Identity() + cplx(0.0, -1.0) * xx);
}

// U_{j,j+1} = M (R_j (x) R_{j+1}). The gate basis is |b_{j+1} b_j> with site j
// on the least significant slot, so the Kronecker product puts R_{j+1} first.
inline Matrix4cd mms_gate(RotationAxis axis_j, RotationAxis axis_j1) {
    static const Matrix4cd m = ms_interaction();
    return m * kron(rotation_gate(axis_j1), rotation_gate(axis_j));
}

// Uniform draw over the 9 rotation pairs; the first draw is site j's axis.
inline Matrix4cd sample_mms_gate(RngStream& rng) {
    const auto a = RotationAxis(rng.uniform_int(3));
    const auto b = RotationAxis(rng.uniform_int(3));
    return mms_gate(a, b);
}

// U^xx = M (R^x (x) R^x); squares to the identity up to a global phase.
inline Matrix4cd u_xx_gate() { return mms_gate(RotationAxis::X, RotationAxis::X); }

// Haar-random U(4) element: QR of a complex Ginibre matrix with the phase
// ambiguity fixed by the sign of the triangular factor's diagonal.
// Entries are drawn column-major, real part before imaginary part.
inline Matrix4cd sample_haar_gate(RngStream& rng) {
    Matrix4cd z;
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) {
            const double re = rng.gaussian();
            const double im = rng.gaussian();
            z(r, c) = cplx(re, im);
        }
    Eigen::HouseholderQR<Matrix4cd> qr(z);
    Matrix4cd q = qr.householderQ();
    Matrix4cd rmat = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < 4; ++c) {
        cplx d = rmat(c, c);
        q.col(c) *= d / std::abs(d);
    }
    return q;
}

}  // namespace mipt
