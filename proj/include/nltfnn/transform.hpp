#pragma once

#include "tensor.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nltfnn {

/// One square orthogonal transform per mode.
struct TransformSet {
    std::array<Matrix, 3> L;

    static TransformSet identity(const Dims &dims) {
        TransformSet t;
        for (int m = 0; m < 3; ++m)
            t.L[m] = Matrix::Identity(dims[m], dims[m]);
        return t;
    }

    const Matrix &operator[](int mode) const {
        detail::check_mode(mode);
        return L[mode - 1];
    }
    Matrix &operator[](int mode) {
        detail::check_mode(mode);
        return L[mode - 1];
    }
};

/// ‖L·Lᵀ − I‖_F
inline double orthogonality_residual(const Matrix &l) {
    if (l.rows() != l.cols())
        throw std::invalid_argument("orthogonality_residual expects a square matrix");
    return (l * l.transpose() - Matrix::Identity(l.rows(), l.rows())).norm();
}

/// Orthogonal L maximizing trace(M·L): L = V·Uᵀ for M = U·S·Vᵀ.
inline Matrix procrustes(const Matrix &m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("procrustes expects a square matrix");
    if (m.size() == 0)
        return m;
    Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("SVD failed in transform update");
    return svd.matrixV() * svd.matrixU().transpose();
}

/// L-subproblem: argmin over orthogonal L of ‖X ×_i Lᵀ − (Y − N/μ)‖_F.
inline Matrix update_transform(const Tensor3 &x, const Tensor3 &y, const Tensor3 &n, double mu, int mode) {
    detail::check_mode(mode);
    if (!(mu > 0))
        throw std::invalid_argument("update_transform requires mu > 0");
    if (x.dims() != y.dims() || x.dims() != n.dims())
        throw std::invalid_argument("update_transform: X, Y, N must share dims");
    const Matrix target = unfold(Tensor3(y - n / mu), mode);
    return procrustes(target * unfold(x, mode).transpose());
}

/// Real orthonormal Fourier basis: constant row, then cos/sin pairs, then the
/// alternating row when n is even.
inline Matrix real_fourier_matrix(Index n) {
    Matrix f(n, n);
    if (n == 0)
        return f;
    f.row(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
    Index row = 1;
    for (Index k = 1; 2 * k < n; ++k) {
        for (Index q = 0; q < n; ++q) {
            const double w = 2.0 * std::numbers::pi * k * q / n;
            f(row, q)      = std::sqrt(2.0 / n) * std::cos(w);
            f(row + 1, q)  = std::sqrt(2.0 / n) * std::sin(w);
        }
        row += 2;
    }
    if (n % 2 == 0)
        for (Index q = 0; q < n; ++q)
            f(row, q) = (q % 2 == 0 ? 1.0 : -1.0) / std::sqrt(static_cast<double>(n));
    return f;
}

} // namespace nltfnn
