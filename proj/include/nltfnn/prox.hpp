#pragma once

#include "tensor.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <stdexcept>

namespace nltfnn {

enum class Surrogate { nuclear, logdet };
enum class SpectralMode { none, dft, dct };

inline double soft_threshold(double x, double tau) {
    if (x > tau)
        return x - tau;
    if (x < -tau)
        return x + tau;
    return 0.0;
}

/// c·log(1+x²) + ½(x−s)²
inline double logdet_objective(double x, double s, double c) {
    return c * std::log1p(x * x) + 0.5 * (x - s) * (x - s);
}

namespace detail {

// Real roots of x³ + b x² + c x + d.
inline std::array<double, 3> cubic_real_roots(double b, double c, double d, int &count) {
    const double shift = b / 3.0;
    const double p     = c - b * b / 3.0;
    const double q     = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    const double disc  = q * q / 4.0 + p * p * p / 27.0;
    std::array<double, 3> roots{};
    if (disc > 0) {
        const double sq = std::sqrt(disc);
        roots[0]        = std::cbrt(-q / 2.0 + sq) + std::cbrt(-q / 2.0 - sq) - shift;
        count           = 1;
    } else if (p == 0.0) {
        roots[0] = -shift;
        count    = 1;
    } else {
        const double r   = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
        const double phi = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            roots[k] = r * std::cos(phi - 2.0 * std::numbers::pi * k / 3.0) - shift;
        count = 3;
    }
    return roots;
}

} // namespace detail

/// Global minimizer of c·log(1+x²) + ½(x−s)² over x ≥ 0.
///
/// Critical points solve x³ − s x² + (1+2c) x − s = 0. The real roots of
/// that cubic are found in closed form, polished with Newton steps and
/// clamped to [0, s]; together with x = 0 they form the candidate set and
/// the one with the lowest objective wins (ties go to the smaller x).
inline double scalar_logdet_prox(double s, double c) {
    if (!(s >= 0) || !(c >= 0))
        throw std::invalid_argument("scalar_logdet_prox requires s >= 0 and c >= 0");
    if (s == 0.0)
        return 0.0;
    if (c == 0.0)
        return s;

    const double b1 = -s, c1 = 1.0 + 2.0 * c, d1 = -s;
    int count       = 0;
    auto roots      = detail::cubic_real_roots(b1, c1, d1, count);

    double best   = 0.0;
    double best_f = logdet_objective(0.0, s, c);
    for (int r = 0; r < count; ++r) {
        double x = roots[r];
        for (int it = 0; it < 3; ++it) {
            const double f  = ((x + b1) * x + c1) * x + d1;
            const double df = (3.0 * x + 2.0 * b1) * x + c1;
            if (df == 0.0)
                break;
            x -= f / df;
        }
        if (!std::isfinite(x))
            continue;
        x              = std::clamp(x, 0.0, s);
        const double f = logdet_objective(x, s, c);
        if (f < best_f - 1e-12 || (std::abs(f - best_f) <= 1e-12 && x < best)) {
            best   = x;
            best_f = f;
        }
    }
    return best;
}

/// U·diag(shrink(σ))·Vᴴ for an arbitrary scalar shrink applied to each singular value.
template <typename Derived, typename Shrink>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
spectral_map(const Eigen::MatrixBase<Derived> &a, Shrink &&shrink) {
    using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (a.size() == 0)
        return Mat(a.rows(), a.cols());
    Eigen::BDCSVD<Mat> svd(a.eval(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("SVD failed to converge");
    Eigen::VectorXd sv = svd.singularValues();
    for (Index k = 0; k < sv.size(); ++k)
        sv[k] = shrink(sv[k]);
    return svd.matrixU() * sv.template cast<typename Derived::Scalar>().asDiagonal() * svd.matrixV().adjoint();
}

template <typename Derived>
auto matrix_svt(const Eigen::MatrixBase<Derived> &a, double tau) {
    if (!(tau >= 0))
        throw std::invalid_argument("matrix_svt requires tau >= 0");
    return spectral_map(a, [tau](double s) { return std::max(s - tau, 0.0); });
}

template <typename Derived>
auto matrix_logdet_prox(const Eigen::MatrixBase<Derived> &a, double c) {
    if (!(c >= 0))
        throw std::invalid_argument("matrix_logdet_prox requires c >= 0");
    return spectral_map(a, [c](double s) { return scalar_logdet_prox(s, c); });
}

template <typename Derived>
auto matrix_prox(const Eigen::MatrixBase<Derived> &a, Surrogate surrogate, double c) {
    return surrogate == Surrogate::nuclear ? matrix_svt(a, c) : matrix_logdet_prox(a, c);
}

template <typename Derived>
Eigen::VectorXd singular_values(const Eigen::MatrixBase<Derived> &a) {
    if (a.size() == 0)
        return {};
    using Mat = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::BDCSVD<Mat> svd(a.eval());
    if (svd.info() != Eigen::Success)
        throw std::runtime_error("SVD failed to converge");
    return svd.singularValues();
}

inline double surrogate_penalty(double sigma, Surrogate surrogate) {
    return surrogate == Surrogate::nuclear ? sigma : std::log1p(sigma * sigma);
}

namespace detail {

template <typename S>
BasicTensor3<S> slicewise_prox(BasicTensor3<S> x, int mode, Surrogate surrogate, double c) {
    for (Index s = 0; s < x.dim(mode); ++s)
        set_mode_slice(x, mode, s, matrix_prox(mode_slice(x, mode, s), surrogate, c));
    return x;
}

template <typename S>
double slicewise_value(const BasicTensor3<S> &x, int mode, Surrogate surrogate) {
    double total = 0.0;
    for (Index s = 0; s < x.dim(mode); ++s)
        for (double sigma : singular_values(mode_slice(x, mode, s)))
            total += surrogate_penalty(sigma, surrogate);
    return total;
}

} // namespace detail

/// Proximal map of (weight/mu)·(mode-`mode` surrogate) at G: optional spectral
/// transform along the mode, slicewise matrix prox, inverse transform.
inline Tensor3 mode_prox(const Tensor3 &g, int mode, Surrogate surrogate, double weight, double mu,
                         SpectralMode spectral) {
    detail::check_mode(mode);
    if (!(mu > 0))
        throw std::invalid_argument("mode_prox requires mu > 0");
    if (!(weight >= 0))
        throw std::invalid_argument("mode_prox requires a nonnegative weight");
    const double c = weight / mu;
    if (c == 0.0)
        return g;
    switch (spectral) {
    case SpectralMode::none:
        return detail::slicewise_prox(g, mode, surrogate, c);
    case SpectralMode::dct:
        return idct_mode(detail::slicewise_prox(dct_mode(g, mode), mode, surrogate, c), mode);
    case SpectralMode::dft:
        return real_part(idft_mode(detail::slicewise_prox(dft_mode(g, mode), mode, surrogate, c), mode));
    }
    throw std::invalid_argument("unknown spectral mode");
}

/// Σ over mode slices of Σ_k f(σ_k), f = σ or log(1+σ²), in the requested spectral domain.
inline double surrogate_value(const Tensor3 &x, int mode, Surrogate surrogate, SpectralMode spectral) {
    detail::check_mode(mode);
    switch (spectral) {
    case SpectralMode::none:
        return detail::slicewise_value(x, mode, surrogate);
    case SpectralMode::dct:
        return detail::slicewise_value(dct_mode(x, mode), mode, surrogate);
    case SpectralMode::dft:
        return detail::slicewise_value(dft_mode(x, mode), mode, surrogate);
    }
    throw std::invalid_argument("unknown spectral mode");
}

} // namespace nltfnn
