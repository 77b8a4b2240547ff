#pragma once

#include "tensor.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nltfnn {

/// Range of the difference operator: h, v, t differences along modes 1, 2, 3.
struct DiffField {
    Tensor3 h, v, t;

    DiffField() = default;
    explicit DiffField(Dims dims) : h(dims), v(dims), t(dims) {}
    DiffField(Tensor3 h_, Tensor3 v_, Tensor3 t_) : h(std::move(h_)), v(std::move(v_)), t(std::move(t_)) {
        if (h.dims() != v.dims() || h.dims() != t.dims())
            throw std::invalid_argument("DiffField components must share dims");
    }

    const Dims &dims() const { return h.dims(); }

    Tensor3 &operator[](int mode) { return mode == 1 ? h : mode == 2 ? v : t; }
    const Tensor3 &operator[](int mode) const { return mode == 1 ? h : mode == 2 ? v : t; }

    DiffField &operator+=(const DiffField &o) {
        h += o.h, v += o.v, t += o.t;
        return *this;
    }
    DiffField &operator-=(const DiffField &o) {
        h -= o.h, v -= o.v, t -= o.t;
        return *this;
    }
    DiffField &operator*=(double s) {
        h *= s, v *= s, t *= s;
        return *this;
    }
    friend DiffField operator+(DiffField a, const DiffField &b) { return a += b; }
    friend DiffField operator-(DiffField a, const DiffField &b) { return a -= b; }
    friend DiffField operator*(DiffField a, double s) { return a *= s; }
    friend DiffField operator*(double s, DiffField a) { return a *= s; }
    friend DiffField operator/(DiffField a, double s) { return a *= 1.0 / s; }

    double fro() const { return std::sqrt(h.data().squaredNorm() + v.data().squaredNorm() + t.data().squaredNorm()); }
    double l1() const {
        return h.data().lpNorm<1>() + v.data().lpNorm<1>() + t.data().lpNorm<1>();
    }
    double linf() const { return std::max({norms(h).linf, norms(v).linf, norms(t).linf}); }
    bool all_finite() const { return h.all_finite() && v.all_finite() && t.all_finite(); }
};

inline double inner(const DiffField &a, const DiffField &b) {
    return inner(a.h, b.h) + inner(a.v, b.v) + inner(a.t, b.t);
}

namespace detail {

// out(x) = in(x + e_mode) − in(x) with periodic wrap; adjoint=true gives in(x − e_mode) − in(x).
inline Tensor3 circular_diff(const Tensor3 &in, int mode, bool adjoint) {
    const auto [n1, n2, n3] = in.dims();
    Tensor3 out(in.dims());
    for (Index k = 0; k < n3; ++k)
        for (Index j = 0; j < n2; ++j)
            for (Index i = 0; i < n1; ++i) {
                Index ii = i, jj = j, kk = k;
                switch (mode) {
                case 1:
                    ii = adjoint ? (i + n1 - 1) % n1 : (i + 1) % n1;
                    break;
                case 2:
                    jj = adjoint ? (j + n2 - 1) % n2 : (j + 1) % n2;
                    break;
                default:
                    kk = adjoint ? (k + n3 - 1) % n3 : (k + 1) % n3;
                }
                out(i, j, k) = in(ii, jj, kk) - in(i, j, k);
            }
    return out;
}

} // namespace detail

/// Periodic forward differences along all three modes.
inline DiffField diff_apply(const Tensor3 &m) {
    return DiffField(detail::circular_diff(m, 1, false), detail::circular_diff(m, 2, false),
                     detail::circular_diff(m, 3, false));
}

inline Tensor3 diff_adjoint(const DiffField &f) {
    return detail::circular_diff(f.h, 1, true) + detail::circular_diff(f.v, 2, true) +
           detail::circular_diff(f.t, 3, true);
}

inline double tv_norm(const Tensor3 &m) { return diff_apply(m).l1(); }

/// Spectrum of I + D*D under the 3-D DFT: 1 + Σ_d (2 − 2cos(2π m_d / n_d)).
inline Tensor3 tv_denominator(const Dims &dims) {
    Tensor3 out(dims);
    auto lambda = [](Index m, Index n) { return 2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * m / n); };
    for (Index k = 0; k < dims[2]; ++k)
        for (Index j = 0; j < dims[1]; ++j)
            for (Index i = 0; i < dims[0]; ++i)
                out(i, j, k) = 1.0 + lambda(i, dims[0]) + lambda(j, dims[1]) + lambda(k, dims[2]);
    return out;
}

/// Right-hand side D*(μF + T) + μZ − Q of the M-subproblem.
inline Tensor3 tv_rhs(const DiffField &f, const DiffField &t, const Tensor3 &z, const Tensor3 &q, double mu) {
    return diff_adjoint(mu * f + t) + mu * z - q;
}

/// Solves μ(I + D*D)M = D*(μF + T) + μZ − Q exactly by pointwise division in the 3-D Fourier domain.
inline Tensor3 tv_solve(const DiffField &f, const DiffField &t, const Tensor3 &z, const Tensor3 &q, double mu) {
    if (!(mu > 0))
        throw std::invalid_argument("tv_solve requires mu > 0");
    if (f.dims() != z.dims() || t.dims() != z.dims() || q.dims() != z.dims())
        throw std::invalid_argument("tv_solve: operand dims mismatch");
    ComplexTensor3 spectrum   = fft3(tv_rhs(f, t, z, q, mu));
    const Tensor3 denominator = tv_denominator(z.dims());
    spectrum.data().array() /= (mu * denominator.data().array()).cast<Complex>();
    return real_part(ifft3(std::move(spectrum)));
}

} // namespace nltfnn
