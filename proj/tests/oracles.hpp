#pragma once

// Reference computations used by the tests. They are written directly from
// the definitions and avoid the library's code paths.

#include <nltfnn/tensor.hpp>
#include <nltfnn/tv.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using nltfnn::CMatrix;
using nltfnn::Complex;
using nltfnn::Dims;
using nltfnn::Index;
using nltfnn::Matrix;
using nltfnn::Tensor3;

inline Tensor3 random_tensor(const Dims &dims, std::mt19937_64 &gen, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Tensor3 t(dims);
    for (auto &v : t.data())
        v = dist(gen);
    return t;
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64 &gen) {
    std::normal_distribution<double> dist;
    Matrix m(rows, cols);
    for (Index c = 0; c < cols; ++c)
        for (Index r = 0; r < rows; ++r)
            m(r, c) = dist(gen);
    return m;
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
inline Matrix random_orthogonal(Index n, std::mt19937_64 &gen) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, gen));
    Matrix q        = qr.householderQ();
    const Matrix r  = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j)
        if (r(j, j) < 0)
            q.col(j) = -q.col(j);
    return q;
}

/// Unfolding by the index map: the row is the mode index, the column
/// enumerates the other two with the lower mode fastest.
inline Matrix unfold_by_index(const Tensor3 &x, int mode) {
    const auto [n1, n2, n3] = x.dims();
    const Index rows        = x.dims()[mode - 1];
    Matrix m(rows, x.size() / std::max<Index>(rows, 1));
    for (Index k = 0; k < n3; ++k)
        for (Index j = 0; j < n2; ++j)
            for (Index i = 0; i < n1; ++i) {
                const double v = x.data()[i + j * n1 + k * n1 * n2];
                if (mode == 1)
                    m(i, j + k * n2) = v;
                else if (mode == 2)
                    m(j, i + k * n1) = v;
                else
                    m(k, i + j * n1) = v;
            }
    return m;
}

/// Y(..p..) = Σ_q A(p,q)·X(..q..) by explicit loops.
inline Tensor3 contract(const Tensor3 &x, const Matrix &a, int mode) {
    Dims d       = x.dims();
    d[mode - 1]  = a.rows();
    Tensor3 out(d);
    const Dims s = x.dims();
    for (Index k = 0; k < d[2]; ++k)
        for (Index j = 0; j < d[1]; ++j)
            for (Index i = 0; i < d[0]; ++i) {
                double acc = 0;
                for (Index q = 0; q < s[mode - 1]; ++q) {
                    const Index ii = mode == 1 ? q : i, jj = mode == 2 ? q : j, kk = mode == 3 ? q : k;
                    const Index p  = mode == 1 ? i : mode == 2 ? j : k;
                    acc += a(p, q) * x.data()[ii + jj * s[0] + kk * s[0] * s[1]];
                }
                out.data()[i + j * d[0] + k * d[0] * d[1]] = acc;
            }
    return out;
}

/// Explicit DFT matrix F(p,q) = exp(−2πi·pq/n).
inline CMatrix dft_matrix(Index n) {
    CMatrix f(n, n);
    for (Index p = 0; p < n; ++p)
        for (Index q = 0; q < n; ++q)
            f(p, q) = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(p * q % n) / n);
    return f;
}

/// Minimizer over [0, s] of c·log(1+x²) + ½(x−s)² by a uniform grid followed
/// by golden-section refinement around every grid local minimum.
inline double logdet_prox_grid(double s, double c, int grid = 4000) {
    auto f = [&](double x) { return c * std::log1p(x * x) + 0.5 * (x - s) * (x - s); };
    if (s == 0)
        return 0;
    const double h = s / grid;
    std::vector<double> vals(grid + 1);
    for (int g = 0; g <= grid; ++g)
        vals[g] = f(g * h);
    double best = 0, best_f = f(0);
    for (int g = 0; g <= grid; ++g) {
        const bool left  = g == 0 || vals[g] <= vals[g - 1];
        const bool right = g == grid || vals[g] <= vals[g + 1];
        if (!(left && right))
            continue;
        double lo = std::max(0.0, (g - 1) * h), hi = std::min(s, (g + 1) * h);
        const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            const double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
            if (f(a) <= f(b))
                hi = b;
            else
                lo = a;
        }
        const double x = 0.5 * (lo + hi);
        if (f(x) < best_f) {
            best   = x;
            best_f = f(x);
        }
    }
    return best;
}

/// Linear offset of (i,j,k) with periodic wrap.
inline Index wrap_offset(const Dims &d, Index i, Index j, Index k) {
    i = (i % d[0] + d[0]) % d[0];
    j = (j % d[1] + d[1]) % d[1];
    k = (k % d[2] + d[2]) % d[2];
    return i + j * d[0] + k * d[0] * d[1];
}

/// Dense matrix of the periodic forward difference along `mode` (N×N).
inline Matrix difference_matrix(const Dims &d, int mode) {
    const Index n = d[0] * d[1] * d[2];
    Matrix m      = Matrix::Zero(n, n);
    for (Index k = 0; k < d[2]; ++k)
        for (Index j = 0; j < d[1]; ++j)
            for (Index i = 0; i < d[0]; ++i) {
                const Index row = wrap_offset(d, i, j, k);
                m(row, row) -= 1.0;
                m(row, wrap_offset(d, i + (mode == 1), j + (mode == 2), k + (mode == 3))) += 1.0;
            }
    return m;
}

/// Dense solve of μ(I + DᵀD)M = Dᵀ(μF + T) + μZ − Q.
inline Tensor3 tv_solve_dense(const nltfnn::DiffField &f, const nltfnn::DiffField &t, const Tensor3 &z,
                              const Tensor3 &q, double mu) {
    const Dims d  = z.dims();
    const Index n = z.size();
    Matrix a      = Matrix::Identity(n, n);
    Eigen::VectorXd rhs = mu * z.data() - q.data();
    for (int m = 1; m <= 3; ++m) {
        const Matrix dm = difference_matrix(d, m);
        a += dm.transpose() * dm;
        rhs += dm.transpose() * (mu * f[m].data() + t[m].data());
    }
    a *= mu;
    return Tensor3(d, a.partialPivLu().solve(rhs));
}

/// Spectral map of a complex matrix through the real embedding [[Re, −Im], [Im, Re]].
inline CMatrix embedded_spectral_map(const CMatrix &a, const std::function<double(double)> &shrink) {
    const Index m = a.rows(), n = a.cols();
    Matrix e(2 * m, 2 * n);
    e << a.real(), -a.imag(), a.imag(), a.real();
    Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    for (Index k = 0; k < s.size(); ++k)
        s[k] = shrink(s[k]);
    const Matrix r = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
    CMatrix out(m, n);
    out.real() = r.topLeftCorner(m, n);
    out.imag() = r.bottomLeftCorner(m, n);
    return out;
}

} // namespace oracle
