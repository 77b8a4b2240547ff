#pragma once

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace nltfnn {

using Index   = Eigen::Index;
using Dims    = std::array<Index, 3>;
using Matrix  = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

namespace detail {

inline void check_mode(int mode) {
    if (mode < 1 || mode > 3)
        throw std::invalid_argument("mode must be 1, 2 or 3, got " + std::to_string(mode));
}

inline std::string dims_str(const Dims &d) {
    return std::to_string(d[0]) + "x" + std::to_string(d[1]) + "x" + std::to_string(d[2]);
}

} // namespace detail

/// Dense 3-order tensor, first index fastest: (i,j,k) lives at i + j*n1 + k*n1*n2.
template <typename Scalar>
class BasicTensor3 {
  public:
    using scalar_type = Scalar;
    using Vector      = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    BasicTensor3() : dims_{0, 0, 0} {}

    /// All-zero tensor.
    explicit BasicTensor3(Dims dims) : dims_{dims} {
        for (Index n : dims_)
            if (n < 0)
                throw std::invalid_argument("tensor dims must be nonnegative");
        data_ = Vector::Zero(dims_[0] * dims_[1] * dims_[2]);
    }

    /// Takes ownership of `data`; rejects a length mismatch or non-finite entries.
    BasicTensor3(Dims dims, Vector data) : dims_{dims}, data_{std::move(data)} {
        if (data_.size() != dims_[0] * dims_[1] * dims_[2])
            throw std::invalid_argument("tensor data length " + std::to_string(data_.size()) +
                                        " does not match dims " + detail::dims_str(dims_));
        if (!data_.allFinite())
            throw std::invalid_argument("tensor entries must be finite");
    }

    static BasicTensor3 constant(Dims dims, Scalar value) {
        BasicTensor3 t(dims);
        t.data_.setConstant(value);
        return t;
    }

    const Dims &dims() const { return dims_; }
    /// Length along a 1-based mode.
    Index dim(int mode) const {
        detail::check_mode(mode);
        return dims_[mode - 1];
    }
    Index size() const { return data_.size(); }

    Index offset(Index i, Index j, Index k) const { return i + j * dims_[0] + k * dims_[0] * dims_[1]; }

    Scalar operator()(Index i, Index j, Index k) const { return data_[offset(i, j, k)]; }
    Scalar &operator()(Index i, Index j, Index k) { return data_[offset(i, j, k)]; }

    const Vector &data() const { return data_; }
    Vector &data() { return data_; }

    bool all_finite() const { return data_.allFinite(); }

    BasicTensor3 &operator+=(const BasicTensor3 &o) {
        check_same(o);
        data_ += o.data_;
        return *this;
    }
    BasicTensor3 &operator-=(const BasicTensor3 &o) {
        check_same(o);
        data_ -= o.data_;
        return *this;
    }
    BasicTensor3 &operator*=(Scalar s) {
        data_ *= s;
        return *this;
    }
    BasicTensor3 &operator/=(Scalar s) {
        data_ /= s;
        return *this;
    }

    friend BasicTensor3 operator+(BasicTensor3 a, const BasicTensor3 &b) { return a += b; }
    friend BasicTensor3 operator-(BasicTensor3 a, const BasicTensor3 &b) { return a -= b; }
    friend BasicTensor3 operator*(BasicTensor3 a, Scalar s) { return a *= s; }
    friend BasicTensor3 operator*(Scalar s, BasicTensor3 a) { return a *= s; }
    friend BasicTensor3 operator/(BasicTensor3 a, Scalar s) { return a /= s; }
    friend BasicTensor3 operator-(BasicTensor3 a) {
        a.data_ = -a.data_;
        return a;
    }

    friend bool operator==(const BasicTensor3 &a, const BasicTensor3 &b) {
        return a.dims_ == b.dims_ && a.data_ == b.data_;
    }

  private:
    void check_same(const BasicTensor3 &o) const {
        if (o.dims_ != dims_)
            throw std::invalid_argument("tensor dims mismatch: " + detail::dims_str(dims_) + " vs " +
                                        detail::dims_str(o.dims_));
    }

    Dims dims_;
    Vector data_;
};

using Tensor3        = BasicTensor3<double>;
using ComplexTensor3 = BasicTensor3<Complex>;

/// Sorted set of observed linear offsets into a Tensor3 of the given dims.
class ObservationMask {
  public:
    ObservationMask() : dims_{0, 0, 0} {}

    ObservationMask(Dims dims, std::vector<Index> indices) : dims_{dims}, indices_{std::move(indices)} {
        const Index n = dims_[0] * dims_[1] * dims_[2];
        for (std::size_t t = 0; t < indices_.size(); ++t) {
            if (indices_[t] < 0 || indices_[t] >= n)
                throw std::invalid_argument("mask index " + std::to_string(indices_[t]) + " out of range for " +
                                            detail::dims_str(dims_));
            if (t > 0 && indices_[t] <= indices_[t - 1])
                throw std::invalid_argument("mask indices must be strictly increasing");
        }
    }

    static ObservationMask full(Dims dims) {
        std::vector<Index> idx(dims[0] * dims[1] * dims[2]);
        for (std::size_t t = 0; t < idx.size(); ++t)
            idx[t] = static_cast<Index>(t);
        return ObservationMask(dims, std::move(idx));
    }

    const Dims &dims() const { return dims_; }
    const std::vector<Index> &indices() const { return indices_; }
    std::size_t count() const { return indices_.size(); }

    friend bool operator==(const ObservationMask &, const ObservationMask &) = default;

  private:
    Dims dims_;
    std::vector<Index> indices_;
};

// ---------------------------------------------------------------------------
// Unfolding. Row r of unfold(X, i) collects the entries with mode-i index r;
// columns run over the remaining two indices with the lower mode fastest.

template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> unfold(const BasicTensor3<S> &x, int mode) {
    detail::check_mode(mode);
    const auto [n1, n2, n3] = x.dims();
    using Mat               = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    const S *p              = x.data().data();
    switch (mode) {
    case 1:
        return Eigen::Map<const Mat>(p, n1, n2 * n3);
    case 2: {
        Mat out(n2, n1 * n3);
        for (Index k = 0; k < n3; ++k)
            out.middleCols(k * n1, n1) = Eigen::Map<const Mat>(p + k * n1 * n2, n1, n2).transpose();
        return out;
    }
    default:
        return Eigen::Map<const Mat>(p, n1 * n2, n3).transpose();
    }
}

template <typename Derived>
BasicTensor3<typename Derived::Scalar> fold(const Eigen::MatrixBase<Derived> &m, int mode, Dims dims) {
    detail::check_mode(mode);
    using S   = typename Derived::Scalar;
    using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    const auto [n1, n2, n3] = dims;
    const Index rows        = dims[mode - 1];
    const Index cols        = (n1 * n2 * n3) / std::max<Index>(rows, 1);
    if (m.rows() != rows || (rows > 0 && m.cols() != cols) || (rows == 0 && m.size() != 0))
        throw std::invalid_argument("fold: matrix " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                    " does not match dims " + detail::dims_str(dims) + " in mode " +
                                    std::to_string(mode));
    BasicTensor3<S> out(dims);
    S *p = out.data().data();
    switch (mode) {
    case 1:
        Eigen::Map<Mat>(p, n1, n2 * n3) = m;
        break;
    case 2:
        for (Index k = 0; k < n3; ++k)
            Eigen::Map<Mat>(p + k * n1 * n2, n1, n2) = m.middleCols(k * n1, n1).transpose();
        break;
    default:
        Eigen::Map<Mat>(p, n1 * n2, n3) = m.transpose();
    }
    return out;
}

/// X ×_mode A = fold(A · unfold(X, mode)); the mode length becomes A.rows().
template <typename S, typename Derived>
BasicTensor3<S> mode_product(const BasicTensor3<S> &x, const Eigen::MatrixBase<Derived> &a, int mode) {
    detail::check_mode(mode);
    if (a.cols() != x.dim(mode))
        throw std::invalid_argument("mode_product: matrix has " + std::to_string(a.cols()) +
                                    " columns, tensor mode " + std::to_string(mode) + " has length " +
                                    std::to_string(x.dim(mode)));
    Dims out_dims       = x.dims();
    out_dims[mode - 1]  = a.rows();
    using Mat           = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
    const Mat product   = a.template cast<S>() * unfold(x, mode);
    return fold(product, mode, out_dims);
}

// ---------------------------------------------------------------------------
// Slices. Mode-1 slice i is n2×n3 (j,k); mode-2 slice j is n3×n1 (k,i);
// mode-3 slice k is n1×n2 (i,j).

template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> mode_slice(const BasicTensor3<S> &x, int mode, Index idx) {
    detail::check_mode(mode);
    const auto [n1, n2, n3] = x.dims();
    if (idx < 0 || idx >= x.dim(mode))
        throw std::out_of_range("slice index out of range");
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> out;
    switch (mode) {
    case 1:
        out.resize(n2, n3);
        for (Index k = 0; k < n3; ++k)
            for (Index j = 0; j < n2; ++j)
                out(j, k) = x(idx, j, k);
        break;
    case 2:
        out.resize(n3, n1);
        for (Index i = 0; i < n1; ++i)
            for (Index k = 0; k < n3; ++k)
                out(k, i) = x(i, idx, k);
        break;
    default:
        out = Eigen::Map<const Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>>(
            x.data().data() + idx * n1 * n2, n1, n2);
    }
    return out;
}

template <typename S, typename Derived>
void set_mode_slice(BasicTensor3<S> &x, int mode, Index idx, const Eigen::MatrixBase<Derived> &m) {
    detail::check_mode(mode);
    const auto [n1, n2, n3] = x.dims();
    if (idx < 0 || idx >= x.dim(mode))
        throw std::out_of_range("slice index out of range");
    switch (mode) {
    case 1:
        if (m.rows() != n2 || m.cols() != n3)
            throw std::invalid_argument("mode-1 slice shape mismatch");
        for (Index k = 0; k < n3; ++k)
            for (Index j = 0; j < n2; ++j)
                x(idx, j, k) = m(j, k);
        break;
    case 2:
        if (m.rows() != n3 || m.cols() != n1)
            throw std::invalid_argument("mode-2 slice shape mismatch");
        for (Index i = 0; i < n1; ++i)
            for (Index k = 0; k < n3; ++k)
                x(i, idx, k) = m(k, i);
        break;
    default:
        if (m.rows() != n1 || m.cols() != n2)
            throw std::invalid_argument("mode-3 slice shape mismatch");
        Eigen::Map<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>>(x.data().data() + idx * n1 * n2, n1, n2) = m;
    }
}

template <typename S>
std::vector<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>> mode_slices(const BasicTensor3<S> &x, int mode) {
    detail::check_mode(mode);
    std::vector<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>> out;
    out.reserve(static_cast<std::size_t>(x.dim(mode)));
    for (Index s = 0; s < x.dim(mode); ++s)
        out.push_back(mode_slice(x, mode, s));
    return out;
}

template <typename S>
BasicTensor3<S> from_mode_slices(const std::vector<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>> &slices,
                                 int mode, Dims dims) {
    detail::check_mode(mode);
    if (static_cast<Index>(slices.size()) != dims[mode - 1])
        throw std::invalid_argument("slice count does not match mode length");
    BasicTensor3<S> out(dims);
    for (std::size_t s = 0; s < slices.size(); ++s)
        set_mode_slice(out, mode, static_cast<Index>(s), slices[s]);
    return out;
}

// ---------------------------------------------------------------------------

struct Norms {
    double fro  = 0;
    double l1   = 0;
    double linf = 0;
};

template <typename S>
Norms norms(const BasicTensor3<S> &x) {
    if (x.size() == 0)
        return {};
    return {x.data().norm(), x.data().template lpNorm<1>(), x.data().template lpNorm<Eigen::Infinity>()};
}

inline double inner(const Tensor3 &a, const Tensor3 &b) {
    if (a.dims() != b.dims())
        throw std::invalid_argument("inner: dims mismatch");
    return a.data().dot(b.data());
}

enum class Keep { on_mask, off_mask };

/// on_mask zeroes everything outside the mask; off_mask zeroes everything inside it.
inline Tensor3 project_mask(const Tensor3 &x, const ObservationMask &mask, Keep keep) {
    if (x.dims() != mask.dims())
        throw std::invalid_argument("project_mask: dims mismatch " + detail::dims_str(x.dims()) + " vs " +
                                    detail::dims_str(mask.dims()));
    if (keep == Keep::on_mask) {
        Tensor3 out(x.dims());
        for (Index idx : mask.indices())
            out.data()[idx] = x.data()[idx];
        return out;
    }
    Tensor3 out = x;
    for (Index idx : mask.indices())
        out.data()[idx] = 0.0;
    return out;
}

// ---------------------------------------------------------------------------
// Spectral transforms along a mode.

namespace detail {

// Applies a 1-D DFT to every mode-`mode` fiber in place. Inverse includes 1/n.
inline void fft_fibers(ComplexTensor3 &x, int mode, bool inverse) {
    check_mode(mode);
    const auto [n1, n2, n3] = x.dims();
    const Index n           = x.dim(mode);
    if (x.size() == 0 || n <= 1)
        return;
    const Index stride = mode == 1 ? 1 : mode == 2 ? n1 : n1 * n2;
    Eigen::FFT<double> fft;
    std::vector<Complex> in(static_cast<std::size_t>(n)), out;
    auto run = [&](Index base) {
        for (Index t = 0; t < n; ++t)
            in[static_cast<std::size_t>(t)] = x.data()[base + t * stride];
        if (inverse)
            fft.inv(out, in);
        else
            fft.fwd(out, in);
        for (Index t = 0; t < n; ++t)
            x.data()[base + t * stride] = out[static_cast<std::size_t>(t)];
    };
    switch (mode) {
    case 1:
        for (Index c = 0; c < n2 * n3; ++c)
            run(c * n1);
        break;
    case 2:
        for (Index k = 0; k < n3; ++k)
            for (Index i = 0; i < n1; ++i)
                run(i + k * n1 * n2);
        break;
    default:
        for (Index c = 0; c < n1 * n2; ++c)
            run(c);
    }
}

} // namespace detail

inline ComplexTensor3 to_complex(const Tensor3 &x) {
    ComplexTensor3 out(x.dims());
    out.data() = x.data().cast<Complex>();
    return out;
}

inline Tensor3 real_part(const ComplexTensor3 &x) {
    Tensor3 out(x.dims());
    out.data() = x.data().real();
    return out;
}

inline double max_imag(const ComplexTensor3 &x) {
    return x.size() == 0 ? 0.0 : x.data().imag().cwiseAbs().maxCoeff();
}

/// Unnormalized forward DFT along `mode` (arbitrary length).
inline ComplexTensor3 dft_mode(const ComplexTensor3 &x, int mode) {
    ComplexTensor3 out = x;
    detail::fft_fibers(out, mode, false);
    return out;
}
inline ComplexTensor3 dft_mode(const Tensor3 &x, int mode) { return dft_mode(to_complex(x), mode); }

/// Inverse DFT along `mode`, scaled by 1/n.
inline ComplexTensor3 idft_mode(const ComplexTensor3 &x, int mode) {
    ComplexTensor3 out = x;
    detail::fft_fibers(out, mode, true);
    return out;
}

inline ComplexTensor3 fft3(const Tensor3 &x) {
    ComplexTensor3 out = to_complex(x);
    for (int m = 1; m <= 3; ++m)
        detail::fft_fibers(out, m, false);
    return out;
}

inline ComplexTensor3 ifft3(ComplexTensor3 x) {
    for (int m = 1; m <= 3; ++m)
        detail::fft_fibers(x, m, true);
    return x;
}

/// Orthonormal DCT-II matrix: C(p,q) = α_p cos(π(2q+1)p / 2n).
inline Matrix dct_matrix(Index n) {
    Matrix c(n, n);
    for (Index p = 0; p < n; ++p) {
        const double alpha = p == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        for (Index q = 0; q < n; ++q)
            c(p, q) = alpha * std::cos(std::numbers::pi * (2.0 * q + 1.0) * p / (2.0 * n));
    }
    return c;
}

inline Tensor3 dct_mode(const Tensor3 &x, int mode) { return mode_product(x, dct_matrix(x.dim(mode)), mode); }
inline Tensor3 idct_mode(const Tensor3 &x, int mode) {
    return mode_product(x, dct_matrix(x.dim(mode)).transpose(), mode);
}

} // namespace nltfnn
