#pragma once

#include "tensor.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace nltfnn {

/// PSNR reported for an exact match.
inline constexpr double psnr_cap = 99.0;

struct SliceMetrics {
    Index slice = 0;
    double psnr = 0;
    double ssim = 0;
};

struct MetricReport {
    double psnr = 0;
    double ssim = 0;
    double rse  = 0;
    std::optional<std::vector<SliceMetrics>> per_slice;
};

namespace detail {

inline void check_same_dims(const Tensor3 &a, const Tensor3 &b, const char *what) {
    if (a.dims() != b.dims())
        throw std::invalid_argument(std::string(what) + ": dims mismatch " + dims_str(a.dims()) + " vs " +
                                    dims_str(b.dims()));
}

inline double psnr_from_mse(double mse, double peak) {
    if (mse == 0.0)
        return psnr_cap;
    return std::min(psnr_cap, 10.0 * std::log10(peak * peak / mse));
}

// Normalized 11×11 Gaussian window, σ = 1.5.
inline Matrix ssim_window() {
    constexpr int size   = 11;
    constexpr double sig = 1.5;
    Matrix w(size, size);
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const double dr = r - size / 2, dc = c - size / 2;
            w(r, c)         = std::exp(-(dr * dr + dc * dc) / (2.0 * sig * sig));
        }
    return w / w.sum();
}

// Mean SSIM over all fully contained windows of one 2-D image pair.
inline double ssim_image(const Matrix &x, const Matrix &y, double peak) {
    static const Matrix w = ssim_window();
    const Index ws        = w.rows();
    if (x.rows() < ws || x.cols() < ws)
        throw std::invalid_argument("ssim: slices must be at least 11x11");
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    const Matrix xx = x.cwiseProduct(x), yy = y.cwiseProduct(y), xy = x.cwiseProduct(y);
    double total    = 0.0;
    Index count     = 0;
    for (Index c = 0; c + ws <= x.cols(); ++c)
        for (Index r = 0; r + ws <= x.rows(); ++r) {
            const double mx  = (w.array() * x.block(r, c, ws, ws).array()).sum();
            const double my  = (w.array() * y.block(r, c, ws, ws).array()).sum();
            const double sxx = (w.array() * xx.block(r, c, ws, ws).array()).sum() - mx * mx;
            const double syy = (w.array() * yy.block(r, c, ws, ws).array()).sum() - my * my;
            const double sxy = (w.array() * xy.block(r, c, ws, ws).array()).sum() - mx * my;
            total += ((2.0 * mx * my + c1) * (2.0 * sxy + c2)) / ((mx * mx + my * my + c1) * (sxx + syy + c2));
            ++count;
        }
    return total / static_cast<double>(count);
}

} // namespace detail

/// ‖recon − truth‖_F / ‖truth‖_F
inline double rse(const Tensor3 &truth, const Tensor3 &recon) {
    detail::check_same_dims(truth, recon, "rse");
    const double denom = truth.data().norm();
    if (denom == 0.0)
        throw std::invalid_argument("rse: ground truth is identically zero");
    return (recon.data() - truth.data()).norm() / denom;
}

/// 10·log10(peak²/MSE), capped at psnr_cap.
inline double psnr(const Tensor3 &truth, const Tensor3 &recon, double peak = 1.0) {
    detail::check_same_dims(truth, recon, "psnr");
    if (!(peak > 0))
        throw std::invalid_argument("psnr: peak must be positive");
    if (truth.size() == 0)
        return psnr_cap;
    return detail::psnr_from_mse((recon.data() - truth.data()).squaredNorm() / truth.size(), peak);
}

/// Mean over frontal slices of windowed SSIM (11×11 Gaussian, σ = 1.5, K1 = 0.01, K2 = 0.03).
inline double ssim(const Tensor3 &truth, const Tensor3 &recon, double peak = 1.0) {
    detail::check_same_dims(truth, recon, "ssim");
    const Index n3 = truth.dims()[2];
    if (n3 == 0)
        throw std::invalid_argument("ssim: empty tensor");
    double total = 0.0;
    for (Index k = 0; k < n3; ++k)
        total += detail::ssim_image(mode_slice(truth, 3, k), mode_slice(recon, 3, k), peak);
    return total / static_cast<double>(n3);
}

inline std::vector<SliceMetrics> per_slice_metrics(const Tensor3 &truth, const Tensor3 &recon, double peak = 1.0) {
    detail::check_same_dims(truth, recon, "per_slice_metrics");
    std::vector<SliceMetrics> out;
    for (Index k = 0; k < truth.dims()[2]; ++k) {
        const Matrix t = mode_slice(truth, 3, k), r = mode_slice(recon, 3, k);
        const double mse = (r - t).squaredNorm() / static_cast<double>(t.size());
        out.push_back({k, detail::psnr_from_mse(mse, peak), detail::ssim_image(t, r, peak)});
    }
    return out;
}

/// Min-max normalization of both tensors using the range of `truth`. A constant
/// truth leaves both tensors unchanged.
inline std::pair<Tensor3, Tensor3> normalize_to_truth(const Tensor3 &truth, const Tensor3 &recon) {
    detail::check_same_dims(truth, recon, "normalize_to_truth");
    if (truth.size() == 0)
        return {truth, recon};
    const double lo = truth.data().minCoeff(), hi = truth.data().maxCoeff();
    if (hi == lo)
        return {truth, recon};
    auto scale = [&](const Tensor3 &x) {
        Tensor3 out(x.dims());
        out.data() = (x.data().array() - lo) / (hi - lo);
        return out;
    };
    return {scale(truth), scale(recon)};
}

/// PSNR/SSIM on truth-normalized data (peak 1), RSE on the raw values.
inline MetricReport evaluate(const Tensor3 &truth, const Tensor3 &recon, bool with_slices) {
    const auto [t, r] = normalize_to_truth(truth, recon);
    MetricReport report;
    report.psnr = psnr(t, r, 1.0);
    report.ssim = ssim(t, r, 1.0);
    report.rse  = rse(truth, recon);
    if (with_slices)
        report.per_slice = per_slice_metrics(t, r, 1.0);
    return report;
}

} // namespace nltfnn
