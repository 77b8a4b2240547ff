#pragma once

#include "admm.hpp"
#include "metrics.hpp"
#include "tensor.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nltfnn {

/// SplitMix64 generator. The stream depends only on the seed.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_{seed} {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z               = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z               = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

/// round(sr·N) distinct offsets from a partial Fisher–Yates shuffle, sorted.
/// Draw t swaps position t with t + (next_u64() mod (N − t)).
inline ObservationMask sample_mask(const Dims &dims, double sr, std::uint64_t seed) {
    if (!(sr > 0.0 && sr <= 1.0))
        throw std::invalid_argument("sampling rate must lie in (0, 1]");
    const auto n = static_cast<std::uint64_t>(dims[0] * dims[1] * dims[2]);
    const auto k = static_cast<std::uint64_t>(std::llround(sr * static_cast<double>(n)));
    std::vector<Index> perm(n);
    for (std::uint64_t t = 0; t < n; ++t)
        perm[t] = static_cast<Index>(t);
    Rng rng(seed);
    for (std::uint64_t t = 0; t < k; ++t) {
        const std::uint64_t j = t + rng.next_u64() % (n - t);
        std::swap(perm[t], perm[j]);
    }
    perm.resize(k);
    std::sort(perm.begin(), perm.end());
    return ObservationMask(dims, std::move(perm));
}

/// Nonnegative Tucker tensor with fibered rank (identity transforms) at most
/// `ranks`, scaled so the largest entry is 1.
///
/// Core sizes are R1 = min(r2,r3), R2 = min(r1,r3), R3 = min(r1,r2): a mode-i
/// slice then has rank at most the smaller of the two other core sizes, which
/// is ≤ r_i. Entries are uniform in [0,1) so scaling keeps the ranks.
inline Tensor3 synth_lowrank(const Dims &dims, const std::array<Index, 3> &ranks, std::uint64_t seed) {
    const auto [n1, n2, n3] = dims;
    const auto [r1, r2, r3] = ranks;
    if (n1 < 1 || n2 < 1 || n3 < 1)
        throw std::invalid_argument("synth_lowrank: dims must be positive");
    if (r1 < 1 || r2 < 1 || r3 < 1)
        throw std::invalid_argument("synth_lowrank: ranks must be positive");
    if (r1 > std::min(n2, n3) || r2 > std::min(n3, n1) || r3 > std::min(n1, n2))
        throw std::invalid_argument("synth_lowrank: infeasible ranks for dims " + detail::dims_str(dims));
    const Dims core_dims{std::min(r2, r3), std::min(r1, r3), std::min(r1, r2)};

    Rng rng(seed);
    auto fill = [&rng](Index rows, Index cols) {
        Matrix m(rows, cols);
        for (Index c = 0; c < cols; ++c)
            for (Index r = 0; r < rows; ++r)
                m(r, c) = rng.uniform();
        return m;
    };
    Tensor3 core(core_dims);
    for (auto &v : core.data())
        v = rng.uniform();
    const Matrix u1 = fill(n1, core_dims[0]);
    const Matrix u2 = fill(n2, core_dims[1]);
    const Matrix u3 = fill(n3, core_dims[2]);

    Tensor3 x         = mode_product(mode_product(mode_product(core, u1, 1), u2, 2), u3, 3);
    const double peak = x.data().maxCoeff();
    if (peak > 0)
        x /= peak;
    return x;
}

// ---------------------------------------------------------------------------
// Binary formats (little-endian).
//   TensorFile: "TNS3" u32 version=1, u64 n1 n2 n3, f64[n1·n2·n3]
//   MaskFile:   "MSK3" u32 version=1, u64 n1 n2 n3, u64 count, u64[count]

namespace detail {

inline void put_u32(std::ostream &os, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    os.write(b, 4);
}

inline void put_u64(std::ostream &os, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    os.write(b, 8);
}

inline std::uint64_t get_le(std::istream &is, int bytes, const char *what) {
    unsigned char b[8] = {};
    if (!is.read(reinterpret_cast<char *>(b), bytes))
        throw std::runtime_error(std::string("truncated file while reading ") + what);
    std::uint64_t v = 0;
    for (int i = bytes - 1; i >= 0; --i)
        v = (v << 8) | b[i];
    return v;
}

inline void expect_magic(std::istream &is, const char *magic) {
    char m[4];
    if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0)
        throw std::runtime_error(std::string("bad magic, expected ") + magic);
    const auto version = get_le(is, 4, "version");
    if (version != 1)
        throw std::runtime_error("unsupported format version " + std::to_string(version));
}

inline Dims get_dims(std::istream &is) {
    Dims d;
    for (auto &n : d) {
        const auto v = get_le(is, 8, "dims");
        if (v > static_cast<std::uint64_t>(1) << 40)
            throw std::runtime_error("implausible dimension " + std::to_string(v));
        n = static_cast<Index>(v);
    }
    return d;
}

} // namespace detail

inline void write_tensor(std::ostream &os, const Tensor3 &x) {
    os.write("TNS3", 4);
    detail::put_u32(os, 1);
    for (Index n : x.dims())
        detail::put_u64(os, static_cast<std::uint64_t>(n));
    for (double v : x.data())
        detail::put_u64(os, std::bit_cast<std::uint64_t>(v));
}

inline Tensor3 read_tensor(std::istream &is) {
    detail::expect_magic(is, "TNS3");
    const Dims d = detail::get_dims(is);
    Tensor3::Vector data(d[0] * d[1] * d[2]);
    for (auto &v : data)
        v = std::bit_cast<double>(detail::get_le(is, 8, "tensor payload"));
    if (is.peek() != std::char_traits<char>::eof())
        throw std::runtime_error("trailing bytes after tensor payload");
    return Tensor3(d, std::move(data));
}

inline void write_mask(std::ostream &os, const ObservationMask &m) {
    os.write("MSK3", 4);
    detail::put_u32(os, 1);
    for (Index n : m.dims())
        detail::put_u64(os, static_cast<std::uint64_t>(n));
    detail::put_u64(os, m.count());
    for (Index idx : m.indices())
        detail::put_u64(os, static_cast<std::uint64_t>(idx));
}

inline ObservationMask read_mask(std::istream &is) {
    detail::expect_magic(is, "MSK3");
    const Dims d              = detail::get_dims(is);
    const std::uint64_t count = detail::get_le(is, 8, "count");
    if (count > static_cast<std::uint64_t>(d[0] * d[1] * d[2]))
        throw std::runtime_error("mask count exceeds tensor size");
    std::vector<Index> idx(count);
    for (auto &i : idx)
        i = static_cast<Index>(detail::get_le(is, 8, "mask indices"));
    if (is.peek() != std::char_traits<char>::eof())
        throw std::runtime_error("trailing bytes after mask indices");
    return ObservationMask(d, std::move(idx));
}

// ---------------------------------------------------------------------------
// Text outputs.

inline constexpr const char *trace_csv_header = "iter,mu,delta_inf,objective,res_Y,res_X,res_F,res_M,res_B";

inline void write_trace_csv(std::ostream &os, const ConvergenceTrace &trace) {
    os << trace_csv_header << '\n';
    std::ostringstream line;
    line << std::setprecision(17);
    for (const auto &r : trace) {
        line.str("");
        line << r.iter << ',' << r.mu << ',' << r.delta_inf << ',' << r.objective << ',' << r.residuals.y_z << ','
             << r.residuals.x_y << ',' << r.residuals.f_dm << ',' << r.residuals.m_z << ',' << r.residuals.z_e_b;
        os << line.str() << '\n';
    }
}

inline nlohmann::json report_to_json(const MetricReport &r) {
    nlohmann::json j = {{"psnr", r.psnr}, {"ssim", r.ssim}, {"rse", r.rse}};
    if (r.per_slice) {
        j["per_slice"] = nlohmann::json::array();
        for (const auto &s : *r.per_slice)
            j["per_slice"].push_back({{"slice", s.slice}, {"psnr", s.psnr}, {"ssim", s.ssim}});
    }
    return j;
}

inline void write_per_slice_csv(std::ostream &os, const std::vector<SliceMetrics> &slices) {
    os << "slice,psnr,ssim\n" << std::setprecision(17);
    for (const auto &s : slices)
        os << s.slice << ',' << s.psnr << ',' << s.ssim << '\n';
}

} // namespace nltfnn
