#pragma once

#include "metrics.hpp"
#include "prox.hpp"
#include "tensor.hpp"
#include "transform.hpp"
#include "tv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nltfnn {

/// How the mode transforms L_i are obtained. `dft` uses the real orthonormal
/// Fourier basis so that L_i stays a real orthogonal matrix.
enum class TransformMode { learned, identity, dft, dct };

struct SolverConfig {
    Surrogate surrogate          = Surrogate::logdet;
    TransformMode transform_mode = TransformMode::learned;
    SpectralMode spectral        = SpectralMode::none;
    std::array<double, 3> a      = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    double tau                   = 1e-5;
    double mu0                   = 1e-4;
    double mu_max                = 10.0;
    double rho                   = 1.1;
    double eps                   = 1e-8;
    int max_iter                 = 500;
    bool tv_enabled              = true;

    /// TV weight actually applied: zero when TV is switched off.
    double effective_tau() const { return tv_enabled ? tau : 0.0; }

    void validate() const {
        double sum = 0.0;
        for (double ai : a) {
            if (!(ai >= 0) || !std::isfinite(ai))
                throw std::invalid_argument("mode weights a_i must be finite and nonnegative");
            sum += ai;
        }
        if (std::abs(sum - 1.0) > 1e-12)
            throw std::invalid_argument("mode weights must sum to 1, got " + std::to_string(sum));
        if (!(tau >= 0) || !std::isfinite(tau))
            throw std::invalid_argument("tau must be finite and nonnegative");
        if (!(mu0 > 0) || !std::isfinite(mu0))
            throw std::invalid_argument("mu0 must be positive");
        if (!(mu_max >= mu0) || !std::isfinite(mu_max))
            throw std::invalid_argument("mu_max must be >= mu0");
        if (!(rho > 1) || !std::isfinite(rho))
            throw std::invalid_argument("rho must be > 1");
        if (!(eps > 0))
            throw std::invalid_argument("eps must be positive");
        if (max_iter < 1)
            throw std::invalid_argument("max_iter must be >= 1");
    }
};

enum class Method { nltfnn, ltfnn, tnn, tnndct, tnn3d, logtnn3d };

inline Method parse_method(const std::string &name) {
    if (name == "nltfnn")
        return Method::nltfnn;
    if (name == "ltfnn")
        return Method::ltfnn;
    if (name == "tnn")
        return Method::tnn;
    if (name == "tnndct")
        return Method::tnndct;
    if (name == "3dtnn")
        return Method::tnn3d;
    if (name == "3dlogtnn")
        return Method::logtnn3d;
    throw std::invalid_argument("unknown method '" + name + "'");
}

inline std::string to_string(Method m) {
    switch (m) {
    case Method::nltfnn:
        return "nltfnn";
    case Method::ltfnn:
        return "ltfnn";
    case Method::tnn:
        return "tnn";
    case Method::tnndct:
        return "tnndct";
    case Method::tnn3d:
        return "3dtnn";
    case Method::logtnn3d:
        return "3dlogtnn";
    }
    return "?";
}

/// Baseline family as configurations of the one solver.
inline SolverConfig preset(Method m) {
    SolverConfig cfg;
    switch (m) {
    case Method::nltfnn:
        break;
    case Method::ltfnn:
        cfg.surrogate = Surrogate::nuclear;
        break;
    case Method::tnn:
    case Method::tnndct:
        cfg.surrogate      = Surrogate::nuclear;
        cfg.transform_mode = TransformMode::identity;
        cfg.spectral       = m == Method::tnn ? SpectralMode::dft : SpectralMode::dct;
        cfg.a              = {0.0, 0.0, 1.0};
        cfg.tau            = 0.0;
        break;
    case Method::tnn3d:
    case Method::logtnn3d:
        cfg.surrogate      = m == Method::tnn3d ? Surrogate::nuclear : Surrogate::logdet;
        cfg.transform_mode = TransformMode::identity;
        cfg.spectral       = SpectralMode::dft;
        cfg.tau            = 0.0;
        break;
    }
    return cfg;
}

struct AdmmState {
    Tensor3 Z, E, M;
    DiffField F;
    std::array<Tensor3, 3> X, Y;
    TransformSet L;
    // multipliers
    std::array<Tensor3, 3> N, W;
    DiffField T;
    Tensor3 Q, P;
    double mu = 0;
    int iter  = 0;
};

struct Multipliers {
    std::array<Tensor3, 3> N, W;
    DiffField T;
    Tensor3 Q, P;
};

/// Frobenius norms of the equality-constraint residuals; mode-indexed ones take the max over modes.
struct KktResiduals {
    double y_z    = 0; // Y_i − Z
    double x_y    = 0; // X_i ×_i L_iᵀ − Y_i
    double f_dm   = 0; // F − DM
    double m_z    = 0; // M − Z
    double z_e_b  = 0; // Z + E − B
    double orth   = 0; // L_i L_iᵀ − I

    double max() const { return std::max({y_z, x_y, f_dm, m_z, z_e_b, orth}); }
};

struct ConvergenceRecord {
    int iter         = 0;
    double mu        = 0;
    double delta_inf = 0;
    double objective = 0;
    KktResiduals residuals;
    /// Frobenius norms of N (max over i), W (max over i), T, Q, P.
    std::array<double, 5> dual_norms{};
    std::optional<double> psnr;
    std::optional<double> rse;
};

using ConvergenceTrace = std::vector<ConvergenceRecord>;

struct SolveResult {
    Tensor3 Z;
    ConvergenceTrace trace;
    AdmmState state;
    bool converged = false;
};

class NonFiniteError : public std::runtime_error {
  public:
    NonFiniteError(const std::string &variable, int iteration)
        : std::runtime_error("non-finite value in " + variable + " at iteration " + std::to_string(iteration)),
          variable_{variable}, iteration_{iteration} {}

    const std::string &variable() const { return variable_; }
    int iteration() const { return iteration_; }

  private:
    std::string variable_;
    int iteration_;
};

inline Matrix initial_transform(Index n, TransformMode mode) {
    switch (mode) {
    case TransformMode::dct:
        return dct_matrix(n);
    case TransformMode::dft:
        return real_fourier_matrix(n);
    case TransformMode::learned:
    case TransformMode::identity:
        break;
    }
    return Matrix::Identity(n, n);
}

inline AdmmState init_state(const Tensor3 &b, const ObservationMask &mask, const SolverConfig &cfg) {
    cfg.validate();
    if (mask.dims() != b.dims())
        throw std::invalid_argument("observation mask dims do not match the observed tensor");
    const Dims d = b.dims();
    AdmmState s;
    s.Z = b;
    s.E = s.M = s.Q = s.P = Tensor3(d);
    s.F = s.T = DiffField(d);
    for (int i = 0; i < 3; ++i) {
        s.X[i] = s.Y[i] = s.N[i] = s.W[i] = Tensor3(d);
        s.L.L[i]                          = initial_transform(d[i], cfg.transform_mode);
    }
    s.mu   = cfg.mu0;
    s.iter = 0;
    return s;
}

// ---------------------------------------------------------------------------
// Subproblem solutions. Each reads the state as left by the preceding steps of
// the iteration and returns the new value without modifying the state.

/// Y_i = ½(X_i ×_i L_iᵀ + Z + (N_i − W_i)/μ)
inline std::array<Tensor3, 3> update_Y(const AdmmState &s) {
    std::array<Tensor3, 3> y;
    for (int i = 0; i < 3; ++i)
        y[i] = 0.5 * (mode_product(s.X[i], s.L.L[i].transpose(), i + 1) + s.Z + (s.N[i] - s.W[i]) / s.mu);
    return y;
}

/// X_i = prox_{a_i/μ}((Y_i − N_i/μ) ×_i L_i)
inline std::array<Tensor3, 3> update_X(const AdmmState &s, const SolverConfig &cfg) {
    std::array<Tensor3, 3> x;
    for (int i = 0; i < 3; ++i) {
        const Tensor3 g = mode_product(Tensor3(s.Y[i] - s.N[i] / s.mu), s.L.L[i], i + 1);
        x[i]            = mode_prox(g, i + 1, cfg.surrogate, cfg.a[i], s.mu, cfg.spectral);
    }
    return x;
}

/// Orthogonal Procrustes per mode; fixed transforms pass through.
inline TransformSet update_L(const AdmmState &s, const SolverConfig &cfg) {
    if (cfg.transform_mode != TransformMode::learned)
        return s.L;
    TransformSet l;
    for (int i = 0; i < 3; ++i)
        l.L[i] = update_transform(s.X[i], s.Y[i], s.N[i], s.mu, i + 1);
    return l;
}

/// F = soft(DM − T/μ, τ/μ)
inline DiffField update_F(const AdmmState &s, const SolverConfig &cfg) {
    DiffField f        = diff_apply(s.M) - s.T / s.mu;
    const double level = cfg.effective_tau() / s.mu;
    for (int d = 1; d <= 3; ++d)
        for (auto &v : f[d].data())
            v = soft_threshold(v, level);
    return f;
}

inline Tensor3 update_M(const AdmmState &s) { return tv_solve(s.F, s.T, s.Z, s.Q, s.mu); }

/// Z = (Σ_i(Y_i + W_i/μ) + M + B − E + (Q − P)/μ) / 5
inline Tensor3 update_Z(const AdmmState &s, const Tensor3 &b) {
    Tensor3 acc = s.M + b - s.E + (s.Q - s.P) / s.mu;
    for (int i = 0; i < 3; ++i)
        acc += s.Y[i] + s.W[i] / s.mu;
    return acc / 5.0;
}

/// E = P_Ωᶜ(B − Z + P/μ); zero on Ω.
inline Tensor3 update_E(const AdmmState &s, const Tensor3 &b, const ObservationMask &mask) {
    return project_mask(b - s.Z + s.P / s.mu, mask, Keep::off_mask);
}

inline Multipliers update_duals(const AdmmState &s, const Tensor3 &b) {
    Multipliers m;
    for (int i = 0; i < 3; ++i) {
        m.N[i] = s.N[i] + s.mu * (mode_product(s.X[i], s.L.L[i].transpose(), i + 1) - s.Y[i]);
        m.W[i] = s.W[i] + s.mu * (s.Y[i] - s.Z);
    }
    m.T = s.T + s.mu * (s.F - diff_apply(s.M));
    m.Q = s.Q + s.mu * (s.M - s.Z);
    m.P = s.P + s.mu * (s.Z + s.E - b);
    return m;
}

inline double step_mu(double mu, const SolverConfig &cfg) {
    if (!(mu > 0))
        throw std::invalid_argument("step_mu requires mu > 0");
    return std::min(cfg.mu_max, cfg.rho * mu);
}

// ---------------------------------------------------------------------------
// Diagnostics.

/// Σ a_i Ψ_i(Z ×_i L_i) + τ‖Z‖_TV
inline double objective(const Tensor3 &z, const TransformSet &l, const SolverConfig &cfg) {
    double total = 0.0;
    for (int i = 0; i < 3; ++i)
        if (cfg.a[i] != 0.0)
            total += cfg.a[i] * surrogate_value(mode_product(z, l.L[i], i + 1), i + 1, cfg.surrogate, cfg.spectral);
    const double tau = cfg.effective_tau();
    if (tau != 0.0)
        total += tau * tv_norm(z);
    return total;
}

inline KktResiduals kkt_residuals(const AdmmState &s, const Tensor3 &b) {
    KktResiduals r;
    for (int i = 0; i < 3; ++i) {
        r.y_z  = std::max(r.y_z, (s.Y[i] - s.Z).data().norm());
        r.x_y  = std::max(r.x_y, (mode_product(s.X[i], s.L.L[i].transpose(), i + 1) - s.Y[i]).data().norm());
        r.orth = std::max(r.orth, orthogonality_residual(s.L.L[i]));
    }
    r.f_dm  = (s.F - diff_apply(s.M)).fro();
    r.m_z   = (s.M - s.Z).data().norm();
    r.z_e_b = (s.Z + s.E - b).data().norm();
    return r;
}

/// Per mode, the largest count over transformed slices of singular values above tol·σ_max(slice).
inline std::array<Index, 3> fibered_rank(const Tensor3 &x, const TransformSet &l, double tol) {
    if (!(tol > 0))
        throw std::invalid_argument("fibered_rank requires tol > 0");
    std::array<Index, 3> ranks{0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        const Tensor3 xt = mode_product(x, l.L[i], i + 1);
        for (Index k = 0; k < xt.dim(i + 1); ++k) {
            const Eigen::VectorXd sv = singular_values(mode_slice(xt, i + 1, k));
            if (sv.size() == 0 || sv[0] == 0.0)
                continue;
            const Index r = (sv.array() > tol * sv[0]).count();
            ranks[i]      = std::max(ranks[i], r);
        }
    }
    return ranks;
}

namespace detail {

inline void guard(const Tensor3 &t, const char *name, int iter) {
    if (!t.all_finite())
        throw NonFiniteError(name, iter);
}
inline void guard(const DiffField &t, const char *name, int iter) {
    if (!t.all_finite())
        throw NonFiniteError(name, iter);
}

} // namespace detail

/// One pass of the update sequence: (Y, X, L) per mode, then F, M, Z, E,
/// the multipliers and μ. Returns the diagnostics record for the pass.
inline ConvergenceRecord admm_step(AdmmState &s, const Tensor3 &b, const ObservationMask &mask,
                                   const SolverConfig &cfg, const Tensor3 *truth = nullptr) {
    const int p = s.iter + 1;
    ConvergenceRecord rec;
    rec.iter = p;
    rec.mu   = s.mu;

    s.Y = update_Y(s);
    for (int i = 0; i < 3; ++i)
        detail::guard(s.Y[i], "Y", p);
    s.X = update_X(s, cfg);
    for (int i = 0; i < 3; ++i)
        detail::guard(s.X[i], "X", p);
    s.L = update_L(s, cfg);
    for (int i = 0; i < 3; ++i)
        if (!s.L.L[i].allFinite())
            throw NonFiniteError("L", p);

    s.F = update_F(s, cfg);
    detail::guard(s.F, "F", p);
    s.M = update_M(s);
    detail::guard(s.M, "M", p);
    Tensor3 z_prev = s.Z;
    s.Z            = update_Z(s, b);
    detail::guard(s.Z, "Z", p);
    s.E = update_E(s, b, mask);
    detail::guard(s.E, "E", p);

    Multipliers m = update_duals(s, b);
    s.N           = std::move(m.N);
    s.W           = std::move(m.W);
    s.T           = std::move(m.T);
    s.Q           = std::move(m.Q);
    s.P           = std::move(m.P);
    for (int i = 0; i < 3; ++i) {
        detail::guard(s.N[i], "N", p);
        detail::guard(s.W[i], "W", p);
    }
    detail::guard(s.T, "T", p);
    detail::guard(s.Q, "Q", p);
    detail::guard(s.P, "P", p);

    s.mu   = step_mu(s.mu, cfg);
    s.iter = p;

    rec.delta_inf = norms(Tensor3(s.Z - z_prev)).linf;
    rec.objective = objective(s.Z, s.L, cfg);
    rec.residuals = kkt_residuals(s, b);
    for (int i = 0; i < 3; ++i) {
        rec.dual_norms[0] = std::max(rec.dual_norms[0], s.N[i].data().norm());
        rec.dual_norms[1] = std::max(rec.dual_norms[1], s.W[i].data().norm());
    }
    rec.dual_norms[2] = s.T.fro();
    rec.dual_norms[3] = s.Q.data().norm();
    rec.dual_norms[4] = s.P.data().norm();
    if (truth) {
        rec.psnr = psnr(*truth, s.Z);
        rec.rse  = rse(*truth, s.Z);
    }
    return rec;
}

/// Runs until ‖Z^p − Z^{p−1}‖_∞ < ε or max_iter passes. Deterministic.
inline SolveResult solve(const Tensor3 &b, const ObservationMask &mask, const SolverConfig &cfg,
                         const std::optional<Tensor3> &truth = std::nullopt,
                         const std::function<void(const ConvergenceRecord &)> &on_iteration = {}) {
    if (!b.all_finite())
        throw std::invalid_argument("observed tensor contains non-finite values");
    if (truth && truth->dims() != b.dims())
        throw std::invalid_argument("ground truth dims do not match the observed tensor");
    SolveResult result;
    result.state = init_state(b, mask, cfg);
    while (result.state.iter < cfg.max_iter) {
        ConvergenceRecord rec = admm_step(result.state, b, mask, cfg, truth ? &*truth : nullptr);
        const bool done       = rec.delta_inf < cfg.eps;
        if (on_iteration)
            on_iteration(rec);
        result.trace.push_back(std::move(rec));
        if (done) {
            result.converged = true;
            break;
        }
    }
    result.Z = result.state.Z;
    return result;
}

} // namespace nltfnn
