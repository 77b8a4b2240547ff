#include "oracles.hpp"

#include <nltfnn/prox.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace nltfnn;

TEST(SoftThreshold, Cases) {
    EXPECT_EQ(soft_threshold(5, 2), 3);
    EXPECT_EQ(soft_threshold(-5, 2), -3);
    EXPECT_EQ(soft_threshold(-1, 2), 0);
    for (double tau : {0.0, 0.5, 3.0})
        EXPECT_EQ(soft_threshold(0, tau), 0);
}

TEST(ScalarLogdetProx, TrivialCases) {
    for (double c : {0.0, 0.1, 5.0, 100.0})
        EXPECT_EQ(scalar_logdet_prox(0, c), 0);
    for (double s : {0.0, 0.3, 7.0})
        EXPECT_EQ(scalar_logdet_prox(s, 0), s);
}

TEST(ScalarLogdetProx, FineGridAtS1C10) {
    // grid step 1e-6 over [0, 1], then the minimizer from that grid
    const double s = 1.0, c = 10.0;
    double best = 0, best_f = logdet_objective(0, s, c);
    for (int g = 1; g <= 1000000; ++g) {
        const double x = g * 1e-6;
        const double f = logdet_objective(x, s, c);
        if (f < best_f) {
            best   = x;
            best_f = f;
        }
    }
    EXPECT_NEAR(scalar_logdet_prox(s, c), best, 1e-5);
}

TEST(ScalarLogdetProx, NegativeInputsThrow) {
    EXPECT_THROW(scalar_logdet_prox(-1, 1), std::invalid_argument);
    EXPECT_THROW(scalar_logdet_prox(1, -1), std::invalid_argument);
}

TEST(ScalarLogdetProx, StaysInRangeAndIsMonotoneInS) {
    for (double c : {0.01, 0.3, 1.0, 4.0, 9.5}) {
        double prev = 0;
        for (int g = 0; g <= 2000; ++g) {
            const double s = g * 0.01;
            const double x = scalar_logdet_prox(s, c);
            EXPECT_GE(x, 0);
            EXPECT_LE(x, s);
            EXPECT_GE(x, prev - 1e-12) << "s=" << s << " c=" << c;
            prev = x;
        }
    }
}

TEST(ScalarLogdetProx, SatisfiesStationarityCubic) {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0, 10);
    for (int trial = 0; trial < 500; ++trial) {
        const double s = u(gen), c = u(gen);
        const double x = scalar_logdet_prox(s, c);
        const double residual = x * x * x - s * x * x + (1 + 2 * c) * x - s;
        EXPECT_LT(std::abs(residual), 1e-9 * (1 + s * s * s)) << "s=" << s << " c=" << c;
    }
}

TEST(ScalarLogdetProx, MatchesGridOracle) {
    std::mt19937_64 gen(22);
    std::uniform_real_distribution<double> u(0, 10);
    for (int trial = 0; trial < 200; ++trial) {
        const double s = u(gen), c = u(gen);
        EXPECT_NEAR(scalar_logdet_prox(s, c), oracle::logdet_prox_grid(s, c), 1e-5) << "s=" << s << " c=" << c;
    }
}

TEST(MatrixSvt, Cases) {
    std::mt19937_64 gen(23);
    const Matrix a = oracle::random_matrix(5, 3, gen);
    EXPECT_LT((matrix_svt(a, 0.0) - a).norm(), 1e-10);
    const double smax = singular_values(a)[0];
    EXPECT_LT(matrix_svt(a, smax).norm(), 1e-12);
    EXPECT_LT(matrix_svt(a, 2 * smax).norm(), 1e-12);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0)  = 3;
    d(1, 1)  = 1;
    Matrix expected = Matrix::Zero(2, 2);
    expected(0, 0)  = 1;
    EXPECT_LT((matrix_svt(d, 2.0) - expected).norm(), 1e-12);
    EXPECT_THROW(matrix_svt(d, -1.0), std::invalid_argument);
}

TEST(MatrixLogdetProx, Cases) {
    std::mt19937_64 gen(24);
    const Matrix a = oracle::random_matrix(4, 6, gen);
    EXPECT_LT((matrix_logdet_prox(a, 0.0) - a).norm(), 1e-10);
    EXPECT_EQ(matrix_logdet_prox(Matrix::Zero(3, 4), 2.0).norm(), 0.0);

    const double s1 = 4.0, s2 = 0.7, c = 1.3;
    Matrix d        = Matrix::Zero(2, 2);
    d(0, 0)         = s1;
    d(1, 1)         = s2;
    const Matrix p  = matrix_logdet_prox(d, c);
    EXPECT_NEAR(p(0, 0), scalar_logdet_prox(s1, c), 1e-12);
    EXPECT_NEAR(p(1, 1), scalar_logdet_prox(s2, c), 1e-12);
    EXPECT_NEAR(p(0, 0), oracle::logdet_prox_grid(s1, c), 1e-6);
    EXPECT_NEAR(p(1, 1), oracle::logdet_prox_grid(s2, c), 1e-6);
    EXPECT_NEAR(p(0, 1), 0.0, 1e-12);
}

TEST(MatrixProx, SingularValuesAreScalarProxOfInput) {
    std::mt19937_64 gen(25);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = 3.0 * oracle::random_matrix(6, 4, gen);
        const double c = 0.2 + trial * 0.3;
        const Eigen::VectorXd in = singular_values(a);
        const Eigen::VectorXd out_log = singular_values(matrix_logdet_prox(a, c));
        const Eigen::VectorXd out_svt = singular_values(matrix_svt(a, c));
        for (Index k = 0; k < in.size(); ++k) {
            // singular_values sorts descending and the scalar maps are monotone
            EXPECT_NEAR(out_log[k], scalar_logdet_prox(in[k], c), 1e-8);
            EXPECT_NEAR(out_svt[k], std::max(in[k] - c, 0.0), 1e-8);
        }
    }
}

TEST(MatrixProx, ComplexMatchesRealEmbedding) {
    std::mt19937_64 gen(26);
    for (int trial = 0; trial < 10; ++trial) {
        CMatrix a(5, 3);
        a.real() = oracle::random_matrix(5, 3, gen);
        a.imag() = oracle::random_matrix(5, 3, gen);
        const double c = 0.5 + 0.2 * trial;
        const CMatrix got_log = matrix_logdet_prox(a, c);
        const CMatrix ref_log = oracle::embedded_spectral_map(a, [c](double s) { return scalar_logdet_prox(s, c); });
        EXPECT_LT((got_log - ref_log).norm(), 1e-10);
        const CMatrix got_svt = matrix_svt(a, c);
        const CMatrix ref_svt = oracle::embedded_spectral_map(a, [c](double s) { return std::max(s - c, 0.0); });
        EXPECT_LT((got_svt - ref_svt).norm(), 1e-10);
    }
}

TEST(ModeProx, ZeroAndZeroWeight) {
    std::mt19937_64 gen(27);
    const Tensor3 g = oracle::random_tensor({4, 3, 5}, gen);
    for (auto spectral : {SpectralMode::none, SpectralMode::dft, SpectralMode::dct})
        for (int mode = 1; mode <= 3; ++mode) {
            EXPECT_EQ(mode_prox(Tensor3({4, 3, 5}), mode, Surrogate::logdet, 0.3, 0.1, spectral).data().norm(), 0.0);
            EXPECT_LT((mode_prox(g, mode, Surrogate::logdet, 0.0, 0.1, spectral) - g).data().norm(), 1e-10);
        }
    EXPECT_THROW(mode_prox(g, 4, Surrogate::logdet, 0.3, 0.1, SpectralMode::none), std::invalid_argument);
    EXPECT_THROW(mode_prox(g, 1, Surrogate::logdet, 0.3, 0.0, SpectralMode::none), std::invalid_argument);
}

TEST(ModeProx, SlicewiseOracleMode3NoSpectral) {
    std::mt19937_64 gen(28);
    const Tensor3 g  = 2.0 * oracle::random_tensor({4, 4, 3}, gen);
    const double a   = 0.4, mu = 0.5;
    const Tensor3 x  = mode_prox(g, 3, Surrogate::logdet, a, mu, SpectralMode::none);
    for (Index k = 0; k < 3; ++k)
        EXPECT_LT((mode_slice(x, 3, k) - matrix_logdet_prox(mode_slice(g, 3, k), a / mu)).norm(), 1e-12);
}

TEST(ModeProx, DftPathOnRealInputIsReal) {
    std::mt19937_64 gen(29);
    const Tensor3 g = oracle::random_tensor({5, 4, 6}, gen);
    for (int mode = 1; mode <= 3; ++mode) {
        ComplexTensor3 gf = dft_mode(g, mode);
        for (Index s = 0; s < g.dim(mode); ++s)
            set_mode_slice(gf, mode, s, matrix_logdet_prox(mode_slice(gf, mode, s), 0.8));
        EXPECT_LT(max_imag(idft_mode(gf, mode)), 1e-9);
    }
}

TEST(ModeProx, NuclearProxBeatsRandomPerturbations) {
    std::mt19937_64 gen(30);
    const Tensor3 g = oracle::random_tensor({4, 5, 3}, gen);
    const double a = 0.7, mu = 0.5;
    for (auto spectral : {SpectralMode::none, SpectralMode::dct, SpectralMode::dft})
        for (int mode = 1; mode <= 3; ++mode) {
            const Tensor3 x = mode_prox(g, mode, Surrogate::nuclear, a, mu, spectral);
            auto value      = [&](const Tensor3 &y) {
                // dft slices carry an extra factor n in their Frobenius norm
                const double fit = 0.5 * (y - g).data().squaredNorm() *
                                   (spectral == SpectralMode::dft ? static_cast<double>(g.dim(mode)) : 1.0);
                return fit + (a / mu) * surrogate_value(y, mode, Surrogate::nuclear, spectral);
            };
            const double best = value(x);
            std::normal_distribution<double> noise(0, 1);
            for (int trial = 0; trial < 100; ++trial) {
                Tensor3 y = x;
                const double scale = std::pow(10.0, -3 + trial % 4);
                for (auto &v : y.data())
                    v += scale * noise(gen);
                EXPECT_LE(best, value(y) + 1e-6) << "mode " << mode;
            }
        }
}

TEST(SurrogateValue, Cases) {
    EXPECT_EQ(surrogate_value(Tensor3({3, 3, 4}), 3, Surrogate::logdet, SpectralMode::none), 0.0);
    const Index m = 3, n3 = 4;
    Tensor3 x({m, m, n3});
    for (Index k = 0; k < n3; ++k)
        for (Index i = 0; i < m; ++i)
            x(i, i, k) = 1.0;
    EXPECT_NEAR(surrogate_value(x, 3, Surrogate::nuclear, SpectralMode::none), double(n3 * m), 1e-12);
    EXPECT_NEAR(surrogate_value(x, 3, Surrogate::logdet, SpectralMode::none), n3 * m * std::log(2.0), 1e-12);
}
