#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mmp/norms.hpp"
#include "mmp/spectral.hpp"
#include "test_support.hpp"

namespace mmp {
namespace {

using testing::max_abs;

TEST(GridSpec, RejectsBadSizes) {
    EXPECT_THROW(GridSpec(4), ConfigError);
    EXPECT_THROW(GridSpec(12), ConfigError);
    EXPECT_THROW(GridSpec(0), ConfigError);
    const GridSpec g(32);
    EXPECT_EQ(g.kmax_dealias(), 10);
    EXPECT_EQ(GridSpec(8).kmax_dealias(), 2);
}

TEST(Transform, CosineHasHalfCoefficients) {
    const GridSpec g(8);
    const auto f = forward_transform(RealField::sample(g, [](double x, double, double) { return std::cos(x); }));
    EXPECT_NEAR(f.coeff({1, 0, 0}).real(), 0.5, 1e-15);
    EXPECT_NEAR(f.coeff({-1, 0, 0}).real(), 0.5, 1e-15);
    double rest = 0.0;
    for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
        if (std::abs(k[0]) == 1 && k[1] == 0 && k[2] == 0) return;
        rest = std::max(rest, std::abs(f.data()[i]));
    });
    EXPECT_LT(rest, 1e-15);
}

TEST(Transform, ConstantMapsToZeroMode) {
    const GridSpec g(8);
    const auto f = forward_transform(RealField::sample(g, [](double, double, double) { return 1.0; }));
    EXPECT_NEAR(f.coeff({0, 0, 0}).real(), 1.0, 1e-15);
    EXPECT_NEAR(max_abs(f), 1.0, 1e-15);
}

TEST(Transform, RoundTrip) {
    for (int n : {8, 16, 32}) {
        const GridSpec g(n);
        const RealField f = testing::random_real(g, 100 + n);
        const RealField back = inverse_transform(forward_transform(f));
        double err = 0.0;
        for (std::size_t i = 0; i < f.values().size(); ++i)
            err = std::max(err, std::abs(back.values()[i] - f.values()[i]));
        EXPECT_LE(err / max_abs(f), 1e-12) << "n=" << n;
    }
}

TEST(Transform, DimensionMismatchIsConfigError) {
    const GridSpec g8(8), g16(16);
    const RealVectorField f{RealField(g8), RealField(g8), RealField(g8)};
    EXPECT_THROW(forward_transform(f, g16), ConfigError);
    EXPECT_THROW(RealField(g8, std::vector<double>(10)), ConfigError);
}

TEST(Transform, Parseval) {
    const GridSpec g(16);
    const RealField f = testing::random_real(g, 7);
    double quad = 0.0;
    for (double x : f.values()) quad += x * x;
    quad *= std::pow(g.spacing(), 3);
    const double spec = sobolev_norm_squared(forward_transform(f), 0.0);
    EXPECT_LE(std::abs(quad - spec) / quad, 1e-12);
}

TEST(Transform, TranslationEquivariance) {
    const GridSpec g(16);
    const RealField f = testing::random_real(g, 9);
    RealField shifted(g);
    // shifted(x) = f(x + h e₁)  ⇒  coefficients multiplied by e^{i k₁ h}
    for (int i1 = 0; i1 < 16; ++i1)
        for (int i2 = 0; i2 < 16; ++i2)
            for (int i3 = 0; i3 < 16; ++i3) shifted(i1, i2, i3) = f((i1 + 1) % 16, i2, i3);
    const auto a = forward_transform(f);
    const auto b = forward_transform(shifted);
    double err = 0.0;
    for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
        const Complex phase = std::polar(1.0, k[0] * g.spacing());
        err = std::max(err, std::abs(b.data()[i] - phase * a.data()[i]));
    });
    EXPECT_LE(err / max_abs(a), 1e-12);
}

TEST(Transform, LogicalLookupIsHermitian) {
    const GridSpec g(8);
    const auto f = testing::random_scalar(g, 3);
    for (int a = -4; a < 4; ++a)
        for (int b = -4; b < 4; ++b)
            for (int c = -3; c < 4; ++c) {
                const Complex z = f.coeff({a, b, c});
                const Complex w = f.coeff({a == -4 ? -4 : -a, b == -4 ? -4 : -b, -c});
                EXPECT_NEAR(std::abs(z - std::conj(w)), 0.0, 1e-15);
            }
    EXPECT_THROW(f.coeff({4, 0, 0}), UsageError);
}

TEST(DiffOps, CurlOfShearField) {
    const GridSpec g(8);
    const SpectralVectorField u{SpectralScalarField(g), SpectralScalarField(g),
                                forward_transform(RealField::sample(g, [](double x, double, double) { return std::sin(x); }))};
    const auto w = inverse_transform(curl(u));
    const auto expect = RealField::sample(g, [](double x, double, double) { return -std::cos(x); });
    double err = 0.0;
    for (std::size_t i = 0; i < expect.values().size(); ++i) {
        err = std::max(err, std::abs(w[1].values()[i] - expect.values()[i]));
        err = std::max(err, std::abs(w[0].values()[i]) + std::abs(w[2].values()[i]));
    }
    EXPECT_LT(err, 1e-14);
}

TEST(DiffOps, DivOfTransverseFieldIsExactlyZero) {
    const GridSpec g(8);
    const SpectralVectorField v{forward_transform(RealField::sample(g, [](double, double y, double) { return std::sin(y); })),
                                SpectralScalarField(g), SpectralScalarField(g)};
    EXPECT_EQ(max_abs(div(v)), 0.0);
}

TEST(DiffOps, LaplacianOfCosine) {
    const GridSpec g(8);
    const auto f = forward_transform(RealField::sample(g, [](double x, double, double) { return std::cos(x); }));
    const auto lf = laplacian(f);
    EXPECT_LT(max_abs(lf + f), 1e-15);
}

TEST(DiffOps, VectorIdentitiesOnRandomFields) {
    const GridSpec g(16);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto v = testing::random_vector(g, seed);
        const auto f = testing::random_scalar(g, seed + 50);
        EXPECT_LE(max_abs(div(curl(v))) / max_abs(v), 1e-14);
        EXPECT_LE(max_abs(curl(grad(f))) / max_abs(f), 1e-14);
    }
}

TEST(DiffOps, SpectralRules) {
    const GridSpec g(8);
    const auto v = testing::random_vector(g, 11);
    const Vec3 alpha{0.3, -0.7, 1.1};
    const Wavevector k{1, -2, 3};
    const auto gd = grad_div(v);
    const auto ad = alpha_dot_grad(v, alpha);
    const Complex kv = 1.0 * v[0].coeff(k) - 2.0 * v[1].coeff(k) + 3.0 * v[2].coeff(k);
    for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(std::abs(gd[c].coeff(k) + static_cast<double>(k[c]) * kv), 0.0, 1e-15);
        const Complex expect = Complex(0.0, 0.3 * 1 - 0.7 * -2 + 1.1 * 3) * v[c].coeff(k);
        EXPECT_NEAR(std::abs(ad[c].coeff(k) - expect), 0.0, 1e-15);
    }
}

TEST(DiffOps, RuntimeDispatchRejectsRankMismatch) {
    const GridSpec g(8);
    const AnyField s = SpectralScalarField(g);
    const AnyField v = SpectralVectorField(g);
    EXPECT_THROW(apply_diff_op(s, DiffOp::curl), UsageError);
    EXPECT_THROW(apply_diff_op(s, DiffOp::div), UsageError);
    EXPECT_THROW(apply_diff_op(s, DiffOp::grad_div), UsageError);
    EXPECT_THROW(apply_diff_op(v, DiffOp::grad), UsageError);
    EXPECT_TRUE(std::holds_alternative<SpectralScalarField>(apply_diff_op(v, DiffOp::div)));
    EXPECT_TRUE(std::holds_alternative<SpectralVectorField>(apply_diff_op(s, DiffOp::grad)));
}

SpectralVectorField from_physical(const GridSpec& g, auto fx, auto fy, auto fz) {
    return {forward_transform(RealField::sample(g, fx)), forward_transform(RealField::sample(g, fy)),
            forward_transform(RealField::sample(g, fz))};
}

TEST(Leray, AnnihilatesGradient) {
    const GridSpec g(8);
    auto c = [](double x, double y, double) { return std::cos(x + y); };
    const auto v = from_physical(g, c, c, [](double, double, double) { return 0.0; });
    EXPECT_LT(max_abs(leray_project(v)), 1e-15);
}

TEST(Leray, FixesSolenoidalAndKillsLongitudinal) {
    const GridSpec g(8);
    auto zero = [](double, double, double) { return 0.0; };
    auto s1 = [](double x, double, double) { return std::sin(x); };
    const auto shear = from_physical(g, zero, zero, s1);
    EXPECT_LT(max_abs(leray_project(shear) - shear), 1e-16);
    const auto longi = from_physical(g, s1, zero, zero);
    EXPECT_LT(max_abs(leray_project(longi)), 1e-16);
}

TEST(Leray, IdempotentAndSolenoidalOnRandomFields) {
    const GridSpec g(16);
    const auto p1 = leray_project(testing::random_vector(g, 21));
    const auto p2 = leray_project(p1);
    EXPECT_LE(max_abs(p2 - p1) / max_abs(p1), 1e-13);
    EXPECT_LE(divergence_residual(p1), 1e-12);
    EXPECT_EQ(p1[0].coeff({0, 0, 0}), Complex(0.0));
}

TEST(Dealias, ZeroesModesBeyondTwoThirds) {
    const GridSpec g(8);
    const auto v = dealias(testing::random_vector(g, 5));
    for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
        const int m = std::max({std::abs(k[0]), std::abs(k[1]), std::abs(k[2])});
        if (m >= 3) {
            EXPECT_EQ(v[0].data()[i], Complex(0.0));
        }
    });
    const auto raw = testing::random_vector(g, 5);
    EXPECT_EQ(v[1].coeff({2, -2, 1}), raw[1].coeff({2, -2, 1}));
    EXPECT_EQ(dealias(v), v);
}

TEST(Dealias, PseudoSpectralProductMatchesConvolution) {
    const GridSpec g(8);
    const auto a = dealias(testing::random_scalar(g, 31));
    const auto b = dealias(testing::random_scalar(g, 32));
    const RealField pa = inverse_transform(a), pb = inverse_transform(b);
    RealField prod(g);
    for (std::size_t i = 0; i < prod.values().size(); ++i) prod.values()[i] = pa.values()[i] * pb.values()[i];
    const auto pseudo = dealias(forward_transform(prod));
    const auto exact = testing::convolve(a, b);
    EXPECT_LE(max_abs(pseudo - exact) / max_abs(exact), 1e-12);
}

TEST(FieldAccess, SetCoeffKeepsRealness) {
    const GridSpec g(8);
    SpectralScalarField f(g);
    f.set_coeff({1, 2, 0}, Complex(0.25, -0.5));
    f.set_coeff({0, 1, -2}, Complex(0.1, 0.2));
    EXPECT_EQ(f.coeff({-1, -2, 0}), Complex(0.25, 0.5));
    EXPECT_EQ(f.coeff({0, -1, 2}), Complex(0.1, -0.2));
    const RealField x = inverse_transform(f);
    const auto back = forward_transform(x);
    EXPECT_LT(max_abs(back - f), 1e-15);
}

}  // namespace
}  // namespace mmp
