#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mmp/diagnostics.hpp"
#include "test_support.hpp"

namespace mmp {
namespace {

using std::numbers::pi;

SpectralVectorField lifted_cosine(const GridSpec& g) {
    SpectralVectorField f(g);
    f[0] = forward_transform(RealField::sample(g, [](double x, double, double) { return std::cos(x); }));
    return f;
}

PhysParams perturbation_params() {
    PhysParams p;
    p.chi = 1.0;
    p.eta = 1.0;
    p.alpha = default_background(1.0);
    return p;
}

TEST(SobolevNorm, CosineValues) {
    const GridSpec g(8);
    const auto f = lifted_cosine(g);
    EXPECT_NEAR(sobolev_norm(f, 0.0), 2.0 * std::pow(pi, 1.5), 1e-12);
    EXPECT_NEAR(sobolev_norm(f, 0.0), 11.13665, 1e-5);
    EXPECT_NEAR(sobolev_norm(f, 3.0), 4.0 * std::sqrt(2.0) * std::pow(pi, 1.5), 1e-12);
    EXPECT_NEAR(sobolev_norm(f, 3.0), 31.49922, 1e-5);
    // |k| = 1, so the homogeneous norm does not depend on s.
    EXPECT_NEAR(sobolev_norm(f, 5.0, true), sobolev_norm(f, 0.0), 1e-12);
}

TEST(SobolevNorm, MonotoneInIndex) {
    const GridSpec g(16);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto f = dealias(testing::random_vector(g, seed));
        double prev = 0.0;
        for (double s : {0.0, 1.0, 2.0, 3.0, 4.0}) {
            const double cur = sobolev_norm(f, s);
            EXPECT_GE(cur, prev);
            prev = cur;
        }
    }
}

TEST(SobolevNorm, Homogeneity) {
    const GridSpec g(16);
    const auto f = testing::random_vector(g, 4);
    for (double c : {-3.5, 0.25, 1e3}) {
        for (double s : {0.0, 2.5, 7.0}) {
            const double lhs = sobolev_norm(c * f, s);
            const double rhs = std::abs(c) * sobolev_norm(f, s);
            EXPECT_LE(std::abs(lhs - rhs) / rhs, 1e-13);
        }
    }
}

TEST(SobolevNorm, TriangleInequality) {
    const GridSpec g(8);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto f = testing::random_vector(g, 10 + seed);
        const auto h = testing::random_vector(g, 50 + seed);
        for (double s : {0.0, 3.0, -1.5}) EXPECT_LE(sobolev_norm(f + h, s), sobolev_norm(f, s) + sobolev_norm(h, s) + 1e-12);
    }
}

TEST(SobolevNorm, HomogeneousBelowInhomogeneous) {
    const GridSpec g(16);
    auto f = testing::random_vector(g, 6);
    zero_mean(f);
    for (double s : {0.0, 0.5, 3.0, 21.0}) EXPECT_LE(sobolev_norm(f, s, true), sobolev_norm(f, s));
}

TEST(SobolevNorm, ParsevalAgainstQuadrature) {
    const GridSpec g(16);
    const RealVectorField phys{testing::random_real(g, 1), testing::random_real(g, 2), testing::random_real(g, 3)};
    double quad = 0.0;
    for (const auto& c : phys)
        for (double x : c.values()) quad += x * x;
    quad *= std::pow(g.spacing(), 3);
    const double spec = sobolev_norm_squared(forward_transform(phys, g), 0.0);
    EXPECT_LE(std::abs(spec - quad) / quad, 1e-12);
}

TEST(SobolevNorm, IndexWindowAndFiniteness) {
    const GridSpec g(8);
    auto f = lifted_cosine(g);
    EXPECT_THROW(sobolev_norm(f, 41.0), UsageError);
    EXPECT_THROW(sobolev_norm(f, -10.5), UsageError);
    EXPECT_NO_THROW(sobolev_norm(f, 40.0));
    f[1].set_coeff({1, 1, 1}, Complex(std::numeric_limits<double>::infinity(), 0.0));
    EXPECT_THROW(sobolev_norm(f, 1.0), IntegrityError);
}

TEST(DerivativePairing, FirstOrderMatchesQuadrature) {
    const GridSpec g(16);
    const auto a = dealias(testing::random_vector(g, 7));
    const auto b = dealias(testing::random_vector(g, 8));
    double quad = 0.0;
    for (int c = 0; c < 3; ++c) {
        const RealVectorField da = inverse_transform(grad(a[c]));
        const RealVectorField db = inverse_transform(grad(b[c]));
        for (int i = 0; i < 3; ++i)
            for (std::size_t q = 0; q < da[i].values().size(); ++q) quad += da[i].values()[q] * db[i].values()[q];
    }
    quad *= std::pow(g.spacing(), 3);
    const double spec = derivative_pairing(a, b, 1);
    EXPECT_LE(std::abs(spec - quad) / std::abs(quad), 1e-12);
}

TEST(FunctionalF, ZeroState) { EXPECT_EQ(functional_F(State(GridSpec(8))), 0.0); }

TEST(FunctionalF, NoMicrorotationDropsCrossTerm) {
    const GridSpec g(8);
    State s = testing::random_state(g, 2);
    s.omega = SpectralVectorField(g);
    const double expect = 10.0 * (sobolev_norm_squared(curl(s.u), 2.0, true) + sobolev_norm_squared(curl(s.magnetic), 2.0, true));
    EXPECT_LE(std::abs(functional_F(s, 10.0) - expect) / expect, 1e-14);
}

TEST(FunctionalF, RejectsSmallA) { EXPECT_THROW(functional_F(State(GridSpec(8)), 0.5), UsageError); }

TEST(FunctionalF, CoercivityThresholdOverRandomStates) {
    const GridSpec g(8);
    double a_star = 1.0;
    std::vector<State> states;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        states.push_back(testing::random_state(g, 1000 + seed));
        a_star = std::max(a_star, coercivity_threshold_F(states.back()));
    }
    // The cross term only sees the part of ω transverse to k, so
    // |⟨∇²ω, ∇²∇×u⟩| ≤ ½‖(∇×u, ∇×ω)‖²_{Ḣ²} and A* ≤ 3/2.
    EXPECT_LE(a_star, 1.5);
    RecordProperty("A_star", std::to_string(a_star));
    for (const State& s : states) {
        const double x = curl_energy_h2(s);
        EXPECT_GE(functional_F(s, a_star), x * (1.0 - 1e-12));
        EXPECT_GE(functional_F(s, 10.0), x);
    }
}

TEST(FunctionalED, ZeroState) {
    const auto ed = functional_E_D(State(GridSpec(8)), perturbation_params(), SystemVariant::Perturbation);
    EXPECT_EQ(ed.E, 0.0);
    EXPECT_EQ(ed.D, 0.0);
}

TEST(FunctionalED, VelocityOnly) {
    const GridSpec g(8);
    State s(g);
    s.u = testing::random_solenoidal(g, 3);
    const PhysParams p = perturbation_params();
    const auto ed = functional_E_D(s, p, SystemVariant::Perturbation, 4.0, 1.0);
    const double u2 = sobolev_norm_squared(s.u, p.r + 5.0);
    EXPECT_LE(std::abs(ed.E - 4.0 * u2) / u2, 1e-14);
    EXPECT_LE(std::abs(ed.D - 0.5 * u2) / u2, 1e-14);
}

TEST(FunctionalED, CoerciveOnRandomStates) {
    const GridSpec g(8);
    const PhysParams p = perturbation_params();
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const State s = testing::random_state(g, 300 + seed, 1e-2);
        const auto ed = functional_E_D(s, p, SystemVariant::Perturbation, 4.0);
        EXPECT_GE(ed.E, std::pow(state_norm(s, p.r + 5.0), 2));
        EXPECT_GT(ed.D, 0.0);
    }
}

TEST(FunctionalED, OnlyForPerturbation) {
    EXPECT_THROW(functional_E_D(State(GridSpec(8)), perturbation_params(), SystemVariant::Full), UsageError);
    EXPECT_THROW(functional_E_D(State(GridSpec(8)), perturbation_params(), SystemVariant::Perturbation, 1.0), UsageError);
}

TEST(Record, FiniteAndSolenoidal) {
    const GridSpec g(16);
    InitSpec init;
    init.sobolev_index = 21.0;
    const State s = make_random_state(g, init, SystemVariant::Perturbation);
    const DiagnosticsRecord r = compute_record(s, perturbation_params(), SystemVariant::Perturbation);
    ASSERT_TRUE(r.hN && r.hr5 && r.E_func && r.D_func && r.alpha_grad_B_hr3 && r.cancel_max && r.F_func);
    EXPECT_NEAR(*r.hN, std::sqrt(3.0) * 0.01, 1e-12);
    for (double x : {r.l2_energy, r.h3, *r.hN, *r.hr5, *r.E_func, *r.D_func, *r.alpha_grad_B_hr3, *r.F_func})
        EXPECT_TRUE(std::isfinite(x));
    EXPECT_LE(r.div_u_max, 1e-11);
    EXPECT_LE(r.div_b_max, 1e-11);
    EXPECT_LE(*r.cancel_max, 1e-10);

    const DiagnosticsRecord z = compute_record(s, PhysParams{.chi = 1.0, .eta = 1.0, .nu = 1.0}, SystemVariant::ZeroKinematic);
    EXPECT_FALSE(z.hN.has_value());
    EXPECT_FALSE(z.E_func.has_value());
}

std::pair<std::vector<double>, std::vector<double>> synthetic(auto fn, int count, double dt) {
    std::vector<double> t, y;
    for (int i = 0; i < count; ++i) {
        t.push_back(dt * i);
        y.push_back(fn(t.back()));
    }
    return {t, y};
}

TEST(FitDecay, Exponential) {
    const auto [t, y] = synthetic([](double x) { return 5.0 * std::exp(-0.3 * x); }, 50, 0.2);
    const FitReport f = fit_decay(t, y, DecayModel::exponential, 0.0);
    EXPECT_NEAR(f.rate(), 0.3, 1e-6);
    EXPECT_NEAR(f.c, 5.0, 1e-6);
    EXPECT_GT(f.r_squared, 0.999999);
    EXPECT_EQ(f.samples, 50u);
}

TEST(FitDecay, Algebraic) {
    const auto [t, y] = synthetic([](double x) { return 2.0 * std::pow(1.0 + x, -1.5); }, 40, 0.5);
    const FitReport f = fit_decay(t, y, DecayModel::algebraic, 0.0);
    EXPECT_NEAR(f.exponent(), -1.5, 1e-6);
    EXPECT_NEAR(f.c, 2.0, 1e-6);
    EXPECT_GT(f.r_squared, 0.999999);
}

TEST(FitDecay, HonoursTmin) {
    // A transient before t = 2 must not disturb the fit.
    const auto [t, y] = synthetic([](double x) { return x < 2.0 ? 100.0 : std::exp(-x); }, 100, 0.1);
    const FitReport f = fit_decay(t, y, DecayModel::exponential, 2.0);
    EXPECT_NEAR(f.rate(), 1.0, 1e-9);
    EXPECT_EQ(f.samples, 80u);
}

TEST(FitDecay, Errors) {
    auto [t, y] = synthetic([](double x) { return std::exp(-x); }, 20, 0.1);
    y[5] = 0.0;
    EXPECT_THROW(fit_decay(t, y, DecayModel::exponential, 0.0), ConfigError);
    y[5] = -1.0;
    EXPECT_THROW(fit_decay(t, y, DecayModel::algebraic, 0.0), ConfigError);
    // The bad sample is excluded by t_min.
    EXPECT_NO_THROW(fit_decay(t, y, DecayModel::exponential, 0.55));
    const auto [t9, y9] = synthetic([](double x) { return std::exp(-x); }, 9, 0.1);
    EXPECT_THROW(fit_decay(t9, y9, DecayModel::exponential, 0.0), ConfigError);
}

}  // namespace
}  // namespace mmp
