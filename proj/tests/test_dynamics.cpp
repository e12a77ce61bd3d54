#include <gtest/gtest.h>

#include <cmath>

#include "mmp/dynamics.hpp"
#include "mmp/integrator.hpp"
#include "test_support.hpp"

namespace mmp {
namespace {

using testing::max_abs;
using testing::max_diff;

PhysParams all_terms() {
    PhysParams p;
    p.mu = 0.3;
    p.chi = 0.7;
    p.kappa = 0.4;
    p.eta = 0.9;
    p.nu = 0.6;
    p.alpha = {0.2, -0.5, 0.35};
    return p;
}

TEST(Advect, ZeroVelocityGivesZero) {
    const GridSpec g(8);
    const auto f = testing::random_solenoidal(g, 1);
    EXPECT_EQ(max_abs(advect(SpectralVectorField(g), f)), 0.0);
}

TEST(Advect, FieldIndependentOfTransportDirection) {
    const GridSpec g(8);
    auto s1 = [](double x, double, double) { return std::sin(x); };
    const SpectralVectorField v{SpectralScalarField(g), SpectralScalarField(g), forward_transform(RealField::sample(g, s1))};
    EXPECT_LT(max_abs(advect(v, v)), 1e-15);
}

TEST(Advect, MatchesConvolutionOracle) {
    const GridSpec g(8);
    for (std::uint64_t seed : {3u, 4u}) {
        const auto v = dealias(testing::random_vector(g, seed));
        const auto f = dealias(testing::random_vector(g, seed + 100));
        const auto pseudo = advect(v, f);
        const auto exact = testing::convolve_advection(v, f);
        EXPECT_LE(max_abs(pseudo - exact) / max_abs(exact), 1e-12);
    }
}

TEST(Advect, GridMismatchIsUsageError) {
    EXPECT_THROW(advect(SpectralVectorField(GridSpec(8)), SpectralVectorField(GridSpec(16))), UsageError);
}

TEST(Rhs, ZeroStateGivesZero) {
    const GridSpec g(8);
    for (const auto& [variant, name] : kVariantNames) {
        const auto d = rhs(State(g), all_terms(), variant);
        EXPECT_EQ(max_abs(d.stiff), 0.0) << name;
        EXPECT_EQ(max_abs(d.explicit_part), 0.0) << name;
    }
}

TEST(Rhs, OnlyCouplingDrivesOmegaFromRest) {
    const GridSpec g(8);
    PhysParams p;
    p.chi = 1.3;
    p.eta = 1.0;
    p.nu = 1.0;
    State s(g);
    s.u = testing::random_solenoidal(g, 8);
    const auto d = rhs(s, p, SystemVariant::ZeroKinematic);
    const SpectralVectorField expect = 2.0 * p.chi * curl(s.u);
    EXPECT_LE(max_abs(d.explicit_part.omega + d.stiff.omega - expect), 1e-15 * max_abs(expect));
    EXPECT_EQ(max_abs(d.explicit_part.magnetic), 0.0);
}

TEST(Rhs, DecompositionMatchesMonolithicEvaluation) {
    const GridSpec g(8);
    const PhysParams p = all_terms();
    const State s = testing::random_state(g, 17);
    for (const auto& [variant, name] : kVariantNames) {
        const auto d = rhs(s, p, variant);
        const State total = detail::axpy(d.stiff, 1.0, d.explicit_part);
        const State mono = monolithic_rhs(s, p, variant);
        EXPECT_LE(max_diff(total, mono) / max_abs(mono), 1e-13) << name;
    }
}

TEST(Rhs, LinearizedMatchesDenseGenerator) {
    const GridSpec g(8);
    const PhysParams p = all_terms();
    const State s = testing::random_state(g, 29);
    for (auto variant : {SystemVariant::Full, SystemVariant::Perturbation}) {
        const auto d = rhs(s, p, variant, RhsOptions{false});
        const State total = detail::axpy(d.stiff, 1.0, d.explicit_part);
        double err = 0.0;
        for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
            testing::Vector9 x;
            const std::array<const SpectralVectorField*, 3> f{&s.u, &s.omega, &s.magnetic};
            const std::array<const SpectralVectorField*, 3> r{&total.u, &total.omega, &total.magnetic};
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c) x(3 * a + c) = (*f[a])[c].data()[i];
            const testing::Vector9 y = testing::linear_generator(k, p, variant) * x;
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c) err = std::max(err, std::abs(y(3 * a + c) - (*r[a])[c].data()[i]));
        });
        EXPECT_LE(err / max_abs(total), 1e-13);
    }
}

TEST(Rhs, PureAndDeterministic) {
    const GridSpec g(8);
    const State s = testing::random_state(g, 5);
    const State copy = s;
    const auto a = rhs(s, all_terms(), SystemVariant::Perturbation);
    const auto b = rhs(s, all_terms(), SystemVariant::Perturbation);
    EXPECT_EQ(s, copy);
    EXPECT_EQ(a.explicit_part, b.explicit_part);
    EXPECT_EQ(a.stiff, b.stiff);
}

TEST(Rhs, MagneticStaysZeroWithoutSeed) {
    const GridSpec g(16);
    PhysParams p;
    p.chi = 1.0;
    p.eta = 1.0;
    p.nu = 1.0;
    State s = testing::random_state(g, 3);
    s.magnetic = SpectralVectorField(g);
    const auto d = rhs(s, p, SystemVariant::ZeroKinematic);
    EXPECT_EQ(max_abs(d.explicit_part.magnetic), 0.0);
    EXPECT_EQ(max_abs(d.stiff.magnetic), 0.0);
}

TEST(Rhs, OutputsAreSolenoidal) {
    const GridSpec g(16);
    const auto d = rhs(testing::random_state(g, 6), all_terms(), SystemVariant::Perturbation);
    EXPECT_LE(divergence_residual(d.explicit_part.u), 1e-12);
    EXPECT_LE(divergence_residual(d.explicit_part.magnetic), 1e-12);
}

TEST(StiffOperator, PropagatorMatchesRates) {
    const GridSpec g(8);
    const PhysParams p = all_terms();
    const StiffOperator op(p, SystemVariant::Full);
    const State s = testing::random_state(g, 12);
    const State e = op.propagate(s, 0.37);
    const Wavevector k{1, 2, -1};
    const double kk = 6.0;
    const Complex got = e.magnetic[1].coeff(k);
    EXPECT_NEAR(std::abs(got - std::exp(-p.nu * kk * 0.37) * s.magnetic[1].coeff(k)), 0.0, 1e-16);
    EXPECT_EQ(op.u_rate(kk), (p.mu + p.chi) * kk);
    EXPECT_EQ(op.omega_par_rate(0.0), 4.0 * p.chi);
    const State back = op.propagate(e, -0.37);
    EXPECT_LE(max_diff(back, s) / max_abs(s), 1e-13);
}

TEST(EnergyAudit, ZeroStateAllZero) {
    const EnergyAudit a = energy_flux_audit(State(GridSpec(8)), all_terms(), SystemVariant::Perturbation);
    EXPECT_EQ(a.advect_u, 0.0);
    EXPECT_EQ(a.advect_omega, 0.0);
    EXPECT_EQ(a.advect_magnetic, 0.0);
    EXPECT_EQ(a.lorentz_pair, 0.0);
    EXPECT_EQ(a.alpha_pair, 0.0);
    EXPECT_EQ(a.curl_grad_div, 0.0);
    EXPECT_EQ(a.coupling_transfer, 0.0);
    EXPECT_EQ(a.dissipation, 0.0);
    EXPECT_FALSE(a.defect);
}

TEST(EnergyAudit, CancellationsOnRandomStates) {
    const GridSpec g(16);
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const State s = testing::random_state(g, seed);
        const EnergyAudit a = energy_flux_audit(s, all_terms(), SystemVariant::Perturbation);
        EXPECT_FALSE(a.defect) << a.max_relative;
        EXPECT_LE(a.max_relative, 1e-10);
        const double w2 = sobolev_norm_squared(s.omega, 2.0, true);
        EXPECT_LE(std::abs(a.curl_grad_div) / w2, 1e-12);
        EXPECT_LE(std::abs(a.alpha_pair) / a.energy_scale, 1e-12);
        EXPECT_GT(a.dissipation, 0.0);
        EXPECT_NE(a.coupling_transfer, 0.0);
    }
}

TEST(EnergyAudit, AdvectionIsEnergyNeutralPerField) {
    const GridSpec g(16);
    const auto u = testing::random_solenoidal(g, 40);
    // f need not be solenoidal.
    auto f = dealias(testing::random_vector(g, 41));
    zero_mean(f);
    const double ff = sobolev_norm_squared(f, 0.0);
    EXPECT_LE(std::abs(inner(advect(u, f), f)), 1e-10 * ff);
}

TEST(EnergyAudit, FlagsCompressibleVelocity) {
    const GridSpec g(16);
    State s = testing::random_state(g, 9);
    s.u = dealias(testing::random_vector(g, 77));
    zero_mean(s.u);
    EXPECT_TRUE(energy_flux_audit(s, all_terms(), SystemVariant::Full).defect);
}

}  // namespace
}  // namespace mmp
