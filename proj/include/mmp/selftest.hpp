#pragma once

// Quick invariant suite on small grids, run by `mmp selftest`.

#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmp/diagnostics.hpp"
#include "mmp/diophantine.hpp"
#include "mmp/dynamics.hpp"
#include "mmp/fields.hpp"
#include "mmp/integrator.hpp"
#include "mmp/io.hpp"
#include "mmp/norms.hpp"
#include "mmp/spectral.hpp"

namespace mmp {

struct SelfTestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

namespace detail {

inline RealField random_real_field(const GridSpec& g, std::mt19937_64& rng) {
    RealField f(g);
    for (double& x : f.values()) x = 2.0 * unit_uniform(rng) - 1.0;
    return f;
}

inline SpectralVectorField random_spectral_vector(const GridSpec& g, std::mt19937_64& rng) {
    return {forward_transform(random_real_field(g, rng)), forward_transform(random_real_field(g, rng)),
            forward_transform(random_real_field(g, rng))};
}

inline double max_abs(const SpectralVectorField& v) { return max_abs_coeff(v); }

}  // namespace detail

inline std::vector<SelfTestResult> run_selftest() {
    std::vector<SelfTestResult> out;
    auto check = [&](const std::string& name, const std::function<std::pair<bool, double>()>& fn) {
        SelfTestResult r{name, false, {}};
        try {
            const auto [ok, value] = fn();
            r.passed = ok;
            std::ostringstream os;
            os.precision(3);
            os << "value=" << value;
            r.detail = os.str();
        } catch (const std::exception& e) {
            r.detail = std::string("exception: ") + e.what();
        }
        out.push_back(std::move(r));
    };

    const GridSpec g16(16);
    const GridSpec g8(8);

    check("transform round-trip", [&] {
        std::mt19937_64 rng(1);
        const RealField f = detail::random_real_field(g16, rng);
        const RealField back = inverse_transform(forward_transform(f));
        double err = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < f.values().size(); ++i) {
            err = std::max(err, std::abs(back.values()[i] - f.values()[i]));
            ref = std::max(ref, std::abs(f.values()[i]));
        }
        return std::pair{err / ref <= 1e-12, err / ref};
    });

    check("Parseval identity", [&] {
        std::mt19937_64 rng(2);
        const RealField f = detail::random_real_field(g16, rng);
        double quad = 0.0;
        for (double x : f.values()) quad += x * x;
        quad *= std::pow(g16.spacing(), 3);
        const double spec = sobolev_norm_squared(forward_transform(f), 0.0);
        const double rel = std::abs(quad - spec) / quad;
        return std::pair{rel <= 1e-12, rel};
    });

    check("div(curl v) = 0", [&] {
        std::mt19937_64 rng(3);
        const auto v = detail::random_spectral_vector(g16, rng);
        const SpectralScalarField d = div(curl(v));
        double m = 0.0;
        for (const auto& z : d.data()) m = std::max(m, std::abs(z));
        const double rel = m / detail::max_abs(v);
        return std::pair{rel <= 1e-14, rel};
    });

    check("curl(grad f) = 0", [&] {
        std::mt19937_64 rng(4);
        const auto f = forward_transform(detail::random_real_field(g16, rng));
        double fm = 0.0;
        for (const auto& z : f.data()) fm = std::max(fm, std::abs(z));
        const double rel = detail::max_abs(curl(grad(f))) / fm;
        return std::pair{rel <= 1e-14, rel};
    });

    check("Leray projection idempotent and solenoidal", [&] {
        std::mt19937_64 rng(5);
        const auto p1 = leray_project(detail::random_spectral_vector(g16, rng));
        const auto p2 = leray_project(p1);
        const double idem = detail::max_abs(p2 - p1) / detail::max_abs(p1);
        const double dv = divergence_residual(p1);
        return std::pair{idem <= 1e-13 && dv <= 1e-12, std::max(idem, dv)};
    });

    check("dealias idempotent", [&] {
        std::mt19937_64 rng(6);
        const auto d1 = dealias(detail::random_spectral_vector(g16, rng));
        return std::pair{dealias(d1) == d1, 0.0};
    });

    check("random state invariants", [&] {
        InitSpec init;
        init.epsilon = 0.01;
        const State s = make_random_state(g16, init, SystemVariant::ZeroKinematic);
        const double e = std::abs(sobolev_norm(s.u, 3.0) - 0.01) / 0.01;
        const double d = std::max(divergence_residual(s.u), divergence_residual(s.magnetic));
        return std::pair{e <= 1e-10 && d <= 1e-12, std::max(e, d)};
    });

    check("energy-audit cancellations", [&] {
        InitSpec init;
        init.epsilon = 1.0;
        init.k_peak = 5.0;
        PhysParams p;
        p.chi = 1.0;
        p.eta = 1.0;
        p.alpha = default_background(1.0);
        const State s = make_random_state(g16, init, SystemVariant::Perturbation);
        const EnergyAudit a = energy_flux_audit(s, p, SystemVariant::Perturbation);
        return std::pair{!a.defect, a.max_relative};
    });

    check("integrating factor exact on heat equation", [&] {
        PhysParams p;
        p.chi = 1.0;
        p.eta = 1.0;
        p.nu = 1.0;
        State s(g8);
        s.magnetic[2] = forward_transform(RealField::sample(g8, [](double x, double, double) { return std::cos(x); }));
        for (int i = 0; i < 10; ++i) s = step(s, p, SystemVariant::ZeroKinematic, 0.1);
        const double expect = 0.5 * std::exp(-1.0);
        const double err = std::abs(s.magnetic[2].coeff({1, 0, 0}).real() - expect);
        return std::pair{err <= 1e-10, err};
    });

    check("L2 energy non-increasing (zero-kinematic)", [&] {
        PhysParams p;
        p.chi = 1.0;
        p.eta = 1.0;
        p.nu = 1.0;
        InitSpec init;
        init.k_peak = 2.0;
        State s = make_random_state(g8, init, SystemVariant::ZeroKinematic);
        double prev = state_norm(s, 0.0);
        double worst = 0.0;
        for (int i = 0; i < 20; ++i) {
            s = step(s, p, SystemVariant::ZeroKinematic, 0.05);
            const double cur = state_norm(s, 0.0);
            worst = std::max(worst, (cur * cur - prev * prev) / (prev * prev));
            prev = cur;
        }
        return std::pair{worst <= 1e-9, worst};
    });

    check("checkpoint round-trip bit-exact", [&] {
        InitSpec init;
        init.k_peak = 2.0;
        Checkpoint c{make_random_state(g8, init, SystemVariant::Full), PhysParams{}, SystemVariant::Full, 7, 42};
        c.state.t = 0.125;
        const Checkpoint back = decode_checkpoint(encode_checkpoint(c));
        return std::pair{back.state == c.state && back.step == 7, 0.0};
    });

    check("Diophantine degeneracy detection", [&] {
        const bool a = check_diophantine({1.0, 1.0, 0.0}, 2.5, 8).degenerate;
        const bool b = check_diophantine({1.0, 0.0, 0.0}, 2.5, 8).degenerate;
        const bool c = !check_diophantine({1.0, std::sqrt(2.0), std::sqrt(3.0)}, 2.5, 8).degenerate;
        return std::pair{a && b && c, 0.0};
    });

    check("exponential decay fit", [&] {
        std::vector<double> t, y;
        for (int i = 0; i < 50; ++i) {
            t.push_back(0.2 * i);
            y.push_back(5.0 * std::exp(-0.3 * t.back()));
        }
        const FitReport f = fit_decay(t, y, DecayModel::exponential, 0.0);
        return std::pair{std::abs(f.rate() - 0.3) <= 1e-6, f.rate()};
    });

    return out;
}

}  // namespace mmp
