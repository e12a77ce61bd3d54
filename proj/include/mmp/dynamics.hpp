#pragma once

// Right-hand side of the magneto-micropolar systems. Pressure is eliminated by
// Leray-projecting the u- and magnetic-equation right-hand sides; quadratic
// products are formed in physical space and dealiased with the 2/3 rule.

#include <algorithm>
#include <array>
#include <cmath>

#include "mmp/fields.hpp"
#include "mmp/norms.hpp"
#include "mmp/spectral.hpp"

namespace mmp {

namespace detail {

// ∂_j f_i in physical space, indexed [i][j].
inline std::array<std::array<RealField, 3>, 3> physical_gradient(const SpectralVectorField& f) {
    auto row = [&](int i) {
        const SpectralVectorField g = grad(f[i]);
        return std::array<RealField, 3>{inverse_transform(g[0]), inverse_transform(g[1]),
                                        inverse_transform(g[2])};
    };
    return {row(0), row(1), row(2)};
}

inline void accumulate_advection(const RealVectorField& v,
                                 const std::array<std::array<RealField, 3>, 3>& grad_f, double sign,
                                 std::array<std::vector<double>, 3>& out) {
    const std::size_t n = v[0].values().size();
    for (int i = 0; i < 3; ++i) {
        auto& o = out[static_cast<std::size_t>(i)];
        const auto& gi = grad_f[static_cast<std::size_t>(i)];
        const auto v0 = v[0].values(), v1 = v[1].values(), v2 = v[2].values();
        const auto g0 = gi[0].values(), g1 = gi[1].values(), g2 = gi[2].values();
        for (std::size_t p = 0; p < n; ++p) o[p] += sign * (v0[p] * g0[p] + v1[p] * g1[p] + v2[p] * g2[p]);
    }
}

inline SpectralVectorField to_spectral_dealiased(const GridSpec& g, std::array<std::vector<double>, 3>&& phys) {
    SpectralVectorField out(g);
    for (int i = 0; i < 3; ++i) {
        out[i] = dealias(forward_transform(RealField(g, std::move(phys[static_cast<std::size_t>(i)]))));
    }
    return out;
}

}  // namespace detail

/// (v·∇)f computed pseudo-spectrally and dealiased.
inline SpectralVectorField advect(const SpectralVectorField& v, const SpectralVectorField& f) {
    require_same_grid(v.grid(), f.grid());
    const GridSpec& g = v.grid();
    std::array<std::vector<double>, 3> acc;
    for (auto& a : acc) a.assign(g.physical_size(), 0.0);
    detail::accumulate_advection(inverse_transform(v), detail::physical_gradient(f), 1.0, acc);
    return detail::to_spectral_dealiased(g, std::move(acc));
}

/// Diagonal (per-mode) stiff linear operator -Λ of a variant. ω is split into
/// its components parallel and perpendicular to k so the κ grad-div term is
/// diagonal as well.
class StiffOperator {
public:
    StiffOperator(const PhysParams& p, SystemVariant v) : eff_(effective_params(p, v)) {}

    double u_rate(double kk) const { return (eff_.mu + eff_.chi) * kk; }
    double omega_perp_rate(double kk) const { return 4.0 * eff_.chi + eff_.eta * kk; }
    double omega_par_rate(double kk) const { return 4.0 * eff_.chi + (eff_.eta + eff_.kappa) * kk; }
    double magnetic_rate(double kk) const { return eff_.nu * kk; }

    /// Returns -Λ s.
    State apply(const State& s) const {
        return map(s, [](double rate) { return -rate; });
    }

    /// Returns exp(-Λ τ) s.
    State propagate(const State& s, double tau) const {
        return map(s, [tau](double rate) { return std::exp(-rate * tau); });
    }

private:
    template <class Fn>
    State map(const State& s, Fn&& fn) const {
        State out(s.grid());
        out.t = s.t;
        for_each_mode(s.grid(), [&](std::size_t i, const Wavevector& k, double) {
            const double kk = detail::squared_magnitude(k);
            const double fu = fn(u_rate(kk));
            const double fm = fn(magnetic_rate(kk));
            const double fperp = fn(omega_perp_rate(kk));
            const double fpar = fn(omega_par_rate(kk));
            for (int c = 0; c < 3; ++c) {
                out.u[c].data()[i] = fu * s.u[c].data()[i];
                out.magnetic[c].data()[i] = fm * s.magnetic[c].data()[i];
            }
            const std::array<Complex, 3> w{s.omega[0].data()[i], s.omega[1].data()[i], s.omega[2].data()[i]};
            if (kk == 0.0) {
                for (int c = 0; c < 3; ++c) out.omega[c].data()[i] = fperp * w[c];
                return;
            }
            const Complex kw = (static_cast<double>(k[0]) * w[0] + static_cast<double>(k[1]) * w[1] +
                                static_cast<double>(k[2]) * w[2]) / kk;
            for (int c = 0; c < 3; ++c) {
                const Complex par = static_cast<double>(k[c]) * kw;
                out.omega[c].data()[i] = fpar * par + fperp * (w[c] - par);
            }
        });
        return out;
    }

    PhysParams eff_;
};

struct RhsOptions {
    /// Drop every quadratic term (linearized dynamics about the rest state).
    bool nonlinear = true;
};

/// Explicit part of the right-hand side: nonlinear transport, Lorentz and
/// stretching terms, the 2χ curl couplings and the α·∇ transports.
inline State explicit_rhs(const State& s, const PhysParams& p, SystemVariant v, RhsOptions opt = {}) {
    const PhysParams e = effective_params(p, v);
    const GridSpec& g = s.grid();
    State out(g);
    out.t = s.t;

    if (opt.nonlinear) {
        const RealVectorField u_phys = inverse_transform(s.u);
        const RealVectorField m_phys = inverse_transform(s.magnetic);
        const auto grad_u = detail::physical_gradient(s.u);
        const auto grad_m = detail::physical_gradient(s.magnetic);
        const auto grad_w = detail::physical_gradient(s.omega);

        std::array<std::vector<double>, 3> nu_, nw, nm;
        for (auto* acc : {&nu_, &nw, &nm})
            for (auto& a : *acc) a.assign(g.physical_size(), 0.0);

        detail::accumulate_advection(u_phys, grad_u, -1.0, nu_);  // -(u·∇)u
        detail::accumulate_advection(m_phys, grad_m, +1.0, nu_);  // +(B·∇)B
        detail::accumulate_advection(u_phys, grad_w, -1.0, nw);   // -(u·∇)ω
        detail::accumulate_advection(u_phys, grad_m, -1.0, nm);   // -(u·∇)B
        detail::accumulate_advection(m_phys, grad_u, +1.0, nm);   // +(B·∇)u

        out.u = detail::to_spectral_dealiased(g, std::move(nu_));
        out.omega = detail::to_spectral_dealiased(g, std::move(nw));
        out.magnetic = detail::to_spectral_dealiased(g, std::move(nm));
    }

    if (e.chi != 0.0) {
        out.u.axpy(2.0 * e.chi, curl(s.omega));
        out.omega.axpy(2.0 * e.chi, curl(s.u));
    }
    if (has_background(v)) {
        out.u += alpha_dot_grad(s.magnetic, e.alpha);
        out.magnetic += alpha_dot_grad(s.u, e.alpha);
    }
    out.u = leray_project(std::move(out.u));
    out.magnetic = leray_project(std::move(out.magnetic));
    zero_mean(out.omega);
    return out;
}

struct RhsDecomposition {
    State stiff;          // -Λ s, diagonal per mode
    State explicit_part;  // everything else
};

inline RhsDecomposition rhs(const State& s, const PhysParams& p, SystemVariant v, RhsOptions opt = {}) {
    return {StiffOperator(p, v).apply(s), explicit_rhs(s, p, v, opt)};
}

/// Term-by-term evaluation of the full right-hand side through advect() and
/// the public differential operators; independent of the fused kernel above.
inline State monolithic_rhs(const State& s, const PhysParams& p, SystemVariant v, RhsOptions opt = {}) {
    const PhysParams e = effective_params(p, v);
    const GridSpec& g = s.grid();

    SpectralVectorField du(g), dw(g), dm(g);
    if (opt.nonlinear) {
        du -= advect(s.u, s.u);
        du += advect(s.magnetic, s.magnetic);
        dw -= advect(s.u, s.omega);
        dm -= advect(s.u, s.magnetic);
        dm += advect(s.magnetic, s.u);
    }
    du.axpy(2.0 * e.chi, curl(s.omega));
    du.axpy(e.mu + e.chi, laplacian(s.u));
    if (has_background(v)) {
        du += alpha_dot_grad(s.magnetic, e.alpha);
        dm += alpha_dot_grad(s.u, e.alpha);
    }
    dw.axpy(-4.0 * e.chi, s.omega);
    dw.axpy(e.kappa, grad_div(s.omega));
    dw.axpy(e.eta, laplacian(s.omega));
    dw.axpy(2.0 * e.chi, curl(s.u));
    dm.axpy(e.nu, laplacian(s.magnetic));

    State out(leray_project(std::move(du)), std::move(dw), leray_project(std::move(dm)), s.t);
    zero_mean(out.omega);
    return out;
}

/// Discrete L² energy budget of a state. The five transport pairings vanish
/// identically for solenoidal, dealiased data.
struct EnergyAudit {
    double advect_u = 0.0;         // ⟨(u·∇)u, u⟩
    double advect_omega = 0.0;     // ⟨(u·∇)ω, ω⟩
    double advect_magnetic = 0.0;  // ⟨(u·∇)B, B⟩
    double lorentz_pair = 0.0;     // ⟨(B·∇)B, u⟩ + ⟨(B·∇)u, B⟩
    double alpha_pair = 0.0;       // ⟨α·∇B, u⟩ + ⟨α·∇u, B⟩
    double curl_grad_div = 0.0;    // ⟨∇×(∇∇·ω), ∇×ω⟩
    double coupling_transfer = 0.0;  // 4χ⟨∇×u, ω⟩
    double dissipation = 0.0;  // (μ+χ)‖∇u‖² + 4χ‖ω‖² + κ‖∇·ω‖² + η‖∇ω‖² + ν‖∇B‖²
    double energy_scale = 0.0;  // ‖(u, ω, B)‖²_{L²}
    double max_relative = 0.0;  // worst cancellation relative to its scale
    bool defect = false;

    static constexpr double kTolerance = 1e-10;
};

inline EnergyAudit energy_flux_audit(const State& s, const PhysParams& p, SystemVariant v) {
    const PhysParams e = effective_params(p, v);
    EnergyAudit a;
    a.advect_u = inner(advect(s.u, s.u), s.u);
    a.advect_omega = inner(advect(s.u, s.omega), s.omega);
    a.advect_magnetic = inner(advect(s.u, s.magnetic), s.magnetic);
    a.lorentz_pair = inner(advect(s.magnetic, s.magnetic), s.u) + inner(advect(s.magnetic, s.u), s.magnetic);
    a.alpha_pair = inner(alpha_dot_grad(s.magnetic, e.alpha), s.u) +
                   inner(alpha_dot_grad(s.u, e.alpha), s.magnetic);
    a.curl_grad_div = inner(curl(grad_div(s.omega)), curl(s.omega));
    a.coupling_transfer = 4.0 * e.chi * inner(curl(s.u), s.omega);
    a.dissipation = (e.mu + e.chi) * sobolev_norm_squared(s.u, 1.0, true) +
                    4.0 * e.chi * sobolev_norm_squared(s.omega, 0.0) +
                    e.kappa * sobolev_norm_squared(div(s.omega), 0.0) +
                    e.eta * sobolev_norm_squared(s.omega, 1.0, true) +
                    e.nu * sobolev_norm_squared(s.magnetic, 1.0, true);
    a.energy_scale = state_norm(s, 0.0) * state_norm(s, 0.0);

    if (a.energy_scale > 0.0) {
        for (double c : {a.advect_u, a.advect_omega, a.advect_magnetic, a.lorentz_pair, a.alpha_pair}) {
            a.max_relative = std::max(a.max_relative, std::abs(c) / a.energy_scale);
        }
    }
    const double w2 = sobolev_norm_squared(s.omega, 2.0, true);
    if (w2 > 0.0) a.max_relative = std::max(a.max_relative, std::abs(a.curl_grad_div) / w2);
    a.defect = a.max_relative > EnergyAudit::kTolerance;
    return a;
}

}  // namespace mmp
