#pragma once

// Monitored quantities of a trajectory: Sobolev norms of the state, the
// auxiliary energy functionals used in the decay arguments, divergence and
// cancellation residuals, and least-squares decay-rate fits.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mmp/dynamics.hpp"
#include "mmp/fields.hpp"
#include "mmp/integrator.hpp"
#include "mmp/norms.hpp"

namespace mmp {

/// Ḣ² energy of the curls, ‖(∇×u, ∇×ω, ∇×m)‖²_{Ḣ²}.
inline double curl_energy_h2(const State& s) {
    return sobolev_norm_squared(curl(s.u), 2.0, true) + sobolev_norm_squared(curl(s.omega), 2.0, true) +
           sobolev_norm_squared(curl(s.magnetic), 2.0, true);
}

/// F = A‖(∇×u, ∇×ω, ∇×m)‖²_{Ḣ²} - ⟨∇²ω, ∇²(∇×u)⟩.
inline double functional_F(const State& s, double A = 10.0) {
    if (!(A >= 1.0)) throw UsageError("functional_F requires A >= 1");
    return A * curl_energy_h2(s) - derivative_pairing(s.omega, curl(s.u), 2);
}

/// Smallest A for which F(s) >= ‖(∇×u, ∇×ω, ∇×m)‖²_{Ḣ²} holds on this state.
inline double coercivity_threshold_F(const State& s) {
    const double x = curl_energy_h2(s);
    if (x == 0.0) return 1.0;
    return std::max(1.0, 1.0 + derivative_pairing(s.omega, curl(s.u), 2) / x);
}

struct FunctionalED {
    double E = 0.0;
    double D = 0.0;
};

namespace detail {

// ‖∇f‖²_{Hˢ} = (2π)³ Σ (1+|k|²)ˢ |k|² |f̂|².
inline double gradient_sobolev_squared(const SpectralVectorField& f, double s) {
    double sum = 0.0;
    for (int c = 0; c < 3; ++c)
        sum += weighted_energy(f[c], [s](double kk) { return std::pow(1.0 + kk, s) * kk; });
    return kVolume * sum;
}

}  // namespace detail

/// E and D of the perturbation system. The derivative sums run over integer
/// orders 0…⌊r⌋+4 and 0…⌊r⌋+3; C₀ is a reporting weight.
inline FunctionalED functional_E_D(const State& s, const PhysParams& p, SystemVariant v, double gamma = 4.0,
                                   double c0 = 1.0) {
    if (v != SystemVariant::Perturbation) throw UsageError("E/D functionals are defined for the perturbation variant");
    if (!(gamma > 1.0)) throw UsageError("functional_E_D requires gamma > 1");
    const double top = p.r + 5.0;
    const int rfloor = static_cast<int>(std::floor(p.r));

    const SpectralVectorField curl_u = curl(s.u);
    const SpectralVectorField a_grad_b = alpha_dot_grad(s.magnetic, p.alpha);

    FunctionalED out;
    out.E = gamma * (sobolev_norm_squared(s.u, top) + sobolev_norm_squared(s.omega, top) +
                     sobolev_norm_squared(s.magnetic, top));
    for (int j = 0; j <= rfloor + 4; ++j) out.E -= derivative_pairing(s.omega, curl_u, j);
    for (int j = 0; j <= rfloor + 3; ++j) out.E -= derivative_pairing(s.u, a_grad_b, j);

    out.D = (gamma - 1.0) * p.eta * detail::gradient_sobolev_squared(s.omega, top) +
            0.5 * c0 * (sobolev_norm_squared(s.u, top) + sobolev_norm_squared(a_grad_b, p.r + 3.0));
    return out;
}

struct DiagnosticsRecord {
    double t = 0.0;
    double l2_energy = 0.0;
    double h3 = 0.0;
    std::optional<double> hN;
    std::optional<double> hr5;
    std::optional<double> F_func;
    std::optional<double> E_func;
    std::optional<double> D_func;
    std::optional<double> alpha_grad_B_hr3;
    double div_u_max = 0.0;
    double div_b_max = 0.0;
    std::optional<double> cancel_max;

    friend bool operator==(const DiagnosticsRecord&, const DiagnosticsRecord&) = default;
};

struct DiagnosticsOptions {
    double A = 10.0;
    double gamma = 4.0;
    double c0 = 1.0;
    /// Index N of the high norm reported for perturbation runs.
    double high_index = 21.0;
    bool audit = true;
};

inline DiagnosticsRecord compute_record(const State& s, const PhysParams& p, SystemVariant v,
                                        const DiagnosticsOptions& opt = {}) {
    DiagnosticsRecord r;
    r.t = s.t;
    const double l2 = state_norm(s, 0.0);
    r.l2_energy = 0.5 * l2 * l2;
    r.h3 = state_norm(s, 3.0);
    r.F_func = functional_F(s, opt.A);
    if (v == SystemVariant::Perturbation) {
        r.hN = state_norm(s, opt.high_index);
        r.hr5 = state_norm(s, p.r + 5.0);
        const auto ed = functional_E_D(s, p, v, opt.gamma, opt.c0);
        r.E_func = ed.E;
        r.D_func = ed.D;
        r.alpha_grad_B_hr3 = sobolev_norm(alpha_dot_grad(s.magnetic, p.alpha), p.r + 3.0);
    }
    r.div_u_max = divergence_residual(s.u);
    r.div_b_max = divergence_residual(s.magnetic);
    if (opt.audit) r.cancel_max = energy_flux_audit(s, p, v).max_relative;
    return r;
}

/// Runs the integrator, collecting one record per record time.
inline std::pair<RunResult, std::vector<DiagnosticsRecord>> run_with_diagnostics(
    const State& initial, const PhysParams& p, SystemVariant v, const StepperConfig& cfg,
    const DiagnosticsOptions& opt = {}, RunSinks sinks = {}) {
    std::vector<DiagnosticsRecord> records;
    auto user = sinks.on_record;
    sinks.on_record = [&](const State& s, std::uint64_t step) {
        records.push_back(compute_record(s, p, v, opt));
        if (user) user(s, step);
    };
    RunResult res = run(initial, p, v, cfg, sinks);
    return {std::move(res), std::move(records)};
}

// ---------------------------------------------------------------------------
// Decay fits

enum class DecayModel { exponential, algebraic };

struct FitReport {
    DecayModel model = DecayModel::exponential;
    double c = 0.0;         // prefactor C
    double slope = 0.0;     // d log y / d t, or d log y / d log(1+t)
    double r_squared = 0.0;
    std::size_t samples = 0;

    /// Decay rate of C e^{-rate t}.
    double rate() const { return -slope; }
    /// Exponent p of C (1+t)^p.
    double exponent() const { return slope; }
};

/// Least squares on log y against t (exponential) or log(1+t) (algebraic),
/// using samples with t >= t_min.
inline FitReport fit_decay(std::span<const double> t, std::span<const double> y, DecayModel model,
                           double t_min) {
    if (t.size() != y.size()) throw UsageError("fit_decay: t and y differ in length");
    std::vector<double> xs, ls;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] >= t_min)) continue;
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
            throw ConfigError("fit_decay: non-positive sample y=" + std::to_string(y[i]) +
                              " at t=" + std::to_string(t[i]));
        }
        xs.push_back(model == DecayModel::exponential ? t[i] : std::log1p(t[i]));
        ls.push_back(std::log(y[i]));
    }
    if (xs.size() < 10) {
        throw ConfigError("fit_decay: need at least 10 samples with t >= " + std::to_string(t_min) +
                          ", got " + std::to_string(xs.size()));
    }
    const double m = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ls[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ls[i] - my);
        syy += (ls[i] - my) * (ls[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_decay: all samples share one abscissa");

    FitReport f;
    f.model = model;
    f.samples = xs.size();
    f.slope = sxy / sxx;
    const double intercept = my - f.slope * mx;
    f.c = std::exp(intercept);
    double ss_res = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ls[i] - (intercept + f.slope * xs[i]);
        ss_res += e * e;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

}  // namespace mmp
