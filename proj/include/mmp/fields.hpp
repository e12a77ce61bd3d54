#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mmp/norms.hpp"
#include "mmp/spectral.hpp"

namespace mmp {

/// Which equations evolve the state. The numeric values are the checkpoint variant ids.
enum class SystemVariant : std::uint32_t {
    Full = 0,                        // μ, χ, κ, η, ν all active
    ZeroKinematic = 1,               // μ = 0
    ZeroKinematicZeroDiffusion = 2,  // μ = 0, ν = 0
    Perturbation = 3,                // μ = 0, ν = 0, B = b - α around b = α
    InviscidResistiveMHD = 4,        // μ = 0, χ = 0
    IdealMHD = 5,                    // μ = 0, χ = 0, ν = 0
};

inline constexpr std::array<std::pair<SystemVariant, std::string_view>, 6> kVariantNames{{
    {SystemVariant::Full, "full"},
    {SystemVariant::ZeroKinematic, "zero-kinematic"},
    {SystemVariant::ZeroKinematicZeroDiffusion, "zero-kinematic-zero-diffusion"},
    {SystemVariant::Perturbation, "perturbation"},
    {SystemVariant::InviscidResistiveMHD, "inviscid-resistive-mhd"},
    {SystemVariant::IdealMHD, "ideal-mhd"},
}};

inline std::string_view to_string(SystemVariant v) {
    for (const auto& [id, name] : kVariantNames)
        if (id == v) return name;
    return "unknown";
}

inline std::optional<SystemVariant> variant_from_string(std::string_view name) {
    for (const auto& [id, n] : kVariantNames)
        if (n == name) return id;
    return std::nullopt;
}

inline std::optional<SystemVariant> variant_from_id(std::uint32_t id) {
    if (id > static_cast<std::uint32_t>(SystemVariant::IdealMHD)) return std::nullopt;
    return static_cast<SystemVariant>(id);
}

inline bool has_kinematic_viscosity(SystemVariant v) { return v == SystemVariant::Full; }
inline bool has_micro_coupling(SystemVariant v) {
    return v != SystemVariant::InviscidResistiveMHD && v != SystemVariant::IdealMHD;
}
inline bool has_magnetic_diffusion(SystemVariant v) {
    return v == SystemVariant::Full || v == SystemVariant::ZeroKinematic ||
           v == SystemVariant::InviscidResistiveMHD;
}
inline bool has_background(SystemVariant v) { return v == SystemVariant::Perturbation; }

struct PhysParams {
    double mu = 0.0;     // kinematic viscosity
    double chi = 0.0;    // micro-rotation viscosity
    double kappa = 0.0;  // angular viscosity (grad-div)
    double eta = 0.0;    // angular viscosity (Laplacian)
    double nu = 0.0;     // magnetic diffusivity
    Vec3 alpha{0.0, 0.0, 0.0};
    double r = 2.5;      // Diophantine exponent

    friend bool operator==(const PhysParams&, const PhysParams&) = default;
};

/// Coefficients actually used by a variant; excluded terms read as zero.
inline PhysParams effective_params(const PhysParams& p, SystemVariant v) {
    PhysParams e = p;
    if (!has_kinematic_viscosity(v)) e.mu = 0.0;
    if (!has_micro_coupling(v)) e.chi = 0.0;
    if (!has_magnetic_diffusion(v)) e.nu = 0.0;
    if (!has_background(v)) e.alpha = {0.0, 0.0, 0.0};
    return e;
}

/// α₀ = 0.9√χ (1, √2, √3)/|(1, √2, √3)|, so |α₀|² = 0.81χ.
inline Vec3 default_background(double chi) {
    const Vec3 dir{1.0, std::sqrt(2.0), std::sqrt(3.0)};
    const double scale = 0.9 * std::sqrt(chi) / norm(dir);
    return {dir[0] * scale, dir[1] * scale, dir[2] * scale};
}

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool accepted() const noexcept { return errors.empty(); }
};

inline constexpr std::string_view kOpenRegimeWarning =
    "open problem regime, no stability guarantee (chi = 0 decouples the micro-rotation)";

/// Checks coefficients against the stability hypotheses of the selected variant.
/// Strict mode rejects violations; permissive mode reports them as warnings.
inline ValidationReport validate_params(const PhysParams& p, SystemVariant v, bool strict) {
    ValidationReport rep;
    auto fmt = [](double x) {
        std::ostringstream os;
        os.precision(6);
        os << x;
        return os.str();
    };
    const std::array<std::pair<std::string_view, double>, 5> coeffs{
        {{"mu", p.mu}, {"chi", p.chi}, {"kappa", p.kappa}, {"eta", p.eta}, {"nu", p.nu}}};
    for (const auto& [name, val] : coeffs) {
        if (!std::isfinite(val) || val < 0.0) {
            rep.errors.push_back(std::string(name) + " must be finite and >= 0, got " + fmt(val));
        }
    }
    for (double a : p.alpha)
        if (!std::isfinite(a)) rep.errors.push_back("alpha must be finite");
    if (!rep.accepted()) return rep;

    auto hypothesis = [&](bool ok, std::string msg) {
        if (ok) return;
        (strict ? rep.errors : rep.warnings).push_back(std::move(msg));
    };

    // Coefficients the variant does not use.
    const PhysParams eff = effective_params(p, v);
    const std::string vname(to_string(v));
    hypothesis(eff.mu == p.mu, "mu=" + fmt(p.mu) + " is not used by variant " + vname);
    hypothesis(eff.chi == p.chi, "chi=" + fmt(p.chi) + " is not used by variant " + vname);
    hypothesis(eff.nu == p.nu, "nu=" + fmt(p.nu) + " is not used by variant " + vname);
    hypothesis(eff.alpha == p.alpha, "alpha is not used by variant " + vname);

    switch (v) {
        case SystemVariant::ZeroKinematic:
            hypothesis(p.chi > 0.0, "exponential-decay hypothesis chi > 0 violated: chi=" + fmt(p.chi));
            hypothesis(p.eta > 0.0, "exponential-decay hypothesis eta > 0 violated: eta=" + fmt(p.eta));
            hypothesis(p.nu > 0.0, "exponential-decay hypothesis nu > 0 violated: nu=" + fmt(p.nu));
            break;
        case SystemVariant::Perturbation: {
            const double a2 = dot(p.alpha, p.alpha);
            hypothesis(a2 < p.chi, "structure condition |α|²<χ<2 violated: |α|²=" + fmt(a2) +
                                       " >= χ=" + fmt(p.chi));
            hypothesis(p.chi < 2.0, "structure condition |α|²<χ<2 violated: χ=" + fmt(p.chi) + " >= 2");
            hypothesis(p.eta > 0.0, "algebraic-decay hypothesis eta > 0 violated: eta=" + fmt(p.eta));
            hypothesis(p.r > 2.0, "Diophantine exponent r > 2 required, got r=" + fmt(p.r));
            break;
        }
        case SystemVariant::InviscidResistiveMHD:
        case SystemVariant::IdealMHD:
            rep.warnings.emplace_back(kOpenRegimeWarning);
            break;
        case SystemVariant::Full:
        case SystemVariant::ZeroKinematicZeroDiffusion:
            break;
    }
    return rep;
}

/// Solution state. `magnetic` holds b, or B = b - α for the perturbation variant.
struct State {
    explicit State(GridSpec grid) : u(grid), omega(grid), magnetic(grid) {}
    State(SpectralVectorField u_, SpectralVectorField omega_, SpectralVectorField m_, double t_ = 0.0)
        : u(std::move(u_)), omega(std::move(omega_)), magnetic(std::move(m_)), t(t_) {
        require_same_grid(u.grid(), omega.grid());
        require_same_grid(u.grid(), magnetic.grid());
    }

    const GridSpec& grid() const noexcept { return u.grid(); }

    SpectralVectorField u;
    SpectralVectorField omega;
    SpectralVectorField magnetic;
    double t = 0.0;

    friend bool operator==(const State&, const State&) = default;
};

/// ‖(u, ω, m)‖_{Hˢ} as the root of the summed squares.
inline double state_norm(const State& s, double index, bool homogeneous = false) {
    return std::sqrt(sobolev_norm_squared(s.u, index, homogeneous) +
                     sobolev_norm_squared(s.omega, index, homogeneous) +
                     sobolev_norm_squared(s.magnetic, index, homogeneous));
}

struct InitSpec {
    double epsilon = 0.01;
    double sobolev_index = 3.0;
    double spectrum_slope = 2.0;
    std::optional<double> k_peak;  // defaults to n/6
    std::uint64_t seed = 42;

    double peak_for(const GridSpec& g) const { return k_peak.value_or(g.n() / 6.0); }
};

/// Returns f scaled so that ‖f‖_{Hˢ} = target.
inline SpectralVectorField rescale_to_norm(SpectralVectorField f, double s, double target) {
    if (!(target >= 0.0)) throw UsageError("rescale target must be >= 0");
    if (target == 0.0) return SpectralVectorField(f.grid());
    const double current = sobolev_norm(f, s);
    if (current == 0.0) throw UsageError("cannot rescale a zero field to a positive norm");
    f *= target / current;
    return f;
}

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Makes entries on the self-paired planes (k₃ = 0 and Nyquist) Hermitian by
// copying the lexicographically smaller storage index onto its partner.
inline void impose_hermitian(SpectralScalarField& f) {
    const GridSpec& g = f.grid();
    const int n = g.n();
    auto d = f.data();
    for (int j3 : {0, n / 2}) {
        for (int j1 = 0; j1 < n; ++j1) {
            for (int j2 = 0; j2 < n; ++j2) {
                const int m1 = (n - j1) % n;
                const int m2 = (n - j2) % n;
                const std::size_t here = g.spectral_index(j1, j2, j3);
                if (m1 == j1 && m2 == j2) {
                    d[here] = d[here].real();
                } else if (std::pair(j1, j2) < std::pair(m1, m2)) {
                    d[g.spectral_index(m1, m2, j3)] = std::conj(d[here]);
                }
            }
        }
    }
}

// Random-phase field with |f̂(k)| = |k|^{-a} exp(-|k|²/k_peak²) on the
// dealiased band, k = 0 excluded. Consumes exactly one draw per stored mode
// and component, in storage order.
inline SpectralVectorField random_envelope_field(const GridSpec& g, double slope, double k_peak,
                                                 std::mt19937_64& rng) {
    SpectralVectorField out(g);
    for (int c = 0; c < 3; ++c) {
        auto d = out[c].data();
        for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
            const double phase = kTwoPi * unit_uniform(rng);
            const double kk = squared_magnitude(k);
            if (kk == 0.0 || !in_dealias_band(g, k)) return;
            const double amp = std::pow(kk, -0.5 * slope) * std::exp(-kk / (k_peak * k_peak));
            d[i] = std::polar(amp, phase);
        });
        impose_hermitian(out[c]);
    }
    return out;
}

}  // namespace detail

/// Seeded random mean-zero initial data: u and magnetic solenoidal, ω
/// unconstrained, every field band-limited to the dealiased band and rescaled
/// separately to ‖·‖_{H^{sobolev_index}} = epsilon. The stream is
/// std::mt19937_64(seed) consumed field by field (u, ω, magnetic).
inline State make_random_state(const GridSpec& grid, const InitSpec& init, SystemVariant /*variant*/) {
    if (!(init.epsilon >= 0.0) || !std::isfinite(init.epsilon)) {
        throw ConfigError("init.epsilon must be finite and >= 0");
    }
    if (!(init.spectrum_slope >= 0.0)) throw ConfigError("init.spectrum_slope must be >= 0");
    const double k_peak = init.peak_for(grid);
    if (!(k_peak > 0.0) || k_peak > grid.kmax_dealias()) {
        throw ConfigError("init.k_peak must lie in (0, floor(n/3)] = (0, " +
                          std::to_string(grid.kmax_dealias()) + "]");
    }
    State s(grid);
    if (init.epsilon == 0.0) return s;

    std::mt19937_64 rng(init.seed);
    auto u = detail::random_envelope_field(grid, init.spectrum_slope, k_peak, rng);
    auto w = detail::random_envelope_field(grid, init.spectrum_slope, k_peak, rng);
    auto m = detail::random_envelope_field(grid, init.spectrum_slope, k_peak, rng);
    s.u = rescale_to_norm(leray_project(std::move(u)), init.sobolev_index, init.epsilon);
    s.omega = rescale_to_norm(std::move(w), init.sobolev_index, init.epsilon);
    s.magnetic = rescale_to_norm(leray_project(std::move(m)), init.sobolev_index, init.epsilon);
    return s;
}

}  // namespace mmp
