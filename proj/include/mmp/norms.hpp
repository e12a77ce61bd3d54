#pragma once

// Spectral Sobolev norms and weighted L² pairings. All sums run over the full
// logical spectrum (half-spectrum entries weighted by their multiplicity), so
// results equal the corresponding integrals over T³ for band-limited fields.

#include <cmath>
#include <string>

#include "mmp/spectral.hpp"

namespace mmp {

namespace detail {

inline void check_index(double s) {
    if (!(s >= -10.0 && s <= 40.0)) {
        throw UsageError("Sobolev index " + std::to_string(s) + " outside [-10, 40]");
    }
}

inline double squared_magnitude(const Wavevector& k) {
    return static_cast<double>(k[0]) * k[0] + static_cast<double>(k[1]) * k[1] +
           static_cast<double>(k[2]) * k[2];
}

// Σ_k w(|k|²) |f̂(k)|² over the full spectrum, without the (2π)³ factor.
template <class Weight>
double weighted_energy(const SpectralScalarField& f, Weight&& w) {
    double sum = 0.0;
    auto d = f.data();
    for_each_mode(f.grid(), [&](std::size_t i, const Wavevector& k, double mult) {
        const double a = std::norm(d[i]);
        if (!std::isfinite(a)) throw IntegrityError("non-finite spectral coefficient");
        if (a != 0.0) sum += mult * w(squared_magnitude(k)) * a;
    });
    return sum;
}

template <class Weight>
double weighted_pairing(const SpectralScalarField& f, const SpectralScalarField& g, Weight&& w) {
    require_same_grid(f.grid(), g.grid());
    double sum = 0.0;
    auto a = f.data();
    auto b = g.data();
    for_each_mode(f.grid(), [&](std::size_t i, const Wavevector& k, double mult) {
        sum += mult * w(squared_magnitude(k)) * (a[i].real() * b[i].real() + a[i].imag() * b[i].imag());
    });
    return sum;
}

}  // namespace detail

/// Weight (1+|k|²)^s, or |k|^{2s} with k = 0 skipped when homogeneous.
struct SobolevWeight {
    double s;
    bool homogeneous = false;
    double operator()(double kk) const {
        if (homogeneous) return kk == 0.0 ? 0.0 : std::pow(kk, s);
        return std::pow(1.0 + kk, s);
    }
};

inline double sobolev_norm_squared(const SpectralScalarField& f, double s, bool homogeneous = false) {
    detail::check_index(s);
    return kVolume * detail::weighted_energy(f, SobolevWeight{s, homogeneous});
}

inline double sobolev_norm_squared(const SpectralVectorField& v, double s, bool homogeneous = false) {
    return sobolev_norm_squared(v[0], s, homogeneous) + sobolev_norm_squared(v[1], s, homogeneous) +
           sobolev_norm_squared(v[2], s, homogeneous);
}

/// ‖f‖²_{Hˢ} = (2π)³ Σ_k (1+|k|²)ˢ |f̂(k)|²; homogeneous uses |k|^{2s}.
template <class Field>
double sobolev_norm(const Field& f, double s, bool homogeneous = false) {
    return std::sqrt(sobolev_norm_squared(f, s, homogeneous));
}

inline double l2_norm(const SpectralVectorField& v) { return sobolev_norm(v, 0.0); }

/// ⟨∇^j f, ∇^j g⟩ = (2π)³ Σ |k|^{2j} Re(f̂ conj ĝ); j = 0 is the L² pairing.
inline double derivative_pairing(const SpectralVectorField& f, const SpectralVectorField& g, int order) {
    double sum = 0.0;
    const SobolevWeight w{static_cast<double>(order), true};
    auto weight = [&](double kk) { return order == 0 ? 1.0 : w(kk); };
    for (int c = 0; c < 3; ++c) sum += detail::weighted_pairing(f[c], g[c], weight);
    return kVolume * sum;
}

inline double inner(const SpectralVectorField& f, const SpectralVectorField& g) {
    return derivative_pairing(f, g, 0);
}

inline double inner(const SpectralScalarField& f, const SpectralScalarField& g) {
    return kVolume * detail::weighted_pairing(f, g, [](double) { return 1.0; });
}

/// Hˢ pairing (2π)³ Σ (1+|k|²)ˢ Re(f̂ conj ĝ).
inline double sobolev_inner(const SpectralVectorField& f, const SpectralVectorField& g, double s) {
    detail::check_index(s);
    double sum = 0.0;
    for (int c = 0; c < 3; ++c) sum += detail::weighted_pairing(f[c], g[c], SobolevWeight{s, false});
    return kVolume * sum;
}

inline double max_abs_coeff(const SpectralVectorField& v) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c)
        for (const auto& z : v[c].data()) m = std::max(m, std::abs(z));
    return m;
}

/// max_k |k·v̂(k)| / max_k |v̂(k)|; 0 for the zero field.
inline double divergence_residual(const SpectralVectorField& v) {
    const double vmax = max_abs_coeff(v);
    if (vmax == 0.0) return 0.0;
    double dmax = 0.0;
    for_each_mode(v.grid(), [&](std::size_t i, const Wavevector& k, double) {
        const Complex kv = static_cast<double>(k[0]) * v[0].data()[i] +
                           static_cast<double>(k[1]) * v[1].data()[i] +
                           static_cast<double>(k[2]) * v[2].data()[i];
        dmax = std::max(dmax, std::abs(kv));
    });
    return dmax / vmax;
}

inline bool all_finite(const SpectralVectorField& v) {
    for (int c = 0; c < 3; ++c)
        for (const auto& z : v[c].data())
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
}

}  // namespace mmp
