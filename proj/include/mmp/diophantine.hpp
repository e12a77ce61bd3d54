#pragma once

// Exhaustive lattice checks of the Diophantine condition |α·k| >= c/|k|^r and
// empirical probes of the norm-lifting inequality ‖f‖_{Hˢ} <= C‖α·∇f‖_{H^{s+r}}
// on the truncated lattice of a grid.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mmp/fields.hpp"
#include "mmp/norms.hpp"
#include "mmp/spectral.hpp"

namespace mmp {

struct DiophantineReport {
    Vec3 alpha{};
    double r = 0.0;
    int k_max = 0;
    /// min over 0 < |k|∞ <= k_max of |α·k|·|k|^r (0 when degenerate).
    double c_est = 0.0;
    Wavevector argmin{0, 0, 0};
    bool degenerate = false;
};

inline constexpr double kDegenerateThreshold = 1e-14;

inline std::string format_wavevector(const Wavevector& k) {
    return "(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + "," + std::to_string(k[2]) + ")";
}

/// Scans the half lattice (first nonzero coordinate positive) in the order
/// k₁ = 0…k_max, k₂, k₃ = -k_max…k_max. The first exact null vector found, or
/// the first strict minimiser, is reported.
inline DiophantineReport check_diophantine(const Vec3& alpha, double r, int k_max) {
    if (k_max < 1 || k_max > 512) throw ConfigError("k_max must lie in [1, 512], got " + std::to_string(k_max));
    if (!(r > 2.0)) warn("Diophantine exponent r=" + std::to_string(r) + " is not > 2");

    DiophantineReport rep;
    rep.alpha = alpha;
    rep.r = r;
    rep.k_max = k_max;
    if (alpha[0] == 0.0 && alpha[1] == 0.0 && alpha[2] == 0.0) {
        rep.degenerate = true;
        rep.argmin = {1, 0, 0};
        return rep;
    }

    double best = std::numeric_limits<double>::infinity();
    for (int k1 = 0; k1 <= k_max; ++k1) {
        for (int k2 = (k1 == 0 ? 0 : -k_max); k2 <= k_max; ++k2) {
            for (int k3 = (k1 == 0 && k2 == 0 ? 1 : -k_max); k3 <= k_max; ++k3) {
                const double proj = std::abs(alpha[0] * k1 + alpha[1] * k2 + alpha[2] * k3);
                if (proj < kDegenerateThreshold) {
                    rep.degenerate = true;
                    rep.c_est = 0.0;
                    rep.argmin = {k1, k2, k3};
                    return rep;
                }
                const double kk = static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2 +
                                  static_cast<double>(k3) * k3;
                const double val = proj * std::pow(kk, 0.5 * r);
                if (val < best) {
                    best = val;
                    rep.argmin = {k1, k2, k3};
                }
            }
        }
    }
    rep.c_est = best;
    return rep;
}

/// Null vectors of α on the half lattice with |k|∞ <= radius, in scan order.
inline std::vector<Wavevector> null_vectors(const Vec3& alpha, int radius) {
    std::vector<Wavevector> out;
    for (int k1 = 0; k1 <= radius; ++k1)
        for (int k2 = (k1 == 0 ? 0 : -radius); k2 <= radius; ++k2)
            for (int k3 = (k1 == 0 && k2 == 0 ? 1 : -radius); k3 <= radius; ++k3)
                if (std::abs(alpha[0] * k1 + alpha[1] * k2 + alpha[2] * k3) < kDegenerateThreshold)
                    out.push_back({k1, k2, k3});
    return out;
}

inline std::string to_text(const DiophantineReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "alpha=" << rep.alpha[0] << ',' << rep.alpha[1] << ',' << rep.alpha[2] << '\n'
       << "r=" << rep.r << '\n'
       << "k_max=" << rep.k_max << '\n'
       << "c_est=" << rep.c_est << '\n'
       << "argmin_k=" << rep.argmin[0] << ',' << rep.argmin[1] << ',' << rep.argmin[2] << '\n'
       << "degenerate=" << (rep.degenerate ? "true" : "false") << '\n';
    return os.str();
}

/// ‖f‖_{Hˢ} / ‖α·∇f‖_{H^{s+r}} for a scalar field.
inline double lifting_ratio(const SpectralScalarField& f, const Vec3& alpha, double s, double r) {
    const double num = sobolev_norm(f, s);
    const double den = sobolev_norm(alpha_dot_grad(f, alpha), s + r);
    if (den == 0.0) throw UsageError("lifting ratio undefined: α·∇f = 0");
    return num / den;
}

/// (1+|k|²)^{s/2} / (|α·k| (1+|k|²)^{(s+r)/2}) for a single lattice mode.
inline double mode_ratio(const Wavevector& k, const Vec3& alpha, double s, double r) {
    const double kk = detail::squared_magnitude(k);
    const double proj = std::abs(alpha[0] * k[0] + alpha[1] * k[1] + alpha[2] * k[2]);
    return std::pow(1.0 + kk, 0.5 * s) / (proj * std::pow(1.0 + kk, 0.5 * (s + r)));
}

struct LemmaRatioReport {
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    /// Sharp constant on the truncated lattice: max of mode_ratio over retained k ≠ 0.
    double mode_bound = 0.0;
    Wavevector worst_mode{0, 0, 0};
    int k_max = 0;
    int trials = 0;
};

/// Lifting-inequality ratios for `trials` random mean-zero fields on the
/// dealiased band of `grid`, plus the per-mode worst case on that band.
inline LemmaRatioReport lemma_ratio(const Vec3& alpha, double s, double r, const GridSpec& grid, int trials,
                                    std::uint64_t seed) {
    if (trials < 1) throw ConfigError("trials must be >= 1");
    const int kmax = grid.kmax_dealias();
    const DiophantineReport dio = check_diophantine(alpha, r, kmax);
    if (dio.degenerate) {
        // Name every null vector of the first shell; a deeper one is named alone.
        std::vector<Wavevector> nulls = null_vectors(alpha, 1);
        if (nulls.empty()) nulls.push_back(dio.argmin);
        std::string names;
        for (const auto& k : nulls) names += (names.empty() ? "" : ", ") + format_wavevector(k);
        throw ConfigError("alpha is degenerate on the retained lattice: null vector" +
                          std::string(nulls.size() > 1 ? "s " : " ") + names);
    }

    LemmaRatioReport rep;
    rep.k_max = kmax;
    rep.trials = trials;
    for_each_mode(grid, [&](std::size_t, const Wavevector& k, double) {
        if (k == Wavevector{0, 0, 0} || !in_dealias_band(grid, k)) return;
        const double m = mode_ratio(k, alpha, s, r);
        if (m > rep.mode_bound) {
            rep.mode_bound = m;
            rep.worst_mode = k;
        }
    });

    std::mt19937_64 rng(seed);
    double sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        SpectralScalarField f(grid);
        auto d = f.data();
        for_each_mode(grid, [&](std::size_t i, const Wavevector& k, double) {
            const double re = 2.0 * detail::unit_uniform(rng) - 1.0;
            const double im = 2.0 * detail::unit_uniform(rng) - 1.0;
            if (k == Wavevector{0, 0, 0} || !in_dealias_band(grid, k)) return;
            d[i] = Complex(re, im);
        });
        detail::impose_hermitian(f);
        const double q = lifting_ratio(f, alpha, s, r);
        rep.max_ratio = std::max(rep.max_ratio, q);
        sum += q;
    }
    rep.mean_ratio = sum / trials;
    return rep;
}

inline std::string to_text(const LemmaRatioReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "k_max=" << rep.k_max << '\n'
       << "trials=" << rep.trials << '\n'
       << "max_ratio=" << rep.max_ratio << '\n'
       << "mean_ratio=" << rep.mean_ratio << '\n'
       << "mode_bound=" << rep.mode_bound << '\n'
       << "worst_mode=" << rep.worst_mode[0] << ',' << rep.worst_mode[1] << ',' << rep.worst_mode[2] << '\n';
    return os.str();
}

}  // namespace mmp
