#pragma once

// Periodic grid on [0, 2π)³, real <-> spectral transforms, exact spectral
// differential operators, 2/3-rule dealiasing and the Leray projection.
//
// Convention: f(x) = Σ_k f̂(k) e^{ik·x}, so f̂ = (1/n³) Σ_x f(x) e^{-ik·x} and
// ‖f‖²_{L²} = (2π)³ Σ_k |f̂(k)|². Spectral storage is FFTW's r2c half
// spectrum (n × n × (n/2+1)); coeff() gives full-spectrum logical access by
// signed wavevector k ∈ {-n/2, …, n/2-1}³.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mmp/errors.hpp"

namespace mmp {

using Complex = std::complex<double>;
using Vec3 = std::array<double, 3>;
using Wavevector = std::array<int, 3>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// (2π)³, the Parseval factor of the Fourier convention.
inline constexpr double kVolume = kTwoPi * kTwoPi * kTwoPi;

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

class GridSpec {
public:
    explicit GridSpec(int n) : n_(n) {
        if (n < 8 || (n & (n - 1)) != 0) {
            throw ConfigError("grid.n must be a power of two >= 8, got " + std::to_string(n));
        }
    }

    int n() const noexcept { return n_; }
    /// Number of stored planes along the last axis (half spectrum).
    int nz() const noexcept { return n_ / 2 + 1; }
    /// Largest retained |k_i| after 2/3 truncation.
    int kmax_dealias() const noexcept { return n_ / 3; }
    double spacing() const noexcept { return kTwoPi / n_; }

    std::size_t physical_size() const noexcept {
        return static_cast<std::size_t>(n_) * n_ * n_;
    }
    std::size_t spectral_size() const noexcept {
        return static_cast<std::size_t>(n_) * n_ * nz();
    }

    /// Signed wavenumber of storage index j (j = n/2 maps to -n/2).
    int wavenumber(int j) const noexcept { return j < n_ / 2 ? j : j - n_; }
    /// Storage index of signed wavenumber k along a full axis.
    int index_of(int k) const noexcept { return ((k % n_) + n_) % n_; }

    std::size_t spectral_index(int j1, int j2, int j3) const noexcept {
        return (static_cast<std::size_t>(j1) * n_ + j2) * nz() + j3;
    }
    std::size_t physical_index(int i1, int i2, int i3) const noexcept {
        return (static_cast<std::size_t>(i1) * n_ + i2) * n_ + i3;
    }

    /// True when storage index j sits on the Nyquist plane of its axis.
    bool is_nyquist(int j) const noexcept { return j == n_ / 2; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;

private:
    int n_;
};

inline void require_same_grid(const GridSpec& a, const GridSpec& b) {
    if (!(a == b)) {
        throw UsageError("grid mismatch: n=" + std::to_string(a.n()) + " vs n=" +
                         std::to_string(b.n()));
    }
}

/// Multiplicity of a stored half-spectrum entry in the full logical spectrum.
inline double mode_weight(const GridSpec& g, int j3) noexcept {
    return (j3 == 0 || g.is_nyquist(j3)) ? 1.0 : 2.0;
}

/// Calls fn(index, k, weight) for every stored spectral entry.
template <class Fn>
void for_each_mode(const GridSpec& g, Fn&& fn) {
    const int n = g.n();
    const int nz = g.nz();
    std::size_t idx = 0;
    for (int j1 = 0; j1 < n; ++j1) {
        const int k1 = g.wavenumber(j1);
        for (int j2 = 0; j2 < n; ++j2) {
            const int k2 = g.wavenumber(j2);
            for (int j3 = 0; j3 < nz; ++j3, ++idx) {
                const int k3 = j3 == n / 2 ? -n / 2 : j3;
                fn(idx, Wavevector{k1, k2, k3}, mode_weight(g, j3));
            }
        }
    }
}

/// Real samples on the uniform n³ grid, x_i = 2π i/n, row-major (x₁, x₂, x₃).
class RealField {
public:
    explicit RealField(GridSpec grid) : grid_(grid), values_(grid.physical_size(), 0.0) {}

    RealField(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.physical_size()) {
            throw ConfigError("physical array has " + std::to_string(values_.size()) +
                              " samples, expected n³ = " + std::to_string(grid_.physical_size()));
        }
    }

    const GridSpec& grid() const noexcept { return grid_; }
    double& operator()(int i1, int i2, int i3) { return values_[grid_.physical_index(i1, i2, i3)]; }
    double operator()(int i1, int i2, int i3) const {
        return values_[grid_.physical_index(i1, i2, i3)];
    }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    /// Samples fn(x₁, x₂, x₃) at the grid points.
    template <class Fn>
    static RealField sample(GridSpec grid, Fn&& fn) {
        RealField out(grid);
        const double h = grid.spacing();
        for (int i1 = 0; i1 < grid.n(); ++i1)
            for (int i2 = 0; i2 < grid.n(); ++i2)
                for (int i3 = 0; i3 < grid.n(); ++i3) out(i1, i2, i3) = fn(i1 * h, i2 * h, i3 * h);
        return out;
    }

private:
    GridSpec grid_;
    std::vector<double> values_;
};

using RealVectorField = std::array<RealField, 3>;

class SpectralScalarField {
public:
    explicit SpectralScalarField(GridSpec grid) : grid_(grid), coeffs_(grid.spectral_size()) {}

    const GridSpec& grid() const noexcept { return grid_; }
    std::span<Complex> data() noexcept { return coeffs_; }
    std::span<const Complex> data() const noexcept { return coeffs_; }

    /// Full-spectrum lookup by signed wavevector, k_i ∈ [-n/2, n/2).
    Complex coeff(const Wavevector& k) const {
        check_range(k);
        const int n = grid_.n();
        int j1 = grid_.index_of(k[0]);
        int j2 = grid_.index_of(k[1]);
        const int j3 = grid_.index_of(k[2]);
        if (j3 <= n / 2) return coeffs_[grid_.spectral_index(j1, j2, j3)];
        j1 = (n - j1) % n;
        j2 = (n - j2) % n;
        return std::conj(coeffs_[grid_.spectral_index(j1, j2, n - j3)]);
    }

    /// Sets f̂(k) and, where both live in storage, f̂(-k) = conj(f̂(k)).
    void set_coeff(const Wavevector& k, Complex value) {
        check_range(k);
        const int n = grid_.n();
        const int j1 = grid_.index_of(k[0]);
        const int j2 = grid_.index_of(k[1]);
        const int j3 = grid_.index_of(k[2]);
        const int m1 = (n - j1) % n;
        const int m2 = (n - j2) % n;
        if (j3 == 0 || j3 == n / 2) {
            coeffs_[grid_.spectral_index(m1, m2, j3)] = std::conj(value);
            coeffs_[grid_.spectral_index(j1, j2, j3)] = value;
            if (m1 == j1 && m2 == j2) coeffs_[grid_.spectral_index(j1, j2, j3)] = value.real();
        } else if (j3 < n / 2) {
            coeffs_[grid_.spectral_index(j1, j2, j3)] = value;
        } else {
            coeffs_[grid_.spectral_index(m1, m2, n - j3)] = std::conj(value);
        }
    }

    SpectralScalarField& operator+=(const SpectralScalarField& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    SpectralScalarField& operator-=(const SpectralScalarField& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    SpectralScalarField& operator*=(double c) {
        for (auto& z : coeffs_) z *= c;
        return *this;
    }
    /// this += c·o
    SpectralScalarField& axpy(double c, const SpectralScalarField& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += c * o.coeffs_[i];
        return *this;
    }

    friend SpectralScalarField operator+(SpectralScalarField a, const SpectralScalarField& b) {
        return a += b;
    }
    friend SpectralScalarField operator-(SpectralScalarField a, const SpectralScalarField& b) {
        return a -= b;
    }
    friend SpectralScalarField operator*(double c, SpectralScalarField a) { return a *= c; }

    friend bool operator==(const SpectralScalarField&, const SpectralScalarField&) = default;

private:
    void check_range(const Wavevector& k) const {
        const int h = grid_.n() / 2;
        for (int c : k) {
            if (c < -h || c >= h) {
                throw UsageError("wavevector component " + std::to_string(c) +
                                 " outside [-n/2, n/2)");
            }
        }
    }

    GridSpec grid_;
    std::vector<Complex> coeffs_;
};

class SpectralVectorField {
public:
    explicit SpectralVectorField(GridSpec grid)
        : c_{SpectralScalarField(grid), SpectralScalarField(grid), SpectralScalarField(grid)} {}

    SpectralVectorField(SpectralScalarField x, SpectralScalarField y, SpectralScalarField z)
        : c_{std::move(x), std::move(y), std::move(z)} {
        require_same_grid(c_[0].grid(), c_[1].grid());
        require_same_grid(c_[0].grid(), c_[2].grid());
    }

    const GridSpec& grid() const noexcept { return c_[0].grid(); }
    SpectralScalarField& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
    const SpectralScalarField& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }

    SpectralVectorField& operator+=(const SpectralVectorField& o) {
        for (int i = 0; i < 3; ++i) (*this)[i] += o[i];
        return *this;
    }
    SpectralVectorField& operator-=(const SpectralVectorField& o) {
        for (int i = 0; i < 3; ++i) (*this)[i] -= o[i];
        return *this;
    }
    SpectralVectorField& operator*=(double c) {
        for (auto& f : c_) f *= c;
        return *this;
    }
    SpectralVectorField& axpy(double c, const SpectralVectorField& o) {
        for (int i = 0; i < 3; ++i) (*this)[i].axpy(c, o[i]);
        return *this;
    }

    friend SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) {
        return a += b;
    }
    friend SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) {
        return a -= b;
    }
    friend SpectralVectorField operator*(double c, SpectralVectorField a) { return a *= c; }

    friend bool operator==(const SpectralVectorField&, const SpectralVectorField&) = default;

private:
    std::array<SpectralScalarField, 3> c_;
};

// ---------------------------------------------------------------------------
// Transforms

namespace detail {

struct FftPlans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    FftPlans() = default;
    FftPlans(const FftPlans&) = delete;
    FftPlans& operator=(const FftPlans&) = delete;
    ~FftPlans() {
        if (r2c) fftw_destroy_plan(r2c);
        if (c2r) fftw_destroy_plan(c2r);
    }
};

// FFTW's planner is not thread-safe; execution of an existing plan is.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// Plans are built once per n with FFTW_ESTIMATE | FFTW_UNALIGNED so the same
// codelets run for any buffer, which keeps transforms bit-reproducible.
inline const FftPlans& plans_for(const GridSpec& g) {
    static std::map<int, std::unique_ptr<FftPlans>> cache;
    std::lock_guard lock(planner_mutex());
    auto& slot = cache[g.n()];
    if (!slot) {
        auto plans = std::make_unique<FftPlans>();
        const int n = g.n();
        double* real = fftw_alloc_real(g.physical_size());
        fftw_complex* spec = fftw_alloc_complex(g.spectral_size());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        plans->r2c = fftw_plan_dft_r2c_3d(n, n, n, real, spec, flags);
        plans->c2r = fftw_plan_dft_c2r_3d(n, n, n, spec, real, flags | FFTW_DESTROY_INPUT);
        fftw_free(real);
        fftw_free(spec);
        if (!plans->r2c || !plans->c2r) throw std::runtime_error("FFTW planning failed");
        slot = std::move(plans);
    }
    return *slot;
}

}  // namespace detail

inline SpectralScalarField forward_transform(const RealField& f) {
    const GridSpec& g = f.grid();
    SpectralScalarField out(g);
    std::vector<double> in(f.values().begin(), f.values().end());
    fftw_execute_dft_r2c(detail::plans_for(g).r2c, in.data(),
                         reinterpret_cast<fftw_complex*>(out.data().data()));
    out *= 1.0 / static_cast<double>(g.physical_size());
    return out;
}

inline RealField inverse_transform(const SpectralScalarField& f) {
    const GridSpec& g = f.grid();
    RealField out(g);
    std::vector<Complex> scratch(f.data().begin(), f.data().end());
    fftw_execute_dft_c2r(detail::plans_for(g).c2r, reinterpret_cast<fftw_complex*>(scratch.data()),
                         out.values().data());
    return out;
}

inline SpectralVectorField forward_transform(const RealVectorField& f, const GridSpec& grid) {
    for (const auto& c : f) {
        if (c.grid().n() != grid.n()) {
            throw ConfigError("physical array dimension " + std::to_string(c.grid().n()) +
                              " does not match grid n=" + std::to_string(grid.n()));
        }
    }
    return {forward_transform(f[0]), forward_transform(f[1]), forward_transform(f[2])};
}

inline RealVectorField inverse_transform(const SpectralVectorField& f) {
    return {inverse_transform(f[0]), inverse_transform(f[1]), inverse_transform(f[2])};
}

// ---------------------------------------------------------------------------
// Differential operators (exact spectral multipliers)

namespace detail {

// Applies out[idx] = m(k, in[idx]) over all stored modes of a scalar field.
template <class Mult>
SpectralScalarField map_modes(const SpectralScalarField& in, Mult&& m) {
    SpectralScalarField out(in.grid());
    auto src = in.data();
    auto dst = out.data();
    for_each_mode(in.grid(), [&](std::size_t i, const Wavevector& k, double) { dst[i] = m(k, src[i]); });
    return out;
}

// Odd-order derivatives cannot act on the unpaired Nyquist modes of a real field.
inline bool odd_safe(const GridSpec& g, const Wavevector& k) {
    const int h = g.n() / 2;
    return k[0] != -h && k[1] != -h && k[2] != -h;
}

}  // namespace detail

inline constexpr Complex kI{0.0, 1.0};

inline SpectralVectorField grad(const SpectralScalarField& f) {
    const GridSpec& g = f.grid();
    SpectralVectorField out(g);
    auto src = f.data();
    std::array<std::span<Complex>, 3> dst{out[0].data(), out[1].data(), out[2].data()};
    for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
        if (!detail::odd_safe(g, k)) return;
        for (int c = 0; c < 3; ++c) dst[c][i] = kI * static_cast<double>(k[c]) * src[i];
    });
    return out;
}

inline SpectralScalarField div(const SpectralVectorField& v) {
    const GridSpec& g = v.grid();
    SpectralScalarField out(g);
    auto dst = out.data();
    for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
        if (!detail::odd_safe(g, k)) return;
        dst[i] = kI * (static_cast<double>(k[0]) * v[0].data()[i] +
                       static_cast<double>(k[1]) * v[1].data()[i] +
                       static_cast<double>(k[2]) * v[2].data()[i]);
    });
    return out;
}

inline SpectralVectorField curl(const SpectralVectorField& v) {
    const GridSpec& g = v.grid();
    SpectralVectorField out(g);
    for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
        if (!detail::odd_safe(g, k)) return;
        const double k1 = k[0], k2 = k[1], k3 = k[2];
        const Complex a = v[0].data()[i], b = v[1].data()[i], c = v[2].data()[i];
        out[0].data()[i] = kI * (k2 * c - k3 * b);
        out[1].data()[i] = kI * (k3 * a - k1 * c);
        out[2].data()[i] = kI * (k1 * b - k2 * a);
    });
    return out;
}

inline SpectralScalarField laplacian(const SpectralScalarField& f) {
    return detail::map_modes(f, [](const Wavevector& k, Complex z) {
        return -static_cast<double>(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) * z;
    });
}

inline SpectralVectorField laplacian(const SpectralVectorField& v) {
    return {laplacian(v[0]), laplacian(v[1]), laplacian(v[2])};
}

/// ∇(∇·v): -k (k·v̂).
inline SpectralVectorField grad_div(const SpectralVectorField& v) {
    const GridSpec& g = v.grid();
    SpectralVectorField out(g);
    for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
        const Complex kv = static_cast<double>(k[0]) * v[0].data()[i] +
                           static_cast<double>(k[1]) * v[1].data()[i] +
                           static_cast<double>(k[2]) * v[2].data()[i];
        for (int c = 0; c < 3; ++c) out[c].data()[i] = -static_cast<double>(k[c]) * kv;
    });
    return out;
}

/// (α·∇)f: i(α·k) f̂.
inline SpectralScalarField alpha_dot_grad(const SpectralScalarField& f, const Vec3& alpha) {
    const GridSpec& g = f.grid();
    return detail::map_modes(f, [&](const Wavevector& k, Complex z) {
        if (!detail::odd_safe(g, k)) return Complex{};
        return kI * (alpha[0] * k[0] + alpha[1] * k[1] + alpha[2] * k[2]) * z;
    });
}

inline SpectralVectorField alpha_dot_grad(const SpectralVectorField& v, const Vec3& alpha) {
    return {alpha_dot_grad(v[0], alpha), alpha_dot_grad(v[1], alpha), alpha_dot_grad(v[2], alpha)};
}

enum class DiffOp { grad, div, curl, laplacian, grad_div, alpha_dot_grad };

using AnyField = std::variant<SpectralScalarField, SpectralVectorField>;

/// Runtime-dispatched operator application; rank mismatches throw UsageError.
inline AnyField apply_diff_op(const AnyField& f, DiffOp op, const Vec3& alpha = {0.0, 0.0, 0.0}) {
    const auto* s = std::get_if<SpectralScalarField>(&f);
    const auto* v = std::get_if<SpectralVectorField>(&f);
    switch (op) {
        case DiffOp::grad:
            if (s) return grad(*s);
            throw UsageError("grad requires a scalar field");
        case DiffOp::div:
            if (v) return div(*v);
            throw UsageError("div requires a vector field");
        case DiffOp::curl:
            if (v) return curl(*v);
            throw UsageError("curl requires a vector field");
        case DiffOp::grad_div:
            if (v) return grad_div(*v);
            throw UsageError("grad_div requires a vector field");
        case DiffOp::laplacian:
            return s ? AnyField(laplacian(*s)) : AnyField(laplacian(*v));
        case DiffOp::alpha_dot_grad:
            return s ? AnyField(alpha_dot_grad(*s, alpha)) : AnyField(alpha_dot_grad(*v, alpha));
    }
    throw UsageError("unknown differential operator");
}

// ---------------------------------------------------------------------------
// Projections

/// v̂ ← v̂ - k(k·v̂)/|k|² for k ≠ 0; the k = 0 mode is zeroed.
inline SpectralVectorField leray_project(SpectralVectorField v) {
    const GridSpec& g = v.grid();
    for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
        const double k1 = k[0], k2 = k[1], k3 = k[2];
        const double kk = k1 * k1 + k2 * k2 + k3 * k3;
        if (kk == 0.0) {
            for (int c = 0; c < 3; ++c) v[c].data()[i] = 0.0;
            return;
        }
        const Complex kv = (k1 * v[0].data()[i] + k2 * v[1].data()[i] + k3 * v[2].data()[i]) / kk;
        v[0].data()[i] -= k1 * kv;
        v[1].data()[i] -= k2 * kv;
        v[2].data()[i] -= k3 * kv;
    });
    return v;
}

inline bool in_dealias_band(const GridSpec& g, const Wavevector& k) noexcept {
    const int m = g.kmax_dealias();
    return std::abs(k[0]) <= m && std::abs(k[1]) <= m && std::abs(k[2]) <= m;
}

/// Zeroes every mode with some |k_i| > floor(n/3).
inline SpectralScalarField dealias(SpectralScalarField f) {
    const GridSpec& g = f.grid();
    auto d = f.data();
    for_each_mode(g, [&](std::size_t i, const Wavevector& k, double) {
        if (!in_dealias_band(g, k)) d[i] = 0.0;
    });
    return f;
}

inline SpectralVectorField dealias(SpectralVectorField v) {
    for (int c = 0; c < 3; ++c) v[c] = dealias(std::move(v[c]));
    return v;
}

inline void zero_mean(SpectralScalarField& f) { f.data()[0] = 0.0; }
inline void zero_mean(SpectralVectorField& v) {
    for (int c = 0; c < 3; ++c) zero_mean(v[c]);
}

}  // namespace mmp
