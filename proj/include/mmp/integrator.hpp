#pragma once

// Integrating-factor (Lawson) RK4: the diagonal stiff symbols are propagated
// exactly, the explicit part goes through classical fourth-order stages.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "mmp/dynamics.hpp"
#include "mmp/fields.hpp"

namespace mmp {

struct StepperConfig {
    double dt = 0.01;
    double cfl = 0.5;
    double t_end = 1.0;
    std::uint64_t max_steps = 10'000'000;
    double record_interval = 0.1;

    void validate() const {
        if (!(dt > 0.0)) throw ConfigError("time.dt must be > 0");
        if (!(cfl > 0.0 && cfl <= 1.0)) throw ConfigError("time.cfl must lie in (0, 1]");
        if (!(t_end >= 0.0)) throw ConfigError("time.t_end must be >= 0");
        if (!(record_interval > 0.0)) throw ConfigError("time.record_interval must be > 0");
    }
};

inline double max_abs_physical(const SpectralVectorField& v) {
    double m = 0.0;
    for (int c = 0; c < 3; ++c) {
        const RealField f = inverse_transform(v[c]);
        for (double x : f.values()) m = std::max(m, std::abs(x));
    }
    return m;
}

/// min(dt, cfl·h/max|u|, cfl/(6χ+1), cfl·h/|α|) with h = 2π/n, floored at dt·10⁻⁶.
inline double stable_dt(const State& s, const PhysParams& p, SystemVariant v, const StepperConfig& cfg) {
    if (!all_finite(s.u) || !all_finite(s.omega) || !all_finite(s.magnetic)) {
        throw IntegrityError("non-finite value in state at t=" + std::to_string(s.t));
    }
    const PhysParams e = effective_params(p, v);
    const double h = s.grid().spacing();
    double dt = cfg.dt;
    const double umax = max_abs_physical(s.u);
    if (umax > 0.0) dt = std::min(dt, cfg.cfl * h / umax);
    dt = std::min(dt, cfg.cfl / (2.0 * e.chi * 3.0 + 1.0));
    const double amag = norm(e.alpha);
    if (amag > 0.0) dt = std::min(dt, cfg.cfl * h / amag);

    const double floor_dt = cfg.dt * 1e-6;
    if (dt < floor_dt) {
        warn("stable time step " + std::to_string(dt) + " floored at " + std::to_string(floor_dt));
        dt = floor_dt;
    }
    return dt;
}

namespace detail {

// out = a + c·b, field by field.
inline State axpy(const State& a, double c, const State& b) {
    State out = a;
    out.u.axpy(c, b.u);
    out.omega.axpy(c, b.omega);
    out.magnetic.axpy(c, b.magnetic);
    return out;
}

}  // namespace detail

/// One Lawson-RK4 step of size dt. `step_index` only labels integrity errors.
inline State step(const State& s, const PhysParams& p, SystemVariant v, double dt,
                  std::uint64_t step_index = 0, RhsOptions opt = {}) {
    const StiffOperator L(p, v);
    auto N = [&](const State& x) { return explicit_rhs(x, p, v, opt); };
    auto half = [&](const State& x) { return L.propagate(x, 0.5 * dt); };
    auto full = [&](const State& x) { return L.propagate(x, dt); };

    const State k1 = N(s);
    const State k2 = N(half(detail::axpy(s, 0.5 * dt, k1)));
    const State k3 = N(detail::axpy(half(s), 0.5 * dt, k2));
    const State k4 = N(detail::axpy(full(s), dt, half(k3)));

    State mid = k2;
    mid.u += k3.u;
    mid.omega += k3.omega;
    mid.magnetic += k3.magnetic;

    State out = full(s);
    out = detail::axpy(out, dt / 6.0, full(k1));
    out = detail::axpy(out, dt / 3.0, half(mid));
    out = detail::axpy(out, dt / 6.0, k4);

    out.u = leray_project(std::move(out.u));
    out.magnetic = leray_project(std::move(out.magnetic));
    zero_mean(out.omega);
    out.t = s.t + dt;

    if (!all_finite(out.u) || !all_finite(out.omega) || !all_finite(out.magnetic)) {
        throw IntegrityError("non-finite value after time step at t=" + std::to_string(out.t), step_index);
    }
    return out;
}

enum class RunStatus { completed, step_cap, blow_up };

inline std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::completed: return "completed";
        case RunStatus::step_cap: return "step_cap";
        case RunStatus::blow_up: return "blow_up";
    }
    return "unknown";
}

struct RunSinks {
    /// Called with the state at every record time (and the initial/final states).
    std::function<void(const State&, std::uint64_t step)> on_record;
    /// Called after every step that crosses a multiple of checkpoint_interval.
    std::function<void(const State&, std::uint64_t step)> on_checkpoint;
    double checkpoint_interval = 0.0;  // 0 disables checkpoints
    bool record_initial = true;
    std::uint64_t start_step = 0;  // step counter of the initial state (resume)
    RhsOptions rhs{};
};

struct RunResult {
    State final_state;
    RunStatus status = RunStatus::completed;
    std::uint64_t steps = 0;
    std::optional<std::uint64_t> failed_step;
    std::string message;
};

namespace detail {

// Multiples of `interval` crossed going from a to b. A pure function of the
// two times, so a resumed run fires exactly where the uninterrupted one did.
inline bool crossed(double a, double b, double interval) {
    if (!(interval > 0.0)) return false;
    constexpr double slack = 1e-9;
    return std::floor(b / interval + slack) > std::floor(a / interval + slack);
}

}  // namespace detail

inline RunResult run(const State& initial, const PhysParams& p, SystemVariant v, const StepperConfig& cfg,
                     const RunSinks& sinks = {}) {
    cfg.validate();
    RunResult res{initial, RunStatus::completed, sinks.start_step, std::nullopt, {}};
    State& s = res.final_state;
    auto record = [&](const State& x) {
        if (sinks.on_record) sinks.on_record(x, res.steps);
    };
    if (sinks.record_initial) record(s);

    const double t_tol = 1e-12 * std::max(1.0, cfg.t_end);
    while (s.t < cfg.t_end - t_tol) {
        if (res.steps >= cfg.max_steps) {
            res.status = RunStatus::step_cap;
            res.message = "step cap " + std::to_string(cfg.max_steps) + " reached at t=" + std::to_string(s.t);
            return res;
        }
        try {
            double dt = stable_dt(s, p, v, cfg);
            const bool last = dt >= cfg.t_end - s.t - t_tol;
            if (last) dt = cfg.t_end - s.t;
            State next = step(s, p, v, dt, res.steps + 1, sinks.rhs);
            if (last) next.t = cfg.t_end;
            const double t_prev = s.t;
            s = std::move(next);
            ++res.steps;
            if (detail::crossed(t_prev, s.t, cfg.record_interval) || last) record(s);
            if (sinks.on_checkpoint && detail::crossed(t_prev, s.t, sinks.checkpoint_interval)) {
                sinks.on_checkpoint(s, res.steps);
            }
        } catch (const IntegrityError& e) {
            res.status = RunStatus::blow_up;
            res.failed_step = e.step().value_or(res.steps + 1);
            res.message = e.what();
            return res;
        }
    }
    return res;
}

}  // namespace mmp
