#pragma once

// Line-oriented run configuration:
//
//   # comment
//   grid.n = 32
//   system = zero-kinematic
//   params.chi = 1
//   alpha = 0.3, 0.4, 0.5
//   time.t_end = 20
//
// Keys and defaults:
//   grid.n                 32
//   system                 (required) full | zero-kinematic | zero-kinematic-zero-diffusion |
//                          perturbation | inviscid-resistive-mhd | ideal-mhd
//   params.{mu,chi,kappa,eta,nu}   0
//   alpha                  0,0,0; perturbation runs default to 0.9√χ (1,√2,√3)/|(1,√2,√3)|
//   diophantine.r          2.5
//   init.epsilon           0.01
//   init.sobolev_index     3, or ceil(4r+11) for perturbation runs
//   init.spectrum_slope    2
//   init.k_peak            n/6
//   init.seed              42
//   time.dt                0.01
//   time.cfl               0.5
//   time.t_end             (required)
//   time.max_steps         10000000
//   time.record_interval   0.1
//   output.dir             .
//   output.norms           (empty) extra Sobolev indices written to sobolev.csv
//   output.checkpoint_interval   0 (off)
//   validate               strict | permissive (strict)
//   deterministic          true

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mmp/errors.hpp"
#include "mmp/fields.hpp"
#include "mmp/integrator.hpp"
#include "mmp/spectral.hpp"

namespace mmp {

struct OutputConfig {
    std::string dir = ".";
    std::vector<double> norms;
    double checkpoint_interval = 0.0;
};

struct RunConfig {
    int n = 32;
    SystemVariant system = SystemVariant::ZeroKinematic;
    PhysParams params;
    InitSpec init;
    StepperConfig time;
    OutputConfig output;
    bool strict = true;
    bool deterministic = true;
    std::vector<std::string> warnings;

    GridSpec grid() const { return GridSpec(n); }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::optional<double> parse_real(std::string_view s) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

template <class Int>
std::optional<Int> parse_integer(std::string_view s) {
    s = trim(s);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

inline std::optional<bool> parse_bool(std::string_view s) {
    s = trim(s);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    return std::nullopt;
}

inline std::optional<std::vector<double>> parse_real_list(std::string_view s) {
    s = trim(s);
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')') s = s.substr(1, s.size() - 2);
    std::vector<double> out;
    if (trim(s).empty()) return out;
    while (true) {
        const auto comma = s.find(',');
        auto v = parse_real(s.substr(0, comma));
        if (!v) return std::nullopt;
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

}  // namespace detail

/// Parses and validates a configuration. Every problem found is collected
/// into one ConfigError carrying line numbers.
inline RunConfig parse_config(std::string_view text) {
    RunConfig cfg;
    std::vector<ConfigError::Issue> issues;
    std::map<std::string, int> seen;  // key -> line

    std::optional<Vec3> alpha;
    std::optional<double> sobolev_index;
    std::optional<std::string> validate_mode;

    using Setter = std::function<bool(std::string_view)>;
    auto real = [](double& dst) {
        return Setter([&dst](std::string_view v) {
            auto x = detail::parse_real(v);
            if (x) dst = *x;
            return x.has_value();
        });
    };
    auto real_opt = [](std::optional<double>& dst) {
        return Setter([&dst](std::string_view v) {
            auto x = detail::parse_real(v);
            if (x) dst = *x;
            return x.has_value();
        });
    };
    const std::map<std::string, Setter, std::less<>> setters{
        {"grid.n",
         [&](std::string_view v) {
             auto x = detail::parse_integer<int>(v);
             if (x) cfg.n = *x;
             return x.has_value();
         }},
        {"system",
         [&](std::string_view v) {
             auto x = variant_from_string(detail::trim(v));
             if (x) cfg.system = *x;
             return x.has_value();
         }},
        {"params.mu", real(cfg.params.mu)},
        {"params.chi", real(cfg.params.chi)},
        {"params.kappa", real(cfg.params.kappa)},
        {"params.eta", real(cfg.params.eta)},
        {"params.nu", real(cfg.params.nu)},
        {"alpha",
         [&](std::string_view v) {
             auto x = detail::parse_real_list(v);
             if (!x || x->size() != 3) return false;
             alpha = Vec3{(*x)[0], (*x)[1], (*x)[2]};
             return true;
         }},
        {"diophantine.r", real(cfg.params.r)},
        {"init.epsilon", real(cfg.init.epsilon)},
        {"init.sobolev_index", real_opt(sobolev_index)},
        {"init.spectrum_slope", real(cfg.init.spectrum_slope)},
        {"init.k_peak", real_opt(cfg.init.k_peak)},
        {"init.seed",
         [&](std::string_view v) {
             auto x = detail::parse_integer<std::uint64_t>(v);
             if (x) cfg.init.seed = *x;
             return x.has_value();
         }},
        {"time.dt", real(cfg.time.dt)},
        {"time.cfl", real(cfg.time.cfl)},
        {"time.t_end", real(cfg.time.t_end)},
        {"time.max_steps",
         [&](std::string_view v) {
             auto x = detail::parse_integer<std::uint64_t>(v);
             if (x) cfg.time.max_steps = *x;
             return x.has_value();
         }},
        {"time.record_interval", real(cfg.time.record_interval)},
        {"output.dir",
         [&](std::string_view v) {
             cfg.output.dir = std::string(detail::trim(v));
             return !cfg.output.dir.empty();
         }},
        {"output.norms",
         [&](std::string_view v) {
             auto x = detail::parse_real_list(v);
             if (x) cfg.output.norms = *x;
             return x.has_value();
         }},
        {"output.checkpoint_interval", real(cfg.output.checkpoint_interval)},
        {"validate",
         [&](std::string_view v) {
             const auto s = detail::trim(v);
             if (s != "strict" && s != "permissive") return false;
             validate_mode = std::string(s);
             return true;
         }},
        {"deterministic",
         [&](std::string_view v) {
             auto x = detail::parse_bool(v);
             if (x) cfg.deterministic = *x;
             return x.has_value();
         }},
    };

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            issues.push_back({line_no, "expected 'key = value', got '" + std::string(line) + "'"});
            continue;
        }
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string_view value = detail::trim(line.substr(eq + 1));

        const auto it = setters.find(key);
        if (it == setters.end()) {
            issues.push_back({line_no, "unknown key '" + key + "'"});
            continue;
        }
        if (const auto prev = seen.find(key); prev != seen.end()) {
            issues.push_back({line_no, "duplicate key '" + key + "' (lines " + std::to_string(prev->second) +
                                           " and " + std::to_string(line_no) + ")"});
            continue;
        }
        seen.emplace(key, line_no);
        if (!it->second(value)) {
            issues.push_back({line_no, "invalid value '" + std::string(value) + "' for key '" + key + "'"});
        }
    }

    auto line_of = [&](const std::string& key) {
        const auto it = seen.find(key);
        return it == seen.end() ? 0 : it->second;
    };
    for (const char* req : {"system", "time.t_end"}) {
        if (!seen.count(req)) issues.push_back({0, std::string("missing required key '") + req + "'"});
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));

    // Defaults that depend on other keys.
    cfg.strict = !validate_mode || *validate_mode == "strict";
    if (alpha) {
        cfg.params.alpha = *alpha;
    } else if (has_background(cfg.system)) {
        cfg.params.alpha = default_background(cfg.params.chi);
    }
    cfg.init.sobolev_index = sobolev_index.value_or(
        has_background(cfg.system) ? std::ceil(4.0 * cfg.params.r + 11.0) : 3.0);

    // Module invariants.
    try {
        (void)cfg.grid();
    } catch (const ConfigError& e) {
        issues.push_back({line_of("grid.n"), e.what()});
    }
    const ValidationReport rep = validate_params(cfg.params, cfg.system, cfg.strict);
    for (const auto& e : rep.errors) issues.push_back({line_of("system"), e});
    cfg.warnings = rep.warnings;

    if (!(cfg.init.epsilon >= 0.0) || !std::isfinite(cfg.init.epsilon))
        issues.push_back({line_of("init.epsilon"), "init.epsilon must be finite and >= 0"});
    if (!(cfg.init.spectrum_slope >= 0.0))
        issues.push_back({line_of("init.spectrum_slope"), "init.spectrum_slope must be >= 0"});
    if (!(cfg.init.sobolev_index >= -10.0 && cfg.init.sobolev_index <= 40.0))
        issues.push_back({line_of("init.sobolev_index"), "init.sobolev_index must lie in [-10, 40]"});
    if (cfg.n >= 8) {
        const double kp = cfg.init.k_peak.value_or(cfg.n / 6.0);
        if (!(kp > 0.0) || kp > cfg.n / 3)
            issues.push_back({line_of("init.k_peak"), "init.k_peak must lie in (0, floor(n/3)]"});
    }
    try {
        cfg.time.validate();
    } catch (const ConfigError& e) {
        issues.push_back({0, e.what()});
    }
    if (!(cfg.output.checkpoint_interval >= 0.0))
        issues.push_back({line_of("output.checkpoint_interval"), "output.checkpoint_interval must be >= 0"});
    for (double s : cfg.output.norms) {
        if (!(s >= -10.0 && s <= 40.0))
            issues.push_back({line_of("output.norms"), "output.norms entries must lie in [-10, 40]"});
    }
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open configuration");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace mmp
