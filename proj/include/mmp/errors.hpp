#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mmp {

/// Rejected configuration or parameter set (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    struct Issue {
        int line = 0;  // 0 when not tied to an input line
        std::string message;
    };

    explicit ConfigError(std::string message)
        : std::runtime_error(message), issues_{{0, std::move(message)}} {}

    explicit ConfigError(std::vector<Issue> issues)
        : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

    const std::vector<Issue>& issues() const noexcept { return issues_; }

private:
    static std::string join(const std::vector<Issue>& issues) {
        std::string out;
        for (const auto& is : issues) {
            if (!out.empty()) out += '\n';
            if (is.line > 0) out += "line " + std::to_string(is.line) + ": ";
            out += is.message;
        }
        return out;
    }

    std::vector<Issue> issues_;
};

/// Caller violated an API contract (wrong rank, mismatched grids, bad variant).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Non-finite data or blow-up during time stepping (CLI exit code 2).
class IntegrityError : public std::runtime_error {
public:
    explicit IntegrityError(std::string message, std::optional<std::uint64_t> step = std::nullopt)
        : std::runtime_error(step ? message + " (step " + std::to_string(*step) + ")" : message),
          step_(step) {}

    std::optional<std::uint64_t> step() const noexcept { return step_; }

private:
    std::optional<std::uint64_t> step_;
};

/// File system failures, always carrying the offending path (CLI exit code 3).
class IoError : public std::runtime_error {
public:
    IoError(const std::string& path, const std::string& what)
        : std::runtime_error(path + ": " + what), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

inline void warn(std::string_view message) { std::clog << "warning: " << message << '\n'; }

}  // namespace mmp
