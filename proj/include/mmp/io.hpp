#pragma once

// Diagnostics CSV and binary checkpoints.
//
// CSV header (exact):
//   t,l2_energy,h3,hN,hr5,F_func,E_func,D_func,alpha_grad_B_hr3,div_u_max,div_b_max,cancel_max
// Values are written in shortest round-trip form; absent values are empty.
//
// Checkpoint layout, all little-endian:
//   "MMP1"  u32 version  u32 n  u32 variant
//   f64 mu chi kappa eta nu  f64 alpha[3]  f64 r  f64 t  u64 step  u64 seed
//   9 arrays (u₁ u₂ u₃ ω₁ ω₂ ω₃ m₁ m₂ m₃), each n³ pairs of f64 (re, im), full
//   spectrum row-major over (k₁, k₂, k₃), k_i ordered 0, 1, …, n/2-1, -n/2, …, -1.

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mmp/config.hpp"
#include "mmp/diagnostics.hpp"
#include "mmp/errors.hpp"
#include "mmp/fields.hpp"

namespace mmp {

inline constexpr std::string_view kDiagnosticsHeader =
    "t,l2_energy,h3,hN,hr5,F_func,E_func,D_func,alpha_grad_B_hr3,div_u_max,div_b_max,cancel_max";

inline std::string format_real(double v) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return std::string(buf.data(), ptr);
}

inline std::string format_row(const DiagnosticsRecord& r) {
    auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
    const std::array<std::string, 12> fields{
        format_real(r.t),  format_real(r.l2_energy), format_real(r.h3),    opt(r.hN),
        opt(r.hr5),        opt(r.F_func),            opt(r.E_func),        opt(r.D_func),
        opt(r.alpha_grad_B_hr3), format_real(r.div_u_max), format_real(r.div_b_max), opt(r.cancel_max)};
    std::string row = fields[0];
    for (std::size_t i = 1; i < fields.size(); ++i) row += ',' + fields[i];
    return row;
}

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    while (true) {
        const auto c = line.find(',');
        out.push_back(line.substr(0, c));
        if (c == std::string_view::npos) break;
        line.remove_prefix(c + 1);
    }
    return out;
}

inline std::optional<double> parse_field(std::string_view s, const std::string& path, int line) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw IoError(path, "line " + std::to_string(line) + ": malformed number '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace detail

inline DiagnosticsRecord parse_row(std::string_view line, const std::string& path = "<row>", int line_no = 0) {
    const auto f = detail::split_commas(line);
    if (f.size() != 12) {
        throw IoError(path, "line " + std::to_string(line_no) + ": expected 12 fields, got " + std::to_string(f.size()));
    }
    auto req = [&](int i) {
        auto v = detail::parse_field(f[static_cast<std::size_t>(i)], path, line_no);
        if (!v) throw IoError(path, "line " + std::to_string(line_no) + ": missing required field " + std::to_string(i));
        return *v;
    };
    auto opt = [&](int i) { return detail::parse_field(f[static_cast<std::size_t>(i)], path, line_no); };
    DiagnosticsRecord r;
    r.t = req(0);
    r.l2_energy = req(1);
    r.h3 = req(2);
    r.hN = opt(3);
    r.hr5 = opt(4);
    r.F_func = opt(5);
    r.E_func = opt(6);
    r.D_func = opt(7);
    r.alpha_grad_B_hr3 = opt(8);
    r.div_u_max = req(9);
    r.div_b_max = req(10);
    r.cancel_max = opt(11);
    return r;
}

/// Streams records to a CSV file, flushing after every row.
class DiagnosticsWriter {
public:
    /// append = true keeps an existing file (with its header) and adds rows.
    explicit DiagnosticsWriter(std::string path, bool append = false) : path_(std::move(path)) {
        const bool existing = append && std::filesystem::exists(path_) && std::filesystem::file_size(path_) > 0;
        out_.open(path_, append ? std::ios::app : std::ios::trunc);
        if (!out_) throw IoError(path_, "cannot open diagnostics file for writing");
        if (!existing) write_line(kDiagnosticsHeader);
    }

    void write(const DiagnosticsRecord& r) { write_line(format_row(r)); }

    const std::string& path() const noexcept { return path_; }

private:
    void write_line(std::string_view line) {
        out_ << line << '\n';
        out_.flush();
        if (!out_) throw IoError(path_, "write failed");
    }

    std::string path_;
    std::ofstream out_;
};

inline void write_diagnostics(const std::vector<DiagnosticsRecord>& records, const std::string& path) {
    DiagnosticsWriter w(path);
    for (const auto& r : records) w.write(r);
}

inline std::vector<DiagnosticsRecord> read_diagnostics(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open diagnostics file");
    std::string line;
    if (!std::getline(in, line)) throw IoError(path, "empty file, missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kDiagnosticsHeader) throw IoError(path, "unexpected header '" + line + "'");
    std::vector<DiagnosticsRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        out.push_back(parse_row(line, path, line_no));
    }
    return out;
}

/// (t, value) pairs of one named column from any CSV whose first column is t;
/// rows with an empty value are skipped.
inline std::pair<std::vector<double>, std::vector<double>> read_csv_column(const std::string& path,
                                                                           std::string_view column) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open CSV file");
    std::string line;
    if (!std::getline(in, line)) throw IoError(path, "empty file, missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto names = detail::split_commas(line);
    std::size_t col = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == column) col = i;
    if (col == names.size()) throw ConfigError("column '" + std::string(column) + "' not found in " + path);

    std::vector<double> t, y;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = detail::split_commas(line);
        if (f.size() != names.size()) throw IoError(path, "line " + std::to_string(line_no) + ": wrong field count");
        const auto tv = detail::parse_field(f[0], path, line_no);
        const auto yv = detail::parse_field(f[col], path, line_no);
        if (!tv || !yv) continue;
        t.push_back(*tv);
        y.push_back(*yv);
    }
    return {std::move(t), std::move(y)};
}

// ---------------------------------------------------------------------------
// Checkpoints

struct Checkpoint {
    State state;
    PhysParams params;
    SystemVariant variant = SystemVariant::ZeroKinematic;
    std::uint64_t step = 0;
    std::uint64_t seed = 0;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;
inline constexpr std::size_t kCheckpointHeaderBytes = 4 + 4 + 4 + 4 + 8 * 10 + 8 + 8;

namespace detail {

class ByteWriter {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void raw(std::string_view s) { buf_.append(s); }
    const std::string& bytes() const noexcept { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    ByteReader(std::string_view data, std::string path) : data_(data), path_(std::move(path)) {}
    std::uint32_t u32() { return static_cast<std::uint32_t>(take(4)); }
    std::uint64_t u64() { return take(8); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string_view raw(std::size_t n) {
        need(n);
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
    void need(std::size_t n) const {
        if (pos_ + n > data_.size()) throw IoError(path_, "checkpoint truncated");
    }
    std::uint64_t take(int n) {
        need(static_cast<std::size_t>(n));
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(i)]))
                 << (8 * i);
        pos_ += static_cast<std::size_t>(n);
        return v;
    }

    std::string_view data_;
    std::string path_;
    std::size_t pos_ = 0;
};

// Signed wavenumbers in checkpoint order: 0, 1, …, n/2-1, -n/2, …, -1.
inline std::vector<int> checkpoint_axis(int n) {
    std::vector<int> ks(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) ks[static_cast<std::size_t>(j)] = j < n / 2 ? j : j - n;
    return ks;
}

}  // namespace detail

inline std::string encode_checkpoint(const Checkpoint& c) {
    const GridSpec& g = c.state.grid();
    detail::ByteWriter w;
    w.raw("MMP1");
    w.u32(kCheckpointVersion);
    w.u32(static_cast<std::uint32_t>(g.n()));
    w.u32(static_cast<std::uint32_t>(c.variant));
    for (double x : {c.params.mu, c.params.chi, c.params.kappa, c.params.eta, c.params.nu, c.params.alpha[0],
                     c.params.alpha[1], c.params.alpha[2], c.params.r, c.state.t})
        w.f64(x);
    w.u64(c.step);
    w.u64(c.seed);

    const auto axis = detail::checkpoint_axis(g.n());
    for (const SpectralVectorField* f : {&c.state.u, &c.state.omega, &c.state.magnetic}) {
        for (int comp = 0; comp < 3; ++comp) {
            const SpectralScalarField& s = (*f)[comp];
            for (int k1 : axis)
                for (int k2 : axis)
                    for (int k3 : axis) {
                        const Complex z = s.coeff({k1, k2, k3});
                        w.f64(z.real());
                        w.f64(z.imag());
                    }
        }
    }
    return w.bytes();
}

inline Checkpoint decode_checkpoint(std::string_view bytes, const std::string& path = "<checkpoint>") {
    detail::ByteReader r(bytes, path);
    if (r.raw(4) != "MMP1") throw IoError(path, "bad checkpoint magic");
    const std::uint32_t version = r.u32();
    if (version != kCheckpointVersion) throw IoError(path, "unsupported checkpoint version " + std::to_string(version));
    const std::uint32_t n = r.u32();
    const auto variant = variant_from_id(r.u32());
    if (!variant) throw IoError(path, "unknown variant id in checkpoint");
    if (n < 8 || n > 4096 || (n & (n - 1)) != 0) throw IoError(path, "invalid grid size in checkpoint");

    PhysParams p;
    p.mu = r.f64();
    p.chi = r.f64();
    p.kappa = r.f64();
    p.eta = r.f64();
    p.nu = r.f64();
    p.alpha = {r.f64(), r.f64(), r.f64()};
    p.r = r.f64();
    const double t = r.f64();
    const std::uint64_t step = r.u64();
    const std::uint64_t seed = r.u64();

    const std::size_t n3 = static_cast<std::size_t>(n) * n * n;
    if (r.remaining() != 9 * n3 * 16) {
        throw IoError(path, "checkpoint payload has " + std::to_string(r.remaining()) + " bytes, header implies " +
                                std::to_string(9 * n3 * 16));
    }

    const GridSpec g(static_cast<int>(n));
    State s(g);
    s.t = t;
    const int ni = static_cast<int>(n);
    for (SpectralVectorField* f : {&s.u, &s.omega, &s.magnetic}) {
        for (int comp = 0; comp < 3; ++comp) {
            auto d = (*f)[comp].data();
            for (int j1 = 0; j1 < ni; ++j1)
                for (int j2 = 0; j2 < ni; ++j2)
                    for (int j3 = 0; j3 < ni; ++j3) {
                        const double re = r.f64();
                        const double im = r.f64();
                        // Stored half spectrum: j3 in [0, n/2]; the rest is implied by symmetry.
                        if (j3 <= ni / 2) d[g.spectral_index(j1, j2, j3)] = Complex(re, im);
                    }
        }
    }
    return {std::move(s), p, *variant, step, seed};
}

inline void save_checkpoint(const Checkpoint& c, const std::string& path) {
    const std::string bytes = encode_checkpoint(c);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError(tmp, "cannot open checkpoint for writing");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError(tmp, "checkpoint write failed");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError(path, "cannot move checkpoint into place: " + ec.message());
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError(path, "cannot open checkpoint");
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_checkpoint(ss.str(), path);
}

}  // namespace mmp
