#pragma once

#include <nlohmann/json.hpp>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "pwf/common.hpp"
#include "pwf/field.hpp"
#include "pwf/spdc.hpp"

namespace pwf {

using json = nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "serialized arrays are little-endian; big-endian hosts are unsupported");

/// I/O failures carry their own type so the CLI can map them to the right
/// exit code.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

/// FNV-1a 64-bit checksum, hex-encoded. Used for manifest self-consistency.
inline std::string fnv1a64_hex(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 1469598103934665603ull;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string fnv1a64_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for checksum: " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                            std::istreambuf_iterator<char>());
    return fnv1a64_hex(bytes.data(), bytes.size());
}

namespace detail {

inline void write_bytes(const std::filesystem::path& path, const void* data,
                        std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!out) throw IoError("write failed: " + path.string());
}

inline std::vector<double> read_f64(const std::filesystem::path& path,
                                    std::size_t expected_count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path.string());
    std::vector<double> out(expected_count);
    in.read(reinterpret_cast<char*>(out.data()),
            static_cast<std::streamsize>(expected_count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != expected_count * sizeof(double))
        throw IoError("short read: " + path.string());
    return out;
}

inline json grid_manifest(const Grid3& g) {
    return json{{"n", {g.nx, g.ny, g.nz}}, {"L", {g.Lx, g.Ly, g.Lz}}};
}

inline Grid3 grid_from_manifest(const json& j) {
    return Grid3(j.at("n").at(0), j.at("n").at(1), j.at("n").at(2), j.at("L").at(0),
                 j.at("L").at(1), j.at("L").at(2));
}

inline void write_manifest(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path.string());
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed: " + path.string());
}

} // namespace detail

/// Serialized array convention: raw little-endian 64-bit floats, row-major
/// with z fastest, components slowest, complex entries interleaved (re, im).
/// Every .f64 file is accompanied by a JSON manifest naming dimensions,
/// units and quantity.

inline void write_field(const std::filesystem::path& stem, const RealVectorField& f,
                        const std::string& quantity, const std::string& units) {
    std::vector<double> buf;
    buf.reserve(3 * f.grid.size());
    for (int c = 0; c < 3; ++c)
        buf.insert(buf.end(), f.comp[c].begin(), f.comp[c].end());
    detail::write_bytes(stem.string() + ".f64", buf.data(), buf.size() * sizeof(double));
    json m = {{"quantity", quantity},
              {"units", units},
              {"dtype", "float64"},
              {"byte_order", "little-endian"},
              {"layout", "row-major z-fastest"},
              {"axes", {"component", "x", "y", "z"}},
              {"shape", {3, f.grid.nx, f.grid.ny, f.grid.nz}},
              {"grid", detail::grid_manifest(f.grid)}};
    detail::write_manifest(stem.string() + ".json", m);
}

inline RealVectorField read_real_vector_field(const std::filesystem::path& stem) {
    std::ifstream in(stem.string() + ".json");
    if (!in) throw IoError("cannot open manifest: " + stem.string() + ".json");
    json m = json::parse(in);
    Grid3 g = detail::grid_from_manifest(m.at("grid"));
    auto buf = detail::read_f64(stem.string() + ".f64", 3 * g.size());
    RealVectorField f(g);
    for (int c = 0; c < 3; ++c)
        std::copy(buf.begin() + c * g.size(), buf.begin() + (c + 1) * g.size(),
                  f.comp[c].begin());
    return f;
}

inline void write_field(const std::filesystem::path& stem, const ComplexVectorField& f,
                        const std::string& quantity, const std::string& units) {
    std::vector<double> buf;
    buf.reserve(6 * f.grid.size());
    for (int c = 0; c < 3; ++c)
        for (const complexd& v : f.comp[c]) {
            buf.push_back(v.real());
            buf.push_back(v.imag());
        }
    detail::write_bytes(stem.string() + ".f64", buf.data(), buf.size() * sizeof(double));
    json m = {{"quantity", quantity},
              {"units", units},
              {"dtype", "complex128"},
              {"byte_order", "little-endian"},
              {"layout", "row-major z-fastest, interleaved re/im"},
              {"axes", {"component", "x", "y", "z"}},
              {"shape", {3, f.grid.nx, f.grid.ny, f.grid.nz}},
              {"grid", detail::grid_manifest(f.grid)}};
    detail::write_manifest(stem.string() + ".json", m);
}

inline void write_field_pair(const std::filesystem::path& dir, const std::string& tag,
                             const RealFieldPair& f) {
    write_field(dir / (tag + "_E"), f.E, "electric field", "internal");
    write_field(dir / (tag + "_B"), f.B, "magnetic field", "internal");
}

/// Two-photon amplitude grid: dense complex matrix plus an axes manifest.
inline void write_jsa(const std::filesystem::path& stem, const JsaGrid& jsa) {
    std::vector<double> buf;
    buf.reserve(2 * jsa.amp.size());
    for (const complexd& v : jsa.amp) {
        buf.push_back(v.real());
        buf.push_back(v.imag());
    }
    detail::write_bytes(stem.string() + ".f64", buf.data(), buf.size() * sizeof(double));
    json m = {{"quantity", "joint spectral amplitude"},
              {"units", "internal, unit L2 norm"},
              {"dtype", "complex128"},
              {"byte_order", "little-endian"},
              {"layout", "row-major (photon1, photon2), interleaved re/im"},
              {"storage", "dense"},
              {"measure", "trapezoid node weights times cell"},
              {"axes",
               {{"n_omega", jsa.axes.n_omega},
                {"omega_min", jsa.axes.omega_min},
                {"omega_max", jsa.axes.omega_max},
                {"n_q", jsa.axes.n_q},
                {"q_max", jsa.axes.q_max}}}};
    detail::write_manifest(stem.string() + ".json", m);
}

inline JsaGrid read_jsa(const std::filesystem::path& stem) {
    std::ifstream in(stem.string() + ".json");
    if (!in) throw IoError("cannot open manifest: " + stem.string() + ".json");
    json m = json::parse(in);
    JsaAxes axes;
    axes.n_omega = m.at("axes").at("n_omega");
    axes.omega_min = m.at("axes").at("omega_min");
    axes.omega_max = m.at("axes").at("omega_max");
    axes.n_q = m.at("axes").at("n_q");
    axes.q_max = m.at("axes").at("q_max");
    axes.validate();
    JsaGrid jsa(axes);
    auto buf = detail::read_f64(stem.string() + ".f64", 2 * jsa.amp.size());
    for (std::size_t i = 0; i < jsa.amp.size(); ++i)
        jsa.amp[i] = complexd(buf[2 * i], buf[2 * i + 1]);
    return jsa;
}

/// Deterministic CSV writer: fixed %.17g formatting, one header row.
class CsvWriter {
  public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::trunc) {
        if (!out_) throw IoError("cannot open for writing: " + path.string());
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<double>& values) {
        char buf[32];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values[i]);
            out_ << (i ? "," : "") << buf;
        }
        out_ << "\n";
        if (!out_) throw IoError("csv write failed");
    }

  private:
    std::ofstream out_;
};

} // namespace pwf
