#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "pwf/born.hpp"
#include "pwf/io.hpp"
#include "pwf/propagator.hpp"
#include "pwf/schmidt.hpp"
#include "pwf/selftest.hpp"
#include "pwf/spdc.hpp"
#include "pwf/units.hpp"

namespace pwf {

inline constexpr const char* tool_version = "0.1.0";

/// Configuration rej/ions carry their own type so the CLI maps them to the
/// schema exit code.
struct SchemaError : std::runtime_error {
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

namespace cfg {

inline void require_keys(const json& j, const std::string& where,
                         const std::set<std::string>& allowed,
                         const std::set<std::string>& required) {
    if (!j.is_object()) throw SchemaError(where + ": expected an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key))
            throw SchemaError(where + ": unknown key '" + key + "'");
    for (const auto& key : required)
        if (!j.contains(key))
            throw SchemaError(where + ": missing required key '" + key + "'");
}

template <class T>
T get(const json& j, const std::string& where, const std::string& key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(where + "." + key + ": " + e.what());
    }
}

template <class T>
T get_or(const json& j, const std::string& where, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    return get<T>(j, where, key);
}

inline Vec3 get_vec3(const json& j, const std::string& where, const std::string& key) {
    auto v = get<std::vector<double>>(j, where, key);
    if (v.size() != 3) throw SchemaError(where + "." + key + ": expected 3 numbers");
    return {v[0], v[1], v[2]};
}

} // namespace cfg

struct EmittedFile {
    std::string name;
    std::uint64_t bytes = 0;
    std::string fnv1a64;
};

struct RunManifest {
    std::string scenario;
    std::string config_hash;
    int threads = 0;
    double wall_time_s = 0.0;
    std::vector<EmittedFile> files;
    json diagnostics;

    json to_json() const {
        json files_j = json::array();
        for (const auto& f : files)
            files_j.push_back({{"name", f.name}, {"bytes", f.bytes}, {"fnv1a64", f.fnv1a64}});
        return json{{"tool", "pwf"},        {"version", tool_version},
                    {"scenario", scenario}, {"config_fnv1a64", config_hash},
                    {"threads", threads},   {"wall_time_s", wall_time_s},
                    {"files", files_j},     {"diagnostics", diagnostics}};
    }
};

namespace scenario_detail {

class OutputTracker {
  public:
    explicit OutputTracker(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory: " + dir_.string());
    }

    const std::filesystem::path& dir() const { return dir_; }

    /// Record an emitted file (after it has been written).
    void track(RunManifest& manifest, const std::string& name) const {
        EmittedFile f;
        f.name = name;
        const auto path = dir_ / name;
        std::error_code ec;
        f.bytes = std::filesystem::file_size(path, ec);
        if (ec) throw IoError("missing emitted file: " + path.string());
        f.fnv1a64 = fnv1a64_file(path);
        manifest.files.push_back(std::move(f));
    }

  private:
    std::filesystem::path dir_;
};

inline Grid3 parse_grid(const json& j) {
    cfg::require_keys(j, "grid", {"n", "L"}, {"n", "L"});
    auto n = cfg::get<std::vector<int>>(j, "grid", "n");
    auto L = cfg::get<std::vector<double>>(j, "grid", "L");
    if (n.size() != 3 || L.size() != 3) throw SchemaError("grid: n and L need 3 entries");
    return Grid3(n[0], n[1], n[2], L[0], L[1], L[2]);
}

inline MediumMap parse_medium(const json& j, const Grid3& g) {
    cfg::require_keys(j, "medium",
                      {"model", "chi_e", "chi_m", "z_from", "z_to", "chi_e_peak", "center_z",
                       "width"},
                      {"model"});
    const auto model = cfg::get<std::string>(j, "medium", "model");
    if (model == "vacuum") return MediumMap::vacuum(g);
    if (model == "uniform")
        return MediumMap::uniform(g, cfg::get<double>(j, "medium", "chi_e"),
                                  cfg::get_or<double>(j, "medium", "chi_m", 0.0));
    RealScalarField ce(g), cm(g);
    if (model == "slab") {
        const double chi = cfg::get<double>(j, "medium", "chi_e");
        const double z0 = cfg::get<double>(j, "medium", "z_from");
        const double z1 = cfg::get<double>(j, "medium", "z_to");
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz)
                    if (g.z(iz) >= z0 && g.z(iz) < z1) ce(ix, iy, iz) = chi;
        return MediumMap(ce, cm);
    }
    if (model == "gaussian_bump") {
        const double peak = cfg::get<double>(j, "medium", "chi_e_peak");
        const double zc = cfg::get<double>(j, "medium", "center_z");
        const double w = cfg::get<double>(j, "medium", "width");
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz)
                    ce(ix, iy, iz) = peak * std::exp(-0.5 * std::pow((g.z(iz) - zc) / w, 2));
        return MediumMap(ce, cm);
    }
    throw SchemaError("medium.model: unknown model '" + model + "'");
}

inline RealFieldPair parse_initial(const json& j, const Grid3& g, const MediumMap& medium) {
    cfg::require_keys(j, "initial",
                      {"model", "mode_z", "amplitude", "center_z", "sigma",
                       "carrier_wavelength"},
                      {"model"});
    const auto model = cfg::get<std::string>(j, "initial", "model");
    RealFieldPair f(g);
    if (model == "plane_wave") {
        if (!medium.is_uniform())
            throw SchemaError("initial.plane_wave: requires a uniform medium");
        const int mz = cfg::get<int>(j, "initial", "mode_z");
        const double amp = cfg::get_or<double>(j, "initial", "amplitude", 1.0);
        const double k = 2 * pi * mz / g.Lz;
        const double n_idx = medium.uniform_n();
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    const std::int64_t i = g.index(ix, iy, iz);
                    f.E.comp[0][i] = amp * std::cos(k * g.z(iz));
                    f.B.comp[1][i] = amp * n_idx * std::cos(k * g.z(iz));
                }
        return f;
    }
    if (model == "gaussian_packet") {
        const double zc = cfg::get<double>(j, "initial", "center_z");
        const double sig = cfg::get<double>(j, "initial", "sigma");
        const double lam = cfg::get<double>(j, "initial", "carrier_wavelength");
        const double amp = cfg::get_or<double>(j, "initial", "amplitude", 1.0);
        const double k0 = 2 * pi / lam;
        for (int ix = 0; ix < g.nx; ++ix)
            for (int iy = 0; iy < g.ny; ++iy)
                for (int iz = 0; iz < g.nz; ++iz) {
                    const double z = g.z(iz);
                    const double v = amp * std::exp(-0.5 * std::pow((z - zc) / sig, 2)) *
                                     std::cos(k0 * (z - zc));
                    const std::int64_t i = g.index(ix, iy, iz);
                    f.E.comp[0][i] = v;
                    f.B.comp[1][i] = v;
                }
        return f;
    }
    throw SchemaError("initial.model: unknown model '" + model + "'");
}

inline EvolutionConfig parse_evolution(const json& j, const Grid3& g, const MediumMap& medium) {
    cfg::require_keys(j, "evolution",
                      {"dt", "cfl_fraction", "n_steps", "integrator", "cfl_guard",
                       "snapshot_stride", "continuity", "emit_snapshots"},
                      {"n_steps"});
    EvolutionConfig cfg_out;
    if (j.contains("dt") && j.contains("cfl_fraction"))
        throw SchemaError("evolution: give either dt or cfl_fraction, not both");
    if (j.contains("dt")) {
        cfg_out.dt = cfg::get<double>(j, "evolution", "dt");
    } else {
        const double frac = cfg::get_or<double>(j, "evolution", "cfl_fraction", 0.5);
        cfg_out.dt = frac * cfl_limit(g, medium);
    }
    cfg_out.n_steps = cfg::get<int>(j, "evolution", "n_steps");
    const auto integ = cfg::get_or<std::string>(j, "evolution", "integrator", "maxwell_rk4");
    if (integ == "maxwell_rk4")
        cfg_out.integrator = Integrator::maxwell_rk4;
    else if (integ == "maxwell_exact")
        cfg_out.integrator = Integrator::maxwell_exact;
    else if (integ == "rs_vacuum")
        cfg_out.integrator = Integrator::rs_vacuum;
    else
        throw SchemaError("evolution.integrator: unknown integrator '" + integ + "'");
    cfg_out.cfl_guard = cfg::get_or<bool>(j, "evolution", "cfl_guard", true);
    cfg_out.snapshot_stride = cfg::get_or<int>(j, "evolution", "snapshot_stride", 0);
    cfg_out.continuity = cfg::get_or<bool>(j, "evolution", "continuity", false);
    return cfg_out;
}

inline PumpSpectrum parse_pump(const json& j) {
    cfg::require_keys(j, "pump", {"model", "omega0", "sigma_omega", "waist", "q_dims"},
                      {"model", "omega0"});
    PumpSpectrum pump;
    const auto model = cfg::get<std::string>(j, "pump", "model");
    if (model == "monochromatic")
        pump.model = PumpSpectrum::Model::monochromatic;
    else if (model == "gaussian")
        pump.model = PumpSpectrum::Model::gaussian;
    else
        throw SchemaError("pump.model: unknown model '" + model + "'");
    pump.omega0 = cfg::get<double>(j, "pump", "omega0");
    pump.sigma_omega = cfg::get_or<double>(j, "pump", "sigma_omega", 0.0);
    pump.waist = cfg::get_or<double>(j, "pump", "waist", 0.0);
    pump.q_dims = cfg::get_or<int>(j, "pump", "q_dims", 0);
    pump.validate();
    return pump;
}

inline CrystalSpec parse_crystal(const json& j) {
    cfg::require_keys(
        j, "crystal",
        {"chi2", "length", "transverse_width", "n", "interaction_time", "window"},
        {"length", "n"});
    CrystalSpec crystal;
    crystal.chi2 = cfg::get_or<double>(j, "crystal", "chi2", 1.0);
    crystal.length = cfg::get<double>(j, "crystal", "length");
    crystal.transverse_width = cfg::get_or<double>(j, "crystal", "transverse_width", 0.0);
    crystal.n = cfg::get<double>(j, "crystal", "n");
    crystal.interaction_time = cfg::get_or<double>(j, "crystal", "interaction_time", 0.0);
    const auto window = cfg::get_or<std::string>(j, "crystal", "window", "gaussian");
    if (window == "gaussian")
        crystal.window = CrystalSpec::Window::gaussian;
    else if (window == "box")
        crystal.window = CrystalSpec::Window::box;
    else
        throw SchemaError("crystal.window: unknown window '" + window + "'");
    crystal.validate();
    return crystal;
}

inline JsaAxes parse_jsa_axes(const json& j) {
    cfg::require_keys(j, "jsa_grid", {"n_omega", "omega_min", "omega_max", "n_q", "q_max"},
                      {"n_omega", "omega_min", "omega_max"});
    JsaAxes axes;
    axes.n_omega = cfg::get<int>(j, "jsa_grid", "n_omega");
    axes.omega_min = cfg::get<double>(j, "jsa_grid", "omega_min");
    axes.omega_max = cfg::get<double>(j, "jsa_grid", "omega_max");
    axes.n_q = cfg::get_or<int>(j, "jsa_grid", "n_q", 0);
    axes.q_max = cfg::get_or<double>(j, "jsa_grid", "q_max", 0.0);
    axes.validate();
    return axes;
}

inline FrequencyFilter parse_filter(const json& j, const std::string& where) {
    cfg::require_keys(j, where, {"shape", "center", "width"}, {"shape", "center", "width"});
    FrequencyFilter f;
    const auto shape = cfg::get<std::string>(j, where, "shape");
    if (shape == "hard")
        f.shape = FrequencyFilter::Shape::hard;
    else if (shape == "gaussian")
        f.shape = FrequencyFilter::Shape::gaussian;
    else
        throw SchemaError(where + ".shape: unknown shape '" + shape + "'");
    f.center = cfg::get<double>(j, where, "center");
    f.width = cfg::get<double>(j, where, "width");
    return f;
}

inline void run_propagate(const json& j, const OutputTracker& out, RunManifest& manifest) {
    cfg::require_keys(j, "config",
                      {"scenario", "output_dir", "threads", "units", "grid", "medium",
                       "initial", "evolution"},
                      {"grid", "medium", "initial", "evolution"});
    const Grid3 g = parse_grid(j.at("grid"));
    const MediumMap medium = parse_medium(j.at("medium"), g);
    const RealFieldPair f0 = parse_initial(j.at("initial"), g, medium);
    EvolutionConfig evo = parse_evolution(j.at("evolution"), g, medium);
    const bool emit_snapshots =
        cfg::get_or<bool>(j.at("evolution"), "evolution", "emit_snapshots", false);
    if (!emit_snapshots && !evo.continuity) evo.snapshot_stride = 0;

    auto res = run(f0, medium, evo);

    write_field_pair(out.dir(), "final", res.final_state);
    out.track(manifest, "final_E.f64");
    out.track(manifest, "final_E.json");
    out.track(manifest, "final_B.f64");
    out.track(manifest, "final_B.json");

    if (emit_snapshots) {
        for (std::size_t s = 0; s < res.snapshots.size(); ++s) {
            char tag[32];
            std::snprintf(tag, sizeof tag, "snapshot_%04zu", s);
            write_field_pair(out.dir(), tag, res.snapshots[s]);
            out.track(manifest, std::string(tag) + "_E.f64");
            out.track(manifest, std::string(tag) + "_E.json");
            out.track(manifest, std::string(tag) + "_B.f64");
            out.track(manifest, std::string(tag) + "_B.json");
        }
    }

    if (evo.continuity) {
        CsvWriter csv(out.dir() / "continuity.csv",
                      {"step", "time", "dE_dt", "flux", "work", "residual"});
        for (const auto& row : res.continuity.rows)
            csv.row({double(row.step), row.time, row.dE_dt, row.flux, row.work, row.residual});
        out.track(manifest, "continuity.csv");
        manifest.diagnostics["continuity_max_residual"] = res.continuity.max_abs_residual();
        manifest.diagnostics["continuity_energy_scale"] = res.continuity.energy_scale;
    }

    auto [divb, divd] = divergence_residual(res.final_state, medium);
    manifest.diagnostics["div_B_rms"] = divb;
    manifest.diagnostics["div_D_rms"] = divd;
    manifest.diagnostics["final_em_energy"] = em_energy_density(res.final_state).integral();
}

inline void run_scatter(const json& j, const OutputTracker& out, RunManifest& manifest) {
    cfg::require_keys(j, "config",
                      {"scenario", "output_dir", "threads", "units", "incident",
                       "background_n", "perturbation", "green", "observations"},
                      {"incident", "perturbation", "green", "observations"});

    const json& ji = j.at("incident");
    cfg::require_keys(ji, "incident", {"omega", "direction", "polarization", "amplitude"},
                      {"omega", "direction"});
    const double n_bg = cfg::get_or<double>(j, "config", "background_n", 1.0);
    PlaneWaveIncident inc;
    inc.n_bg = n_bg;
    const Vec3 dir = cfg::get_vec3(ji, "incident", "direction");
    const double dn = norm(dir);
    if (dn == 0.0) throw SchemaError("incident.direction: zero vector");
    const double omega = cfg::get<double>(ji, "incident", "omega");
    const double k = n_bg * omega / c_internal;
    inc.k = {k * dir[0] / dn, k * dir[1] / dn, k * dir[2] / dn};
    if (ji.contains("polarization")) {
        const Vec3 pol = cfg::get_vec3(ji, "incident", "polarization");
        inc.polarization = {complexd(pol[0], 0), complexd(pol[1], 0), complexd(pol[2], 0)};
    }
    inc.amplitude = cfg::get_or<double>(ji, "incident", "amplitude", 1.0);

    const json& jp = j.at("perturbation");
    cfg::require_keys(jp, "perturbation", {"bumps", "quad_spacing"}, {"bumps", "quad_spacing"});
    PerturbationSpec pert;
    for (const auto& jb : jp.at("bumps")) {
        cfg::require_keys(jb, "perturbation.bumps[]", {"center", "radius", "delta_chi_e"},
                          {"center", "radius", "delta_chi_e"});
        pert.bumps.push_back({cfg::get_vec3(jb, "bump", "center"),
                              cfg::get<double>(jb, "bump", "radius"),
                              cfg::get<double>(jb, "bump", "delta_chi_e")});
    }
    pert.quad_spacing = cfg::get<double>(jp, "perturbation", "quad_spacing");
    pert.validate();

    const json& jg = j.at("green");
    cfg::require_keys(jg, "green", {"k_max", "apod_width", "taper_power", "r_min"}, {"k_max"});
    GreenSpec spec;
    spec.n = n_bg;
    spec.k_max = cfg::get<double>(jg, "green", "k_max");
    spec.apod_width = cfg::get_or<double>(jg, "green", "apod_width", 0.0);
    spec.taper_power = cfg::get_or<int>(jg, "green", "taper_power", 2);
    spec.r_min = cfg::get_or<double>(jg, "green", "r_min", 1e-6);
    spec.validate();

    const json& jo = j.at("observations");
    cfg::require_keys(jo, "observations", {"mode", "points", "radius", "count", "axis1", "axis2"},
                      {"mode"});
    std::vector<Vec3> obs;
    const auto mode = cfg::get<std::string>(jo, "observations", "mode");
    if (mode == "points") {
        for (const auto& p : jo.at("points")) {
            auto v = p.get<std::vector<double>>();
            if (v.size() != 3) throw SchemaError("observations.points: expected 3 numbers");
            obs.push_back({v[0], v[1], v[2]});
        }
    } else if (mode == "ring") {
        obs = observation_ring(cfg::get<double>(jo, "observations", "radius"),
                               cfg::get<int>(jo, "observations", "count"),
                               cfg::get_vec3(jo, "observations", "axis1"),
                               cfg::get_vec3(jo, "observations", "axis2"));
    } else {
        throw SchemaError("observations.mode: unknown mode '" + mode + "'");
    }
    if (obs.empty()) throw SchemaError("observations: empty set");

    auto samples = born_scatter(inc, pert, spec, obs);

    // complex triples per observation point: [point][component][re, im]
    std::vector<double> buf;
    bool any_inside = false;
    for (const auto& s : samples) {
        for (int c = 0; c < 3; ++c) {
            buf.push_back(s.scattered[c].real());
            buf.push_back(s.scattered[c].imag());
        }
        any_inside = any_inside || s.inside_source;
    }
    detail::write_bytes(out.dir() / "scattered.f64", buf.data(), buf.size() * sizeof(double));
    json points_j = json::array();
    for (const auto& p : obs) points_j.push_back({p[0], p[1], p[2]});
    detail::write_manifest(out.dir() / "scattered.json",
                           json{{"quantity", "first-order scattered electric field phasor"},
                                {"units", "internal"},
                                {"dtype", "complex128"},
                                {"byte_order", "little-endian"},
                                {"layout", "[point][component], interleaved re/im"},
                                {"shape", {samples.size(), 3}},
                                {"observation_points", points_j},
                                {"omega", inc.omega()}});
    out.track(manifest, "scattered.f64");
    out.track(manifest, "scattered.json");
    manifest.diagnostics["observation_inside_source"] = any_inside;
}

inline void write_schmidt_outputs(const JsaGrid& jsa, const OutputTracker& out,
                                  RunManifest& manifest, bool want_schmidt,
                                  bool want_marginals) {
    if (want_schmidt) {
        auto res = schmidt(jsa);
        CsvWriter csv(out.dir() / "schmidt.csv", {"n", "lambda_n"});
        for (std::size_t i = 0; i < res.lambdas.size(); ++i)
            csv.row({double(i), res.lambdas[i]});
        out.track(manifest, "schmidt.csv");
        manifest.diagnostics["schmidt_number"] = res.schmidt_number;
        manifest.diagnostics["schmidt_rank"] = res.truncation_rank;
        manifest.diagnostics["schmidt_residual"] = res.residual;
    }
    if (want_marginals) {
        auto m1 = marginal_spectrum(jsa, 1);
        auto m2 = marginal_spectrum(jsa, 2);
        CsvWriter csv(out.dir() / "marginals.csv",
                      {"index", "omega", "q", "photon1", "photon2"});
        for (int i = 0; i < jsa.axes.per_photon(); ++i)
            csv.row({double(i), jsa.axes.omega(i), jsa.axes.q(i), m1[i], m2[i]});
        out.track(manifest, "marginals.csv");
    }
}

inline void run_spdc_jsa(const json& j, const OutputTracker& out, RunManifest& manifest) {
    cfg::require_keys(j, "config",
                      {"scenario", "output_dir", "threads", "units", "pump", "crystal",
                       "jsa_grid", "filters", "outputs"},
                      {"pump", "crystal", "jsa_grid"});
    const PumpSpectrum pump = parse_pump(j.at("pump"));
    const CrystalSpec crystal = parse_crystal(j.at("crystal"));
    const JsaAxes axes = parse_jsa_axes(j.at("jsa_grid"));

    JsaGrid jsa = spdc_jsa(pump, crystal, axes);

    if (j.contains("filters")) {
        const json& jf = j.at("filters");
        cfg::require_keys(jf, "filters", {"photon1", "photon2"}, {"photon1", "photon2"});
        jsa = apply_filters(jsa, parse_filter(jf.at("photon1"), "filters.photon1"),
                            parse_filter(jf.at("photon2"), "filters.photon2"));
    }

    bool want_schmidt = true, want_marginals = true;
    if (j.contains("outputs")) {
        const json& jo = j.at("outputs");
        cfg::require_keys(jo, "outputs", {"schmidt", "marginals"}, {});
        want_schmidt = cfg::get_or<bool>(jo, "outputs", "schmidt", true);
        want_marginals = cfg::get_or<bool>(jo, "outputs", "marginals", true);
    }

    write_jsa(out.dir() / "jsa", jsa);
    out.track(manifest, "jsa.f64");
    out.track(manifest, "jsa.json");
    manifest.diagnostics["jsa_norm"] = jsa.l2_norm2();
    manifest.diagnostics["exchange_asymmetry"] = jsa.exchange_asymmetry();
    write_schmidt_outputs(jsa, out, manifest, want_schmidt, want_marginals);
}

inline void run_spdc_position(const json& j, const OutputTracker& out, RunManifest& manifest) {
    cfg::require_keys(j, "config",
                      {"scenario", "output_dir", "threads", "units", "pump", "crystal",
                       "detection"},
                      {"pump", "crystal", "detection"});
    const PumpSpectrum pump = parse_pump(j.at("pump"));
    const CrystalSpec crystal = parse_crystal(j.at("crystal"));

    const json& jd = j.at("detection");
    cfg::require_keys(jd, "detection",
                      {"radius", "omega1", "omega2", "theta1", "theta2", "quadrature"},
                      {"radius", "omega1", "omega2", "theta1", "theta2"});
    const double radius = cfg::get<double>(jd, "detection", "radius");
    const double w1 = cfg::get<double>(jd, "detection", "omega1");
    const double w2 = cfg::get<double>(jd, "detection", "omega2");
    const json& jt1 = jd.at("theta1");
    cfg::require_keys(jt1, "detection.theta1", {"from", "to", "count"},
                      {"from", "to", "count"});
    const double th_from = cfg::get<double>(jt1, "theta1", "from");
    const double th_to = cfg::get<double>(jt1, "theta1", "to");
    const int th_count = cfg::get<int>(jt1, "theta1", "count");
    if (th_count < 1) throw SchemaError("detection.theta1.count: must be >= 1");
    const double th2 = cfg::get<double>(jd, "detection", "theta2");

    BiphotonPositionConfig bcfg;
    if (jd.contains("quadrature")) {
        const json& jq = jd.at("quadrature");
        cfg::require_keys(jq, "detection.quadrature", {"nx", "ny", "nz", "width_y"}, {});
        bcfg.nx = cfg::get_or<int>(jq, "quadrature", "nx", bcfg.nx);
        bcfg.ny = cfg::get_or<int>(jq, "quadrature", "ny", bcfg.ny);
        bcfg.nz = cfg::get_or<int>(jq, "quadrature", "nz", bcfg.nz);
        bcfg.transverse_width_y = cfg::get_or<double>(jq, "quadrature", "width_y", 0.0);
    }

    std::vector<double> abs2(th_count);
    CsvWriter csv(out.dir() / "coincidences.csv",
                  {"theta1", "theta2", "re", "im", "abs2_normalized"});
    std::vector<complexd> amps(th_count);
    double max_abs2 = 0.0;
    for (int i = 0; i < th_count; ++i) {
        const double th1 =
            th_count == 1 ? th_from : th_from + (th_to - th_from) * i / (th_count - 1);
        const Vec3 r1 = {radius * std::sin(th1), 0, radius * std::cos(th1)};
        const Vec3 r2 = {radius * std::sin(th2), 0, radius * std::cos(th2)};
        amps[i] = biphoton_position(pump, crystal, r1, r2, w1, w2, bcfg);
        abs2[i] = std::norm(amps[i]);
        max_abs2 = std::max(max_abs2, abs2[i]);
    }
    for (int i = 0; i < th_count; ++i) {
        const double th1 =
            th_count == 1 ? th_from : th_from + (th_to - th_from) * i / (th_count - 1);
        csv.row({th1, th2, amps[i].real(), amps[i].imag(),
                 max_abs2 > 0 ? abs2[i] / max_abs2 : 0.0});
    }
    out.track(manifest, "coincidences.csv");
    manifest.diagnostics["max_abs2"] = max_abs2;
}

inline void run_schmidt_scenario(const json& j, const OutputTracker& out,
                                 RunManifest& manifest) {
    cfg::require_keys(j, "config",
                      {"scenario", "output_dir", "threads", "units", "jsa_input"},
                      {"jsa_input"});
    const auto stem = cfg::get<std::string>(j, "config", "jsa_input");
    JsaGrid jsa = read_jsa(stem);
    const double norm2 = jsa.l2_norm2();
    if (std::abs(norm2 - 1.0) > 1e-6)
        fail("schmidt scenario: input amplitude is not normalized (|norm^2 - 1| = " +
             std::to_string(std::abs(norm2 - 1.0)) + ")");
    jsa.normalize();  // absorb serialization rounding
    write_schmidt_outputs(jsa, out, manifest, true, true);
}

inline void run_selftest_scenario(const OutputTracker& out, RunManifest& manifest) {
    auto rep = selftest();
    std::ofstream txt(out.dir() / "selftest_report.txt", std::ios::trunc);
    if (!txt) throw IoError("cannot write selftest report");
    for (const auto& c : rep.checks)
        txt << (c.passed ? "pass" : "FAIL") << "  " << c.name << "  [" << c.detail << "]\n";
    txt << (rep.all_passed() ? "all checks passed" : "FAILURES present") << "\n";
    txt.close();
    out.track(manifest, "selftest_report.txt");
    manifest.diagnostics["selftest_passed"] = rep.all_passed();
    manifest.diagnostics["selftest_wall_time_s"] = rep.wall_time_s;
    if (!rep.all_passed()) {
        std::string failed;
        for (const auto& c : rep.checks)
            if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
        fail("selftest failures: " + failed);
    }
}

} // namespace scenario_detail

/// Validate and execute one scenario configuration. Outputs land in the
/// configured directory; the run manifest is written last. Deterministic
/// for a fixed config and thread count (the manifest's wall time is the
/// one intentionally varying field).
inline RunManifest run_scenario(const json& config, const std::string& config_text) {
    using namespace scenario_detail;
    const auto t0 = std::chrono::steady_clock::now();

    if (!config.is_object()) throw SchemaError("config: expected a JSON object");
    if (!config.contains("scenario")) throw SchemaError("config: missing 'scenario'");
    const auto kind = cfg::get<std::string>(config, "config", "scenario");

    RunManifest manifest;
    manifest.scenario = kind;
    manifest.config_hash = fnv1a64_hex(config_text.data(), config_text.size());
    manifest.threads = resolve_threads(cfg::get_or<int>(config, "config", "threads", 0));
    default_threads().store(cfg::get_or<int>(config, "config", "threads", 0));

    if (config.contains("units")) {
        const json& ju = config.at("units");
        cfg::require_keys(ju, "units", {"length_scale_m"}, {"length_scale_m"});
        UnitSystem units(cfg::get<double>(ju, "units", "length_scale_m"));
        manifest.diagnostics["length_scale_m"] = units.length_scale_m();
        manifest.diagnostics["time_scale_s"] = units.time_scale_s();
        manifest.diagnostics["energy_scale_j"] = units.energy_scale_j();
    }

    const auto out_dir = cfg::get_or<std::string>(config, "config", "output_dir", "out");
    OutputTracker out{std::filesystem::path(out_dir)};

    if (kind == "propagate")
        run_propagate(config, out, manifest);
    else if (kind == "scatter")
        run_scatter(config, out, manifest);
    else if (kind == "spdc-jsa")
        run_spdc_jsa(config, out, manifest);
    else if (kind == "spdc-position")
        run_spdc_position(config, out, manifest);
    else if (kind == "schmidt")
        run_schmidt_scenario(config, out, manifest);
    else if (kind == "selftest")
        run_selftest_scenario(out, manifest);
    else
        throw SchemaError("scenario: unknown kind '" + kind + "'");

    manifest.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    detail::write_manifest(out.dir() / "manifest.json", manifest.to_json());
    return manifest;
}

inline RunManifest run_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    json config;
    try {
        config = json::parse(text);
    } catch (const json::exception& e) {
        throw SchemaError(std::string("config parse error: ") + e.what());
    }
    return run_scenario(config, text);
}

/// Human-readable description of the accepted configuration schema.
inline std::string config_schema_text() {
    return R"schema({
  "scenario": "propagate | scatter | spdc-jsa | spdc-position | schmidt | selftest",
  "output_dir": "string (default 'out')",
  "threads": "int (optional; overrides THREADS env)",
  "units": {"length_scale_m": "double (optional block)"},

  "-- propagate --": {
    "grid": {"n": [2, 2, 512], "L": [2.0, 2.0, 512.0]},
    "medium": {"model": "vacuum | uniform | slab | gaussian_bump",
               "chi_e": "double (uniform, slab)", "chi_m": "double (uniform)",
               "z_from": "double (slab)", "z_to": "double (slab)",
               "chi_e_peak": "double (gaussian_bump)", "center_z": "double",
               "width": "double"},
    "initial": {"model": "plane_wave | gaussian_packet",
                "mode_z": "int (plane_wave)", "amplitude": "double",
                "center_z": "double", "sigma": "double",
                "carrier_wavelength": "double"},
    "evolution": {"dt": "double (or cfl_fraction)", "cfl_fraction": "double",
                  "n_steps": "int",
                  "integrator": "maxwell_rk4 | maxwell_exact | rs_vacuum",
                  "cfl_guard": "bool", "snapshot_stride": "int",
                  "continuity": "bool", "emit_snapshots": "bool"}
  },

  "-- scatter --": {
    "background_n": "double",
    "incident": {"omega": "double", "direction": [0, 0, 1],
                 "polarization": [1, 0, 0], "amplitude": "double"},
    "perturbation": {"bumps": [{"center": [0, 0, 0], "radius": "double",
                                "delta_chi_e": "double"}],
                     "quad_spacing": "double"},
    "green": {"k_max": "double", "apod_width": "double", "taper_power": "int",
              "r_min": "double"},
    "observations": {"mode": "points | ring", "points": [[0, 0, 0]],
                     "radius": "double", "count": "int",
                     "axis1": [1, 0, 0], "axis2": [0, 0, 1]}
  },

  "-- spdc-jsa --": {
    "pump": {"model": "monochromatic | gaussian", "omega0": "double",
             "sigma_omega": "double", "waist": "double", "q_dims": "0 | 1"},
    "crystal": {"chi2": "double", "length": "double",
                "transverse_width": "double (<= 0: infinite)", "n": "double",
                "interaction_time": "double (<= 0: infinite)",
                "window": "gaussian | box"},
    "jsa_grid": {"n_omega": "int", "omega_min": "double", "omega_max": "double",
                 "n_q": "int (0: collinear)", "q_max": "double"},
    "filters": {"photon1": {"shape": "hard | gaussian", "center": "double",
                            "width": "double"},
                "photon2": {"...": "..."}},
    "outputs": {"schmidt": "bool", "marginals": "bool"}
  },

  "-- spdc-position --": {
    "pump": "as above",
    "crystal": "as above (finite transverse_width required)",
    "detection": {"radius": "double", "omega1": "double", "omega2": "double",
                  "theta1": {"from": "double", "to": "double", "count": "int"},
                  "theta2": "double",
                  "quadrature": {"nx": "int", "ny": "int", "nz": "int",
                                 "width_y": "double"}}
  },

  "-- schmidt --": {"jsa_input": "path stem of a serialized amplitude"},
  "-- selftest --": "no further keys"
})schema";
}

} // namespace pwf
