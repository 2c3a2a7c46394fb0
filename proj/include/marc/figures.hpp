#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "marc/config.hpp"
#include "marc/sha256.hpp"
#include "marc/sweep.hpp"

namespace marc {

struct FigureCurve {
    std::string name;     // also the artifact filename stem
    SweepConfig config;
    bool is_bound = false;
};

struct FigureSpec {
    std::string name;
    std::vector<FigureCurve> curves;
};

namespace detail {

inline std::vector<double> grid(double lo, double hi, double step) {
    std::vector<double> g;
    for (double v = lo; v <= hi + 1e-9; v += step) g.push_back(v);
    return g;
}

inline SweepConfig sim_base(Scheme scheme, bool coded, std::uint64_t seed) {
    SweepConfig c;
    c.scheme = scheme;
    c.coded = coded;
    c.target_bit_errors = 200;
    c.seed = seed;
    return c;
}

inline std::string offset_tag(const SweepConfig& c) {
    if (c.urc_ideal) return "ideal";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%+gdb", c.urc_offset_db);
    return std::string("urc") + buf;
}

inline std::string serialize_config(const SweepConfig& c) {
    std::string grid_s, gens;
    for (std::size_t i = 0; i < c.snr_grid_db.size(); ++i)
        grid_s += (i ? "," : "") + format_double(c.snr_grid_db[i]);
    for (std::size_t i = 0; i < c.code_generators.size(); ++i) {
        char oct[16];
        std::snprintf(oct, sizeof(oct), "%o", c.code_generators[i]);
        gens += (i ? "," : "") + std::string(oct);
    }
    std::string out;
    out += "scheme=" + scheme_name(c.scheme);
    out += ";coded=" + std::string(c.coded ? "true" : "false");
    out += ";snr_grid_db=" + grid_s;
    out += ";max_frames=" + std::to_string(c.max_frames);
    out += ";target_bit_errors=" + std::to_string(c.target_bit_errors);
    out += ";k=" + std::to_string(c.k);
    out += ";code=" + gens;
    out += ";urc_offset_db=" + (c.urc_ideal ? std::string("ideal") : format_double(c.urc_offset_db));
    out += ";genie_sic=" + std::string(c.genie_sic ? "true" : "false");
    out += ";seed=" + std::to_string(c.seed);
    out += ";workers=" + std::to_string(c.workers);
    return out;
}

}  // namespace detail

// Preset curve sets reproducing each published comparison:
//   fig3: uncoded two-user scheme vs its analytic bound, direct, Alamouti.
//   fig4: coded scheme vs the coded bound and coded direct transmission.
//   fig5: coded scheme and bound across relay-uplink qualities.
//   fig6: coded scheme across uplink qualities vs coded direct and Alamouti.
//   fig7: two- and three-user schemes vs uncoded direct and Alamouti.
inline FigureSpec figure_spec(const std::string& name) {
    using detail::grid;
    using detail::sim_base;
    FigureSpec spec;
    spec.name = name;
    if (name == "fig3") {
        const std::uint64_t seed = 301;
        auto marc = sim_base(Scheme::Marc, false, seed);
        marc.snr_grid_db = grid(0, 24, 4);
        marc.max_frames = 1000000;
        auto bound = marc;
        bound.snr_grid_db = grid(0, 40, 2);
        auto direct = sim_base(Scheme::Direct, false, seed);
        direct.snr_grid_db = grid(0, 24, 4);
        direct.max_frames = 1000000;
        auto alam = sim_base(Scheme::Alamouti, false, seed);
        alam.snr_grid_db = grid(0, 24, 4);
        alam.max_frames = 1000000;
        spec.curves = {{"marc-uncoded-sim", marc, false},
                       {"marc-uncoded-bound", bound, true},
                       {"direct-uncoded", direct, false},
                       {"alamouti-uncoded", alam, false}};
    } else if (name == "fig4") {
        const std::uint64_t seed = 401;
        auto marc = sim_base(Scheme::Marc, true, seed);
        marc.snr_grid_db = grid(0, 20, 2);
        marc.max_frames = 400000;
        auto bound = marc;
        bound.snr_grid_db = grid(0, 24, 2);
        auto direct = sim_base(Scheme::Direct, true, seed);
        direct.snr_grid_db = grid(0, 24, 4);
        direct.max_frames = 400000;
        spec.curves = {{"marc-coded-sim", marc, false},
                       {"marc-coded-bound", bound, true},
                       {"direct-coded", direct, false}};
    } else if (name == "fig5") {
        const std::uint64_t seed = 501;
        for (double off : {0.0, 3.0}) {
            auto sim = sim_base(Scheme::Marc, true, seed);
            sim.urc_ideal = false;
            sim.urc_offset_db = off;
            sim.snr_grid_db = grid(0, 14, 2);
            sim.max_frames = 400000;
            auto bound = sim;
            bound.snr_grid_db = grid(0, 24, 2);
            const std::string tag = detail::offset_tag(sim);
            spec.curves.push_back({"marc-coded-sim-" + tag, sim, false});
            spec.curves.push_back({"marc-coded-bound-" + tag, bound, true});
        }
        auto ideal = sim_base(Scheme::Marc, true, seed);
        ideal.snr_grid_db = grid(0, 14, 2);
        ideal.max_frames = 400000;
        auto ideal_bound = ideal;
        ideal_bound.snr_grid_db = grid(0, 24, 2);
        spec.curves.push_back({"marc-coded-sim-ideal", ideal, false});
        spec.curves.push_back({"marc-coded-bound-ideal", ideal_bound, true});
    } else if (name == "fig6") {
        const std::uint64_t seed = 601;
        auto ideal = sim_base(Scheme::Marc, true, seed);
        ideal.snr_grid_db = grid(0, 16, 2);
        ideal.max_frames = 400000;
        spec.curves.push_back({"marc-coded-sim-ideal", ideal, false});
        for (double off : {0.0, 3.0}) {
            auto sim = ideal;
            sim.urc_ideal = false;
            sim.urc_offset_db = off;
            spec.curves.push_back({"marc-coded-sim-" + detail::offset_tag(sim), sim, false});
        }
        auto direct = sim_base(Scheme::Direct, true, seed);
        direct.snr_grid_db = grid(0, 16, 2);
        direct.max_frames = 400000;
        auto alam = sim_base(Scheme::Alamouti, true, seed);
        alam.snr_grid_db = grid(0, 16, 2);
        alam.max_frames = 400000;
        spec.curves.push_back({"direct-coded", direct, false});
        spec.curves.push_back({"alamouti-coded", alam, false});
    } else if (name == "fig7") {
        const std::uint64_t seed = 701;
        auto marc3 = sim_base(Scheme::Marc3, false, seed);
        marc3.snr_grid_db = grid(0, 24, 4);
        marc3.max_frames = 1000000;
        auto marc = sim_base(Scheme::Marc, false, seed);
        marc.snr_grid_db = grid(0, 24, 4);
        marc.max_frames = 1000000;
        auto direct = sim_base(Scheme::Direct, false, seed);
        direct.snr_grid_db = grid(0, 24, 4);
        direct.max_frames = 1000000;
        auto alam = sim_base(Scheme::Alamouti, false, seed);
        alam.snr_grid_db = grid(0, 24, 4);
        alam.max_frames = 1000000;
        spec.curves = {{"marc3-uncoded-sim", marc3, false},
                       {"marc-uncoded-sim", marc, false},
                       {"direct-uncoded", direct, false},
                       {"alamouti-uncoded", alam, false}};
    } else {
        throw ConfigError("figure", "unknown figure '" + name + "'");
    }
    return spec;
}

struct FigureArtifact {
    std::string filename;
    std::string sha256;
};

// Runs every curve of the spec and writes one CSV per curve plus a manifest
// listing the full configuration and the hash of each artifact.
inline std::vector<FigureArtifact> write_figure(const FigureSpec& spec,
                                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<FigureArtifact> artifacts;
    std::string manifest = "figure = " + spec.name + "\n";
    for (const auto& curve : spec.curves) {
        const std::string csv = curve.is_bound ? to_csv(run_bound(curve.config))
                                               : to_csv(run_sweep(curve.config));
        const std::string filename = curve.name + ".csv";
        std::ofstream out(out_dir / filename, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (out_dir / filename).string());
        out << csv;
        out.close();
        const std::string digest = hash::sha256_hex(csv);
        manifest += "curve = " + curve.name + "\n";
        manifest += "file = " + filename + "\n";
        manifest += "kind = " + std::string(curve.is_bound ? "bound" : "sim") + "\n";
        manifest += "config = " + detail::serialize_config(curve.config) + "\n";
        manifest += "sha256 = " + digest + "\n";
        artifacts.push_back({filename, digest});
    }
    std::ofstream mf(out_dir / "manifest.txt", std::ios::binary);
    if (!mf) throw std::runtime_error("cannot write manifest");
    mf << manifest;
    return artifacts;
}

}  // namespace marc
