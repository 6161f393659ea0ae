#include "bp/branch_points.hpp"
#include "bp/errors.hpp"
#include "bp/family.hpp"
#include "bp/report.hpp"
#include "bp/spectral.hpp"
#include "bp/sweep.hpp"

#include <CLI11.hpp>

#include <complex>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;

bp::Complex parse_complex_flag(const std::string& text, const std::string& name) {
    std::istringstream is(text);
    double re = 0.0, im = 0.0;
    char comma = 0;
    if (!(is >> re))
        throw bp::ConfigError("flag " + name + ": expected re[,im], got '" + text + "'");
    if (is >> comma) {
        if (comma != ',' || !(is >> im))
            throw bp::ConfigError("flag " + name + ": expected re[,im], got '" + text + "'");
    }
    std::string rest;
    if (is >> rest)
        throw bp::ConfigError("flag " + name + ": trailing characters in '" + text + "'");
    return {re, im};
}

bp::FamilySpec load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw bp::ConfigError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return bp::parse_family(buffer.str());
}

void write_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path())
        fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw bp::Error("cannot open output file: " + path);
    out << content;
    if (!out)
        throw bp::Error("write failed: " + path);
}

void write_manifest(const std::string& command, const std::string& config_path,
                    const bp::FamilySpec& spec,
                    const std::map<std::string, std::string>& parameters,
                    const std::vector<std::string>& outputs) {
    const std::string manifest_path = outputs.front() + ".manifest.json";
    write_file(manifest_path,
               bp::run_manifest(command, config_path, spec, parameters, outputs));
}

std::string fmt(double v) {
    return bp::format_double(v);
}

struct CommonFlags {
    std::string config;
    std::string out;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Branch-point toolkit for parametrized complex symmetric matrix families"};
    app.set_version_flag("--version", bp::kToolVersion);
    app.require_subcommand(1);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "Parameter sweep with tracked states");
    CommonFlags sweep_flags;
    double sweep_from = 0.0, sweep_to = 1.0;
    int sweep_steps = 400;
    bool sweep_adaptive = false, sweep_svg = false;
    sweep_cmd->add_option("--config", sweep_flags.config, "family config (JSON)")->required();
    sweep_cmd->add_option("--from", sweep_from, "start of the a interval")->required();
    sweep_cmd->add_option("--to", sweep_to, "end of the a interval")->required();
    sweep_cmd->add_option("--steps", sweep_steps, "number of grid intervals");
    sweep_cmd->add_flag("--adaptive", sweep_adaptive, "bisect fast-mixing intervals");
    sweep_cmd->add_flag("--svg", sweep_svg, "also emit energies.svg and mixing.svg");
    sweep_cmd->add_option("--out", sweep_flags.out, "output CSV path")
        ->default_val("sweep.csv");

    // find-ep
    auto* find_cmd = app.add_subcommand("find-ep", "Locate one branch point from a seed");
    CommonFlags find_flags;
    std::string find_seed = "0,0";
    double find_tol = 1e-12;
    find_cmd->add_option("--config", find_flags.config, "family config (JSON)")->required();
    find_cmd->add_option("--seed", find_seed, "complex seed re[,im]")->required();
    find_cmd->add_option("--tol", find_tol, "step tolerance");
    find_cmd->add_option("--out", find_flags.out, "output CSV path")->default_val("find_ep.csv");

    // list-eps
    auto* list_cmd = app.add_subcommand("list-eps", "Grid search for branch points in a rectangle");
    CommonFlags list_flags;
    double re_min = 0.0, re_max = 1.0, im_min = -0.5, im_max = 0.5;
    int list_grid = 8;
    list_cmd->add_option("--config", list_flags.config, "family config (JSON)")->required();
    list_cmd->add_option("--re-min", re_min, "rectangle Re lower bound")->required();
    list_cmd->add_option("--re-max", re_max, "rectangle Re upper bound")->required();
    list_cmd->add_option("--im-min", im_min, "rectangle Im lower bound")->required();
    list_cmd->add_option("--im-max", im_max, "rectangle Im upper bound")->required();
    list_cmd->add_option("--grid", list_grid, "seeds per side");
    list_cmd->add_option("--out", list_flags.out, "output CSV path")->default_val("list_eps.csv");

    // encircle
    auto* enc_cmd = app.add_subcommand("encircle", "Monodromy permutation around a loop");
    CommonFlags enc_flags;
    std::string enc_center = "0,0";
    double enc_radius = 0.02;
    int enc_steps = 256;
    enc_cmd->add_option("--config", enc_flags.config, "family config (JSON)")->required();
    enc_cmd->add_option("--center", enc_center, "loop center re[,im]")->required();
    enc_cmd->add_option("--radius", enc_radius, "loop radius");
    enc_cmd->add_option("--steps", enc_steps, "loop steps (>= 64)");
    enc_cmd->add_option("--out", enc_flags.out, "output CSV path")->default_val("encircle.csv");

    // overlap-onset
    auto* onset_cmd = app.add_subcommand("overlap-onset",
                                         "Coupling at which adjacent mixing regions intersect");
    CommonFlags onset_flags;
    double v_min = 0.005, v_max = 0.04, onset_threshold = 0.25;
    int v_steps = 15;
    onset_cmd->add_option("--config", onset_flags.config, "family config (JSON)")->required();
    onset_cmd->add_option("--v-min", v_min, "smallest coupling sample")->required();
    onset_cmd->add_option("--v-max", v_max, "largest coupling sample")->required();
    onset_cmd->add_option("--v-steps", v_steps, "number of samples");
    onset_cmd->add_option("--threshold", onset_threshold, "mixing threshold on |b^2|");
    onset_cmd->add_option("--out", onset_flags.out, "output CSV path")->default_val("onset.csv");

    // mixing
    auto* mix_cmd = app.add_subcommand("mixing", "Single-point eigensystem diagnostics");
    CommonFlags mix_flags;
    std::string mix_a = "0";
    mix_cmd->add_option("--config", mix_flags.config, "family config (JSON)")->required();
    mix_cmd->add_option("--a", mix_a, "parameter value re[,im]")->required();
    mix_cmd->add_option("--out", mix_flags.out, "output CSV path")->default_val("mixing.csv");

    try {
        app.parse(argc, argv);

        if (sweep_cmd->parsed()) {
            const bp::FamilySpec spec = load_config(sweep_flags.config);
            const auto records = bp::sweep(spec, sweep_from, sweep_to, sweep_steps,
                                           sweep_adaptive);
            for (std::size_t k = 1; k < records.size(); ++k)
                if (records[k].label_swap)
                    std::cerr << "note: label swap at a = " << records[k].a << "\n";
            std::vector<std::string> outputs{sweep_flags.out};
            write_file(sweep_flags.out, bp::sweep_csv(spec, records));
            if (sweep_svg) {
                const fs::path dir = fs::path(sweep_flags.out).parent_path();
                const std::string energies = (dir / "energies.svg").string();
                const std::string mixing = (dir / "mixing.svg").string();
                write_file(energies, bp::energies_svg(spec, records));
                write_file(mixing, bp::mixing_svg(spec, records));
                outputs.push_back(energies);
                outputs.push_back(mixing);
            }
            write_manifest("sweep", sweep_flags.config, spec,
                           {{"from", fmt(sweep_from)},
                            {"to", fmt(sweep_to)},
                            {"steps", bp::format_int(sweep_steps)},
                            {"adaptive", sweep_adaptive ? "true" : "false"},
                            {"svg", sweep_svg ? "true" : "false"}},
                           outputs);
        } else if (find_cmd->parsed()) {
            const bp::FamilySpec spec = load_config(find_flags.config);
            const bp::Complex seed = parse_complex_flag(find_seed, "--seed");
            const bp::BranchPoint point = bp::find_branch_point(spec, seed, find_tol);
            write_file(find_flags.out, bp::branch_points_csv({point}));
            write_manifest("find-ep", find_flags.config, spec,
                           {{"seed", find_seed}, {"tol", fmt(find_tol)}}, {find_flags.out});
        } else if (list_cmd->parsed()) {
            const bp::FamilySpec spec = load_config(list_flags.config);
            const auto result = bp::list_branch_points(spec, bp::Complex(re_min, im_min),
                                                       bp::Complex(re_max, im_max), list_grid);
            if (result.coupling_free)
                std::cerr << "note: coupling vanishes; discriminant factorizes into squared "
                             "diagonal differences and all crossings are real (see "
                             "unperturbed_crossings)\n";
            write_file(list_flags.out, bp::branch_points_csv(result.points));
            write_manifest("list-eps", list_flags.config, spec,
                           {{"re_min", fmt(re_min)},
                            {"re_max", fmt(re_max)},
                            {"im_min", fmt(im_min)},
                            {"im_max", fmt(im_max)},
                            {"grid", bp::format_int(list_grid)},
                            {"status", result.coupling_free
                                           ? "discriminant identically factorizable"
                                           : "searched"}},
                           {list_flags.out});
        } else if (enc_cmd->parsed()) {
            const bp::FamilySpec spec = load_config(enc_flags.config);
            const bp::Complex center = parse_complex_flag(enc_center, "--center");
            const auto result = bp::encircle(spec, center, enc_radius, enc_steps);
            write_file(enc_flags.out, bp::monodromy_csv(result));
            write_manifest("encircle", enc_flags.config, spec,
                           {{"center", enc_center},
                            {"radius", fmt(enc_radius)},
                            {"steps", bp::format_int(enc_steps)}},
                           {enc_flags.out});
        } else if (onset_cmd->parsed()) {
            const bp::FamilySpec spec = load_config(onset_flags.config);
            if (v_steps < 2)
                throw bp::ConfigError("--v-steps must be >= 2");
            std::vector<double> v_values(v_steps);
            for (int k = 0; k < v_steps; ++k)
                v_values[k] = v_min + (v_max - v_min) * static_cast<double>(k) / (v_steps - 1);
            const auto result = bp::overlap_onset(spec, v_values, onset_threshold);
            const std::string samples_path =
                (fs::path(onset_flags.out).parent_path() / "onset_samples.csv").string();
            write_file(onset_flags.out, bp::onset_csv(result, v_min, v_max));
            write_file(samples_path, bp::onset_samples_csv(result));
            write_manifest("overlap-onset", onset_flags.config, spec,
                           {{"v_min", fmt(v_min)},
                            {"v_max", fmt(v_max)},
                            {"v_steps", bp::format_int(v_steps)},
                            {"threshold", fmt(onset_threshold)}},
                           {onset_flags.out, samples_path});
            if (!result.reached)
                std::cerr << "note: overlap onset not reached within the sampled range\n";
        } else if (mix_cmd->parsed()) {
            const bp::FamilySpec spec = load_config(mix_flags.config);
            const bp::Complex a = parse_complex_flag(mix_a, "--a");
            const bp::EigenSystem sys = bp::eigendecompose_at(spec, a);
            const bp::BiorthMetrics metrics = bp::biorthogonality_metrics(sys);
            std::cerr << "max_norm = " << metrics.max_norm
                      << ", max |Re <Phi_R'|Phi_R>| off-diagonal = " << metrics.max_offdiag_real
                      << "\n";
            write_file(mix_flags.out, bp::mixing_csv(spec, sys));
            write_manifest("mixing", mix_flags.config, spec, {{"a", mix_a}}, {mix_flags.out});
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const bp::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const bp::CertificationError& e) {
        std::cerr << "certification failure: " << e.what() << "\n";
        return 4;
    } catch (const bp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
