// Copyright 2026 The qhash Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qhash/certify.hpp"
#include "qhash/dissim.hpp"
#include "qhash/errors.hpp"
#include "qhash/io.hpp"
#include "qhash/presets.hpp"
#include "qhash/qstate.hpp"
#include "qhash/sampler.hpp"
#include "qhash/spectra.hpp"

#ifndef QHASH_DATA_DIR
#define QHASH_DATA_DIR "data"
#endif

namespace {

using namespace qhash;

constexpr int kExitDomain = 1;
constexpr int kExitIo = 2;

/// Writes to a file when a path is given, to stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) file_ = std::make_unique<std::ofstream>(open_output(path));
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }
    void finish(const std::string& path) {
        stream().flush();
        if (!stream()) throw IoError("write to '" + (path.empty() ? std::string("stdout") : path) + "' failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

/// Options that choose where results go or how fast they are computed, not what they are.
bool excluded_from_config(const std::string& name) {
    static const std::set<std::string> names{"help", "json", "config", "out", "spectrum", "signature", "threads"};
    return name.empty() || names.contains(name);
}

/// Every result-determining option of `cmd` with its resolved value (given or default).
RunConfig resolved_config(const CLI::App& cmd) {
    RunConfig rc;
    rc.command = cmd.get_name();
    for (const auto* opt : cmd.get_options()) {
        const std::string name = opt->get_single_name();
        if (excluded_from_config(name)) continue;
        if (opt->get_expected_max() == 0) {
            rc.params[name] = opt->count() > 0;
        } else if (opt->count() > 0) {
            const auto& r = opt->results();
            rc.params[name] = r.size() == 1 ? json(r.front()) : json(r);
        } else if (!opt->get_default_str().empty()) {
            rc.params[name] = opt->get_default_str();
        } else {
            rc.params[name] = nullptr;
        }
    }
    return rc;
}

void write_config_header(std::ostream& out, const RunConfig& rc) {
    out << "# config_hash " << rc.hash() << '\n';
    out << "# config " << rc.to_json().dump() << '\n';
}

std::vector<double> make_grid(double lo, double hi, double step) {
    if (!(step > 0.0) || !(hi >= lo)) throw std::invalid_argument("grid needs step > 0 and max >= min");
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid;
    for (std::size_t i = 0; i < n; ++i) grid.push_back(std::round((lo + static_cast<double>(i) * step) * 1e12) / 1e12);
    return grid;
}

CoarseGrainConfig coarse_grain(int lambda, int k_max, bool include_k0, bool no_truncation) {
    CoarseGrainConfig cg;
    cg.lambda = lambda;
    if (k_max > 0) cg.k_max = k_max;
    cg.include_k0_in_total = include_k0;
    cg.allow_truncation = !no_truncation;
    return cg;
}

struct CgOptions {
    int lambda = 2;
    int k_max = 0;
    bool include_k0 = false;
    bool no_truncation = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--lambda", lambda, "Coarse-graining block size")->check(CLI::Range(2, 1 << 20));
        cmd->add_option("--k-max", k_max, "Last scale pair (0 = all resolvable scales)")->check(CLI::NonNegativeNumber);
        cmd->add_flag("--include-k0", include_k0, "Include D_0 in the total");
        cmd->add_flag("--no-truncation", no_truncation, "Reject lengths that are not multiples of the coarsest block");
    }
    CoarseGrainConfig get() const { return coarse_grain(lambda, k_max, include_k0, no_truncation); }
};

void print_profile_table(std::ostream& out, const DissimilarityProfile& p) {
    out << "basis " << p.basis_tag << "  lambda " << p.lambda << "  L " << p.length << '\n';
    for (std::size_t k = 0; k < p.partial.size(); ++k) out << "  D_" << k << "  " << format_double(p.partial[k]) << '\n';
    out << "  D     " << format_double(p.total) << '\n';
    for (const auto& w : p.warnings) out << "  warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qhash: multiscale dissimilarity signatures of quantum states"};
    app.require_subcommand(1, 1);
    app.fallthrough();
    app.option_defaults()->always_capture_default();
    app.set_config("--config", "", "Read options from a TOML/INI file");
    bool json_out = false;
    app.add_flag("--json", json_out, "Machine-readable output (also for errors)");

    // state --------------------------------------------------------------------
    auto* state_cmd = app.add_subcommand("state", "Build a 16-qubit (or --n) state and dump it as JSON");
    std::string family;
    int n = 16, dicke_d = 1, cycles = 19;
    double theta = std::numbers::pi / 2, h = 0.5, j = -1.0, j1 = 1.0, j2 = 0.5;
    std::optional<std::uint64_t> state_seed;
    std::string bonds_path = std::string(QHASH_DATA_DIR) + "/shastry_sutherland_16.bonds";
    std::string state_out;
    state_cmd->add_option("family", family, "cat | dicke | uniform | random-circuit | tfim-ground | ss-ground | ss-excited")
        ->required()
        ->check(CLI::IsMember({"cat", "dicke", "uniform", "random-circuit", "tfim-ground", "ss-ground", "ss-excited"}));
    state_cmd->add_option("--n", n, "Qubits")->check(CLI::Range(1, kMaxQubits));
    state_cmd->add_option("--theta", theta, "Cat-state angle");
    state_cmd->add_option("--D", dicke_d, "Dicke excitations");
    state_cmd->add_option("--cycles", cycles, "Random-circuit cycles");
    state_cmd->add_option("--seed", state_seed, "Random-circuit seed");
    state_cmd->add_option("--field", h, "TFIM transverse field h");
    state_cmd->add_option("--J", j, "TFIM coupling");
    state_cmd->add_option("--j1", j1, "SS dimer coupling");
    state_cmd->add_option("--j2", j2, "SS inter-dimer coupling");
    state_cmd->add_option("--bonds", bonds_path, "SS bond list");
    state_cmd->add_option("-o,--out", state_out, "Output path (stdout when empty)");

    // sample -------------------------------------------------------------------
    auto* sample_cmd = app.add_subcommand("sample", "Measure a dumped state and write bitstrings");
    std::string sample_state, basis_name = "Z", angle_sampling = "area-uniform", sample_out;
    int shots = 8192;
    std::uint64_t seed = 0;
    bool per_qubit = false;
    sample_cmd->add_option("--state", sample_state, "State dump")->required();
    sample_cmd->add_option("--basis", basis_name, "Z or Random")->check(CLI::IsMember({"Z", "Random"}));
    sample_cmd->add_option("--shots", shots, "Shots")->check(CLI::PositiveNumber);
    sample_cmd->add_option("--seed", seed, "Sampling seed")->required();
    sample_cmd->add_option("--angle-sampling", angle_sampling, "area-uniform or parameter-uniform")
        ->check(CLI::IsMember({"area-uniform", "parameter-uniform"}));
    sample_cmd->add_flag("--per-qubit-rotation", per_qubit, "Independent rotation per qubit instead of one per shot");
    sample_cmd->add_option("-o,--out", sample_out, "Output path (stdout when empty)");

    // dissim -------------------------------------------------------------------
    auto* dissim_cmd = app.add_subcommand("dissim", "Dissimilarity profiles of bitstring files");
    std::vector<std::string> dissim_files;
    std::string dissim_out, dissim_signature;
    CgOptions dissim_cg;
    dissim_cmd->add_option("files", dissim_files, "Bitstring files")->required();
    dissim_cg.attach(dissim_cmd);
    dissim_cmd->add_option("-o,--out", dissim_out, "Profile CSV path");
    dissim_cmd->add_option("--signature", dissim_signature, "Also write a signature JSON (needs two bases)");

    // signature ----------------------------------------------------------------
    auto* sig_cmd = app.add_subcommand("signature", "Z and random-basis signature of a dumped state");
    std::string sig_state, sig_out;
    int sig_shots = 8192;
    std::uint64_t sig_seed = 0;
    CgOptions sig_cg;
    sig_cmd->add_option("--state", sig_state, "State dump")->required();
    sig_cmd->add_option("--shots", sig_shots, "Shots per basis")->check(CLI::PositiveNumber);
    sig_cmd->add_option("--seed", sig_seed, "Sampling seed")->required();
    sig_cg.attach(sig_cmd);
    sig_cmd->add_option("-o,--out", sig_out, "Signature JSON path (stdout when empty)");

    // scan ---------------------------------------------------------------------
    auto* scan_cmd = app.add_subcommand("scan", "Parameter scan of TFIM or Shastry-Sutherland eigenstates");
    std::string model_name;
    std::optional<double> pmin, pmax, pstep;
    int scan_n = 16, scan_shots = 8192;
    double scan_j = -1.0, scan_j1 = 1.0, jump_factor = 5.0, min_jump = 0.01;
    std::uint64_t scan_seed = 0;
    unsigned threads = std::max(1U, std::thread::hardware_concurrency());
    std::string scan_out, spectrum_out, scan_bonds = bonds_path;
    CgOptions scan_cg;
    scan_cmd->add_option("model", model_name, "tfim or ss")->required()->check(CLI::IsMember({"tfim", "ss"}));
    scan_cmd->add_option("--min,--hmin,--j2min", pmin, "First grid value (tfim 0.05, ss 0)");
    scan_cmd->add_option("--max,--hmax,--j2max", pmax, "Last grid value (tfim 1.0, ss 1.0)");
    scan_cmd->add_option("--step", pstep, "Grid step (tfim 0.05, ss 0.02)");
    scan_cmd->add_option("--n", scan_n, "TFIM sites")->check(CLI::Range(2, kMaxQubits));
    scan_cmd->add_option("--J", scan_j, "TFIM coupling");
    scan_cmd->add_option("--j1", scan_j1, "SS dimer coupling; the grid is J2/J1");
    scan_cmd->add_option("--bonds", scan_bonds, "SS bond list");
    scan_cmd->add_option("--shots", scan_shots, "Shots per basis and grid point")->check(CLI::PositiveNumber);
    scan_cmd->add_option("--seed", scan_seed, "Sampling seed, shared by all grid points")->required();
    scan_cmd->add_option("--jump-factor", jump_factor, "Jump threshold in units of the median step");
    scan_cmd->add_option("--min-jump", min_jump, "Smallest |Delta D| reported as a jump");
    scan_cmd->add_option("--threads", threads, "Grid points evaluated concurrently")->check(CLI::PositiveNumber);
    scan_cg.attach(scan_cmd);
    scan_cmd->add_option("-o,--out", scan_out, "Scan CSV path (stdout when empty)");
    scan_cmd->add_option("--spectrum", spectrum_out, "Energies CSV path");

    // map ----------------------------------------------------------------------
    auto* map_cmd = app.add_subcommand("map", "(D^z, D^r) coordinates of preset states or signature files");
    std::string preset, map_out, map_bonds = bonds_path;
    std::vector<std::string> map_files;
    int map_shots = 8192;
    std::uint64_t map_seed = 0;
    CgOptions map_cg;
    map_cmd->add_option("--preset", preset, "standard-families")->check(CLI::IsMember({"standard-families"}));
    map_cmd->add_option("signatures", map_files, "Signature JSON files (label = file stem)");
    map_cmd->add_option("--shots", map_shots, "Shots per basis")->check(CLI::PositiveNumber);
    map_cmd->add_option("--seed", map_seed, "Sampling seed (also seeds the chaotic circuit)");
    map_cmd->add_option("--bonds", map_bonds, "SS bond list");
    map_cg.attach(map_cmd);
    map_cmd->add_option("-o,--out", map_out, "Map CSV path (stdout when empty)");

    // certify ------------------------------------------------------------------
    auto* cert_cmd = app.add_subcommand("certify", "Compare a candidate signature with a target");
    std::string target_path, candidate_path;
    double threshold = kDefaultCertifyThreshold;
    cert_cmd->add_option("--target", target_path, "Target signature JSON")->required();
    cert_cmd->add_option("--candidate", candidate_path, "Candidate signature JSON")->required();
    cert_cmd->add_option("--threshold", threshold, "Largest distance that passes")->check(CLI::NonNegativeNumber);

    // porter-thomas ------------------------------------------------------------
    auto* pt_cmd = app.add_subcommand("porter-thomas", "Scaled-probability statistics against Exp(1)");
    std::string pt_state;
    pt_cmd->add_option("--state", pt_state, "State dump")->required();

    // shots --------------------------------------------------------------------
    auto* shots_cmd = app.add_subcommand("shots", "D and D_k against the number of shots");
    std::string shots_state, shots_basis = "Z", shots_out;
    std::vector<int> counts{256, 1024, 8192};
    int replicas = 16;
    std::uint64_t shots_seed = 0;
    CgOptions shots_cg;
    shots_cmd->add_option("--state", shots_state, "State dump")->required();
    shots_cmd->add_option("--basis", shots_basis, "Z or Random")->check(CLI::IsMember({"Z", "Random"}));
    shots_cmd->add_option("--counts", counts, "Ascending shot counts")->delimiter(',');
    shots_cmd->add_option("--replicas", replicas, "Seed replicas per count")->check(CLI::PositiveNumber);
    shots_cmd->add_option("--seed", shots_seed, "Base seed")->required();
    shots_cg.attach(shots_cmd);
    shots_cmd->add_option("-o,--out", shots_out, "CSV path (stdout when empty)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitDomain;
    }

    auto fail = [&](const char* kind, const std::string& message, int code) {
        if (json_out) {
            std::cout << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << '\n';
        } else {
            std::cerr << "qhash: " << message << '\n';
        }
        return code;
    };

    try {
        if (state_cmd->parsed()) {
            const RunConfig rc = resolved_config(*state_cmd);
            Statevector s(1);
            if (family == "cat") {
                s = build_cat_state(n, theta);
            } else if (family == "dicke") {
                s = build_dicke_state(n, dicke_d);
            } else if (family == "uniform") {
                s = build_uniform_state(n);
            } else if (family == "random-circuit") {
                if (!state_seed) throw std::invalid_argument("random-circuit needs --seed");
                s = run_circuit(build_random_circuit(n, cycles, *state_seed));
            } else if (family == "tfim-ground") {
                s = tfim_ground_state(n, j, h);
            } else {
                const auto bonds = load_bond_list(bonds_path);
                s = ss_state(bonds, j1, j2, family == "ss-ground" ? WhichState::Ground : WhichState::FirstExcited);
            }
            json dump = state_to_json(s);
            dump["config"] = rc.to_json();
            dump["config_hash"] = rc.hash();
            if (state_out.empty()) {
                std::cout << dump.dump() << '\n';
            } else {
                write_json_file(state_out, dump);
                const double entropy = s.n_qubits() % 2 == 0 ? half_cut_entropy(s) : std::nan("");
                if (json_out) {
                    std::cout << json{{"out", state_out}, {"n_qubits", s.n_qubits()}, {"half_cut_entropy", entropy},
                                      {"config_hash", rc.hash()}}
                                     .dump()
                              << '\n';
                } else {
                    std::cout << family << ": " << s.n_qubits() << " qubits -> " << state_out
                              << "\n  half-cut entropy " << format_double(entropy) << " bits\n";
                }
            }
        } else if (sample_cmd->parsed()) {
            const RunConfig rc = resolved_config(*sample_cmd);
            const auto s = load_state(sample_state);
            MeasurementConfig mc{basis_from_string(basis_name), shots, seed};
            mc.angle_sampling = angle_sampling_from_string(angle_sampling);
            mc.shared_rotation_per_shot = !per_qubit;
            const auto arr = sample(s, mc);
            Sink sink(sample_out);
            write_config_header(sink.stream(), rc);
            write_bitstrings(sink.stream(), arr);
            sink.finish(sample_out);
        } else if (dissim_cmd->parsed()) {
            const RunConfig rc = resolved_config(*dissim_cmd);
            const auto cg = dissim_cg.get();
            HashSignature sig;
            sig.coarse_grain = cg;
            for (const auto& path : dissim_files) {
                const auto arr = ingest_bitstrings(path).to_array();
                sig.n_qubits = arr.n_qubits;
                sig.entries.push_back({arr.basis_tag, arr.config, dissimilarity_profile(arr, cg)});
            }
            if (!dissim_out.empty()) {
                Sink sink(dissim_out);
                write_config_header(sink.stream(), rc);
                bool header = true;
                for (const auto& e : sig.entries) {
                    write_profile_csv(sink.stream(), e.profile, header);
                    header = false;
                }
                sink.finish(dissim_out);
            }
            if (!dissim_signature.empty()) {
                sig.validate();
                json j = signature_to_json(sig);
                j["config_hash"] = rc.hash();
                write_json_file(dissim_signature, j);
            }
            if (json_out) {
                json arr = json::array();
                for (const auto& e : sig.entries) arr.push_back(profile_to_json(e.profile));
                std::cout << json{{"config_hash", rc.hash()}, {"profiles", arr}}.dump() << '\n';
            } else if (dissim_out.empty()) {
                for (const auto& e : sig.entries) print_profile_table(std::cout, e.profile);
            }
        } else if (sig_cmd->parsed()) {
            const RunConfig rc = resolved_config(*sig_cmd);
            const auto sig = compute_signature(load_state(sig_state), default_bases(sig_shots, sig_seed), sig_cg.get());
            json j = signature_to_json(sig);
            j["config"] = rc.to_json();
            j["config_hash"] = rc.hash();
            if (sig_out.empty()) {
                std::cout << j.dump(2) << '\n';
            } else {
                write_json_file(sig_out, j);
                if (!json_out) {
                    for (const auto& e : sig.entries) print_profile_table(std::cout, e.profile);
                }
            }
        } else if (scan_cmd->parsed()) {
            RunConfig rc = resolved_config(*scan_cmd);
            ScanConfig sc;
            sc.model = model_name == "tfim" ? Model::TFIM : Model::SS;
            const bool tfim = sc.model == Model::TFIM;
            const double lo = pmin.value_or(tfim ? 0.05 : 0.0);
            const double hi = pmax.value_or(1.0);
            const double step = pstep.value_or(tfim ? 0.05 : 0.02);
            rc.params["min"] = lo;
            rc.params["max"] = hi;
            rc.params["step"] = step;
            sc.grid = make_grid(lo, hi, step);
            sc.bases = default_bases(scan_shots, scan_seed);
            sc.coarse_grain = scan_cg.get();
            sc.n_sites = scan_n;
            sc.tfim_j = scan_j;
            sc.ss_j1 = scan_j1;
            if (!tfim) {
                sc.bonds = load_bond_list(scan_bonds);
                sc.n_sites = sc.bonds.n_sites;
            }
            sc.jump_factor = jump_factor;
            sc.min_jump = min_jump;
            sc.threads = threads;
            const auto result = phase_scan(sc);
            {
                Sink sink(scan_out);
                write_config_header(sink.stream(), rc);
                write_scan_csv(sink.stream(), result);
                sink.finish(scan_out);
            }
            if (!spectrum_out.empty()) {
                Sink sink(spectrum_out);
                write_config_header(sink.stream(), rc);
                write_spectrum_csv(sink.stream(), result);
                sink.finish(spectrum_out);
            }
            if (json_out) {
                json t = json::array();
                for (const auto& tr : result.transitions) {
                    t.push_back({{"state", tr.state}, {"basis", tr.basis}, {"location", tr.location},
                                 {"magnitude", tr.magnitude}});
                }
                std::cerr << json{{"config_hash", rc.hash()}, {"transitions", t}}.dump() << '\n';
            } else if (!scan_out.empty()) {
                for (const auto& tr : result.transitions) {
                    std::cout << tr.state << ' ' << tr.basis << ' ' << (tfim ? "peak at " : "jump at ")
                              << format_double(tr.location) << " (" << format_double(tr.magnitude) << ")\n";
                }
            }
        } else if (map_cmd->parsed()) {
            const RunConfig rc = resolved_config(*map_cmd);
            std::vector<LabeledSignature> sigs;
            if (!preset.empty()) {
                if (map_cmd->count("--seed") == 0) throw std::invalid_argument("--preset needs --seed");
                const auto presets = standard_families(load_bond_list(map_bonds), derive_seed(map_seed, 2));
                for (const auto& p : presets) {
                    sigs.push_back({p.label, compute_signature(p.build(), default_bases(map_shots, map_seed), map_cg.get())});
                }
            }
            for (const auto& path : map_files) {
                sigs.push_back({std::filesystem::path(path).stem().string(), load_signature(path)});
            }
            if (sigs.empty()) throw std::invalid_argument("map needs --preset or signature files");
            const auto points = dissimilarity_map(sigs);
            if (json_out && map_out.empty()) {
                json arr = json::array();
                for (const auto& p : points) arr.push_back({{"label", p.label}, {"D_z", p.d_z}, {"D_r", p.d_r}});
                std::cout << json{{"config_hash", rc.hash()}, {"points", arr}}.dump() << '\n';
            } else {
                Sink sink(map_out);
                write_config_header(sink.stream(), rc);
                write_map_csv(sink.stream(), points);
                sink.finish(map_out);
            }
        } else if (cert_cmd->parsed()) {
            const RunConfig rc = resolved_config(*cert_cmd);
            const auto v = certify(load_signature(candidate_path), load_signature(target_path), threshold);
            json j = verdict_to_json(v);
            j["config_hash"] = rc.hash();
            std::cout << j.dump(json_out ? -1 : 2) << '\n';
        } else if (pt_cmd->parsed()) {
            const auto r = porter_thomas_check(load_state(pt_state));
            if (json_out) {
                std::cout << json{{"ks_distance", r.ks_distance}, {"mean", r.mean}, {"variance", r.variance}}.dump()
                          << '\n';
            } else {
                std::cout << "KS distance " << format_double(r.ks_distance) << "\nmean        " << format_double(r.mean)
                          << "\nvariance    " << format_double(r.variance) << '\n';
            }
        } else if (shots_cmd->parsed()) {
            const RunConfig rc = resolved_config(*shots_cmd);
            const auto rows = shots_sensitivity(load_state(shots_state), basis_from_string(shots_basis), counts, replicas,
                                                shots_seed, shots_cg.get());
            Sink sink(shots_out);
            write_config_header(sink.stream(), rc);
            write_shots_csv(sink.stream(), rows);
            sink.finish(shots_out);
        }
    } catch (const FormatError& e) {
        return fail("format", e.what(), kExitIo);
    } catch (const IoError& e) {
        return fail("io", e.what(), kExitIo);
    } catch (const std::invalid_argument& e) {
        return fail("domain", e.what(), kExitDomain);
    } catch (const std::out_of_range& e) {
        return fail("domain", e.what(), kExitDomain);
    } catch (const std::domain_error& e) {
        return fail("domain", e.what(), kExitDomain);
    } catch (const ConvergenceError& e) {
        return fail("convergence", e.what(), kExitDomain);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), kExitDomain);
    }
    return 0;
}
