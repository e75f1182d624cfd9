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

#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "certify.hpp"
#include "dissim.hpp"
#include "errors.hpp"
#include "qstate.hpp"
#include "rng.hpp"
#include "sampler.hpp"

namespace qhash {

using json = nlohmann::ordered_json;

inline constexpr int kMaxIngestQubits = 64;
inline constexpr const char* kIndexConvention = "msb-first";

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    return out;
}

inline json read_json_file(const std::string& path) {
    auto in = open_input(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write to '" + path + "' failed");
}

/// Fixed-precision decimal with enough digits to round-trip a double.
inline std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

/// Fully resolved parameters of one command invocation.
struct RunConfig {
    std::string command;
    json params = json::object();

    json to_json() const {
        json j;
        j["command"] = command;
        j["rng"] = kRngAlgorithm;
        j["params"] = params;
        return j;
    }

    std::string hash() const { return hex64(fnv1a64(to_json().dump())); }
};

// ---------------------------------------------------------------------------
// State dumps
// ---------------------------------------------------------------------------

inline json state_to_json(const Statevector& s) {
    json j;
    j["n_qubits"] = s.n_qubits();
    j["index_convention"] = kIndexConvention;
    json amps = json::array();
    for (const auto& a : s.amplitudes()) {
        amps.push_back(a.real());
        amps.push_back(a.imag());
    }
    j["amplitudes"] = std::move(amps);
    return j;
}

inline Statevector state_from_json(const json& j) {
    try {
        if (j.at("index_convention").get<std::string>() != kIndexConvention) {
            throw FormatError("unsupported index convention '" + j.at("index_convention").get<std::string>() + "'");
        }
        const int n = j.at("n_qubits").get<int>();
        const auto& flat = j.at("amplitudes");
        if (n < 1 || n > kMaxQubits) throw FormatError("n_qubits out of range");
        if (flat.size() != (std::size_t{2} << n)) throw FormatError("amplitude list length does not match n_qubits");
        std::vector<complex> amps(std::size_t{1} << n);
        for (std::size_t i = 0; i < amps.size(); ++i) {
            amps[i] = {flat[2 * i].get<double>(), flat[2 * i + 1].get<double>()};
        }
        return init_from_amplitudes(amps, NormPolicy::Strict);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed state dump: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("malformed state dump: ") + e.what());
    }
}

inline void save_state(const std::string& path, const Statevector& s, const std::optional<RunConfig>& rc = {}) {
    json j = state_to_json(s);
    if (rc) {
        j["config"] = rc->to_json();
        j["config_hash"] = rc->hash();
    }
    write_json_file(path, j);
}

inline Statevector load_state(const std::string& path) { return state_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Bitstring wire format
// ---------------------------------------------------------------------------

/// One shot per line, N characters of 0/1 with qubit 0 leftmost. '#' lines carry
/// "key value" metadata and are otherwise ignored.
inline void write_bitstrings(std::ostream& out, const BitstringArray& arr) {
    arr.validate();
    const auto& c = arr.config;
    out << "# qhash bitstrings v1\n";
    out << "# basis " << arr.basis_tag << '\n';
    out << "# seed " << arr.seed_record << '\n';
    out << "# n_qubits " << arr.n_qubits << '\n';
    out << "# n_shots " << arr.n_shots << '\n';
    out << "# rng " << kRngAlgorithm << '\n';
    if (arr.basis_tag == "Random") {
        out << "# angle_sampling " << to_string(c.angle_sampling) << '\n';
        out << "# shared_rotation " << (c.shared_rotation_per_shot ? 1 : 0) << '\n';
        out << "# angle_ranges";
        for (const auto& r : c.angle_ranges) out << ' ' << format_double(r.lo) << ' ' << format_double(r.hi);
        out << '\n';
    }
    std::string line(static_cast<std::size_t>(arr.n_qubits), '0');
    for (int i = 0; i < arr.n_shots; ++i) {
        const auto s = arr.shot(i);
        for (int q = 0; q < arr.n_qubits; ++q) line[q] = s[q] > 0 ? '1' : '0';
        out << line << '\n';
    }
}

inline void save_bitstrings(const std::string& path, const BitstringArray& arr) {
    auto out = open_output(path);
    write_bitstrings(out, arr);
    if (!out) throw IoError("write to '" + path + "' failed");
}

struct IngestedDataset {
    int n_qubits = 0;
    int n_shots = 0;
    /// Row-major +-1 values, bit 0 -> -1.
    std::vector<std::int8_t> values;
    std::string basis_tag = "Z";
    std::optional<std::uint64_t> seed;
    std::optional<MeasurementConfig> config;
    std::string source;

    BitstringArray to_array() const {
        BitstringArray a;
        a.n_qubits = n_qubits;
        a.n_shots = n_shots;
        a.values = values;
        a.basis_tag = basis_tag;
        a.seed_record = seed.value_or(0);
        if (config) {
            a.config = *config;
        } else {
            a.config.n_shots = n_shots;
            a.config.seed = a.seed_record;
            a.config.basis = basis_tag == "Random" ? Basis::Random : Basis::Z;
        }
        return a;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

inline IngestedDataset parse_bitstrings(std::istream& in, const std::string& source = "<stream>") {
    IngestedDataset ds;
    ds.source = source;
    std::optional<Basis> basis;
    std::optional<AngleSampling> angle_sampling;
    std::optional<bool> shared;
    std::optional<std::array<Interval, 3>> ranges;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = detail::trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ss(line.substr(1));
            std::string key;
            ss >> key;
            try {
                if (key == "basis") {
                    ss >> ds.basis_tag;
                    if (ds.basis_tag == "Z" || ds.basis_tag == "Random") basis = basis_from_string(ds.basis_tag);
                } else if (key == "seed") {
                    std::uint64_t seed = 0;
                    if (!(ss >> seed)) throw FormatError("bad seed header", line_no);
                    ds.seed = seed;
                } else if (key == "angle_sampling") {
                    std::string v;
                    ss >> v;
                    angle_sampling = angle_sampling_from_string(v);
                } else if (key == "shared_rotation") {
                    int v = 0;
                    if (!(ss >> v)) throw FormatError("bad shared_rotation header", line_no);
                    shared = v != 0;
                } else if (key == "angle_ranges") {
                    std::array<Interval, 3> r{};
                    for (auto& iv : r) {
                        if (!(ss >> iv.lo >> iv.hi)) throw FormatError("bad angle_ranges header", line_no);
                    }
                    ranges = r;
                }
            } catch (const std::invalid_argument& e) {
                throw FormatError(e.what(), line_no);
            }
            continue;
        }
        if (ds.n_shots == 0) {
            if (line.size() > static_cast<std::size_t>(kMaxIngestQubits)) {
                throw FormatError("rows longer than " + std::to_string(kMaxIngestQubits) + " bits are not supported",
                                  line_no);
            }
            ds.n_qubits = static_cast<int>(line.size());
        } else if (line.size() != static_cast<std::size_t>(ds.n_qubits)) {
            throw FormatError("row has " + std::to_string(line.size()) + " bits, expected " +
                                  std::to_string(ds.n_qubits),
                              line_no);
        }
        for (std::size_t q = 0; q < line.size(); ++q) {
            const char c = line[q];
            if (c != '0' && c != '1') {
                throw FormatError(std::string("illegal character '") + c + "' in column " + std::to_string(q + 1),
                                  line_no);
            }
            ds.values.push_back(c == '1' ? std::int8_t{1} : std::int8_t{-1});
        }
        ++ds.n_shots;
    }
    if (ds.n_shots == 0) throw FormatError("'" + source + "' contains no bitstrings");
    if (basis) {
        MeasurementConfig c;
        c.basis = *basis;
        c.n_shots = ds.n_shots;
        c.seed = ds.seed.value_or(0);
        if (angle_sampling) c.angle_sampling = *angle_sampling;
        if (shared) c.shared_rotation_per_shot = *shared;
        if (ranges) c.angle_ranges = *ranges;
        ds.config = c;
    }
    return ds;
}

inline IngestedDataset ingest_bitstrings(const std::string& path) {
    auto in = open_input(path);
    return parse_bitstrings(in, path);
}

// ---------------------------------------------------------------------------
// Profiles and signatures
// ---------------------------------------------------------------------------

/// Rows (basis, k, D_k) and a closing (basis, total, D) row. k labels the pair (k, k+1).
inline void write_profile_csv(std::ostream& out, const DissimilarityProfile& p, bool header = true) {
    if (header) out << "basis,k,D_k\n";
    for (std::size_t k = 0; k < p.partial.size(); ++k) out << p.basis_tag << ',' << k << ',' << format_double(p.partial[k]) << '\n';
    out << p.basis_tag << ",total," << format_double(p.total) << '\n';
}

inline json coarse_grain_to_json(const CoarseGrainConfig& cg) {
    json j;
    j["lambda"] = cg.lambda;
    j["k_max"] = cg.k_max ? json(*cg.k_max) : json(nullptr);
    j["include_k0_in_total"] = cg.include_k0_in_total;
    j["allow_truncation"] = cg.allow_truncation;
    return j;
}

inline CoarseGrainConfig coarse_grain_from_json(const json& j) {
    CoarseGrainConfig cg;
    cg.lambda = j.at("lambda").get<int>();
    if (!j.at("k_max").is_null()) cg.k_max = j.at("k_max").get<int>();
    cg.include_k0_in_total = j.at("include_k0_in_total").get<bool>();
    cg.allow_truncation = j.at("allow_truncation").get<bool>();
    return cg;
}

inline json profile_to_json(const DissimilarityProfile& p) {
    json j;
    j["basis"] = p.basis_tag;
    j["lambda"] = p.lambda;
    j["length"] = p.length;
    j["seed"] = p.seed;
    j["include_k0_in_total"] = p.include_k0_in_total;
    j["partial"] = p.partial;
    j["total"] = p.total;
    j["warnings"] = p.warnings;
    return j;
}

inline DissimilarityProfile profile_from_json(const json& j) {
    DissimilarityProfile p;
    p.basis_tag = j.at("basis").get<std::string>();
    p.lambda = j.at("lambda").get<int>();
    p.length = j.at("length").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.include_k0_in_total = j.at("include_k0_in_total").get<bool>();
    p.partial = j.at("partial").get<std::vector<double>>();
    p.total = j.at("total").get<double>();
    p.warnings = j.at("warnings").get<std::vector<std::string>>();
    return p;
}

inline json measurement_to_json(const MeasurementConfig& c) {
    json j;
    j["basis"] = to_string(c.basis);
    j["n_shots"] = c.n_shots;
    j["seed"] = c.seed;
    if (c.basis == Basis::Random) {
        j["angle_sampling"] = to_string(c.angle_sampling);
        j["shared_rotation_per_shot"] = c.shared_rotation_per_shot;
        json r = json::array();
        for (const auto& iv : c.angle_ranges) r.push_back({iv.lo, iv.hi});
        j["angle_ranges"] = std::move(r);
    }
    return j;
}

inline MeasurementConfig measurement_from_json(const json& j) {
    MeasurementConfig c;
    c.basis = basis_from_string(j.at("basis").get<std::string>());
    c.n_shots = j.at("n_shots").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (c.basis == Basis::Random) {
        c.angle_sampling = angle_sampling_from_string(j.at("angle_sampling").get<std::string>());
        c.shared_rotation_per_shot = j.at("shared_rotation_per_shot").get<bool>();
        const auto& r = j.at("angle_ranges");
        for (std::size_t i = 0; i < 3; ++i) c.angle_ranges[i] = {r.at(i).at(0).get<double>(), r.at(i).at(1).get<double>()};
    }
    return c;
}

inline json signature_to_json(const HashSignature& s) {
    json j;
    j["format"] = "qhash-signature-v1";
    j["n_qubits"] = s.n_qubits;
    j["rng"] = kRngAlgorithm;
    j["coarse_grain"] = coarse_grain_to_json(s.coarse_grain);
    json bases = json::array();
    for (const auto& e : s.entries) {
        json b;
        b["basis"] = e.basis;
        b["measurement"] = measurement_to_json(e.config);
        b["profile"] = profile_to_json(e.profile);
        bases.push_back(std::move(b));
    }
    j["bases"] = std::move(bases);
    return j;
}

inline HashSignature signature_from_json(const json& j) {
    try {
        if (j.at("format").get<std::string>() != "qhash-signature-v1") throw FormatError("unknown signature format");
        HashSignature s;
        s.n_qubits = j.at("n_qubits").get<int>();
        s.coarse_grain = coarse_grain_from_json(j.at("coarse_grain"));
        for (const auto& b : j.at("bases")) {
            s.entries.push_back({b.at("basis").get<std::string>(), measurement_from_json(b.at("measurement")),
                                 profile_from_json(b.at("profile"))});
        }
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed signature: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("malformed signature: ") + e.what());
    }
}

inline HashSignature load_signature(const std::string& path) { return signature_from_json(read_json_file(path)); }

inline json verdict_to_json(const Verdict& v) {
    json j;
    j["verdict"] = v.pass ? "pass" : "fail";
    j["distance"] = v.distance;
    j["threshold"] = v.threshold;
    json r = json::object();
    for (const auto& [basis, res] : v.residuals) r[basis] = res;
    j["residuals"] = std::move(r);
    return j;
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

inline void write_map_csv(std::ostream& out, const std::vector<MapPoint>& points) {
    out << "label,D_z,D_r\n";
    for (const auto& p : points) out << p.label << ',' << format_double(p.d_z) << ',' << format_double(p.d_r) << '\n';
}

/// Ground-state columns (param, D_z, D_r, dD_z, flags); SS scans append the first-excited
/// D_z and D_r. Flags list the transitions attributed to the row, separated by ';'.
inline void write_scan_csv(std::ostream& out, const ScanResult& scan) {
    const bool excited = !scan.points.empty() && scan.points.front().excited.has_value();
    out << "param,D_z,D_r,dD_z,flags";
    if (excited) out << ",D_z_excited,D_r_excited";
    out << '\n';
    const auto& dz = scan.ground_derivative.at("Z");
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
        const auto& p = scan.points[i];
        std::string flags;
        for (const auto& t : scan.transitions) {
            const bool here = scan.model == Model::TFIM
                                  ? t.location == p.param
                                  : (i + 1 < scan.points.size() && t.location > p.param &&
                                     t.location < scan.points[i + 1].param);
            if (!here) continue;
            if (!flags.empty()) flags += ';';
            flags += (scan.model == Model::TFIM ? "peak:" : "jump-after:") + t.state + ":" + t.basis;
        }
        out << format_double(p.param) << ',' << format_double(p.ground.at("Z").profile.total) << ','
            << format_double(p.ground.at("Random").profile.total) << ',' << format_double(dz[i]) << ',' << flags;
        if (excited) {
            out << ',' << format_double(p.excited->at("Z").profile.total) << ','
                << format_double(p.excited->at("Random").profile.total);
        }
        out << '\n';
    }
}

/// One row per computed level: (param, level_index, energy, sector).
inline void write_spectrum_csv(std::ostream& out, const ScanResult& scan) {
    const char* sector = scan.model == Model::SS ? "Sz=0" : "full";
    out << "param,level_index,energy,sector\n";
    for (const auto& p : scan.points) {
        for (std::size_t i = 0; i < p.energies.size(); ++i) {
            out << format_double(p.param) << ',' << i << ',' << format_double(p.energies[i]) << ',' << sector << '\n';
        }
    }
}

inline void write_shots_csv(std::ostream& out, const std::vector<ShotsRow>& rows) {
    out << "shots,k,mean,std\n";
    for (const auto& r : rows) {
        for (std::size_t k = 0; k < r.partial_mean.size(); ++k) {
            out << r.shots << ',' << k << ',' << format_double(r.partial_mean[k]) << ',' << format_double(r.partial_std[k])
                << '\n';
        }
        out << r.shots << ",total," << format_double(r.total_mean) << ',' << format_double(r.total_std) << '\n';
    }
}

}  // namespace qhash
