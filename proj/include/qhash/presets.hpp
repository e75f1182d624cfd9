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

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "qstate.hpp"
#include "rng.hpp"
#include "spectra.hpp"

namespace qhash {

/// A named state recipe; `build` is deterministic.
struct PresetState {
    std::string label;
    std::string family;
    std::function<Statevector()> build;
};

inline std::string preset_label(const std::string& family, const std::string& key, double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%s=%.4g", family.c_str(), key.c_str(), value);
    return buf;
}

inline Statevector tfim_ground_state(int n, double j, double h) {
    LanczosOptions opt;
    opt.start = std::vector<double>(std::size_t{1} << n, 1.0);
    return select_state(lowest_eigenpairs(build_tfim(n, j, h), 1, std::nullopt, opt), WhichState::Ground);
}

inline Statevector ss_state(const BondList& bonds, double j1, double j2, WhichState which) {
    LanczosOptions opt;
    opt.start = reference_start(bonds.n_sites, 0.0);
    const int levels = which == WhichState::Ground ? 1 : 2;
    return select_state(lowest_eigenpairs(build_ss_supercell(bonds, j1, j2), levels, 0.0, opt), which);
}

/// The 16-qubit families of the dissimilarity map: product, cat sweep, Dicke sweep, uniform,
/// chaotic, transverse-field Ising grounds and Shastry-Sutherland grounds.
inline std::vector<PresetState> standard_families(const BondList& ss_bonds, std::uint64_t circuit_seed) {
    constexpr int n = 16;
    std::vector<PresetState> out;
    out.push_back({"trivial", "product", [] { return Statevector(n); }});
    for (int i = 1; i <= 4; ++i) {
        const double theta = i * std::numbers::pi / 8;
        out.push_back({preset_label("cat", "theta", theta), "cat", [theta] { return build_cat_state(n, theta); }});
    }
    for (int d : {1, 2, 4, 8}) {
        out.push_back({preset_label("dicke", "D", d), "dicke", [d] { return build_dicke_state(n, d); }});
    }
    out.push_back({"uniform", "uniform", [] { return build_uniform_state(n); }});
    out.push_back({"haar", "chaotic", [circuit_seed] { return run_circuit(build_random_circuit(n, 19, circuit_seed)); }});
    for (double h : {0.25, 0.5, 1.0}) {
        out.push_back({preset_label("tfim", "h", h), "tfim", [h] { return tfim_ground_state(n, -1.0, h); }});
    }
    for (double j2 : {0.5, 0.8}) {
        out.push_back({preset_label("ss", "J2", j2), "ss", [ss_bonds, j2] {
                           return ss_state(ss_bonds, 1.0, j2, WhichState::Ground);
                       }});
    }
    return out;
}

}  // namespace qhash
