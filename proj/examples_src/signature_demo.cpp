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

// Builds a few 12-qubit states, computes their two-basis signatures, and certifies a
// freshly sampled copy of one of them against each target.

#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "qhash/certify.hpp"

int main() {
    using namespace qhash;
    constexpr int n = 12;
    constexpr int shots = 4096;

    const std::vector<std::pair<std::string, Statevector>> states{
        {"product", Statevector(n)},
        {"ghz", build_cat_state(n, std::numbers::pi / 2)},
        {"dicke-4", build_dicke_state(n, 4)},
        {"uniform", build_uniform_state(n)},
        {"chaotic", run_circuit(build_random_circuit(n, 19, 1))},
    };

    std::vector<LabeledSignature> targets;
    for (const auto& [label, state] : states) {
        targets.push_back({label, compute_signature(state, default_bases(shots, 1))});
    }

    std::printf("%-10s %8s %8s %10s\n", "state", "D^z", "D^r", "S(half)");
    const auto map = dissimilarity_map(targets);
    for (std::size_t i = 0; i < map.size(); ++i) {
        std::printf("%-10s %8.4f %8.4f %10.4f\n", map[i].label.c_str(), map[i].d_z, map[i].d_r,
                    half_cut_entropy(states[i].second));
    }

    const auto candidate = compute_signature(states[4].second, default_bases(shots, 2));
    std::printf("\nfresh sample of 'chaotic' against each target (threshold %.2f):\n", kDefaultCertifyThreshold);
    for (const auto& t : targets) {
        const auto v = certify(candidate, t.signature);
        std::printf("  %-10s distance %.4f  %s\n", t.label.c_str(), v.distance, v.pass ? "pass" : "fail");
    }
    return 0;
}
