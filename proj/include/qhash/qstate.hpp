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

#include <array>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rng.hpp"

namespace qhash {

using complex = std::complex<double>;

/// Dense simulation is capped here; larger registers enter only as bitstring files.
inline constexpr int kMaxQubits = 24;

/// Row-major 2x2 complex matrix {m00, m01, m10, m11}.
using Mat2 = std::array<complex, 4>;

enum class GateKind { U3, H, X, SqrtX, SqrtY, T, CNOT, CZ };

inline constexpr bool is_two_qubit(GateKind kind) noexcept {
    return kind == GateKind::CNOT || kind == GateKind::CZ;
}

inline std::string to_string(GateKind kind);

/// One gate application. For CNOT, targets[0] is the control.
struct GateOp {
    GateKind kind = GateKind::H;
    std::array<int, 2> targets{0, -1};
    double theta = 0.0;
    double phi = 0.0;
    double lambda = 0.0;

    static GateOp u3(int q, double theta, double phi, double lambda) {
        return {GateKind::U3, {q, -1}, theta, phi, lambda};
    }
    static GateOp single(GateKind kind, int q) { return {kind, {q, -1}}; }
    static GateOp h(int q) { return single(GateKind::H, q); }
    static GateOp x(int q) { return single(GateKind::X, q); }
    static GateOp sqrt_x(int q) { return single(GateKind::SqrtX, q); }
    static GateOp sqrt_y(int q) { return single(GateKind::SqrtY, q); }
    static GateOp t(int q) { return single(GateKind::T, q); }
    static GateOp cnot(int control, int target) { return {GateKind::CNOT, {control, target}}; }
    static GateOp cz(int a, int b) { return {GateKind::CZ, {a, b}}; }

    friend bool operator==(const GateOp&, const GateOp&) = default;
};

inline Mat2 u3_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    return {complex{c, 0.0}, -std::polar(s, lambda), std::polar(s, phi), std::polar(c, phi + lambda)};
}

/// Matrix of a single-qubit gate. Throws for two-qubit kinds and non-finite U3 angles.
inline Mat2 gate_matrix(const GateOp& gate) {
    using std::numbers::sqrt2;
    constexpr complex i{0.0, 1.0};
    switch (gate.kind) {
        case GateKind::U3:
            if (!std::isfinite(gate.theta) || !std::isfinite(gate.phi) || !std::isfinite(gate.lambda)) {
                throw std::invalid_argument("U3 gate with non-finite angle");
            }
            return u3_matrix(gate.theta, gate.phi, gate.lambda);
        case GateKind::H:
            return {1 / sqrt2, 1 / sqrt2, 1 / sqrt2, -1 / sqrt2};
        case GateKind::X:
            return {0.0, 1.0, 1.0, 0.0};
        case GateKind::SqrtX:
            return {(1.0 + i) / 2.0, (1.0 - i) / 2.0, (1.0 - i) / 2.0, (1.0 + i) / 2.0};
        case GateKind::SqrtY:
            return {(1.0 + i) / 2.0, (-1.0 - i) / 2.0, (1.0 + i) / 2.0, (1.0 + i) / 2.0};
        case GateKind::T:
            return {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4)};
        case GateKind::CNOT:
        case GateKind::CZ:
            break;
    }
    throw std::invalid_argument("gate_matrix: " + to_string(gate.kind) + " is not a single-qubit gate");
}

inline std::string to_string(GateKind kind) {
    switch (kind) {
        case GateKind::U3: return "U3";
        case GateKind::H: return "H";
        case GateKind::X: return "X";
        case GateKind::SqrtX: return "SqrtX";
        case GateKind::SqrtY: return "SqrtY";
        case GateKind::T: return "T";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CZ: return "CZ";
    }
    return "?";
}

/// Dense pure state over n qubits.
///
/// Index convention: bitstring x_0 x_1 ... x_{N-1} maps to sum_q x_q 2^{N-1-q},
/// i.e. qubit 0 is the most significant bit and the leftmost character.
class Statevector {
public:
    /// |0...0> on n qubits.
    explicit Statevector(int n_qubits) : n_qubits_(checked_qubits(n_qubits)), amps_(std::size_t{1} << n_qubits) {
        amps_[0] = 1.0;
    }

    /// Takes ownership of amplitudes that are already normalized to 1e-10.
    Statevector(int n_qubits, std::vector<complex> amplitudes)
        : n_qubits_(checked_qubits(n_qubits)), amps_(std::move(amplitudes)) {
        if (amps_.size() != (std::size_t{1} << n_qubits_)) {
            throw std::invalid_argument("amplitude count " + std::to_string(amps_.size()) + " is not 2^" +
                                        std::to_string(n_qubits_));
        }
        if (std::abs(norm_squared() - 1.0) > 1e-10) {
            throw std::invalid_argument("amplitudes are not normalized");
        }
    }

    int n_qubits() const noexcept { return n_qubits_; }
    std::size_t dim() const noexcept { return amps_.size(); }
    std::span<const complex> amplitudes() const noexcept { return amps_; }
    const complex& operator[](std::size_t index) const { return amps_[index]; }

    double norm_squared() const noexcept {
        double acc = 0.0;
        for (const auto& a : amps_) acc += std::norm(a);
        return acc;
    }

    std::vector<double> probabilities() const {
        std::vector<double> p(amps_.size());
        for (std::size_t x = 0; x < amps_.size(); ++x) p[x] = std::norm(amps_[x]);
        return p;
    }

    /// Bit mask of qubit q inside a basis index.
    std::size_t qubit_mask(int q) const noexcept { return std::size_t{1} << (n_qubits_ - 1 - q); }

    /// In-place U|psi>.
    void apply(const GateOp& gate) {
        validate_targets(gate);
        switch (gate.kind) {
            case GateKind::CNOT: apply_cnot(gate.targets[0], gate.targets[1]); return;
            case GateKind::CZ: apply_cz(gate.targets[0], gate.targets[1]); return;
            default: apply_single(gate.targets[0], gate_matrix(gate)); return;
        }
    }

    void apply_single(int q, const Mat2& m) {
        const std::size_t stride = qubit_mask(q);
        const std::size_t dim = amps_.size();
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t j = base; j < base + stride; ++j) {
                const complex a = amps_[j];
                const complex b = amps_[j + stride];
                amps_[j] = m[0] * a + m[1] * b;
                amps_[j + stride] = m[2] * a + m[3] * b;
            }
        }
    }

    void validate_targets(const GateOp& gate) const {
        const auto check = [&](int q) {
            if (q < 0 || q >= n_qubits_) {
                throw std::out_of_range("gate " + to_string(gate.kind) + " targets qubit " + std::to_string(q) +
                                        " of a " + std::to_string(n_qubits_) + "-qubit state");
            }
        };
        check(gate.targets[0]);
        if (is_two_qubit(gate.kind)) {
            check(gate.targets[1]);
            if (gate.targets[0] == gate.targets[1]) {
                throw std::invalid_argument("two-qubit gate with coinciding targets");
            }
        }
    }

    friend bool operator==(const Statevector&, const Statevector&) = default;

private:
    static int checked_qubits(int n) {
        if (n < 1 || n > kMaxQubits) {
            throw std::invalid_argument("n_qubits must be in [1, " + std::to_string(kMaxQubits) + "], got " +
                                        std::to_string(n));
        }
        return n;
    }

    void apply_cnot(int control, int target) {
        const std::size_t cm = qubit_mask(control);
        const std::size_t tm = qubit_mask(target);
        for (std::size_t x = 0; x < amps_.size(); ++x) {
            if ((x & cm) && !(x & tm)) std::swap(amps_[x], amps_[x | tm]);
        }
    }

    void apply_cz(int a, int b) {
        const std::size_t mask = qubit_mask(a) | qubit_mask(b);
        for (std::size_t x = 0; x < amps_.size(); ++x) {
            if ((x & mask) == mask) amps_[x] = -amps_[x];
        }
    }

    int n_qubits_;
    std::vector<complex> amps_;
};

inline Statevector apply_gate(Statevector state, const GateOp& gate) {
    state.apply(gate);
    return state;
}

/// Ordered gate list. `seed` records the generator input for random circuits (0 otherwise).
struct Circuit {
    int n_qubits = 0;
    std::vector<GateOp> ops;
    std::uint64_t seed = 0;

    void validate() const {
        for (const auto& op : ops) {
            const int arity = is_two_qubit(op.kind) ? 2 : 1;
            for (int t = 0; t < arity; ++t) {
                if (op.targets[t] < 0 || op.targets[t] >= n_qubits) {
                    throw std::out_of_range("circuit op " + to_string(op.kind) + " targets qubit out of range");
                }
            }
            if (arity == 2 && op.targets[0] == op.targets[1]) {
                throw std::invalid_argument("circuit op with coinciding targets");
            }
        }
    }
};

inline Statevector run_circuit(const Circuit& circuit, Statevector state) {
    if (state.n_qubits() != circuit.n_qubits) {
        throw std::invalid_argument("circuit and state qubit counts differ");
    }
    circuit.validate();
    for (const auto& op : circuit.ops) state.apply(op);
    return state;
}

inline Statevector run_circuit(const Circuit& circuit) { return run_circuit(circuit, Statevector(circuit.n_qubits)); }

// ---------------------------------------------------------------------------
// State families
// ---------------------------------------------------------------------------

/// cos(theta/2)|0...0> + sin(theta/2)|1...1>, assigned directly.
inline Statevector build_cat_state(int n_qubits, double theta) {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
        throw std::domain_error("cat angle must lie in [0, pi]");
    }
    Statevector state(n_qubits);
    std::vector<complex> amps(state.dim());
    // cos(pi/2) is 6e-17 in floating point; the theta = pi state has a single nonzero amplitude.
    amps.front() = theta == std::numbers::pi ? 0.0 : std::cos(theta / 2);
    amps.back() += std::sin(theta / 2);
    return {n_qubits, std::move(amps)};
}

/// U3(theta, 0, 0) on qubit 0 followed by the CNOT chain 0->1->...->N-1.
inline Circuit build_cat_circuit(int n_qubits, double theta) {
    Circuit c{n_qubits, {}, 0};
    c.ops.push_back(GateOp::u3(0, theta, 0.0, 0.0));
    for (int q = 0; q + 1 < n_qubits; ++q) c.ops.push_back(GateOp::cnot(q, q + 1));
    return c;
}

inline double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return std::round(r);
}

/// Equal-weight superposition of all basis states with Hamming weight `excitations`.
inline Statevector build_dicke_state(int n_qubits, int excitations) {
    if (excitations < 0 || excitations > n_qubits) {
        throw std::out_of_range("Dicke excitation count outside [0, n_qubits]");
    }
    Statevector probe(n_qubits);
    const double amp = 1.0 / std::sqrt(binomial(n_qubits, excitations));
    std::vector<complex> amps(probe.dim());
    for (std::size_t x = 0; x < amps.size(); ++x) {
        if (std::popcount(x) == excitations) amps[x] = amp;
    }
    return {n_qubits, std::move(amps)};
}

/// (H|0>)^{\otimes N}.
inline Statevector build_uniform_state(int n_qubits) {
    Statevector probe(n_qubits);
    std::vector<complex> amps(probe.dim(), complex{std::pow(2.0, -0.5 * n_qubits), 0.0});
    return {n_qubits, std::move(amps)};
}

/// Two fixed perfect matchings of a ring: {(0,1),(2,3),...} and {(1,2),...,(N-1,0)}.
inline std::vector<std::pair<int, int>> ring_matching(int n_qubits, bool odd) {
    std::vector<std::pair<int, int>> pairs;
    for (int q = odd ? 1 : 0; q < n_qubits; q += 2) pairs.emplace_back(q, (q + 1) % n_qubits);
    return pairs;
}

/// Fixed CZ couplings used by random circuits. When N = s*s with even s >= 4 the qubits
/// sit on an s x s torus (row-major) with four perfect matchings: horizontal bonds
/// starting at even / odd columns, vertical bonds starting at even / odd rows.
/// Otherwise the two ring matchings are used.
inline std::vector<std::vector<std::pair<int, int>>> coupling_matchings(int n_qubits) {
    int side = 0;
    while ((side + 1) * (side + 1) <= n_qubits) ++side;
    if (side * side != n_qubits || side < 4 || side % 2 != 0) {
        return {ring_matching(n_qubits, false), ring_matching(n_qubits, true)};
    }
    std::vector<std::vector<std::pair<int, int>>> m(4);
    const auto site = [side](int x, int y) { return (y % side) * side + (x % side); };
    for (int y = 0; y < side; ++y) {
        for (int x = 0; x < side; x += 2) {
            m[0].emplace_back(site(x, y), site(x + 1, y));
            m[1].emplace_back(site(x + 1, y), site(x + 2, y));
        }
    }
    for (int x = 0; x < side; ++x) {
        for (int y = 0; y < side; y += 2) {
            m[2].emplace_back(site(x, y), site(x, y + 1));
            m[3].emplace_back(site(x, y + 1), site(x, y + 2));
        }
    }
    return m;
}

/// Pseudo-random circuit. Each cycle draws one of {SqrtX, SqrtY, T} per qubit, then applies
/// CZ on one matching from `coupling_matchings`; every run of M consecutive cycles (M the
/// number of matchings) visits all matchings in a freshly shuffled order. A final
/// single-qubit layer closes the circuit.
inline Circuit build_random_circuit(int n_qubits, int cycles, std::uint64_t seed) {
    if (cycles < 1) throw std::invalid_argument("random circuit needs at least one cycle");
    if (n_qubits < 2 || n_qubits % 2 != 0) throw std::invalid_argument("random circuit needs an even qubit count");
    constexpr std::array kPool{GateKind::SqrtX, GateKind::SqrtY, GateKind::T};
    const auto matchings = coupling_matchings(n_qubits);
    CounterRng rng(seed, 0);
    Circuit c{n_qubits, {}, seed};
    auto single_layer = [&] {
        for (int q = 0; q < n_qubits; ++q) c.ops.push_back(GateOp::single(kPool[rng.next_below(kPool.size())], q));
    };
    std::vector<std::size_t> order(matchings.size());
    for (int cycle = 0; cycle < cycles; ++cycle) {
        single_layer();
        const std::size_t slot = static_cast<std::size_t>(cycle) % matchings.size();
        if (slot == 0) {
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.next_below(i + 1)]);
        }
        for (auto [a, b] : matchings[order[slot]]) c.ops.push_back(GateOp::cz(a, b));
    }
    single_layer();
    return c;
}

enum class NormPolicy {
    Renormalize,  ///< any finite nonzero vector is scaled to unit norm
    Strict        ///< norm must already be within 1e-6 of one; amplitudes are kept as given
};

/// Load raw amplitudes (e.g. an eigenvector) as a state.
inline Statevector init_from_amplitudes(std::span<const complex> amplitudes,
                                        NormPolicy policy = NormPolicy::Renormalize) {
    const std::size_t len = amplitudes.size();
    if (len < 2 || !std::has_single_bit(len)) {
        throw std::invalid_argument("amplitude count " + std::to_string(len) + " is not a power of two >= 2");
    }
    double norm2 = 0.0;
    for (const auto& a : amplitudes) {
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) throw std::invalid_argument("non-finite amplitude");
        norm2 += std::norm(a);
    }
    if (norm2 == 0.0) throw std::invalid_argument("zero vector is not a state");
    if (policy == NormPolicy::Strict && std::abs(norm2 - 1.0) > 1e-6) {
        throw std::invalid_argument("amplitudes not normalized (|psi|^2 = " + std::to_string(norm2) + ")");
    }
    std::vector<complex> amps(amplitudes.begin(), amplitudes.end());
    if (policy == NormPolicy::Renormalize) {
        const double scale = 1.0 / std::sqrt(norm2);
        for (auto& a : amps) a *= scale;
    }
    return {std::countr_zero(len), std::move(amps)};
}

inline Statevector init_from_amplitudes(std::span<const double> real_amplitudes,
                                        NormPolicy policy = NormPolicy::Renormalize) {
    std::vector<complex> amps(real_amplitudes.begin(), real_amplitudes.end());
    return init_from_amplitudes(std::span<const complex>(amps), policy);
}

}  // namespace qhash
