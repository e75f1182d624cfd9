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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qstate.hpp"
#include "rng.hpp"

namespace qhash {

enum class Basis { Z, Random };

inline std::string to_string(Basis b) { return b == Basis::Z ? "Z" : "Random"; }

inline Basis basis_from_string(const std::string& s) {
    if (s == "Z" || s == "z") return Basis::Z;
    if (s == "Random" || s == "random" || s == "R" || s == "r") return Basis::Random;
    throw std::invalid_argument("unknown basis '" + s + "' (expected Z or Random)");
}

/// How random-basis angles are drawn inside `angle_ranges`.
enum class AngleSampling {
    /// Measurement axis uniform by area over the Bloch-sphere patch: cos(theta)
    /// uniform on [cos(theta_hi), cos(theta_lo)], phi and lambda uniform.
    AreaUniform,
    /// theta, phi and lambda each uniform on their interval.
    ParameterUniform
};

inline std::string to_string(AngleSampling s) {
    return s == AngleSampling::AreaUniform ? "area-uniform" : "parameter-uniform";
}

inline AngleSampling angle_sampling_from_string(const std::string& s) {
    if (s == "area-uniform") return AngleSampling::AreaUniform;
    if (s == "parameter-uniform") return AngleSampling::ParameterUniform;
    throw std::invalid_argument("unknown angle sampling '" + s + "'");
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct MeasurementConfig {
    Basis basis = Basis::Z;
    int n_shots = 8192;
    std::uint64_t seed = 0;
    /// (theta, phi, lambda) ranges of the per-shot U3 rotation.
    std::array<Interval, 3> angle_ranges{{{0.0, std::numbers::pi / 2},
                                          {0.0, std::numbers::pi / 2},
                                          {0.0, std::numbers::pi / 2}}};
    bool shared_rotation_per_shot = true;
    AngleSampling angle_sampling = AngleSampling::AreaUniform;

    static MeasurementConfig z(int shots, std::uint64_t seed) { return {Basis::Z, shots, seed}; }
    static MeasurementConfig random(int shots, std::uint64_t seed) { return {Basis::Random, shots, seed}; }

    void validate() const {
        if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
        for (const auto& r : angle_ranges) {
            if (!(r.lo >= 0.0 && r.hi <= 2 * std::numbers::pi && r.lo <= r.hi)) {
                throw std::invalid_argument("angle ranges must be ordered intervals inside [0, 2pi]");
            }
        }
    }

    friend bool operator==(const MeasurementConfig&, const MeasurementConfig&) = default;
};

/// Measurement record: shot i occupies values[i*N, (i+1)*N), qubit 0 first; bit 0 -> -1, bit 1 -> +1.
struct BitstringArray {
    int n_qubits = 0;
    int n_shots = 0;
    std::vector<std::int8_t> values;
    MeasurementConfig config;
    /// "Z", "Random", or the declared tag of an ingested file.
    std::string basis_tag;
    std::uint64_t seed_record = 0;

    std::size_t size() const noexcept { return values.size(); }
    std::span<const std::int8_t> shot(int i) const {
        return std::span<const std::int8_t>(values).subspan(static_cast<std::size_t>(i) * n_qubits, n_qubits);
    }

    void validate() const {
        if (n_qubits < 1 || n_shots < 1) throw std::invalid_argument("empty bitstring array");
        if (values.size() != static_cast<std::size_t>(n_qubits) * static_cast<std::size_t>(n_shots)) {
            throw std::invalid_argument("bitstring array length differs from n_qubits * n_shots");
        }
        for (auto v : values) {
            if (v != 1 && v != -1) throw std::invalid_argument("bitstring array entries must be +-1");
        }
    }

    friend bool operator==(const BitstringArray&, const BitstringArray&) = default;
};

namespace detail {

inline void require_normalized(const Statevector& state) {
    const double n2 = state.norm_squared();
    if (std::abs(n2 - 1.0) > 1e-6) {
        throw std::invalid_argument("cannot sample an unnormalized state (|psi|^2 = " + std::to_string(n2) + ")");
    }
}

inline void write_index(std::int8_t* out, std::size_t index, int n_qubits) {
    for (int q = 0; q < n_qubits; ++q) {
        out[q] = ((index >> (n_qubits - 1 - q)) & 1U) ? std::int8_t{1} : std::int8_t{-1};
    }
}

inline BitstringArray empty_record(const Statevector& state, const MeasurementConfig& config) {
    BitstringArray out;
    out.n_qubits = state.n_qubits();
    out.n_shots = config.n_shots;
    out.values.resize(static_cast<std::size_t>(state.n_qubits()) * config.n_shots);
    out.config = config;
    out.basis_tag = to_string(config.basis);
    out.seed_record = config.seed;
    return out;
}

/// Inclusive running sum of |psi(x)|^2 in index order.
inline std::vector<double> cumulative_probabilities(std::span<const complex> amps) {
    std::vector<double> cdf(amps.size());
    double acc = 0.0;
    for (std::size_t x = 0; x < amps.size(); ++x) {
        acc += std::norm(amps[x]);
        cdf[x] = acc;
    }
    return cdf;
}

/// Index of the first cumulative weight exceeding u * total.
inline std::size_t invert_cdf(std::span<const double> cdf, double u) {
    const double target = u * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), target);
    return it == cdf.end() ? cdf.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
}

inline double draw_polar(CounterRng& rng, const Interval& r, AngleSampling mode) {
    if (mode == AngleSampling::ParameterUniform) return rng.next_uniform(r.lo, r.hi);
    const double c_hi = std::cos(r.lo);
    const double c_lo = std::cos(r.hi);
    return std::acos(std::clamp(rng.next_uniform(c_lo, c_hi), -1.0, 1.0));
}

inline Mat2 draw_rotation(CounterRng& rng, const MeasurementConfig& config) {
    const double theta = draw_polar(rng, config.angle_ranges[0], config.angle_sampling);
    const double phi = rng.next_uniform(config.angle_ranges[1].lo, config.angle_ranges[1].hi);
    const double lambda = rng.next_uniform(config.angle_ranges[2].lo, config.angle_ranges[2].hi);
    return u3_matrix(theta, phi, lambda);
}

/// Draws one outcome of measuring (U_0 x ... x U_{N-1})|psi> in the Z basis without
/// forming the rotated state. Qubits are resolved most-significant first: the marginal
/// of qubit q only depends on U_q and on the branch selected so far, so each level
/// needs a pass over a vector half the size of the previous one.
///
/// With one uniform u this selects the same outcome as inverting the CDF of the
/// rotated distribution in index order.
class ChainRuleSampler {
public:
    explicit ChainRuleSampler(const Statevector& state)
        : psi_(state.amplitudes().begin(), state.amplitudes().end()), n_(state.n_qubits()) {
        const std::size_t half = psi_.size() / 2;
        for (std::size_t j = 0; j < half; ++j) {
            top_.n0 += std::norm(psi_[j]);
            top_.n1 += std::norm(psi_[j + half]);
            top_.cross += std::conj(psi_[j]) * psi_[j + half];
        }
        buf_a_.resize(half);
        buf_b_.resize(half / 2 + 1);
    }

    std::size_t sample(std::span<const Mat2> rotations, double u) {
        double target = u * (top_.n0 + top_.n1);
        std::size_t index = 0;
        std::span<const complex> cur(psi_);
        BlockStats stats = top_;
        for (int q = 0; q < n_; ++q) {
            const Mat2& m = rotations[q];
            const double p0 = branch_weight(m[0], m[1], stats);
            int bit = 0;
            if (!(target < p0)) {
                bit = 1;
                target -= p0;
            }
            index = (index << 1) | static_cast<std::size_t>(bit);
            if (q + 1 == n_) break;
            const complex c0 = bit ? m[2] : m[0];
            const complex c1 = bit ? m[3] : m[1];
            const std::size_t half = cur.size() / 2;
            auto& next = (q % 2 == 0) ? buf_a_ : buf_b_;
            stats = BlockStats{};
            const std::size_t quarter = half / 2;
            for (std::size_t j = 0; j < half; ++j) next[j] = c0 * cur[j] + c1 * cur[j + half];
            for (std::size_t j = 0; j < quarter; ++j) {
                stats.n0 += std::norm(next[j]);
                stats.n1 += std::norm(next[j + quarter]);
                stats.cross += std::conj(next[j]) * next[j + quarter];
            }
            cur = std::span<const complex>(next.data(), half);
        }
        return index;
    }

private:
    struct BlockStats {
        double n0 = 0.0;
        double n1 = 0.0;
        complex cross{};  ///< <lower half | upper half>
    };

    /// || c0 * lower + c1 * upper ||^2
    static double branch_weight(complex c0, complex c1, const BlockStats& s) {
        if (c1 == complex{}) return std::norm(c0) * s.n0;
        if (c0 == complex{}) return std::norm(c1) * s.n1;
        return std::norm(c0) * s.n0 + std::norm(c1) * s.n1 + 2.0 * (std::conj(c0) * c1 * s.cross).real();
    }

    std::vector<complex> psi_;
    int n_;
    BlockStats top_;
    std::vector<complex> buf_a_;
    std::vector<complex> buf_b_;
};

}  // namespace detail

/// Projective measurement in the computational basis.
inline BitstringArray sample_z(const Statevector& state, const MeasurementConfig& config) {
    config.validate();
    if (config.basis != Basis::Z) throw std::invalid_argument("sample_z requires a Z-basis config");
    detail::require_normalized(state);
    const auto cdf = detail::cumulative_probabilities(state.amplitudes());
    auto out = detail::empty_record(state, config);
    for (int i = 0; i < config.n_shots; ++i) {
        CounterRng rng(config.seed, static_cast<std::uint64_t>(i));
        const std::size_t x = detail::invert_cdf(cdf, rng.next_unit());
        detail::write_index(out.values.data() + static_cast<std::size_t>(i) * state.n_qubits(), x, state.n_qubits());
    }
    return out;
}

enum class RandomBasisMethod {
    ChainRule,   ///< marginal-by-marginal draw, about 4 * 2^N work per shot
    InverseCdf   ///< rotate the full state, rebuild the CDF; N * 2^N work per shot
};

/// Per-shot random U3 rotation followed by a computational-basis measurement.
/// Shot i consumes draws (u, theta, phi, lambda, ...) of stream (seed, i).
inline BitstringArray sample_random_basis(const Statevector& state, const MeasurementConfig& config,
                                          RandomBasisMethod method = RandomBasisMethod::ChainRule) {
    config.validate();
    if (config.basis != Basis::Random) throw std::invalid_argument("sample_random_basis requires a Random config");
    detail::require_normalized(state);
    const int n = state.n_qubits();
    auto out = detail::empty_record(state, config);
    std::vector<Mat2> rotations(n);
    std::optional<detail::ChainRuleSampler> chain;
    if (method == RandomBasisMethod::ChainRule) chain.emplace(state);
    for (int i = 0; i < config.n_shots; ++i) {
        CounterRng rng(config.seed, static_cast<std::uint64_t>(i));
        const double u = rng.next_unit();
        if (config.shared_rotation_per_shot) {
            std::fill(rotations.begin(), rotations.end(), detail::draw_rotation(rng, config));
        } else {
            for (auto& m : rotations) m = detail::draw_rotation(rng, config);
        }
        std::size_t x = 0;
        if (chain) {
            x = chain->sample(rotations, u);
        } else {
            Statevector rotated = state;
            for (int q = 0; q < n; ++q) rotated.apply_single(q, rotations[q]);
            x = detail::invert_cdf(detail::cumulative_probabilities(rotated.amplitudes()), u);
        }
        detail::write_index(out.values.data() + static_cast<std::size_t>(i) * n, x, n);
    }
    return out;
}

inline BitstringArray sample(const Statevector& state, const MeasurementConfig& config) {
    return config.basis == Basis::Z ? sample_z(state, config) : sample_random_basis(state, config);
}

/// Row-major concatenation of 0/1 rows in the given order.
inline BitstringArray concat_shots(std::span<const std::vector<int>> rows, std::string basis_tag = "Z") {
    if (rows.empty()) throw std::invalid_argument("concat_shots: no rows");
    const std::size_t width = rows.front().size();
    if (width == 0) throw std::invalid_argument("concat_shots: empty rows");
    BitstringArray out;
    out.n_qubits = static_cast<int>(width);
    out.n_shots = static_cast<int>(rows.size());
    out.values.reserve(width * rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != width) {
            throw std::invalid_argument("concat_shots: row " + std::to_string(r) + " has length " +
                                        std::to_string(rows[r].size()) + ", expected " + std::to_string(width));
        }
        for (int bit : rows[r]) {
            if (bit != 0 && bit != 1) throw std::invalid_argument("concat_shots: bits must be 0 or 1");
            out.values.push_back(bit ? std::int8_t{1} : std::int8_t{-1});
        }
    }
    out.config.n_shots = out.n_shots;
    out.basis_tag = std::move(basis_tag);
    return out;
}

}  // namespace qhash
