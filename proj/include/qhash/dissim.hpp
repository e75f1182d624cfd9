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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sampler.hpp"

namespace qhash {

/// Coarse-graining flow settings.
struct CoarseGrainConfig {
    /// Filter width.
    int lambda = 2;
    /// Number of scale pairs; nullopt means floor(log_lambda L).
    std::optional<int> k_max;
    /// Whether the finest pair (scales 0 <-> 1) counts toward the total.
    bool include_k0_in_total = false;
    /// Drop trailing entries that do not fill a block instead of failing.
    bool allow_truncation = true;

    friend bool operator==(const CoarseGrainConfig&, const CoarseGrainConfig&) = default;
};

/// Per-scale dissimilarities of one array. partial[k] compares scales k and k+1.
struct DissimilarityProfile {
    std::vector<double> partial;
    double total = 0.0;
    int lambda = 2;
    std::size_t length = 0;
    bool include_k0_in_total = false;
    std::string basis_tag;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    friend bool operator==(const DissimilarityProfile&, const DissimilarityProfile&) = default;
};

/// Overlaps of every adjacent scale pair, as produced by the coarse-graining flow.
struct ScaleOverlaps {
    std::vector<double> self;   ///< O_{k,k} for k = 0 .. pairs
    std::vector<double> cross;  ///< O_{k+1,k} for k = 0 .. pairs-1
    std::vector<double> self_in_pair;  ///< O_{k,k} restricted to the prefix used by pair k
    std::vector<std::size_t> used_length;  ///< entries covered by pair k
    bool truncated = false;
};

/// floor(log_lambda length), computed without floating point.
inline int max_scale(std::size_t length, int lambda) {
    int k = 0;
    std::size_t block = 1;
    while (block <= length / static_cast<std::size_t>(lambda)) {
        block *= static_cast<std::size_t>(lambda);
        ++k;
    }
    return k;
}

inline std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

/// Full-length coarse-graining step: `level_prev` is the scale k-1 array; the result is
/// constant on consecutive blocks of lambda^k entries, each equal to the block mean.
inline std::vector<double> coarse_grain_step(std::span<const double> level_prev, int lambda, int k) {
    if (lambda < 2) throw std::invalid_argument("filter width must be >= 2");
    if (k < 1) throw std::invalid_argument("coarse-graining step index must be >= 1");
    const std::size_t block = ipow(static_cast<std::size_t>(lambda), k);
    if (level_prev.empty() || level_prev.size() % block != 0) {
        throw std::invalid_argument("array length " + std::to_string(level_prev.size()) +
                                    " is not a multiple of the block size " + std::to_string(block));
    }
    std::vector<double> out(level_prev.size());
    for (std::size_t start = 0; start < level_prev.size(); start += block) {
        double sum = 0.0;
        for (std::size_t l = 0; l < block; ++l) sum += level_prev[start + l];
        const double mean = sum / static_cast<double>(block);
        for (std::size_t l = 0; l < block; ++l) out[start + l] = mean;
    }
    return out;
}

/// (1/L) a . b
inline double overlap(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("overlap: length mismatch");
    if (a.empty()) throw std::invalid_argument("overlap: empty arrays");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc / static_cast<double>(a.size());
}

namespace detail {

inline void check_identity(double three_overlap, double o_kk, double o_k1k1) {
    const double simplified = 0.5 * (o_kk - o_k1k1);
    if (std::abs(three_overlap - simplified) > 1e-9) {
        throw std::logic_error("dissimilarity cross-check failed: |O_{k+1,k} - (O_kk + O_{k+1,k+1})/2| = " +
                               std::to_string(three_overlap) + " but (O_kk - O_{k+1,k+1})/2 = " +
                               std::to_string(simplified));
    }
}

}  // namespace detail

/// D_k = |O_{k+1,k} - (O_{k,k} + O_{k+1,k+1}) / 2| for full-length arrays at adjacent scales.
/// Throws if `array_k1` is not an averaging coarse-graining of `array_k`.
inline double partial_dissimilarity(std::span<const double> array_k, std::span<const double> array_k1) {
    if (array_k.size() != array_k1.size()) throw std::invalid_argument("partial_dissimilarity: length mismatch");
    const double o_kk = overlap(array_k, array_k);
    const double o_k1k1 = overlap(array_k1, array_k1);
    const double o_k1k = overlap(array_k1, array_k);
    const double d = std::abs(o_k1k - 0.5 * (o_kk + o_k1k1));
    try {
        detail::check_identity(d, o_kk, o_k1k1);
    } catch (const std::logic_error&) {
        throw std::invalid_argument("partial_dissimilarity: second array is not a coarse-graining of the first");
    }
    return d;
}

/// Runs the coarse-graining flow on block-compressed arrays: scale k is stored as one
/// value per block of lambda^k entries. Block sums are accumulated left to right.
inline ScaleOverlaps scale_overlaps(std::span<const double> values, int lambda, int pairs, bool allow_truncation) {
    if (lambda < 2) throw std::invalid_argument("filter width must be >= 2");
    const std::size_t lam = static_cast<std::size_t>(lambda);
    ScaleOverlaps out;
    std::vector<double> fine(values.begin(), values.end());
    std::vector<double> coarse;
    {
        double s = 0.0;
        for (double v : fine) s += v * v;
        out.self.push_back(s / static_cast<double>(fine.size()));
    }
    for (int k = 0; k < pairs; ++k) {
        const std::size_t n_coarse = fine.size() / lam;
        if (n_coarse == 0) throw std::invalid_argument("array too short for the requested number of scales");
        if (fine.size() % lam != 0) {
            if (!allow_truncation) {
                throw std::invalid_argument("array length is not divisible by lambda^" + std::to_string(k + 1) +
                                            " and truncation is disabled");
            }
            out.truncated = true;
        }
        coarse.assign(n_coarse, 0.0);
        double self_fine = 0.0;
        double cross = 0.0;
        double self_coarse = 0.0;
        for (std::size_t b = 0; b < n_coarse; ++b) {
            double sum = 0.0;
            for (std::size_t l = 0; l < lam; ++l) sum += fine[b * lam + l];
            const double mean = sum / static_cast<double>(lam);
            coarse[b] = mean;
            for (std::size_t l = 0; l < lam; ++l) {
                const double v = fine[b * lam + l];
                self_fine += v * v;
                cross += mean * v;
            }
            self_coarse += mean * mean;
        }
        const double n_fine = static_cast<double>(n_coarse * lam);
        out.self_in_pair.push_back(self_fine / n_fine);
        out.cross.push_back(cross / n_fine);
        out.self.push_back(self_coarse / static_cast<double>(n_coarse));
        out.used_length.push_back(n_coarse * ipow(lam, k + 1));
        fine.swap(coarse);
    }
    return out;
}

/// Partial and total dissimilarities of a +-1 (or real) array.
inline DissimilarityProfile dissimilarity_profile(std::span<const double> values, const CoarseGrainConfig& config) {
    if (config.lambda < 2) throw std::invalid_argument("filter width must be >= 2");
    const std::size_t lam = static_cast<std::size_t>(config.lambda);
    if (values.size() < lam * lam) {
        throw std::invalid_argument("array of length " + std::to_string(values.size()) +
                                    " is shorter than lambda^2");
    }
    const int auto_pairs = max_scale(values.size(), config.lambda);
    const int pairs = config.k_max.value_or(auto_pairs);
    if (pairs < 1 || pairs > auto_pairs) {
        throw std::invalid_argument("k_max must be in [1, " + std::to_string(auto_pairs) + "]");
    }
    const ScaleOverlaps ov = scale_overlaps(values, config.lambda, pairs, config.allow_truncation);

    DissimilarityProfile profile;
    profile.lambda = config.lambda;
    profile.length = values.size();
    profile.include_k0_in_total = config.include_k0_in_total;
    profile.partial.reserve(pairs);
    for (int k = 0; k < pairs; ++k) {
        const double o_kk = ov.self_in_pair[k];
        const double o_k1k1 = ov.self[k + 1];
        const double d = std::abs(ov.cross[k] - 0.5 * (o_kk + o_k1k1));
        detail::check_identity(d, o_kk, o_k1k1);
        profile.partial.push_back(d);
    }
    for (int k = config.include_k0_in_total ? 0 : 1; k < pairs; ++k) profile.total += profile.partial[k];
    if (ov.truncated) {
        profile.warnings.push_back("length " + std::to_string(values.size()) + " is not a multiple of lambda^" +
                                   std::to_string(pairs) + "; trailing entries were dropped at coarse scales");
    }
    return profile;
}

inline std::vector<double> as_real(std::span<const std::int8_t> bits) {
    return {bits.begin(), bits.end()};
}

inline DissimilarityProfile dissimilarity_profile(const BitstringArray& array, const CoarseGrainConfig& config = {}) {
    array.validate();
    const auto values = as_real(array.values);
    auto profile = dissimilarity_profile(std::span<const double>(values), config);
    profile.basis_tag = array.basis_tag;
    profile.seed = array.seed_record;
    return profile;
}

/// Large-scale estimate for uncorrelated entries of variance sigma2:
/// D_k = sigma2 / (2 lambda^k) * (1 - 1/lambda). The mean drops out; it is kept in the
/// signature to document the input distribution.
inline double analytic_random_profile(int lambda, double sigma2, [[maybe_unused]] double mean, int k) {
    if (lambda < 2) throw std::invalid_argument("filter width must be >= 2");
    if (sigma2 < 0.0) throw std::invalid_argument("variance must be nonnegative");
    if (k < 0) throw std::invalid_argument("scale index must be >= 0");
    return sigma2 / (2.0 * std::pow(static_cast<double>(lambda), k)) * (1.0 - 1.0 / lambda);
}

}  // namespace qhash
