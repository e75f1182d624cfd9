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
#include <atomic>
#include <exception>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dissim.hpp"
#include "qstate.hpp"
#include "rng.hpp"
#include "sampler.hpp"
#include "spectra.hpp"

namespace qhash {

// ---------------------------------------------------------------------------
// Signatures
// ---------------------------------------------------------------------------

struct SignatureEntry {
    std::string basis;
    MeasurementConfig config;
    DissimilarityProfile profile;

    friend bool operator==(const SignatureEntry&, const SignatureEntry&) = default;
};

/// Dissimilarity profiles of one state in two or more measurement bases.
struct HashSignature {
    int n_qubits = 0;
    CoarseGrainConfig coarse_grain;
    std::vector<SignatureEntry> entries;

    const SignatureEntry* find(const std::string& basis) const {
        for (const auto& e : entries) {
            if (e.basis == basis) return &e;
        }
        return nullptr;
    }

    const SignatureEntry& at(const std::string& basis) const {
        if (const auto* e = find(basis)) return *e;
        throw std::invalid_argument("signature has no '" + basis + "' basis");
    }

    void validate() const {
        std::set<std::string> tags;
        for (const auto& e : entries) {
            if (!tags.insert(e.basis).second) throw std::invalid_argument("duplicate basis '" + e.basis + "' in signature");
        }
        if (tags.size() < 2) throw std::invalid_argument("a signature needs at least two distinct measurement bases");
    }

    friend bool operator==(const HashSignature&, const HashSignature&) = default;
};

/// Samples `state` once per basis config and profiles each record.
inline HashSignature compute_signature(const Statevector& state, const std::vector<MeasurementConfig>& bases,
                                       const CoarseGrainConfig& cg = {}) {
    HashSignature sig;
    sig.n_qubits = state.n_qubits();
    sig.coarse_grain = cg;
    for (const auto& config : bases) {
        const auto record = sample(state, config);
        sig.entries.push_back({record.basis_tag, config, dissimilarity_profile(record, cg)});
    }
    sig.validate();
    return sig;
}

/// Default two-basis measurement plan with independent seeds per basis.
inline std::vector<MeasurementConfig> default_bases(int shots, std::uint64_t seed) {
    return {MeasurementConfig::z(shots, derive_seed(seed, 0)), MeasurementConfig::random(shots, derive_seed(seed, 1))};
}

namespace detail {

inline void require_compatible(const HashSignature& a, const HashSignature& b) {
    a.validate();
    b.validate();
    if (a.entries.size() != b.entries.size()) throw std::invalid_argument("signatures use different basis sets");
    for (const auto& ea : a.entries) {
        const auto* eb = b.find(ea.basis);
        if (!eb) throw std::invalid_argument("basis '" + ea.basis + "' missing from the other signature");
        if (ea.profile.lambda != eb->profile.lambda) throw std::invalid_argument("signatures use different filter widths");
        if (ea.profile.partial.size() != eb->profile.partial.size()) {
            throw std::invalid_argument("signatures cover different scale ranges in basis '" + ea.basis + "'");
        }
        if (ea.profile.include_k0_in_total != eb->profile.include_k0_in_total) {
            throw std::invalid_argument("signatures use different total-D conventions");
        }
    }
}

}  // namespace detail

/// Euclidean norm of the difference of all partial dissimilarities, concatenated over bases.
inline double signature_distance(const HashSignature& a, const HashSignature& b) {
    detail::require_compatible(a, b);
    double acc = 0.0;
    for (const auto& ea : a.entries) {
        const auto& pb = b.at(ea.basis).profile.partial;
        for (std::size_t k = 0; k < pb.size(); ++k) {
            const double d = ea.profile.partial[k] - pb[k];
            acc += d * d;
        }
    }
    return std::sqrt(acc);
}

inline constexpr double kDefaultCertifyThreshold = 0.05;

struct Verdict {
    bool pass = false;
    double distance = 0.0;
    double threshold = kDefaultCertifyThreshold;
    /// candidate - target, per basis and scale pair.
    std::map<std::string, std::vector<double>> residuals;
};

inline Verdict certify(const HashSignature& candidate, const HashSignature& target,
                       double threshold = kDefaultCertifyThreshold) {
    Verdict v;
    v.distance = signature_distance(candidate, target);
    v.threshold = threshold;
    v.pass = v.distance <= threshold;
    for (const auto& e : candidate.entries) {
        const auto& t = target.at(e.basis).profile.partial;
        auto& r = v.residuals[e.basis];
        for (std::size_t k = 0; k < t.size(); ++k) r.push_back(e.profile.partial[k] - t[k]);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Dissimilarity map
// ---------------------------------------------------------------------------

struct MapPoint {
    std::string label;
    double d_z = 0.0;
    double d_r = 0.0;
};

struct LabeledSignature {
    std::string label;
    HashSignature signature;
};

/// (D^z, D^r) per state.
inline std::vector<MapPoint> dissimilarity_map(const std::vector<LabeledSignature>& signatures) {
    std::vector<MapPoint> points;
    points.reserve(signatures.size());
    for (const auto& s : signatures) {
        points.push_back({s.label, s.signature.at("Z").profile.total, s.signature.at("Random").profile.total});
    }
    return points;
}

// ---------------------------------------------------------------------------
// Porter-Thomas statistics
// ---------------------------------------------------------------------------

struct PorterThomasReport {
    double ks_distance = 0.0;  ///< sup |F_emp - (1 - e^{-x})| over the scaled probabilities
    double mean = 0.0;
    double variance = 0.0;
};

/// Statistics of {2^N |psi(x)|^2} against the unit exponential law.
inline PorterThomasReport porter_thomas_check(const Statevector& state) {
    auto p = state.probabilities();
    const double scale = static_cast<double>(p.size());
    for (auto& x : p) x *= scale;
    std::sort(p.begin(), p.end());
    PorterThomasReport r;
    const double n = static_cast<double>(p.size());
    for (double x : p) r.mean += x;
    r.mean /= n;
    for (double x : p) r.variance += (x - r.mean) * (x - r.mean);
    r.variance /= n;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double cdf = -std::expm1(-p[i]);
        r.ks_distance = std::max({r.ks_distance, std::abs(cdf - static_cast<double>(i) / n),
                                  std::abs(static_cast<double>(i + 1) / n - cdf)});
    }
    return r;
}

// ---------------------------------------------------------------------------
// Phase scans
// ---------------------------------------------------------------------------

enum class Model { TFIM, SS };

inline std::string to_string(Model m) { return m == Model::TFIM ? "tfim" : "ss"; }

struct ScanConfig {
    Model model = Model::TFIM;
    /// Sorted parameter values: h for TFIM, J2/J1 for SS.
    std::vector<double> grid;
    /// Measurement plan; the same seeds are reused at every grid point.
    std::vector<MeasurementConfig> bases;
    CoarseGrainConfig coarse_grain;
    int n_sites = 16;
    double tfim_j = -1.0;
    double ss_j1 = 1.0;
    BondList bonds;
    /// Jump when |Delta D| > jump_factor * median |Delta D| and > min_jump.
    double jump_factor = 5.0;
    double min_jump = 0.01;
    /// Eigenpairs per SS point (ground and first excited).
    int ss_levels = 2;
    double degeneracy_tol = 1e-8;
    LanczosOptions lanczos;
    /// Grid points evaluated concurrently.
    unsigned threads = std::max(1U, std::thread::hardware_concurrency());
};

struct ScanPoint {
    double param = 0.0;
    std::vector<double> energies;
    HashSignature ground;
    std::optional<HashSignature> excited;
};

struct Transition {
    std::string state;  ///< "ground" or "excited"
    std::string basis;
    double location = 0.0;
    double magnitude = 0.0;
};

struct ScanResult {
    Model model = Model::TFIM;
    std::vector<ScanPoint> points;
    /// d(total D)/d(param) per basis for the ground state, central differences inside the grid.
    std::map<std::string, std::vector<double>> ground_derivative;
    std::vector<Transition> transitions;

    std::vector<double> series(const std::string& state, const std::string& basis) const {
        std::vector<double> out;
        for (const auto& p : points) {
            const HashSignature& s = state == "ground" ? p.ground : p.excited.value();
            out.push_back(s.at(basis).profile.total);
        }
        return out;
    }
};

/// Central finite differences, one-sided at the ends.
inline std::vector<double> finite_difference(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("derivative needs two or more points");
    std::vector<double> d(x.size());
    const std::size_t n = x.size();
    d[0] = (y[1] - y[0]) / (x[1] - x[0]);
    d[n - 1] = (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]);
    return d;
}

/// Location of max |dy/dx|.
inline double derivative_extremum(const std::vector<double>& x, const std::vector<double>& derivative) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < derivative.size(); ++i) {
        if (std::abs(derivative[i]) > std::abs(derivative[best])) best = i;
    }
    return x[best];
}

struct Jump {
    double location = 0.0;  ///< midpoint of the two grid points
    double magnitude = 0.0;
};

/// Adjacent differences exceeding max(factor * median |Delta y|, min_jump).
inline std::vector<Jump> detect_jumps(const std::vector<double>& x, const std::vector<double>& y, double factor,
                                      double min_jump) {
    if (x.size() != y.size()) throw std::invalid_argument("jump detection: length mismatch");
    if (x.size() < 3) return {};
    std::vector<double> diffs;
    for (std::size_t i = 1; i < y.size(); ++i) diffs.push_back(std::abs(y[i] - y[i - 1]));
    std::vector<double> sorted = diffs;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double threshold = std::max(factor * median, min_jump);
    std::vector<Jump> jumps;
    for (std::size_t i = 0; i < diffs.size(); ++i) {
        if (diffs[i] > threshold) jumps.push_back({0.5 * (x[i] + x[i + 1]), y[i + 1] - y[i]});
    }
    return jumps;
}

/// Flip-symmetric, translation-invariant start vector for TFIM ground-state searches.
inline std::vector<double> uniform_start(int n_sites) {
    return std::vector<double>(std::size_t{1} << n_sites, 1.0);
}

/// Eigenstates at one grid point.
struct PointStates {
    double param = 0.0;
    std::vector<double> energies;
    Statevector ground{1};
    std::optional<Statevector> excited;
};

/// Diagonalizes the model at `param`.
///
/// TFIM runs in the full space from a flip-even start vector, so the Krylov space stays in
/// the even sector and the ground state is the GHZ-like even combination even when the
/// splitting to the odd partner is far below the solver tolerance. SS runs in the S^z = 0
/// sector from the fixed reference vector, which makes the first excited state the
/// reference's projection onto its (possibly degenerate) level.
inline PointStates scan_point_states(const ScanConfig& config, double param) {
    PointStates out;
    out.param = param;
    try {
        LanczosOptions opt = config.lanczos;
        if (config.model == Model::TFIM) {
            const auto H = build_tfim(config.n_sites, config.tfim_j, param);
            if (!opt.start) opt.start = uniform_start(config.n_sites);
            const auto eig = lowest_eigenpairs(H, 1, std::nullopt, opt);
            out.energies = eig.eigenvalues;
            out.ground = select_state(eig, WhichState::Ground, config.degeneracy_tol);
        } else {
            const auto H = build_ss_supercell(config.bonds, config.ss_j1, param * config.ss_j1);
            if (!opt.start) opt.start = reference_start(H.n_sites, 0.0);
            const auto eig = lowest_eigenpairs(H, config.ss_levels, 0.0, opt);
            out.energies = eig.eigenvalues;
            out.ground = select_state(eig, WhichState::Ground, config.degeneracy_tol);
            out.excited = select_state(eig, WhichState::FirstExcited, config.degeneracy_tol);
        }
    } catch (const ConvergenceError& e) {
        throw ConvergenceError("grid point " + std::to_string(param) + ": " + e.what(), e.residual());
    }
    return out;
}

inline ScanPoint scan_point_signatures(const PointStates& states, const std::vector<MeasurementConfig>& bases,
                                       const CoarseGrainConfig& cg) {
    ScanPoint p;
    p.param = states.param;
    p.energies = states.energies;
    p.ground = compute_signature(states.ground, bases, cg);
    if (states.excited) p.excited = compute_signature(*states.excited, bases, cg);
    return p;
}

/// Derivatives and transition flags for points ordered by parameter.
inline ScanResult summarize_scan(Model model, std::vector<ScanPoint> points, double jump_factor, double min_jump) {
    if (points.size() < 3) throw std::invalid_argument("phase scan needs at least three grid points");
    ScanResult result;
    result.model = model;
    result.points = std::move(points);
    std::vector<double> grid;
    for (const auto& p : result.points) grid.push_back(p.param);
    for (const auto& entry : result.points.front().ground.entries) {
        result.ground_derivative[entry.basis] = finite_difference(grid, result.series("ground", entry.basis));
    }
    if (model == Model::TFIM) {
        const auto& d = result.ground_derivative.at("Z");
        const std::size_t best = static_cast<std::size_t>(
            std::max_element(d.begin(), d.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }) -
            d.begin());
        result.transitions.push_back({"ground", "Z", grid[best], d[best]});
    } else {
        for (const std::string state : {"ground", "excited"}) {
            if (state == "excited" && !result.points.front().excited) continue;
            for (const auto& entry : result.points.front().ground.entries) {
                for (const auto& j : detect_jumps(grid, result.series(state, entry.basis), jump_factor, min_jump)) {
                    result.transitions.push_back({state, entry.basis, j.location, j.magnitude});
                }
            }
        }
    }
    return result;
}

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers; results land at index i.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, unsigned threads, Fn fn) {
    std::vector<std::optional<T>> slots(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        }
    };
    threads = std::max(1U, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<T> out;
    out.reserve(n);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

/// Ground (and for SS first-excited) signatures along the grid with transition estimates:
/// the extremum of dD^z/dh for TFIM, jumps for SS. The same measurement seeds are used at
/// every grid point.
inline ScanResult phase_scan(const ScanConfig& config) {
    if (config.grid.size() < 3) throw std::invalid_argument("phase scan needs at least three grid points");
    if (!std::is_sorted(config.grid.begin(), config.grid.end())) throw std::invalid_argument("scan grid must be sorted");
    if (config.bases.size() < 2) throw std::invalid_argument("phase scan needs two or more bases");
    if (config.model == Model::SS) config.bonds.validate();
    auto points = parallel_map<ScanPoint>(config.grid.size(), config.threads, [&](std::size_t i) {
        return scan_point_signatures(scan_point_states(config, config.grid[i]), config.bases, config.coarse_grain);
    });
    return summarize_scan(config.model, std::move(points), config.jump_factor, config.min_jump);
}

// ---------------------------------------------------------------------------
// Shot economy
// ---------------------------------------------------------------------------

struct ShotsRow {
    int shots = 0;
    double total_mean = 0.0;
    double total_std = 0.0;
    std::vector<double> partial_mean;
    std::vector<double> partial_std;
};

/// Mean and spread of D and D_k over `replicas` independent seeds, per shot count.
inline std::vector<ShotsRow> shots_sensitivity(const Statevector& state, Basis basis, const std::vector<int>& shot_counts,
                                               int replicas, std::uint64_t seed, const CoarseGrainConfig& cg = {}) {
    if (replicas < 1) throw std::invalid_argument("need at least one replica");
    if (!std::is_sorted(shot_counts.begin(), shot_counts.end())) throw std::invalid_argument("shot counts must ascend");
    std::vector<ShotsRow> rows;
    for (int shots : shot_counts) {
        ShotsRow row;
        row.shots = shots;
        std::vector<DissimilarityProfile> profiles;
        for (int r = 0; r < replicas; ++r) {
            MeasurementConfig mc{basis, shots, derive_seed(seed, static_cast<std::uint64_t>(r))};
            profiles.push_back(dissimilarity_profile(sample(state, mc), cg));
        }
        const std::size_t kk = profiles.front().partial.size();
        row.partial_mean.assign(kk, 0.0);
        row.partial_std.assign(kk, 0.0);
        for (const auto& p : profiles) {
            row.total_mean += p.total / replicas;
            for (std::size_t k = 0; k < kk; ++k) row.partial_mean[k] += p.partial[k] / replicas;
        }
        if (replicas > 1) {
            for (const auto& p : profiles) {
                row.total_std += (p.total - row.total_mean) * (p.total - row.total_mean);
                for (std::size_t k = 0; k < kk; ++k) {
                    row.partial_std[k] += (p.partial[k] - row.partial_mean[k]) * (p.partial[k] - row.partial_mean[k]);
                }
            }
            row.total_std = std::sqrt(row.total_std / (replicas - 1));
            for (auto& s : row.partial_std) s = std::sqrt(s / (replicas - 1));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace qhash
