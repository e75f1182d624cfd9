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

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "qstate.hpp"
#include "rng.hpp"

namespace qhash {

// ---------------------------------------------------------------------------
// Hamiltonians
// ---------------------------------------------------------------------------

/// Spin-1/2 operators S = sigma / 2 on sites 0..n-1; site i is qubit i.
enum class TermKind {
    ZZ,          ///< coupling * S^z_i S^z_j
    Heisenberg,  ///< coupling * S_i . S_j
    XField       ///< coupling * S^x_i
};

struct Term {
    TermKind kind = TermKind::ZZ;
    int i = 0;
    int j = -1;
    double coupling = 0.0;
};

struct HamiltonianSpec {
    int n_sites = 0;
    std::vector<Term> terms;

    void validate() const {
        if (n_sites < 1 || n_sites > kMaxQubits) throw std::invalid_argument("Hamiltonian site count out of range");
        for (const auto& t : terms) {
            const bool pair = t.kind != TermKind::XField;
            if (t.i < 0 || t.i >= n_sites || (pair && (t.j < 0 || t.j >= n_sites))) {
                throw std::out_of_range("Hamiltonian term references a site outside [0, n_sites)");
            }
            if (pair && t.i == t.j) throw std::invalid_argument("two-site term on a single site");
            if (!std::isfinite(t.coupling)) throw std::invalid_argument("non-finite coupling");
        }
    }

    bool conserves_sz() const {
        return std::none_of(terms.begin(), terms.end(), [](const Term& t) { return t.kind == TermKind::XField; });
    }

    /// Upper bound on the operator norm, used to scale residual tolerances.
    double norm_bound() const {
        double b = 0.0;
        for (const auto& t : terms) {
            b += std::abs(t.coupling) * (t.kind == TermKind::ZZ ? 0.25 : t.kind == TermKind::XField ? 0.5 : 0.75);
        }
        return std::max(b, 1e-300);
    }
};

/// H = J sum_i S^z_i S^z_{i+1} + h sum_i S^x_i on a periodic chain.
inline HamiltonianSpec build_tfim(int n_sites, double J, double h) {
    if (n_sites < 2) throw std::invalid_argument("TFIM needs at least two sites");
    HamiltonianSpec H{n_sites, {}};
    for (int i = 0; i < n_sites; ++i) H.terms.push_back({TermKind::ZZ, i, (i + 1) % n_sites, J});
    for (int i = 0; i < n_sites; ++i) H.terms.push_back({TermKind::XField, i, -1, h});
    return H;
}

/// Bond list of a dimer lattice. Dimer bonds must form a perfect matching.
struct BondList {
    enum class Class { Dimer, Inter };
    struct Bond {
        int i = 0;
        int j = 0;
        Class cls = Class::Inter;
    };
    int n_sites = 0;
    std::vector<Bond> bonds;

    std::size_t count(Class c) const {
        return static_cast<std::size_t>(
            std::count_if(bonds.begin(), bonds.end(), [c](const Bond& b) { return b.cls == c; }));
    }

    void validate() const {
        if (n_sites < 2) throw std::invalid_argument("bond list needs at least two sites");
        std::vector<int> dimer_degree(n_sites, 0);
        std::set<std::pair<int, int>> seen;
        for (const auto& b : bonds) {
            if (b.i < 0 || b.j < 0 || b.i >= n_sites || b.j >= n_sites) {
                throw std::out_of_range("bond (" + std::to_string(b.i) + ", " + std::to_string(b.j) +
                                        ") outside the site range");
            }
            if (b.i == b.j) throw std::invalid_argument("bond connects a site to itself");
            if (!seen.emplace(std::min(b.i, b.j), std::max(b.i, b.j)).second) {
                throw std::invalid_argument("duplicate bond (" + std::to_string(b.i) + ", " + std::to_string(b.j) + ")");
            }
            if (b.cls == Class::Dimer) {
                ++dimer_degree[b.i];
                ++dimer_degree[b.j];
            }
        }
        for (int s = 0; s < n_sites; ++s) {
            if (dimer_degree[s] != 1) {
                throw std::invalid_argument("dimer bonds are not a perfect matching: site " + std::to_string(s) +
                                            " is in " + std::to_string(dimer_degree[s]) + " dimers");
            }
        }
    }
};

/// Text format: a "sites <n>" header, then one "i j dimer|inter" line per bond; '#' starts a comment.
inline BondList parse_bond_list(std::istream& in) {
    BondList out;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue;
        if (!have_header) {
            if (first != "sites" || !(ss >> out.n_sites)) throw FormatError("expected 'sites <n>' header", lineno);
            have_header = true;
            continue;
        }
        BondList::Bond b;
        std::string cls;
        try {
            b.i = std::stoi(first);
        } catch (const std::exception&) {
            throw FormatError("expected a site index, got '" + first + "'", lineno);
        }
        if (!(ss >> b.j >> cls)) throw FormatError("expected 'i j dimer|inter'", lineno);
        if (cls == "dimer") {
            b.cls = BondList::Class::Dimer;
        } else if (cls == "inter") {
            b.cls = BondList::Class::Inter;
        } else {
            throw FormatError("unknown bond class '" + cls + "'", lineno);
        }
        std::string extra;
        if (ss >> extra) throw FormatError("trailing token '" + extra + "'", lineno);
        out.bonds.push_back(b);
    }
    if (!have_header) throw FormatError("bond list is empty");
    return out;
}

inline BondList load_bond_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open bond list '" + path + "'");
    return parse_bond_list(in);
}

/// Heisenberg model with J1 on dimer bonds and J2 on inter-dimer bonds.
inline HamiltonianSpec build_ss_supercell(const BondList& bonds, double J1, double J2) {
    bonds.validate();
    HamiltonianSpec H{bonds.n_sites, {}};
    for (const auto& b : bonds.bonds) {
        H.terms.push_back({TermKind::Heisenberg, b.i, b.j, b.cls == BondList::Class::Dimer ? J1 : J2});
    }
    return H;
}

// ---------------------------------------------------------------------------
// Sparse action
// ---------------------------------------------------------------------------

/// Basis states with a fixed number of up-bits (1s), i.e. fixed total S^z.
class SzSector {
public:
    /// `sz` is the total S^z; bit 0 is spin up (S^z = +1/2).
    SzSector(int n_sites, double sz) : n_(n_sites), sz_(sz) {
        const double ones = n_sites / 2.0 - sz;
        if (ones < 0 || ones > n_sites || std::abs(ones - std::round(ones)) > 1e-12) {
            throw std::invalid_argument("S^z = " + std::to_string(sz) + " is not a sector of " +
                                        std::to_string(n_sites) + " spins");
        }
        ones_ = static_cast<int>(std::lround(ones));
        position_.assign(std::size_t{1} << n_sites, -1);
        for (std::size_t x = 0; x < position_.size(); ++x) {
            if (std::popcount(x) == ones_) {
                position_[x] = static_cast<std::int64_t>(states_.size());
                states_.push_back(x);
            }
        }
    }

    std::size_t dim() const noexcept { return states_.size(); }
    double sz() const noexcept { return sz_; }
    std::size_t state(std::size_t k) const { return states_[k]; }
    std::int64_t position(std::size_t x) const { return position_[x]; }

    std::vector<double> embed(std::span<const double> v) const {
        std::vector<double> full(position_.size(), 0.0);
        for (std::size_t k = 0; k < states_.size(); ++k) full[states_[k]] = v[k];
        return full;
    }

private:
    int n_;
    double sz_;
    int ones_ = 0;
    std::vector<std::size_t> states_;
    std::vector<std::int64_t> position_;
};

/// Matrix-free H with the diagonal cached, optionally restricted to an S^z sector.
class SpinOperator {
public:
    explicit SpinOperator(const HamiltonianSpec& H, std::optional<double> sector = std::nullopt) : n_(H.n_sites) {
        H.validate();
        if (sector) {
            if (!H.conserves_sz()) throw std::invalid_argument("sector restriction requested for an S^z-breaking Hamiltonian");
            sector_.emplace(H.n_sites, *sector);
        }
        const std::size_t d = dim();
        diag_.assign(d, 0.0);
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t x = basis_state(k);
            double acc = 0.0;
            for (const auto& t : H.terms) {
                if (t.kind == TermKind::XField) continue;
                const bool same = bit(x, t.i) == bit(x, t.j);
                acc += t.coupling * (same ? 0.25 : -0.25);
            }
            diag_[k] = acc;
        }
        for (const auto& t : H.terms) {
            if (t.kind == TermKind::ZZ) continue;
            const std::size_t mask =
                t.kind == TermKind::XField ? site_mask(t.i) : (site_mask(t.i) | site_mask(t.j));
            flips_.push_back({mask, t.kind == TermKind::Heisenberg, 0.5 * t.coupling});
        }
    }

    std::size_t dim() const noexcept { return sector_ ? sector_->dim() : (std::size_t{1} << n_); }
    int n_sites() const noexcept { return n_; }
    const std::optional<SzSector>& sector() const noexcept { return sector_; }

    template <typename T>
    void apply(std::span<const T> v, std::span<T> out) const {
        const std::size_t d = dim();
        if (v.size() != d || out.size() != d) throw std::invalid_argument("operator/vector dimension mismatch");
        for (std::size_t k = 0; k < d; ++k) {
            const std::size_t x = basis_state(k);
            T acc = diag_[k] * v[k];
            for (const auto& f : flips_) {
                // Heisenberg exchange only connects antiparallel pairs.
                if (f.exchange && std::popcount(x & f.mask) != 1) continue;
                const std::size_t y = x ^ f.mask;
                const std::size_t ky = sector_ ? static_cast<std::size_t>(sector_->position(y)) : y;
                acc += f.amplitude * v[ky];
            }
            out[k] = acc;
        }
    }

    std::vector<double> full_vector(std::span<const double> v) const {
        return sector_ ? sector_->embed(v) : std::vector<double>(v.begin(), v.end());
    }

private:
    struct Flip {
        std::size_t mask;
        bool exchange;
        double amplitude;
    };

    std::size_t basis_state(std::size_t k) const { return sector_ ? sector_->state(k) : k; }
    std::size_t site_mask(int site) const { return std::size_t{1} << (n_ - 1 - site); }
    bool bit(std::size_t x, int site) const { return (x & site_mask(site)) != 0; }

    int n_;
    std::optional<SzSector> sector_;
    std::vector<double> diag_;
    std::vector<Flip> flips_;
};

/// H v over the full 2^n space, by on-the-fly bit manipulation.
template <typename T>
std::vector<T> matvec(const HamiltonianSpec& H, std::span<const T> v) {
    const std::size_t d = std::size_t{1} << H.n_sites;
    if (v.size() != d) throw std::invalid_argument("matvec: vector length differs from 2^n_sites");
    std::vector<T> out(d);
    SpinOperator(H).apply<T>(v, out);
    return out;
}

/// Global spin flip: (F v)[x] = v[~x].
template <typename T>
std::vector<T> global_flip(std::span<const T> v) {
    std::vector<T> out(v.size());
    const std::size_t mask = v.size() - 1;
    for (std::size_t x = 0; x < v.size(); ++x) out[x] = v[x ^ mask];
    return out;
}

// ---------------------------------------------------------------------------
// Lanczos
// ---------------------------------------------------------------------------

struct LanczosOptions {
    /// Krylov dimension per restart cycle.
    int krylov_dim = 120;
    int max_restarts = 60;
    /// Convergence when ||H v - E v|| <= tol * norm bound of H.
    double tol = 1e-10;
    std::uint64_t seed = 0x5eed;
    /// Start vector over the operator's basis (sector basis if one is requested).
    std::optional<std::vector<double>> start;
    /// Record the lowest Ritz value after every Lanczos step of the first eigenpair.
    bool record_history = false;
    /// Probe the complement of the converged vectors from random starts and swap in any lower
    /// level found there, so degenerate levels are counted with their multiplicity.
    bool verify_multiplicity = true;
};

struct EigResult {
    std::vector<double> eigenvalues;                ///< ascending
    std::vector<std::vector<double>> eigenvectors;  ///< full 2^n amplitudes
    std::vector<double> residual_norms;
    std::optional<double> sector;
    std::vector<double> ground_history;
    int n_sites = 0;
    int matvecs = 0;
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// Two passes of classical Gram-Schmidt against each basis set.
inline void orthogonalize(std::span<double> w, const std::vector<std::vector<double>>& a,
                          const std::vector<std::vector<double>>& b) {
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& q : a) axpy(-dot(q, w), q, w);
        for (const auto& q : b) axpy(-dot(q, w), q, w);
    }
}

}  // namespace detail

/// Lowest `m` eigenpairs by Lanczos with full reorthogonalization. Eigenpairs are found one
/// at a time; converged vectors are locked and projected out of later Krylov spaces, and a
/// cycle that misses the tolerance restarts from its best Ritz vector.
inline EigResult lowest_eigenpairs(const HamiltonianSpec& H, int m, std::optional<double> sector = std::nullopt,
                                   const LanczosOptions& opt = {}) {
    if (m < 1) throw std::invalid_argument("need at least one eigenpair");
    const SpinOperator op(H, sector);
    const std::size_t d = op.dim();
    if (static_cast<std::size_t>(m) > d) throw std::invalid_argument("more eigenpairs requested than the dimension");
    const double tol = opt.tol * H.norm_bound();

    EigResult res;
    res.sector = sector;
    res.n_sites = H.n_sites;
    std::vector<std::vector<double>> locked;
    std::vector<double> w(d);

    std::vector<double> start(d);
    if (opt.start) {
        if (opt.start->size() != d) throw std::invalid_argument("start vector has the wrong dimension");
        start = *opt.start;
    } else {
        CounterRng rng(opt.seed, 0);
        for (auto& x : start) x = rng.next_unit() - 0.5;
    }

    // Converges one eigenpair in the complement of `locked`, starting from `q`.
    auto converge = [&](std::vector<double> q, int pair, std::uint64_t stream) {
        detail::orthogonalize(q, locked, {});
        double qn = detail::norm(q);
        if (qn < 1e-12) {
            // The start vector lies in the span of the locked ones; perturb it.
            CounterRng rng(opt.seed, stream);
            for (auto& x : q) x = rng.next_unit() - 0.5;
            detail::orthogonalize(q, locked, {});
            qn = detail::norm(q);
        }
        for (auto& x : q) x /= qn;

        double ritz_value = 0.0;
        double residual = std::numeric_limits<double>::infinity();
        std::vector<double> ritz;
        for (int restart = 0; restart <= opt.max_restarts; ++restart) {
            std::vector<std::vector<double>> basis;
            std::vector<double> alpha, beta;
            basis.push_back(q);
            Eigen::VectorXd best_s;
            const int kmax = static_cast<int>(std::min<std::size_t>(opt.krylov_dim, d - locked.size()));
            for (int it = 0; it < kmax; ++it) {
                op.apply<double>(basis.back(), w);
                ++res.matvecs;
                alpha.push_back(detail::dot(basis.back(), w));
                detail::orthogonalize(w, basis, locked);
                const double b = detail::norm(w);

                const int k = static_cast<int>(alpha.size());
                const bool exhausted = b <= 1e-14 * H.norm_bound() || it + 1 == kmax;
                const bool record = opt.record_history && pair == 0 && restart == 0;
                if (record || exhausted || k % 4 == 0) {
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
                    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), k);
                    Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), k - 1);
                    tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
                    best_s = tri.eigenvectors().col(0);
                    if (record) res.ground_history.push_back(tri.eigenvalues()(0));
                    if (exhausted || std::abs(b * best_s(k - 1)) <= 0.1 * tol) break;
                }
                beta.push_back(b);
                std::vector<double> next(w);
                for (auto& x : next) x /= b;
                basis.push_back(std::move(next));
            }
            ritz.assign(d, 0.0);
            for (int i = 0; i < best_s.size(); ++i) detail::axpy(best_s(i), basis[i], ritz);
            detail::orthogonalize(ritz, locked, {});
            const double rn = detail::norm(ritz);
            for (auto& x : ritz) x /= rn;
            op.apply<double>(ritz, w);
            ++res.matvecs;
            ritz_value = detail::dot(ritz, w);
            detail::axpy(-ritz_value, ritz, w);
            residual = detail::norm(w);
            if (residual <= tol) break;
            q = ritz;
        }
        if (!(residual <= tol)) {
            throw ConvergenceError("Lanczos did not converge for eigenpair " + std::to_string(pair), residual);
        }
        res.eigenvalues.push_back(ritz_value);
        res.residual_norms.push_back(residual);
        locked.push_back(std::move(ritz));
    };

    for (int pair = 0; pair < m; ++pair) converge(start, pair, 1 + static_cast<std::uint64_t>(pair));

    // Probe the complement of the locked vectors from random starts; a level found there below
    // the highest kept pair replaces that pair.
    if (opt.verify_multiplicity) {
        const double margin = 10.0 * tol;
        for (int round = 0; static_cast<std::size_t>(m) + static_cast<std::size_t>(round) < d; ++round) {
            std::vector<double> probe(d);
            CounterRng rng(opt.seed, 0x1000 + static_cast<std::uint64_t>(round));
            for (auto& x : probe) x = rng.next_unit() - 0.5;
            converge(std::move(probe), m + round, 0x2000 + static_cast<std::uint64_t>(round));
            const double found = res.eigenvalues.back();
            const auto top = std::max_element(res.eigenvalues.begin(), res.eigenvalues.end() - 1);
            if (!(found < *top - margin)) {
                res.eigenvalues.pop_back();
                res.residual_norms.pop_back();
                locked.pop_back();
                break;
            }
            const auto drop = static_cast<std::size_t>(top - res.eigenvalues.begin());
            res.eigenvalues.erase(res.eigenvalues.begin() + static_cast<std::ptrdiff_t>(drop));
            res.residual_norms.erase(res.residual_norms.begin() + static_cast<std::ptrdiff_t>(drop));
            locked.erase(locked.begin() + static_cast<std::ptrdiff_t>(drop));
        }
    }

    std::vector<std::size_t> order(locked.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return res.eigenvalues[a] < res.eigenvalues[b]; });
    EigResult sorted = res;
    sorted.eigenvalues.clear();
    sorted.residual_norms.clear();
    for (std::size_t i : order) {
        sorted.eigenvalues.push_back(res.eigenvalues[i]);
        sorted.residual_norms.push_back(res.residual_norms[i]);
        sorted.eigenvectors.push_back(op.full_vector(locked[i]));
    }
    return sorted;
}

enum class WhichState { Ground, FirstExcited };

namespace detail {

inline Statevector normalized_state(std::span<const double> v) { return init_from_amplitudes(v); }

/// Fixed pseudo-random reference supported on the S^z = 0 states (on all states for odd n).
inline std::vector<double> reference_vector(std::size_t dim, int n_sites) {
    std::vector<double> r(dim, 0.0);
    CounterRng rng(0x7ef3'a2c4'91d0'5b17ULL, 0);
    for (std::size_t x = 0; x < dim; ++x) {
        const double u = rng.next_unit() - 0.5;
        if (n_sites % 2 != 0 || 2 * std::popcount(x) == n_sites) r[x] = u;
    }
    return r;
}

/// Projection of `target` onto span{group} (group assumed orthonormal), normalized.
inline std::vector<double> project_onto(const std::vector<const std::vector<double>*>& group,
                                        std::span<const double> target) {
    std::vector<double> out(target.size(), 0.0);
    for (const auto* v : group) axpy(dot(*v, target), *v, out);
    return out;
}

}  // namespace detail

/// The fixed reference vector in the coordinates of `sector` (the full space when empty).
/// Lanczos started from it converges, level by level, to the reference's projection onto each
/// eigenspace, so degenerate levels yield the same member that `select_state` picks.
inline std::vector<double> reference_start(int n_sites, std::optional<double> sector = std::nullopt) {
    auto full = detail::reference_vector(std::size_t{1} << n_sites, n_sites);
    if (!sector) return full;
    const SzSector basis(n_sites, *sector);
    std::vector<double> v(basis.dim());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = full[basis.state(k)];
    return v;
}

/// Picks a state out of an eigen-decomposition.
///
/// Ground: the lowest vector. If the two lowest levels agree within `degeneracy_tol`, the
/// member of the degenerate space that is even under a global spin flip.
///
/// First excited: the lowest level above E0 + degeneracy_tol. Inside a degenerate multiplet
/// the member is the projection of a fixed reference vector supported on S^z = 0, so the
/// choice depends only on the eigenspace, not on the solver's basis for it.
inline Statevector select_state(const EigResult& res, WhichState which, double degeneracy_tol = 1e-8) {
    if (res.eigenvalues.empty()) throw std::invalid_argument("no eigenpairs to select from");
    const double e0 = res.eigenvalues.front();
    auto group_from = [&](std::size_t first) {
        std::vector<const std::vector<double>*> g;
        for (std::size_t i = first; i < res.eigenvalues.size(); ++i) {
            if (res.eigenvalues[i] - res.eigenvalues[first] <= degeneracy_tol) g.push_back(&res.eigenvectors[i]);
        }
        return g;
    };
    if (which == WhichState::Ground) {
        const auto group = group_from(0);
        if (group.size() < 2) return detail::normalized_state(res.eigenvectors.front());
        std::vector<double> best;
        double best_norm = 0.0;
        for (const auto* v : group) {
            auto even = global_flip<double>(*v);
            for (std::size_t i = 0; i < even.size(); ++i) even[i] = 0.5 * (even[i] + (*v)[i]);
            const double n = detail::norm(even);
            if (n > best_norm + 1e-12) {
                best_norm = n;
                best = std::move(even);
            }
        }
        return detail::normalized_state(best_norm > 1e-6 ? best : res.eigenvectors.front());
    }
    std::size_t first = 0;
    while (first < res.eigenvalues.size() && res.eigenvalues[first] <= e0 + degeneracy_tol) ++first;
    if (first == res.eigenvalues.size()) {
        throw std::out_of_range("first excited level not resolved; request more eigenpairs");
    }
    const auto group = group_from(first);
    if (group.size() < 2) return detail::normalized_state(res.eigenvectors[first]);
    const auto ref = detail::reference_vector(res.eigenvectors[first].size(), res.n_sites);
    const auto member = detail::project_onto(group, ref);
    if (detail::norm(member) < 1e-9) return detail::normalized_state(res.eigenvectors[first]);
    return detail::normalized_state(member);
}

// ---------------------------------------------------------------------------
// Entanglement
// ---------------------------------------------------------------------------

using DensityMatrix = Eigen::MatrixXcd;

/// rho_A = Tr_B |psi><psi| with A the first N/2 qubits.
inline DensityMatrix partial_trace_half(const Statevector& state) {
    const int n = state.n_qubits();
    if (n % 2 != 0) throw std::invalid_argument("half-cut partial trace needs an even qubit count");
    const std::size_t da = std::size_t{1} << (n / 2);
    const auto amps = state.amplitudes();
    // psi as a da x db matrix: row = qubits of A (most significant), column = qubits of B.
    Eigen::Map<const Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> m(amps.data(), da, da);
    return m * m.adjoint();
}

/// -sum lambda log2 lambda over the spectrum of rho, in bits.
inline double von_neumann_entropy(const DensityMatrix& rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) throw std::invalid_argument("density matrix must be square");
    const double trace = rho.trace().real();
    if (std::abs(trace - 1.0) > 1e-6) {
        throw std::invalid_argument("density matrix trace " + std::to_string(trace) + " differs from 1");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8) throw std::invalid_argument("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho, Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double l = es.eigenvalues()(i);
        if (l > 0.0) s -= l * std::log2(l);
    }
    return std::max(s, 0.0);
}

inline double half_cut_entropy(const Statevector& state) { return von_neumann_entropy(partial_trace_half(state)); }

}  // namespace qhash
