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
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include "qhash/spectra.hpp"

// Reference implementations used to check the library. They favour directness over speed
// and share no code with the implementation under test.
namespace oracle {

using cd = std::complex<double>;
using Dense = Eigen::MatrixXcd;

inline Dense kron(const Dense& a, const Dense& b) {
    Dense out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    return out;
}

inline Dense identity(int n) { return Dense::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n); }

/// Operator `m` acting on qubit q of n, qubit 0 being the leftmost Kronecker factor.
inline Dense embed(const Dense& m, int q, int n) {
    Dense out = Dense::Identity(1, 1);
    for (int k = 0; k < n; ++k) out = kron(out, k == q ? m : Dense::Identity(2, 2));
    return out;
}

/// a on qubit i times b on qubit j (i != j), as a single Kronecker product.
inline Dense embed_pair(const Dense& a, int i, const Dense& b, int j, int n) {
    Dense out = Dense::Identity(1, 1);
    for (int k = 0; k < n; ++k) out = kron(out, k == i ? a : k == j ? b : Dense::Identity(2, 2));
    return out;
}

inline Dense pauli_x() {
    Dense m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Dense pauli_y() {
    Dense m(2, 2);
    m << 0, cd(0, -1), cd(0, 1), 0;
    return m;
}
inline Dense pauli_z() {
    Dense m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

/// Spin-1/2 Hamiltonian from Kronecker products of S = sigma / 2. Bit value 0 is spin up.
inline Dense dense_hamiltonian(const qhash::HamiltonianSpec& H) {
    const int n = H.n_sites;
    Dense out = Dense::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
    const Dense sx = 0.5 * pauli_x(), sy = 0.5 * pauli_y(), sz = 0.5 * pauli_z();
    for (const auto& t : H.terms) {
        switch (t.kind) {
            case qhash::TermKind::ZZ:
                out += t.coupling * embed_pair(sz, t.i, sz, t.j, n);
                break;
            case qhash::TermKind::XField:
                out += t.coupling * embed(sx, t.i, n);
                break;
            case qhash::TermKind::Heisenberg:
                out += t.coupling * (embed_pair(sx, t.i, sx, t.j, n) + embed_pair(sy, t.i, sy, t.j, n) +
                                     embed_pair(sz, t.i, sz, t.j, n));
                break;
        }
    }
    return out;
}

inline std::vector<double> dense_spectrum(const qhash::HamiltonianSpec& H) {
    Eigen::SelfAdjointEigenSolver<Dense> es(dense_hamiltonian(H), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

/// Eigenvalues of the block with a fixed number of down spins (bit value 1).
inline std::vector<double> dense_sector_spectrum(const qhash::HamiltonianSpec& H, int down) {
    const Dense full = dense_hamiltonian(H);
    std::vector<Eigen::Index> idx;
    for (Eigen::Index x = 0; x < full.rows(); ++x) {
        if (std::popcount(static_cast<unsigned long long>(x)) == down) idx.push_back(x);
    }
    Dense block(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) {
        for (std::size_t b = 0; b < idx.size(); ++b) block(a, b) = full(idx[a], idx[b]);
    }
    Eigen::SelfAdjointEigenSolver<Dense> es(block, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

/// Ground energy of J sum S^z_i S^z_{i+1} + h sum S^x_i on a ring (even-parity sector of the
/// Jordan-Wigner fermions), valid for any sign of J.
inline double tfim_free_fermion_ground(int n, double j, double h) {
    const double jp = std::abs(j) / 4.0;
    const double g = h / 2.0;
    double e = 0.0;
    for (int m = 0; m < n; ++m) {
        const double k = std::numbers::pi * (2.0 * m + 1.0) / n;
        e -= std::sqrt(jp * jp + g * g - 2.0 * jp * g * std::cos(k));
    }
    return e;
}

/// rho_A over the first n_a qubits by explicit summation over the complement.
inline Dense brute_partial_trace(const std::vector<cd>& psi, int n, int n_a) {
    const std::size_t da = std::size_t{1} << n_a, db = std::size_t{1} << (n - n_a);
    Dense rho = Dense::Zero(da, da);
    for (std::size_t a = 0; a < da; ++a) {
        for (std::size_t a2 = 0; a2 < da; ++a2) {
            cd acc = 0.0;
            for (std::size_t b = 0; b < db; ++b) acc += psi[a * db + b] * std::conj(psi[a2 * db + b]);
            rho(a, a2) = acc;
        }
    }
    return rho;
}

/// Half-cut entropy of the Dicke state from its hypergeometric Schmidt weights.
inline double dicke_entropy(int n, int d) {
    const int na = n / 2;
    double s = 0.0;
    for (int k = std::max(0, d - (n - na)); k <= std::min(d, na); ++k) {
        const double w = qhash::binomial(na, k) * qhash::binomial(n - na, d - k) / qhash::binomial(n, d);
        if (w > 0) s -= w * std::log2(w);
    }
    return s;
}

/// Spearman rank correlation (average ranks for ties).
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> order(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < order.size();) {
            std::size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
            for (std::size_t k = i; k <= j; ++k) r[order[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a), rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i] / n;
        mb += rb[i] / n;
    }
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

/// Partial dissimilarities straight from the definitions: explicit block-mean arrays of
/// full length and their normalized dot products.
inline std::vector<double> naive_partials(const std::vector<double>& s, int lambda, int k_max) {
    const std::size_t len = s.size();
    std::vector<std::vector<double>> b{s};
    std::size_t block = 1;
    for (int k = 1; k <= k_max + 1; ++k) {
        block *= static_cast<std::size_t>(lambda);
        std::vector<double> next(len);
        for (std::size_t start = 0; start < len; start += block) {
            double mean = 0.0;
            for (std::size_t i = start; i < start + block; ++i) mean += s[i];
            mean /= static_cast<double>(block);
            for (std::size_t i = start; i < start + block; ++i) next[i] = mean;
        }
        b.push_back(std::move(next));
    }
    auto o = [&](int m, int k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < len; ++i) acc += b[m][i] * b[k][i];
        return acc / static_cast<double>(len);
    };
    std::vector<double> d;
    for (int k = 0; k <= k_max; ++k) d.push_back(std::abs(o(k + 1, k) - 0.5 * (o(k, k) + o(k + 1, k + 1))));
    return d;
}

}  // namespace oracle
