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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "qhash/dissim.hpp"
#include "qhash/qstate.hpp"
#include "qhash/rng.hpp"
#include "qhash/sampler.hpp"

using namespace qhash;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<double> iid_pm1(std::size_t len, std::uint64_t seed) {
    CounterRng rng(seed, 0);
    std::vector<double> v(len);
    for (auto& x : v) x = rng.next_below(2) ? 1.0 : -1.0;
    return v;
}

/// Coarse-grained arrays b^0 ... b^K from repeated full-length steps.
std::vector<std::vector<double>> flow(const std::vector<double>& s, int lambda, int K) {
    std::vector<std::vector<double>> b{s};
    for (int k = 1; k <= K; ++k) b.push_back(coarse_grain_step(b.back(), lambda, k));
    return b;
}

BitstringArray shuffle_shots(const BitstringArray& a, std::uint64_t seed) {
    std::vector<int> order(a.n_shots);
    for (int i = 0; i < a.n_shots; ++i) order[i] = i;
    CounterRng rng(seed, 0);
    for (int i = a.n_shots - 1; i > 0; --i) std::swap(order[i], order[rng.next_below(i + 1)]);
    BitstringArray out = a;
    for (int i = 0; i < a.n_shots; ++i) {
        const auto s = a.shot(order[i]);
        std::copy(s.begin(), s.end(), out.values.begin() + static_cast<std::ptrdiff_t>(i) * a.n_qubits);
    }
    return out;
}

}  // namespace

TEST_CASE("coarse_grain_step examples", "[dissim]") {
    const std::vector<double> a{-1, -1, 1, 1};
    CHECK(coarse_grain_step(a, 2, 1) == a);
    const std::vector<double> b{1, -1, 1, -1};
    CHECK(coarse_grain_step(b, 2, 1) == std::vector<double>{0, 0, 0, 0});
    const std::vector<double> c{1, 1, -1, 1};
    CHECK(coarse_grain_step(coarse_grain_step(c, 2, 1), 2, 2) == std::vector<double>{0.5, 0.5, 0.5, 0.5});
    CHECK_THROWS_AS(coarse_grain_step(c, 2, 0), std::invalid_argument);
    CHECK_THROWS_AS(coarse_grain_step(c, 1, 1), std::invalid_argument);
}

TEST_CASE("coarse-graining is idempotent on its own block structure", "[dissim][property]") {
    const auto s = iid_pm1(1024, 3);
    for (int lambda : {2, 4}) {
        const auto b = flow(s, lambda, 3);
        for (int k = 1; k <= 3; ++k) CHECK(coarse_grain_step(b[k], lambda, k) == b[k]);
    }
}

TEST_CASE("overlap examples", "[dissim]") {
    const std::vector<double> ones(8, 1.0);
    CHECK(overlap(ones, ones) == 1.0);
    const std::vector<double> b{1, -1, 1, -1}, z{0, 0, 0, 0};
    CHECK(overlap(b, z) == 0.0);
    const std::vector<double> p{1, 1, -1, -1}, q{1, 0, 0, -1};
    CHECK(overlap(p, q) == 0.5);
    const std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(overlap(p, three), std::invalid_argument);
    CHECK_THROWS_AS(overlap(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("partial_dissimilarity examples", "[dissim]") {
    const std::vector<double> c(16, 1.0);
    CHECK(partial_dissimilarity(c, coarse_grain_step(c, 2, 1)) == 0.0);
    const std::vector<double> b{1, -1, 1, -1};
    CHECK(partial_dissimilarity(b, coarse_grain_step(b, 2, 1)) == 0.5);
    const auto s = iid_pm1(1 << 17, 8);
    CHECK_THAT(partial_dissimilarity(s, coarse_grain_step(s, 2, 1)), WithinAbs(0.25, 0.01));
    const std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(partial_dissimilarity(b, three), std::invalid_argument);
    // Not a coarse-graining: the cross-check identity fails.
    const std::vector<double> other{1, 1, 1, 1};
    CHECK_THROWS_AS(partial_dissimilarity(b, other), std::invalid_argument);
}

TEST_CASE("Monte-Carlo oracle: iid +-1 arrays follow the analytic law", "[dissim][oracle]") {
    // Average over independent arrays to beat the per-array noise at coarse scales.
    const int reps = 40;
    const int K = 10;
    std::vector<double> mean(K, 0.0);
    for (int r = 0; r < reps; ++r) {
        const auto p = dissimilarity_profile(iid_pm1(1 << 14, 100 + r), {.lambda = 2, .k_max = K});
        for (int k = 0; k < K; ++k) mean[k] += p.partial[k] / reps;
    }
    for (int k = 0; k < 6; ++k) {
        INFO("k=" << k);
        CHECK_THAT(mean[k], WithinRel(analytic_random_profile(2, 1.0, 0.0, k), 0.05));
    }
}

TEST_CASE("profile agrees with the naive full-length definition", "[dissim][oracle]") {
    for (int lambda : {2, 3, 4}) {
        const auto s = iid_pm1(static_cast<std::size_t>(std::pow(lambda, 6)), 40 + lambda);
        const auto p = dissimilarity_profile(s, {.lambda = lambda, .k_max = std::nullopt});
        const auto naive = oracle::naive_partials(s, lambda, static_cast<int>(p.partial.size()) - 1);
        REQUIRE(naive.size() == p.partial.size());
        for (std::size_t k = 0; k < naive.size(); ++k) CHECK_THAT(p.partial[k], WithinAbs(naive[k], 1e-12));
    }
    // Real-valued input as well.
    CounterRng rng(5, 0);
    std::vector<double> r(4096);
    for (auto& x : r) x = rng.next_uniform(-2.0, 3.0);
    const auto p = dissimilarity_profile(r, {});
    const auto naive = oracle::naive_partials(r, 2, static_cast<int>(p.partial.size()) - 1);
    for (std::size_t k = 0; k < naive.size(); ++k) CHECK_THAT(p.partial[k], WithinAbs(naive[k], 1e-12));
}

TEST_CASE("averaging and telescoping identities", "[dissim][property]") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        for (int lambda : {2, 4}) {
            const auto s = iid_pm1(1 << 12, seed);
            const int K = max_scale(s.size(), lambda);
            const auto b = flow(s, lambda, K);
            double tele = 0.0;
            for (int k = 1; k <= K; ++k) CHECK_THAT(overlap(b[k], b[k]), WithinAbs(overlap(b[k], b[k - 1]), 1e-12));
            for (int k = 0; k < K; ++k) tele += 0.5 * (overlap(b[k], b[k]) - overlap(b[k + 1], b[k + 1]));
            CHECK_THAT(tele, WithinAbs(0.5 * (overlap(b[0], b[0]) - overlap(b[K], b[K])), 1e-12));
            const auto p = dissimilarity_profile(s, {.lambda = lambda, .k_max = std::nullopt, .include_k0_in_total = true});
            CHECK_THAT(p.total, WithinAbs(tele, 1e-12));
        }
    }
}

TEST_CASE("profile invariants", "[dissim]") {
    const std::vector<double> c(1024, -1.0);
    const auto p = dissimilarity_profile(c, {});
    for (double d : p.partial) CHECK(d == 0.0);
    CHECK(p.total == 0.0);
    CHECK(p.partial.size() == 10u);

    const auto s = iid_pm1(4096, 2);
    const auto q = dissimilarity_profile(s, {});
    double sum = 0.0;
    for (std::size_t k = 1; k < q.partial.size(); ++k) sum += q.partial[k];
    CHECK(q.total == sum);
    for (double d : q.partial) CHECK(d >= 0.0);
    const auto q0 = dissimilarity_profile(s, {.k_max = std::nullopt, .include_k0_in_total = true});
    CHECK_THAT(q0.total, WithinAbs(sum + q.partial[0], 1e-15));
    CHECK_THAT(q0.total, WithinAbs(0.5, 0.03));
    CHECK_THAT(q.total, WithinAbs(0.25, 0.02));
}

TEST_CASE("k range and remainder policy", "[dissim]") {
    const auto s = iid_pm1(1000, 1);
    const auto p = dissimilarity_profile(s, {});
    CHECK(p.partial.size() == 9u);
    CHECK_FALSE(p.warnings.empty());
    CHECK_THROWS_AS(dissimilarity_profile(s, {.k_max = std::nullopt, .allow_truncation = false}), std::invalid_argument);
    CHECK_THROWS_AS(dissimilarity_profile(std::vector<double>{1, 1, 1}, {}), std::invalid_argument);
    CHECK_THROWS_AS(dissimilarity_profile(s, {.k_max = 10}), std::invalid_argument);
    CHECK_THROWS_AS(dissimilarity_profile(s, {.k_max = 0}), std::invalid_argument);
    CHECK(dissimilarity_profile(s, {.k_max = 3}).partial.size() == 3u);
    CHECK(dissimilarity_profile(iid_pm1(1024, 1), {}).warnings.empty());
    CHECK_THROWS_AS(dissimilarity_profile(s, {.lambda = 1, .k_max = std::nullopt}), std::invalid_argument);
    CHECK(max_scale(1024, 2) == 10);
    CHECK(max_scale(1023, 2) == 9);
    CHECK(max_scale(4096, 4) == 6);
}

TEST_CASE("analytic_random_profile", "[dissim]") {
    CHECK(analytic_random_profile(2, 1.0, 0.0, 0) == 0.25);
    CHECK(analytic_random_profile(2, 1.0, 0.0, 3) == 0.03125);
    CHECK_THAT(analytic_random_profile(4, 0.25, 0.5, 1), WithinAbs(0.0234375, 1e-15));
    CHECK_THROWS_AS(analytic_random_profile(1, 1.0, 0.0, 0), std::invalid_argument);
}

TEST_CASE("GHZ and Dicke profiles vanish at the analytic scales", "[dissim]") {
    const auto ghz = dissimilarity_profile(sample_z(build_cat_state(16, std::numbers::pi / 2), MeasurementConfig::z(8192, 1)));
    for (int k = 0; k < 4; ++k) CHECK(ghz.partial[k] == 0.0);
    CHECK(ghz.partial[4] > 0.0);
    for (int d : {1, 2, 4, 8}) {
        const auto p = dissimilarity_profile(sample_z(build_dicke_state(16, d), MeasurementConfig::z(8192, 2)));
        for (std::size_t k = 4; k < p.partial.size(); ++k) CHECK(p.partial[k] == 0.0);
        CHECK(*std::max_element(p.partial.begin(), p.partial.begin() + 4) > 0.0);
    }
}

TEST_CASE("shuffling whole shots leaves within-shot scales unchanged", "[dissim][property]") {
    const std::vector<Statevector> states{build_cat_state(16, std::numbers::pi / 2), build_dicke_state(16, 4),
                                          build_dicke_state(16, 8)};
    for (const auto& st : states) {
        const auto a = sample_z(st, MeasurementConfig::z(2048, 9));
        const auto pa = dissimilarity_profile(a);
        const auto pb = dissimilarity_profile(shuffle_shots(a, 17));
        for (int k = 0; k < 4; ++k) CHECK(pa.partial[k] == pb.partial[k]);
    }
}

TEST_CASE("bitstring profiles carry provenance", "[dissim]") {
    const auto rec = sample_z(build_uniform_state(4), MeasurementConfig::z(64, 33));
    const auto p = dissimilarity_profile(rec);
    CHECK(p.basis_tag == "Z");
    CHECK(p.seed == 33u);
    CHECK(p.length == 256u);
    CHECK(p.lambda == 2);
}
