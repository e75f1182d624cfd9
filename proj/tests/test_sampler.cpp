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

#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "qhash/dissim.hpp"
#include "qhash/qstate.hpp"
#include "qhash/rng.hpp"
#include "qhash/sampler.hpp"

using namespace qhash;
using Catch::Matchers::WithinAbs;

namespace {

constexpr double kPi = std::numbers::pi;

Statevector random_state(int n, std::uint64_t seed) {
    CounterRng rng(seed, 0);
    std::vector<complex> amps(std::size_t{1} << n);
    for (auto& a : amps) a = {rng.next_unit() - 0.5, rng.next_unit() - 0.5};
    return init_from_amplitudes(amps);
}

std::size_t index_of(std::span<const std::int8_t> shot) {
    std::size_t x = 0;
    for (auto b : shot) x = (x << 1) | (b > 0 ? 1U : 0U);
    return x;
}

/// Rotated-state probabilities for one shot, built gate by gate.
std::vector<double> rotated_probabilities(Statevector s, double th, double ph, double la) {
    for (int q = 0; q < s.n_qubits(); ++q) s.apply(GateOp::u3(q, th, ph, la));
    return s.probabilities();
}

}  // namespace

TEST_CASE("counter RNG is a pure function of (seed, stream, position)", "[sampler][rng]") {
    CounterRng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        CHECK(x != c.next_u64());
        CHECK(x != d.next_u64());
    }
    CounterRng u(1, 0);
    double mean = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.next_unit();
        REQUIRE(v >= 0.0);
        REQUIRE(v < 1.0);
        mean += v / 100000;
    }
    CHECK_THAT(mean, WithinAbs(0.5, 0.005));
    CounterRng w(2, 0);
    std::vector<int> counts(3, 0);
    for (int i = 0; i < 30000; ++i) ++counts[w.next_below(3)];
    for (int c3 : counts) CHECK(std::abs(c3 - 10000) < 400);
}

TEST_CASE("sample_z examples", "[sampler]") {
    const auto zero = sample_z(Statevector(16), MeasurementConfig::z(8, 1));
    CHECK(zero.size() == 128);
    for (auto v : zero.values) REQUIRE(v == -1);

    const auto ghz = sample_z(build_cat_state(16, kPi / 2), MeasurementConfig::z(1000, 2));
    int ones = 0;
    for (int i = 0; i < ghz.n_shots; ++i) {
        const auto s = ghz.shot(i);
        for (auto v : s) REQUIRE(v == s[0]);
        ones += s[0] > 0;
    }
    CHECK(ones > 400);
    CHECK(ones < 600);

    const auto x = sample_z(build_uniform_state(16), MeasurementConfig::z(8192, 3));
    double plus = 0;
    for (auto v : x.values) plus += v > 0;
    CHECK_THAT(plus / static_cast<double>(x.size()), WithinAbs(0.5, 0.02));

    CHECK(x.basis_tag == "Z");
    CHECK(x.seed_record == 3);
    CHECK_NOTHROW(x.validate());
}

TEST_CASE("sampling is reproducible bit for bit", "[sampler][property]") {
    const auto psi = random_state(6, 9);
    CHECK(sample_z(psi, MeasurementConfig::z(500, 4)) == sample_z(psi, MeasurementConfig::z(500, 4)));
    CHECK(sample_random_basis(psi, MeasurementConfig::random(200, 4)) ==
          sample_random_basis(psi, MeasurementConfig::random(200, 4)));
    CHECK_FALSE(sample_z(psi, MeasurementConfig::z(500, 4)).values == sample_z(psi, MeasurementConfig::z(500, 5)).values);
}

TEST_CASE("invalid sampling inputs are rejected", "[sampler]") {
    const std::vector<complex> amps{1.0, 1.0};
    CHECK_THROWS_AS(Statevector(1, amps), std::invalid_argument);
    CHECK_THROWS_AS(sample_z(Statevector(2), MeasurementConfig::z(0, 1)), std::invalid_argument);
    CHECK_THROWS_AS(sample_random_basis(Statevector(2), MeasurementConfig::random(0, 1)), std::invalid_argument);
}

TEST_CASE("empirical Z frequencies match |psi|^2", "[sampler][property][slow]") {
    for (int n : {1, 2, 4}) {
        const auto psi = random_state(n, 100 + n);
        const int shots = 1000000;
        const auto rec = sample_z(psi, MeasurementConfig::z(shots, 77));
        std::vector<double> counts(psi.dim(), 0.0);
        for (int i = 0; i < shots; ++i) counts[index_of(rec.shot(i))] += 1;
        const auto p = psi.probabilities();
        for (std::size_t x = 0; x < p.size(); ++x) {
            const double se = std::sqrt(p[x] * (1 - p[x]) / shots);
            INFO("n=" << n << " x=" << x);
            CHECK(std::abs(counts[x] / shots - p[x]) < 3 * se + 1e-12);
        }
    }
}

TEST_CASE("identity rotation reproduces sample_z", "[sampler]") {
    for (auto method : {RandomBasisMethod::ChainRule, RandomBasisMethod::InverseCdf}) {
        const auto psi = random_state(1, 3);
        auto cfg = MeasurementConfig::random(2000, 12);
        cfg.angle_ranges = {{{0, 0}, {0, 0}, {0, 0}}};
        const auto r = sample_random_basis(psi, cfg, method);
        const auto z = sample_z(psi, MeasurementConfig::z(2000, 12));
        CHECK(r.values == z.values);
    }
}

TEST_CASE("chain-rule and inverse-CDF draws select the same outcomes", "[sampler][oracle]") {
    const auto psi = random_state(8, 21);
    for (auto sampling : {AngleSampling::AreaUniform, AngleSampling::ParameterUniform}) {
        for (bool shared : {true, false}) {
            auto cfg = MeasurementConfig::random(300, 5);
            cfg.angle_sampling = sampling;
            cfg.shared_rotation_per_shot = shared;
            const auto a = sample_random_basis(psi, cfg, RandomBasisMethod::ChainRule);
            const auto b = sample_random_basis(psi, cfg, RandomBasisMethod::InverseCdf);
            // Rounding can move a uniform across a CDF boundary; allow a handful of flips.
            int differ = 0;
            for (int i = 0; i < a.n_shots; ++i) differ += index_of(a.shot(i)) != index_of(b.shot(i));
            CHECK(differ <= 1);
        }
    }
}

TEST_CASE("random-basis frequencies match the rotated distribution", "[sampler][oracle]") {
    // With a collapsed angle range every shot sees the same rotation.
    const auto psi = random_state(3, 8);
    auto cfg = MeasurementConfig::random(400000, 19);
    cfg.angle_ranges = {{{0.9, 0.9}, {0.4, 0.4}, {1.2, 1.2}}};
    cfg.angle_sampling = AngleSampling::ParameterUniform;
    const auto rec = sample_random_basis(psi, cfg);
    const auto p = rotated_probabilities(psi, 0.9, 0.4, 1.2);
    std::vector<double> counts(p.size(), 0.0);
    for (int i = 0; i < rec.n_shots; ++i) counts[index_of(rec.shot(i))] += 1;
    for (std::size_t x = 0; x < p.size(); ++x) {
        const double se = std::sqrt(p[x] * (1 - p[x]) / rec.n_shots);
        CHECK(std::abs(counts[x] / rec.n_shots - p[x]) < 4 * se + 1e-12);
    }
}

TEST_CASE("area-uniform polar angles have uniform cos(theta)", "[sampler]") {
    CounterRng rng(4, 0);
    const Interval r{0.0, kPi / 2};
    std::vector<int> bins(10, 0);
    for (int i = 0; i < 50000; ++i) {
        const double th = detail::draw_polar(rng, r, AngleSampling::AreaUniform);
        REQUIRE(th >= 0.0);
        REQUIRE(th <= kPi / 2);
        ++bins[std::min(9, static_cast<int>(std::cos(th) * 10))];
    }
    for (int b : bins) CHECK(std::abs(b - 5000) < 350);
}

TEST_CASE("random-basis D of product states", "[sampler][slow]") {
    const auto prof = dissimilarity_profile(sample_random_basis(Statevector(16), MeasurementConfig::random(8192, 1)));
    CHECK_THAT(prof.total, WithinAbs(0.204, 0.01));
    const auto xprof =
        dissimilarity_profile(sample_random_basis(build_uniform_state(16), MeasurementConfig::random(8192, 2)));
    CHECK_THAT(xprof.total, WithinAbs(0.204, 0.01));
}

TEST_CASE("concat_shots", "[sampler]") {
    const std::vector<std::vector<int>> rows{{0, 1}, {1, 0}};
    const auto a = concat_shots(rows);
    CHECK(a.values == std::vector<std::int8_t>{-1, 1, 1, -1});
    CHECK(a.n_qubits == 2);
    CHECK(a.n_shots == 2);
    const std::vector<std::vector<int>> one{{1, 1, 1}};
    CHECK(concat_shots(one).values == std::vector<std::int8_t>{1, 1, 1});
    CHECK_THROWS_AS(concat_shots(std::vector<std::vector<int>>{}), std::invalid_argument);
    const std::vector<std::vector<int>> ragged{{0, 1}, {1}};
    CHECK_THROWS_AS(concat_shots(ragged), std::invalid_argument);
    const std::vector<std::vector<int>> bad{{0, 2}};
    CHECK_THROWS_AS(concat_shots(bad), std::invalid_argument);
}

TEST_CASE("measurement config validation", "[sampler]") {
    auto c = MeasurementConfig::random(10, 1);
    c.angle_ranges[1] = {1.0, 0.5};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c.angle_ranges[1] = {0.0, 7.0};
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    CHECK(basis_from_string("Random") == Basis::Random);
    CHECK_THROWS_AS(basis_from_string("X"), std::invalid_argument);
}
