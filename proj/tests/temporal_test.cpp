// Copyright 2026 The fiberloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fiberloop/temporal.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "gtest/gtest.h"

#include "fiberloop/loss_model.hpp"
#include "test_util.hpp"

using namespace fiberloop;
using fiberloop::testing::simpson;

namespace {

double overlap_quadrature(double d1, double d2, double c) {
    WavePacket psi{c};
    double centre = 0.5 * (d1 + d2);
    return simpson([&](double x) { return psi(x - d1) * psi(x - d2); }, centre - 20 * c,
                   centre + 20 * c, 4000);
}

std::vector<unsigned> random_occupation(std::size_t m, std::size_t n, Rng& rng) {
    std::vector<unsigned> k(m, 0);
    for (std::size_t p = 0; p < n; ++p) k[rng() % m]++;
    return k;
}

/// Single photon entering bin `input` with shift eps: every path through
/// the m+1 beamsplitters, keyed by output bin, as (amplitude, loop entries).
struct Path {
    Complex amplitude;
    int entries;
};
std::map<int, Path> enumerate_paths(const SwitchingSequence& seq, int input) {
    std::map<int, Path> out;
    const int m = static_cast<int>(seq.modes());
    const auto& first = seq.setting(1, static_cast<std::size_t>(input));
    if (first.u11() != Complex(0)) out[input - 1] = {first.u11(), 0};
    Complex amp = first.u12();
    int entries = 1;
    for (int t = input + 1; t <= m + 1 && amp != Complex(0); ++t) {
        const auto& bs = seq.setting(1, static_cast<std::size_t>(t));
        if (bs.u21() != Complex(0)) out[t - 1] = {amp * bs.u21(), entries};
        amp *= bs.u22();
        ++entries;
    }
    return out;
}

}  // namespace

TEST(wave_packet, normalized) {
    for (double c : {0.3, 1.0, 2.5}) {
        WavePacket psi{c};
        double norm = simpson([&](double x) { return psi(x) * psi(x); }, -30 * c, 30 * c, 6000);
        EXPECT_NEAR(norm, 1.0, 1e-10);
    }
}

TEST(gaussian_overlap, matches_quadrature) {
    for (double c : {1.0, 0.7}) {
        for (int k = 0; k <= 32; ++k) {
            double d = (-4.0 + 8.0 * k / 32) * c;
            EXPECT_NEAR(gaussian_overlap(0.3, 0.3 + d, c), overlap_quadrature(0.3, 0.3 + d, c), 1e-8);
        }
    }
}

TEST(gaussian_overlap, fixtures) {
    EXPECT_EQ(gaussian_overlap(0.4, 0.4, 1.3), 1.0);
    EXPECT_NEAR(gaussian_overlap(0.0, 2.0, 1.0), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(overlap_quadrature(0.0, 2.0, 1.0), 0.36787944117144233, 1e-10);
    EXPECT_EQ(gaussian_overlap(1.0, -0.5, 0.8), gaussian_overlap(-0.5, 1.0, 0.8));
}

TEST(loop_traversals, cases) {
    EXPECT_EQ(loop_traversals(2, 1), 0);
    EXPECT_EQ(loop_traversals(2, 2), 1);
    EXPECT_EQ(loop_traversals(1, 4), 4);
    EXPECT_EQ(loop_traversals(3, 1), -1);
}

TEST(mismatch_params, validation) {
    MismatchParams p;
    EXPECT_NO_THROW(p.validate());
    p.sigma = -1;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.c = 0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.delta = 10.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(evolve, identity_map_single_configuration) {
    auto seq = SwitchingSequence::single_pass(2, {BeamsplitterSetting::swap()});
    MismatchParams params;
    params.delta = 0.37;
    unsigned occ[] = {1, 1};
    auto out = evolve_pulse_train(seq, TemporalState::input(2, occ), params);
    ASSERT_EQ(out.configurations().size(), 1u);
    const auto& [photons, amp] = *out.configurations().begin();
    ASSERT_EQ(photons.size(), 2u);
    EXPECT_EQ(photons[0], (PhotonLabel{Region::C, 1, 0.37}));
    EXPECT_EQ(photons[1], (PhotonLabel{Region::C, 2, 0.37}));
    EXPECT_EQ(amp, Complex(1));
}

TEST(evolve, zero_mismatch_reproduces_spatial_rows) {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t m = 1 + trial % 5;
        auto seq = random_sequence(m, 1, rng);
        auto v = build_single_loop_map(seq);
        for (std::size_t i = 1; i <= m; ++i) {
            std::vector<unsigned> occ(m, 0);
            occ[i - 1] = 1;
            auto out = evolve_pulse_train(seq, TemporalState::input(m, occ), MismatchParams{});
            for (std::size_t j = 1; j <= m; ++j) {
                PhotonMultiset key{{Region::C, static_cast<int>(j), 0.0}};
                auto it = out.configurations().find(key);
                Complex amp = it == out.configurations().end() ? Complex(0) : it->second;
                EXPECT_LT(std::abs(amp - v.entry(i, j)), 1e-12);
                EXPECT_NEAR(out.bin_probability({static_cast<int>(j)}), std::norm(v.entry(i, j)), 1e-12);
            }
        }
    }
}

TEST(evolve, normalization) {
    Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t m = 1 + rng() % 4;
        std::size_t n = 1 + rng() % 3;
        auto seq = random_sequence(m, 1, rng);
        auto occ = random_occupation(m, n, rng);
        std::vector<double> eps(m);
        for (auto& e : eps) e = 0.5 * (uniform01(rng) - 0.5);
        MismatchParams params;
        params.delta = trial % 2 ? 0.0 : 0.4 * (uniform01(rng) - 0.5);
        auto out = evolve_pulse_train(seq, TemporalState::input(m, occ, eps), params);
        EXPECT_NEAR(out.norm_squared(), 1.0, 1e-10) << "m=" << m << " n=" << n;
        for (const auto& [photons, amp] : out.configurations()) {
            EXPECT_EQ(photons.size(), n);
        }
    }
}

TEST(evolve, shifts_match_path_enumeration) {
    Rng rng(43);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t m = 1 + trial % 3;
        auto seq = random_sequence(m, 1, rng);
        MismatchParams params;
        params.delta = 0.2 + 0.1 * uniform01(rng);
        for (std::size_t i = 1; i <= m; ++i) {
            double eps = 0.3 * (uniform01(rng) - 0.5);
            std::vector<unsigned> occ(m, 0);
            std::vector<double> shifts(m, 0.0);
            occ[i - 1] = 1;
            shifts[i - 1] = eps;
            auto out = evolve_pulse_train(seq, TemporalState::input(m, occ, shifts), params);
            auto paths = enumerate_paths(seq, static_cast<int>(i));
            EXPECT_EQ(out.configurations().size(), paths.size());
            for (const auto& [photons, amp] : out.configurations()) {
                ASSERT_EQ(photons.size(), 1u);
                const auto& label = photons[0];
                auto it = paths.find(label.time_bin);
                ASSERT_NE(it, paths.end());
                EXPECT_NEAR(label.shift, eps + it->second.entries * params.delta, 1e-12);
                EXPECT_LT(std::abs(amp - it->second.amplitude), 1e-12);
                EXPECT_EQ(it->second.entries,
                          loop_traversals(i, static_cast<std::size_t>(label.time_bin)));
            }
        }
    }
}

TEST(evolve, multi_photon_shifts_come_from_some_path) {
    Rng rng(47);
    for (int trial = 0; trial < 30; ++trial) {
        std::size_t m = 2 + trial % 2;
        auto seq = random_sequence(m, 1, rng);
        MismatchParams params;
        params.delta = 0.25;
        std::vector<double> eps(m);
        for (auto& e : eps) e = 0.2 * (uniform01(rng) - 0.5);
        auto out = evolve_pulse_train(seq, TemporalState::input(m, one_photon_per_mode(m), eps), params);
        for (const auto& [photons, amp] : out.configurations()) {
            for (const auto& p : photons) {
                bool found = false;
                for (std::size_t q = 1; q <= m && !found; ++q) {
                    int count = loop_traversals(q, static_cast<std::size_t>(p.time_bin));
                    found = count >= 0 && std::abs(p.shift - (eps[q - 1] + count * params.delta)) < 1e-12;
                }
                EXPECT_TRUE(found);
            }
        }
    }
}

TEST(evolve, errors) {
    Rng rng(1);
    auto seq = random_sequence(3, 1, rng);
    unsigned occ[] = {1, 1, 1};
    MismatchParams tight;
    tight.tau = 1.0;
    tight.delta = 0.09;
    EXPECT_THROW(evolve_pulse_train(seq, TemporalState::input(3, occ), tight), BinConfusionError);

    TemporalState loop_photon(3);
    loop_photon.add({{Region::B, 1, 0.0}}, 1.0);
    EXPECT_THROW(evolve_pulse_train(seq, loop_photon, MismatchParams{}), std::invalid_argument);

    unsigned occ2[] = {1, 1};
    EXPECT_THROW(evolve_pulse_train(seq, TemporalState::input(2, occ2), MismatchParams{}),
                 std::invalid_argument);
    EXPECT_THROW(evolve_pulse_train(random_sequence(3, 2, rng), TemporalState::input(3, occ),
                                    MismatchParams{}),
                 std::invalid_argument);
}

TEST(temporal_state, canonical_multisets) {
    TemporalState s(2);
    s.add({{Region::C, 2, 0.1}, {Region::C, 1, 0.0}}, 0.5);
    s.add({{Region::C, 1, 0.0}, {Region::C, 2, 0.1}}, 0.25);
    ASSERT_EQ(s.configurations().size(), 1u);
    EXPECT_EQ(s.configurations().begin()->second, Complex(0.75));
    EXPECT_THROW(TemporalState(0), std::invalid_argument);
}

TEST(jitter, zero_sigma_is_identity) {
    unsigned occ[] = {1, 2, 0};
    auto in = TemporalState::input(3, occ);
    Rng rng(3);
    auto draw = apply_jitter(in, 0.0, rng);
    EXPECT_EQ(draw.state.configurations(), in.configurations());
    EXPECT_EQ(draw.rejections, 0u);
    EXPECT_EQ(rng(), Rng(3)());
}

TEST(jitter, deterministic_and_shared_within_a_pulse) {
    unsigned occ[] = {2, 0, 1};
    auto in = TemporalState::input(3, occ);
    Rng a(8), b(8);
    auto da = apply_jitter(in, 0.5, a);
    auto db = apply_jitter(in, 0.5, b);
    EXPECT_EQ(da.state.configurations(), db.state.configurations());
    EXPECT_EQ(da.offsets, db.offsets);
    EXPECT_EQ(da.offsets[1], 0.0);
    const auto& photons = da.state.configurations().begin()->first;
    ASSERT_EQ(photons.size(), 3u);
    int bin1 = 0;
    for (const auto& p : photons) {
        EXPECT_EQ(p.shift, da.offsets[static_cast<std::size_t>(p.time_bin - 1)]);
        bin1 += p.time_bin == 1;
    }
    EXPECT_EQ(bin1, 2);
}

TEST(jitter, sample_standard_deviation) {
    const double sigma = 0.8;
    std::vector<unsigned> occ(10000, 1);
    Rng rng(101);
    std::size_t rejections = 0;
    auto eps = draw_jitter_offsets(occ, sigma, rng, 10.0, rejections);
    double mean = 0.0, ss = 0.0;
    for (double e : eps) mean += e;
    mean /= static_cast<double>(eps.size());
    for (double e : eps) ss += (e - mean) * (e - mean);
    double sd = std::sqrt(ss / static_cast<double>(eps.size() - 1));
    EXPECT_NEAR(sd, sigma, 0.02 * sigma);
    EXPECT_EQ(rejections, 0u);
}

TEST(jitter, redraws_beyond_the_bound) {
    std::vector<unsigned> occ(2000, 1);
    Rng rng(5);
    std::size_t rejections = 0;
    auto eps = draw_jitter_offsets(occ, 1.0, rng, 1.0, rejections);
    EXPECT_GT(rejections, 300u);
    for (double e : eps) EXPECT_LT(std::abs(e), 1.0);
    auto in = TemporalState::input(2, std::vector<unsigned>{1, 1});
    TemporalState inside(2);
    inside.add({{Region::C, 1, 0.0}}, 1.0);
    EXPECT_THROW(apply_jitter(inside, 0.1, rng), std::invalid_argument);
    EXPECT_THROW(draw_jitter_offsets(occ, -1.0, rng, 1.0, rejections), std::invalid_argument);
}

TEST(fidelity_expansion, fixtures) {
    Rng rng(61);
    auto seq = random_sequence(3, 1, rng);
    auto occ = one_photon_per_mode(3);
    auto ideal = evolve_pulse_train(seq, TemporalState::input(3, occ), MismatchParams{});
    EXPECT_NEAR(fidelity_expansion(ideal, ideal, 1.0), 1.0, 1e-12);

    const double delta = 0.45;
    MismatchParams params;
    params.delta = delta;
    auto one = SwitchingSequence::single_pass(1, {});
    unsigned k1[] = {1};
    auto i1 = evolve_pulse_train(one, TemporalState::input(1, k1), MismatchParams{});
    auto a1 = evolve_pulse_train(one, TemporalState::input(1, k1), params);
    EXPECT_NEAR(fidelity_expansion(i1, a1, 1.0), std::exp(-delta * delta / 2), 1e-12);

    auto id2 = SwitchingSequence::single_pass(2, {BeamsplitterSetting::swap()});
    unsigned k2[] = {1, 1};
    auto i2 = evolve_pulse_train(id2, TemporalState::input(2, k2), MismatchParams{});
    auto a2 = evolve_pulse_train(id2, TemporalState::input(2, k2), params);
    EXPECT_NEAR(fidelity_expansion(i2, a2, 1.0), std::exp(-delta * delta), 1e-12);
    EXPECT_THROW(fidelity_expansion(i1, a2, 1.0), std::invalid_argument);
}

TEST(fidelity_permanent, fixtures) {
    Rng rng(62);
    auto seq = random_sequence(4, 1, rng);
    EXPECT_NEAR(fidelity_permanent(seq, MismatchParams{}, one_photon_per_mode(4)), 1.0, 1e-12);

    const double delta = 0.45;
    MismatchParams params;
    params.delta = delta;
    auto id2 = SwitchingSequence::single_pass(2, {BeamsplitterSetting::swap()});
    EXPECT_NEAR(fidelity_permanent(id2, params, one_photon_per_mode(2)), std::exp(-delta * delta),
                1e-14);
    EXPECT_THROW(fidelity_permanent(id2, params, one_photon_per_mode(3)), std::invalid_argument);
}

TEST(fidelity, expansion_matches_permanent) {
    Rng rng(63);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t m = 1 + trial % 4;
        auto seq = random_sequence(m, 1, rng);
        MismatchParams params;
        params.c = 0.5 + uniform01(rng);
        params.delta = trial == 0 ? 0.3 * params.c : (uniform01(rng) - 0.5) * params.c;
        std::vector<double> eps(m);
        for (auto& e : eps) e = trial % 3 ? 0.4 * (uniform01(rng) - 0.5) : 0.0;
        auto occ = trial % 5 == 4 ? random_occupation(m, 3, rng) : one_photon_per_mode(m);
        auto ideal = evolve_pulse_train(seq, TemporalState::input(m, occ), MismatchParams{});
        auto actual = evolve_pulse_train(seq, TemporalState::input(m, occ, eps), params);
        double expansion = fidelity_expansion(ideal, actual, params.c);
        double perm = fidelity_permanent(seq, params, occ, eps);
        EXPECT_NEAR(expansion, perm, 1e-10) << "trial " << trial;
        EXPECT_GE(perm, 0.0);
        EXPECT_LE(perm, 1.0 + 1e-12);
        if (params.delta != 0.0) {
            EXPECT_LT(perm, 1.0);
        }
    }
}

TEST(expected_fidelity_mc, no_mismatch_is_perfect) {
    auto stats = expected_fidelity_mc(3, MismatchParams{}, 50, 4);
    EXPECT_NEAR(stats.mean, 1.0, 1e-12);
    EXPECT_NEAR(stats.min, 1.0, 1e-12);
    EXPECT_NEAR(stats.max, 1.0, 1e-12);
}

TEST(expected_fidelity_mc, single_mode_jitter_mean) {
    const double c = 1.0;
    for (double sigma : {0.5, 1.0, 2.0}) {
        // Quadrature of exp(-e^2/2c^2) against Normal(0, sigma^2).
        double oracle = simpson(
            [&](double e) {
                return std::exp(-e * e / (2 * c * c)) * std::exp(-e * e / (2 * sigma * sigma)) /
                       (sigma * std::sqrt(2 * std::numbers::pi));
            },
            -12 * sigma, 12 * sigma, 4000);
        EXPECT_NEAR(oracle, c / std::sqrt(c * c + sigma * sigma), 1e-10);

        MismatchParams params;
        params.sigma = sigma;
        auto stats = expected_fidelity_mc(1, params, 4000, 17);
        EXPECT_LE(std::abs(stats.mean - oracle), 3 * stats.standard_error) << "sigma=" << sigma;
    }
}

TEST(expected_fidelity_mc, non_increasing_in_delta) {
    double previous = 1.0 + 1e-12;
    for (double delta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        MismatchParams params;
        params.delta = delta;
        auto stats = expected_fidelity_mc(3, params, 250, 12);
        EXPECT_LE(stats.mean, previous) << "delta=" << delta;
        EXPECT_LE(stats.min, stats.mean);
        EXPECT_GE(stats.max, stats.mean);
        previous = stats.mean;
    }
}

TEST(expected_fidelity_mc, independent_of_thread_count) {
    MismatchParams params;
    params.delta = 0.3;
    params.sigma = 0.2;
    FidelityMcOptions one, many;
    one.threads = 1;
    many.threads = 3;
    auto a = expected_fidelity_mc(3, params, 60, 9, one);
    auto b = expected_fidelity_mc(3, params, 60, 9, many);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.min, b.min);
    EXPECT_EQ(a.max, b.max);
}

TEST(expected_fidelity_mc, errors) {
    EXPECT_THROW(expected_fidelity_mc(0, MismatchParams{}, 5, 1), std::invalid_argument);
    EXPECT_THROW(expected_fidelity_mc(2, MismatchParams{}, 0, 1), std::invalid_argument);
    FidelityMcOptions opts;
    opts.jitter_repeats = 0;
    EXPECT_THROW(expected_fidelity_mc(2, MismatchParams{}, 5, 1, opts), std::invalid_argument);
}
