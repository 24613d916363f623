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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <utility>

#include "fiberloop/loss_model.hpp"
#include "fiberloop/parallel.hpp"
#include "fiberloop/permanent.hpp"
#include "fiberloop/random.hpp"

namespace fiberloop {

namespace {

constexpr std::size_t kMaxJitterRejections = 1'000'000;

double factorial(std::size_t k) {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) {
        f *= static_cast<double>(i);
    }
    return f;
}

/// prod over runs of identical labels of (run length)!; the multiset is sorted.
double multiplicity_factorial(const PhotonMultiset& photons) {
    double f = 1.0;
    std::size_t run = 1;
    for (std::size_t i = 1; i <= photons.size(); ++i) {
        if (i < photons.size() && photons[i] == photons[i - 1]) {
            ++run;
        } else {
            f *= factorial(run);
            run = 1;
        }
    }
    return f;
}

void check_shift(double shift, double bound) {
    if (!(std::abs(shift) < bound)) {
        throw BinConfusionError("temporal shift " + std::to_string(shift) +
                                " reaches the bin-confusion bound " + std::to_string(bound));
    }
}

}  // namespace

double WavePacket::operator()(double x) const {
    return std::exp(-x * x / (2 * c * c)) / std::sqrt(c * std::sqrt(std::numbers::pi));
}

TemporalState::TemporalState(std::size_t m) : m_(m) {
    if (m == 0) {
        throw std::invalid_argument("temporal state needs at least one mode");
    }
}

TemporalState TemporalState::input(std::size_t m, std::span<const unsigned> occupation,
                                   std::span<const double> shifts) {
    if (occupation.size() != m) {
        throw std::invalid_argument("occupation length does not match the mode count");
    }
    if (!shifts.empty() && shifts.size() != m) {
        throw std::invalid_argument("shift list length does not match the mode count");
    }
    TemporalState state(m);
    PhotonMultiset photons;
    for (std::size_t i = 0; i < m; ++i) {
        double shift = shifts.empty() ? 0.0 : shifts[i];
        for (unsigned k = 0; k < occupation[i]; ++k) {
            photons.push_back({Region::A, static_cast<int>(i + 1), shift});
        }
    }
    state.add(std::move(photons), 1.0);
    return state;
}

void TemporalState::add(PhotonMultiset photons, Complex amplitude) {
    std::sort(photons.begin(), photons.end());
    configs_[std::move(photons)] += amplitude;
}

std::vector<Configuration> TemporalState::configuration_list() const {
    std::vector<Configuration> out;
    out.reserve(configs_.size());
    for (const auto& [photons, amp] : configs_) {
        out.push_back({photons, amp});
    }
    return out;
}

double TemporalState::norm_squared() const {
    double total = 0.0;
    for (const auto& [photons, amp] : configs_) {
        total += std::norm(amp);
    }
    return total;
}

double TemporalState::bin_probability(const std::vector<int>& sorted_bins) const {
    double total = 0.0;
    for (const auto& [photons, amp] : configs_) {
        if (photons.size() != sorted_bins.size()) {
            continue;
        }
        bool match = true;
        for (std::size_t i = 0; i < photons.size() && match; ++i) {
            match = photons[i].region == Region::C && photons[i].time_bin == sorted_bins[i];
        }
        if (match) {
            total += std::norm(amp);
        }
    }
    return total;
}

void MismatchParams::validate() const {
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("jitter sigma must be non-negative");
    }
    if (!(c > 0.0)) {
        throw std::invalid_argument("wave-packet width c must be positive");
    }
    if (!(tau > 0.0)) {
        throw std::invalid_argument("time-bin separation tau must be positive");
    }
    if (!(std::abs(delta) < shift_bound())) {
        throw std::invalid_argument("loop-length error delta must stay below tau/10");
    }
}

double gaussian_overlap(double d1, double d2, double c) {
    double d = d1 - d2;
    return std::exp(-d * d / (4 * c * c));
}

int loop_traversals(std::size_t input_bin, std::size_t output_bin) {
    if (output_bin >= input_bin) {
        return static_cast<int>(output_bin - input_bin + 1);
    }
    if (output_bin + 1 == input_bin) {
        return 0;
    }
    return -1;
}

TemporalState evolve_pulse_train(const SwitchingSequence& seq, const TemporalState& input,
                                 const MismatchParams& params) {
    params.validate();
    if (seq.passes() != 1) {
        throw std::invalid_argument("temporal evolution covers a single pass");
    }
    const std::size_t m = seq.modes();
    if (input.modes() != m) {
        throw std::invalid_argument("state and sequence disagree on the mode count");
    }
    const double bound = params.shift_bound();

    // Work with coefficients of products of creation operators, where
    // substitution is linear; convert to Fock amplitudes at both ends.
    std::map<PhotonMultiset, Complex> poly;
    for (const auto& [photons, amp] : input.configurations()) {
        for (const auto& p : photons) {
            if (p.region != Region::A) {
                throw std::invalid_argument("input photons must all be in region A");
            }
            if (p.time_bin < 1 || static_cast<std::size_t>(p.time_bin) > m) {
                throw std::invalid_argument("input photon bin out of range");
            }
            check_shift(p.shift, bound);
        }
        poly[photons] += amp / std::sqrt(multiplicity_factorial(photons));
    }

    for (std::size_t t = 1; t <= m + 1; ++t) {
        const auto& bs = seq.setting(1, t);
        const int bin = static_cast<int>(t);
        std::map<PhotonMultiset, Complex> next;
        for (const auto& [photons, coef] : poly) {
            PhotonMultiset passive;
            std::vector<PhotonLabel> active;
            for (const auto& p : photons) {
                bool here = p.time_bin == bin && p.region != Region::C;
                (here ? active : passive).push_back(p);
            }
            if (active.empty()) {
                next[photons] += coef;
                continue;
            }
            // Each active photon either enters the loop (and the next bin) or
            // exits towards the detector in output bin t-1.
            const std::size_t branches = std::size_t{1} << active.size();
            for (std::size_t choice = 0; choice < branches; ++choice) {
                Complex factor = coef;
                PhotonMultiset out = passive;
                for (std::size_t a = 0; a < active.size() && factor != Complex(0); ++a) {
                    const auto& p = active[a];
                    bool from_source = p.region == Region::A;
                    if ((choice >> a) & 1) {
                        factor *= from_source ? bs.u12() : bs.u22();
                        out.push_back({Region::B, bin + 1, p.shift + params.delta});
                    } else {
                        factor *= from_source ? bs.u11() : bs.u21();
                        out.push_back({Region::C, bin - 1, p.shift});
                    }
                }
                if (factor == Complex(0)) {
                    continue;
                }
                for (const auto& p : out) {
                    check_shift(p.shift, bound);
                    if (p.region == Region::C && p.time_bin < 1) {
                        throw std::logic_error("photon exited before the first output bin");
                    }
                }
                std::sort(out.begin(), out.end());
                next[std::move(out)] += factor;
            }
        }
        poly = std::move(next);
    }

    TemporalState output(m);
    for (const auto& [photons, coef] : poly) {
        for (const auto& p : photons) {
            if (p.region != Region::C) {
                throw std::logic_error("photon left inside the loop after the final boundary");
            }
        }
        if (coef == Complex(0)) {
            continue;
        }
        output.add(photons, coef * std::sqrt(multiplicity_factorial(photons)));
    }
    return output;
}

std::vector<double> draw_jitter_offsets(std::span<const unsigned> occupation, double sigma,
                                        Rng& rng, double bound, std::size_t& rejections) {
    if (!(sigma >= 0.0)) {
        throw std::invalid_argument("jitter sigma must be non-negative");
    }
    std::vector<double> offsets(occupation.size(), 0.0);
    if (sigma == 0.0) {
        return offsets;
    }
    std::normal_distribution<double> standard(0.0, 1.0);
    for (std::size_t i = 0; i < occupation.size(); ++i) {
        if (occupation[i] == 0) {
            continue;
        }
        for (;;) {
            double eps = sigma * standard(rng);
            if (std::abs(eps) < bound) {
                offsets[i] = eps;
                break;
            }
            if (++rejections > kMaxJitterRejections) {
                throw BinConfusionError("jitter sigma too large for the bin-confusion bound");
            }
        }
    }
    return offsets;
}

JitterDraw apply_jitter(const TemporalState& input, double sigma, Rng& rng, double bound) {
    const std::size_t m = input.modes();
    std::vector<unsigned> occupied(m, 0);
    for (const auto& [photons, amp] : input.configurations()) {
        for (const auto& p : photons) {
            if (p.region != Region::A) {
                throw std::invalid_argument("jitter applies to region-A input photons only");
            }
            if (p.time_bin < 1 || static_cast<std::size_t>(p.time_bin) > m) {
                throw std::invalid_argument("input photon bin out of range");
            }
            occupied[static_cast<std::size_t>(p.time_bin - 1)] = 1;
        }
    }
    JitterDraw draw{input, {}, 0};
    draw.offsets = draw_jitter_offsets(occupied, sigma, rng, bound, draw.rejections);
    if (sigma == 0.0) {
        return draw;
    }
    TemporalState shifted(m);
    for (const auto& [photons, amp] : input.configurations()) {
        PhotonMultiset moved = photons;
        for (auto& p : moved) {
            p.shift += draw.offsets[static_cast<std::size_t>(p.time_bin - 1)];
        }
        shifted.add(std::move(moved), amp);
    }
    draw.state = std::move(shifted);
    return draw;
}

double fidelity_expansion(const TemporalState& ideal, const TemporalState& actual, double c) {
    if (ideal.modes() != actual.modes()) {
        throw std::invalid_argument("fidelity of states with different mode counts");
    }
    if (!(c > 0.0)) {
        throw std::invalid_argument("wave-packet width c must be positive");
    }
    Complex total = 0;
    std::vector<std::size_t> sigma;
    for (const auto& [left, left_amp] : ideal.configurations()) {
        const double left_norm = std::sqrt(multiplicity_factorial(left));
        for (const auto& [right, right_amp] : actual.configurations()) {
            if (left.size() != right.size()) {
                continue;
            }
            const std::size_t n = left.size();
            sigma.resize(n);
            std::iota(sigma.begin(), sigma.end(), std::size_t{0});
            double perm_sum = 0.0;
            do {
                double prod = 1.0;
                for (std::size_t i = 0; i < n && prod != 0.0; ++i) {
                    const auto& a = left[sigma[i]];
                    const auto& b = right[i];
                    if (a.region != b.region || a.time_bin != b.time_bin) {
                        prod = 0.0;
                    } else {
                        prod *= gaussian_overlap(a.shift, b.shift, c);
                    }
                }
                perm_sum += prod;
            } while (std::next_permutation(sigma.begin(), sigma.end()));
            if (perm_sum == 0.0) {
                continue;
            }
            total += std::conj(left_amp) * right_amp * perm_sum /
                     (left_norm * std::sqrt(multiplicity_factorial(right)));
        }
    }
    return std::norm(total);
}

double fidelity_permanent(const SwitchingSequence& seq, const MismatchParams& params,
                          std::span<const unsigned> occupation, std::span<const double> jitter) {
    params.validate();
    const std::size_t m = seq.modes();
    if (occupation.size() != m) {
        throw std::invalid_argument("occupation length does not match the mode count");
    }
    if (!jitter.empty() && jitter.size() != m) {
        throw std::invalid_argument("jitter list length does not match the mode count");
    }
    const TransferMatrix v = build_single_loop_map(seq);
    const auto& vm = v.matrix();

    std::vector<std::size_t> rows;
    double norm = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        for (unsigned k = 0; k < occupation[i]; ++k) {
            rows.push_back(i);
        }
        norm *= factorial(occupation[i]);
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix gram = ComplexMatrix::Zero(n, n);
    for (Eigen::Index b = 0; b < n; ++b) {
        const std::size_t q = rows[static_cast<std::size_t>(b)];
        const double eps = jitter.empty() ? 0.0 : jitter[q];
        for (std::size_t j = 0; j < m; ++j) {
            int count = loop_traversals(q + 1, j + 1);
            if (count < 0) {
                continue;
            }
            double shift = eps + count * params.delta;
            check_shift(shift, params.shift_bound());
            double overlap = gaussian_overlap(0.0, shift, params.c);
            auto col = static_cast<Eigen::Index>(j);
            for (Eigen::Index a = 0; a < n; ++a) {
                auto p = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(a)]);
                gram(a, b) += std::conj(vm(p, col)) * vm(static_cast<Eigen::Index>(q), col) * overlap;
            }
        }
    }
    return std::norm(permanent(gram) / norm);
}

FidelityStats expected_fidelity_mc(std::size_t m, const MismatchParams& params,
                                   std::size_t trials, std::uint64_t seed,
                                   const FidelityMcOptions& options) {
    params.validate();
    if (m == 0) {
        throw std::invalid_argument("fidelity Monte-Carlo needs m >= 1");
    }
    if (trials == 0) {
        throw std::invalid_argument("fidelity Monte-Carlo needs at least one trial");
    }
    if (options.jitter_repeats == 0) {
        throw std::invalid_argument("jitter repeat count must be positive");
    }
    std::vector<unsigned> occupation =
        options.occupation.empty() ? one_photon_per_mode(m) : options.occupation;
    if (occupation.size() != m) {
        throw std::invalid_argument("occupation length does not match the mode count");
    }

    std::vector<double> fidelities(trials);
    std::vector<std::size_t> rejections(trials, 0);
    parallel_for(trials, options.threads, [&](std::size_t t) {
        Rng rng = make_rng(seed, t);
        SwitchingSequence seq = random_sequence(m, 1, rng);
        std::size_t repeats = params.sigma > 0.0 ? options.jitter_repeats : 1;
        double sum = 0.0;
        for (std::size_t r = 0; r < repeats; ++r) {
            auto offsets = draw_jitter_offsets(occupation, params.sigma, rng,
                                               params.shift_bound(), rejections[t]);
            sum += fidelity_permanent(seq, params, occupation, offsets);
        }
        fidelities[t] = sum / static_cast<double>(repeats);
    });

    FidelityStats stats;
    stats.trials = trials;
    stats.min = *std::min_element(fidelities.begin(), fidelities.end());
    stats.max = *std::max_element(fidelities.begin(), fidelities.end());
    double sum = 0.0;
    for (double f : fidelities) {
        sum += f;
    }
    stats.mean = sum / static_cast<double>(trials);
    if (trials > 1) {
        double ss = 0.0;
        for (double f : fidelities) {
            ss += (f - stats.mean) * (f - stats.mean);
        }
        stats.standard_error = std::sqrt(ss / static_cast<double>(trials - 1) /
                                         static_cast<double>(trials));
    }
    stats.jitter_rejections = std::accumulate(rejections.begin(), rejections.end(), std::size_t{0});
    return stats;
}

}  // namespace fiberloop
