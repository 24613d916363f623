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

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <vector>

#include "fiberloop/linop.hpp"

namespace fiberloop {

// Temporal-mode model of one pass through the inner loop. All shifts and
// widths share one time unit; the harness uses units of the wave-packet
// width c.

/// Where a pulse sits relative to the dynamic beamsplitter: A arriving from
/// the source, B inside the inner loop, C leaving towards the detector.
enum class Region { A, B, C };

/// Normalized Gaussian temporal density
/// psi(x) = (c sqrt(pi))^{-1/2} exp(-x^2 / 2c^2), standard deviation c/sqrt(2).
struct WavePacket {
    double c = 1.0;
    double operator()(double x) const;
};

struct PhotonLabel {
    Region region = Region::A;
    /// 1-based time bin (input mode for region A, output mode for region C).
    int time_bin = 1;
    /// Displacement of the wave-packet centre inside its bin.
    double shift = 0.0;

    friend bool operator<(const PhotonLabel& a, const PhotonLabel& b) {
        if (a.region != b.region) return a.region < b.region;
        if (a.time_bin != b.time_bin) return a.time_bin < b.time_bin;
        return a.shift < b.shift;
    }
    friend bool operator==(const PhotonLabel& a, const PhotonLabel& b) {
        return a.region == b.region && a.time_bin == b.time_bin && a.shift == b.shift;
    }
};

/// Sorted list of photon labels; sorting makes equal multisets compare equal.
using PhotonMultiset = std::vector<PhotonLabel>;

struct Configuration {
    PhotonMultiset photons;
    Complex amplitude;
};

/// Superposition of photon configurations. Amplitudes are those of the
/// normalized Fock states prod (C^dagger)^k / sqrt(k!) |0>, treating labels
/// with different shifts as distinct modes, so lossless evolution keeps
/// sum |gamma|^2 = 1.
class TemporalState {
   public:
    explicit TemporalState(std::size_t m);

    /// Product input state: k_i photons in region A of bin i, each with
    /// shift shifts[i] (zero when shifts is empty). Amplitude 1.
    static TemporalState input(std::size_t m, std::span<const unsigned> occupation,
                               std::span<const double> shifts = {});

    /// Canonicalizes the multiset and accumulates the amplitude.
    void add(PhotonMultiset photons, Complex amplitude);

    std::size_t modes() const { return m_; }
    const std::map<PhotonMultiset, Complex>& configurations() const { return configs_; }
    std::vector<Configuration> configuration_list() const;
    double norm_squared() const;

    /// Sum of |gamma|^2 over configurations whose photons occupy exactly
    /// these region-C bins.
    double bin_probability(const std::vector<int>& sorted_bins) const;

   private:
    std::size_t m_;
    std::map<PhotonMultiset, Complex> configs_;
};

class BinConfusionError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

struct MismatchParams {
    /// Inner-loop length error, signed.
    double delta = 0.0;
    /// Source time-jitter standard deviation.
    double sigma = 0.0;
    /// Wave-packet width.
    double c = 1.0;
    /// Time-bin separation.
    double tau = 100.0;

    /// Largest admissible |shift|; photons never leave their bin.
    double shift_bound() const { return tau / 10.0; }
    /// Throws std::invalid_argument on sigma < 0, c <= 0, tau <= 0 or
    /// |delta| at or beyond the shift bound.
    void validate() const;
};

/// exp(-(d1 - d2)^2 / 4c^2): overlap of two wave packets in the same bin.
double gaussian_overlap(double d1, double d2, double c);

/// Number of inner-loop entries on the path from input bin i to output bin j
/// in one pass: j - i + 1 for j >= i, 0 for j = i - 1, and -1 when the pair
/// is unreachable.
int loop_traversals(std::size_t input_bin, std::size_t output_bin);

/// Pushes every photon of a region-A state through the m+1 beamsplitters of
/// one pass. Every entry into the inner loop adds params.delta to the shift.
/// Throws std::invalid_argument for a bad input state, BinConfusionError if
/// a shift leaves the admissible band and std::logic_error if a photon is
/// still in the loop after the final boundary.
TemporalState evolve_pulse_train(const SwitchingSequence& seq, const TemporalState& input,
                                 const MismatchParams& params);

struct JitterDraw {
    TemporalState state;
    /// Offset applied to each input bin (index 0 is bin 1); 0 for empty bins.
    std::vector<double> offsets;
    std::size_t rejections = 0;
};

/// Draws one offset per occupied input bin from Normal(0, sigma^2), in bin
/// order, redrawing any draw with |offset| >= bound. sigma == 0 leaves the
/// state untouched and consumes no randomness.
JitterDraw apply_jitter(const TemporalState& input, double sigma, Rng& rng,
                        double bound = MismatchParams{}.shift_bound());

/// Offsets for the occupied entries of an occupation vector, same law as
/// apply_jitter.
std::vector<double> draw_jitter_offsets(std::span<const unsigned> occupation, double sigma,
                                        Rng& rng, double bound, std::size_t& rejections);

/// |<ideal|actual>|^2 evaluated as the literal double sum over configuration
/// pairs and photon permutations, using gaussian_overlap within a bin and 0
/// across bins or regions.
double fidelity_expansion(const TemporalState& ideal, const TemporalState& actual, double c);

/// Same fidelity from the single-pass map: |perm(M) / prod k_i!|^2 with
/// M_pq = sum_j conj(V_pj) V_qj overlap(0, shift of q -> j), rows repeated
/// for multiply occupied inputs. jitter holds one offset per input bin
/// (empty for none).
double fidelity_permanent(const SwitchingSequence& seq, const MismatchParams& params,
                          std::span<const unsigned> occupation,
                          std::span<const double> jitter = {});

struct FidelityStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double standard_error = 0.0;
    std::size_t trials = 0;
    std::size_t jitter_rejections = 0;
};

struct FidelityMcOptions {
    /// Jitter draws averaged per random sequence.
    std::size_t jitter_repeats = 1;
    /// Empty means one photon per mode.
    std::vector<unsigned> occupation;
    unsigned threads = 1;
};

/// Monte-Carlo over random single-pass sequences (and jitter draws when
/// sigma > 0). Trial t uses an engine seeded with derive_seed(seed, t).
FidelityStats expected_fidelity_mc(std::size_t m, const MismatchParams& params,
                                   std::size_t trials, std::uint64_t seed,
                                   const FidelityMcOptions& options = {});

}  // namespace fiberloop
