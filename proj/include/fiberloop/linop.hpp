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

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "fiberloop/random.hpp"

namespace fiberloop {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

inline constexpr double kUnitarityTolerance = 1e-12;

/// One setting of the dynamic central beamsplitter.
///
/// u(a, b) is the amplitude for input port a to reach output port b. Port 1 on
/// the input side is the source, port 2 the inner loop; port 1 on the output
/// side leaves towards the detector, port 2 enters the inner loop.
class BeamsplitterSetting {
   public:
    /// Throws std::invalid_argument unless the 2x2 matrix is unitary to 1e-12.
    BeamsplitterSetting(Complex u11, Complex u12, Complex u21, Complex u22);

    /// [[cos t e^{i phi}, sin t e^{i lambda}], [-sin t e^{-i lambda}, cos t e^{-i phi}]]
    static BeamsplitterSetting from_angles(double theta, double phi, double lambda);
    static BeamsplitterSetting swap();
    static BeamsplitterSetting identity();

    Complex u11() const { return u11_; }
    Complex u12() const { return u12_; }
    Complex u21() const { return u21_; }
    Complex u22() const { return u22_; }

    bool is_swap() const;
    Eigen::Matrix2cd matrix() const;

    bool operator==(const BeamsplitterSetting&) const = default;

   private:
    Complex u11_, u12_, u21_, u22_;
};

/// Time-ordered beamsplitter settings for L passes through the inner loop.
/// Each pass has m+1 settings and starts and ends with a swap.
class SwitchingSequence {
   public:
    /// Throws std::invalid_argument on m == 0, an empty pass list, a pass of
    /// the wrong length, or a pass whose boundary settings are not swaps.
    SwitchingSequence(std::size_t m, std::vector<std::vector<BeamsplitterSetting>> passes);

    /// Convenience for a single pass given only its m-1 interior settings.
    static SwitchingSequence single_pass(std::size_t m,
                                         const std::vector<BeamsplitterSetting>& interior);

    std::size_t modes() const { return m_; }
    std::size_t passes() const { return passes_.size(); }

    /// 1-based pass l and beamsplitter time t in 1..m+1.
    const BeamsplitterSetting& setting(std::size_t l, std::size_t t) const;
    const std::vector<BeamsplitterSetting>& pass_settings(std::size_t l) const;

    /// The single-pass sequence for 1-based pass l.
    SwitchingSequence pass(std::size_t l) const;

    bool operator==(const SwitchingSequence&) const = default;

   private:
    std::size_t m_;
    std::vector<std::vector<BeamsplitterSetting>> passes_;
};

/// Square input-to-output amplitude map. Rows are input modes, columns output
/// modes. Unitary when lossless, a contraction under loss.
class TransferMatrix {
   public:
    explicit TransferMatrix(ComplexMatrix entries);
    static TransferMatrix identity(std::size_t m);

    std::size_t modes() const { return static_cast<std::size_t>(entries_.rows()); }

    /// 1-based access; input mode i, output mode j.
    Complex entry(std::size_t i, std::size_t j) const;

    const ComplexMatrix& matrix() const { return entries_; }

    /// max |(M^dagger M - I)_{ij}|
    double unitarity_error() const;
    bool is_unitary(double tol = kUnitarityTolerance) const {
        return unitarity_error() < tol;
    }

   private:
    ComplexMatrix entries_;
};

/// Inner-loop map for a single-pass sequence. Throws std::invalid_argument if
/// the sequence has more than one pass, and std::logic_error if the built map
/// is not unitary.
TransferMatrix build_single_loop_map(const SwitchingSequence& seq);

/// One map per pass, in pass order.
std::vector<TransferMatrix> build_pass_maps(const SwitchingSequence& seq);

/// Ordered product maps[0] * maps[1] * ... ; throws on empty input or
/// dimension mismatch.
TransferMatrix compose_loops(const std::vector<TransferMatrix>& maps);

/// Lossless map of every pass composed.
TransferMatrix build_composed_map(const SwitchingSequence& seq);

/// Boundaries fixed to swap; interior settings drawn with theta uniform on
/// [0, pi/2] and both phases uniform on [0, 2 pi).
SwitchingSequence random_sequence(std::size_t m, std::size_t passes, Rng& rng);

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
double uniform01(Rng& rng);

}  // namespace fiberloop
