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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fiberloop/linop.hpp"

namespace fiberloop {

/// Fiber efficiency per tau-length of fiber and switch efficiency per switch
/// traversal. Both in [0, 1].
class LossParams {
   public:
    LossParams(double eta_f, double eta_s);
    static LossParams lossless() { return {1.0, 1.0}; }

    double eta_f() const { return eta_f_; }
    double eta_s() const { return eta_s_; }
    /// Combined efficiency of one loop traversal, eta_f * eta_s.
    double eta() const { return eta_f_ * eta_s_; }

   private:
    double eta_f_;
    double eta_s_;
};

/// Element-wise loss accumulated over L inner-loop passes:
/// entry (i, j) = eta_s^L * eta^(L + j - i).
///
/// Entries with L + j - i < 0 belong to input/output pairs no path can
/// connect in L passes. They follow the formula when eta > 0 and are 0 when
/// eta == 0, where the formula diverges.
class LossMatrix {
   public:
    LossMatrix(std::size_t m, std::size_t loops, Eigen::MatrixXd entries);

    std::size_t modes() const { return m_; }
    std::size_t loops() const { return loops_; }
    /// 1-based
    double entry(std::size_t i, std::size_t j) const;
    const Eigen::MatrixXd& matrix() const { return entries_; }

   private:
    std::size_t m_;
    std::size_t loops_;
    Eigen::MatrixXd entries_;
};

LossMatrix loss_matrix(std::size_t m, std::size_t loops, const LossParams& loss);

/// Hadamard product U o L.
TransferMatrix apply_loss(const TransferMatrix& u, const LossMatrix& loss);

/// Lossy inner-loop map built directly from the beamsplitter amplitudes.
TransferMatrix lossy_single_loop_map(const SwitchingSequence& seq, const LossParams& loss);

/// Same map built as V o L(1). Both routes must agree to 1e-14.
TransferMatrix lossy_single_loop_map_via_loss_matrix(const SwitchingSequence& seq,
                                                     const LossParams& loss);

/// prod_l V'(l), times eta_f^{m(L-1)} eta_s^{2(L-1)} for the outer loop when
/// include_outer is set.
TransferMatrix lossy_composed_map(const SwitchingSequence& seq, const LossParams& loss,
                                  bool include_outer);

/// Overall outer-loop factor eta_f^{m(L-1)} eta_s^{2(L-1)}.
double outer_loop_factor(std::size_t m, std::size_t loops, const LossParams& loss);

/// (1/m^2) (sum |U_ij|)^2 / sum |U_ij|^2. Throws std::domain_error for an
/// all-zero map.
double similarity(const TransferMatrix& u);

/// prod_i (sum_j |U_ij|^2)^{k_i}. Throws std::invalid_argument when the
/// occupation length differs from the mode count.
double postselection_probability(const TransferMatrix& u, std::span<const unsigned> occupation);

/// One photon in every mode.
std::vector<unsigned> one_photon_per_mode(std::size_t m);

struct SimilaritySearchOptions {
    bool include_outer = true;
    /// Empty means one photon per mode.
    std::vector<unsigned> occupation;
    unsigned threads = 1;
};

struct SimilaritySearchResult {
    SwitchingSequence best_sequence;
    double best_similarity;
    /// Post-selection probability of the map that maximizes the similarity.
    double postselection_at_best;
    double mean_similarity;
    std::size_t best_iteration;
    std::size_t iterations;
};

/// Best-of-N random search over switching sequences. Iteration i draws its
/// sequence from an engine seeded with derive_seed(seed, i), so the result
/// does not depend on the thread count. Ties go to the lowest iteration.
SimilaritySearchResult optimize_similarity(std::size_t m, std::size_t loops,
                                           const LossParams& loss, std::size_t iterations,
                                           std::uint64_t seed,
                                           const SimilaritySearchOptions& options = {});

}  // namespace fiberloop
