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

#include "fiberloop/loss_model.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "fiberloop/parallel.hpp"
#include "fiberloop/random.hpp"

namespace fiberloop {

namespace {

void check_efficiency(double eta, const char* name) {
    if (!(eta >= 0.0 && eta <= 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie in [0, 1]");
    }
}

}  // namespace

LossParams::LossParams(double eta_f, double eta_s) : eta_f_(eta_f), eta_s_(eta_s) {
    check_efficiency(eta_f, "eta_f");
    check_efficiency(eta_s, "eta_s");
}

LossMatrix::LossMatrix(std::size_t m, std::size_t loops, Eigen::MatrixXd entries)
    : m_(m), loops_(loops), entries_(std::move(entries)) {
    if (entries_.rows() != static_cast<Eigen::Index>(m) || entries_.cols() != entries_.rows()) {
        throw std::invalid_argument("loss matrix shape does not match its mode count");
    }
}

double LossMatrix::entry(std::size_t i, std::size_t j) const {
    if (i < 1 || j < 1 || i > m_ || j > m_) {
        throw std::out_of_range("loss matrix index out of range");
    }
    return entries_(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
}

LossMatrix loss_matrix(std::size_t m, std::size_t loops, const LossParams& loss) {
    if (m == 0) {
        throw std::invalid_argument("loss matrix needs m >= 1");
    }
    if (loops == 0) {
        throw std::invalid_argument("loss matrix needs at least one loop");
    }
    const auto n = static_cast<Eigen::Index>(m);
    const double eta = loss.eta();
    const double switch_part = std::pow(loss.eta_s(), static_cast<double>(loops));
    Eigen::MatrixXd entries(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            auto exponent = static_cast<long>(loops) + static_cast<long>(j) - static_cast<long>(i);
            if (exponent < 0 && eta == 0.0) {
                entries(i, j) = 0.0;
            } else {
                entries(i, j) = switch_part * std::pow(eta, static_cast<double>(exponent));
            }
        }
    }
    return LossMatrix(m, loops, std::move(entries));
}

TransferMatrix apply_loss(const TransferMatrix& u, const LossMatrix& loss) {
    if (u.modes() != loss.modes()) {
        throw std::invalid_argument("apply_loss dimension mismatch");
    }
    return TransferMatrix(u.matrix().cwiseProduct(loss.matrix().cast<Complex>()));
}

TransferMatrix lossy_single_loop_map(const SwitchingSequence& seq, const LossParams& loss) {
    if (seq.passes() != 1) {
        throw std::invalid_argument("lossy single-loop map needs a single-pass sequence");
    }
    const std::size_t m = seq.modes();
    const double eta = loss.eta();
    const double eta_s = loss.eta_s();
    auto u = [&](std::size_t t) -> const BeamsplitterSetting& { return seq.setting(1, t); };

    auto n = static_cast<Eigen::Index>(m);
    ComplexMatrix v = ComplexMatrix::Zero(n, n);
    for (std::size_t i = 1; i <= m; ++i) {
        auto row = static_cast<Eigen::Index>(i - 1);
        if (i >= 2) {
            v(row, static_cast<Eigen::Index>(i - 2)) = eta_s * u(i).u11();
        }
        Complex loop = 1;
        for (std::size_t j = i; j <= m; ++j) {
            if (j > i) {
                loop *= u(j).u22();
            }
            double traversals = static_cast<double>(j - i + 1);
            v(row, static_cast<Eigen::Index>(j - 1)) =
                eta_s * std::pow(eta, traversals) * u(i).u12() * u(j + 1).u21() * loop;
        }
    }
    return TransferMatrix(std::move(v));
}

TransferMatrix lossy_single_loop_map_via_loss_matrix(const SwitchingSequence& seq,
                                                     const LossParams& loss) {
    return apply_loss(build_single_loop_map(seq), loss_matrix(seq.modes(), 1, loss));
}

double outer_loop_factor(std::size_t m, std::size_t loops, const LossParams& loss) {
    if (loops == 0) {
        throw std::invalid_argument("outer loop factor needs at least one loop");
    }
    auto round_trips = static_cast<double>(loops - 1);
    return std::pow(loss.eta_f(), static_cast<double>(m) * round_trips) *
           std::pow(loss.eta_s(), 2.0 * round_trips);
}

TransferMatrix lossy_composed_map(const SwitchingSequence& seq, const LossParams& loss,
                                  bool include_outer) {
    std::vector<TransferMatrix> maps;
    maps.reserve(seq.passes());
    for (std::size_t l = 1; l <= seq.passes(); ++l) {
        maps.push_back(lossy_single_loop_map(seq.pass(l), loss));
    }
    TransferMatrix product = compose_loops(maps);
    if (!include_outer) {
        return product;
    }
    return TransferMatrix(product.matrix() *
                          outer_loop_factor(seq.modes(), seq.passes(), loss));
}

double similarity(const TransferMatrix& u) {
    const auto& a = u.matrix();
    double sum_abs = a.cwiseAbs().sum();
    double sum_sq = a.cwiseAbs2().sum();
    if (sum_sq == 0.0) {
        throw std::domain_error("similarity of an all-zero map is undefined");
    }
    auto m = static_cast<double>(u.modes());
    return sum_abs * sum_abs / (m * m * sum_sq);
}

double postselection_probability(const TransferMatrix& u, std::span<const unsigned> occupation) {
    if (occupation.size() != u.modes()) {
        throw std::invalid_argument("occupation length does not match the mode count");
    }
    const auto& a = u.matrix();
    double p = 1.0;
    for (std::size_t i = 0; i < occupation.size(); ++i) {
        if (occupation[i] == 0) {
            continue;
        }
        double survive = a.row(static_cast<Eigen::Index>(i)).cwiseAbs2().sum();
        p *= std::pow(survive, static_cast<double>(occupation[i]));
    }
    return p;
}

std::vector<unsigned> one_photon_per_mode(std::size_t m) { return std::vector<unsigned>(m, 1u); }

SimilaritySearchResult optimize_similarity(std::size_t m, std::size_t loops,
                                           const LossParams& loss, std::size_t iterations,
                                           std::uint64_t seed,
                                           const SimilaritySearchOptions& options) {
    if (iterations == 0) {
        throw std::invalid_argument("optimize_similarity needs at least one iteration");
    }
    if (m == 0 || loops == 0) {
        throw std::invalid_argument("optimize_similarity needs m >= 1 and L >= 1");
    }
    std::vector<unsigned> occupation =
        options.occupation.empty() ? one_photon_per_mode(m) : options.occupation;
    if (occupation.size() != m) {
        throw std::invalid_argument("occupation length does not match the mode count");
    }

    std::vector<double> scores(iterations);
    parallel_for(iterations, options.threads, [&](std::size_t i) {
        Rng rng = make_rng(seed, i);
        SwitchingSequence seq = random_sequence(m, loops, rng);
        scores[i] = similarity(lossy_composed_map(seq, loss, options.include_outer));
    });

    std::size_t best = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < iterations; ++i) {
        total += scores[i];
        if (scores[i] > scores[best]) {
            best = i;
        }
    }
    // Redraw the winner rather than keeping every sequence alive.
    Rng rng = make_rng(seed, best);
    SwitchingSequence best_seq = random_sequence(m, loops, rng);
    TransferMatrix best_map = lossy_composed_map(best_seq, loss, options.include_outer);
    return SimilaritySearchResult{
        .best_sequence = std::move(best_seq),
        .best_similarity = scores[best],
        .postselection_at_best = postselection_probability(best_map, occupation),
        .mean_similarity = total / static_cast<double>(iterations),
        .best_iteration = best,
        .iterations = iterations,
    };
}

}  // namespace fiberloop
