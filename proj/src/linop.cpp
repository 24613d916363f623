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

#include "fiberloop/linop.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace fiberloop {

BeamsplitterSetting::BeamsplitterSetting(Complex u11, Complex u12, Complex u21, Complex u22)
    : u11_(u11), u12_(u12), u21_(u21), u22_(u22) {
    double row1 = std::norm(u11) + std::norm(u12);
    double row2 = std::norm(u21) + std::norm(u22);
    double col1 = std::norm(u11) + std::norm(u21);
    double col2 = std::norm(u12) + std::norm(u22);
    double cross = std::abs(u11 * std::conj(u21) + u12 * std::conj(u22));
    if (std::abs(row1 - 1) > kUnitarityTolerance || std::abs(row2 - 1) > kUnitarityTolerance ||
        std::abs(col1 - 1) > kUnitarityTolerance || std::abs(col2 - 1) > kUnitarityTolerance ||
        cross > kUnitarityTolerance) {
        throw std::invalid_argument("beamsplitter setting is not unitary");
    }
}

BeamsplitterSetting BeamsplitterSetting::from_angles(double theta, double phi, double lambda) {
    const Complex i(0, 1);
    double c = std::cos(theta);
    double s = std::sin(theta);
    return BeamsplitterSetting(c * std::exp(i * phi), s * std::exp(i * lambda),
                               -s * std::exp(-i * lambda), c * std::exp(-i * phi));
}

BeamsplitterSetting BeamsplitterSetting::swap() { return {0, 1, 1, 0}; }

BeamsplitterSetting BeamsplitterSetting::identity() { return {1, 0, 0, 1}; }

bool BeamsplitterSetting::is_swap() const { return *this == swap(); }

Eigen::Matrix2cd BeamsplitterSetting::matrix() const {
    Eigen::Matrix2cd out;
    out << u11_, u12_, u21_, u22_;
    return out;
}

SwitchingSequence::SwitchingSequence(std::size_t m,
                                     std::vector<std::vector<BeamsplitterSetting>> passes)
    : m_(m), passes_(std::move(passes)) {
    if (m_ == 0) {
        throw std::invalid_argument("switching sequence needs at least one mode");
    }
    if (passes_.empty()) {
        throw std::invalid_argument("switching sequence needs at least one pass");
    }
    for (std::size_t l = 0; l < passes_.size(); ++l) {
        const auto& p = passes_[l];
        if (p.size() != m_ + 1) {
            throw std::invalid_argument("pass " + std::to_string(l + 1) + " has " +
                                        std::to_string(p.size()) + " settings, expected " +
                                        std::to_string(m_ + 1));
        }
        if (!p.front().is_swap() || !p.back().is_swap()) {
            throw std::invalid_argument("pass " + std::to_string(l + 1) +
                                        " violates the swap boundary conditions");
        }
    }
}

SwitchingSequence SwitchingSequence::single_pass(
    std::size_t m, const std::vector<BeamsplitterSetting>& interior) {
    if (m == 0) {
        throw std::invalid_argument("switching sequence needs at least one mode");
    }
    if (interior.size() + 1 != m) {
        throw std::invalid_argument("expected m-1 interior settings");
    }
    std::vector<BeamsplitterSetting> pass;
    pass.reserve(m + 1);
    pass.push_back(BeamsplitterSetting::swap());
    pass.insert(pass.end(), interior.begin(), interior.end());
    pass.push_back(BeamsplitterSetting::swap());
    return SwitchingSequence(m, {std::move(pass)});
}

const BeamsplitterSetting& SwitchingSequence::setting(std::size_t l, std::size_t t) const {
    if (t < 1 || t > m_ + 1) {
        throw std::out_of_range("beamsplitter time out of range");
    }
    return pass_settings(l)[t - 1];
}

const std::vector<BeamsplitterSetting>& SwitchingSequence::pass_settings(std::size_t l) const {
    if (l < 1 || l > passes_.size()) {
        throw std::out_of_range("pass index out of range");
    }
    return passes_[l - 1];
}

SwitchingSequence SwitchingSequence::pass(std::size_t l) const {
    return SwitchingSequence(m_, {pass_settings(l)});
}

TransferMatrix::TransferMatrix(ComplexMatrix entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols()) {
        throw std::invalid_argument("transfer matrix must be square");
    }
    if (entries_.rows() == 0) {
        throw std::invalid_argument("transfer matrix must have at least one mode");
    }
}

TransferMatrix TransferMatrix::identity(std::size_t m) {
    auto n = static_cast<Eigen::Index>(m);
    return TransferMatrix(ComplexMatrix::Identity(n, n));
}

Complex TransferMatrix::entry(std::size_t i, std::size_t j) const {
    if (i < 1 || j < 1 || i > modes() || j > modes()) {
        throw std::out_of_range("transfer matrix index out of range");
    }
    return entries_(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1));
}

double TransferMatrix::unitarity_error() const {
    ComplexMatrix gram = entries_.adjoint() * entries_;
    gram -= ComplexMatrix::Identity(entries_.rows(), entries_.cols());
    return gram.cwiseAbs().maxCoeff();
}

TransferMatrix build_single_loop_map(const SwitchingSequence& seq) {
    if (seq.passes() != 1) {
        throw std::invalid_argument("single-loop map needs a single-pass sequence");
    }
    const std::size_t m = seq.modes();
    auto u = [&](std::size_t t) -> const BeamsplitterSetting& { return seq.setting(1, t); };

    ComplexMatrix v = ComplexMatrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 1; i <= m; ++i) {
        auto row = static_cast<Eigen::Index>(i - 1);
        if (i >= 2) {
            v(row, static_cast<Eigen::Index>(i - 2)) = u(i).u11();
        }
        // Running product of u22(k) for k = i+1..j.
        Complex loop = 1;
        for (std::size_t j = i; j <= m; ++j) {
            if (j > i) {
                loop *= u(j).u22();
            }
            v(row, static_cast<Eigen::Index>(j - 1)) = u(i).u12() * u(j + 1).u21() * loop;
        }
    }
    TransferMatrix out(std::move(v));
    if (!out.is_unitary()) {
        throw std::logic_error("single-loop map is not unitary");
    }
    return out;
}

std::vector<TransferMatrix> build_pass_maps(const SwitchingSequence& seq) {
    std::vector<TransferMatrix> maps;
    maps.reserve(seq.passes());
    for (std::size_t l = 1; l <= seq.passes(); ++l) {
        maps.push_back(build_single_loop_map(seq.pass(l)));
    }
    return maps;
}

TransferMatrix compose_loops(const std::vector<TransferMatrix>& maps) {
    if (maps.empty()) {
        throw std::invalid_argument("compose_loops needs at least one map");
    }
    ComplexMatrix product = maps.front().matrix();
    for (std::size_t l = 1; l < maps.size(); ++l) {
        if (maps[l].modes() != maps.front().modes()) {
            throw std::invalid_argument("compose_loops dimension mismatch");
        }
        product = product * maps[l].matrix();
    }
    return TransferMatrix(std::move(product));
}

TransferMatrix build_composed_map(const SwitchingSequence& seq) {
    return compose_loops(build_pass_maps(seq));
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

SwitchingSequence random_sequence(std::size_t m, std::size_t passes, Rng& rng) {
    if (m == 0) {
        throw std::invalid_argument("random_sequence needs m >= 1");
    }
    if (passes == 0) {
        throw std::invalid_argument("random_sequence needs at least one pass");
    }
    constexpr double pi = std::numbers::pi;
    std::vector<std::vector<BeamsplitterSetting>> all;
    all.reserve(passes);
    for (std::size_t l = 0; l < passes; ++l) {
        std::vector<BeamsplitterSetting> pass;
        pass.reserve(m + 1);
        pass.push_back(BeamsplitterSetting::swap());
        for (std::size_t t = 2; t <= m; ++t) {
            double theta = 0.5 * pi * uniform01(rng);
            double phi = 2 * pi * uniform01(rng);
            double lambda = 2 * pi * uniform01(rng);
            pass.push_back(BeamsplitterSetting::from_angles(theta, phi, lambda));
        }
        pass.push_back(BeamsplitterSetting::swap());
        all.push_back(std::move(pass));
    }
    return SwitchingSequence(m, std::move(all));
}

}  // namespace fiberloop
