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

#include "fiberloop/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fiberloop/fock_oracle.hpp"
#include "fiberloop/linop.hpp"
#include "fiberloop/loss_model.hpp"
#include "fiberloop/permanent.hpp"
#include "fiberloop/random.hpp"
#include "fiberloop/temporal.hpp"

namespace fiberloop {

namespace {

ComplexMatrix random_matrix(Eigen::Index n, Rng& rng) {
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            m(i, j) = std::polar(std::sqrt(uniform01(rng)), 2 * std::numbers::pi * uniform01(rng));
        }
    }
    return m;
}

CheckResult finish(std::string name, double worst, double tol) {
    return {std::move(name), worst <= tol, worst, tol};
}

}  // namespace

std::vector<CheckResult> run_validation(std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng(derive_seed(seed, 0));

    {
        double worst = 0.0;
        for (int trial = 0; trial < 100; ++trial) {
            std::size_t m = 1 + rng() % 6;
            std::size_t loops = 1 + rng() % 4;
            worst = std::max(worst, build_composed_map(random_sequence(m, loops, rng)).unitarity_error());
        }
        out.push_back(finish("lossless maps are unitary", worst, 1e-12));
    }
    {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            auto n = static_cast<Eigen::Index>(1 + rng() % 6);
            ComplexMatrix a = random_matrix(n, rng);
            Complex naive = permanent_naive(a);
            worst = std::max(worst, std::abs(permanent_ryser(a) - naive) / std::max(1.0, std::abs(naive)));
        }
        out.push_back(finish("permanent: Ryser vs permutation sum", worst, 1e-10));
    }
    {
        double worst = 0.0;
        for (int trial = 0; trial < 50; ++trial) {
            std::size_t m = 1 + rng() % 6;
            std::size_t loops = 1 + rng() % 5;
            LossParams loss(0.5 + 0.5 * uniform01(rng), 0.5 + 0.5 * uniform01(rng));
            auto seq = random_sequence(m, loops, rng);
            ComplexMatrix direct = lossy_composed_map(seq, loss, false).matrix();
            ComplexMatrix skewed = apply_loss(build_composed_map(seq), loss_matrix(m, loops, loss)).matrix();
            worst = std::max(worst, (direct - skewed).cwiseAbs().maxCoeff());
        }
        out.push_back(finish("telescoping loss identity", worst, 1e-12));
    }
    {
        double worst = 0.0;
        for (int trial = 0; trial < 30; ++trial) {
            std::size_t m = 1 + rng() % 4;
            std::size_t n = 1 + rng() % 3;
            auto u = build_composed_map(random_sequence(m, std::max<std::size_t>(1, m - 1), rng));
            Occupation in(m, 0);
            for (std::size_t k = 0; k < n; ++k) in[rng() % m]++;
            double total = 0.0;
            for (const auto& outc : enumerate_basis(m, n).states) {
                total += std::norm(output_amplitude(u, in, outc));
            }
            worst = std::max(worst, std::abs(total - 1.0));
        }
        out.push_back(finish("Fock output distribution normalizes", worst, 1e-9));
    }
    {
        // Input-side loss keeps the rows orthogonal, where the per-row
        // product formula is exact.
        double worst = 0.0;
        for (int trial = 0; trial < 30; ++trial) {
            std::size_t m = 1 + rng() % 3;
            auto u = build_composed_map(random_sequence(m, std::max<std::size_t>(1, m - 1), rng));
            Eigen::VectorXd d(static_cast<Eigen::Index>(m));
            for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = 0.3 + 0.7 * uniform01(rng);
            TransferMatrix lossy(d.cast<Complex>().asDiagonal() * u.matrix());
            auto occ = one_photon_per_mode(m);
            worst = std::max(worst, std::abs(postselection_oracle(lossy, occ) -
                                             postselection_probability(lossy, occ)));
        }
        out.push_back(finish("post-selection: dilation vs row formula (input-side loss)", worst, 1e-9));
    }
    {
        double worst = 0.0;
        for (int trial = 0; trial < 30; ++trial) {
            std::size_t m = 1 + rng() % 3;
            std::size_t loops = std::max<std::size_t>(1, m - 1);
            LossParams loss(0.6 + 0.4 * uniform01(rng), 0.8 + 0.2 * uniform01(rng));
            auto lossy = lossy_composed_map(random_sequence(m, loops, rng), loss, true);
            ComplexMatrix gram = lossy.matrix() * lossy.matrix().adjoint();
            double expected = permanent(gram).real();
            worst = std::max(worst, std::abs(postselection_oracle(lossy, one_photon_per_mode(m)) - expected));
        }
        out.push_back(finish("post-selection: dilation vs perm(A A^dagger) (skewed maps)", worst, 1e-9));
    }
    {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            std::size_t m = 1 + rng() % 4;
            auto seq = random_sequence(m, 1, rng);
            MismatchParams params;
            params.delta = (uniform01(rng) - 0.5) * 2.0;
            std::vector<double> eps(m);
            for (auto& e : eps) e = (uniform01(rng) - 0.5);
            auto occ = one_photon_per_mode(m);
            auto ideal = evolve_pulse_train(seq, TemporalState::input(m, occ), MismatchParams{});
            auto actual = evolve_pulse_train(seq, TemporalState::input(m, occ, eps), params);
            worst = std::max(worst, std::abs(fidelity_expansion(ideal, actual, params.c) -
                                             fidelity_permanent(seq, params, occ, eps)));
        }
        out.push_back(finish("fidelity: configuration expansion vs permanent", worst, 1e-10));
    }
    {
        double worst = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            std::size_t m = 1 + rng() % 4;
            auto seq = random_sequence(m, 1, rng);
            auto v = build_single_loop_map(seq);
            for (std::size_t i = 1; i <= m; ++i) {
                Occupation occ(m, 0);
                occ[i - 1] = 1;
                auto out_state = evolve_pulse_train(seq, TemporalState::input(m, occ), MismatchParams{});
                for (std::size_t j = 1; j <= m; ++j) {
                    double p = out_state.bin_probability({static_cast<int>(j)});
                    worst = std::max(worst, std::abs(p - std::norm(v.entry(i, j))));
                }
            }
        }
        out.push_back(finish("temporal model reduces to the spatial map", worst, 1e-12));
    }
    return out;
}

}  // namespace fiberloop
