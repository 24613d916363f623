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
#include <span>
#include <vector>

#include "fiberloop/linop.hpp"

namespace fiberloop {

inline constexpr std::size_t kDefaultBasisCap = 100'000;

using Occupation = std::vector<unsigned>;

/// Every occupation vector of n photons over m modes, in descending
/// lexicographic order: (n,0,...,0) first, (0,...,0,n) last.
struct FockBasis {
    std::size_t m;
    std::size_t n;
    std::vector<Occupation> states;
};

/// C(m+n-1, n); saturates at SIZE_MAX on overflow.
std::size_t basis_size(std::size_t m, std::size_t n);

/// Throws std::invalid_argument for m == 0 or when the basis exceeds cap.
FockBasis enumerate_basis(std::size_t m, std::size_t n, std::size_t cap = kDefaultBasisCap);

/// perm(U[in, out]) / sqrt(prod in_i! prod out_j!), rows of U repeated by the
/// input occupation and columns by the output occupation.
Complex output_amplitude(const ComplexMatrix& u, std::span<const unsigned> in,
                         std::span<const unsigned> out);
Complex output_amplitude(const TransferMatrix& u, std::span<const unsigned> in,
                         std::span<const unsigned> out);

/// Unitary dilation of a contraction A = W S X^dagger: one ancilla loss mode
/// per singular value below 1 - 1e-12, coupled by a real beamsplitter of
/// transmission s_k. The top-left m x m block is A. Throws
/// std::invalid_argument when a singular value exceeds 1 + 1e-9.
ComplexMatrix unitary_dilation(const ComplexMatrix& a);

/// Probability that no photon ends in a loss mode, by evolving the input
/// through the dilation and summing over the full output basis. Throws
/// std::logic_error if the full distribution fails to normalize to 1e-9.
double postselection_oracle(const TransferMatrix& lossy, std::span<const unsigned> in);

}  // namespace fiberloop
