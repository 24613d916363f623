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

#include "fiberloop/permanent.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace fiberloop {

namespace {

void check_shape(const ComplexMatrix& m, std::size_t cap) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("permanent of a non-square matrix");
    }
    if (static_cast<std::size_t>(m.rows()) > cap) {
        throw std::invalid_argument("permanent size exceeds the configured cap");
    }
}

}  // namespace

Complex permanent_ryser(const ComplexMatrix& m, std::size_t cap) {
    check_shape(m, cap);
    const auto n = static_cast<std::size_t>(m.rows());
    if (n == 0) {
        return 1;
    }
    // perm(A) = (-1)^n sum_{S} (-1)^{|S|} prod_i sum_{j in S} a_ij, walking the
    // column subsets S in Gray-code order so each step flips one column.
    std::vector<Complex> row_sums(n, Complex(0));
    Complex total = 0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    std::uint64_t gray = 0;
    for (std::uint64_t k = 1; k < subsets; ++k) {
        std::uint64_t next = k ^ (k >> 1);
        std::uint64_t flipped = next ^ gray;
        auto col = static_cast<Eigen::Index>(std::countr_zero(flipped));
        double sign = (next & flipped) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            row_sums[i] += sign * m(static_cast<Eigen::Index>(i), col);
        }
        gray = next;
        Complex prod = 1;
        for (const auto& s : row_sums) {
            prod *= s;
        }
        bool odd = (std::popcount(gray) & 1) != 0;
        total += odd ? -prod : prod;
    }
    return (n % 2 == 0) ? total : -total;
}

Complex permanent(const ComplexMatrix& m, std::size_t cap) { return permanent_ryser(m, cap); }

Complex permanent_naive(const ComplexMatrix& m, std::size_t cap) {
    check_shape(m, cap);
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<Eigen::Index> sigma(n);
    std::iota(sigma.begin(), sigma.end(), Eigen::Index{0});
    Complex total = 0;
    do {
        Complex prod = 1;
        for (std::size_t i = 0; i < n; ++i) {
            prod *= m(static_cast<Eigen::Index>(i), sigma[i]);
        }
        total += prod;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

}  // namespace fiberloop
