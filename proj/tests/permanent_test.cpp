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
#include <stdexcept>

#include "gtest/gtest.h"

#include "test_util.hpp"

using namespace fiberloop;
using fiberloop::testing::random_disk_matrix;

TEST(permanent, identity_is_one) {
    for (Eigen::Index n = 0; n <= 8; ++n) {
        ComplexMatrix id = ComplexMatrix::Identity(n, n);
        EXPECT_NEAR(std::abs(permanent(id) - Complex(1)), 0.0, 1e-15);
        EXPECT_NEAR(std::abs(permanent_naive(id) - Complex(1)), 0.0, 1e-15);
    }
}

TEST(permanent, two_by_two_definition) {
    ComplexMatrix m(2, 2);
    Complex a(1, 2), b(-0.5, 0.25), c(3, -1), d(0.1, 0.7);
    m << a, b, c, d;
    EXPECT_NEAR(std::abs(permanent(m) - (a * d + b * c)), 0.0, 1e-14);
}

TEST(permanent, ryser_matches_permutation_sum) {
    Rng rng(77);
    for (Eigen::Index n = 1; n <= 7; ++n) {
        for (int trial = 0; trial < 10; ++trial) {
            ComplexMatrix m = random_disk_matrix(n, rng);
            Complex naive = permanent_naive(m);
            EXPECT_LE(std::abs(permanent_ryser(m) - naive), 1e-10 * std::max(1.0, std::abs(naive)))
                << "n=" << n;
        }
    }
}

TEST(permanent, random_five_by_five_relative_agreement) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        ComplexMatrix m = random_disk_matrix(5, rng);
        Complex naive = permanent_naive(m);
        EXPECT_LE(std::abs(permanent(m) - naive), 1e-10 * std::abs(naive));
    }
}

TEST(permanent, zero_row_and_row_permutation) {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::Index n = 2 + trial % 5;
        ComplexMatrix m = random_disk_matrix(n, rng);
        ComplexMatrix zeroed = m;
        zeroed.row(trial % n).setZero();
        EXPECT_EQ(permanent(zeroed), Complex(0));

        Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
        p.setIdentity();
        std::shuffle(p.indices().data(), p.indices().data() + n, rng);
        ComplexMatrix shuffled = p * m;
        EXPECT_LT(std::abs(permanent(shuffled) - permanent(m)), 1e-12);
    }
}

TEST(permanent, errors) {
    EXPECT_THROW(permanent(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
    EXPECT_THROW(permanent(ComplexMatrix::Identity(13, 13)), std::invalid_argument);
    EXPECT_THROW(permanent_naive(ComplexMatrix::Identity(4, 4), 3), std::invalid_argument);
    EXPECT_NO_THROW(permanent(ComplexMatrix::Identity(12, 12)));
}
