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

#include "fiberloop/linop.hpp"

namespace fiberloop {

inline constexpr std::size_t kDefaultPermanentCap = 12;

/// perm(M) by Ryser's inclusion-exclusion formula with Gray-code row sums,
/// O(2^n n). The 0x0 permanent is 1. Throws std::invalid_argument on a
/// non-square matrix or n > cap.
Complex permanent(const ComplexMatrix& m, std::size_t cap = kDefaultPermanentCap);

/// Same as permanent().
Complex permanent_ryser(const ComplexMatrix& m, std::size_t cap = kDefaultPermanentCap);

/// Sum over all n! permutations. Reference implementation for small n.
Complex permanent_naive(const ComplexMatrix& m, std::size_t cap = kDefaultPermanentCap);

}  // namespace fiberloop
