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

#include <cstdint>
#include <string>
#include <vector>

namespace fiberloop {

struct CheckResult {
    std::string name;
    bool passed = false;
    /// Worst observed discrepancy against the check's tolerance.
    double worst = 0.0;
    double tolerance = 0.0;
};

/// Cross-module oracle checks on small random instances: every route that
/// has an independent counterpart is compared against it.
std::vector<CheckResult> run_validation(std::uint64_t seed);

}  // namespace fiberloop
