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
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "fiberloop/linop.hpp"
#include "fiberloop/loss_model.hpp"

namespace fiberloop {

inline constexpr std::string_view kVersion = "0.1.0";

class ConfigError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class Experiment { LossSimilarity, LossSwitch, MismatchDelta, JitterSigma, MapDump };

std::string_view to_string(Experiment e);
Experiment parse_experiment(std::string_view name);

/// Parses "start:stop:step", a comma-separated list, or a single number.
/// Range points are start + k*step for every k that stays within stop (with
/// a 1e-9*step allowance). Throws ConfigError on malformed or empty input.
std::vector<double> parse_grid(std::string_view text);

/// Experiment description. Shifts (delta, sigma) and tau are in units of the
/// wave-packet width c.
struct SweepConfig {
    Experiment experiment = Experiment::LossSimilarity;
    std::vector<std::size_t> m;
    std::vector<double> eta_f;
    std::vector<double> eta_s;
    std::vector<double> delta;
    std::vector<double> sigma;
    std::size_t iterations = 1750;
    std::uint64_t seed = 1;
    std::string out_path;
    std::string format = "csv";
    double c = 1.0;
    double tau = 100.0;
    std::size_t jitter_repeats = 1;
    bool include_outer = true;
    /// 0 = hardware concurrency. Never changes results.
    unsigned threads = 0;
    /// map-dump only: loop count (default m-1, at least 1) and an optional
    /// explicit sequence that overrides the seeded draw.
    std::optional<std::size_t> loops;
    std::optional<SwitchingSequence> sequence;

    /// Defaults for an experiment: 1750 iterations for the loss sweeps, 250
    /// trials for the mismatch sweeps.
    static SweepConfig defaults(Experiment e);

    /// Throws ConfigError on empty grids, zero iterations, bad formats or
    /// out-of-range values.
    void validate() const;

    std::size_t grid_size() const;
};

/// Overlays the fields present in a JSON config document onto `base`.
SweepConfig apply_config_json(SweepConfig base, const nlohmann::json& doc);
nlohmann::json config_to_json(const SweepConfig& config);

/// Number of inner-loop passes used by the loss sweeps: m - 1, at least 1.
std::size_t sweep_loops(std::size_t m);

struct SweepRecord {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t loops = 0;
    double eta_f = 1.0;
    double eta_s = 1.0;
    double delta = 0.0;
    double sigma = 0.0;
    std::optional<double> s_max;
    std::optional<double> s_mean;
    std::optional<double> ps_at_best;
    std::optional<double> f_mean;
    std::optional<double> f_min;
    std::optional<double> f_max;
    std::optional<double> f_stderr;
};

struct SweepResult {
    SweepConfig config;
    /// Canonical order: m outermost, then eta_f, eta_s (loss) or delta,
    /// sigma (mismatch).
    std::vector<SweepRecord> records;
};

/// Log lines (progress) go to `log` when non-null; data never does.
SweepResult run_loss_sweep(const SweepConfig& config, std::ostream* log = nullptr);
SweepResult run_mismatch_sweep(const SweepConfig& config, std::ostream* log = nullptr);

/// CSV: header row, fixed column order, 12 significant digits, empty cells
/// for statistics an experiment does not produce.
void write_csv(const SweepResult& result, std::ostream& out);
nlohmann::json result_to_json(const SweepResult& result);
void write_result(const SweepResult& result, std::ostream& out);

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix complex_matrix_from_json(const nlohmann::json& j);
nlohmann::json real_matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd real_matrix_from_json(const nlohmann::json& j);
nlohmann::json sequence_to_json(const SwitchingSequence& seq);
SwitchingSequence sequence_from_json(const nlohmann::json& j);

struct MapDump {
    SwitchingSequence sequence;
    LossParams loss;
    std::vector<ComplexMatrix> pass_maps;
    std::vector<ComplexMatrix> lossy_pass_maps;
    Eigen::MatrixXd loss_matrix;
    ComplexMatrix composed;
    ComplexMatrix lossy_composed;
};

/// Builds V, V', L, U and U' (U' with the outer-loop factor when
/// include_outer is set) for the first m, eta_f and eta_s grid values.
MapDump dump_map(const SweepConfig& config);
nlohmann::json map_dump_to_json(const MapDump& dump);
MapDump map_dump_from_json(const nlohmann::json& j);

}  // namespace fiberloop
