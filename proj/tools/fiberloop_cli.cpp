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

// fiberloop: seeded sweeps and map dumps for the time-bin fiber-loop
// interferometer model.
//
//   fiberloop loss-sweep --m 2:6:1 --eta-f 0.7:1:0.1 --out loss.csv
//   fiberloop mismatch-sweep --m 3 --delta 0:1:0.25 --format json
//   fiberloop jitter-sweep --config jitter.json --seed 7
//   fiberloop dump-map --m 2 --loops 1 --eta-f 0.9
//   fiberloop validate
//
// Data goes to --out (stdout when absent); progress goes to stderr. On
// failure a single JSON line {"error": kind, "message": ...} is written to
// stderr and the exit code is nonzero.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "fiberloop/harness.hpp"
#include "fiberloop/validation.hpp"

namespace {

using fiberloop::ConfigError;
using fiberloop::Experiment;
using fiberloop::SweepConfig;

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> format;
    std::optional<std::size_t> iterations;
    std::optional<std::string> m, eta_f, eta_s, delta, sigma;
    std::optional<unsigned> threads;
    std::optional<std::size_t> jitter_repeats;
    std::optional<std::size_t> loops;
    std::optional<bool> outer;
    std::optional<std::string> experiment;
    bool quiet = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (flags override it)");
    cmd->add_option("--seed", f.seed, "master seed");
    cmd->add_option("--out", f.out, "output path (default stdout)");
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", f.threads, "worker threads, 0 = all cores");
    cmd->add_option("--m", f.m, "mode counts, start:stop:step or list");
    cmd->add_option("--eta-f", f.eta_f, "fiber efficiency grid");
    cmd->add_option("--eta-s", f.eta_s, "switch efficiency grid");
    cmd->add_flag("--quiet", f.quiet, "suppress progress output");
}

std::vector<std::size_t> mode_values(const std::string& text) {
    std::vector<std::size_t> out;
    for (double v : fiberloop::parse_grid(text)) {
        if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::size_t>(v))) {
            throw ConfigError("mode counts must be positive integers");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

SweepConfig build_config(Experiment e, const Flags& f) {
    SweepConfig cfg = SweepConfig::defaults(e);
    if (!f.config_path.empty()) {
        std::ifstream in(f.config_path);
        if (!in) {
            throw ConfigError("cannot read config file " + f.config_path);
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& ex) {
            throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
        }
        cfg = fiberloop::apply_config_json(std::move(cfg), doc);
    }
    if (f.experiment) {
        Experiment chosen = fiberloop::parse_experiment(*f.experiment);
        if (chosen != cfg.experiment) {
            SweepConfig fresh = SweepConfig::defaults(chosen);
            fresh.seed = cfg.seed;
            cfg = fresh;
        }
    }
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out_path = *f.out;
    if (f.format) cfg.format = *f.format;
    if (f.iterations) cfg.iterations = *f.iterations;
    if (f.threads) cfg.threads = *f.threads;
    if (f.m) cfg.m = mode_values(*f.m);
    if (f.eta_f) cfg.eta_f = fiberloop::parse_grid(*f.eta_f);
    if (f.eta_s) cfg.eta_s = fiberloop::parse_grid(*f.eta_s);
    if (f.delta) cfg.delta = fiberloop::parse_grid(*f.delta);
    if (f.sigma) cfg.sigma = fiberloop::parse_grid(*f.sigma);
    if (f.jitter_repeats) cfg.jitter_repeats = *f.jitter_repeats;
    if (f.loops) cfg.loops = *f.loops;
    if (f.outer) cfg.include_outer = *f.outer;
    cfg.validate();
    return cfg;
}

template <typename Writer>
void emit(const SweepConfig& cfg, Writer&& write) {
    if (cfg.out_path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open output file " + cfg.out_path);
    }
    write(out);
    out.flush();
    if (!out) {
        throw std::runtime_error("failed writing output file " + cfg.out_path);
    }
}

int fail(const std::string& kind, const std::string& message, int code) {
    nlohmann::json line = {{"error", kind}, {"message", message}};
    std::cerr << line.dump() << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Time-bin fiber-loop interferometer simulator"};
    app.require_subcommand(1);

    Flags loss_flags, mismatch_flags, jitter_flags, dump_flags;
    std::uint64_t validate_seed = 1;

    auto* loss = app.add_subcommand("loss-sweep", "similarity and post-selection vs loss");
    add_common(loss, loss_flags);
    loss->add_option("--iterations", loss_flags.iterations, "random sequences per grid point");
    loss->add_option("--experiment", loss_flags.experiment, "loss-similarity or loss-switch")
        ->check(CLI::IsMember({"loss-similarity", "loss-switch"}));
    loss->add_option("--outer-loss", loss_flags.outer, "include the outer-loop loss factor");

    auto* mismatch = app.add_subcommand("mismatch-sweep", "fidelity vs inner-loop length error");
    add_common(mismatch, mismatch_flags);
    mismatch->add_option("--iterations", mismatch_flags.iterations, "random sequences per grid point");
    mismatch->add_option("--delta", mismatch_flags.delta, "loop-length error grid, units of c");
    mismatch->add_option("--sigma", mismatch_flags.sigma, "jitter grid, units of c");

    auto* jitter = app.add_subcommand("jitter-sweep", "fidelity vs source time-jitter");
    add_common(jitter, jitter_flags);
    jitter->add_option("--iterations", jitter_flags.iterations, "random sequences per grid point");
    jitter->add_option("--delta", jitter_flags.delta, "loop-length error grid, units of c");
    jitter->add_option("--sigma", jitter_flags.sigma, "jitter grid, units of c");
    jitter->add_option("--jitter-repeats", jitter_flags.jitter_repeats,
                       "jitter draws averaged per sequence");

    auto* dump = app.add_subcommand("dump-map", "write V, V', L, U and U' as JSON");
    add_common(dump, dump_flags);
    dump->add_option("--loops", dump_flags.loops, "number of inner-loop passes");
    dump->add_option("--outer-loss", dump_flags.outer, "include the outer-loop loss factor");

    auto* validate = app.add_subcommand("validate", "run the cross-module oracle checks");
    validate->add_option("--seed", validate_seed, "seed for the random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*validate) {
            bool ok = true;
            for (const auto& check : fiberloop::run_validation(validate_seed)) {
                std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name
                          << " (worst " << check.worst << ", tol " << check.tolerance << ")\n";
                ok = ok && check.passed;
            }
            return ok ? 0 : 1;
        }
        if (*dump) {
            SweepConfig cfg = build_config(Experiment::MapDump, dump_flags);
            auto doc = fiberloop::map_dump_to_json(fiberloop::dump_map(cfg));
            emit(cfg, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
            return 0;
        }
        struct Job {
            CLI::App* cmd;
            Flags* flags;
            Experiment experiment;
        };
        for (const Job& job : {Job{loss, &loss_flags, Experiment::LossSimilarity},
                               Job{mismatch, &mismatch_flags, Experiment::MismatchDelta},
                               Job{jitter, &jitter_flags, Experiment::JitterSigma}}) {
            if (!*job.cmd) {
                continue;
            }
            SweepConfig cfg = build_config(job.experiment, *job.flags);
            std::ostream* log = job.flags->quiet ? nullptr : &std::cerr;
            fiberloop::SweepResult result;
            if (job.experiment == Experiment::LossSimilarity) {
                if (cfg.experiment != Experiment::LossSimilarity &&
                    cfg.experiment != Experiment::LossSwitch) {
                    throw ConfigError("loss-sweep needs a loss experiment config");
                }
                result = fiberloop::run_loss_sweep(cfg, log);
            } else {
                if (cfg.experiment != Experiment::MismatchDelta &&
                    cfg.experiment != Experiment::JitterSigma) {
                    throw ConfigError("this sweep needs a mismatch experiment config");
                }
                result = fiberloop::run_mismatch_sweep(cfg, log);
            }
            emit(cfg, [&](std::ostream& out) { fiberloop::write_result(result, out); });
            return 0;
        }
    } catch (const ConfigError& e) {
        return fail("config", e.what(), 2);
    } catch (const std::invalid_argument& e) {
        return fail("invalid-argument", e.what(), 2);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 1);
    }
    return fail("usage", "no subcommand", 2);
}
