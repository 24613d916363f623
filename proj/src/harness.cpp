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

#include "fiberloop/harness.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <utility>

#include "fiberloop/random.hpp"
#include "fiberloop/temporal.hpp"

namespace fiberloop {

using nlohmann::json;

namespace {

double parse_number(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::vector<double> grid_from_json(const json& j, const char* name) {
    if (j.is_number()) {
        return {j.get<double>()};
    }
    if (j.is_string()) {
        return parse_grid(j.get<std::string>());
    }
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& v : j) {
            if (!v.is_number()) {
                throw ConfigError(std::string("grid '") + name + "' holds a non-number");
            }
            out.push_back(v.get<double>());
        }
        if (out.empty()) {
            throw ConfigError(std::string("grid '") + name + "' is empty");
        }
        return out;
    }
    throw ConfigError(std::string("grid '") + name + "' must be a number, range string or array");
}

std::vector<std::size_t> mode_grid(const std::vector<double>& values) {
    std::vector<std::size_t> out;
    for (double v : values) {
        if (!(v >= 1.0) || std::floor(v) != v) {
            throw ConfigError("mode counts must be positive integers");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

bool is_loss(Experiment e) {
    return e == Experiment::LossSimilarity || e == Experiment::LossSwitch;
}

bool is_mismatch(Experiment e) {
    return e == Experiment::MismatchDelta || e == Experiment::JitterSigma;
}

}  // namespace

std::string_view to_string(Experiment e) {
    switch (e) {
        case Experiment::LossSimilarity:
            return "loss-similarity";
        case Experiment::LossSwitch:
            return "loss-switch";
        case Experiment::MismatchDelta:
            return "mismatch-delta";
        case Experiment::JitterSigma:
            return "jitter-sigma";
        case Experiment::MapDump:
            return "map-dump";
    }
    return "unknown";
}

Experiment parse_experiment(std::string_view name) {
    for (auto e : {Experiment::LossSimilarity, Experiment::LossSwitch, Experiment::MismatchDelta,
                   Experiment::JitterSigma, Experiment::MapDump}) {
        if (to_string(e) == name) {
            return e;
        }
    }
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

std::vector<double> parse_grid(std::string_view text) {
    if (text.find(':') != std::string_view::npos) {
        std::vector<std::string_view> parts;
        std::size_t start = 0;
        for (;;) {
            std::size_t pos = text.find(':', start);
            parts.push_back(text.substr(start, pos - start));
            if (pos == std::string_view::npos) break;
            start = pos + 1;
        }
        if (parts.size() != 3) {
            throw ConfigError("range must be start:stop:step, got '" + std::string(text) + "'");
        }
        double first = parse_number(parts[0]);
        double stop = parse_number(parts[1]);
        double step = parse_number(parts[2]);
        if (!(step != 0.0) || !std::isfinite(step)) {
            throw ConfigError("range step must be non-zero");
        }
        double span = (stop - first) / step;
        if (span < -1e-9) {
            throw ConfigError("range '" + std::string(text) + "' is empty");
        }
        auto count = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
        if (count > 1'000'000) {
            throw ConfigError("range '" + std::string(text) + "' is too large");
        }
        std::vector<double> out;
        out.reserve(count);
        for (std::size_t k = 0; k < count; ++k) {
            out.push_back(first + static_cast<double>(k) * step);
        }
        return out;
    }
    std::vector<double> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = text.find(',', start);
        out.push_back(parse_number(text.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

SweepConfig SweepConfig::defaults(Experiment e) {
    SweepConfig c;
    c.experiment = e;
    c.eta_f = {1.0};
    c.eta_s = {1.0};
    c.delta = {0.0};
    c.sigma = {0.0};
    switch (e) {
        case Experiment::LossSimilarity:
            c.m = {2, 3, 4, 5, 6};
            c.eta_f = parse_grid("0.5:1:0.05");
            c.iterations = 1750;
            break;
        case Experiment::LossSwitch:
            c.m = {3};
            c.eta_f = parse_grid("0.5:1:0.05");
            c.eta_s = parse_grid("0.5:1:0.05");
            c.iterations = 1750;
            break;
        case Experiment::MismatchDelta:
            c.m = {1, 2, 3, 4};
            c.delta = parse_grid("0:1:0.1");
            c.iterations = 250;
            break;
        case Experiment::JitterSigma:
            c.m = {1, 2, 3, 4};
            c.sigma = parse_grid("0:1:0.1");
            c.iterations = 250;
            break;
        case Experiment::MapDump:
            c.m = {3};
            c.iterations = 1;
            c.format = "json";
            break;
    }
    return c;
}

void SweepConfig::validate() const {
    if (m.empty() || eta_f.empty() || eta_s.empty() || delta.empty() || sigma.empty()) {
        throw ConfigError("every grid axis needs at least one value");
    }
    if (iterations == 0) {
        throw ConfigError("iterations must be at least 1");
    }
    if (format != "csv" && format != "json") {
        throw ConfigError("format must be csv or json");
    }
    if (jitter_repeats == 0) {
        throw ConfigError("jitter_repeats must be at least 1");
    }
    for (auto v : m) {
        if (v == 0) throw ConfigError("mode counts must be positive");
    }
    for (const auto* axis : {&eta_f, &eta_s}) {
        for (double v : *axis) {
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("efficiencies must lie in [0, 1]");
        }
    }
    if (!(c > 0.0) || !(tau > 0.0)) {
        throw ConfigError("c and tau must be positive");
    }
    for (double v : delta) {
        if (!(std::abs(v) * c < tau / 10.0)) {
            throw ConfigError("|delta| must stay below tau/10");
        }
    }
    for (double v : sigma) {
        if (!(v >= 0.0)) throw ConfigError("sigma must be non-negative");
    }
    if (loops && *loops == 0) {
        throw ConfigError("loops must be at least 1");
    }
}

std::size_t SweepConfig::grid_size() const {
    if (is_loss(experiment)) {
        return m.size() * eta_f.size() * eta_s.size();
    }
    if (is_mismatch(experiment)) {
        return m.size() * delta.size() * sigma.size();
    }
    return 1;
}

SweepConfig apply_config_json(SweepConfig base, const json& doc) {
    if (!doc.is_object()) {
        throw ConfigError("config document must be a JSON object");
    }
    try {
        if (doc.contains("experiment")) {
            Experiment e = parse_experiment(doc.at("experiment").get<std::string>());
            if (e != base.experiment) {
                // A different experiment starts from its own defaults.
                SweepConfig fresh = SweepConfig::defaults(e);
                fresh.seed = base.seed;
                fresh.threads = base.threads;
                base = std::move(fresh);
            }
        }
        if (doc.contains("grid")) {
            const auto& g = doc.at("grid");
            if (g.contains("m")) base.m = mode_grid(grid_from_json(g.at("m"), "m"));
            if (g.contains("eta_f")) base.eta_f = grid_from_json(g.at("eta_f"), "eta_f");
            if (g.contains("eta_s")) base.eta_s = grid_from_json(g.at("eta_s"), "eta_s");
            if (g.contains("delta")) base.delta = grid_from_json(g.at("delta"), "delta");
            if (g.contains("sigma")) base.sigma = grid_from_json(g.at("sigma"), "sigma");
        }
        if (doc.contains("iterations")) base.iterations = doc.at("iterations").get<std::size_t>();
        if (doc.contains("seed")) base.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("output")) {
            const auto& o = doc.at("output");
            if (o.contains("path")) base.out_path = o.at("path").get<std::string>();
            if (o.contains("format")) base.format = o.at("format").get<std::string>();
        }
        if (doc.contains("c")) base.c = doc.at("c").get<double>();
        if (doc.contains("tau")) base.tau = doc.at("tau").get<double>();
        if (doc.contains("jitter_repeats")) {
            base.jitter_repeats = doc.at("jitter_repeats").get<std::size_t>();
        }
        if (doc.contains("include_outer")) base.include_outer = doc.at("include_outer").get<bool>();
        if (doc.contains("threads")) base.threads = doc.at("threads").get<unsigned>();
        if (doc.contains("loops")) base.loops = doc.at("loops").get<std::size_t>();
        if (doc.contains("sequence")) base.sequence = sequence_from_json(doc.at("sequence"));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config field: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("bad sequence: ") + e.what());
    }
    return base;
}

json config_to_json(const SweepConfig& config) {
    json j;
    j["experiment"] = std::string(to_string(config.experiment));
    j["grid"] = {{"m", config.m},
                 {"eta_f", config.eta_f},
                 {"eta_s", config.eta_s},
                 {"delta", config.delta},
                 {"sigma", config.sigma}};
    j["iterations"] = config.iterations;
    j["seed"] = config.seed;
    j["output"] = {{"path", config.out_path}, {"format", config.format}};
    j["c"] = config.c;
    j["tau"] = config.tau;
    j["jitter_repeats"] = config.jitter_repeats;
    j["include_outer"] = config.include_outer;
    if (config.loops) j["loops"] = *config.loops;
    if (config.sequence) j["sequence"] = sequence_to_json(*config.sequence);
    return j;
}

std::size_t sweep_loops(std::size_t m) { return m > 1 ? m - 1 : 1; }

SweepResult run_loss_sweep(const SweepConfig& config, std::ostream* log) {
    config.validate();
    if (!is_loss(config.experiment)) {
        throw ConfigError("run_loss_sweep needs a loss-similarity or loss-switch config");
    }
    SweepResult result{config, {}};
    result.records.reserve(config.grid_size());
    for (std::size_t m : config.m) {
        for (double eta_f : config.eta_f) {
            for (double eta_s : config.eta_s) {
                SweepRecord rec;
                rec.m = m;
                rec.n = m;
                rec.loops = sweep_loops(m);
                rec.eta_f = eta_f;
                rec.eta_s = eta_s;
                SimilaritySearchOptions opts;
                opts.include_outer = config.include_outer;
                opts.threads = config.threads;
                // Every grid point reuses the master seed, so all points see
                // the same candidate sequences for a given m.
                auto best = optimize_similarity(m, rec.loops, LossParams(eta_f, eta_s),
                                                config.iterations, config.seed, opts);
                rec.s_max = best.best_similarity;
                rec.s_mean = best.mean_similarity;
                rec.ps_at_best = best.postselection_at_best;
                if (log) {
                    *log << "[" << to_string(config.experiment) << "] m=" << m
                         << " eta_f=" << eta_f << " eta_s=" << eta_s
                         << " S_max=" << *rec.s_max << " P_S=" << *rec.ps_at_best << "\n";
                }
                result.records.push_back(rec);
            }
        }
    }
    return result;
}

SweepResult run_mismatch_sweep(const SweepConfig& config, std::ostream* log) {
    config.validate();
    if (!is_mismatch(config.experiment)) {
        throw ConfigError("run_mismatch_sweep needs a mismatch-delta or jitter-sigma config");
    }
    SweepResult result{config, {}};
    result.records.reserve(config.grid_size());
    for (std::size_t m : config.m) {
        for (double delta : config.delta) {
            for (double sigma : config.sigma) {
                SweepRecord rec;
                rec.m = m;
                rec.n = m;
                rec.loops = 1;
                rec.delta = delta;
                rec.sigma = sigma;
                MismatchParams params{delta * config.c, sigma * config.c, config.c,
                                      config.tau * config.c};
                FidelityMcOptions opts;
                opts.jitter_repeats = config.jitter_repeats;
                opts.threads = config.threads;
                auto stats = expected_fidelity_mc(m, params, config.iterations, config.seed, opts);
                rec.f_mean = stats.mean;
                rec.f_min = stats.min;
                rec.f_max = stats.max;
                rec.f_stderr = stats.standard_error;
                if (log) {
                    *log << "[" << to_string(config.experiment) << "] m=" << m
                         << " delta=" << delta << " sigma=" << sigma << " F_mean=" << stats.mean
                         << " jitter_rejections=" << stats.jitter_rejections << "\n";
                }
                result.records.push_back(rec);
            }
        }
    }
    return result;
}

void write_csv(const SweepResult& result, std::ostream& out) {
    out << "experiment,m,n,loops,eta_f,eta_s,delta_over_c,sigma_over_c,seed,iterations,"
           "S_max,S_mean,P_S_at_best,F_mean,F_min,F_max,F_stderr,version\n";
    const auto& cfg = result.config;
    for (const auto& r : result.records) {
        out << to_string(cfg.experiment) << ',' << r.m << ',' << r.n << ',' << r.loops << ','
            << format_number(r.eta_f) << ',' << format_number(r.eta_s) << ','
            << format_number(r.delta) << ',' << format_number(r.sigma) << ',' << cfg.seed << ','
            << cfg.iterations << ',' << format_optional(r.s_max) << ','
            << format_optional(r.s_mean) << ',' << format_optional(r.ps_at_best) << ','
            << format_optional(r.f_mean) << ',' << format_optional(r.f_min) << ','
            << format_optional(r.f_max) << ',' << format_optional(r.f_stderr) << ','
            << kVersion << '\n';
    }
}

json result_to_json(const SweepResult& result) {
    json records = json::array();
    for (const auto& r : result.records) {
        records.push_back({{"m", r.m},
                           {"n", r.n},
                           {"loops", r.loops},
                           {"eta_f", r.eta_f},
                           {"eta_s", r.eta_s},
                           {"delta_over_c", r.delta},
                           {"sigma_over_c", r.sigma},
                           {"S_max", optional_json(r.s_max)},
                           {"S_mean", optional_json(r.s_mean)},
                           {"P_S_at_best", optional_json(r.ps_at_best)},
                           {"F_mean", optional_json(r.f_mean)},
                           {"F_min", optional_json(r.f_min)},
                           {"F_max", optional_json(r.f_max)},
                           {"F_stderr", optional_json(r.f_stderr)}});
    }
    json j;
    j["version"] = std::string(kVersion);
    j["units"] = {{"delta", "c"}, {"sigma", "c"}, {"tau", "c"}};
    j["config"] = config_to_json(result.config);
    j["records"] = std::move(records);
    return j;
}

void write_result(const SweepResult& result, std::ostream& out) {
    if (result.config.format == "json") {
        out << result_to_json(result).dump(2) << '\n';
    } else {
        write_csv(result, out);
    }
}

json matrix_to_json(const ComplexMatrix& m) {
    json re = json::array();
    json im = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json rr = json::array();
        json ri = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            rr.push_back(m(i, k).real());
            ri.push_back(m(i, k).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

ComplexMatrix complex_matrix_from_json(const json& j) {
    auto rows = j.at("rows").get<Eigen::Index>();
    auto cols = j.at("cols").get<Eigen::Index>();
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k) {
            auto ui = static_cast<std::size_t>(i);
            auto uk = static_cast<std::size_t>(k);
            m(i, k) = Complex(re.at(ui).at(uk).get<double>(), im.at(ui).at(uk).get<double>());
        }
    }
    return m;
}

json real_matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index k = 0; k < m.cols(); ++k) {
            r.push_back(m(i, k));
        }
        rows.push_back(std::move(r));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", rows}};
}

Eigen::MatrixXd real_matrix_from_json(const json& j) {
    auto rows = j.at("rows").get<Eigen::Index>();
    auto cols = j.at("cols").get<Eigen::Index>();
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index k = 0; k < cols; ++k) {
            m(i, k) = j.at("values")
                          .at(static_cast<std::size_t>(i))
                          .at(static_cast<std::size_t>(k))
                          .get<double>();
        }
    }
    return m;
}

json sequence_to_json(const SwitchingSequence& seq) {
    auto c = [](Complex z) { return json::array({z.real(), z.imag()}); };
    json passes = json::array();
    for (std::size_t l = 1; l <= seq.passes(); ++l) {
        json pass = json::array();
        for (const auto& s : seq.pass_settings(l)) {
            pass.push_back({{"u11", c(s.u11())}, {"u12", c(s.u12())}, {"u21", c(s.u21())},
                            {"u22", c(s.u22())}});
        }
        passes.push_back(std::move(pass));
    }
    return {{"m", seq.modes()}, {"passes", passes}};
}

SwitchingSequence sequence_from_json(const json& j) {
    auto c = [](const json& z) { return Complex(z.at(0).get<double>(), z.at(1).get<double>()); };
    std::vector<std::vector<BeamsplitterSetting>> passes;
    for (const auto& p : j.at("passes")) {
        std::vector<BeamsplitterSetting> pass;
        for (const auto& s : p) {
            pass.emplace_back(c(s.at("u11")), c(s.at("u12")), c(s.at("u21")), c(s.at("u22")));
        }
        passes.push_back(std::move(pass));
    }
    return SwitchingSequence(j.at("m").get<std::size_t>(), std::move(passes));
}

MapDump dump_map(const SweepConfig& config) {
    config.validate();
    LossParams loss(config.eta_f.front(), config.eta_s.front());
    SwitchingSequence seq = [&] {
        if (config.sequence) {
            return *config.sequence;
        }
        std::size_t m = config.m.front();
        Rng rng = make_rng(config.seed, 0);
        return random_sequence(m, config.loops.value_or(sweep_loops(m)), rng);
    }();
    MapDump dump{seq, loss, {}, {}, {}, {}, {}};
    for (const auto& v : build_pass_maps(seq)) {
        dump.pass_maps.push_back(v.matrix());
    }
    for (std::size_t l = 1; l <= seq.passes(); ++l) {
        dump.lossy_pass_maps.push_back(lossy_single_loop_map(seq.pass(l), loss).matrix());
    }
    dump.loss_matrix = loss_matrix(seq.modes(), seq.passes(), loss).matrix();
    dump.composed = build_composed_map(seq).matrix();
    dump.lossy_composed = lossy_composed_map(seq, loss, config.include_outer).matrix();
    return dump;
}

json map_dump_to_json(const MapDump& dump) {
    json v = json::array();
    json vl = json::array();
    for (const auto& m : dump.pass_maps) v.push_back(matrix_to_json(m));
    for (const auto& m : dump.lossy_pass_maps) vl.push_back(matrix_to_json(m));
    return {{"version", std::string(kVersion)},
            {"m", dump.sequence.modes()},
            {"loops", dump.sequence.passes()},
            {"eta_f", dump.loss.eta_f()},
            {"eta_s", dump.loss.eta_s()},
            {"sequence", sequence_to_json(dump.sequence)},
            {"V", v},
            {"V_lossy", vl},
            {"loss_matrix", real_matrix_to_json(dump.loss_matrix)},
            {"U", matrix_to_json(dump.composed)},
            {"U_lossy", matrix_to_json(dump.lossy_composed)}};
}

MapDump map_dump_from_json(const json& j) {
    MapDump dump{sequence_from_json(j.at("sequence")),
                 LossParams(j.at("eta_f").get<double>(), j.at("eta_s").get<double>()),
                 {},
                 {},
                 real_matrix_from_json(j.at("loss_matrix")),
                 complex_matrix_from_json(j.at("U")),
                 complex_matrix_from_json(j.at("U_lossy"))};
    for (const auto& m : j.at("V")) dump.pass_maps.push_back(complex_matrix_from_json(m));
    for (const auto& m : j.at("V_lossy")) dump.lossy_pass_maps.push_back(complex_matrix_from_json(m));
    return dump;
}

}  // namespace fiberloop
