// causetrigger: batch analysis, synthetic validation and split diagnostics.

#include "ctrig/cause_trigger.hpp"
#include "ctrig/changepoint.hpp"
#include "ctrig/config.hpp"
#include "ctrig/error.hpp"
#include "ctrig/pipeline.hpp"
#include "ctrig/synth.hpp"
#include "ctrig/version.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ctrig;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitCellErrors = 2;

int fail(const std::string& reason) {
    std::cerr << "error: " << reason << '\n';
    return kExitFatal;
}

int fail(const Error& e) { return fail(std::string(to_string(e.code())) + ": " + e.what()); }

struct AnalyzeFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> output_dir;
    std::optional<double> alpha;
    std::optional<std::string> lag;
    std::optional<long long> min_i2;
    std::optional<std::string> aggregation;
    std::optional<std::string> backend;
};

// defaults < config file < CTRIG_WORKERS < flags
RunConfig resolve_run_config(const AnalyzeFlags& f) {
    KeyValues kv;
    if (!f.config.empty()) kv = read_key_values(f.config);
    RunConfig rc = run_config_from(kv);
    if (rc.input && rc.input->is_relative() && !f.config.empty()) {
        rc.input = fs::path(f.config).parent_path() / *rc.input;
    }
    if (const char* env = std::getenv("CTRIG_WORKERS"); env != nullptr && *env != '\0') {
        rc.workers = static_cast<int>(parse_integer("workers", env));
    }
    if (f.workers) rc.workers = *f.workers;
    if (f.output_dir) rc.output_dir = *f.output_dir;
    if (f.seed) rc.algorithm.seed = *f.seed;
    if (f.alpha) rc.algorithm.alpha = *f.alpha;
    if (f.lag) rc.algorithm.lag = parse_lag(*f.lag);
    if (f.min_i2) rc.algorithm.min_size_I2 = *f.min_i2;
    KeyValues enums;
    if (f.aggregation) enums["aggregation"] = *f.aggregation;
    if (f.backend) enums["backend"] = *f.backend;
    apply_algorithm_keys(enums, rc.algorithm);
    if (rc.workers < 1) throw Error(ErrorCode::ConfigError, "config.workers must be at least 1");
    rc.algorithm.validate();
    return rc;
}

int cmd_analyze(const AnalyzeFlags& flags) {
    RunConfig rc;
    try {
        rc = resolve_run_config(flags);
    } catch (const Error& e) {
        return fail(e);
    }
    if (!rc.input) return fail("config.input missing");

    try {
        IngestResult ingest = ingest_csv(*rc.input);
        std::vector<GridCell> cells;
        std::vector<CellStatus> prepare_errors;
        for (auto& cell : ingest.cells) {
            try {
                cells.push_back({cell.key, prepare_panel(cell.panel, rc.variables)});
            } catch (const Error& e) {
                prepare_errors.push_back({cell.key, CellState::Error,
                                          std::string(to_string(e.code())) + ": " + e.what()});
            }
        }

        GridRun grid = run_grid(cells, rc.target, rc.algorithm, rc.workers);
        RunManifest& manifest = grid.manifest;
        manifest.input = rc.input->string();
        if (!rc.variables.empty()) manifest.variables = rc.variables;
        manifest.cells.insert(manifest.cells.end(), ingest.skipped.begin(), ingest.skipped.end());
        manifest.cells.insert(manifest.cells.end(), prepare_errors.begin(), prepare_errors.end());
        std::stable_sort(manifest.cells.begin(), manifest.cells.end(),
                         [](const CellStatus& a, const CellStatus& b) { return a.key < b.key; });

        fs::create_directories(rc.output_dir);
        write_pairs_csv(grid.outcomes, rc.output_dir / "pairs.csv");
        write_plotdata(grid.outcomes, rc.output_dir / "triggers_2d.jsonl",
                       rc.output_dir / "triggers_3d.jsonl");
        write_manifest(manifest, rc.output_dir / "manifest.json");

        std::size_t ok = 0, skipped = 0, errors = 0;
        for (const auto& c : manifest.cells) {
            if (c.state == CellState::Ok) ++ok;
            if (c.state == CellState::Skipped) ++skipped;
            if (c.state == CellState::Error) {
                ++errors;
                std::cerr << "cell-error: " << c.key.longitude << ',' << c.key.latitude << ','
                          << c.key.pressure_level << ": " << c.reason << '\n';
            }
        }
        std::cout << "cells_ok=" << ok << "\ncells_skipped=" << skipped << "\ncells_error=" << errors
                  << "\npairs=" << collect_pairs(grid.outcomes).size() << '\n';
        return errors > 0 ? kExitCellErrors : kExitOk;
    } catch (const Error& e) {
        return fail(e);
    } catch (const fs::filesystem_error& e) {
        return fail(std::string("io-error: ") + e.what());
    }
}

struct SynthFlags {
    std::string scenario;
    int repetitions = 100;
    std::optional<int> null_repetitions;
    std::uint64_t seed = 0;
};

int cmd_synth_validate(const SynthFlags& flags) {
    if (flags.repetitions < 1) return fail("invalid-argument: repetitions must be at least 1");
    ScenarioSpec spec;
    AlgorithmConfig config;
    try {
        KeyValues kv;
        if (!flags.scenario.empty()) kv = read_key_values(flags.scenario);
        spec = scenario_from(kv, &config);
        spec.validate();
        config.validate();
    } catch (const Error& e) {
        return fail(e);
    }
    const int nulls = flags.null_repetitions.value_or(flags.repetitions);
    if (nulls < 0) return fail("invalid-argument: null repetitions must be nonnegative");

    struct Tally {
        int runs = 0, with_planted = 0, with_any = 0, tests = 0, rejections = 0, errors = 0;
    };
    auto simulate = [&](double gamma, int reps, std::uint64_t offset) {
        Tally t;
        for (int i = 0; i < reps; ++i) {
            ScenarioSpec s = spec;
            s.gamma_interaction = gamma;
            s.seed = flags.seed + offset + static_cast<std::uint64_t>(i);
            AlgorithmConfig c = config;
            c.seed = s.seed;
            ++t.runs;
            try {
                const auto [panel, truth] = gen_trigger_scenario(s);
                const AlgorithmOutput out = run(panel, "y", c);
                bool planted = false;
                for (const auto& p : out.pairs) {
                    planted = planted || (p.cause == truth.cause && p.trigger == truth.trigger);
                }
                t.with_planted += planted;
                t.with_any += !out.pairs.empty();
                for (const auto& m : out.moderation_tests) {
                    ++t.tests;
                    t.rejections += m.is_moderator;
                }
            } catch (const Error&) {
                ++t.errors;
            }
        }
        return t;
    };
    auto rate = [](int num, int den) { return den > 0 ? static_cast<double>(num) / den : 0.0; };

    const Tally planted = simulate(spec.gamma_interaction, flags.repetitions, 0);
    const Tally null = simulate(0.0, nulls, 1'000'000);
    std::cout << "repetitions=" << planted.runs << '\n'
              << "recovery_rate=" << format_double(rate(planted.with_planted, planted.runs)) << '\n'
              << "f_rejection_rate=" << format_double(rate(planted.rejections, planted.tests)) << '\n'
              << "null_repetitions=" << null.runs << '\n'
              << "false_pair_rate=" << format_double(rate(null.with_planted, null.runs)) << '\n'
              << "null_any_pair_rate=" << format_double(rate(null.with_any, null.runs)) << '\n'
              << "null_f_rejection_rate=" << format_double(rate(null.rejections, null.tests)) << '\n'
              << "errors=" << planted.errors + null.errors << '\n';
    return kExitOk;
}

struct SplitFlags {
    std::string csv;
    std::string column;
    long long min_size = 30;
    long long min_i1 = 2;
    double threshold = 0.0;
    bool absolute = false;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
        while (!field.empty() && field.front() == ' ') field.erase(0, 1);
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

int cmd_split(const SplitFlags& flags) {
    std::ifstream in(flags.csv);
    if (!in) return fail("io-error: cannot read " + flags.csv);
    std::string line;
    if (!std::getline(in, line)) return fail("schema-error: " + flags.csv + " is empty");
    const auto header = split_csv_line(line);
    const auto it = std::find(header.begin(), header.end(), flags.column);
    if (it == header.end()) return fail("unknown-variable: no column '" + flags.column + "'");
    const auto col = static_cast<std::size_t>(it - header.begin());

    std::vector<double> series;
    try {
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            const auto fields = split_csv_line(line);
            if (col >= fields.size()) throw Error(ErrorCode::SchemaError, "short row");
            series.push_back(parse_double_field(fields[col]));
        }
        SplitOptions options;
        options.min_size_I2 = flags.min_size;
        options.min_size_I1 = flags.min_i1;
        options.threshold_y = flags.threshold;
        options.absolute_means = flags.absolute;
        const SplitResult s = find_split(series, options);
        std::cout << "t1=" << s.t1 << '\n'
                  << "mean_i1=" << format_double(s.mean_I1) << '\n'
                  << "mean_i2=" << format_double(s.mean_I2) << '\n'
                  << "delta=" << format_double(s.delta) << '\n'
                  << "accepted=" << (s.accepted ? "true" : "false") << '\n';
    } catch (const Error& e) {
        return fail(e);
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cause/trigger analysis of multivariate time series"};
    app.require_subcommand(1);

    AnalyzeFlags analyze;
    auto* a = app.add_subcommand("analyze", "Run the analysis over a gridded CSV");
    a->add_option("--config", analyze.config, "key = value configuration file");
    a->add_option("--seed", analyze.seed, "Base random seed");
    a->add_option("--workers", analyze.workers, "Worker threads (overrides CTRIG_WORKERS)");
    a->add_option("--output-dir", analyze.output_dir, "Directory for the output files");
    a->add_option("--alpha", analyze.alpha, "F-test significance level");
    a->add_option("--lag", analyze.lag, "Lag d, or 'auto' for AIC selection");
    a->add_option("--min-i2", analyze.min_i2, "Minimum length of I2");
    a->add_option("--aggregation", analyze.aggregation, "unit | coefficient")
        ->check(CLI::IsMember({"unit", "coefficient"}));
    a->add_option("--backend", analyze.backend, "exhaustive | genetic")
        ->check(CLI::IsMember({"exhaustive", "genetic"}));

    SynthFlags synth;
    auto* s = app.add_subcommand("synth-validate", "Recovery and false-pair rates on synthetic data");
    s->add_option("--scenario", synth.scenario, "Scenario file (key = value)");
    s->add_option("--repetitions", synth.repetitions, "Planted repetitions");
    s->add_option("--null-repetitions", synth.null_repetitions,
                  "Repetitions with the interaction switched off (default: --repetitions)");
    s->add_option("--seed", synth.seed, "First seed");

    SplitFlags split;
    auto* sp = app.add_subcommand("split", "Best mean-shift split of one CSV column");
    sp->add_option("--csv", split.csv, "Input CSV with a header row")->required();
    sp->add_option("--column", split.column, "Column to split")->required();
    sp->add_option("--min-size", split.min_size, "Minimum length of I2");
    sp->add_option("--min-i1", split.min_i1, "Minimum length of I1");
    sp->add_option("--threshold", split.threshold, "Minimum mean increase to accept");
    sp->add_flag("--absolute", split.absolute, "Compare absolute means");

    auto* v = app.add_subcommand("version", "Print the version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitFatal;
    }

    if (a->parsed()) return cmd_analyze(analyze);
    if (s->parsed()) return cmd_synth_validate(synth);
    if (sp->parsed()) return cmd_split(split);
    if (v->parsed()) {
        std::cout << "causetrigger " << kVersion << '\n';
        return kExitOk;
    }
    return kExitFatal;
}
