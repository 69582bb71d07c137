#include "ctrig/config.hpp"

#include "ctrig/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace ctrig {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view what) {
    throw Error(ErrorCode::ConfigError, "config." + std::string(key) + " invalid: '" +
                                            std::string(value) + "' is not " + std::string(what));
}

const std::set<std::string, std::less<>> kAlgorithmKeys = {
    "lag",         "max_lag",         "min_size_I2",       "min_size_I1",
    "threshold_y", "threshold_x",     "alpha",             "aggregation",
    "backend",     "trigger_alignment", "absolute_means",  "emit_all_causes",
    "seed",        "ga_population",   "ga_generations",    "ga_mutation_rate",
    "ga_tournament"};

const std::set<std::string, std::less<>> kRunKeys = {"input", "output_dir", "target", "variables",
                                                     "workers"};

const std::set<std::string, std::less<>> kScenarioKeys = {
    "length",      "p",           "d_true",        "cause_index",       "trigger_index",
    "t1_true",     "gamma_interaction", "noise_sigma", "seed",          "cause_coefficient",
    "cause_mean",  "cause_ar",    "cause_sd",      "trigger_noise",     "trigger_width",
    "innovation"};

void reject_unknown(const KeyValues& kv, const std::set<std::string, std::less<>>& a,
                    const std::set<std::string, std::less<>>& b) {
    for (const auto& [key, value] : kv) {
        if (!a.contains(key) && !b.contains(key)) {
            throw Error(ErrorCode::ConfigError, "config." + key + " is not a recognized key");
        }
    }
}

template <typename Fn>
void with_key(const KeyValues& kv, std::string_view key, Fn&& fn) {
    if (const auto it = kv.find(std::string(key)); it != kv.end()) {
        fn(it->second);
    }
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::stringstream ss{std::string(text)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace

double parse_double(std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, value, "a number");
    return out;
}

long long parse_integer(std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    long long out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) bad_value(key, value, "an integer");
    return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
    std::string v = trim(value);
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, value, "a boolean");
}

std::optional<int> parse_lag(std::string_view value) {
    if (trim(value) == "auto") return std::nullopt;
    return static_cast<int>(parse_integer("lag", value));
}

KeyValues parse_key_values(std::string_view text) {
    KeyValues kv;
    std::stringstream ss{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ConfigError,
                        "config line " + std::to_string(lineno) + " is not 'key = value'");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        if (key.empty()) {
            throw Error(ErrorCode::ConfigError, "config line " + std::to_string(lineno) + " has no key");
        }
        kv[key] = trim(std::string_view(body).substr(eq + 1));
    }
    return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_key_values(buffer.str());
}

void apply_algorithm_keys(const KeyValues& kv, AlgorithmConfig& c) {
    auto wrap = [](std::string_view key, auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ConfigError) throw;
            throw Error(ErrorCode::ConfigError, "config." + std::string(key) + " invalid: " + e.what());
        }
    };
    with_key(kv, "lag", [&](const auto& v) { c.lag = parse_lag(v); });
    with_key(kv, "max_lag", [&](const auto& v) { c.max_lag = static_cast<int>(parse_integer("max_lag", v)); });
    with_key(kv, "min_size_I2", [&](const auto& v) { c.min_size_I2 = parse_integer("min_size_I2", v); });
    with_key(kv, "min_size_I1", [&](const auto& v) { c.min_size_I1 = parse_integer("min_size_I1", v); });
    with_key(kv, "threshold_y", [&](const auto& v) { c.threshold_y = parse_double("threshold_y", v); });
    with_key(kv, "threshold_x", [&](const auto& v) { c.threshold_x = parse_double("threshold_x", v); });
    with_key(kv, "alpha", [&](const auto& v) { c.alpha = parse_double("alpha", v); });
    with_key(kv, "aggregation", [&](const auto& v) {
        wrap("aggregation", [&] { c.aggregation = aggregation_from_string(v); });
    });
    with_key(kv, "backend", [&](const auto& v) {
        wrap("backend", [&] { c.backend = backend_from_string(v); });
    });
    with_key(kv, "trigger_alignment", [&](const auto& v) {
        wrap("trigger_alignment", [&] { c.trigger_alignment = alignment_from_string(v); });
    });
    with_key(kv, "absolute_means", [&](const auto& v) { c.absolute_means = parse_bool("absolute_means", v); });
    with_key(kv, "emit_all_causes", [&](const auto& v) { c.emit_all_causes = parse_bool("emit_all_causes", v); });
    with_key(kv, "seed", [&](const auto& v) { c.seed = static_cast<std::uint64_t>(parse_integer("seed", v)); });
    with_key(kv, "ga_population", [&](const auto& v) { c.genetic.population = static_cast<int>(parse_integer("ga_population", v)); });
    with_key(kv, "ga_generations", [&](const auto& v) { c.genetic.generations = static_cast<int>(parse_integer("ga_generations", v)); });
    with_key(kv, "ga_mutation_rate", [&](const auto& v) { c.genetic.mutation_rate = parse_double("ga_mutation_rate", v); });
    with_key(kv, "ga_tournament", [&](const auto& v) { c.genetic.tournament = static_cast<int>(parse_integer("ga_tournament", v)); });
}

RunConfig run_config_from(const KeyValues& kv) {
    reject_unknown(kv, kRunKeys, kAlgorithmKeys);
    RunConfig rc;
    with_key(kv, "input", [&](const auto& v) { if (!v.empty()) rc.input = v; });
    with_key(kv, "output_dir", [&](const auto& v) { rc.output_dir = v; });
    with_key(kv, "target", [&](const auto& v) { rc.target = v; });
    with_key(kv, "variables", [&](const auto& v) { rc.variables = split_list(v); });
    with_key(kv, "workers", [&](const auto& v) { rc.workers = static_cast<int>(parse_integer("workers", v)); });
    apply_algorithm_keys(kv, rc.algorithm);
    return rc;
}

ScenarioSpec scenario_from(const KeyValues& kv, AlgorithmConfig* algorithm) {
    reject_unknown(kv, kScenarioKeys, kAlgorithmKeys);
    ScenarioSpec s;
    with_key(kv, "length", [&](const auto& v) { s.length = parse_integer("length", v); });
    with_key(kv, "p", [&](const auto& v) { s.p = static_cast<int>(parse_integer("p", v)); });
    with_key(kv, "d_true", [&](const auto& v) { s.d_true = static_cast<int>(parse_integer("d_true", v)); });
    with_key(kv, "cause_index", [&](const auto& v) { s.cause_index = static_cast<int>(parse_integer("cause_index", v)); });
    with_key(kv, "trigger_index", [&](const auto& v) { s.trigger_index = static_cast<int>(parse_integer("trigger_index", v)); });
    with_key(kv, "t1_true", [&](const auto& v) { s.t1_true = parse_integer("t1_true", v); });
    with_key(kv, "gamma_interaction", [&](const auto& v) { s.gamma_interaction = parse_double("gamma_interaction", v); });
    with_key(kv, "noise_sigma", [&](const auto& v) { s.noise_sigma = parse_double("noise_sigma", v); });
    with_key(kv, "seed", [&](const auto& v) { s.seed = static_cast<std::uint64_t>(parse_integer("seed", v)); });
    with_key(kv, "cause_coefficient", [&](const auto& v) { s.cause_coefficient = parse_double("cause_coefficient", v); });
    with_key(kv, "cause_mean", [&](const auto& v) { s.cause_mean = parse_double("cause_mean", v); });
    with_key(kv, "cause_ar", [&](const auto& v) { s.cause_ar = parse_double("cause_ar", v); });
    with_key(kv, "cause_sd", [&](const auto& v) { s.cause_sd = parse_double("cause_sd", v); });
    with_key(kv, "trigger_noise", [&](const auto& v) { s.trigger_noise = parse_double("trigger_noise", v); });
    with_key(kv, "trigger_width", [&](const auto& v) { s.trigger_width = parse_double("trigger_width", v); });
    with_key(kv, "innovation", [&](const auto& v) {
        try {
            s.innovation = innovation_from_string(v);
        } catch (const Error& e) {
            throw Error(ErrorCode::ConfigError, std::string("config.innovation invalid: ") + e.what());
        }
    });
    if (algorithm != nullptr) {
        apply_algorithm_keys(kv, *algorithm);
    }
    return s;
}

} // namespace ctrig
