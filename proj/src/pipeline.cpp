#include "ctrig/pipeline.hpp"

#include "ctrig/error.hpp"
#include "ctrig/version.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <limits>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace ctrig {

using nlohmann::json;

namespace {

constexpr std::string_view kRequiredColumns[] = {"time", "longitude", "latitude", "pressure_level"};

// Climate variables in the order used for plot colors.
constexpr std::string_view kColorOrder[] = {"d",  "z",  "o3",     "pv", "r", "w",
                                            "t",  "ws", "wd", "sin_wd", "u", "v"};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

bool is_missing(std::string_view field) {
    if (field.empty()) return true;
    std::string lower(field);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return lower == "na" || lower == "nan" || lower == "null";
}

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len) {
    int value = 0;
    const char* first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, value);
    if (ec != std::errc() || ptr != first + len) {
        throw Error(ErrorCode::SchemaError, "bad timestamp '" + std::string(text) + "'");
    }
    return value;
}

std::string row_context(std::size_t line) { return " (line " + std::to_string(line) + ")"; }

struct RawRow {
    std::int64_t time = 0;
    std::vector<double> values;
    bool missing = false;
};

json double_json(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

json config_json(const AlgorithmConfig& c) {
    json j;
    j["lag"] = c.lag ? json(*c.lag) : json("auto");
    j["max_lag"] = c.max_lag;
    j["min_size_I2"] = c.min_size_I2;
    j["min_size_I1"] = c.min_size_I1;
    j["threshold_y"] = c.threshold_y;
    j["threshold_x"] = c.threshold_x;
    j["alpha"] = c.alpha;
    j["aggregation"] = to_string(c.aggregation);
    j["backend"] = to_string(c.backend);
    j["trigger_alignment"] = to_string(c.trigger_alignment);
    j["absolute_means"] = c.absolute_means;
    j["emit_all_causes"] = c.emit_all_causes;
    j["seed"] = c.seed;
    j["ga_population"] = c.genetic.population;
    j["ga_generations"] = c.genetic.generations;
    j["ga_mutation_rate"] = c.genetic.mutation_rate;
    j["ga_tournament"] = c.genetic.tournament;
    return j;
}

json key_json(const GridCellKey& k) {
    return {{"longitude", k.longitude}, {"latitude", k.latitude}, {"pressure_level", k.pressure_level}};
}

json parents_json(const CausalParents& p) {
    json coefs = json::object();
    for (const auto& [name, values] : p.coefficients) {
        json arr = json::array();
        for (double v : values) arr.push_back(double_json(v));
        coefs[name] = arr;
    }
    return {{"target", p.target},
            {"parents", p.parents},
            {"coefficients", coefs},
            {"d", p.d},
            {"interval", {p.interval.begin, p.interval.end}},
            {"codelength", double_json(p.codelength)}};
}

json moderation_json(const ModerationResult& m) {
    return {{"trigger", m.trigger_candidate},
            {"f_statistic", double_json(m.f.statistic)},
            {"df1", m.f.df1},
            {"df2", m.f.df2},
            {"p_value", double_json(m.f.p_value)},
            {"is_moderator", m.is_moderator},
            {"rss_reduced", double_json(m.rss_reduced)},
            {"rss_full", double_json(m.rss_full)},
            {"family", to_string(m.family)}};
}

const json& require(const json& j, const char* field) {
    if (!j.is_object() || !j.contains(field)) {
        throw Error(ErrorCode::SchemaError, std::string("plot record lacks '") + field + "'");
    }
    return j.at(field);
}

GridCellKey key_from_json(const json& j) {
    try {
        return {require(j, "longitude").get<double>(), require(j, "latitude").get<double>(),
                require(j, "pressure_level").get<int>()};
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("bad plot record: ") + e.what());
    }
}

json colors_json(const std::vector<std::pair<std::string, int>>& colors) {
    json arr = json::array();
    for (const auto& [name, id] : colors) arr.push_back({{"variable", name}, {"color", id}});
    return arr;
}

json read_header(std::istream& in, std::string_view schema,
                 std::vector<std::pair<std::string, int>>* colors) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaError, "plot data is empty");
    json header;
    try {
        header = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("bad plot header: ") + e.what());
    }
    if (!header.is_object() || header.value("schema", "") != schema) {
        throw Error(ErrorCode::SchemaError, "plot header does not declare " + std::string(schema));
    }
    if (colors != nullptr) {
        colors->clear();
        for (const auto& c : require(header, "colors")) {
            colors->emplace_back(c.at("variable").get<std::string>(), c.at("color").get<int>());
        }
    }
    return header;
}

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        try {
            fn(json::parse(line));
        } catch (const json::exception& e) {
            throw Error(ErrorCode::SchemaError, std::string("bad plot record: ") + e.what());
        }
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

} // namespace

bool is_analysis_level(int pressure_level) {
    return std::find(std::begin(kAnalysisLevels), std::end(kAnalysisLevels), pressure_level) !=
           std::end(kAnalysisLevels);
}

double level_height_km(int pressure_level) {
    switch (pressure_level) {
    case 500: return 5.5;
    case 700: return 3.0;
    case 975: return 0.6;
    default:
        throw Error(ErrorCode::InvalidArgument,
                    "no height for pressure level " + std::to_string(pressure_level));
    }
}

bool operator<(const GridCellKey& a, const GridCellKey& b) {
    return std::tie(a.pressure_level, a.latitude, a.longitude) <
           std::tie(b.pressure_level, b.latitude, b.longitude);
}

std::string_view to_string(CellState state) {
    switch (state) {
    case CellState::Ok: return "ok";
    case CellState::Skipped: return "skipped";
    case CellState::Error: return "error";
    }
    return "error";
}

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

double parse_double_field(std::string_view text) {
    text = trim(text);
    if (text == "inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw Error(ErrorCode::SchemaError, "not a number: '" + std::string(text) + "'");
    }
    return out;
}

std::int64_t parse_iso8601(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.back() == 'Z') text.remove_suffix(1);
    const auto bad = [&] { return Error(ErrorCode::SchemaError, "bad timestamp '" + std::string(text) + "'"); };
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw bad();
    const int year = parse_fixed(text, 0, 4);
    const int month = parse_fixed(text, 5, 2);
    const int day = parse_fixed(text, 8, 2);
    int hour = 0, minute = 0, second = 0;
    if (text.size() > 10) {
        if ((text[10] != 'T' && text[10] != ' ') || text.size() < 16 || text[13] != ':') throw bad();
        hour = parse_fixed(text, 11, 2);
        minute = parse_fixed(text, 14, 2);
        if (text.size() == 19 && text[16] == ':') {
            second = parse_fixed(text, 17, 2);
        } else if (text.size() != 16) {
            throw bad();
        }
    }
    const std::chrono::year_month_day ymd{std::chrono::year{year},
                                          std::chrono::month{static_cast<unsigned>(month)},
                                          std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 60) throw bad();
    const auto days = std::chrono::sys_days{ymd}.time_since_epoch();
    return std::chrono::duration_cast<std::chrono::seconds>(days).count() + hour * 3600 +
           minute * 60 + second;
}

IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    return ingest_csv(in, schema);
}

IngestResult ingest_csv(std::istream& in, const CsvSchema& schema) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaError, "CSV has no header row");
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

    const auto header = split_fields(line);
    std::map<std::string, std::size_t, std::less<>> column;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!column.emplace(std::string(header[i]), i).second) {
            throw Error(ErrorCode::SchemaError, "duplicate column '" + std::string(header[i]) + "'");
        }
    }
    for (auto required : kRequiredColumns) {
        if (!column.contains(required)) {
            throw Error(ErrorCode::SchemaError, "missing required column '" + std::string(required) + "'");
        }
    }

    std::vector<std::string> variables = schema.variables;
    if (variables.empty()) {
        for (const auto& name : header) {
            const bool key = std::find(std::begin(kRequiredColumns), std::end(kRequiredColumns), name) !=
                             std::end(kRequiredColumns);
            if (!key) variables.emplace_back(name);
        }
    }
    if (variables.empty()) throw Error(ErrorCode::SchemaError, "CSV has no variable columns");
    std::vector<std::size_t> var_cols;
    for (const auto& name : variables) {
        const auto it = column.find(name);
        if (it == column.end()) throw Error(ErrorCode::SchemaError, "missing variable column '" + name + "'");
        var_cols.push_back(it->second);
    }

    const std::size_t time_col = column.at("time");
    const std::size_t lon_col = column.at("longitude");
    const std::size_t lat_col = column.at("latitude");
    const std::size_t level_col = column.at("pressure_level");

    struct CellRows {
        std::vector<RawRow> rows;
        bool missing = false;
    };
    std::map<GridCellKey, CellRows> cells;
    std::map<GridCellKey, std::string> unsupported;

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::SchemaError, "expected " + std::to_string(header.size()) +
                                                    " fields, found " + std::to_string(fields.size()) +
                                                    row_context(lineno));
        }
        GridCellKey key;
        try {
            key.longitude = parse_double_field(fields[lon_col]);
            key.latitude = parse_double_field(fields[lat_col]);
            const double level = parse_double_field(fields[level_col]);
            if (level != std::round(level)) throw Error(ErrorCode::SchemaError, "pressure level is not whole");
            key.pressure_level = static_cast<int>(level);
        } catch (const Error& e) {
            throw Error(ErrorCode::SchemaError, e.what() + row_context(lineno));
        }
        if (!std::isfinite(key.longitude) || !std::isfinite(key.latitude)) {
            throw Error(ErrorCode::SchemaError, "non-finite coordinate" + row_context(lineno));
        }
        if (!is_analysis_level(key.pressure_level)) {
            unsupported.emplace(key, "unsupported pressure level " + std::to_string(key.pressure_level));
            continue;
        }

        RawRow row;
        try {
            row.time = parse_iso8601(fields[time_col]);
        } catch (const Error& e) {
            throw Error(ErrorCode::SchemaError, e.what() + row_context(lineno));
        }
        row.values.reserve(var_cols.size());
        for (std::size_t c : var_cols) {
            if (is_missing(fields[c])) {
                row.missing = true;
                row.values.push_back(0.0);
                continue;
            }
            double v = 0.0;
            try {
                v = parse_double_field(fields[c]);
            } catch (const Error& e) {
                throw Error(ErrorCode::SchemaError, e.what() + row_context(lineno));
            }
            if (!std::isfinite(v)) {
                row.missing = true;
                v = 0.0;
            }
            row.values.push_back(v);
        }
        auto& cell = cells[key];
        cell.missing = cell.missing || row.missing;
        cell.rows.push_back(std::move(row));
    }

    IngestResult result;
    for (auto& [key, reason] : unsupported) {
        result.skipped.push_back({key, CellState::Skipped, std::move(reason)});
    }
    for (auto& [key, cell] : cells) {
        auto& rows = cell.rows;
        std::stable_sort(rows.begin(), rows.end(),
                         [](const RawRow& a, const RawRow& b) { return a.time < b.time; });
        std::int64_t step = 0;
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const std::int64_t gap = rows[i].time - rows[i - 1].time;
            if (gap == 0) {
                throw Error(ErrorCode::NonUniformSampling,
                            "duplicated timestamp in cell (" + format_double(key.longitude) + ", " +
                                format_double(key.latitude) + ", " + std::to_string(key.pressure_level) + ")");
            }
            if (i == 1) step = gap;
            if (gap != step) {
                throw Error(ErrorCode::NonUniformSampling,
                            "irregular time step in cell (" + format_double(key.longitude) + ", " +
                                format_double(key.latitude) + ", " + std::to_string(key.pressure_level) + ")");
            }
        }
        if (cell.missing) {
            result.skipped.push_back({key, CellState::Skipped, "missing values"});
            continue;
        }
        if (rows.size() < 2) {
            result.skipped.push_back({key, CellState::Skipped, "fewer than two time steps"});
            continue;
        }
        Eigen::MatrixXd values(static_cast<Eigen::Index>(rows.size()),
                               static_cast<Eigen::Index>(variables.size()));
        std::vector<std::int64_t> times;
        times.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            times.push_back(rows[i].time);
            for (std::size_t j = 0; j < variables.size(); ++j) {
                values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].values[j];
            }
        }
        result.cells.push_back({key, TimeSeriesPanel(variables, std::move(values), std::move(times), key.meta())});
    }
    std::sort(result.skipped.begin(), result.skipped.end(),
              [](const CellStatus& a, const CellStatus& b) { return a.key < b.key; });
    return result;
}

TimeSeriesPanel derive_wind_vars(const TimeSeriesPanel& panel) {
    if (!panel.contains("u") || !panel.contains("v")) {
        throw Error(ErrorCode::MissingComponent, "wind derivation needs both u and v columns");
    }
    const Eigen::VectorXd u = panel.column("u");
    const Eigen::VectorXd v = panel.column("v");
    const Eigen::Index n = u.size();
    Eigen::VectorXd ws(n), wd(n), sin_wd(n);
    constexpr double deg = 180.0 / std::numbers::pi;
    for (Eigen::Index t = 0; t < n; ++t) {
        ws(t) = std::hypot(u(t), v(t));
        if (u(t) == 0.0 && v(t) == 0.0) {
            wd(t) = 0.0;
        } else {
            wd(t) = std::fmod(180.0 + deg * std::atan2(u(t), v(t)), 360.0);
            if (wd(t) < 0.0) wd(t) += 360.0;
        }
        sin_wd(t) = std::sin(wd(t) / deg);
    }
    return panel.with_column("ws", ws).with_column("wd", wd).with_column("sin_wd", sin_wd);
}

TimeSeriesPanel prepare_panel(const TimeSeriesPanel& panel, const std::vector<std::string>& variables) {
    const bool has_uv = panel.contains("u") && panel.contains("v");
    TimeSeriesPanel out = panel;
    if (has_uv) {
        out = derive_wind_vars(panel);
    } else if (panel.contains("wd") && !panel.contains("sin_wd")) {
        out = panel.with_column("sin_wd", panel.column("wd").unaryExpr([](double w) {
            return std::sin(w * std::numbers::pi / 180.0);
        }));
    }
    if (!variables.empty()) return out.select(variables);
    if (!has_uv) return out;
    std::vector<std::string> keep;
    for (const auto& name : out.names()) {
        if (name != "u" && name != "v") keep.push_back(name);
    }
    return out.select(keep);
}

std::uint64_t cell_seed(std::uint64_t base, const GridCellKey& key) {
    // splitmix64 over the base seed and the bit patterns of the key
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    const auto bits = [](double x) {
        std::uint64_t b = 0;
        std::memcpy(&b, &x, sizeof b);
        return b;
    };
    std::uint64_t h = mix(base);
    h = mix(h ^ bits(key.longitude));
    h = mix(h ^ bits(key.latitude));
    h = mix(h ^ static_cast<std::uint64_t>(key.pressure_level));
    return h;
}

GridRun run_grid(const std::vector<GridCell>& cells, std::string_view target,
                 const AlgorithmConfig& config, int workers) {
    config.validate();
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cells[a].key < cells[b].key; });

    std::vector<CellOutcome> outcomes(cells.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t slot = next++; slot < order.size(); slot = next++) {
            const GridCell& cell = cells[order[slot]];
            CellOutcome& outcome = outcomes[slot];
            outcome.key = cell.key;
            outcome.status.key = cell.key;
            try {
                AlgorithmConfig local = config;
                local.seed = cell_seed(config.seed, cell.key);
                outcome.output = run(cell.panel, target, local);
                outcome.status.state = CellState::Ok;
            } catch (const Error& e) {
                outcome.status.state = CellState::Error;
                outcome.status.reason = std::string(to_string(e.code())) + ": " + e.what();
            } catch (const std::exception& e) {
                outcome.status.state = CellState::Error;
                outcome.status.reason = std::string("internal: ") + e.what();
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), std::max<std::size_t>(cells.size(), 1));
    std::vector<std::thread> pool;
    for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    GridRun result;
    result.manifest.target = std::string(target);
    result.manifest.config = config;
    result.manifest.version = kVersion;
    result.manifest.seed = config.seed;
    std::set<std::string> names;
    for (const auto& cell : cells) names.insert(cell.panel.names().begin(), cell.panel.names().end());
    result.manifest.variables.assign(names.begin(), names.end());
    for (const auto& o : outcomes) result.manifest.cells.push_back(o.status);
    result.outcomes = std::move(outcomes);
    return result;
}

std::vector<PairRecord> collect_pairs(const std::vector<CellOutcome>& outcomes) {
    std::vector<const CellOutcome*> sorted;
    for (const auto& o : outcomes) sorted.push_back(&o);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const CellOutcome* a, const CellOutcome* b) { return a->key < b->key; });
    std::vector<PairRecord> pairs;
    for (const auto* o : sorted) {
        if (!o->output) continue;
        for (const auto& p : o->output->pairs) {
            pairs.push_back({o->key, p.cause, p.trigger, p.moderation.f.statistic, p.moderation.f.p_value});
        }
    }
    return pairs;
}

void write_pairs_csv(const std::vector<PairRecord>& pairs, std::ostream& out) {
    out << kPairsHeader << '\n';
    for (const auto& p : pairs) {
        out << format_double(p.key.longitude) << ',' << format_double(p.key.latitude) << ','
            << p.key.pressure_level << ',' << p.cause << ',' << p.trigger << ','
            << format_double(p.f_statistic) << ',' << format_double(p.p_value) << '\n';
    }
}

void write_pairs_csv(const std::vector<CellOutcome>& outcomes, const std::filesystem::path& path) {
    auto out = open_output(path);
    write_pairs_csv(collect_pairs(outcomes), out);
    finish_output(out, path);
}

std::vector<PairRecord> read_pairs_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
    return read_pairs_csv(in);
}

std::vector<PairRecord> read_pairs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kPairsHeader) {
        throw Error(ErrorCode::SchemaError, "pairs CSV header mismatch");
    }
    std::vector<PairRecord> pairs;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto f = split_fields(line);
        if (f.size() != 7) throw Error(ErrorCode::SchemaError, "pairs CSV row needs 7 fields" + row_context(lineno));
        PairRecord p;
        p.key.longitude = parse_double_field(f[0]);
        p.key.latitude = parse_double_field(f[1]);
        const double level = parse_double_field(f[2]);
        p.key.pressure_level = static_cast<int>(level);
        p.cause = std::string(f[3]);
        p.trigger = std::string(f[4]);
        p.f_statistic = parse_double_field(f[5]);
        p.p_value = parse_double_field(f[6]);
        pairs.push_back(std::move(p));
    }
    return pairs;
}

std::vector<std::pair<std::string, int>> color_table(const std::vector<std::string>& extra) {
    std::vector<std::pair<std::string, int>> table;
    for (auto name : kColorOrder) table.emplace_back(std::string(name), static_cast<int>(table.size()));
    std::set<std::string> rest;
    for (const auto& name : extra) {
        if (std::find(std::begin(kColorOrder), std::end(kColorOrder), name) == std::end(kColorOrder)) {
            rest.insert(name);
        }
    }
    for (const auto& name : rest) table.emplace_back(name, static_cast<int>(table.size()));
    return table;
}

PlotData build_plotdata(const std::vector<CellOutcome>& outcomes) {
    PlotData data;
    std::vector<std::string> names;
    std::map<GridCellKey, std::vector<std::string>> triggers;
    for (const auto& pair : collect_pairs(outcomes)) {
        auto& list = triggers[pair.key];
        if (std::find(list.begin(), list.end(), pair.trigger) == list.end()) list.push_back(pair.trigger);
        names.push_back(pair.trigger);
    }
    data.colors = color_table(names);
    for (auto& [key, list] : triggers) {
        for (const auto& t : list) data.records_3d.push_back({key, level_height_km(key.pressure_level), t});
        data.records_2d.push_back({key, std::move(list)});
    }
    return data;
}

void write_plotdata(const PlotData& data, std::ostream& out_2d, std::ostream& out_3d) {
    const json colors = colors_json(data.colors);
    out_2d << json{{"schema", kPlot2dSchema},
                   {"fields", {"pressure_level", "longitude", "latitude", "triggers"}},
                   {"colors", colors}}
                  .dump()
           << '\n';
    for (const auto& r : data.records_2d) {
        out_2d << json{{"pressure_level", r.key.pressure_level},
                       {"longitude", r.key.longitude},
                       {"latitude", r.key.latitude},
                       {"triggers", r.triggers}}
                      .dump()
               << '\n';
    }
    out_3d << json{{"schema", kPlot3dSchema},
                   {"fields", {"longitude", "latitude", "height_km", "pressure_level", "trigger"}},
                   {"heights_km", {{"500", 5.5}, {"700", 3.0}, {"975", 0.6}}},
                   {"colors", colors}}
                  .dump()
           << '\n';
    for (const auto& r : data.records_3d) {
        out_3d << json{{"longitude", r.key.longitude},
                       {"latitude", r.key.latitude},
                       {"height_km", r.height_km},
                       {"pressure_level", r.key.pressure_level},
                       {"trigger", r.trigger}}
                      .dump()
               << '\n';
    }
}

void write_plotdata(const std::vector<CellOutcome>& outcomes, const std::filesystem::path& path_2d,
                    const std::filesystem::path& path_3d) {
    const PlotData data = build_plotdata(outcomes);
    auto out_2d = open_output(path_2d);
    auto out_3d = open_output(path_3d);
    write_plotdata(data, out_2d, out_3d);
    finish_output(out_2d, path_2d);
    finish_output(out_3d, path_3d);
}

std::vector<PlotRecord2d> read_plotdata_2d(std::istream& in,
                                           std::vector<std::pair<std::string, int>>* colors) {
    read_header(in, kPlot2dSchema, colors);
    std::vector<PlotRecord2d> records;
    for_each_record(in, [&](const json& j) {
        records.push_back({key_from_json(j), require(j, "triggers").get<std::vector<std::string>>()});
    });
    return records;
}

std::vector<PlotRecord3d> read_plotdata_3d(std::istream& in,
                                           std::vector<std::pair<std::string, int>>* colors) {
    read_header(in, kPlot3dSchema, colors);
    std::vector<PlotRecord3d> records;
    for_each_record(in, [&](const json& j) {
        records.push_back({key_from_json(j), require(j, "height_km").get<double>(),
                           require(j, "trigger").get<std::string>()});
    });
    return records;
}

std::string manifest_json(const RunManifest& m) {
    json cells = json::array();
    for (const auto& c : m.cells) {
        json entry = key_json(c.key);
        entry["status"] = to_string(c.state);
        if (!c.reason.empty()) entry["reason"] = c.reason;
        cells.push_back(entry);
    }
    const json j = {{"input", m.input},       {"target", m.target},   {"variables", m.variables},
                    {"config", config_json(m.config)}, {"cells", cells}, {"version", m.version},
                    {"seed", m.seed}};
    return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << manifest_json(manifest);
    finish_output(out, path);
}

std::string dump_output(const AlgorithmOutput& o) {
    json pairs = json::array();
    for (const auto& p : o.pairs) {
        pairs.push_back({{"cause", p.cause},
                         {"trigger", p.trigger},
                         {"cause_mean_shift", double_json(p.cause_mean_shift)},
                         {"moderation", moderation_json(p.moderation)}});
    }
    json tests = json::array();
    for (const auto& m : o.moderation_tests) tests.push_back(moderation_json(m));
    json j = {{"target", o.target},
              {"d", o.d},
              {"causes", o.causes},
              {"triggers", o.triggers},
              {"pairs", pairs},
              {"split",
               {{"t1", o.split.t1},
                {"length", o.split.length},
                {"mean_I1", double_json(o.split.mean_I1)},
                {"mean_I2", double_json(o.split.mean_I2)},
                {"delta", double_json(o.split.delta)},
                {"accepted", o.split.accepted}}},
              {"parents_I1", parents_json(o.parents_I1)},
              {"parents_I2", parents_json(o.parents_I2)},
              {"moderation_tests", tests},
              {"stop_reason", to_string(o.stop_reason)}};
    if (o.parents_full) j["parents_full"] = parents_json(*o.parents_full);
    if (o.cell_meta) {
        j["cell"] = key_json(GridCellKey::from(*o.cell_meta));
    }
    return j.dump();
}

} // namespace ctrig
