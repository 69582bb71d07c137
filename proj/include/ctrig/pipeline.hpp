#pragma once

#include "ctrig/cause_trigger.hpp"
#include "ctrig/core.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ctrig {

inline constexpr int kAnalysisLevels[] = {500, 700, 975};

bool is_analysis_level(int pressure_level);
/// Approximate geometric height of an analysis level; throws InvalidArgument.
double level_height_km(int pressure_level);

struct GridCellKey {
    double longitude = 0.0;
    double latitude = 0.0;
    int pressure_level = 500;

    CellMeta meta() const { return {longitude, latitude, pressure_level}; }
    static GridCellKey from(const CellMeta& meta) {
        return {meta.longitude, meta.latitude, meta.pressure_level};
    }
    friend bool operator==(const GridCellKey&, const GridCellKey&) = default;
};

/// Orders by (pressure_level, latitude, longitude).
bool operator<(const GridCellKey& a, const GridCellKey& b);

enum class CellState { Ok, Skipped, Error };
std::string_view to_string(CellState state);

struct CellStatus {
    GridCellKey key;
    CellState state = CellState::Ok;
    std::string reason;
};

struct GridCell {
    GridCellKey key;
    TimeSeriesPanel panel;
};

struct CsvSchema {
    /// Variable columns to keep; empty keeps every non-key column.
    std::vector<std::string> variables;
};

struct IngestResult {
    std::vector<GridCell> cells; // sorted by key
    std::vector<CellStatus> skipped;
};

/// Groups rows by cell, sorts them by time and checks uniform spacing.
/// Throws SchemaError, NonUniformSampling or IoError.
IngestResult ingest_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
IngestResult ingest_csv(std::istream& in, const CsvSchema& schema = {});

/// Seconds since the Unix epoch for "YYYY-MM-DD[T ]HH:MM[:SS][Z]" or "YYYY-MM-DD".
/// Throws SchemaError.
std::int64_t parse_iso8601(std::string_view text);

/// Adds ws, wd (meteorological, degrees) and sin_wd from u and v.
/// Calm air gets wd = 0. Throws MissingComponent.
TimeSeriesPanel derive_wind_vars(const TimeSeriesPanel& panel);

/// Derives the wind variables when u and v are present (or sin_wd from a
/// precomputed wd), then keeps `variables`, or everything except u and v.
TimeSeriesPanel prepare_panel(const TimeSeriesPanel& panel,
                              const std::vector<std::string>& variables);

struct RunManifest {
    std::string input;
    std::string target;
    std::vector<std::string> variables;
    AlgorithmConfig config;
    std::vector<CellStatus> cells; // sorted by key
    std::string version;
    std::uint64_t seed = 0;
};

struct CellOutcome {
    GridCellKey key;
    std::optional<AlgorithmOutput> output;
    CellStatus status;
};

struct GridRun {
    std::vector<CellOutcome> outcomes; // sorted by key
    RunManifest manifest;
};

/// Per-cell seed; depends only on the base seed and the cell key.
std::uint64_t cell_seed(std::uint64_t base, const GridCellKey& key);

/// Runs the analysis on every cell with `workers` threads. Cell failures are
/// recorded as errors and never abort the grid.
GridRun run_grid(const std::vector<GridCell>& cells, std::string_view target,
                 const AlgorithmConfig& config, int workers = 1);

struct PairRecord {
    GridCellKey key;
    std::string cause;
    std::string trigger;
    double f_statistic = 0.0;
    double p_value = 1.0;

    friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// One record per pair in (pressure_level, latitude, longitude) order.
std::vector<PairRecord> collect_pairs(const std::vector<CellOutcome>& outcomes);

inline constexpr std::string_view kPairsHeader =
    "longitude,latitude,pressure_level,cause,trigger,f_statistic,p_value";

void write_pairs_csv(const std::vector<CellOutcome>& outcomes, const std::filesystem::path& path);
void write_pairs_csv(const std::vector<PairRecord>& pairs, std::ostream& out);
/// Throws IoError or SchemaError.
std::vector<PairRecord> read_pairs_csv(const std::filesystem::path& path);
std::vector<PairRecord> read_pairs_csv(std::istream& in);

/// Stable variable -> color id table; names outside the climate set follow in
/// sorted order.
std::vector<std::pair<std::string, int>> color_table(const std::vector<std::string>& extra = {});

inline constexpr std::string_view kPlot2dSchema = "ctrig.triggers_2d/1";
inline constexpr std::string_view kPlot3dSchema = "ctrig.triggers_3d/1";

struct PlotRecord2d {
    GridCellKey key;
    std::vector<std::string> triggers;

    friend bool operator==(const PlotRecord2d&, const PlotRecord2d&) = default;
};

struct PlotRecord3d {
    GridCellKey key;
    double height_km = 0.0;
    std::string trigger;

    friend bool operator==(const PlotRecord3d&, const PlotRecord3d&) = default;
};

struct PlotData {
    std::vector<std::pair<std::string, int>> colors;
    std::vector<PlotRecord2d> records_2d;
    std::vector<PlotRecord3d> records_3d;
};

/// Cells without triggers are left out.
PlotData build_plotdata(const std::vector<CellOutcome>& outcomes);

/// JSON Lines: a schema header record followed by one record per line.
void write_plotdata(const std::vector<CellOutcome>& outcomes, const std::filesystem::path& path_2d,
                    const std::filesystem::path& path_3d);
void write_plotdata(const PlotData& data, std::ostream& out_2d, std::ostream& out_3d);

/// Throw SchemaError when the header or a record does not match.
std::vector<PlotRecord2d> read_plotdata_2d(std::istream& in,
                                           std::vector<std::pair<std::string, int>>* colors = nullptr);
std::vector<PlotRecord3d> read_plotdata_3d(std::istream& in,
                                           std::vector<std::pair<std::string, int>>* colors = nullptr);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);
std::string manifest_json(const RunManifest& manifest);

/// Canonical JSON of one result, used for determinism checks.
std::string dump_output(const AlgorithmOutput& output);

/// Shortest decimal that parses back to the same double ("inf", "-inf", "nan"
/// for non-finite values).
std::string format_double(double value);
/// Throws SchemaError.
double parse_double_field(std::string_view text);

} // namespace ctrig
