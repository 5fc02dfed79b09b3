#pragma once

#include "alphatest/dgp.hpp"
#include "alphatest/plan_io.hpp"
#include "alphatest/types.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace alphatest::montecarlo {

inline constexpr std::size_t kTestCount = 6;

/// Replication-level results of one cell.
struct CellResult {
    dgp::ExperimentPlan plan;
    double gamma = 0.05;
    int replications = 0;
    std::array<int, kTestCount> rejections{};
    std::array<double, kTestCount> frequency{};
    std::array<double, kTestCount> mc_se{};  // sqrt(p (1 - p) / reps)
    /// p-values per replication in kAllTests order; empty after a manifest reload.
    std::vector<std::array<double, kTestCount>> p_values;
    std::vector<int> block_lengths;  // per replication; empty after a manifest reload
    double median_block_length = 0.0;
    int bandwidth = 0;
};

struct CellOptions {
    double gamma = 0.05;
    int threads = 1;
    /// Called after each finished replication with (done, total).
    std::function<void(int, int)> progress;
};

/// Runs every replication of `plan`. Replication r uses draws derived from
/// (plan.seed, r) only, so results do not depend on the thread count.
/// Throws std::runtime_error naming the failing replication and seed.
[[nodiscard]] CellResult run_cell(const dgp::ExperimentPlan& plan, const CellOptions& options = {});

struct SizePowerTable {
    double gamma = 0.05;
    std::vector<CellResult> rows;
};

struct GridOptions {
    std::filesystem::path out_dir;
    int threads = 1;
    bool resume = true;
    /// Called when a cell starts: (cell name, index, cell count, reused from manifest).
    std::function<void(const std::string&, std::size_t, std::size_t, bool)> on_cell;
    std::function<void(int, int)> progress;
};

struct GridFailure {
    std::string cell;
    std::string message;
};

struct GridResult {
    SizePowerTable table;
    std::vector<GridFailure> failures;
};

/// Runs all cells, writes results.csv, size_table.csv, power_<example>.csv,
/// one pvalues_<cell>.csv per computed cell and manifest.json to out_dir.
/// Cells recorded in an existing manifest with an identical plan are reused.
/// A failing cell is reported and skipped; the remaining cells still run.
[[nodiscard]] GridResult run_grid(const plan_io::GridConfig& grid, const GridOptions& options);

void write_results_csv(const SizePowerTable& table, const std::filesystem::path& path);
void write_size_table_csv(const SizePowerTable& table, const std::filesystem::path& path);
void write_power_csv(const SizePowerTable& table, dgp::Example example, const std::filesystem::path& path);
void write_pvalues_csv(const CellResult& cell, const std::filesystem::path& path);

}  // namespace alphatest::montecarlo
