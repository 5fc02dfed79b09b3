#pragma once

#include "alphatest/dgp.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace alphatest::plan_io {

inline constexpr int kFormatVersion = 1;

/// A Monte Carlo grid: global settings plus one plan per cell.
struct GridConfig {
    int format_version = kFormatVersion;
    double gamma = 0.05;
    std::uint64_t seed = 1;
    std::vector<dgp::ExperimentPlan> cells;
};

/// Parses a YAML grid. Errors name the offending field and its line.
/// A cell without its own seed gets one derived from the grid seed and the
/// cell name, so reordering cells does not change their draws. A hypothesis
/// whose sparsity is a list expands into one cell per entry, named
/// "<name>_s<k>". `seed_override` replaces the grid seed before cell seeds
/// are derived.
[[nodiscard]] GridConfig parse_grid(std::string_view text,
                                    std::optional<std::uint64_t> seed_override = std::nullopt);
[[nodiscard]] GridConfig load_grid(const std::filesystem::path& path,
                                   std::optional<std::uint64_t> seed_override = std::nullopt);

/// Emits YAML that parse_grid reads back into an equal grid (all seeds explicit).
[[nodiscard]] std::string to_yaml(const GridConfig& grid);
[[nodiscard]] std::string to_yaml(const dgp::ExperimentPlan& plan);

[[nodiscard]] std::string to_string(dgp::Example example);
[[nodiscard]] std::string to_string(dgp::Dependence dependence);
[[nodiscard]] std::string to_string(dgp::Innovation innovation);
[[nodiscard]] std::string to_string(dgp::GarchShock shock);

[[nodiscard]] std::uint64_t cell_seed(std::uint64_t grid_seed, std::string_view cell_name);

}  // namespace alphatest::plan_io
