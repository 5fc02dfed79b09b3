#pragma once

#include "alphatest/pipeline.hpp"
#include "alphatest/types.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace alphatest::empirical {

inline constexpr int kFormatVersion = 1;

enum class Units { kDecimal, kPercent };

/// Two local CSV files: wide returns (date + one column per asset) and
/// factors (date, MKT, SMB, HML, RF). Rows are matched by ISO week.
struct PanelSource {
    std::filesystem::path returns_path;
    std::filesystem::path factors_path;
    std::string date_format = "%Y-%m-%d";
    Units return_units = Units::kDecimal;
    Units factor_units = Units::kDecimal;
    bool returns_are_excess = false;  // otherwise RF is subtracted
};

struct BalancedPanel {
    ReturnPanel panel;           // excess returns, T x N, input column order
    FactorSeries factors;        // MKT, SMB, HML
    std::vector<int> iso_weeks;  // yyyyww per row
    std::vector<std::string> dropped_assets;
};

/// ISO-8601 week key (year * 100 + week) of a civil date.
[[nodiscard]] int iso_week_key(int year, unsigned month, unsigned day);

/// Joins on ISO week, builds excess returns and keeps only assets with no
/// missing value in the overlap. Throws DataError with the file and line for
/// unparseable rows and when the files share no week.
[[nodiscard]] BalancedPanel ingest_and_balance(const PanelSource& src);

/// Parses CSV text already in memory; `returns_name` and `factors_name`
/// label error messages.
[[nodiscard]] BalancedPanel balance_from_text(const std::string& returns_csv, const std::string& factors_csv,
                                              const PanelSource& src, const std::string& returns_name = "returns",
                                              const std::string& factors_name = "factors");

/// Box-Pierce p-value: Q = T sum_{k<=m} rho_k^2 against chi-square(m).
/// Throws DomainError unless 1 <= m < T, DegenerateError for a constant series.
[[nodiscard]] double box_pierce(std::span<const double> series, int lag = 10);

struct EmpiricalOptions {
    pipeline::SuiteOptions suite;
    int box_pierce_lag = 10;
    double level = 0.05;
};

struct EmpiricalReport {
    BalancedPanel data;
    pipeline::SuiteReport suite;
    std::vector<double> box_pierce_p;  // per asset; NaN for constant residuals
    double white_noise_rejection_share = 0.0;
    int box_pierce_lag = 10;
};

[[nodiscard]] EmpiricalReport run_empirical(const PanelSource& src, const EmpiricalOptions& options);
[[nodiscard]] EmpiricalReport run_empirical(BalancedPanel data, const EmpiricalOptions& options);

[[nodiscard]] nlohmann::ordered_json to_json(const EmpiricalReport& report);
void write_box_pierce_csv(const EmpiricalReport& report, const std::filesystem::path& path);

/// Writes the balanced panel back out as two CSVs (returns already excess,
/// decimal units) keyed by the Monday of each ISO week.
void write_balanced_panel(const BalancedPanel& data, const std::filesystem::path& returns_path,
                          const std::filesystem::path& factors_path);

}  // namespace alphatest::empirical
