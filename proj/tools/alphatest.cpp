#include "alphatest/block_length.hpp"
#include "alphatest/empirical.hpp"
#include "alphatest/errors.hpp"
#include "alphatest/montecarlo.hpp"
#include "alphatest/parallel.hpp"
#include "alphatest/pipeline.hpp"
#include "alphatest/plan_io.hpp"
#include "alphatest/projection.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using namespace alphatest;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kFormatVersion = 1;

enum class LogLevel { kOff, kInfo, kDebug };

struct Log {
    LogLevel level = LogLevel::kInfo;

    void info(const std::string& msg) const {
        if (level != LogLevel::kOff) std::cerr << msg << '\n';
    }
    void debug(const std::string& msg) const {
        if (level == LogLevel::kDebug) std::cerr << msg << '\n';
    }
};

struct PanelArgs {
    std::string returns;
    std::string factors;
    std::string date_format = "%Y-%m-%d";
    std::string return_units = "decimal";
    std::string factor_units = "decimal";
    bool excess = false;

    void add(CLI::App* app) {
        app->add_option("--returns", returns, "Wide CSV of asset returns (date + one column per asset)")
            ->required()
            ->check(CLI::ExistingFile);
        app->add_option("--factors", factors, "CSV with columns date, MKT, SMB, HML, RF")
            ->required()
            ->check(CLI::ExistingFile);
        app->add_option("--date-format", date_format, "strftime-style date format")->capture_default_str();
        app->add_option("--return-units", return_units, "decimal or percent")
            ->check(CLI::IsMember({"decimal", "percent"}))
            ->capture_default_str();
        app->add_option("--factor-units", factor_units, "decimal or percent")
            ->check(CLI::IsMember({"decimal", "percent"}))
            ->capture_default_str();
        app->add_flag("--excess", excess, "Returns are already in excess of RF");
    }

    [[nodiscard]] empirical::PanelSource source() const {
        empirical::PanelSource src;
        src.returns_path = returns;
        src.factors_path = factors;
        src.date_format = date_format;
        src.return_units = return_units == "percent" ? empirical::Units::kPercent : empirical::Units::kDecimal;
        src.factor_units = factor_units == "percent" ? empirical::Units::kPercent : empirical::Units::kDecimal;
        src.returns_are_excess = excess;
        return src;
    }
};

struct SuiteArgs {
    std::optional<int> block_length;
    std::optional<int> bandwidth;
    int bootstrap = 500;
    int spline_order = 4;
    int basis_dim = 5;
    std::vector<std::string> tests;
    std::uint64_t seed = 1;
    int threads = default_threads();

    void add(CLI::App* app, bool with_tests) {
        app->add_option("--block-length", block_length, "Bootstrap block length (default: data-driven rule)")
            ->check(CLI::PositiveNumber);
        app->add_option("--bandwidth", bandwidth, "Bartlett bandwidth M (default: 1.2 T^(1/3) rule)")
            ->check(CLI::PositiveNumber);
        app->add_option("--bootstrap-reps", bootstrap, "Bootstrap replications B")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--spline-order", spline_order, "B-spline order (4 = cubic)")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        app->add_option("--basis-dim", basis_dim, "Spline basis dimension L")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
        if (with_tests) {
            app->add_option("--tests", tests, "Subset of SUM,MAX,CC,DSUM,DMAX,DCC")->delimiter(',');
        }
        app->add_option("--seed", seed, "Seed for all bootstrap draws")->capture_default_str();
        app->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    }

    [[nodiscard]] pipeline::SuiteOptions options() const {
        if (basis_dim < spline_order) throw ConfigError("--basis-dim must be >= --spline-order");
        pipeline::SuiteOptions o;
        o.spline = spline::SplineConfig::with_basis_dim(spline_order, basis_dim);
        o.block_length = block_length;
        o.bandwidth = bandwidth;
        o.bootstrap = bootstrap;
        o.seed = seed;
        o.threads = threads;
        if (!tests.empty()) {
            o.tests.clear();
            for (const auto& t : tests) {
                const TestName name = parse_test_name(t);
                if (std::find(o.tests.begin(), o.tests.end(), name) == o.tests.end()) o.tests.push_back(name);
            }
        }
        return o;
    }
};

std::string format_p(double p) {
    std::ostringstream s;
    if (p < 1e-4) s << std::scientific << std::setprecision(3) << p;
    else s << std::fixed << std::setprecision(4) << p;
    return s.str();
}

void print_table(std::ostream& out, const pipeline::SuiteReport& report) {
    out << "T = " << report.periods << ", N = " << report.assets << ", d = " << report.factors
        << ", L = " << report.basis_dim << ", block length = " << report.block_length
        << ", bandwidth = " << report.bandwidth << "\n\n";
    out << std::left << std::setw(6) << "test" << std::right << std::setw(14) << "statistic" << std::setw(12)
        << "p-value" << "  " << "calibration" << '\n';
    for (const auto& o : report.outcomes) {
        out << std::left << std::setw(6) << to_string(o.name) << std::right << std::setw(14) << std::fixed
            << std::setprecision(4) << o.statistic << std::setw(12) << format_p(o.p_value) << "  "
            << to_string(o.calibration) << '\n';
        out.unsetf(std::ios::floatfield);
    }
}

void emit(const nlohmann::ordered_json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + out_path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + out_path);
}

nlohmann::ordered_json header(const std::string& command) {
    nlohmann::ordered_json j;
    j["format_version"] = kFormatVersion;
    j["command"] = command;
    return j;
}

int cmd_simulate(const std::string& config, const std::string& out_dir, std::optional<std::uint64_t> seed,
                 int threads, bool resume, const Log& log) {
    const auto grid = plan_io::load_grid(config, seed);
    log.info("grid: " + std::to_string(grid.cells.size()) + " cells, seed " + std::to_string(grid.seed));
    montecarlo::GridOptions options;
    options.out_dir = out_dir;
    options.threads = threads;
    options.resume = resume;
    auto cell_start = std::chrono::steady_clock::now();
    options.on_cell = [&](const std::string& name, std::size_t i, std::size_t n, bool reused) {
        cell_start = std::chrono::steady_clock::now();
        log.info("[" + std::to_string(i + 1) + "/" + std::to_string(n) + "] " + name +
                 (reused ? " (from manifest)" : ""));
    };
    options.progress = [&](int done, int total) {
        if (done == total) {
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - cell_start).count();
            std::ostringstream s;
            s << "  " << total << " replications in " << std::fixed << std::setprecision(1) << secs << " s";
            log.info(s.str());
        } else {
            log.debug("  replication " + std::to_string(done) + "/" + std::to_string(total));
        }
    };
    const auto result = montecarlo::run_grid(grid, options);

    std::cout << std::left << std::setw(24) << "cell";
    for (TestName t : kAllTests) std::cout << std::right << std::setw(8) << to_string(t);
    std::cout << '\n';
    for (const auto& row : result.table.rows) {
        std::cout << std::left << std::setw(24) << row.plan.name << std::right << std::fixed << std::setprecision(3);
        for (double f : row.frequency) std::cout << std::setw(8) << f;
        std::cout << '\n';
    }
    for (const auto& f : result.failures) std::cerr << "cell failed: " << f.cell << ": " << f.message << '\n';
    return result.failures.empty() ? kExitOk : kExitRuntime;
}

int cmd_test(const PanelArgs& panel, const SuiteArgs& suite, const std::string& format, const std::string& out) {
    const auto options = suite.options();
    const auto data = empirical::ingest_and_balance(panel.source());
    const auto report = pipeline::run_suite(data.panel.returns, data.factors.values, options);
    if (format == "table") {
        print_table(std::cout, report);
        return kExitOk;
    }
    auto j = header("test");
    j["seed"] = suite.seed;
    j["bootstrap_replications"] = options.bootstrap;
    j["dropped_assets"] = data.dropped_assets;
    j.update(pipeline::to_json(report));
    emit(j, out);
    return kExitOk;
}

int cmd_blocklen(const PanelArgs& panel, const SuiteArgs& suite, const std::string& out) {
    const auto options = suite.options();
    const auto data = empirical::ingest_and_balance(panel.source());
    const auto basis = spline::build_basis(static_cast<int>(data.panel.returns.rows()), options.spline);
    projection::FitOptions fit_options;
    fit_options.with_covariance = false;
    const auto fit = projection::fit_sieve(data.panel.returns, spline::build_design(basis, data.factors.values),
                                           fit_options);
    const auto report = blocklen::select_block_length(fit.residuals, options.pwsd);
    auto j = header("blocklen");
    j["periods"] = fit.periods;
    j["assets"] = fit.assets;
    nlohmann::ordered_json names = nlohmann::ordered_json::array();
    for (const auto& a : data.panel.assets) names.push_back(a);
    j["asset_names"] = std::move(names);
    j.update(pipeline::to_json(report));
    emit(j, out);
    return kExitOk;
}

int cmd_empirical(const PanelArgs& panel, const SuiteArgs& suite, const std::string& out_dir, int lag,
                  const std::string& format, const Log& log) {
    empirical::EmpiricalOptions options;
    options.suite = suite.options();
    options.box_pierce_lag = lag;
    const auto report = empirical::run_empirical(panel.source(), options);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
    auto j = empirical::to_json(report);
    j["seed"] = suite.seed;
    emit(j, (fs::path(out_dir) / "report.json").string());
    empirical::write_box_pierce_csv(report, fs::path(out_dir) / "box_pierce.csv");
    log.info("wrote " + (fs::path(out_dir) / "report.json").string() + " and box_pierce.csv");
    if (format == "table") {
        print_table(std::cout, report.suite);
        std::cout << "\nBox-Pierce (m = " << lag << ") rejection share at 5%: " << std::fixed
                  << std::setprecision(3) << report.white_noise_rejection_share << '\n';
    } else {
        std::cout << j.dump(2) << '\n';
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"High-dimensional alpha tests for time-varying factor models"};
    app.require_subcommand(1);
    std::string log_level = "info";
    app.add_option("--log-level", log_level, "off, info or debug")
        ->check(CLI::IsMember({"off", "info", "debug"}))
        ->capture_default_str();

    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo grid from a YAML config");
    std::string config, sim_out = "results";
    std::optional<std::uint64_t> sim_seed;
    int sim_threads = default_threads();
    bool no_resume = false;
    simulate->add_option("--config,-c", config, "Grid configuration (YAML)")->required()->check(CLI::ExistingFile);
    simulate->add_option("--out,-o", sim_out, "Output directory")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "Override the grid seed");
    simulate->add_option("--threads", sim_threads, "Worker threads")->check(CLI::PositiveNumber);
    simulate->add_flag("--no-resume", no_resume, "Ignore an existing manifest");

    auto* test = app.add_subcommand("test", "Run the six alpha tests on a user panel");
    PanelArgs test_panel;
    SuiteArgs test_suite;
    std::string test_format = "json", test_out;
    test_panel.add(test);
    test_suite.add(test, true);
    test->add_option("--format", test_format, "json or table")
        ->check(CLI::IsMember({"json", "table"}))
        ->capture_default_str();
    test->add_option("--out,-o", test_out, "Write the JSON report to a file instead of stdout");

    auto* blocklen = app.add_subcommand("blocklen", "Report the data-driven bootstrap block length");
    PanelArgs bl_panel;
    SuiteArgs bl_suite;
    std::string bl_out;
    bl_panel.add(blocklen);
    bl_suite.add(blocklen, false);
    blocklen->add_option("--out,-o", bl_out, "Write the JSON report to a file instead of stdout");

    auto* emp = app.add_subcommand("empirical", "Full panel pipeline with Box-Pierce diagnostics");
    PanelArgs emp_panel;
    SuiteArgs emp_suite;
    std::string emp_out, emp_format = "table";
    int bp_lag = 10;
    emp_panel.add(emp);
    emp_suite.add(emp, true);
    emp->add_option("--out,-o", emp_out, "Output directory for report.json and box_pierce.csv")->required();
    emp->add_option("--box-pierce-lag", bp_lag, "Box-Pierce lag m")->check(CLI::PositiveNumber)->capture_default_str();
    emp->add_option("--format", emp_format, "json or table")
        ->check(CLI::IsMember({"json", "table"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    Log log;
    log.level = log_level == "off" ? LogLevel::kOff : log_level == "debug" ? LogLevel::kDebug : LogLevel::kInfo;

    try {
        if (*simulate) return cmd_simulate(config, sim_out, sim_seed, sim_threads, !no_resume, log);
        if (*test) return cmd_test(test_panel, test_suite, test_format, test_out);
        if (*blocklen) return cmd_blocklen(bl_panel, bl_suite, bl_out);
        if (*emp) return cmd_empirical(emp_panel, emp_suite, emp_out, bp_lag, emp_format, log);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
