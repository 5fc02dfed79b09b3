#include "alphatest/montecarlo.hpp"

#include "alphatest/errors.hpp"
#include "alphatest/parallel.hpp"
#include "alphatest/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>

namespace alphatest::montecarlo {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBootstrapStream = 4;
constexpr int kManifestVersion = 1;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(10);
    return out;
}

void close_out(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw IoError("write failed: " + path.string());
}

double lower_median(std::vector<int> v) {
    if (v.empty()) return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

std::string policy(const std::optional<int>& v) { return v ? std::to_string(*v) : "auto"; }

std::string hypothesis(const dgp::ExperimentPlan& p) {
    return p.alternative ? std::to_string(p.alternative->sparsity) : "null";
}

void write_cell_header(std::ostream& out) {
    out << "name,example,T,N,dependence,innovation,hypothesis,c_M,replications,bootstrap,seed,"
           "block_length_policy,bandwidth_policy,basis_dim,gamma";
    for (TestName t : kAllTests) out << ',' << to_string(t) << "," << to_string(t) << "_se";
    out << ",median_block_length,bandwidth\n";
}

void write_cell_row(std::ostream& out, const CellResult& c) {
    const auto& p = c.plan;
    out << p.name << ',' << plan_io::to_string(p.example) << ',' << p.periods << ',' << p.assets << ','
        << plan_io::to_string(p.dependence) << ',' << plan_io::to_string(p.innovation) << ','
        << hypothesis(p) << ',';
    if (p.alternative) out << p.alternative->c_m;
    out << ',' << c.replications << ',' << p.bootstrap << ',' << p.seed << ',' << policy(p.block_length)
        << ',' << policy(p.bandwidth) << ',' << p.spline.basis_dim() << ',' << c.gamma;
    for (std::size_t k = 0; k < kTestCount; ++k) out << ',' << c.frequency[k] << ',' << c.mc_se[k];
    out << ',' << c.median_block_length << ',' << c.bandwidth << '\n';
}

nlohmann::json cell_to_json(const CellResult& c) {
    nlohmann::json j;
    j["name"] = c.plan.name;
    j["plan"] = plan_io::to_yaml(c.plan);
    j["gamma"] = c.gamma;
    j["replications"] = c.replications;
    j["rejections"] = c.rejections;
    j["median_block_length"] = c.median_block_length;
    j["bandwidth"] = c.bandwidth;
    return j;
}

void finalize(CellResult& c) {
    for (std::size_t k = 0; k < kTestCount; ++k) {
        const double p = static_cast<double>(c.rejections[k]) / c.replications;
        c.frequency[k] = p;
        c.mc_se[k] = std::sqrt(p * (1.0 - p) / c.replications);
    }
}

std::optional<CellResult> cell_from_manifest(const nlohmann::json& manifest, const dgp::ExperimentPlan& plan,
                                             double gamma) {
    if (!manifest.contains("cells")) return std::nullopt;
    const std::string yaml = plan_io::to_yaml(plan);
    for (const auto& j : manifest["cells"]) {
        if (j.value("name", "") != plan.name || j.value("plan", "") != yaml || j.value("gamma", -1.0) != gamma) {
            continue;
        }
        CellResult c;
        c.plan = plan;
        c.gamma = gamma;
        c.replications = j.at("replications").get<int>();
        c.rejections = j.at("rejections").get<std::array<int, kTestCount>>();
        c.median_block_length = j.at("median_block_length").get<double>();
        c.bandwidth = j.at("bandwidth").get<int>();
        finalize(c);
        return c;
    }
    return std::nullopt;
}

void write_manifest(const fs::path& path, const std::vector<CellResult>& done) {
    nlohmann::json j;
    j["format_version"] = kManifestVersion;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : done) j["cells"].push_back(cell_to_json(c));
    const fs::path tmp = path.string() + ".tmp";
    {
        auto out = open_out(tmp);
        out << j.dump(2) << '\n';
        close_out(out, tmp);
    }
    fs::rename(tmp, path);
}

std::string file_safe(const std::string& name) {
    std::string s = name;
    for (char& ch : s) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
    }
    return s;
}

}  // namespace

CellResult run_cell(const dgp::ExperimentPlan& plan, const CellOptions& options) {
    plan.validate();
    if (!(options.gamma > 0.0 && options.gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");

    dgp::ErrorParams error_params;
    error_params.assets = plan.assets;
    error_params.dependence = plan.dependence;
    error_params.innovation = plan.innovation;
    const dgp::ErrorGenerator errors(error_params);

    const int reps = plan.replications;
    CellResult result;
    result.plan = plan;
    result.gamma = options.gamma;
    result.replications = reps;
    result.p_values.resize(static_cast<std::size_t>(reps));
    result.block_lengths.resize(static_cast<std::size_t>(reps));

    std::atomic<int> done{0};
    std::mutex progress_mutex;
    parallel_for(static_cast<std::size_t>(reps), options.threads, [&](std::size_t r) {
        const auto rep = static_cast<std::uint64_t>(r);
        try {
            const auto sim = dgp::simulate_panel(plan, errors, rep);
            pipeline::SuiteOptions suite;
            suite.spline = plan.spline;
            suite.block_length = plan.block_length;
            suite.bandwidth = plan.bandwidth;
            suite.bootstrap = plan.bootstrap;
            suite.seed = derive_stream(plan.seed, rep, kBootstrapStream)();
            suite.threads = 1;
            const auto report = pipeline::run_suite(sim.panel.returns, sim.factors.values, suite);
            for (std::size_t k = 0; k < kTestCount; ++k) result.p_values[r][k] = report.outcomes[k].p_value;
            result.block_lengths[r] = report.block_length;
            if (r == 0) result.bandwidth = report.bandwidth;
        } catch (const std::exception& e) {
            throw std::runtime_error("cell '" + plan.name + "' replication " + std::to_string(r) +
                                     " (seed " + std::to_string(plan.seed) + ") failed: " + e.what());
        }
        const int n = ++done;
        if (options.progress) {
            std::lock_guard lock(progress_mutex);
            options.progress(n, reps);
        }
    });

    for (const auto& p : result.p_values) {
        for (std::size_t k = 0; k < kTestCount; ++k) {
            if (p[k] < options.gamma) ++result.rejections[k];
        }
    }
    result.median_block_length = lower_median(result.block_lengths);
    finalize(result);
    return result;
}

void write_results_csv(const SizePowerTable& table, const fs::path& path) {
    auto out = open_out(path);
    write_cell_header(out);
    for (const auto& c : table.rows) write_cell_row(out, c);
    close_out(out, path);
}

void write_size_table_csv(const SizePowerTable& table, const fs::path& path) {
    auto out = open_out(path);
    write_cell_header(out);
    for (const auto& c : table.rows) {
        if (!c.plan.alternative) write_cell_row(out, c);
    }
    close_out(out, path);
}

void write_power_csv(const SizePowerTable& table, dgp::Example example, const fs::path& path) {
    auto out = open_out(path);
    out << "example,dependence,T,N,innovation,sparsity,c_M,test,rejection,mc_se,replications\n";
    for (const auto& c : table.rows) {
        const auto& p = c.plan;
        if (!p.alternative || p.example != example) continue;
        for (std::size_t k = 0; k < kTestCount; ++k) {
            out << plan_io::to_string(p.example) << ',' << plan_io::to_string(p.dependence) << ',' << p.periods
                << ',' << p.assets << ',' << plan_io::to_string(p.innovation) << ',' << p.alternative->sparsity
                << ',' << p.alternative->c_m << ',' << to_string(kAllTests[k]) << ',' << c.frequency[k] << ','
                << c.mc_se[k] << ',' << c.replications << '\n';
        }
    }
    close_out(out, path);
}

void write_pvalues_csv(const CellResult& cell, const fs::path& path) {
    auto out = open_out(path);
    out << std::setprecision(17) << "replication";
    for (TestName t : kAllTests) out << ',' << to_string(t);
    out << ",block_length\n";
    for (std::size_t r = 0; r < cell.p_values.size(); ++r) {
        out << r;
        for (double p : cell.p_values[r]) out << ',' << p;
        out << ',' << cell.block_lengths[r] << '\n';
    }
    close_out(out, path);
}

GridResult run_grid(const plan_io::GridConfig& grid, const GridOptions& options) {
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + options.out_dir.string() + ": " + ec.message());

    const fs::path manifest_path = options.out_dir / "manifest.json";
    nlohmann::json manifest;
    if (options.resume && fs::exists(manifest_path)) {
        std::ifstream in(manifest_path);
        if (!in) throw IoError("cannot read " + manifest_path.string());
        try {
            in >> manifest;
        } catch (const nlohmann::json::exception& e) {
            throw IoError("corrupt manifest " + manifest_path.string() + ": " + e.what());
        }
    }

    GridResult result;
    result.table.gamma = grid.gamma;
    std::vector<CellResult> done;
    for (std::size_t i = 0; i < grid.cells.size(); ++i) {
        const auto& plan = grid.cells[i];
        if (auto cached = cell_from_manifest(manifest, plan, grid.gamma)) {
            if (options.on_cell) options.on_cell(plan.name, i, grid.cells.size(), true);
            done.push_back(*cached);
            continue;
        }
        if (options.on_cell) options.on_cell(plan.name, i, grid.cells.size(), false);
        CellOptions cell_options;
        cell_options.gamma = grid.gamma;
        cell_options.threads = options.threads;
        cell_options.progress = options.progress;
        try {
            auto cell = run_cell(plan, cell_options);
            write_pvalues_csv(cell, options.out_dir / ("pvalues_" + file_safe(plan.name) + ".csv"));
            done.push_back(std::move(cell));
            write_manifest(manifest_path, done);
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& e) {
            result.failures.push_back({plan.name, e.what()});
        }
    }
    result.table.rows = std::move(done);

    write_results_csv(result.table, options.out_dir / "results.csv");
    write_size_table_csv(result.table, options.out_dir / "size_table.csv");
    for (auto example : {dgp::Example::kOne, dgp::Example::kThreeFactor}) {
        write_power_csv(result.table, example,
                        options.out_dir / ("power_" + plan_io::to_string(example) + ".csv"));
    }
    return result;
}

}  // namespace alphatest::montecarlo
