#include "alphatest/plan_io.hpp"

#include "alphatest/errors.hpp"
#include "alphatest/rng.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>
#include <set>
#include <sstream>

namespace alphatest::plan_io {

namespace {

std::string where(const YAML::Node& node) {
    const auto mark = node.Mark();
    if (mark.line < 0) return "";
    return " (line " + std::to_string(mark.line + 1) + ")";
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& field, const std::string& what) {
    throw ConfigError("config field '" + field + "'" + where(node) + ": " + what);
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& field) {
    if (!node.IsScalar()) fail(node, field, "expected a scalar");
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        fail(node, field, "cannot parse '" + node.Scalar() + "'");
    }
}

int positive_int(const YAML::Node& node, const std::string& field) {
    const int v = scalar<int>(node, field);
    if (v < 1) fail(node, field, "must be positive");
    return v;
}

std::optional<int> auto_or_int(const YAML::Node& node, const std::string& field) {
    if (node.IsScalar() && node.Scalar() == "auto") return std::nullopt;
    return positive_int(node, field);
}

dgp::Example parse_example(const YAML::Node& node, const std::string& field) {
    const auto s = scalar<std::string>(node, field);
    if (s == "one" || s == "1") return dgp::Example::kOne;
    if (s == "three-factor" || s == "2") return dgp::Example::kThreeFactor;
    fail(node, field, "expected 'one' or 'three-factor', got '" + s + "'");
}

dgp::Dependence parse_dependence(const YAML::Node& node, const std::string& field) {
    const auto s = scalar<std::string>(node, field);
    if (s == "0") return dgp::Dependence::kNone;
    if (s == "2") return dgp::Dependence::kShort;
    if (s == "T-1") return dgp::Dependence::kLong;
    fail(node, field, "expected 0, 2 or T-1, got '" + s + "'");
}

dgp::Innovation parse_innovation(const YAML::Node& node, const std::string& field) {
    const auto s = scalar<std::string>(node, field);
    if (s == "gaussian") return dgp::Innovation::kGaussian;
    if (s == "t6") return dgp::Innovation::kStudentT6;
    fail(node, field, "expected 'gaussian' or 't6', got '" + s + "'");
}

dgp::GarchShock parse_shock(const YAML::Node& node, const std::string& field) {
    const auto s = scalar<std::string>(node, field);
    if (s == "independent") return dgp::GarchShock::kIndependent;
    if (s == "return") return dgp::GarchShock::kReturnShock;
    fail(node, field, "expected 'independent' or 'return', got '" + s + "'");
}

void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& prefix) {
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.contains(key)) fail(kv.first, prefix + key, "unknown field");
    }
}

std::vector<dgp::ExperimentPlan> parse_cell(const YAML::Node& node, std::size_t index,
                                            std::uint64_t grid_seed) {
    const std::string prefix = "cells[" + std::to_string(index) + "].";
    if (!node.IsMap()) fail(node, prefix.substr(0, prefix.size() - 1), "expected a mapping");
    check_keys(node,
               {"name", "example", "T", "N", "dependence", "innovation", "hypothesis", "replications",
                "bootstrap", "seed", "block_length", "bandwidth", "spline", "garch_shock"},
               prefix);

    dgp::ExperimentPlan plan;
    if (!node["name"]) fail(node, prefix + "name", "required");
    plan.name = scalar<std::string>(node["name"], prefix + "name");
    if (node["example"]) plan.example = parse_example(node["example"], prefix + "example");
    if (node["T"]) plan.periods = positive_int(node["T"], prefix + "T");
    if (node["N"]) plan.assets = positive_int(node["N"], prefix + "N");
    if (node["dependence"]) plan.dependence = parse_dependence(node["dependence"], prefix + "dependence");
    if (node["innovation"]) plan.innovation = parse_innovation(node["innovation"], prefix + "innovation");
    if (node["replications"]) plan.replications = positive_int(node["replications"], prefix + "replications");
    if (node["bootstrap"]) plan.bootstrap = positive_int(node["bootstrap"], prefix + "bootstrap");
    if (node["block_length"]) plan.block_length = auto_or_int(node["block_length"], prefix + "block_length");
    if (node["bandwidth"]) plan.bandwidth = auto_or_int(node["bandwidth"], prefix + "bandwidth");
    if (node["garch_shock"]) plan.garch_shock = parse_shock(node["garch_shock"], prefix + "garch_shock");
    if (const auto sp = node["spline"]) {
        if (!sp.IsMap()) fail(sp, prefix + "spline", "expected a mapping");
        check_keys(sp, {"order", "basis_dim"}, prefix + "spline.");
        const int order = sp["order"] ? positive_int(sp["order"], prefix + "spline.order") : 4;
        const int dim = sp["basis_dim"] ? positive_int(sp["basis_dim"], prefix + "spline.basis_dim") : 5;
        if (dim < order) fail(sp, prefix + "spline.basis_dim", "must be >= order");
        plan.spline = spline::SplineConfig::with_basis_dim(order, dim);
    }
    const bool explicit_seed = static_cast<bool>(node["seed"]);
    if (explicit_seed) plan.seed = scalar<std::uint64_t>(node["seed"], prefix + "seed");

    std::vector<int> sparsities;
    const auto hyp = node["hypothesis"];
    if (hyp && !hyp.IsNull() && !(hyp.IsScalar() && hyp.Scalar() == "null")) {
        if (!hyp.IsMap()) fail(hyp, prefix + "hypothesis", "expected 'null' or a mapping");
        check_keys(hyp, {"sparsity", "c_M"}, prefix + "hypothesis.");
        const auto s = hyp["sparsity"];
        if (!s) fail(hyp, prefix + "hypothesis.sparsity", "required");
        if (s.IsSequence()) {
            for (std::size_t k = 0; k < s.size(); ++k) {
                sparsities.push_back(positive_int(s[k], prefix + "hypothesis.sparsity"));
            }
            if (sparsities.empty()) fail(s, prefix + "hypothesis.sparsity", "empty list");
        } else {
            sparsities.push_back(positive_int(s, prefix + "hypothesis.sparsity"));
        }
        dgp::AlphaAlternative alt;
        alt.c_m = hyp["c_M"] ? scalar<double>(hyp["c_M"], prefix + "hypothesis.c_M")
                             : dgp::default_signal_constant(plan.dependence);
        plan.alternative = alt;
    }

    std::vector<dgp::ExperimentPlan> out;
    const auto finish = [&](dgp::ExperimentPlan p) {
        if (!explicit_seed) p.seed = cell_seed(grid_seed, p.name);
        try {
            p.validate();
        } catch (const ConfigError& e) {
            fail(node, prefix.substr(0, prefix.size() - 1), e.what());
        }
        out.push_back(std::move(p));
    };
    if (sparsities.size() <= 1) {
        if (!sparsities.empty()) plan.alternative->sparsity = sparsities.front();
        finish(plan);
    } else {
        for (int s : sparsities) {
            auto p = plan;
            p.name = plan.name + "_s" + std::to_string(s);
            p.alternative->sparsity = s;
            finish(std::move(p));
        }
    }
    return out;
}

void emit_plan(YAML::Emitter& out, const dgp::ExperimentPlan& plan) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << plan.name;
    out << YAML::Key << "example" << YAML::Value << to_string(plan.example);
    out << YAML::Key << "T" << YAML::Value << plan.periods;
    out << YAML::Key << "N" << YAML::Value << plan.assets;
    out << YAML::Key << "dependence" << YAML::Value << to_string(plan.dependence);
    out << YAML::Key << "innovation" << YAML::Value << to_string(plan.innovation);
    out << YAML::Key << "hypothesis" << YAML::Value;
    if (plan.alternative) {
        out << YAML::BeginMap << YAML::Key << "sparsity" << YAML::Value << plan.alternative->sparsity
            << YAML::Key << "c_M" << YAML::Value << plan.alternative->c_m << YAML::EndMap;
    } else {
        out << "null";
    }
    out << YAML::Key << "replications" << YAML::Value << plan.replications;
    out << YAML::Key << "bootstrap" << YAML::Value << plan.bootstrap;
    out << YAML::Key << "seed" << YAML::Value << plan.seed;
    out << YAML::Key << "block_length" << YAML::Value;
    if (plan.block_length) out << *plan.block_length; else out << "auto";
    out << YAML::Key << "bandwidth" << YAML::Value;
    if (plan.bandwidth) out << *plan.bandwidth; else out << "auto";
    out << YAML::Key << "spline" << YAML::Value << YAML::Flow << YAML::BeginMap << YAML::Key << "order"
        << YAML::Value << plan.spline.order << YAML::Key << "basis_dim" << YAML::Value
        << plan.spline.basis_dim() << YAML::EndMap;
    out << YAML::Key << "garch_shock" << YAML::Value << to_string(plan.garch_shock);
    out << YAML::EndMap;
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t grid_seed, std::string_view cell_name) {
    return derive_stream(grid_seed, fnv1a(cell_name))();
}

std::string to_string(dgp::Example example) {
    return example == dgp::Example::kOne ? "one" : "three-factor";
}

std::string to_string(dgp::Dependence dependence) {
    switch (dependence) {
        case dgp::Dependence::kNone: return "0";
        case dgp::Dependence::kShort: return "2";
        case dgp::Dependence::kLong: return "T-1";
    }
    return "0";
}

std::string to_string(dgp::Innovation innovation) {
    return innovation == dgp::Innovation::kGaussian ? "gaussian" : "t6";
}

std::string to_string(dgp::GarchShock shock) {
    return shock == dgp::GarchShock::kIndependent ? "independent" : "return";
}

GridConfig parse_grid(std::string_view text, std::optional<std::uint64_t> seed_override) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(text));
    } catch (const YAML::ParserException& e) {
        throw ConfigError("config syntax error (line " + std::to_string(e.mark.line + 1) + "): " + e.msg);
    }
    if (!root.IsMap()) throw ConfigError("config: top level must be a mapping");
    check_keys(root, {"format_version", "gamma", "seed", "cells"}, "");

    GridConfig grid;
    if (root["format_version"]) {
        grid.format_version = scalar<int>(root["format_version"], "format_version");
        if (grid.format_version != kFormatVersion) {
            fail(root["format_version"], "format_version",
                 "unsupported version " + std::to_string(grid.format_version));
        }
    }
    if (root["gamma"]) {
        grid.gamma = scalar<double>(root["gamma"], "gamma");
        if (!(grid.gamma > 0.0 && grid.gamma < 1.0)) fail(root["gamma"], "gamma", "must lie in (0, 1)");
    }
    if (root["seed"]) grid.seed = scalar<std::uint64_t>(root["seed"], "seed");
    if (seed_override) grid.seed = *seed_override;
    const auto cells = root["cells"];
    if (cells) {
        if (!cells.IsSequence()) fail(cells, "cells", "expected a list");
        std::set<std::string> names;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            for (auto& plan : parse_cell(cells[i], i, grid.seed)) {
                if (!names.insert(plan.name).second) {
                    fail(cells[i], "cells[" + std::to_string(i) + "].name", "duplicate cell name '" + plan.name + "'");
                }
                grid.cells.push_back(std::move(plan));
            }
        }
    }
    return grid;
}

GridConfig load_grid(const std::filesystem::path& path, std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return parse_grid(buffer.str(), seed_override);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string to_yaml(const dgp::ExperimentPlan& plan) {
    YAML::Emitter out;
    emit_plan(out, plan);
    return out.c_str();
}

std::string to_yaml(const GridConfig& grid) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    out << YAML::Key << "format_version" << YAML::Value << grid.format_version;
    out << YAML::Key << "gamma" << YAML::Value << grid.gamma;
    out << YAML::Key << "seed" << YAML::Value << grid.seed;
    out << YAML::Key << "cells" << YAML::Value << YAML::BeginSeq;
    for (const auto& plan : grid.cells) emit_plan(out, plan);
    out << YAML::EndSeq << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace alphatest::plan_io
