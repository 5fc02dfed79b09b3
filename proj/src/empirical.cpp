#include "alphatest/empirical.hpp"

#include "alphatest/distributions.hpp"
#include "alphatest/errors.hpp"
#include "alphatest/parallel.hpp"
#include "alphatest/projection.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

namespace alphatest::empirical {

namespace fs = std::filesystem;
namespace chr = std::chrono;

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct Table {
    std::vector<std::string> header;
    std::vector<int> weeks;
    std::vector<std::vector<double>> rows;  // without the date column
    std::vector<std::size_t> lines;
};

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    s = s.substr(b, e - b);
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return std::string(s);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

[[noreturn]] void data_error(const std::string& file, std::size_t line, const std::string& what) {
    throw DataError(file + ":" + std::to_string(line) + ": " + what);
}

bool is_missing(const std::string& s) {
    return s.empty() || s == "NA" || s == "NaN" || s == "nan" || s == "." || s == "null";
}

double parse_number(const std::string& s, const std::string& file, std::size_t line) {
    if (is_missing(s)) return kMissing;
    double v = 0.0;
    const char* first = s.data();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        data_error(file, line, "cannot parse number '" + s + "'");
    }
    return v;
}

int parse_week(const std::string& s, const std::string& format, const std::string& file, std::size_t line) {
    std::tm tm{};
    std::istringstream in(s);
    in >> std::get_time(&tm, format.c_str());
    if (in.fail()) data_error(file, line, "cannot parse date '" + s + "' with format " + format);
    in >> std::ws;
    if (!in.eof()) data_error(file, line, "trailing characters in date '" + s + "'");
    const chr::year_month_day ymd{chr::year{tm.tm_year + 1900}, chr::month{static_cast<unsigned>(tm.tm_mon + 1)},
                                  chr::day{static_cast<unsigned>(tm.tm_mday)}};
    if (!ymd.ok()) data_error(file, line, "invalid calendar date '" + s + "'");
    return iso_week_key(static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                        static_cast<unsigned>(ymd.day()));
}

Table read_table(const std::string& text, const std::string& file, const std::string& format) {
    Table t;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    std::map<int, std::size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto fields = split(line);
        if (t.header.empty()) {
            if (fields.size() < 2) data_error(file, line_no, "header needs a date column and at least one data column");
            t.header.assign(fields.begin() + 1, fields.end());
            continue;
        }
        if (fields.size() != t.header.size() + 1) {
            data_error(file, line_no, "expected " + std::to_string(t.header.size() + 1) + " fields, got " +
                                          std::to_string(fields.size()));
        }
        const int week = parse_week(fields[0], format, file, line_no);
        if (const auto it = seen.find(week); it != seen.end()) {
            data_error(file, line_no, "second row in ISO week " + std::to_string(week) + " (first at line " +
                                          std::to_string(it->second) + ")");
        }
        seen.emplace(week, line_no);
        std::vector<double> row;
        row.reserve(t.header.size());
        for (std::size_t k = 1; k < fields.size(); ++k) row.push_back(parse_number(fields[k], file, line_no));
        t.weeks.push_back(week);
        t.rows.push_back(std::move(row));
        t.lines.push_back(line_no);
    }
    if (t.header.empty()) throw DataError(file + ": empty file");
    if (t.rows.empty()) throw DataError(file + ": no data rows");
    return t;
}

std::string normalize(const std::string& name) {
    std::string s;
    for (char ch : name) {
        if (std::isalnum(static_cast<unsigned char>(ch))) s.push_back(static_cast<char>(std::toupper(ch)));
    }
    if (s == "MKTRF") s = "MKT";
    return s;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string monday_of(int key) {
    const int year = key / 100;
    const int week = key % 100;
    const chr::sys_days jan4{chr::year{year} / chr::January / 4};
    const unsigned iso = chr::weekday{jan4}.iso_encoding();
    const chr::sys_days monday = jan4 - chr::days{iso - 1} + chr::days{7 * (week - 1)};
    const chr::year_month_day ymd{monday};
    std::ostringstream out;
    out << static_cast<int>(ymd.year()) << '-' << std::setw(2) << std::setfill('0')
        << static_cast<unsigned>(ymd.month()) << '-' << std::setw(2) << static_cast<unsigned>(ymd.day());
    return out.str();
}

}  // namespace

int iso_week_key(int year, unsigned month, unsigned day) {
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok()) throw DomainError("invalid calendar date");
    const chr::sys_days d{ymd};
    const unsigned iso = chr::weekday{d}.iso_encoding();
    const chr::sys_days thursday = d + chr::days{4} - chr::days{iso};
    const chr::year iso_year = chr::year_month_day{thursday}.year();
    const chr::sys_days jan1{iso_year / chr::January / 1};
    const int week = static_cast<int>((thursday - jan1).count() / 7) + 1;
    return static_cast<int>(iso_year) * 100 + week;
}

BalancedPanel balance_from_text(const std::string& returns_csv, const std::string& factors_csv,
                                const PanelSource& src, const std::string& returns_name,
                                const std::string& factors_name) {
    const Table ret = read_table(returns_csv, returns_name, src.date_format);
    const Table fac = read_table(factors_csv, factors_name, src.date_format);

    const std::vector<std::string> wanted{"MKT", "SMB", "HML", "RF"};
    std::vector<std::size_t> col;
    for (const auto& w : wanted) {
        std::size_t found = fac.header.size();
        for (std::size_t k = 0; k < fac.header.size(); ++k) {
            if (normalize(fac.header[k]) == w) found = k;
        }
        if (found == fac.header.size()) throw DataError(factors_name + ":1: missing column " + w);
        col.push_back(found);
    }

    std::map<int, std::size_t> ret_row;
    for (std::size_t r = 0; r < ret.weeks.size(); ++r) ret_row.emplace(ret.weeks[r], r);

    const double ret_scale = src.return_units == Units::kPercent ? 0.01 : 1.0;
    const double fac_scale = src.factor_units == Units::kPercent ? 0.01 : 1.0;

    std::vector<std::pair<int, std::size_t>> overlap;  // (week, factor row)
    for (std::size_t r = 0; r < fac.weeks.size(); ++r) {
        if (ret_row.contains(fac.weeks[r])) overlap.emplace_back(fac.weeks[r], r);
    }
    if (overlap.empty()) throw DataError("no ISO week is shared by " + returns_name + " and " + factors_name);
    std::sort(overlap.begin(), overlap.end());

    const auto T = static_cast<Eigen::Index>(overlap.size());
    BalancedPanel out;
    out.factors.names = {"MKT", "SMB", "HML"};
    out.factors.values.resize(T, 3);
    Vector rf(T);
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto& row = fac.rows[overlap[static_cast<std::size_t>(t)].second];
        for (std::size_t j = 0; j < 4; ++j) {
            const double v = row[col[j]];
            if (std::isnan(v)) {
                data_error(factors_name, fac.lines[overlap[static_cast<std::size_t>(t)].second],
                           "missing value for " + wanted[j]);
            }
            if (j < 3) out.factors.values(t, static_cast<Eigen::Index>(j)) = v * fac_scale;
            else rf(t) = v * fac_scale;
        }
        out.iso_weeks.push_back(overlap[static_cast<std::size_t>(t)].first);
    }

    std::vector<Vector> kept;
    for (std::size_t i = 0; i < ret.header.size(); ++i) {
        Vector series(T);
        bool complete = true;
        for (Eigen::Index t = 0; t < T && complete; ++t) {
            const double v = ret.rows[ret_row.at(out.iso_weeks[static_cast<std::size_t>(t)])][i];
            if (std::isnan(v)) complete = false;
            series(t) = v * ret_scale - (src.returns_are_excess ? 0.0 : rf(t));
        }
        if (complete) {
            out.panel.assets.push_back(ret.header[i]);
            kept.push_back(std::move(series));
        } else {
            out.dropped_assets.push_back(ret.header[i]);
        }
    }
    if (kept.empty()) throw DataError("no asset has complete returns over the " + std::to_string(T) + " shared weeks");
    out.panel.returns.resize(T, static_cast<Eigen::Index>(kept.size()));
    for (std::size_t i = 0; i < kept.size(); ++i) out.panel.returns.col(static_cast<Eigen::Index>(i)) = kept[i];
    for (int w : out.iso_weeks) out.panel.dates.push_back(monday_of(w));
    return out;
}

BalancedPanel ingest_and_balance(const PanelSource& src) {
    return balance_from_text(read_file(src.returns_path), read_file(src.factors_path), src,
                             src.returns_path.string(), src.factors_path.string());
}

double box_pierce(std::span<const double> series, int lag) {
    const auto T = static_cast<int>(series.size());
    if (lag < 1 || lag >= T) {
        throw DomainError("Box-Pierce lag must lie in [1, T), got m = " + std::to_string(lag) +
                          " with T = " + std::to_string(T));
    }
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= T;
    std::vector<double> x(series.begin(), series.end());
    double denom = 0.0;
    for (double& v : x) {
        v -= mean;
        denom += v * v;
    }
    if (!(denom > 0.0)) throw DegenerateError("Box-Pierce: constant series");
    double q = 0.0;
    for (int k = 1; k <= lag; ++k) {
        double acc = 0.0;
        for (int t = k; t < T; ++t) acc += x[static_cast<std::size_t>(t)] * x[static_cast<std::size_t>(t - k)];
        const double rho = acc / denom;
        q += rho * rho;
    }
    return dist::chi_square_sf(T * q, lag);
}

EmpiricalReport run_empirical(const PanelSource& src, const EmpiricalOptions& options) {
    return run_empirical(ingest_and_balance(src), options);
}

EmpiricalReport run_empirical(BalancedPanel data, const EmpiricalOptions& options) {
    EmpiricalReport report;
    report.box_pierce_lag = options.box_pierce_lag;
    report.suite = pipeline::run_suite(data.panel.returns, data.factors.values, options.suite);

    // Residuals of the null-restricted fit feed the white-noise diagnostics.
    const auto basis = spline::build_basis(static_cast<int>(data.panel.returns.rows()), options.suite.spline);
    projection::FitOptions fit_options;
    fit_options.with_covariance = false;
    const auto fit = projection::fit_sieve(data.panel.returns, spline::build_design(basis, data.factors.values),
                                           fit_options);
    const auto N = static_cast<std::size_t>(fit.assets);
    report.box_pierce_p.assign(N, kMissing);
    parallel_for(N, options.suite.threads, [&](std::size_t i) {
        const auto c = fit.residuals.col(static_cast<Eigen::Index>(i));
        try {
            report.box_pierce_p[i] = box_pierce(std::span<const double>(c.data(), static_cast<std::size_t>(c.size())),
                                                options.box_pierce_lag);
        } catch (const DegenerateError&) {
        }
    });
    int valid = 0, rejected = 0;
    for (double p : report.box_pierce_p) {
        if (std::isnan(p)) continue;
        ++valid;
        if (p < options.level) ++rejected;
    }
    report.white_noise_rejection_share = valid > 0 ? static_cast<double>(rejected) / valid : 0.0;
    report.data = std::move(data);
    return report;
}

nlohmann::ordered_json to_json(const EmpiricalReport& report) {
    nlohmann::ordered_json j;
    j["format_version"] = kFormatVersion;
    j["periods"] = report.suite.periods;
    j["assets"] = report.suite.assets;
    j["first_week"] = report.data.panel.dates.empty() ? "" : report.data.panel.dates.front();
    j["last_week"] = report.data.panel.dates.empty() ? "" : report.data.panel.dates.back();
    j["dropped_assets"] = report.data.dropped_assets;
    j["suite"] = pipeline::to_json(report.suite);
    if (report.suite.block_report) j["block_length_selection"] = pipeline::to_json(*report.suite.block_report);
    j["box_pierce_lag"] = report.box_pierce_lag;
    j["white_noise_rejection_share"] = report.white_noise_rejection_share;
    return j;
}

void write_box_pierce_csv(const EmpiricalReport& report, const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(10) << "asset,box_pierce_p\n";
    for (std::size_t i = 0; i < report.box_pierce_p.size(); ++i) {
        out << report.data.panel.assets[i] << ',';
        if (!std::isnan(report.box_pierce_p[i])) out << report.box_pierce_p[i];
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_balanced_panel(const BalancedPanel& data, const fs::path& returns_path, const fs::path& factors_path) {
    std::ofstream r(returns_path, std::ios::trunc), f(factors_path, std::ios::trunc);
    if (!r) throw IoError("cannot write " + returns_path.string());
    if (!f) throw IoError("cannot write " + factors_path.string());
    r << std::setprecision(17) << "date";
    for (const auto& a : data.panel.assets) r << ',' << a;
    r << '\n';
    f << std::setprecision(17) << "date,MKT,SMB,HML,RF\n";
    for (Eigen::Index t = 0; t < data.panel.returns.rows(); ++t) {
        const auto& date = data.panel.dates[static_cast<std::size_t>(t)];
        r << date;
        for (Eigen::Index i = 0; i < data.panel.returns.cols(); ++i) r << ',' << data.panel.returns(t, i);
        r << '\n';
        f << date;
        for (Eigen::Index j = 0; j < 3; ++j) f << ',' << data.factors.values(t, j);
        f << ",0\n";
    }
    if (!r) throw IoError("write failed: " + returns_path.string());
    if (!f) throw IoError("write failed: " + factors_path.string());
}

}  // namespace alphatest::empirical
