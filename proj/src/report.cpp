#include "bandlab/experiments.hpp"

#include "csv_util.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

namespace bandlab {

namespace {

std::string cell_text(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int64_t>)
                return std::to_string(v);
            else if constexpr (std::is_same_v<T, double>)
                return detail::format_double(v);
            else {
                std::string s = v;
                std::replace(s.begin(), s.end(), ',', ';');
                return s;
            }
        },
        c);
}

Cell parse_cell(const std::string& text) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty()) {
        std::int64_t i = 0;
        auto [p, ec] = std::from_chars(first, last, i);
        if (ec == std::errc{} && p == last) return i;
        double d = 0.0;
        auto [q, ec2] = std::from_chars(first, last, d);
        if (ec2 == std::errc{} && q == last) return d;
    }
    return text;
}

std::optional<double> as_number(const Cell& c) {
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(&c)) return *d;
    return std::nullopt;
}

}  // namespace

std::size_t ExperimentReport::column_index(std::string_view name) const {
    for (std::size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == name) return k;
    throw std::out_of_range("report has no column '" + std::string(name) + "'");
}

std::vector<double> ExperimentReport::numeric_column(std::string_view name) const {
    const auto col = column_index(name);
    std::optional<std::size_t> status;
    for (std::size_t k = 0; k < columns.size(); ++k)
        if (columns[k] == "status") status = k;
    std::vector<double> out;
    for (const auto& row : rows) {
        if (status) {
            const auto* s = std::get_if<std::string>(&row[*status]);
            if (!s || *s != "ok") continue;
        }
        if (auto v = as_number(row[col]); v && !std::isnan(*v)) out.push_back(*v);
    }
    return out;
}

ColumnStats ExperimentReport::stats(std::string_view name) const {
    auto values = numeric_column(name);
    ColumnStats s;
    s.count = values.size();
    if (values.empty()) {
        s.median = s.mean = s.min = s.max = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
    s.min = values.front();
    s.max = values.back();
    return s;
}

std::map<std::string, ColumnStats> ExperimentReport::aggregates() const {
    std::map<std::string, ColumnStats> out;
    for (const auto& c : columns) {
        if (c == "status" || c == "method" || c == "trial" || c == "seed") continue;
        out[c] = stats(c);
    }
    return out;
}

double ExperimentReport::pass_fraction(std::string_view check) const {
    const auto it = checks.find(std::string(check));
    if (it == checks.end() || it->second.empty()) return std::numeric_limits<double>::quiet_NaN();
    const auto passed = std::count(it->second.begin(), it->second.end(), true);
    return static_cast<double>(passed) / static_cast<double>(it->second.size());
}

nlohmann::json ExperimentReport::summary_json() const {
    nlohmann::json j;
    j["config"] = config.to_json();
    j["rows"] = rows.size();
    j["seconds"] = seconds;
    auto& agg = j["aggregates"];
    agg = nlohmann::json::object();
    for (const auto& [name, s] : aggregates())
        agg[name] = {{"median", s.median}, {"mean", s.mean}, {"min", s.min}, {"max", s.max}, {"count", s.count}};
    auto& pf = j["pass_fraction"];
    pf = nlohmann::json::object();
    for (const auto& [name, flags] : checks) pf[name] = pass_fraction(name);
    j["scalars"] = scalars;
    return j;
}

void emit_csv(const ExperimentReport& report, const std::string& path) {
    auto os = detail::open_for_write(path);
    for (std::size_t k = 0; k < report.columns.size(); ++k) os << (k ? "," : "") << report.columns[k];
    os << '\n';
    for (const auto& row : report.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell_text(row[k]);
        os << '\n';
    }
    detail::check_written(os, path);
}

ExperimentReport read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open '" + path + "' for reading");
    ExperimentReport report;
    std::string line;
    if (!std::getline(is, line)) throw IoError("'" + path + "' has no header row");
    report.columns = detail::split_csv_line(line);
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto cells = detail::split_csv_line(line);
        if (cells.size() != report.columns.size())
            throw IoError("'" + path + "' line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                          " cells, expected " + std::to_string(report.columns.size()));
        std::vector<Cell> row;
        row.reserve(cells.size());
        for (const auto& c : cells) row.push_back(parse_cell(c));
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace bandlab
