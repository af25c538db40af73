#include "bandlab/experiments.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <functional>

namespace bandlab {

namespace {

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

[[noreturn]] void bad_value(const std::string& flag, const std::string& value) {
    throw UsageError("invalid value '" + value + "' for --" + flag);
}

template <class T>
T parse_number(const std::string& flag, const std::string& value) {
    try {
        std::size_t used = 0;
        T out{};
        if constexpr (std::is_same_v<T, int>)
            out = std::stoi(value, &used);
        else if constexpr (std::is_same_v<T, std::uint64_t>)
            out = std::stoull(value, &used);
        else
            out = std::stod(value, &used);
        if (used != value.size()) bad_value(flag, value);
        if constexpr (std::is_same_v<T, std::uint64_t>)
            if (!value.empty() && value.front() == '-') bad_value(flag, value);
        return out;
    } catch (const UsageError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(flag, value);
    }
}

const std::vector<std::pair<std::string, Setter>>& setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"n", [](ExperimentConfig& c, const std::string& v) { c.n = parse_number<int>("n", v); }},
        {"w", [](ExperimentConfig& c, const std::string& v) { c.w = parse_number<int>("w", v); }},
        {"profile",
         [](ExperimentConfig& c, const std::string& v) {
             if (v == "block")
                 c.profile = ProfileKind::block_band;
             else if (v == "circulant")
                 c.profile = ProfileKind::circulant;
             else if (v == "explicit")
                 c.profile = ProfileKind::explicit_matrix;
             else
                 bad_value("profile", v);
         }},
        {"f",
         [](ExperimentConfig& c, const std::string& v) {
             if (v != "indicator" && v != "gauss") bad_value("f", v);
             c.f = v;
         }},
        {"profile-csv", [](ExperimentConfig& c, const std::string& v) { c.profile_csv = v; }},
        {"dist", [](ExperimentConfig& c, const std::string& v) { c.dist = EntryDistribution::from_name(v).tag; }},
        {"z-re", [](ExperimentConfig& c, const std::string& v) { c.z.real(parse_number<double>("z-re", v)); }},
        {"z-im", [](ExperimentConfig& c, const std::string& v) { c.z.imag(parse_number<double>("z-im", v)); }},
        {"trials", [](ExperimentConfig& c, const std::string& v) { c.trials = parse_number<int>("trials", v); }},
        {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_number<std::uint64_t>("seed", v); }},
        {"eta-min", [](ExperimentConfig& c, const std::string& v) { c.eta.min = parse_number<double>("eta-min", v); }},
        {"eta-max", [](ExperimentConfig& c, const std::string& v) { c.eta.max = parse_number<double>("eta-max", v); }},
        {"eta-points",
         [](ExperimentConfig& c, const std::string& v) { c.eta.points = parse_number<int>("eta-points", v); }},
        {"gamma0", [](ExperimentConfig& c, const std::string& v) { c.gamma0 = parse_number<double>("gamma0", v); }},
        {"kappa", [](ExperimentConfig& c, const std::string& v) { c.kappa = parse_number<double>("kappa", v); }},
        {"epsilon", [](ExperimentConfig& c, const std::string& v) { c.epsilon = parse_number<double>("epsilon", v); }},
        {"eps-report",
         [](ExperimentConfig& c, const std::string& v) { c.eps_report = parse_number<double>("eps-report", v); }},
        {"radius", [](ExperimentConfig& c, const std::string& v) { c.radius = parse_number<double>("radius", v); }},
        {"grid-points",
         [](ExperimentConfig& c, const std::string& v) { c.grid_points = parse_number<int>("grid-points", v); }},
        {"spot-pairs",
         [](ExperimentConfig& c, const std::string& v) { c.spot_pairs = parse_number<int>("spot-pairs", v); }},
        {"out", [](ExperimentConfig& c, const std::string& v) { c.out = v; }},
        {"plot", [](ExperimentConfig& c, const std::string& v) { c.plot = v; }},
    };
    return table;
}

const Setter* find_setter(std::string_view name) {
    for (const auto& [key, fn] : setters())
        if (key == name) return &fn;
    return nullptr;
}

void apply_json(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream is(path);
    if (!is) throw UsageError("cannot open --config file '" + path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("--config file '" + path + "' is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw UsageError("--config file '" + path + "' must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
        if (key == "serial") {
            if (!value.is_boolean()) throw UsageError("config key 'serial' must be a boolean");
            cfg.parallel = !value.get<bool>();
            continue;
        }
        if (key == "kind") continue;  // the subcommand decides
        const Setter* fn = find_setter(key);
        if (!fn) throw UsageError("unknown config key '" + key + "' in '" + path + "'");
        (*fn)(cfg, value.is_string() ? value.get<std::string>() : value.dump());
    }
}

}  // namespace

ExperimentConfig parse_cli(const std::vector<std::string>& args) {
    if (args.empty()) throw UsageError("missing experiment kind (circlaw|locallaw|singcount|leastsing|replacement|normcond|mc)");
    ExperimentConfig cfg;
    cfg.kind = experiment_kind_from_name(args.front());

    CLI::App app{"bandlab " + args.front()};
    std::map<std::string, std::string> raw;
    std::map<std::string, CLI::Option*> options;
    for (const auto& [name, fn] : setters()) options[name] = app.add_option("--" + name, raw[name]);
    std::string config_path;
    app.add_option("--config", config_path);
    bool serial = false;
    auto* serial_flag = app.add_flag("--serial", serial);

    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);  // CLI11 consumes from the back
    try {
        app.parse(rest);
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (!config_path.empty()) apply_json(cfg, config_path);
    for (const auto& [name, fn] : setters())
        if (options[name]->count() > 0) fn(cfg, raw[name]);
    if (serial_flag->count() > 0) cfg.parallel = !serial;

    validate_config(cfg);
    return cfg;
}

}  // namespace bandlab
