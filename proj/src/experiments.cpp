#include "bandlab/experiments.hpp"

#include "bandlab/kernels.hpp"
#include "bandlab/rng.hpp"
#include "bandlab/selfconsistent.hpp"
#include "bandlab/spectra.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

namespace bandlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kOpNormSlack = 3.5;
constexpr double kLocalLawTarget = 10.0;
constexpr double kStieltjesConstant = 4.0;

std::string status_text(const std::exception& e) {
    std::string s = std::string("failed: ") + e.what();
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

// Rows and check flags produced by one trial, merged in trial order.
struct TrialOutput {
    std::vector<std::vector<Cell>> rows;
    std::map<std::string, std::vector<bool>> checks;
    std::vector<Complex> eigenvalues;
};

void for_each_trial(int trials, bool parallel, const std::function<void(int)>& body) {
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < trials; ++t) body(t);
    } else {
        for (int t = 0; t < trials; ++t) body(t);
    }
}

void merge(ExperimentReport& report, std::vector<TrialOutput>& outputs) {
    for (auto& out : outputs) {
        const std::size_t before = report.rows.size();
        for (auto& row : out.rows) report.rows.push_back(std::move(row));
        const std::size_t added = report.rows.size() - before;
        for (auto& [name, flags] : out.checks) {
            auto& dst = report.checks[name];
            dst.resize(before, false);
            dst.insert(dst.end(), flags.begin(), flags.end());
        }
        for (auto& [name, dst] : report.checks) dst.resize(before + added, false);
    }
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, int t) { return cfg.seed + static_cast<std::uint64_t>(t); }

bool is_block(const ExperimentConfig& cfg) { return cfg.profile == ProfileKind::block_band; }

// --------------------------------------------------------------------------

ExperimentReport run_circlaw(const ExperimentConfig& cfg, std::shared_ptr<const VarianceProfile> profile) {
    ExperimentReport report;
    report.columns = {"trial", "seed", "radial_ks", "angular_ks", "op_norm", "status"};
    const auto dist = EntryDistribution::make(cfg.dist);
    std::vector<TrialOutput> outputs(cfg.trials);
    for_each_trial(cfg.trials, cfg.parallel, [&](int t) {
        auto& out = outputs[t];
        const auto seed = trial_seed(cfg, t);
        try {
            const auto s = sample(profile, dist, seed);
            out.eigenvalues = eigenvalues(s.matrix);
            const auto d = circular_law_distance(out.eigenvalues);
            const double op = singular_values(s.matrix).back();
            out.rows.push_back({std::int64_t{t}, static_cast<std::int64_t>(seed), d.radial, d.angular, op, "ok"});
            out.checks["op_norm_bound"].push_back(op <= kOpNormSlack);
        } catch (const std::exception& e) {
            out.rows.push_back({std::int64_t{t}, static_cast<std::int64_t>(seed), kNaN, kNaN, kNaN, status_text(e)});
            out.checks["op_norm_bound"].push_back(false);
        }
    });
    for (auto& out : outputs)
        if (!out.eigenvalues.empty()) {
            report.eigen_scatter = out.eigenvalues;
            break;
        }
    for (auto& out : outputs) out.eigenvalues.clear();
    merge(report, outputs);
    return report;
}

ExperimentReport run_locallaw(const ExperimentConfig& cfg, std::shared_ptr<const VarianceProfile> profile) {
    ExperimentReport report;
    report.columns = {"trial", "eta", "abs_err", "normalized_err", "entry_spot_max", "status"};
    const auto dist = EntryDistribution::make(cfg.dist);
    const auto etas = eta_values(cfg);
    const auto curve = mc_curve(cfg.z, etas);
    const double sqrt_w = std::sqrt(static_cast<double>(cfg.w));
    std::vector<TrialOutput> outputs(cfg.trials);

    for_each_trial(cfg.trials, cfg.parallel, [&](int t) {
        auto& out = outputs[t];
        const auto seed = trial_seed(cfg, t);
        try {
            const auto s = sample(profile, dist, seed);
            const CMatrix y = shifted(s, cfg.z);
            SvdWithVectors svd;
            if (cfg.spot_pairs > 0)
                svd = singular_values_and_vectors(y);
            else
                svd.sigma = singular_values(y);
            const auto m = kernels::parallel::stieltjes_curve(svd.sigma, etas);

            // Fixed pseudo-random (i, j) pairs per trial; the first is diagonal.
            std::vector<std::pair<int, int>> pairs;
            for (int k = 0; k < cfg.spot_pairs; ++k) {
                EntryStream rng(seed, 0x5107ull, static_cast<std::uint64_t>(k));
                const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.n));
                const int j = k == 0 ? i : static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.n));
                pairs.emplace_back(i, j);
            }

            for (std::size_t e = 0; e < etas.size(); ++e) {
                const double eta = etas[e];
                const Complex mc = curve[e].mc;
                const double scale = sqrt_w * std::pow(eta, 0.75);
                const double err = std::abs(m[e] - mc);
                double spot = kNaN;
                if (!pairs.empty()) {
                    spot = 0.0;
                    for (auto [i, j] : pairs) {
                        Complex g{};
                        for (std::size_t k = 0; k < svd.sigma.size(); ++k)
                            g += svd.v(i, k) * std::conj(svd.v(j, k)) /
                                 Complex(svd.sigma[k] * svd.sigma[k], -eta);
                        if (i == j) g -= mc;
                        spot = std::max(spot, std::abs(g) * scale);
                    }
                }
                out.rows.push_back({std::int64_t{t}, eta, err, err * scale, spot, "ok"});
                out.checks["normalized_le_10"].push_back(err * scale <= kLocalLawTarget);
            }
        } catch (const std::exception& e) {
            for (double eta : etas) {
                out.rows.push_back({std::int64_t{t}, eta, kNaN, kNaN, kNaN, status_text(e)});
                out.checks["normalized_le_10"].push_back(false);
            }
        }
    });
    merge(report, outputs);

    // Fraction of trials whose every grid point meets the target.
    int good = 0;
    const auto& flags = report.checks["normalized_le_10"];
    for (int t = 0; t < cfg.trials; ++t) {
        bool all = true;
        for (std::size_t e = 0; e < etas.size(); ++e) all = all && flags[t * etas.size() + e];
        good += all ? 1 : 0;
    }
    report.scalars["trial_pass_fraction"] = static_cast<double>(good) / cfg.trials;
    report.scalars["eta_min"] = etas.back();
    report.scalars["eta_max"] = etas.front();
    return report;
}

ExperimentReport run_singcount(const ExperimentConfig& cfg, std::shared_ptr<const VarianceProfile> profile) {
    ExperimentReport report;
    report.columns = {"trial", "count", "bound", "status"};
    const auto dist = EntryDistribution::make(cfg.dist);
    const auto etas = eta_values(cfg);
    const double bound = std::pow(static_cast<double>(cfg.n), 1.0 + cfg.eps_report) / cfg.w;
    std::vector<TrialOutput> outputs(cfg.trials);

    for_each_trial(cfg.trials, cfg.parallel, [&](int t) {
        auto& out = outputs[t];
        try {
            const auto s = sample(profile, dist, trial_seed(cfg, t));
            const auto sv = singular_values(shifted(s, cfg.z));
            const auto count = count_small_singulars(sv, 1.0 / cfg.w);
            const auto m = kernels::parallel::stieltjes_curve(sv, etas);
            bool inequality = true;
            for (std::size_t e = 0; e < etas.size(); ++e) {
                const double lhs = static_cast<double>(count_small_singulars(sv, std::sqrt(etas[e])));
                const double rhs = kStieltjesConstant * cfg.n * etas[e] * m[e].imag();
                inequality = inequality && lhs <= rhs;
            }
            out.rows.push_back({std::int64_t{t}, static_cast<std::int64_t>(count), bound, "ok"});
            out.checks["count_le_bound"].push_back(static_cast<double>(count) <= bound);
            out.checks["stieltjes_inequality"].push_back(inequality);
        } catch (const std::exception& e) {
            out.rows.push_back({std::int64_t{t}, std::int64_t{-1}, bound, status_text(e)});
            out.checks["count_le_bound"].push_back(false);
            out.checks["stieltjes_inequality"].push_back(false);
        }
    });
    merge(report, outputs);
    return report;
}

ExperimentReport run_leastsing(const ExperimentConfig& cfg, std::shared_ptr<const VarianceProfile> profile) {
    ExperimentReport report;
    report.columns = {"trial", "sigma_min", "thresh_2_10", "thresh_2_3", "status"};
    const auto dist = EntryDistribution::make(cfg.dist);
    const double n = cfg.n;
    const double w = cfg.w;
    // Thresholds live in log space; the block-band one underflows doubles.
    const double log_t210 = std::log(cfg.epsilon) - std::pow(n, 3.0 * cfg.kappa) * n / w;
    const double log_t23 = is_block(cfg) ? -50.0 * (n / w) * std::log(w) : kNaN;
    report.scalars["log_thresh_2_10"] = log_t210;
    report.scalars["log_thresh_2_3"] = log_t23;
    std::vector<TrialOutput> outputs(cfg.trials);

    for_each_trial(cfg.trials, cfg.parallel, [&](int t) {
        auto& out = outputs[t];
        try {
            const auto s = sample(profile, dist, trial_seed(cfg, t));
            const double smin = least_singular(singular_values(shifted(s, cfg.z)));
            const double log_smin = std::log(smin);
            out.rows.push_back({std::int64_t{t}, smin, std::exp(log_t210), std::exp(log_t23), "ok"});
            out.checks["above_thresh_2_10"].push_back(log_smin > log_t210);
            if (is_block(cfg)) out.checks["above_thresh_2_3"].push_back(log_smin > log_t23);
        } catch (const std::exception& e) {
            out.rows.push_back({std::int64_t{t}, kNaN, std::exp(log_t210), std::exp(log_t23), status_text(e)});
            out.checks["above_thresh_2_10"].push_back(false);
            if (is_block(cfg)) out.checks["above_thresh_2_3"].push_back(false);
        }
    });
    merge(report, outputs);
    return report;
}

ExperimentReport run_replacement(const ExperimentConfig& cfg, std::shared_ptr<const VarianceProfile> profile) {
    ExperimentReport report;
    report.columns = {"trial", "delta", "kolmogorov", "status"};
    const auto dist = EntryDistribution::make(cfg.dist);
    std::vector<TrialOutput> outputs(cfg.trials);

    for_each_trial(cfg.trials, cfg.parallel, [&](int t) {
        auto& out = outputs[t];
        try {
            const auto x = sample(profile, dist, trial_seed(cfg, t));
            const auto g = gaussian_companion(x);
            const auto sx = singular_values(shifted(x, cfg.z));
            const auto sg = singular_values(shifted(g, cfg.z));
            const auto lx = log_det_avg(sx);
            const auto lg = log_det_avg(sg);
            const double ks = kolmogorov_distance(sx, sg);
            const bool singular = lx.singular || lg.singular;
            const double delta = singular ? std::numeric_limits<double>::infinity() : std::abs(lx.value - lg.value);
            out.rows.push_back({std::int64_t{t}, delta, ks, singular ? "singular_logdet" : "ok"});
        } catch (const std::exception& e) {
            out.rows.push_back({std::int64_t{t}, kNaN, kNaN, status_text(e)});
        }
    });
    merge(report, outputs);
    return report;
}

ExperimentReport run_normcond(const ExperimentConfig& cfg, std::shared_ptr<const VarianceProfile> profile) {
    ExperimentReport report;
    report.columns = {"y1_re", "y1_im", "y2_re", "y2_im", "norm", "method", "status"};
    ScanOptions opts;
    opts.parallel = cfg.parallel;
    const auto scan = scan_norm_condition(*profile, cfg.z, cfg.radius, cfg.grid_points, opts);
    for (const auto& p : scan.probes) {
        std::string status = p.status;
        std::replace(status.begin(), status.end(), ',', ';');
        report.rows.push_back({p.y1.real(), p.y1.imag(), p.y2.real(), p.y2.imag(), p.norm,
                               std::string(to_string(p.method)), status});
    }
    const double log_n = std::log(static_cast<double>(cfg.n));
    report.scalars["max_norm"] = scan.max_norm;
    report.scalars["max_norm_over_log2"] = scan.max_norm / (log_n * log_n);
    report.scalars["radius"] = cfg.radius;
    report.scalars["upper_bound"] = scan.upper_bound ? 1.0 : 0.0;
    return report;
}

ExperimentReport run_mc(const ExperimentConfig& cfg) {
    ExperimentReport report;
    report.columns = {"eta", "mc_re", "mc_im", "residual"};
    const auto etas = eta_values(cfg);
    for (const auto& s : mc_curve(cfg.z, etas))
        report.rows.push_back({s.w.imag(), s.mc.real(), s.mc.imag(), s.residual});
    return report;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::circlaw: return "circlaw";
        case ExperimentKind::locallaw: return "locallaw";
        case ExperimentKind::singcount: return "singcount";
        case ExperimentKind::leastsing: return "leastsing";
        case ExperimentKind::replacement: return "replacement";
        case ExperimentKind::normcond: return "normcond";
        case ExperimentKind::mc: return "mc";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_name(std::string_view name) {
    for (auto k : {ExperimentKind::circlaw, ExperimentKind::locallaw, ExperimentKind::singcount,
                   ExperimentKind::leastsing, ExperimentKind::replacement, ExperimentKind::normcond,
                   ExperimentKind::mc})
        if (to_string(k) == name) return k;
    throw UsageError("unknown experiment kind '" + std::string(name) + "'");
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    j["kind"] = std::string(bandlab::to_string(kind));
    j["n"] = n;
    j["w"] = w;
    j["profile"] = profile == ProfileKind::block_band  ? "block"
                   : profile == ProfileKind::circulant ? "circulant"
                                                       : "explicit";
    j["f"] = f;
    if (!profile_csv.empty()) j["profile-csv"] = profile_csv;
    j["dist"] = std::string(cli_name(dist));
    j["z-re"] = z.real();
    j["z-im"] = z.imag();
    j["trials"] = trials;
    j["seed"] = seed;
    if (eta.min) j["eta-min"] = *eta.min;
    if (eta.max) j["eta-max"] = *eta.max;
    j["eta-points"] = eta.points;
    j["gamma0"] = gamma0;
    j["kappa"] = kappa;
    j["epsilon"] = epsilon;
    j["eps-report"] = eps_report;
    j["radius"] = radius;
    j["grid-points"] = grid_points;
    j["spot-pairs"] = spot_pairs;
    j["serial"] = !parallel;
    if (!out.empty()) j["out"] = out;
    if (!plot.empty()) j["plot"] = plot;
    return j;
}

void validate_config(const ExperimentConfig& cfg) {
    auto fail = [](const std::string& msg) { throw UsageError(msg); };
    if (cfg.n < 1) fail("--n must be >= 1");
    if (cfg.w < 1) fail("--w must be >= 1");
    if (cfg.w > cfg.n) fail("--w must not exceed --n");
    if (cfg.trials < 1) fail("--trials must be >= 1");
    if (cfg.eta.points < 1) fail("--eta-points must be >= 1");
    if (cfg.eta.min && !(*cfg.eta.min > 0.0)) fail("--eta-min must be > 0");
    if (cfg.eta.max && !(*cfg.eta.max > 0.0)) fail("--eta-max must be > 0");
    if (!(cfg.radius >= 0.0)) fail("--radius must be >= 0");
    if (cfg.grid_points < 1) fail("--grid-points must be >= 1");
    if (cfg.spot_pairs < 0) fail("--spot-pairs must be >= 0");
    if (!(cfg.epsilon > 0.0)) fail("--epsilon must be > 0");

    if (cfg.kind != ExperimentKind::mc) {
        if (cfg.profile == ProfileKind::block_band && (cfg.n % cfg.w != 0 || cfg.n / cfg.w < 3))
            fail("--profile block needs --w dividing --n with n/w >= 3");
        if (cfg.profile == ProfileKind::circulant && cfg.n < 2 * cfg.w) fail("--profile circulant needs n >= 2w");
        if (cfg.profile == ProfileKind::explicit_matrix && cfg.profile_csv.empty())
            fail("--profile explicit needs --profile-csv");
    }

    const double z2 = std::norm(cfg.z);
    switch (cfg.kind) {
        case ExperimentKind::locallaw:
        case ExperimentKind::singcount:
        case ExperimentKind::normcond:
            if (!(z2 > 0.0 && z2 < 1.0)) fail(std::string(to_string(cfg.kind)) + " needs 0 < |z| < 1");
            break;
        default: break;
    }

    const auto dist = EntryDistribution::make(cfg.dist);
    const std::string kind(to_string(cfg.kind));
    switch (cfg.kind) {
        case ExperimentKind::circlaw:
            if (!is_block(cfg) && !(dist.bounded_density && dist.subgaussian))
                throw HypothesisError("circlaw with a non-block profile needs a subgaussian law with bounded density; '" +
                                      std::string(cli_name(cfg.dist)) + "' has none");
            if (is_block(cfg) && !dist.all_moments)
                throw HypothesisError("circlaw with a block profile needs all moments finite");
            break;
        case ExperimentKind::leastsing:
            if (!is_block(cfg) && !dist.bounded_density)
                throw HypothesisError("leastsing with a non-block profile needs a law with bounded density; '" +
                                      std::string(cli_name(cfg.dist)) + "' has none");
            break;
        case ExperimentKind::locallaw:
        case ExperimentKind::singcount:
        case ExperimentKind::replacement:
            if (!dist.all_moments) throw HypothesisError(kind + " needs all moments finite");
            break;
        default: break;
    }
}

std::vector<double> eta_values(const ExperimentConfig& cfg) {
    const double lo_default = std::pow(static_cast<double>(cfg.n), cfg.gamma0) / (static_cast<double>(cfg.w) * cfg.w);
    const double lo = cfg.eta.min.value_or(lo_default);
    const double hi = cfg.eta.max.value_or(10.0);
    if (!(lo > 0.0) || !(hi >= lo)) throw UsageError("eta grid needs 0 < eta-min <= eta-max");
    std::vector<double> out;
    if (cfg.eta.points == 1 || hi == lo) {
        out.push_back(hi);
        return out;
    }
    const double ratio = std::pow(lo / hi, 1.0 / (cfg.eta.points - 1));
    for (int k = 0; k < cfg.eta.points; ++k) out.push_back(k == cfg.eta.points - 1 ? lo : hi * std::pow(ratio, k));
    return out;
}

std::shared_ptr<const VarianceProfile> make_profile(const ExperimentConfig& cfg) {
    switch (cfg.profile) {
        case ProfileKind::block_band:
            return std::make_shared<const VarianceProfile>(VarianceProfile::block_band(cfg.n, cfg.w));
        case ProfileKind::circulant:
            return std::make_shared<const VarianceProfile>(
                VarianceProfile::circulant(cfg.n, cfg.w, ProfileFunction::from_name(cfg.f)));
        case ProfileKind::explicit_matrix: {
            auto p = VarianceProfile::load_csv(cfg.profile_csv, cfg.w);
            if (p.n() != cfg.n)
                throw UsageError("profile CSV has n=" + std::to_string(p.n()) + " but --n is " + std::to_string(cfg.n));
            return std::make_shared<const VarianceProfile>(std::move(p));
        }
    }
    throw UsageError("unknown profile kind");
}

ExperimentReport run(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const auto start = std::chrono::steady_clock::now();
    ExperimentReport report;
    if (cfg.kind == ExperimentKind::mc) {
        report = run_mc(cfg);
    } else {
        const auto profile = make_profile(cfg);
        const auto check = validate(*profile);
        if (!check.passed()) {
            std::ostringstream os;
            os << "profile fails validation:";
            for (const auto& c : check.checks)
                if (!c.passed) os << ' ' << c.name << " (" << c.measured << ")";
            throw UsageError(os.str());
        }
        switch (cfg.kind) {
            case ExperimentKind::circlaw: report = run_circlaw(cfg, profile); break;
            case ExperimentKind::locallaw: report = run_locallaw(cfg, profile); break;
            case ExperimentKind::singcount: report = run_singcount(cfg, profile); break;
            case ExperimentKind::leastsing: report = run_leastsing(cfg, profile); break;
            case ExperimentKind::replacement: report = run_replacement(cfg, profile); break;
            case ExperimentKind::normcond: report = run_normcond(cfg, profile); break;
            case ExperimentKind::mc: break;
        }
    }
    report.config = cfg;
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace bandlab
