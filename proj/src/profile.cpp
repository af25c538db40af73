#include "bandlab/profile.hpp"

#include "bandlab/kernels.hpp"
#include "csv_util.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>

namespace bandlab {

namespace {

int graph_distance(int a, int b, int n) {
    const int d = std::abs(a - b) % n;
    return std::min(d, n - d);
}

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Unnormalized DFT, sign = FFTW_FORWARD (e^{-ipx}) or FFTW_BACKWARD.
std::vector<Complex> dft(std::vector<Complex> in, int sign) {
    const int n = static_cast<int>(in.size());
    std::vector<Complex> out(in.size());
    auto* src = reinterpret_cast<fftw_complex*>(in.data());
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, src, dst, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    return out;
}

CMatrix invert_checked(const CMatrix& m, double condition_cap, const char* what) {
    Eigen::PartialPivLU<CMatrix> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > condition_cap) {
        std::ostringstream os;
        os << what << ": operator is singular or ill-conditioned (rcond " << rcond << ")";
        throw SingularOperator(os.str());
    }
    return lu.inverse();
}

}  // namespace

std::string_view to_string(ProfileKind kind) {
    switch (kind) {
        case ProfileKind::block_band: return "block_band";
        case ProfileKind::circulant: return "circulant";
        case ProfileKind::explicit_matrix: return "explicit";
    }
    return "unknown";
}

std::string_view to_string(NormMethod method) {
    switch (method) {
        case NormMethod::dense: return "dense";
        case NormMethod::circulant_fast: return "circulant_fast";
        case NormMethod::block_fast: return "block_fast";
    }
    return "unknown";
}

ProfileFunction ProfileFunction::indicator() {
    return {[](double x) { return (x >= 0.0 && x <= 1.0) ? 1.0 : 0.0; }, 1.0, "indicator"};
}

ProfileFunction ProfileFunction::gauss() {
    return {[](double x) { return std::exp(-0.5 * x * x); }, std::nullopt, "gauss"};
}

ProfileFunction ProfileFunction::from_name(std::string_view name) {
    if (name == "indicator") return indicator();
    if (name == "gauss") return gauss();
    throw UsageError("unknown profile function '" + std::string(name) + "' (expected indicator|gauss)");
}

VarianceProfile VarianceProfile::block_band(int n, int w) {
    if (n <= 0 || w <= 0 || n % w != 0 || n / w < 3) {
        std::ostringstream os;
        os << "block band profile needs w | n and n/w >= 3 (n=" << n << ", w=" << w << ")";
        throw DimensionMismatch(os.str());
    }
    VarianceProfile p;
    p.n_ = n;
    p.w_ = w;
    p.kind_ = ProfileKind::block_band;
    p.description_ = "block_band";
    const int blocks = n / w;
    const double value = 1.0 / (3.0 * w);
    p.entries_ = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (graph_distance(i / w, j / w, blocks) <= 1) p.entries_(i, j) = value;
    p.finish();
    return p;
}

VarianceProfile VarianceProfile::circulant(int n, int w, const ProfileFunction& f) {
    if (n <= 0 || w <= 0 || n < 2 * w) {
        std::ostringstream os;
        os << "circulant profile needs n >= 2w (n=" << n << ", w=" << w << ")";
        throw DimensionMismatch(os.str());
    }
    std::vector<double> row(n);
    double total = 0.0;
    for (int b = 0; b < n; ++b) {
        const double x = static_cast<double>(std::min(b, n - b)) / w;
        const double v = f.evaluator(x);
        if (!(v >= 0.0)) throw DegenerateProfile("profile function is negative or NaN at x=" + std::to_string(x));
        row[b] = v / w;
        total += row[b];
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw DegenerateProfile("profile function '" + f.description + "' has no mass on the lattice");
    for (auto& v : row) v /= total;

    VarianceProfile p;
    p.n_ = n;
    p.w_ = w;
    p.kind_ = ProfileKind::circulant;
    p.description_ = "circulant/" + f.description;
    p.row_ = std::move(row);
    p.finish();
    return p;
}

VarianceProfile VarianceProfile::explicit_matrix(RMatrix entries, int w) {
    if (entries.rows() != entries.cols() || entries.rows() == 0)
        throw DimensionMismatch("explicit profile must be a nonempty square matrix");
    if (w <= 0 || w > entries.rows()) throw DimensionMismatch("explicit profile needs 1 <= w <= n");
    VarianceProfile p;
    p.n_ = static_cast<int>(entries.rows());
    p.w_ = w;
    p.kind_ = ProfileKind::explicit_matrix;
    p.description_ = "explicit";
    p.entries_ = std::move(entries);
    p.finish();
    return p;
}

VarianceProfile VarianceProfile::load_csv(const std::string& path, int w) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open profile CSV '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.find_first_not_of(" \r\t") == std::string::npos) continue;
        std::vector<double> row;
        for (const auto& cell : detail::split_csv_line(line)) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument(cell);
            } catch (const std::exception&) {
                throw IoError("profile CSV '" + path + "': bad number '" + cell + "' on row " +
                              std::to_string(rows.size() + 1));
            }
        }
        rows.push_back(std::move(row));
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    RMatrix s(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[i].size()) != n)
            throw DimensionMismatch("profile CSV '" + path + "' is not square");
        for (Eigen::Index j = 0; j < n; ++j) s(i, j) = rows[i][j];
    }
    return explicit_matrix(std::move(s), w);
}

void VarianceProfile::finish() {
    double max_entry = 0.0;
    if (kind_ == ProfileKind::circulant)
        max_entry = *std::max_element(row_.begin(), row_.end());
    else
        max_entry = entries_.maxCoeff();
    cw_ = max_entry * w_;
}

double VarianceProfile::operator()(int i, int j) const {
    if (kind_ == ProfileKind::circulant) return row_[((j - i) % n_ + n_) % n_];
    return entries_(i, j);
}

const std::vector<double>& VarianceProfile::circulant_row() const {
    if (kind_ != ProfileKind::circulant) throw DomainError("circulant_row: profile is not circulant");
    return row_;
}

RMatrix VarianceProfile::dense() const {
    if (kind_ != ProfileKind::circulant) return entries_;
    RMatrix s(n_, n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s(i, j) = (*this)(i, j);
    return s;
}

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const ProfileCheck& c) { return c.passed; });
}

const ProfileCheck& ValidationReport::at(std::string_view name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw std::out_of_range("no validation check named '" + std::string(name) + "'");
}

ValidationReport validate(const VarianceProfile& p) {
    const int n = p.n();
    const RMatrix s = p.dense();
    ValidationReport r;

    const double min_entry = s.minCoeff();
    r.checks.push_back({"nonnegative", min_entry >= 0.0, min_entry});

    const double row_defect = (s.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double col_defect = (s.colwise().sum().array() - 1.0).abs().maxCoeff();
    r.checks.push_back({"row_sum", row_defect <= kStochasticTolerance, row_defect});
    r.checks.push_back({"col_sum", col_defect <= kStochasticTolerance, col_defect});

    const double ratio = s.maxCoeff() * p.w();
    r.checks.push_back({"bandwidth", ratio <= p.cw() * (1.0 + 1e-12), ratio});

    if (p.kind() == ProfileKind::circulant) {
        double defect = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                defect = std::max({defect, std::abs(s(i, j) - s(j, i)), std::abs(s(i, j) - s(0, ((j - i) % n + n) % n))});
        r.checks.push_back({"circulant_symmetry", defect == 0.0, defect});
    } else {
        r.checks.push_back({"circulant_symmetry", true, 0.0});
    }

    if (p.kind() == ProfileKind::block_band) {
        const int w = p.w();
        bool ok = n % w == 0 && n / w >= 3;
        double defect = ok ? 0.0 : 1.0;
        if (ok) {
            const int blocks = n / w;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    const double expect = graph_distance(i / w, j / w, blocks) <= 1 ? 1.0 / (3.0 * w) : 0.0;
                    defect = std::max(defect, std::abs(s(i, j) - expect));
                }
            ok = defect == 0.0;
        }
        r.checks.push_back({"block_pattern", ok, defect});
    } else {
        r.checks.push_back({"block_pattern", true, 0.0});
    }

    // Largest c with S_ij >= c/W for all |i-j|_N <= cW.
    double prefix_min = std::numeric_limits<double>::infinity();
    double best_c = 0.0;
    for (int d = 0; d <= n / 2; ++d) {
        double m = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) m = std::min({m, s(i, (i + d) % n), s(i, (i - d + n) % n)});
        prefix_min = std::min(prefix_min, m * p.w());
        const double lo = static_cast<double>(d) / p.w();
        if (prefix_min < lo) break;
        best_c = std::max(best_c, std::min(prefix_min, static_cast<double>(d + 1) / p.w()));
    }
    r.checks.push_back({"diagonal_band_mass", true, best_c});
    return r;
}

double inverse_norm_dense(const VarianceProfile& p, Complex y1, Complex y2, const NormOptions& opts) {
    const int n = p.n();
    const CMatrix s = p.dense().cast<Complex>();
    CMatrix m = CMatrix::Identity(2 * n, 2 * n);
    m.topLeftCorner(n, n) -= y2 * s;
    m.topRightCorner(n, n) -= y1 * s.transpose();
    m.bottomLeftCorner(n, n) -= y1 * s;
    m.bottomRightCorner(n, n) -= y2 * s.transpose();
    return kernels::parallel::max_row_abs_sum(invert_checked(m, opts.condition_cap, "inverse_norm_dense"));
}

double resolvent_norm_dense(const VarianceProfile& p, Complex y, const NormOptions& opts) {
    const int n = p.n();
    const CMatrix m = CMatrix::Identity(n, n) - y * p.dense().cast<Complex>();
    return kernels::parallel::max_row_abs_sum(invert_checked(m, opts.condition_cap, "resolvent_norm_dense"));
}

std::vector<Complex> circulant_resolvent_row(const VarianceProfile& p, Complex y, const NormOptions& opts) {
    const auto& row = p.circulant_row();
    const int n = p.n();
    std::vector<Complex> out(n, Complex{});
    if (y == Complex{}) {
        out[0] = 1.0;
        return out;
    }
    std::vector<Complex> symbol = dft(std::vector<Complex>(row.begin(), row.end()), FFTW_FORWARD);
    double gap = std::numeric_limits<double>::infinity();
    for (auto& v : symbol) {
        const Complex d = 1.0 - y * v;
        gap = std::min(gap, std::abs(d));
        v = 1.0 / d;
    }
    if (!(gap >= opts.spectrum_margin)) {
        std::ostringstream os;
        os << "circulant resolvent: min |1 - y S^(p)| = " << gap << " below margin " << opts.spectrum_margin
           << " (y=" << y << ")";
        throw SpectrumProximity(os.str());
    }
    out = dft(std::move(symbol), FFTW_BACKWARD);
    for (auto& v : out) v /= static_cast<double>(n);
    return out;
}

double inverse_norm_circulant_fast(const VarianceProfile& p, Complex y1, Complex y2, const NormOptions& opts) {
    if (p.kind() != ProfileKind::circulant) throw DomainError("inverse_norm_circulant_fast: profile is not circulant");
    const auto prow = circulant_resolvent_row(p, y1 + y2, opts);
    const auto qrow = circulant_resolvent_row(p, y2 - y1, opts);
    double sum = 0.0;
    for (std::size_t x = 0; x < prow.size(); ++x) sum += std::abs(prow[x] + qrow[x]) + std::abs(prow[x] - qrow[x]);
    return 0.5 * sum;
}

double inverse_norm_block_fast(const VarianceProfile& p, Complex y, const NormOptions& opts) {
    if (p.kind() != ProfileKind::block_band) throw DomainError("inverse_norm_block_fast: profile is not block band");
    const int blocks = p.n() / p.w();
    CMatrix d = CMatrix::Zero(blocks, blocks);
    for (int t = 0; t < blocks; ++t) {
        d(t, t) += 1.0 - y / 3.0;
        d(t, (t + 1) % blocks) += -y / 3.0;
        d(t, (t + blocks - 1) % blocks) += -y / 3.0;
    }
    // (I - yS)^{-1} = I + (D^{-1} - I) (x) P with P the block averaging
    // projector, so 1 + ||D^{-1} - I|| is a bound; 1 + ||D^{-1}|| alone is not
    // when Re D^{-1}_tt < 1/2.
    const CMatrix dinv = invert_checked(d, opts.condition_cap, "inverse_norm_block_fast");
    const double shifted_norm = kernels::parallel::max_row_abs_sum(dinv - CMatrix::Identity(blocks, blocks));
    return 1.0 + std::max(kernels::parallel::max_row_abs_sum(dinv), shifted_norm);
}

NormConditionReport scan_norm_condition(const VarianceProfile& p, Complex z, double radius, int grid_points,
                                        const ScanOptions& opts) {
    const double z2 = std::norm(z);
    if (!(z2 > 0.0 && z2 < 1.0)) throw DomainError("scan_norm_condition needs 0 < |z| < 1");
    if (!(radius >= 0.0) || grid_points < 1) throw DomainError("scan_norm_condition needs radius >= 0 and grid_points >= 1");

    NormMethod method = p.kind() == ProfileKind::circulant ? NormMethod::circulant_fast : NormMethod::dense;
    if (opts.method) method = *opts.method;

    std::vector<double> offsets;
    if (radius == 0.0 || grid_points == 1) {
        offsets.push_back(0.0);
    } else {
        for (int k = 0; k < grid_points; ++k) offsets.push_back(-radius + 2.0 * radius * k / (grid_points - 1));
    }
    const Complex y1c{-(1.0 - z2), 0.0};
    const Complex y2c{-z2, 0.0};

    NormConditionReport report;
    report.z = z;
    report.radius = radius;
    report.upper_bound = method == NormMethod::block_fast;
    for (double a : offsets)
        for (double b : offsets)
            for (double c : offsets)
                for (double d : offsets) {
                    NormProbe probe;
                    probe.y1 = y1c + Complex{a, b};
                    probe.y2 = y2c + Complex{c, d};
                    probe.method = method;
                    report.probes.push_back(probe);
                }

    auto evaluate = [&](NormProbe& probe) {
        try {
            switch (method) {
                case NormMethod::dense: probe.norm = inverse_norm_dense(p, probe.y1, probe.y2, opts.norm); break;
                case NormMethod::circulant_fast:
                    probe.norm = inverse_norm_circulant_fast(p, probe.y1, probe.y2, opts.norm);
                    break;
                case NormMethod::block_fast:
                    // |p + q|/2 + |p - q|/2 <= |p| + |q| entrywise, so the two
                    // decoupled bounds add.
                    probe.norm = inverse_norm_block_fast(p, probe.y1 + probe.y2, opts.norm) +
                                 inverse_norm_block_fast(p, probe.y2 - probe.y1, opts.norm);
                    break;
            }
        } catch (const Error& e) {
            probe.ok = false;
            probe.norm = std::numeric_limits<double>::quiet_NaN();
            probe.status = std::string("failed: ") + e.what();
        }
    };

    const auto count = static_cast<long>(report.probes.size());
    if (opts.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (long k = 0; k < count; ++k) evaluate(report.probes[k]);
    } else {
        for (long k = 0; k < count; ++k) evaluate(report.probes[k]);
    }

    for (const auto& probe : report.probes)
        if (probe.ok) report.max_norm = std::max(report.max_norm, probe.norm);
    return report;
}

void write_norm_csv(const NormConditionReport& report, const std::string& path) {
    auto os = detail::open_for_write(path);
    os << "y1_re,y1_im,y2_re,y2_im,norm,method,status\n";
    using detail::format_double;
    for (const auto& pr : report.probes) {
        std::string status = pr.status;
        std::replace(status.begin(), status.end(), ',', ';');
        os << format_double(pr.y1.real()) << ',' << format_double(pr.y1.imag()) << ',' << format_double(pr.y2.real())
           << ',' << format_double(pr.y2.imag()) << ',' << format_double(pr.norm) << ',' << to_string(pr.method) << ','
           << status << '\n';
    }
    detail::check_written(os, path);
}

}  // namespace bandlab
