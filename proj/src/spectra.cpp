#include "bandlab/spectra.hpp"

#include "csv_util.hpp"

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bandlab {

namespace {

[[noreturn]] void decomposition_failed(const char* routine, lapack_int info, Eigen::Index rows, Eigen::Index cols) {
    std::ostringstream os;
    os << routine << " failed (info=" << info << ") on a " << rows << "x" << cols << " matrix";
    throw DecompositionFailure(os.str());
}

bool all_real(const CMatrix& x) { return (x.array().imag() == 0.0).all(); }

}  // namespace

std::vector<double> singular_values(const CMatrix& y) {
    CMatrix a = y;
    const auto m = static_cast<lapack_int>(a.rows());
    const auto n = static_cast<lapack_int>(a.cols());
    std::vector<double> s(std::min(m, n));
    if (s.empty()) return s;
    lapack_complex_double dummy{};
    const lapack_int info =
        LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', m, n, a.data(), m, s.data(), &dummy, 1, &dummy, 1);
    if (info != 0) decomposition_failed("zgesdd", info, m, n);
    std::reverse(s.begin(), s.end());
    return s;
}

SvdWithVectors singular_values_and_vectors(const CMatrix& y) {
    if (y.rows() != y.cols()) throw DimensionMismatch("singular_values_and_vectors needs a square matrix");
    CMatrix a = y;
    const auto n = static_cast<lapack_int>(a.rows());
    SvdWithVectors out;
    out.sigma.resize(n);
    CMatrix u(n, n), vt(n, n);
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', n, n, a.data(), n, out.sigma.data(), u.data(), n,
                                           vt.data(), n);
    if (info != 0) decomposition_failed("zgesdd", info, n, n);
    std::reverse(out.sigma.begin(), out.sigma.end());
    out.v = vt.adjoint().rowwise().reverse();
    return out;
}

std::vector<Complex> eigenvalues(const CMatrix& x) {
    if (x.rows() != x.cols()) throw DimensionMismatch("eigenvalues needs a square matrix");
    const auto n = static_cast<lapack_int>(x.rows());
    std::vector<Complex> out(n);
    if (n == 0) return out;
    if (all_real(x)) {
        RMatrix a = x.real();
        std::vector<double> wr(n), wi(n);
        double dummy = 0.0;
        const lapack_int info =
            LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, wr.data(), wi.data(), &dummy, 1, &dummy, 1);
        if (info != 0) decomposition_failed("dgeev", info, n, n);
        for (lapack_int k = 0; k < n; ++k) out[k] = {wr[k], wi[k]};
        return out;
    }
    CMatrix a = x;
    lapack_complex_double dummy{};
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, a.data(), n, out.data(), &dummy, 1, &dummy, 1);
    if (info != 0) decomposition_failed("zgeev", info, n, n);
    return out;
}

std::vector<double> hermitian_eigenvalues(const CMatrix& h) {
    if (h.rows() != h.cols()) throw DimensionMismatch("hermitian_eigenvalues needs a square matrix");
    CMatrix a = h;
    const auto n = static_cast<lapack_int>(a.rows());
    std::vector<double> w(n);
    if (n == 0) return w;
    const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', n, a.data(), n, w.data());
    if (info != 0) decomposition_failed("zheevd", info, n, n);
    return w;
}

HermitizedMatrix hermitize(const CMatrix& y, Complex z) {
    const auto n = y.rows();
    if (y.cols() != n) throw DimensionMismatch("hermitize needs a square matrix");
    HermitizedMatrix h;
    h.z = z;
    h.m = CMatrix::Zero(2 * n, 2 * n);
    h.m.topRightCorner(n, n) = y;
    h.m.bottomLeftCorner(n, n) = y.adjoint();
    return h;
}

void write_spectral_csv(const SpectralSummary& s, const std::string& sigma_path, const std::string& eigen_path) {
    using detail::format_double;
    {
        auto os = detail::open_for_write(sigma_path);
        os << "index,sigma\n";
        for (std::size_t k = 0; k < s.singular_values.size(); ++k)
            os << k << ',' << format_double(s.singular_values[k]) << '\n';
        detail::check_written(os, sigma_path);
    }
    if (s.eigenvalues && !eigen_path.empty()) {
        auto os = detail::open_for_write(eigen_path);
        os << "index,lambda_re,lambda_im\n";
        for (std::size_t k = 0; k < s.eigenvalues->size(); ++k)
            os << k << ',' << format_double((*s.eigenvalues)[k].real()) << ','
               << format_double((*s.eigenvalues)[k].imag()) << '\n';
        detail::check_written(os, eigen_path);
    }
}

Complex empirical_stieltjes(std::span<const double> svals, double eta) {
    if (svals.empty()) throw EmptyInput("empirical_stieltjes: no singular values");
    Complex sum{};
    for (double s : svals) sum += 1.0 / Complex(s * s, -eta);
    return sum / static_cast<double>(svals.size());
}

std::size_t count_small_singulars(std::span<const double> svals, double threshold) {
    return static_cast<std::size_t>(std::count_if(svals.begin(), svals.end(), [&](double s) { return s <= threshold; }));
}

double least_singular(std::span<const double> svals) {
    if (svals.empty()) throw EmptyInput("least_singular: no singular values");
    return svals.front();
}

LogDet log_det_avg(std::span<const double> svals) {
    if (svals.empty()) throw EmptyInput("log_det_avg: no singular values");
    LogDet r;
    double sum = 0.0;
    for (double s : svals) {
        if (!(s > 0.0)) {
            r.singular = true;
            r.value = -std::numeric_limits<double>::infinity();
            return r;
        }
        sum += std::log(s);
    }
    r.value = sum / static_cast<double>(svals.size());
    return r;
}

double kolmogorov_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw EmptyInput("kolmogorov_distance: empty input");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    // Between jump points both CDFs are constant, so checking the value right
    // after each jump (all ties consumed) covers both one-sided limits.
    while (i < a.size() || j < b.size()) {
        double x;
        if (j == b.size() || (i < a.size() && a[i] <= b[j]))
            x = a[i];
        else
            x = b[j];
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

CircularLawDistance circular_law_distance(std::span<const Complex> eigs) {
    if (eigs.empty()) throw EmptyInput("circular_law_distance: no eigenvalues");
    std::vector<double> radii, angles;
    radii.reserve(eigs.size());
    angles.reserve(eigs.size());
    for (const auto& l : eigs) {
        radii.push_back(std::abs(l));
        double a = std::arg(l);
        if (a == -std::numbers::pi) a = std::numbers::pi;  // arg in (-pi, pi]
        angles.push_back(a);
    }
    std::sort(radii.begin(), radii.end());
    std::sort(angles.begin(), angles.end());
    CircularLawDistance d;
    d.radial = kolmogorov_to_cdf(radii, [](double r) { return std::min(r * r, 1.0); });
    d.angular = kolmogorov_to_cdf(angles, [](double t) {
        return std::clamp((t + std::numbers::pi) / (2.0 * std::numbers::pi), 0.0, 1.0);
    });
    return d;
}

}  // namespace bandlab
