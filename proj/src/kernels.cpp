#include "bandlab/kernels.hpp"

#include <algorithm>
#include <cmath>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace bandlab::kernels {

int max_threads() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

// Column-major storage: filling column j touches contiguous memory.
inline void fill_column(const VarianceProfile& p, DistTag tag, std::uint64_t seed, CMatrix& out, int j) {
    const int n = p.n();
    for (int i = 0; i < n; ++i) {
        const double s = p(i, j);
        out(i, j) = s > 0.0 ? std::sqrt(s) * draw_entry(tag, seed, i, j) : Complex{};
    }
}

inline double row_abs_sum(const CMatrix& m, Eigen::Index i) {
    double sum = 0.0;
    for (Eigen::Index k = 0; k < m.cols(); ++k) sum += std::abs(m(i, k));
    return sum;
}

inline Complex stieltjes_point(std::span<const double> svals, double eta) {
    Complex sum{};
    for (double s : svals) sum += 1.0 / Complex(s * s, -eta);
    return sum / static_cast<double>(svals.size());
}

}  // namespace

namespace parallel {

void fill_sample(const VarianceProfile& p, DistTag tag, std::uint64_t seed, CMatrix& out) {
    const int n = p.n();
    out.resize(n, n);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < n; ++j) fill_column(p, tag, seed, out, j);
}

double max_row_abs_sum(const CMatrix& m) {
    double best = 0.0;
    const auto rows = static_cast<long>(m.rows());
#pragma omp parallel for reduction(max : best) schedule(static)
    for (long i = 0; i < rows; ++i) best = std::max(best, row_abs_sum(m, i));
    return best;
}

std::vector<Complex> stieltjes_curve(std::span<const double> svals, std::span<const double> etas) {
    std::vector<Complex> out(etas.size());
    const auto count = static_cast<long>(etas.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < count; ++k) out[k] = stieltjes_point(svals, etas[k]);
    return out;
}

}  // namespace parallel

namespace reference {

void fill_sample(const VarianceProfile& p, DistTag tag, std::uint64_t seed, CMatrix& out) {
    const int n = p.n();
    out.resize(n, n);
    for (int j = 0; j < n; ++j) fill_column(p, tag, seed, out, j);
}

double max_row_abs_sum(const CMatrix& m) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) best = std::max(best, row_abs_sum(m, i));
    return best;
}

std::vector<Complex> stieltjes_curve(std::span<const double> svals, std::span<const double> etas) {
    std::vector<Complex> out;
    out.reserve(etas.size());
    for (double eta : etas) out.push_back(stieltjes_point(svals, eta));
    return out;
}

}  // namespace reference

}  // namespace bandlab::kernels
