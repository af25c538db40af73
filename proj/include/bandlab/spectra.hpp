#pragma once

#include "bandlab/common.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bandlab {

/// Singular values of Y, ascending. LAPACK divide-and-conquer SVD.
std::vector<double> singular_values(const CMatrix& y);

/// Ascending singular values plus right singular vectors (columns of V,
/// matched to the ascending order), so that Y^* Y = V diag(sigma^2) V^*.
struct SvdWithVectors {
    std::vector<double> sigma;
    CMatrix v;
};
SvdWithVectors singular_values_and_vectors(const CMatrix& y);

/// Eigenvalues of a general square matrix, unordered. Uses the real solver
/// when every entry is real.
std::vector<Complex> eigenvalues(const CMatrix& x);

/// Eigenvalues of a Hermitian matrix, ascending.
std::vector<double> hermitian_eigenvalues(const CMatrix& h);

struct HermitizedMatrix {
    CMatrix m;  // [[0, Y], [Y^*, 0]]
    Complex z;
};

HermitizedMatrix hermitize(const CMatrix& y, Complex z = {});

struct SpectralSummary {
    Complex z;
    std::vector<double> singular_values;
    std::optional<std::vector<Complex>> eigenvalues;
    std::string profile_kind;
    std::string dist;
    std::uint64_t seed = 0;
};

/// CSV index,sigma. When eigenvalues are present they go to
/// `eigen_path` as index,lambda_re,lambda_im.
void write_spectral_csv(const SpectralSummary& s, const std::string& sigma_path,
                        const std::string& eigen_path = {});

/// (1/n) sum 1 / (sigma_i^2 - i eta) = (1/n) Tr (Y^* Y - i eta)^{-1}.
Complex empirical_stieltjes(std::span<const double> svals, double eta);

/// Number of sigma_i <= threshold (closed interval).
std::size_t count_small_singulars(std::span<const double> svals, double threshold);

/// Smallest element of an ascending list.
double least_singular(std::span<const double> svals);

struct LogDet {
    double value = 0.0;  // (1/n) sum log sigma_i, or -inf
    bool singular = false;
};
LogDet log_det_avg(std::span<const double> svals);

/// sup_x |F_a(x) - F_b(x)| between two empirical CDFs (inputs ascending).
double kolmogorov_distance(std::span<const double> a, std::span<const double> b);

/// Kolmogorov distance between the empirical CDF of `sorted` and a
/// continuous CDF.
template <class Cdf>
double kolmogorov_to_cdf(std::span<const double> sorted, Cdf&& cdf) {
    if (sorted.empty()) throw EmptyInput("kolmogorov_to_cdf: empty sample");
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        const double f = cdf(sorted[k]);
        d = std::max(d, std::max(static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n));
    }
    return d;
}

struct CircularLawDistance {
    double radial = 0.0;   // vs F(r) = min(r^2, 1)
    double angular = 0.0;  // vs uniform on (-pi, pi]
};

CircularLawDistance circular_law_distance(std::span<const Complex> eigs);

}  // namespace bandlab
