#pragma once

#include "bandlab/common.hpp"
#include "bandlab/profile.hpp"

#include <cstdint>
#include <memory>
#include <string_view>

namespace bandlab {

enum class DistTag { gaussian_real, gaussian_complex, uniform_real, rademacher };

/// Mean 0, E|x|^2 = 1 entry law with its density and tail flags.
struct EntryDistribution {
    DistTag tag = DistTag::gaussian_real;
    bool bounded_density = true;
    bool subgaussian = true;
    bool all_moments = true;
    bool complex_valued = false;

    static EntryDistribution make(DistTag tag);
    /// CLI spelling: gaussian, cgaussian, uniform, rademacher.
    static EntryDistribution from_name(std::string_view name);
};

std::string_view to_string(DistTag tag);
std::string_view cli_name(DistTag tag);

/// Unit-variance draw for entry (i, j) of the matrix seeded by `seed`.
Complex draw_entry(DistTag tag, std::uint64_t seed, int i, int j);

/// One realization X = (b_ij x_ij). The profile is shared read-only.
struct MatrixSample {
    std::shared_ptr<const VarianceProfile> profile;
    EntryDistribution dist;
    std::uint64_t seed = 0;
    CMatrix matrix;

    int n() const { return static_cast<int>(matrix.rows()); }
};

MatrixSample sample(std::shared_ptr<const VarianceProfile> p, const EntryDistribution& d,
                    std::uint64_t seed);

inline constexpr std::uint64_t kCompanionSeedMask = 0x5DEECE66DA3B1F27ull;

/// Gaussian model with the same profile: gaussian_complex for complex
/// samples, gaussian_real otherwise, seeded with seed ^ kCompanionSeedMask.
MatrixSample gaussian_companion(const MatrixSample& s);

/// Y_z = X - z I.
CMatrix shifted(const MatrixSample& s, Complex z);
CMatrix shifted(const CMatrix& x, Complex z);

}  // namespace bandlab
