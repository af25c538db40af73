#include "bandlab/ensemble.hpp"

#include "bandlab/kernels.hpp"
#include "bandlab/rng.hpp"

#include <cmath>

namespace bandlab {

EntryDistribution EntryDistribution::make(DistTag tag) {
    EntryDistribution d;
    d.tag = tag;
    d.complex_valued = tag == DistTag::gaussian_complex;
    d.bounded_density = tag != DistTag::rademacher;
    return d;
}

EntryDistribution EntryDistribution::from_name(std::string_view name) {
    if (name == "gaussian") return make(DistTag::gaussian_real);
    if (name == "cgaussian") return make(DistTag::gaussian_complex);
    if (name == "uniform") return make(DistTag::uniform_real);
    if (name == "rademacher") return make(DistTag::rademacher);
    throw UsageError("unknown distribution '" + std::string(name) + "' (expected gaussian|cgaussian|uniform|rademacher)");
}

std::string_view to_string(DistTag tag) {
    switch (tag) {
        case DistTag::gaussian_real: return "gaussian_real";
        case DistTag::gaussian_complex: return "gaussian_complex";
        case DistTag::uniform_real: return "uniform_real";
        case DistTag::rademacher: return "rademacher";
    }
    return "unknown";
}

std::string_view cli_name(DistTag tag) {
    switch (tag) {
        case DistTag::gaussian_real: return "gaussian";
        case DistTag::gaussian_complex: return "cgaussian";
        case DistTag::uniform_real: return "uniform";
        case DistTag::rademacher: return "rademacher";
    }
    return "unknown";
}

Complex draw_entry(DistTag tag, std::uint64_t seed, int i, int j) {
    EntryStream rng(seed, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
    switch (tag) {
        case DistTag::gaussian_real: return {rng.normal(), 0.0};
        case DistTag::gaussian_complex: {
            const double re = rng.normal();
            const double im = rng.normal();
            return Complex{re, im} * M_SQRT1_2;
        }
        case DistTag::uniform_real: return {std::sqrt(3.0) * (2.0 * rng.uniform() - 1.0), 0.0};
        case DistTag::rademacher: return {(rng() >> 63) ? 1.0 : -1.0, 0.0};
    }
    return {};
}

MatrixSample sample(std::shared_ptr<const VarianceProfile> p, const EntryDistribution& d, std::uint64_t seed) {
    MatrixSample s;
    s.dist = d;
    s.seed = seed;
    kernels::parallel::fill_sample(*p, d.tag, seed, s.matrix);
    s.profile = std::move(p);
    return s;
}

MatrixSample gaussian_companion(const MatrixSample& s) {
    const auto d = EntryDistribution::make(s.dist.complex_valued ? DistTag::gaussian_complex : DistTag::gaussian_real);
    return sample(s.profile, d, s.seed ^ kCompanionSeedMask);
}

CMatrix shifted(const CMatrix& x, Complex z) {
    CMatrix y = x;
    y.diagonal().array() -= z;
    return y;
}

CMatrix shifted(const MatrixSample& s, Complex z) { return shifted(s.matrix, z); }

}  // namespace bandlab
