#include "bandlab/kernels.hpp"
#include "bandlab/spectra.hpp"

#include <doctest.h>

#include <cmath>

using namespace bandlab;

TEST_CASE("fill_sample: parallel is bitwise equal to reference") {
    const auto c = VarianceProfile::circulant(96, 6, ProfileFunction::gauss());
    const auto b = VarianceProfile::block_band(96, 8);
    for (const auto* p : {&c, &b})
        for (auto tag : {DistTag::gaussian_real, DistTag::gaussian_complex, DistTag::uniform_real, DistTag::rademacher}) {
            CMatrix par, ref;
            kernels::parallel::fill_sample(*p, tag, 123, par);
            kernels::reference::fill_sample(*p, tag, 123, ref);
            CHECK(par == ref);
            CHECK(par(5, 7) == std::sqrt((*p)(5, 7)) * draw_entry(tag, 123, 5, 7));
        }
}

TEST_CASE("max_row_abs_sum") {
    CMatrix m = CMatrix::Random(77, 53);
    const double par = kernels::parallel::max_row_abs_sum(m);
    CHECK(par == kernels::reference::max_row_abs_sum(m));
    CHECK(par == doctest::Approx(m.cwiseAbs().rowwise().sum().maxCoeff()).epsilon(1e-14));
}

TEST_CASE("stieltjes_curve") {
    std::vector<double> sv(200);
    for (int k = 0; k < 200; ++k) sv[k] = 0.01 * k;
    const std::vector<double> etas{10.0, 1.0, 0.1, 1e-3};
    const auto par = kernels::parallel::stieltjes_curve(sv, etas);
    const auto ref = kernels::reference::stieltjes_curve(sv, etas);
    REQUIRE(par.size() == 4);
    for (int k = 0; k < 4; ++k) {
        CHECK(par[k] == ref[k]);
        CHECK(std::abs(par[k] - empirical_stieltjes(sv, etas[k])) <= 1e-13 * std::abs(par[k]));
    }
}

TEST_CASE("thread count") { CHECK(kernels::max_threads() >= 1); }
