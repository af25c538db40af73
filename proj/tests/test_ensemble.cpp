#include "bandlab/ensemble.hpp"

#include <doctest.h>

#include <cmath>

using namespace bandlab;

namespace {

std::shared_ptr<const VarianceProfile> block(int n, int w) {
    return std::make_shared<const VarianceProfile>(VarianceProfile::block_band(n, w));
}

struct Moments {
    Complex mean;
    double var = 0.0;  // E|x|^2 - |E x|^2
    Complex second;    // E x^2
    std::size_t count = 0;
};

Moments pooled_moments(DistTag tag, int draws_per_seed, int seeds) {
    Complex s1{}, s2{};
    double sa = 0.0;
    std::size_t count = 0;
    for (int seed = 0; seed < seeds; ++seed)
        for (int k = 0; k < draws_per_seed; ++k) {
            const Complex x = draw_entry(tag, static_cast<std::uint64_t>(seed), k / 1000, k % 1000);
            s1 += x;
            s2 += x * x;
            sa += std::norm(x);
            ++count;
        }
    Moments m;
    m.count = count;
    m.mean = s1 / double(count);
    m.second = s2 / double(count);
    m.var = sa / double(count) - std::norm(m.mean);
    return m;
}

}  // namespace

TEST_CASE("distribution flags") {
    CHECK_FALSE(EntryDistribution::make(DistTag::rademacher).bounded_density);
    for (auto tag : {DistTag::gaussian_real, DistTag::gaussian_complex, DistTag::uniform_real, DistTag::rademacher}) {
        const auto d = EntryDistribution::make(tag);
        CHECK(d.subgaussian);
        CHECK(d.all_moments);
        CHECK(d.complex_valued == (tag == DistTag::gaussian_complex));
        CHECK(EntryDistribution::from_name(cli_name(tag)).tag == tag);
    }
    CHECK(EntryDistribution::make(DistTag::uniform_real).bounded_density);
    CHECK_THROWS_AS(EntryDistribution::from_name("cauchy"), UsageError);
}

TEST_CASE("sample is deterministic") {
    const auto p = block(24, 4);
    const auto d = EntryDistribution::make(DistTag::gaussian_complex);
    const auto a = sample(p, d, 7);
    const auto b = sample(p, d, 7);
    CHECK(a.matrix == b.matrix);
    CHECK(a.n() == 24);
    CHECK(sample(p, d, 8).matrix != a.matrix);
}

TEST_CASE("entries vanish exactly where S does") {
    const auto p = block(12, 2);
    REQUIRE((*p)(0, 5) == 0.0);
    for (auto tag : {DistTag::gaussian_real, DistTag::uniform_real, DistTag::rademacher}) {
        const auto s = sample(p, EntryDistribution::make(tag), 3);
        CHECK(s.matrix(0, 5) == Complex(0.0, 0.0));
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < 12; ++j) {
                if ((*p)(i, j) == 0.0) CHECK(s.matrix(i, j) == Complex(0.0, 0.0));
                CHECK(s.matrix(i, j).imag() == 0.0);
            }
    }
}

TEST_CASE("rademacher and uniform supports") {
    const auto p = block(12, 2);
    const double b = std::sqrt(1.0 / 6.0);
    const auto r = sample(p, EntryDistribution::make(DistTag::rademacher), 5);
    const auto u = sample(p, EntryDistribution::make(DistTag::uniform_real), 5);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            if ((*p)(i, j) == 0.0) continue;
            CHECK(std::abs(std::abs(r.matrix(i, j).real()) - b) <= 1e-15);
            CHECK(std::abs(u.matrix(i, j).real()) <= std::sqrt(3.0) * b);
        }
}

TEST_CASE("moment sanity over 10^6 pooled draws") {
    for (auto tag : {DistTag::gaussian_real, DistTag::gaussian_complex, DistTag::uniform_real, DistTag::rademacher}) {
        const auto m = pooled_moments(tag, 100000, 10);
        CAPTURE(to_string(tag));
        CHECK(m.count == 1000000);
        CHECK(std::abs(m.mean) <= 0.01);
        CHECK(std::abs(m.var - 1.0) <= 0.02);
        if (tag == DistTag::gaussian_complex) CHECK(std::abs(m.second) <= 0.02);
    }
}

TEST_CASE("pooled variance of normalized circulant samples") {
    const auto p = std::make_shared<const VarianceProfile>(
        VarianceProfile::circulant(512, 32, ProfileFunction::indicator()));
    const auto d = EntryDistribution::make(DistTag::gaussian_real);
    double sum = 0.0, sumsq = 0.0;
    std::size_t count = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto s = sample(p, d, seed);
        for (int i = 0; i < 512; ++i)
            for (int j = 0; j < 512; ++j) {
                const double sij = (*p)(i, j);
                if (sij <= 0.0) continue;
                const double x = s.matrix(i, j).real() / std::sqrt(sij);
                sum += x;
                sumsq += x * x;
                ++count;
            }
    }
    const double mean = sum / double(count);
    const double var = sumsq / double(count) - mean * mean;
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gaussian companion") {
    const auto p = block(24, 4);
    const auto r = sample(p, EntryDistribution::make(DistTag::rademacher), 11);
    const auto g = gaussian_companion(r);
    CHECK(g.dist.tag == DistTag::gaussian_real);
    CHECK(g.seed == (11 ^ kCompanionSeedMask));
    CHECK(g.profile == r.profile);
    CHECK(gaussian_companion(r).matrix == g.matrix);
    const auto c = sample(p, EntryDistribution::make(DistTag::gaussian_complex), 11);
    CHECK(gaussian_companion(c).dist.tag == DistTag::gaussian_complex);
    CHECK(gaussian_companion(c).matrix != c.matrix);
}

TEST_CASE("shifted") {
    const auto s = sample(block(12, 2), EntryDistribution::make(DistTag::gaussian_complex), 1);
    CHECK(shifted(s, 0.0) == s.matrix);
    const Complex z(0.3, -0.4);
    const CMatrix y = shifted(s, z);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) {
            if (i == j)
                CHECK(y(i, i) == s.matrix(i, i) - z);
            else
                CHECK(y(i, j) == s.matrix(i, j));
        }
    CHECK((y - s.matrix).cwiseAbs().maxCoeff() == doctest::Approx(std::abs(z)));
}
