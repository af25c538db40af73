#include "bandlab/cubic.hpp"
#include "bandlab/selfconsistent.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>

using namespace bandlab;

namespace {

const Complex I{0.0, 1.0};

std::vector<double> geometric(double hi, double lo, int points) {
    std::vector<double> out(points);
    for (int k = 0; k < points; ++k) out[k] = hi * std::pow(lo / hi, double(k) / (points - 1));
    return out;
}

}  // namespace

TEST_CASE("cubic roots") {
    // (x - 1)(x - 2i)(x + 3) expanded.
    const Complex r1 = 1.0, r2 = 2.0 * I, r3 = -3.0;
    const auto roots = cubic_roots(1.0, -(r1 + r2 + r3), r1 * r2 + r1 * r3 + r2 * r3, -r1 * r2 * r3);
    for (Complex r : {r1, r2, r3}) {
        double best = 1e300;
        for (Complex q : roots) best = std::min(best, std::abs(q - r));
        CHECK(best <= 1e-13);
    }
    // Triple root.
    for (Complex q : cubic_roots(1.0, -3.0, 3.0, -1.0)) CHECK(std::abs(q - 1.0) <= 1e-5);
    // Pure cube.
    for (Complex q : cubic_roots(2.0, 0.0, 0.0, -16.0)) CHECK(std::abs(q) == doctest::Approx(2.0));
}

TEST_CASE("z = 0 reduces to a quadratic") {
    // w m^2 + w m + 1 = 0 at w = i: m = (-w + sqrt(w^2 - 4w)) / (2w).
    const auto s = solve_mc(I, 0.0);
    CHECK(s.mc.real() == doctest::Approx(0.30024259022012045).epsilon(1e-12));
    CHECK(s.mc.imag() == doctest::Approx(0.6248105338438266).epsilon(1e-12));
    CHECK(std::round(s.mc.real() * 1000) / 1000 == 0.300);
    CHECK(std::round(s.mc.imag() * 1000) / 1000 == 0.625);
    CHECK(s.residual <= 1e-10);
}

TEST_CASE("small eta limit") {
    const auto s = solve_mc(1e-8 * I, 0.5);
    CHECK(std::abs(std::sqrt(1e-8 * I) * s.mc - I * std::sqrt(0.75)) <= 1e-3);
    CHECK(s.mc.imag() > 0.0);
    CHECK(mc_limit(0.0) == I);
    CHECK(std::abs(mc_limit(0.6) - 0.8 * I) <= 1e-15);
    CHECK_THROWS_AS(mc_limit(1.0), DomainError);
    CHECK_THROWS_AS(mc_limit(Complex(0.8, 0.7)), DomainError);
}

TEST_CASE("residual and positivity on a grid") {
    for (double zr = 0.0; zr <= 0.95; zr += 0.1)
        for (double e : geometric(10.0, 1e-6, 50))
            for (double re : {0.0, 0.3, -1.5}) {
                const Complex w(re, e);
                const auto s = solve_mc(w, Complex(zr, 0.2 * zr));
                CAPTURE(w);
                CAPTURE(zr);
                CHECK(s.mc.imag() > 0.0);
                CHECK(s.residual <= 1e-10);
                CHECK(mc_residual(s.mc, w, Complex(zr, 0.2 * zr)) == doctest::Approx(s.residual));
                CHECK(std::abs(s.certificate.roots[s.certificate.selected] - s.mc) <= 1e-8 * std::abs(s.mc));
            }
}

TEST_CASE("solve_mc domain") {
    CHECK_THROWS_AS(solve_mc(Complex(1.0, 0.0), 0.5), DomainError);
    CHECK_THROWS_AS(solve_mc(Complex(1.0, -1.0), 0.5), DomainError);
    CHECK_THROWS_AS(solve_mc_hermitized(Complex(1.0, 0.0), 0.5), DomainError);
}

TEST_CASE("transform relation") {
    for (int k = 0; k < 20; ++k) {
        const double t = 0.05 + 0.95 * k / 19.0;
        const Complex w = Complex(1.0, 1.0) * t;
        for (double z : {0.0, 0.3, 0.5, 0.9}) {
            const auto h = solve_mc_hermitized(w, z);
            const auto s = solve_mc(w * w, z);
            CHECK(std::abs(h.mc - w * s.mc) <= 1e-8);
            CHECK(h.residual <= 1e-10);
        }
    }
    const Complex w = Complex(1.0, 1.0) * 0.5;
    CHECK(std::abs(solve_mc_hermitized(w, 0.5).mc - w * solve_mc(w * w, 0.5).mc) <= 1e-8);
}

TEST_CASE("hermitized: semicircle at z = 0") {
    // At z = 0 the cubic is (m + w)(m^2 + w m + 1); at w = 2i the
    // quadratic has distinct roots i(-1 +- sqrt 2).
    const auto s = solve_mc_hermitized(2.0 * I, 0.0);
    CHECK(std::abs(s.mc - I * (std::sqrt(2.0) - 1.0)) <= 1e-12);
    CHECK(s.certificate.rule != BranchRule::edge_degenerate);
    const auto r = solve_mc_hermitized(Complex(0.1, 0.5), 0.3);
    CHECK(r.residual <= 1e-10);
    CHECK(mc_hermitized_residual(r.mc, Complex(0.1, 0.5), 0.3) <= 1e-10);
}

TEST_CASE("hermitized: edge degeneracy is certified") {
    // The discriminant w^2 - 4 vanishes at the semicircle edge w = 2.
    const auto s = solve_mc_hermitized(Complex(2.0, 1e-14), 0.0);
    CHECK(s.certificate.rule == BranchRule::edge_degenerate);
    CHECK(s.certificate.min_root_gap < 1e-6);
    CHECK(s.mc.imag() > 0.0);
    CHECK(std::abs(s.mc + 1.0) <= 1e-5);
}

TEST_CASE("mc_curve") {
    const std::vector<double> single{10.0};
    const auto one = mc_curve(0.5, single);
    REQUIRE(one.size() == 1);
    CHECK(std::abs(one[0].mc - solve_mc(10.0 * I, 0.5).mc) <= 1e-12);

    const auto etas = geometric(10.0, 1e-6, 200);
    const auto curve = mc_curve(0.5, etas);
    REQUIRE(curve.size() == 200);
    for (std::size_t k = 0; k < curve.size(); ++k) {
        CHECK(curve[k].mc.imag() > 0.0);
        CHECK(curve[k].residual <= 1e-10);
        CHECK(curve[k].w == etas[k] * I);
        if (k > 0)
            CHECK(std::abs(curve[k].mc * std::sqrt(etas[k]) - curve[k - 1].mc * std::sqrt(etas[k - 1])) < 0.2);
    }
    CHECK(std::abs(std::sqrt(1e-6 * I) * curve.back().mc - mc_limit(0.5)) <= 1e-2);

    const std::vector<double> unsorted{1.0, 2.0};
    CHECK_THROWS_AS(mc_curve(0.5, unsorted), DomainError);
    const std::vector<double> negative{1.0, -1.0};
    CHECK_THROWS_AS(mc_curve(0.5, negative), DomainError);
}

TEST_CASE("magnitude law") {
    for (double z : {0.1, 0.5, 0.9}) {
        const auto etas = geometric(10.0, 1e-6, 60);
        const auto curve = mc_curve(z, etas);
        const double ref = std::abs(solve_mc(1e-4 * I, z).mc) * std::sqrt(1e-4);
        for (std::size_t k = 0; k < curve.size(); ++k) CHECK(std::abs(curve[k].mc) * std::sqrt(etas[k]) <= 2.0 * ref);
    }
}

TEST_CASE("mc CSV") {
    const auto etas = geometric(10.0, 0.1, 5);
    const auto curve = mc_curve(0.5, etas);
    write_mc_csv(curve, "test_mc.csv");
    std::ifstream is("test_mc.csv");
    std::string line;
    std::getline(is, line);
    CHECK(line == "eta,mc_re,mc_im,residual");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 5);
    std::remove("test_mc.csv");
}
