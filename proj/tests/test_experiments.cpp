#include "bandlab/experiments.hpp"
#include "bandlab/selfconsistent.hpp"

#include <doctest.h>
#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>

using namespace bandlab;

namespace {

ExperimentConfig small(ExperimentKind kind) {
    ExperimentConfig c;
    c.kind = kind;
    c.n = 48;
    c.w = 8;
    c.trials = 3;
    c.seed = 5;
    c.eta.points = 6;
    return c;
}

bool same_rows(const ExperimentReport& a, const ExperimentReport& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t r = 0; r < a.rows.size(); ++r)
        for (std::size_t c = 0; c < a.rows[r].size(); ++c) {
            const auto &x = a.rows[r][c], &y = b.rows[r][c];
            if (std::holds_alternative<double>(x) && std::holds_alternative<double>(y)) {
                const double u = std::get<double>(x), v = std::get<double>(y);
                if (!(u == v || (std::isnan(u) && std::isnan(v)))) return false;
            } else if (x != y) {
                return false;
            }
        }
    return true;
}

// Width and height from a PNG decoded with libpng; {0, 0} if unreadable.
std::pair<unsigned, unsigned> png_size(const std::string& path) {
    FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) return {0, 0};
    unsigned char sig[8];
    if (std::fread(sig, 1, 8, fp) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        std::fclose(fp);
        return {0, 0};
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    std::pair<unsigned, unsigned> out{0, 0};
    if (setjmp(png_jmpbuf(png)) == 0) {
        png_init_io(png, fp);
        png_set_sig_bytes(png, 8);
        png_read_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
        out = {png_get_image_width(png, info), png_get_image_height(png, info)};
    }
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return out;
}

}  // namespace

TEST_CASE("circlaw report") {
    ExperimentConfig c = small(ExperimentKind::circlaw);
    c.n = 256;
    c.w = 32;
    c.dist = DistTag::rademacher;
    c.trials = 1;
    c.seed = 1;
    const auto r = run(c);
    REQUIRE(r.rows.size() == 1);
    CHECK(r.columns == std::vector<std::string>{"trial", "seed", "radial_ks", "angular_ks", "op_norm", "status"});
    const auto rad = r.numeric_column("radial_ks");
    const auto ang = r.numeric_column("angular_ks");
    REQUIRE(rad.size() == 1);
    CHECK(rad[0] >= 0.0);
    CHECK(rad[0] <= 1.0);
    CHECK(ang[0] >= 0.0);
    CHECK(ang[0] <= 1.0);
    CHECK(r.eigen_scatter.size() == 256);
    CHECK(r.pass_fraction("op_norm_bound") == 1.0);
}

TEST_CASE("every kind runs and row counts match") {
    for (auto kind : {ExperimentKind::circlaw, ExperimentKind::locallaw, ExperimentKind::singcount,
                      ExperimentKind::leastsing, ExperimentKind::replacement, ExperimentKind::normcond,
                      ExperimentKind::mc}) {
        auto c = small(kind);
        if (kind == ExperimentKind::normcond) c.profile = ProfileKind::circulant;
        const auto r = run(c);
        CAPTURE(to_string(kind));
        std::size_t expect = c.trials;
        if (kind == ExperimentKind::locallaw) expect = std::size_t(c.trials) * c.eta.points;
        if (kind == ExperimentKind::normcond) expect = 81;
        if (kind == ExperimentKind::mc) expect = c.eta.points;
        CHECK(r.rows.size() == expect);
        for (const auto& [name, flags] : r.checks) CHECK(flags.size() == r.rows.size());
        CHECK(r.seconds >= 0.0);
        const auto j = r.summary_json();
        CHECK(j.contains("config"));
        CHECK(j["config"]["kind"] == std::string(to_string(kind)));
    }
}

TEST_CASE("determinism, serial equals parallel") {
    for (auto kind : {ExperimentKind::circlaw, ExperimentKind::locallaw, ExperimentKind::replacement,
                      ExperimentKind::leastsing}) {
        auto c = small(kind);
        c.dist = DistTag::uniform_real;
        const auto a = run(c);
        const auto b = run(c);
        c.parallel = false;
        const auto s = run(c);
        CHECK(same_rows(a, b));
        CHECK(same_rows(a, s));
    }
}

TEST_CASE("trial t uses seed + t") {
    auto c = small(ExperimentKind::circlaw);
    const auto all = run(c);
    c.seed = 7;
    c.trials = 1;
    const auto third = run(c);
    CHECK(std::get<std::int64_t>(all.rows[2][1]) == 7);
    CHECK(std::get<double>(all.rows[2][2]) == std::get<double>(third.rows[0][2]));
}

TEST_CASE("locallaw statistics") {
    auto c = small(ExperimentKind::locallaw);
    c.n = 128;
    c.w = 16;
    c.profile = ProfileKind::circulant;
    const auto r = run(c);
    const auto etas = eta_values(c);
    CHECK(r.scalars.at("eta_max") == 10.0);
    CHECK(r.scalars.at("eta_min") == doctest::Approx(std::pow(128.0, 0.1) / 256.0));
    const auto err = r.numeric_column("abs_err");
    const auto norm = r.numeric_column("normalized_err");
    REQUIRE(err.size() == etas.size() * 3);
    for (std::size_t k = 0; k < err.size(); ++k) {
        const double eta = etas[k % etas.size()];
        CHECK(norm[k] == doctest::Approx(err[k] * std::sqrt(16.0) * std::pow(eta, 0.75)));
    }
    // At eta = 10 the resolvent is close to deterministic.
    CHECK(err[0] < 1e-2);
    CHECK(r.scalars.at("trial_pass_fraction") >= 0.0);
    const auto spot = r.numeric_column("entry_spot_max");
    for (double v : spot) CHECK(std::isfinite(v));
}

TEST_CASE("singcount event and inequality") {
    auto c = small(ExperimentKind::singcount);
    c.n = 128;
    c.w = 16;
    c.trials = 4;
    const auto r = run(c);
    CHECK(r.pass_fraction("stieltjes_inequality") == 1.0);
    const double bound = std::pow(128.0, 1.1) / 16.0;
    for (double b : r.numeric_column("bound")) CHECK(b == doctest::Approx(bound));
    for (double v : r.numeric_column("count")) CHECK(v >= 0.0);
}

TEST_CASE("leastsing thresholds") {
    auto c = small(ExperimentKind::leastsing);
    c.dist = DistTag::rademacher;
    const auto r = run(c);
    CHECK(r.scalars.at("log_thresh_2_10") == doctest::Approx(-std::pow(48.0, 0.15) * 6.0));
    CHECK(r.scalars.at("log_thresh_2_3") == doctest::Approx(-50.0 * 6.0 * std::log(8.0)));
    CHECK(r.pass_fraction("above_thresh_2_3") == 1.0);
    c.profile = ProfileKind::circulant;
    c.dist = DistTag::uniform_real;
    const auto r2 = run(c);
    CHECK(r2.checks.count("above_thresh_2_3") == 0);
    CHECK(std::isnan(r2.scalars.at("log_thresh_2_3")));
}

TEST_CASE("replacement with gaussian entries is small but nonzero") {
    auto c = small(ExperimentKind::replacement);
    c.profile = ProfileKind::circulant;
    c.dist = DistTag::gaussian_real;
    c.n = 128;
    c.w = 24;
    const auto r = run(c);
    for (double d : r.numeric_column("delta")) {
        CHECK(d > 0.0);
        CHECK(d < 0.1);
    }
}

TEST_CASE("mc experiment matches solver") {
    auto c = small(ExperimentKind::mc);
    c.eta.min = 1e-3;
    c.eta.max = 1.0;
    c.eta.points = 4;
    const auto r = run(c);
    const auto eta = r.numeric_column("eta");
    const auto re = r.numeric_column("mc_re");
    const auto im = r.numeric_column("mc_im");
    for (std::size_t k = 0; k < eta.size(); ++k) {
        const auto s = solve_mc(Complex(0.0, eta[k]), 0.5);
        CHECK(re[k] == doctest::Approx(s.mc.real()).epsilon(1e-9));
        CHECK(im[k] == doctest::Approx(s.mc.imag()).epsilon(1e-9));
    }
    CHECK(eta.front() == 1.0);
    CHECK(eta.back() == 1e-3);
}

TEST_CASE("normcond scalars") {
    auto c = small(ExperimentKind::normcond);
    c.profile = ProfileKind::circulant;
    const auto r = run(c);
    const auto norms = r.numeric_column("norm");
    CHECK(r.scalars.at("max_norm") == *std::max_element(norms.begin(), norms.end()));
    CHECK(r.scalars.at("max_norm_over_log2") == doctest::Approx(r.scalars.at("max_norm") / std::pow(std::log(48.0), 2)));
    c.radius = 0.0;
    CHECK(run(c).rows.size() == 1);
}

TEST_CASE("config validation and hypothesis guards") {
    auto c = small(ExperimentKind::leastsing);
    c.profile = ProfileKind::circulant;
    c.dist = DistTag::rademacher;
    CHECK_THROWS_AS(run(c), HypothesisError);
    c.kind = ExperimentKind::circlaw;
    CHECK_THROWS_AS(run(c), HypothesisError);
    c.profile = ProfileKind::block_band;
    CHECK_NOTHROW(validate_config(c));

    auto bad = small(ExperimentKind::circlaw);
    bad.w = 0;
    CHECK_THROWS_AS(validate_config(bad), UsageError);
    bad = small(ExperimentKind::circlaw);
    bad.n = 50;
    CHECK_THROWS_AS(validate_config(bad), UsageError);
    bad = small(ExperimentKind::circlaw);
    bad.trials = 0;
    CHECK_THROWS_AS(validate_config(bad), UsageError);
    bad = small(ExperimentKind::locallaw);
    bad.eta.min = -1.0;
    CHECK_THROWS_AS(validate_config(bad), UsageError);
    bad = small(ExperimentKind::normcond);
    bad.z = 1.0;
    CHECK_THROWS_AS(validate_config(bad), UsageError);
}

TEST_CASE("CSV round trip") {
    auto c = small(ExperimentKind::circlaw);
    const auto r = run(c);
    emit_csv(r, "test_exp.csv");
    const auto back = read_csv("test_exp.csv");
    CHECK(back.columns == r.columns);
    CHECK(same_rows(back, r));

    auto l = small(ExperimentKind::normcond);
    l.profile = ProfileKind::circulant;
    const auto rn = run(l);
    emit_csv(rn, "test_exp.csv");
    CHECK(same_rows(read_csv("test_exp.csv"), rn));
    std::remove("test_exp.csv");
}

TEST_CASE("empty report is header only") {
    ExperimentReport r;
    r.columns = {"trial", "delta", "kolmogorov", "status"};
    emit_csv(r, "test_empty.csv");
    std::ifstream is("test_empty.csv");
    std::string line;
    std::getline(is, line);
    CHECK(line == "trial,delta,kolmogorov,status");
    CHECK_FALSE(std::getline(is, line));
    const auto back = read_csv("test_empty.csv");
    CHECK(back.rows.empty());
    CHECK(back.columns == r.columns);
    std::remove("test_empty.csv");
}

TEST_CASE("I/O errors name the path") {
    ExperimentReport r;
    r.columns = {"a"};
    try {
        emit_csv(r, "/nonexistent/dir/out.csv");
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("/nonexistent/dir/out.csv") != std::string::npos);
    }
    CHECK_THROWS_AS(read_csv("/nonexistent/dir/in.csv"), IoError);
}

TEST_CASE("aggregates are recomputable from rows") {
    auto c = small(ExperimentKind::replacement);
    c.trials = 5;
    const auto r = run(c);
    const auto agg = r.aggregates();
    REQUIRE(agg.count("delta") == 1);
    auto d = r.numeric_column("delta");
    std::sort(d.begin(), d.end());
    CHECK(agg.at("delta").median == d[2]);
    CHECK(agg.at("delta").min == d.front());
    CHECK(agg.at("delta").max == d.back());
    CHECK(agg.at("delta").count == 5);
    CHECK(agg.count("trial") == 0);
    CHECK(agg.count("status") == 0);
}

TEST_CASE("plots are valid PNG files") {
    for (auto kind : {ExperimentKind::circlaw, ExperimentKind::locallaw, ExperimentKind::singcount,
                      ExperimentKind::leastsing, ExperimentKind::replacement, ExperimentKind::normcond,
                      ExperimentKind::mc}) {
        auto c = small(kind);
        if (kind == ExperimentKind::normcond) c.profile = ProfileKind::circulant;
        const auto r = run(c);
        emit_plot(r, "test_plot.png");
        const auto [w, h] = png_size("test_plot.png");
        CAPTURE(to_string(kind));
        CHECK(w == 640);
        CHECK(h == 480);
    }
    std::remove("test_plot.png");
}
