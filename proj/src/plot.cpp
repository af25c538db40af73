#include "bandlab/experiments.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

namespace bandlab {

namespace {

using Rgb = std::array<std::uint8_t, 3>;

constexpr Rgb kBlack{0, 0, 0};
constexpr Rgb kGrey{170, 170, 170};
constexpr Rgb kBlue{31, 119, 180};
constexpr Rgb kRed{214, 39, 40};

class Canvas {
public:
    Canvas(int width, int height) : w_(width), h_(height), px_(static_cast<std::size_t>(width) * height, Rgb{255, 255, 255}) {}

    // Plot area in data coordinates; margins in pixels.
    void set_view(double x0, double x1, double y0, double y1) {
        x0_ = x0;
        x1_ = x1;
        y0_ = y0;
        y1_ = y1;
    }

    void set(int x, int y, Rgb c) {
        if (x >= 0 && x < w_ && y >= 0 && y < h_) px_[static_cast<std::size_t>(y) * w_ + x] = c;
    }

    int px(double x) const { return kMargin + static_cast<int>(std::lround((x - x0_) / (x1_ - x0_) * (w_ - 2 * kMargin))); }
    int py(double y) const { return h_ - kMargin - static_cast<int>(std::lround((y - y0_) / (y1_ - y0_) * (h_ - 2 * kMargin))); }

    void line_px(int xa, int ya, int xb, int yb, Rgb c) {
        const int dx = std::abs(xb - xa), sx = xa < xb ? 1 : -1;
        const int dy = -std::abs(yb - ya), sy = ya < yb ? 1 : -1;
        int err = dx + dy;
        while (true) {
            set(xa, ya, c);
            if (xa == xb && ya == yb) break;
            const int e2 = 2 * err;
            if (e2 >= dy) {
                err += dy;
                xa += sx;
            }
            if (e2 <= dx) {
                err += dx;
                ya += sy;
            }
        }
    }

    void line(double xa, double ya, double xb, double yb, Rgb c) { line_px(px(xa), py(ya), px(xb), py(yb), c); }

    void dot(double x, double y, Rgb c) {
        const int cx = px(x), cy = py(y);
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b) set(cx + a, cy + b, c);
    }

    void fill_rect(double xa, double ya, double xb, double yb, Rgb c) {
        const int l = std::min(px(xa), px(xb)), r = std::max(px(xa), px(xb));
        const int t = std::min(py(ya), py(yb)), b = std::max(py(ya), py(yb));
        for (int y = t; y <= b; ++y)
            for (int x = l; x <= r; ++x) set(x, y, c);
    }

    void frame() {
        const int l = kMargin, r = w_ - kMargin, t = kMargin, b = h_ - kMargin;
        line_px(l, b, r, b, kBlack);
        line_px(l, t, r, t, kBlack);
        line_px(l, t, l, b, kBlack);
        line_px(r, t, r, b, kBlack);
        for (int k = 0; k <= 10; ++k) {
            const int x = l + (r - l) * k / 10, y = t + (b - t) * k / 10;
            line_px(x, b, x, b + 5, kBlack);
            line_px(l - 5, y, l, y, kBlack);
        }
    }

    void write_png(const std::string& path) const {
        std::FILE* fp = std::fopen(path.c_str(), "wb");
        if (!fp) throw IoError("cannot open '" + path + "' for writing");
        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        png_infop info = png ? png_create_info_struct(png) : nullptr;
        if (!png || !info || setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            std::fclose(fp);
            throw IoError("PNG encoding failed for '" + path + "'");
        }
        png_init_io(png, fp);
        png_set_IHDR(png, info, static_cast<png_uint_32>(w_), static_cast<png_uint_32>(h_), 8, PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        for (int y = 0; y < h_; ++y)
            png_write_row(png, reinterpret_cast<png_const_bytep>(px_.data() + static_cast<std::size_t>(y) * w_));
        png_write_end(png, nullptr);
        png_destroy_write_struct(&png, &info);
        if (std::fclose(fp) != 0) throw IoError("write to '" + path + "' failed");
    }

private:
    static constexpr int kMargin = 40;
    int w_, h_;
    std::vector<Rgb> px_;
    double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
};

void plot_circlaw(const ExperimentReport& r, Canvas& c) {
    c.set_view(-1.5, 1.5, -1.5, 1.5);
    c.line(-1.5, 0, 1.5, 0, kGrey);
    c.line(0, -1.5, 0, 1.5, kGrey);
    const int segments = 720;
    for (int k = 0; k < segments; ++k) {
        const double a = 2 * std::numbers::pi * k / segments, b = 2 * std::numbers::pi * (k + 1) / segments;
        c.line(std::cos(a), std::sin(a), std::cos(b), std::sin(b), kRed);
    }
    for (const auto& l : r.eigen_scatter) c.dot(l.real(), l.imag(), kBlue);
}

void plot_locallaw(const ExperimentReport& r, Canvas& c) {
    const auto eta_col = r.column_index("eta");
    const auto err_col = r.column_index("abs_err");
    const auto status_col = r.column_index("status");
    std::map<double, std::vector<double>> by_eta;
    for (const auto& row : r.rows) {
        if (std::get<std::string>(row[status_col]) != "ok") continue;
        by_eta[std::get<double>(row[eta_col])].push_back(std::get<double>(row[err_col]));
    }
    std::vector<std::pair<double, double>> pts;  // (log10 eta, log10 median err)
    for (auto& [eta, errs] : by_eta) {
        std::sort(errs.begin(), errs.end());
        const double med = errs[errs.size() / 2];
        if (med > 0) pts.emplace_back(std::log10(eta), std::log10(med));
    }
    const double sqrt_w = std::sqrt(static_cast<double>(r.config.w));
    auto ref = [&](double le) { return std::log10(1.0 / sqrt_w) - 0.75 * le; };
    if (pts.empty()) return;
    double x0 = pts.front().first, x1 = pts.back().first;
    if (x1 <= x0) x1 = x0 + 1;
    double y0 = std::min(ref(x1), ref(x0)), y1 = std::max(ref(x1), ref(x0));
    for (auto [x, y] : pts) {
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    c.set_view(x0, x1, y0 - 0.5, y1 + 0.5);
    c.line(x0, ref(x0), x1, ref(x1), kRed);
    for (std::size_t k = 0; k < pts.size(); ++k) {
        c.dot(pts[k].first, pts[k].second, kBlue);
        if (k > 0) c.line(pts[k - 1].first, pts[k - 1].second, pts[k].first, pts[k].second, kBlue);
    }
}

std::string primary_statistic(const ExperimentReport& r) {
    switch (r.config.kind) {
        case ExperimentKind::singcount: return "count";
        case ExperimentKind::leastsing: return "sigma_min";
        case ExperimentKind::replacement: return "delta";
        case ExperimentKind::normcond: return "norm";
        case ExperimentKind::mc: return "mc_im";
        case ExperimentKind::circlaw: return "radial_ks";
        case ExperimentKind::locallaw: return "normalized_err";
    }
    return {};
}

void plot_histogram(const ExperimentReport& r, Canvas& c) {
    auto values = r.numeric_column(primary_statistic(r));
    values.erase(std::remove_if(values.begin(), values.end(), [](double v) { return !std::isfinite(v); }), values.end());
    // sigma_min spans many decades.
    if (r.config.kind == ExperimentKind::leastsing)
        for (auto& v : values) v = std::log10(std::max(v, 1e-300));
    if (values.empty()) {
        c.set_view(0, 1, 0, 1);
        return;
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    double lo = *lo_it, hi = *hi_it;
    if (hi <= lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const int bins = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(values.size()))) + 1, 5, 40);
    std::vector<int> counts(bins, 0);
    for (double v : values) counts[std::min(bins - 1, static_cast<int>((v - lo) / (hi - lo) * bins))]++;
    const int top = *std::max_element(counts.begin(), counts.end());
    c.set_view(lo, hi, 0, top * 1.1);
    const double width = (hi - lo) / bins;
    for (int b = 0; b < bins; ++b)
        if (counts[b] > 0) c.fill_rect(lo + b * width, 0, lo + (b + 0.9) * width, counts[b], kBlue);
}

}  // namespace

void emit_plot(const ExperimentReport& report, const std::string& path) {
    Canvas canvas(640, 480);
    switch (report.config.kind) {
        case ExperimentKind::circlaw: plot_circlaw(report, canvas); break;
        case ExperimentKind::locallaw: plot_locallaw(report, canvas); break;
        default: plot_histogram(report, canvas); break;
    }
    canvas.frame();
    canvas.write_png(path);
}

}  // namespace bandlab
