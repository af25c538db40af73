#include "bandlab/selfconsistent.hpp"

#include "bandlab/cubic.hpp"
#include "csv_util.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace bandlab {

namespace {

struct Equation {
    std::function<std::array<Complex, 3>(Complex w)> roots;
    std::function<Complex(Complex m, Complex w)> f;   // residual function
    std::function<Complex(Complex m, Complex w)> df;  // d f / d m
    double (*residual)(Complex, Complex, Complex);
    const char* name;
};

Equation mc_equation(Complex z) {
    const double z2 = std::norm(z);
    return {
        [z2](Complex w) { return cubic_roots(w, 2.0 * w, w + 1.0 - z2, 1.0); },
        [z2](Complex m, Complex w) { return 1.0 / m + w * (1.0 + m) - z2 / (1.0 + m); },
        [z2](Complex m, Complex w) { return -1.0 / (m * m) + w + z2 / ((1.0 + m) * (1.0 + m)); },
        &mc_residual,
        "solve_mc",
    };
}

Equation hermitized_equation(Complex z) {
    const double z2 = std::norm(z);
    return {
        [z2](Complex w) { return cubic_roots(1.0, 2.0 * w, w * w + 1.0 - z2, w); },
        [z2](Complex m, Complex w) { return -1.0 / m - w - m + z2 / (w + m); },
        [z2](Complex m, Complex w) { return 1.0 / (m * m) - 1.0 - z2 / ((w + m) * (w + m)); },
        &mc_hermitized_residual,
        "solve_mc_hermitized",
    };
}

bool positive_imag(Complex r) { return r.imag() > 1e-12 * std::max(1.0, std::abs(r)); }

int nearest(const std::array<Complex, 3>& roots, Complex target) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (std::abs(roots[k] - target) < std::abs(roots[best] - target)) best = k;
    return best;
}

// Newton on the rational form drives the residual below the tolerance the
// cubic's coefficients alone cannot reach for large |m|.
Complex refine(const Equation& eq, Complex m, Complex w) {
    for (int it = 0; it < 4; ++it) {
        const Complex f = eq.f(m, w);
        const Complex df = eq.df(m, w);
        if (df == Complex{}) break;
        const Complex next = m - f / df;
        if (!(std::abs(eq.f(next, w)) < std::abs(f))) break;
        m = next;
    }
    return m;
}

// Follow the root from the start height down to Im w = target along
// Re w = const, starting from the root nearest -1/w.
Complex continue_branch(const Equation& eq, Complex w, const SolverOptions& opts) {
    const double target = w.imag();
    const double start = std::max(opts.start_eta, target);
    Complex w_cur{w.real(), start};
    auto roots = eq.roots(w_cur);
    Complex m = roots[nearest(roots, -1.0 / w_cur)];
    double eta = start;
    const int base_steps = 64;
    const double ratio = std::pow(target / start, 1.0 / base_steps);
    while (eta > target) {
        double step = ratio;
        bool accepted = false;
        for (int depth = 0; depth <= opts.max_refinements && !accepted; ++depth) {
            const double next_eta = std::max(target, eta * step);
            const Complex w_next{w.real(), next_eta};
            const auto next_roots = eq.roots(w_next);
            const Complex cand = next_roots[nearest(next_roots, m)];
            if (std::abs(cand - m) <= opts.match_radius * std::abs(m)) {
                m = cand;
                eta = next_eta;
                accepted = true;
            } else {
                step = std::sqrt(step);
            }
        }
        if (!accepted) {
            std::ostringstream os;
            os << eq.name << ": continuation lost the branch near eta=" << eta << " (w=" << w << ")";
            throw BranchAmbiguity(os.str());
        }
    }
    return m;
}

SelfConsistentSolution solve(const Equation& eq, Complex w, Complex z, const SolverOptions& opts) {
    if (!(w.imag() > 0.0)) {
        std::ostringstream os;
        os << eq.name << ": requires Im w > 0 (w=" << w << ")";
        throw DomainError(os.str());
    }
    SelfConsistentSolution sol;
    sol.w = w;
    sol.z = z;
    auto& cert = sol.certificate;
    cert.roots = eq.roots(w);

    int positives = 0;
    for (const auto& r : cert.roots) positives += positive_imag(r) ? 1 : 0;

    if (positives == 1) {
        for (int k = 0; k < 3; ++k)
            if (positive_imag(cert.roots[k])) cert.selected = k;
        cert.rule = BranchRule::unique_positive;
    } else {
        const Complex tracked = continue_branch(eq, w, opts);
        cert.selected = nearest(cert.roots, tracked);
        cert.rule = BranchRule::continuation;
        if (!positive_imag(cert.roots[cert.selected])) {
            std::ostringstream os;
            os << eq.name << ": tracked root " << cert.roots[cert.selected] << " has Im <= 0 (w=" << w << ")";
            throw BranchAmbiguity(os.str());
        }
    }

    const Complex chosen = cert.roots[cert.selected];
    double gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k)
        if (k != cert.selected) gap = std::min(gap, std::abs(cert.roots[k] - chosen));
    cert.min_root_gap = gap / std::max(1.0, std::abs(chosen));
    if (cert.min_root_gap < opts.degeneracy_gap) cert.rule = BranchRule::edge_degenerate;

    sol.mc = refine(eq, chosen, w);
    sol.residual = eq.residual(sol.mc, w, z);
    if (!(sol.mc.imag() > 0.0)) {
        std::ostringstream os;
        os << eq.name << ": no root with Im > 0 at w=" << w;
        throw BranchAmbiguity(os.str());
    }
    return sol;
}

}  // namespace

std::string_view to_string(BranchRule rule) {
    switch (rule) {
        case BranchRule::unique_positive: return "unique_positive";
        case BranchRule::continuation: return "continuation";
        case BranchRule::edge_degenerate: return "edge_degenerate";
    }
    return "unknown";
}

double mc_residual(Complex m, Complex w, Complex z) {
    return std::abs(1.0 / m + w * (1.0 + m) - std::norm(z) / (1.0 + m));
}

double mc_hermitized_residual(Complex m, Complex w, Complex z) {
    return std::abs(-1.0 / m - w - m + std::norm(z) / (w + m));
}

SelfConsistentSolution solve_mc(Complex w, Complex z, const SolverOptions& opts) {
    return solve(mc_equation(z), w, z, opts);
}

SelfConsistentSolution solve_mc_hermitized(Complex w, Complex z, const SolverOptions& opts) {
    return solve(hermitized_equation(z), w, z, opts);
}

Complex mc_limit(Complex z) {
    const double z2 = std::norm(z);
    if (!(z2 < 1.0)) throw DomainError("mc_limit requires |z| < 1");
    return {0.0, std::sqrt(1.0 - z2)};
}

std::vector<SelfConsistentSolution> mc_curve(Complex z, std::span<const double> etas, const CurveOptions& opts) {
    for (std::size_t k = 0; k < etas.size(); ++k) {
        if (!(etas[k] > 0.0)) throw DomainError("mc_curve: eta must be positive");
        if (k > 0 && !(etas[k] < etas[k - 1])) throw DomainError("mc_curve: etas must be strictly descending");
    }
    std::vector<SelfConsistentSolution> out;
    if (etas.empty()) return out;
    const Equation eq = mc_equation(z);
    out.push_back(solve_mc({0.0, etas[0]}, z, opts.solver));

    for (std::size_t k = 1; k < etas.size(); ++k) {
        const double from = etas[k - 1];
        const double to = etas[k];
        Complex m = out.back().mc;
        // Subdivide [to, from] geometrically until every hop moves
        // m sqrt(eta) by at most step_bound.
        bool tracked = false;
        for (int depth = 0; depth <= opts.solver.max_refinements && !tracked; ++depth) {
            const int pieces = 1 << depth;
            const double ratio = std::pow(to / from, 1.0 / pieces);
            Complex cur = m;
            double eta = from;
            bool ok = true;
            for (int s = 1; s <= pieces; ++s) {
                const double next = s == pieces ? to : eta * ratio;
                const auto roots = eq.roots({0.0, next});
                const Complex cand = roots[nearest(roots, cur)];
                if (std::abs(cand * std::sqrt(next) - cur * std::sqrt(eta)) > opts.step_bound) {
                    ok = false;
                    break;
                }
                cur = cand;
                eta = next;
            }
            if (ok) {
                m = cur;
                tracked = true;
            }
        }
        if (!tracked || !positive_imag(m)) {
            std::ostringstream os;
            os << "mc_curve: branch lost at eta=" << to;
            throw BranchAmbiguity(os.str());
        }
        SelfConsistentSolution sol = solve_mc({0.0, to}, z, opts.solver);
        if (std::abs(sol.mc - m) > opts.solver.match_radius * std::abs(m)) {
            std::ostringstream os;
            os << "mc_curve: tracked root " << m << " disagrees with selected root " << sol.mc << " at eta=" << to;
            throw BranchAmbiguity(os.str());
        }
        out.push_back(std::move(sol));
    }
    return out;
}

void write_mc_csv(std::span<const SelfConsistentSolution> curve, const std::string& path) {
    auto os = detail::open_for_write(path);
    using detail::format_double;
    os << "eta,mc_re,mc_im,residual\n";
    for (const auto& s : curve)
        os << format_double(s.w.imag()) << ',' << format_double(s.mc.real()) << ',' << format_double(s.mc.imag()) << ','
           << format_double(s.residual) << '\n';
    detail::check_written(os, path);
}

}  // namespace bandlab
