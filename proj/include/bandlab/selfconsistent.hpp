#pragma once

#include "bandlab/common.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace bandlab {

enum class BranchRule {
    unique_positive,  // exactly one root with Im > 0
    continuation,     // several candidates, resolved by tracking from Im w = 10
    edge_degenerate,  // the selected root is (numerically) a double root
};

std::string_view to_string(BranchRule rule);

struct BranchCertificate {
    std::array<Complex, 3> roots;
    int selected = 0;
    BranchRule rule = BranchRule::unique_positive;
    /// Smallest pairwise root distance relative to the root scale.
    double min_root_gap = 0.0;
};

struct SelfConsistentSolution {
    Complex w;
    Complex z;
    Complex mc;
    double residual = 0.0;
    BranchCertificate certificate;
};

struct SolverOptions {
    double residual_tol = 1e-10;
    /// Continuation accepts a root within this fraction of |previous root|.
    double match_radius = 0.1;
    int max_refinements = 8;
    /// Roots closer than this (relative) are reported as edge-degenerate.
    double degeneracy_gap = 1e-6;
    /// Starting height of the continuation path.
    double start_eta = 10.0;
};

/// |1/m + w(1 + m) - |z|^2 / (1 + m)|.
double mc_residual(Complex m, Complex w, Complex z);
/// |-1/m - w - m + |z|^2 / (w + m)|.
double mc_hermitized_residual(Complex m, Complex w, Complex z);

/// Root m_c(w, z) with Im > 0 of 1/m = -w(1 + m) + |z|^2 / (1 + m), i.e. of
/// w m^3 + 2w m^2 + (w + 1 - |z|^2) m + 1 = 0. Requires Im w > 0.
SelfConsistentSolution solve_mc(Complex w, Complex z, const SolverOptions& opts = {});

/// Root with Im > 0 of -1/m = w + m - |z|^2 / (w + m), i.e. of
/// m^3 + 2w m^2 + (w^2 + 1 - |z|^2) m + w = 0. Equals w m_c(w^2, z).
SelfConsistentSolution solve_mc_hermitized(Complex w, Complex z, const SolverOptions& opts = {});

/// i sqrt(1 - |z|^2): the limit of sqrt(w) m_c(w, z) as w = i eta -> 0.
Complex mc_limit(Complex z);

struct CurveOptions {
    SolverOptions solver;
    /// Maximum jump of m sqrt(eta) between consecutive tracked points
    /// before the step is subdivided.
    double step_bound = 0.2;
};

/// m_c(i eta, z) along `etas` (strictly descending), tracking the branch
/// from each point to the next.
std::vector<SelfConsistentSolution> mc_curve(Complex z, std::span<const double> etas,
                                             const CurveOptions& opts = {});

/// CSV: eta,mc_re,mc_im,residual
void write_mc_csv(std::span<const SelfConsistentSolution> curve, const std::string& path);

}  // namespace bandlab
