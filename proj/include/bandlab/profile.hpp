#pragma once

#include "bandlab/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bandlab {

enum class ProfileKind { block_band, circulant, explicit_matrix };

std::string_view to_string(ProfileKind kind);

/// Shape function f for circulant profiles, S_ab = f(|a-b|_N / W) / W before
/// rescaling.
struct ProfileFunction {
    std::function<double(double)> evaluator;
    std::optional<double> support_radius;  // nullopt = unbounded support
    std::string description;

    /// f = 1 on [0, 1]; recovers the periodic band with 2W+1 diagonals.
    static ProfileFunction indicator();
    /// f(x) = exp(-x^2 / 2), unbounded support.
    static ProfileFunction gauss();
    static ProfileFunction from_name(std::string_view name);
};

/// Variance profile S = (b_ij^2). Immutable after construction.
///
/// Circulant profiles keep only their first row; S_ij = row[(j - i) mod n].
/// Block band and explicit profiles keep the dense matrix.
class VarianceProfile {
public:
    /// Cyclic block tridiagonal profile with blocks of size w, entries 1/(3w).
    static VarianceProfile block_band(int n, int w);
    /// Symmetric circulant profile from f, rescaled to unit row sums.
    static VarianceProfile circulant(int n, int w, const ProfileFunction& f);
    /// Arbitrary nonnegative matrix. Not checked for double stochasticity;
    /// run validate() on the result.
    static VarianceProfile explicit_matrix(RMatrix entries, int w);
    /// Load an explicit profile from a headerless CSV of n rows of n values.
    static VarianceProfile load_csv(const std::string& path, int w);

    int n() const { return n_; }
    int w() const { return w_; }
    ProfileKind kind() const { return kind_; }
    /// C_W measured from the entries: (max S_ij) * w.
    double cw() const { return cw_; }
    std::string_view description() const { return description_; }

    double operator()(int i, int j) const;
    /// First row of a circulant profile, length n.
    const std::vector<double>& circulant_row() const;
    RMatrix dense() const;

private:
    VarianceProfile() = default;
    void finish();

    int n_ = 0;
    int w_ = 0;
    ProfileKind kind_ = ProfileKind::explicit_matrix;
    double cw_ = 0.0;
    std::string description_;
    RMatrix entries_;
    std::vector<double> row_;
};

struct ProfileCheck {
    std::string name;
    bool passed = true;
    double measured = 0.0;
};

struct ValidationReport {
    std::vector<ProfileCheck> checks;

    bool passed() const;
    const ProfileCheck& at(std::string_view name) const;
};

inline constexpr double kStochasticTolerance = 1e-10;

/// Diagnostic over the variance-profile invariants. Never throws.
///
/// Checks: nonnegative, row_sum, col_sum, bandwidth (measured = max S * w),
/// circulant_symmetry, block_pattern, and diagonal_band_mass, which reports
/// the largest c with S_ij >= c / w whenever |i-j|_N <= c w (always passes).
ValidationReport validate(const VarianceProfile& p);

// ---------------------------------------------------------------------------
// Bounded-inverse condition
// ---------------------------------------------------------------------------

enum class NormMethod { dense, circulant_fast, block_fast };

std::string_view to_string(NormMethod method);

struct NormOptions {
    /// Dense inversion fails above this (L1) condition estimate.
    double condition_cap = 1e12;
    /// Fast circulant path fails when min_p |1 - a S^(p)| drops below this.
    double spectrum_margin = 1e-10;
};

/// ||(I_2n - [[y2 S, y1 S^T], [y1 S, y2 S^T]])^{-1}||_{inf->inf}, assembled
/// and inverted densely.
double inverse_norm_dense(const VarianceProfile& p, Complex y1, Complex y2,
                          const NormOptions& opts = {});

/// ||(I - y S)^{-1}||_{inf->inf}, dense n x n inversion.
double resolvent_norm_dense(const VarianceProfile& p, Complex y,
                            const NormOptions& opts = {});

/// Exact value of inverse_norm_dense for a symmetric circulant profile,
/// through the DFT of the first row. The block inverse splits into
/// (P + Q)/2 and (P - Q)/2 with P = (I - aS)^{-1}, Q = (I - bS)^{-1},
/// a = y1 + y2, b = y2 - y1, and every row has the same absolute sum.
double inverse_norm_circulant_fast(const VarianceProfile& p, Complex y1, Complex y2,
                                   const NormOptions& opts = {});

/// First row of (I - y S)^{-1} for a symmetric circulant profile.
std::vector<Complex> circulant_resolvent_row(const VarianceProfile& p, Complex y,
                                             const NormOptions& opts = {});

/// Upper bound 1 + max(||D_y^{-1}||, ||D_y^{-1} - I||) on
/// ||(I - yS)^{-1}||_{inf->inf} for a block band profile, where D_y is the
/// L x L cyclic tridiagonal matrix with 1 - y/3 on the diagonal and -y/3 off
/// it.
double inverse_norm_block_fast(const VarianceProfile& p, Complex y,
                               const NormOptions& opts = {});

struct NormProbe {
    Complex y1;
    Complex y2;
    double norm = 0.0;
    NormMethod method = NormMethod::dense;
    bool ok = true;
    std::string status = "ok";
};

struct NormConditionReport {
    Complex z;
    double radius = 0.0;
    std::vector<NormProbe> probes;
    double max_norm = 0.0;
    /// True when the probes carry upper bounds (block_fast) not exact norms.
    bool upper_bound = false;
};

struct ScanOptions {
    NormOptions norm;
    /// Force a method; nullopt picks circulant_fast for circulant profiles
    /// and dense otherwise.
    std::optional<NormMethod> method;
    bool parallel = true;
};

/// Probe the bounded-inverse condition on a grid_points^4 lattice over
/// |y1 + 1 - |z|^2| <= radius, |y2 + |z|^2| <= radius (real and imaginary
/// axes of both parameters). Failed probes are recorded, not thrown.
NormConditionReport scan_norm_condition(const VarianceProfile& p, Complex z, double radius,
                                        int grid_points, const ScanOptions& opts = {});

/// CSV: y1_re,y1_im,y2_re,y2_im,norm,method,status
void write_norm_csv(const NormConditionReport& report, const std::string& path);

}  // namespace bandlab
