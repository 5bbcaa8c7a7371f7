#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "morsesturm/propagator.hpp"
#include "morsesturm/system.hpp"
#include "morsesturm/winding.hpp"

namespace morsesturm {

/// Real instant t in (0, 1] where b_t is singular, with the kernel data
/// needed by crossing forms.
struct ConjugateInstant {
    double t = 0.0;
    int multiplicity = 0;                        // dim ker b_t
    std::vector<Eigen::VectorXd> kernel_basis;   // orthonormal, |b_t v| <= threshold
    double det_residual = 0.0;                   // |det b_t| at the located root
};

struct RealScanPoint {
    double t = 0.0;
    double det = 0.0;
    double sigma_min = 0.0;
};

struct ConjugateReport {
    std::vector<ConjugateInstant> instants;
    int mu_con = 0;
    int classical_sum = 0;  // sum of multiplicities
    bool endpoint_ok = false;
    std::vector<std::string> warnings;
    WindingTrace trace;               // contour samples behind mu_con
    std::vector<RealScanPoint> scan;  // real-axis scan behind the instants
};

/// |det b_1| relative to the median of |det b_t| over a coarse grid.
double endpoint_margin(const MorseSturmSystem& sys, int ode_steps = 2000,
                       double delta = 0.0);

/// Hypothesis gate: 1 is not a conjugate instant, i.e. margin > 1e-8.
bool endpoint_check(const MorseSturmSystem& sys, int ode_steps = 2000,
                    double delta = 0.0);

/// Root scan of a real function on [lo, hi]: sign-change brackets are
/// bisected; local minima of |f| are refined by golden section and kept
/// when the touch value is small; a minimum whose refined value changes
/// sign against its bracket splits into two bracketed roots. Roots closer
/// than 1e-9 are merged, pairs closer than 1e-6 recorded as cluster
/// warnings.
struct RootScan {
    std::vector<double> roots;
    std::vector<std::string> warnings;
};
RootScan scan_real_roots(const std::function<double(double)>& f, double lo,
                         double hi, int grid_size, double t_tol = 1e-10);
/// Variant over an already evaluated grid (ts strictly increasing,
/// fs = f(ts)); refinement still calls f.
RootScan scan_real_roots(const std::function<double(double)>& f,
                         const std::vector<double>& ts,
                         const std::vector<double>& fs, double t_tol = 1e-10);

struct InstantSearchOptions {
    int grid_size = 800;           // >= 64
    double rank_threshold = 1e-6;  // singular values below this x sigma_max
    int ode_steps = 2000;
    int scan_steps = 0;            // 0 -> ode_steps/4 clamped to [250, ode_steps]
    double delta = 0.0;            // family shift S_t + delta*id
};

std::vector<ConjugateInstant> find_conjugate_instants(
    const MorseSturmSystem& sys, const InstantSearchOptions& opts,
    std::vector<std::string>* warnings = nullptr,
    std::vector<RealScanPoint>* scan_out = nullptr);

/// mu_con = winding of z -> det b_z along the contour, plus the located
/// instants and the classical multiplicity sum. A degenerate contour is
/// retried once with doubled ode_steps and halved height.
ConjugateReport conjugate_index(const MorseSturmSystem& sys, const Contour& contour,
                                int ode_steps = 2000);

struct OffAxisDiagnostics {
    int samples = 0;
    double min_modulus = 0.0;
    double min_modulus_rel = 0.0;  // / median over the samples
    ComplexParameter argmin;
    int violations = 0;  // below 1e-10 relative
};

/// Samples |det b_z| off the real axis (|s| in [0.05, 1], t in [-0.5, 1.5]);
/// any near-zero signals an integrator bug since b_z is invertible there.
OffAxisDiagnostics lemma21_offaxis_check(const MorseSturmSystem& sys,
                                         int sample_count, int ode_steps = 500,
                                         std::uint64_t seed = 0x53D1A5u);

}  // namespace morsesturm
