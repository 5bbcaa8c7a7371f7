#include "morsesturm/conjugate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace morsesturm {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
}

double bisect(const std::function<double(double)>& f, double a, double b,
              double fa, double fb, double tol) {
    // fa, fb of opposite sign
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if ((fa < 0.0) != (fm < 0.0)) {
            b = m;
            fb = fm;
        } else {
            a = m;
            fa = fm;
        }
    }
    (void)fb;
    return 0.5 * (a + b);
}

// Golden-section minimization of |f| on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b,
                  double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - phi * (b - a);
    double d = a + phi * (b - a);
    double fc = std::abs(f(c));
    double fd = std::abs(f(d));
    while (b - a > tol) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = std::abs(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = std::abs(f(d));
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double endpoint_margin(const MorseSturmSystem& sys, int ode_steps, double delta) {
    constexpr int kCoarseGrid = 32;
    const int coarse_steps = std::max(250, ode_steps / 8);
    std::vector<double> mags;
    mags.reserve(kCoarseGrid + 1);
    for (int j = 0; j <= kCoarseGrid; ++j) {
        const double t = static_cast<double>(j) / kCoarseGrid;
        mags.push_back(std::abs(det_b_real(sys, t, coarse_steps, delta)));
    }
    const double scale = median(mags);
    const double end = std::abs(det_b_real(sys, 1.0, ode_steps, delta));
    if (scale <= 0.0) return 0.0;
    return end / scale;
}

bool endpoint_check(const MorseSturmSystem& sys, int ode_steps, double delta) {
    return endpoint_margin(sys, ode_steps, delta) > 1e-8;
}

RootScan scan_real_roots(const std::function<double(double)>& f, double lo,
                         double hi, int grid_size, double t_tol) {
    if (grid_size < 64) throw InvalidInputError("root scan: grid_size must be >= 64");
    const int G = grid_size;
    std::vector<double> ts(G + 1), fs(G + 1);
    for (int j = 0; j <= G; ++j) {
        ts[j] = lo + (hi - lo) * static_cast<double>(j) / G;
        fs[j] = f(ts[j]);
    }
    return scan_real_roots(f, ts, fs, t_tol);
}

RootScan scan_real_roots(const std::function<double(double)>& f,
                         const std::vector<double>& ts,
                         const std::vector<double>& fs, double t_tol) {
    if (ts.size() != fs.size() || ts.size() < 65) {
        throw InvalidInputError("root scan: grid_size must be >= 64");
    }
    RootScan result;
    const int G = static_cast<int>(ts.size()) - 1;
    std::vector<double> mags;
    mags.reserve(G + 1);
    for (double v : fs) mags.push_back(std::abs(v));
    const double scale = std::max(median(mags), 1e-300);

    std::vector<double> roots;
    std::vector<bool> cell_has_sign_change(G, false);

    for (int j = 0; j < G; ++j) {
        if ((fs[j] < 0.0) != (fs[j + 1] < 0.0)) {
            cell_has_sign_change[j] = true;
            roots.push_back(bisect(f, ts[j], ts[j + 1], fs[j], fs[j + 1], t_tol));
        }
    }

    // Even-multiplicity roots touch zero without a sign change: refine
    // local minima of |f| that dip well below the scan scale.
    for (int j = 1; j < G; ++j) {
        if (cell_has_sign_change[j - 1] || cell_has_sign_change[j]) continue;
        const double m = std::abs(fs[j]);
        if (m > std::abs(fs[j - 1]) || m > std::abs(fs[j + 1])) continue;
        if (m >= 1e-2 * scale) continue;
        const double tmin = golden_min(f, ts[j - 1], ts[j + 1], t_tol);
        const double fmin = f(tmin);
        if ((fmin < 0.0) != (fs[j - 1] < 0.0)) {
            // The dip crosses zero twice inside one cell; split the bracket.
            roots.push_back(bisect(f, ts[j - 1], tmin, fs[j - 1], fmin, t_tol));
            roots.push_back(bisect(f, tmin, ts[j + 1], fmin, fs[j + 1], t_tol));
        } else {
            roots.push_back(tmin);
        }
    }

    std::sort(roots.begin(), roots.end());
    for (size_t i = 0; i < roots.size(); ++i) {
        if (!result.roots.empty() && roots[i] - result.roots.back() < 1e-9) {
            continue;  // same root found twice
        }
        if (!result.roots.empty() && roots[i] - result.roots.back() < 1e-6) {
            std::ostringstream os;
            os << "unresolved cluster: roots at " << result.roots.back() << " and "
               << roots[i] << " closer than 1e-6";
            result.warnings.push_back(os.str());
        }
        result.roots.push_back(roots[i]);
    }
    return result;
}

std::vector<ConjugateInstant> find_conjugate_instants(
    const MorseSturmSystem& sys, const InstantSearchOptions& opts,
    std::vector<std::string>* warnings, std::vector<RealScanPoint>* scan_out) {
    if (!endpoint_check(sys, opts.ode_steps, opts.delta)) {
        throw EndpointConjugateError(
            "1 is a conjugate instant; index operations are undefined");
    }
    const int scan_steps =
        opts.scan_steps > 0
            ? opts.scan_steps
            : std::clamp(opts.ode_steps / 4, 250, std::max(250, opts.ode_steps));

    auto det_at = [&](double t) {
        return det_b_real(sys, t, scan_steps, opts.delta);
    };

    // The scan covers (0, 1]; b_t -> tJ near t = 0, so start just above 0.
    const int G = opts.grid_size;
    const double lo = 1.0 / G;
    std::vector<double> ts(G + 1), dets(G + 1);
    for (int j = 0; j <= G; ++j) {
        const double t = lo + (1.0 - lo) * static_cast<double>(j) / G;
        const Eigen::MatrixXd b = propagate_real(sys, t, scan_steps, opts.delta).b_end;
        ts[j] = t;
        dets[j] = Eigen::PartialPivLU<Eigen::MatrixXd>(b).determinant();
        if (scan_out) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
            scan_out->push_back({t, dets[j], svd.singularValues().tail(1)(0)});
        }
    }
    RootScan scan = scan_real_roots(det_at, ts, dets);
    if (warnings) {
        warnings->insert(warnings->end(), scan.warnings.begin(), scan.warnings.end());
    }

    std::vector<ConjugateInstant> instants;
    for (double root : scan.roots) {
        const Eigen::MatrixXd b =
            propagate_real(sys, root, opts.ode_steps, opts.delta).b_end;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeFullV);
        const Eigen::VectorXd sv = svd.singularValues();
        const double smax = sv(0);
        const double threshold = opts.rank_threshold * smax;
        int mult = 0;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) < threshold) ++mult;
        }
        if (mult == 0) continue;  // scan candidate did not survive the rank test

        ConjugateInstant inst;
        inst.t = root;
        inst.multiplicity = mult;
        inst.det_residual = std::abs(sv.prod());
        for (Eigen::Index i = sv.size() - mult; i < sv.size(); ++i) {
            inst.kernel_basis.push_back(svd.matrixV().col(i));
        }
        instants.push_back(std::move(inst));
    }
    return instants;
}

ConjugateReport conjugate_index(const MorseSturmSystem& sys, const Contour& contour,
                                int ode_steps) {
    ConjugateReport report;
    report.endpoint_ok = endpoint_check(sys, ode_steps);
    if (!report.endpoint_ok) {
        throw EndpointConjugateError(
            "1 is a conjugate instant; conjugate index is undefined");
    }

    auto run_winding = [&](const Contour& c, int steps) {
        return winding_number(
            [&](std::complex<double> z) {
                return det_b(sys, ComplexParameter{z.real(), z.imag()}, steps);
            },
            c);
    };
    try {
        report.trace = run_winding(contour, ode_steps);
    } catch (const ContourDegenerateError&) {
        // Lemma 2.1 rules out true zeros off the axis; treat as resolution
        // failure and retry once with a finer integrator and tighter contour.
        Contour retry = contour;
        retry.height = 0.5 * contour.height;
        report.warnings.push_back(
            "contour degenerate; retried with doubled ode steps and halved height");
        report.trace = run_winding(retry, 2 * ode_steps);
    }
    report.mu_con = report.trace.winding;

    InstantSearchOptions opts;
    opts.ode_steps = ode_steps;
    report.instants =
        find_conjugate_instants(sys, opts, &report.warnings, &report.scan);
    report.classical_sum = 0;
    for (const auto& inst : report.instants) report.classical_sum += inst.multiplicity;
    return report;
}

OffAxisDiagnostics lemma21_offaxis_check(const MorseSturmSystem& sys,
                                         int sample_count, int ode_steps,
                                         std::uint64_t seed) {
    OffAxisDiagnostics diag;
    diag.samples = sample_count;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> t_dist(-0.5, 1.5);
    std::uniform_real_distribution<double> s_dist(0.05, 1.0);

    std::vector<double> mods;
    std::vector<ComplexParameter> zs;
    mods.reserve(sample_count);
    for (int i = 0; i < sample_count; ++i) {
        ComplexParameter z{t_dist(rng), s_dist(rng)};
        if (rng() & 1u) z.s = -z.s;
        zs.push_back(z);
        mods.push_back(std::abs(det_b(sys, z, ode_steps)));
    }
    if (mods.empty()) return diag;

    const double med = std::max(median(mods), 1e-300);
    diag.min_modulus = mods[0];
    diag.argmin = zs[0];
    for (size_t i = 0; i < mods.size(); ++i) {
        if (mods[i] < diag.min_modulus) {
            diag.min_modulus = mods[i];
            diag.argmin = zs[i];
        }
        if (mods[i] / med < 1e-10) ++diag.violations;
    }
    diag.min_modulus_rel = diag.min_modulus / med;
    return diag;
}

}  // namespace morsesturm
