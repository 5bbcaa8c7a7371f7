#include "morsesturm/winding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/LU>

namespace morsesturm {

namespace {

constexpr int kMaxRefinementDepth = 24;
constexpr double kIntegerResidualTolerance = 1e-6;

double perimeter(double h) { return 2.0 * (1.0 + 2.0 * h) + 4.0 * h; }

}  // namespace

std::complex<double> Contour::point(double u) const {
    const double h = height;
    if (!(h > 0.0)) throw InvalidInputError("contour: height must be positive");
    u -= std::floor(u);
    const double P = perimeter(h);
    const double len_horiz = 1.0 + 2.0 * h;
    const double len_vert = 2.0 * h;
    double d = u * P;
    if (d < len_horiz) {  // bottom edge, left to right
        return {-h + d, -h};
    }
    d -= len_horiz;
    if (d < len_vert) {  // right edge, upward
        return {1.0 + h, -h + d};
    }
    d -= len_vert;
    if (d < len_horiz) {  // top edge, right to left
        return {1.0 + h - d, h};
    }
    d -= len_horiz;  // left edge, downward
    return {-h, h - d};
}

std::vector<double> Contour::initial_parameters() const {
    if (initial_samples < 8) {
        throw InvalidInputError("contour: need at least 8 initial samples");
    }
    const double P = perimeter(height);
    const double len_horiz = 1.0 + 2.0 * height;
    const double len_vert = 2.0 * height;
    std::vector<double> params;
    params.reserve(initial_samples + 4);
    for (int j = 0; j < initial_samples; ++j) {
        params.push_back(static_cast<double>(j) / initial_samples);
    }
    const double corners[4] = {0.0, len_horiz / P, (len_horiz + len_vert) / P,
                               (2.0 * len_horiz + len_vert) / P};
    params.insert(params.end(), std::begin(corners), std::end(corners));
    std::sort(params.begin(), params.end());
    params.erase(std::unique(params.begin(), params.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                 params.end());
    return params;
}

WindingTrace winding_number(const ComplexFunction& f, const Contour& contour,
                            double min_modulus) {
    using cplx = std::complex<double>;
    constexpr double pi = std::numbers::pi;

    const std::vector<double> params = contour.initial_parameters();
    std::vector<cplx> zs(params.size()), fs(params.size());
    std::vector<double> mods(params.size());
    for (size_t i = 0; i < params.size(); ++i) {
        zs[i] = contour.point(params[i]);
        fs[i] = f(zs[i]);
        mods[i] = std::abs(fs[i]);
    }

    if (min_modulus <= 0.0) {
        std::vector<double> sorted = mods;
        std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                         sorted.end());
        min_modulus = 1e-10 * sorted[sorted.size() / 2];
    }

    WindingTrace trace;
    auto check_modulus = [&](cplx z, double m) {
        trace.min_modulus_seen = std::min(trace.min_modulus_seen, m);
        if (m < min_modulus || !std::isfinite(m)) {
            std::ostringstream os;
            os << "contour degenerate: |f(" << z.real() << (z.imag() < 0 ? "" : "+")
               << z.imag() << "i)| = " << m << " below threshold " << min_modulus;
            throw ContourDegenerateError(os.str());
        }
    };
    for (size_t i = 0; i < params.size(); ++i) check_modulus(zs[i], mods[i]);

    trace.samples.push_back({zs[0], fs[0], 0.0});

    // Refine (u_a, u_b) until the argument increment is < pi/2, i.e. the
    // endpoint ratio has positive real part, then accumulate.
    double total = 0.0;
    auto advance = [&](auto&& self, double ua, cplx fa, double ub, cplx fb,
                       int depth) -> void {
        const cplx ratio = fb / fa;
        if (ratio.real() > 0.0) {
            total += std::arg(ratio);
            trace.samples.push_back({contour.point(ub), fb, total});
            return;
        }
        if (depth >= kMaxRefinementDepth) {
            std::ostringstream os;
            os << "winding not resolvable: refinement depth exceeded near u = "
               << ua;
            throw WindingUnresolvedError(os.str());
        }
        const double um = 0.5 * (ua + ub);
        const cplx zm = contour.point(um);
        const cplx fm = f(zm);
        check_modulus(zm, std::abs(fm));
        self(self, ua, fa, um, fm, depth + 1);
        self(self, um, fm, ub, fb, depth + 1);
    };

    for (size_t i = 0; i + 1 < params.size(); ++i) {
        advance(advance, params[i], fs[i], params[i + 1], fs[i + 1], 0);
    }
    // closing segment back to the first sample
    advance(advance, params.back(), fs.back(), 1.0, fs[0], 0);

    trace.total_arg = total;
    trace.winding = static_cast<int>(std::llround(total / (2.0 * pi)));
    trace.residual = std::abs(total / (2.0 * pi) - trace.winding);
    if (trace.residual >= kIntegerResidualTolerance) {
        std::ostringstream os;
        os << "winding not resolvable: accumulated argument " << total
           << " is not an integer multiple of 2*pi (residual " << trace.residual
           << ")";
        throw WindingUnresolvedError(os.str());
    }
    return trace;
}

int chern_of_clutching(const MatrixFunction& a, const Contour& contour) {
    return winding_number(
               [&](std::complex<double> z) {
                   return Eigen::PartialPivLU<Eigen::MatrixXcd>(a(z)).determinant();
               },
               contour)
        .winding;
}

int arctan_normalization_check() {
    Contour contour;
    contour.height = 0.5;
    return winding_number(
               [](std::complex<double> z) {
                   return std::complex<double>(std::atan(z.real() - 0.5), z.imag());
               },
               contour)
        .winding;
}

}  // namespace morsesturm
