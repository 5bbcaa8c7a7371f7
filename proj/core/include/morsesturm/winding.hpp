#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "morsesturm/errors.hpp"

namespace morsesturm {

/// Positively oriented rectangle with real extent [-h, 1+h] and imaginary
/// extent [-h, h]; winds once around every point of [0, 1] x {0}.
struct Contour {
    double height = 0.25;     // h > 0
    int initial_samples = 64; // >= 8

    /// Arclength-proportional parameterization, u in [0, 1), starting at
    /// the corner (-h, -h) and running counterclockwise.
    std::complex<double> point(double u) const;

    /// Sorted initial parameters; the four corners are always included.
    std::vector<double> initial_parameters() const;
};

struct WindingTrace {
    struct Sample {
        std::complex<double> z;
        std::complex<double> f;
        double cum_arg;
    };
    std::vector<Sample> samples;  // ordered along the contour, closed
    double total_arg = 0.0;       // accumulated argument, radians
    int winding = 0;
    double residual = 0.0;        // |total_arg/(2*pi) - winding|
    double min_modulus_seen = std::numeric_limits<double>::infinity();
};

using ComplexFunction = std::function<std::complex<double>(std::complex<double>)>;

/// Adaptive winding number of a nonvanishing function along the contour.
/// Segments whose endpoint values differ in argument by >= pi/2 are
/// bisected (depth cap 24). `min_modulus <= 0` selects the scale-free
/// default 1e-10 x median |f| over the initial samples.
///
/// Throws ContourDegenerateError when |f| drops below min_modulus and
/// WindingUnresolvedError when refinement or the integer residual fails.
WindingTrace winding_number(const ComplexFunction& f, const Contour& contour,
                            double min_modulus = 0.0);

using MatrixFunction = std::function<Eigen::MatrixXcd(std::complex<double>)>;

/// First Chern number of the clutching data: winding of z -> det a(z).
int chern_of_clutching(const MatrixFunction& a, const Contour& contour);

/// Winding of f(z) = arctan(t - 1/2) + i s over the rectangle with h = 0.5.
/// The normalization crossing of the spectral-flow axioms; must return 1.
int arctan_normalization_check();

}  // namespace morsesturm
