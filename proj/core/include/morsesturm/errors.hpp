#pragma once

#include <stdexcept>
#include <string>

namespace morsesturm {

/// Base class for everything thrown by this library.
struct MorseSturmError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rejected input: schema violations, asymmetry beyond tolerance,
/// non-monotone sample grids, nu out of [0, n].
struct InvalidInputError : MorseSturmError {
    using MorseSturmError::MorseSturmError;
};

/// Sampled profile too short to supply S' (fewer than 4 grid points).
struct DerivativeUnavailableError : InvalidInputError {
    using InvalidInputError::InvalidInputError;
};

/// Matrix argument has the wrong shape (e.g. odd dimension where a
/// 2n x 2n symplectic matrix is expected).
struct ShapeError : InvalidInputError {
    using InvalidInputError::InvalidInputError;
};

/// The hypothesis "1 is not a conjugate instant" failed for this system.
/// CLI maps this to exit status 2.
struct EndpointConjugateError : MorseSturmError {
    using MorseSturmError::MorseSturmError;
};

/// Base for failures of the numerical machinery. CLI maps these to exit 3.
struct NumericalError : MorseSturmError {
    using MorseSturmError::MorseSturmError;
};

struct PropagationDivergedError : NumericalError {
    PropagationDivergedError(const std::string& what, int step_index)
        : NumericalError(what), step(step_index) {}
    int step;
};

/// |f| fell below min_modulus on the contour; caller should change h.
struct ContourDegenerateError : NumericalError {
    using NumericalError::NumericalError;
};

/// Argument increments could not be refined below pi/2, or the
/// accumulated argument did not land on an integer multiple of 2*pi.
struct WindingUnresolvedError : NumericalError {
    using NumericalError::NumericalError;
};

/// Galerkin endpoint matrix has a numerically zero pivot.
struct EndpointDegenerateError : NumericalError {
    using NumericalError::NumericalError;
};

/// Inertia difference did not settle within the allowed N-doublings.
struct StabilizationFailureError : NumericalError {
    using NumericalError::NumericalError;
};

/// Every delta retry left some crossing form with a near-zero eigenvalue.
struct CrossingIrregularError : NumericalError {
    using NumericalError::NumericalError;
};

struct IoError : MorseSturmError {
    using MorseSturmError::MorseSturmError;
};

}  // namespace morsesturm
