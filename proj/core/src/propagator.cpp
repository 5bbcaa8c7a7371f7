#include "morsesturm/propagator.hpp"

#include <cmath>
#include <sstream>
#include <type_traits>

#include <Eigen/LU>

namespace morsesturm {

namespace {

// One RK4 sweep over [0, 1] for Psi' = K(x) Psi with
//   K(x) = [[0, J], [-S(x) - shift, 0]],
// where S is the (real) clamped family and shift is delta (real run) or
// delta + i*s (complex run). The block structure makes applying K cheap:
// top rows are sign flips of the bottom rows, bottom rows one n x 2n matmul.
//
// `on_node(k, psi)` is called at every grid node including x = 0.
template <typename Scalar, typename NodeFn>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> rk4_sweep(
    const MorseSturmSystem& sys, double t, Scalar shift, int steps,
    NodeFn&& on_node) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    if (steps < 16) throw InvalidInputError("propagate: steps must be >= 16");

    const int n = sys.signature.dim();
    const int d = 2 * n;
    const Eigen::VectorXd jdiag = sys.signature.diagonal();
    const double h = 1.0 / steps;

    // S_t at the step start / midpoint / end, reused across stages.
    Eigen::MatrixXd s0(n, n), sm(n, n), s1(n, n);
    family_S_real(sys, t, 0.0, s0);

    Mat psi = Mat::Identity(d, d);
    Mat k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);

    auto apply_K = [&](const Eigen::MatrixXd& s, const Mat& in, Mat& out) {
        for (int i = 0; i < n; ++i) out.row(i) = jdiag(i) * in.row(n + i);
        if constexpr (std::is_same_v<Scalar, double>) {
            out.bottomRows(n).noalias() = -(s * in.topRows(n));
        } else {
            // S_t is real; multiply the real and imaginary parts separately.
            out.bottomRows(n).real() = -(s * in.topRows(n).real());
            out.bottomRows(n).imag() = -(s * in.topRows(n).imag());
        }
        if (shift != Scalar(0)) {
            for (int i = 0; i < n; ++i) out.row(n + i) -= shift * in.row(i);
        }
    };

    on_node(0, psi);
    for (int k = 0; k < steps; ++k) {
        const double x = k * h;
        family_S_real(sys, t, x + 0.5 * h, sm);
        family_S_real(sys, t, std::min(x + h, 1.0), s1);

        apply_K(s0, psi, k1);
        tmp = psi + (0.5 * h) * k1;
        apply_K(sm, tmp, k2);
        tmp = psi + (0.5 * h) * k2;
        apply_K(sm, tmp, k3);
        tmp = psi + h * k3;
        apply_K(s1, tmp, k4);
        psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        s0.swap(s1);
        if ((k & 63) == 63 && !psi.allFinite()) {
            std::ostringstream os;
            os << "propagation diverged at step " << k << " of " << steps;
            throw PropagationDivergedError(os.str(), k);
        }
        on_node(k + 1, psi);
    }
    if (!psi.allFinite()) {
        throw PropagationDivergedError("propagation diverged at final step", steps);
    }
    return psi;
}

}  // namespace

PropagatorResult propagate(const MorseSturmSystem& sys, ComplexParameter z,
                           int steps, double delta) {
    const int n = sys.signature.dim();
    const std::complex<double> shift(delta, z.s);
    Eigen::MatrixXcd psi = rk4_sweep<std::complex<double>>(
        sys, z.t, shift, steps, [](int, const Eigen::MatrixXcd&) {});
    PropagatorResult r;
    r.psi_end = std::move(psi);
    r.b_end = r.psi_end.topRightCorner(n, n);
    r.symplectic_defect = symplectic_defect(r.psi_end);
    r.steps = steps;
    return r;
}

RealPropagatorResult propagate_real(const MorseSturmSystem& sys, double t,
                                    int steps, double delta) {
    const int n = sys.signature.dim();
    Eigen::MatrixXd psi = rk4_sweep<double>(sys, t, delta, steps,
                                            [](int, const Eigen::MatrixXd&) {});
    RealPropagatorResult r;
    r.psi_end = std::move(psi);
    r.b_end = r.psi_end.topRightCorner(n, n);
    r.steps = steps;
    return r;
}

RealSolutionPath propagate_real_path(const MorseSturmSystem& sys, double t,
                                     int steps, double delta) {
    const int n = sys.signature.dim();
    RealSolutionPath path;
    path.xs.resize(steps + 1);
    path.b.resize(steps + 1);
    rk4_sweep<double>(sys, t, delta, steps,
                      [&](int k, const Eigen::MatrixXd& psi) {
                          path.xs[k] = static_cast<double>(k) / steps;
                          path.b[k] = psi.topRightCorner(n, n);
                      });
    return path;
}

std::complex<double> det_b(const MorseSturmSystem& sys, ComplexParameter z,
                           int steps, double delta) {
    return Eigen::PartialPivLU<Eigen::MatrixXcd>(
               propagate(sys, z, steps, delta).b_end)
        .determinant();
}

double det_b_real(const MorseSturmSystem& sys, double t, int steps, double delta) {
    return Eigen::PartialPivLU<Eigen::MatrixXd>(
               propagate_real(sys, t, steps, delta).b_end)
        .determinant();
}

Eigen::MatrixXd symplectic_form(int n) {
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    sigma.topRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    sigma.bottomLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    return sigma;
}

double symplectic_defect(const Eigen::MatrixXcd& psi) {
    if (psi.rows() != psi.cols() || psi.rows() % 2 != 0 || psi.rows() == 0) {
        throw ShapeError("symplectic_defect: need a square matrix of even dimension");
    }
    const int n = static_cast<int>(psi.rows()) / 2;
    const Eigen::MatrixXcd sigma =
        symplectic_form(n).cast<std::complex<double>>();
    // plain transpose, not adjoint
    return (psi.transpose() * sigma * psi - sigma).cwiseAbs().maxCoeff();
}

}  // namespace morsesturm
