#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "morsesturm/system.hpp"

namespace morsesturm {

/// Endpoint data of the fundamental solution Psi_z of
///   Psi' = sigma H_z(x) Psi,  Psi(0) = id,
/// with H_z = diag(-S_z, -J) and sigma = [[0,-I],[I,0]]. Columnwise this is
/// w1' = J w2, w2' = -S_z w1, so the upper-right n x n block of Psi_z(1) is
/// the shooting matrix b_z (initial data b_z(0) = 0, b_z'(0) = J).
struct PropagatorResult {
    Eigen::MatrixXcd psi_end;    // Psi_z(1), 2n x 2n
    Eigen::MatrixXcd b_end;      // upper-right block of psi_end
    double symplectic_defect = 0.0;  // ||Psi^T sigma Psi - sigma||_max
    int steps = 0;
};

/// Classical RK4 with `steps` uniform steps on [0, 1]. `delta` shifts the
/// family to S_z + delta*id (the perturbed path A_t + delta*id).
/// Throws PropagationDivergedError on non-finite intermediate values.
PropagatorResult propagate(const MorseSturmSystem& sys, ComplexParameter z,
                           int steps, double delta = 0.0);

/// Real-axis specialization (s = 0): Psi is real.
struct RealPropagatorResult {
    Eigen::MatrixXd psi_end;
    Eigen::MatrixXd b_end;
    int steps = 0;
};
RealPropagatorResult propagate_real(const MorseSturmSystem& sys, double t,
                                    int steps, double delta = 0.0);

/// b_t(x) stored on every RK4 grid node, for building Jacobi fields
/// u(x) = b_t(x) v from kernel vectors v.
struct RealSolutionPath {
    std::vector<double> xs;             // steps + 1 nodes
    std::vector<Eigen::MatrixXd> b;     // b_t at each node
};
RealSolutionPath propagate_real_path(const MorseSturmSystem& sys, double t,
                                     int steps, double delta = 0.0);

/// det b_z via LU with partial pivoting on the complex entries.
std::complex<double> det_b(const MorseSturmSystem& sys, ComplexParameter z,
                           int steps, double delta = 0.0);
double det_b_real(const MorseSturmSystem& sys, double t, int steps,
                  double delta = 0.0);

/// sigma = [[0, -I], [I, 0]] of size 2n x 2n.
Eigen::MatrixXd symplectic_form(int n);

/// ||Psi^T sigma Psi - sigma||_max with the plain (not conjugate) transpose.
/// Throws ShapeError on odd dimension.
double symplectic_defect(const Eigen::MatrixXcd& psi);

}  // namespace morsesturm
