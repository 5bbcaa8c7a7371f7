#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "morsesturm/errors.hpp"

namespace morsesturm {

/// Point z = t + i*s at which the complexified family is evaluated.
/// t is the path parameter, s the imaginary offset.
struct ComplexParameter {
    double t = 0.0;
    double s = 0.0;
    std::complex<double> value() const { return {t, s}; }
};

/// J = diag(+1 x (n - nu), -1 x nu). Diagonal, symmetric, J^2 = id.
class SignatureMatrix {
  public:
    SignatureMatrix(int n, int nu);

    int dim() const { return n_; }
    int index() const { return nu_; }
    double sign(int i) const { return i < n_ - nu_ ? 1.0 : -1.0; }
    Eigen::VectorXd diagonal() const;
    Eigen::MatrixXd dense() const;

  private:
    int n_;
    int nu_;
};

/// Curvature profile S(x) on [0, 1]: a symmetric n x n matrix for each x.
///
/// Three variants:
///  - const_diag: S(x) = diag(values), constant in x
///  - trig:       S(x) = sum_k C_k cos(k*pi*x) + sum_k D_k sin(k*pi*x)
///  - samples:    values on a strictly increasing grid 0 = x_0 < ... < x_m = 1,
///                interpolated entrywise by natural cubic splines
///
/// Input matrices are checked for symmetry (reject beyond 1e-6 relative)
/// and hard-symmetrized on construction; the pre-symmetrization defect is
/// kept for diagnostics.
class CurvatureProfile {
  public:
    enum class Kind { ConstDiag, Trig, Samples };

    static CurvatureProfile const_diag(const Eigen::VectorXd& values);
    // cos_coeff[k] multiplies cos(k*pi*x) (k = 0 is the constant term);
    // sin_coeff[k] multiplies sin((k+1)*pi*x).
    static CurvatureProfile trig(std::vector<Eigen::MatrixXd> cos_coeff,
                                 std::vector<Eigen::MatrixXd> sin_coeff);
    static CurvatureProfile samples(std::vector<double> xs,
                                    std::vector<Eigen::MatrixXd> values);

    Kind kind() const;
    int dim() const;
    /// False only for sampled profiles with fewer than 4 grid points.
    bool has_derivative() const;
    /// Max relative asymmetry of the raw input (before symmetrization).
    double input_asymmetry() const;

    void eval(double x, Eigen::MatrixXd& out) const;
    void eval_derivative(double x, Eigen::MatrixXd& out) const;
    Eigen::MatrixXd operator()(double x) const;

    /// Profile-level shift S(x) + c*id (distinct from the family-level
    /// delta shift S_t + delta*id used by the crossing machinery).
    CurvatureProfile shifted(double c) const;

    // access for serialization
    const Eigen::VectorXd& const_values() const;
    const std::vector<Eigen::MatrixXd>& cos_coefficients() const;
    const std::vector<Eigen::MatrixXd>& sin_coefficients() const;
    const std::vector<double>& sample_xs() const;
    const std::vector<Eigen::MatrixXd>& sample_values() const;

  private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
    explicit CurvatureProfile(std::shared_ptr<const Impl> impl);
};

/// Complete problem input: signature J and curvature profile S.
/// Endpoint nondegeneracy is a checked precondition of the index
/// operations, not an invariant of this type.
struct MorseSturmSystem {
    SignatureMatrix signature;
    CurvatureProfile profile;
};

/// S_z(x) = clamp(t)^2 * S(clamp(t)*x) + i*s*id with clamp(t) = min(max(t,0),1).
void family_S(const MorseSturmSystem& sys, const ComplexParameter& z, double x,
              Eigen::MatrixXcd& out);
Eigen::MatrixXcd family_S(const MorseSturmSystem& sys, const ComplexParameter& z,
                          double x);

/// Real part of the family at real parameter: S_t(x) = clamp(t)^2 S(clamp(t) x).
void family_S_real(const MorseSturmSystem& sys, double t, double x,
                   Eigen::MatrixXd& out);

/// d/dt [t^2 S(t x)] = 2t S(tx) + t^2 x S'(tx), for t in (0,1).
void family_S_dt(const MorseSturmSystem& sys, double t, double x,
                 Eigen::MatrixXd& out);
Eigen::MatrixXd family_S_dt(const MorseSturmSystem& sys, double t, double x);

struct ValidationReport {
    MorseSturmSystem normalized;
    std::vector<std::string> defects;  // within-tolerance findings
};

/// Re-checks symmetry/grid/nu invariants and returns the (symmetrized)
/// system. Inputs beyond tolerance throw InvalidInputError.
ValidationReport validate(const MorseSturmSystem& sys);

// ---- JSON (de)serialization ----
//
// {"n": int, "nu": int, "S": {"type": "const_diag", "values": [...]}
//                          | {"type": "trig", "cos": [[[...]],...], "sin": [...]}
//                          | {"type": "samples", "xs": [...], "matrices": [...]}}
// Matrices are row-major nested arrays of finite reals.

MorseSturmSystem system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const MorseSturmSystem& sys);
MorseSturmSystem load_system(const std::string& path);

}  // namespace morsesturm
