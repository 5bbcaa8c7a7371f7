#include "morsesturm/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace morsesturm {

namespace {

constexpr double kAsymmetryTolerance = 1e-6;

double relative_asymmetry(const Eigen::MatrixXd& a) {
    const double defect = (a - a.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return defect / scale;
}

// Checks symmetry to tolerance, returns (A + A^T)/2 and the observed defect.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a, const char* what,
                            double* defect_out) {
    if (a.rows() != a.cols()) {
        throw InvalidInputError(std::string(what) + ": matrix is not square");
    }
    if (!a.allFinite()) {
        throw InvalidInputError(std::string(what) + ": non-finite entry");
    }
    const double rel = relative_asymmetry(a);
    if (rel > kAsymmetryTolerance) {
        std::ostringstream os;
        os << what << ": asymmetry " << rel << " exceeds tolerance "
           << kAsymmetryTolerance;
        throw InvalidInputError(os.str());
    }
    if (defect_out) *defect_out = std::max(*defect_out, rel);
    return 0.5 * (a + a.transpose());
}

double clamp_unit(double t) { return std::min(std::max(t, 0.0), 1.0); }

}  // namespace

// ---------------------------------------------------------------- signature

SignatureMatrix::SignatureMatrix(int n, int nu) : n_(n), nu_(nu) {
    if (n < 1) throw InvalidInputError("signature: dimension n must be >= 1");
    if (nu < 0 || nu > n) {
        std::ostringstream os;
        os << "signature: index nu = " << nu << " outside [0, " << n << "]";
        throw InvalidInputError(os.str());
    }
}

Eigen::VectorXd SignatureMatrix::diagonal() const {
    Eigen::VectorXd d(n_);
    for (int i = 0; i < n_; ++i) d(i) = sign(i);
    return d;
}

Eigen::MatrixXd SignatureMatrix::dense() const {
    return diagonal().asDiagonal();
}

// ------------------------------------------------------------------ profile

struct CurvatureProfile::Impl {
    Kind kind = Kind::ConstDiag;
    int n = 0;
    double input_asymmetry = 0.0;

    Eigen::VectorXd values;  // const_diag

    std::vector<Eigen::MatrixXd> cosc;  // trig, cos(k*pi*x), k = 0..
    std::vector<Eigen::MatrixXd> sinc;  // trig, sin((k+1)*pi*x)

    std::vector<double> xs;             // samples
    std::vector<Eigen::MatrixXd> ys;
    std::vector<Eigen::MatrixXd> m2;    // natural-spline second derivatives
};

CurvatureProfile::CurvatureProfile(std::shared_ptr<const Impl> impl)
    : impl_(std::move(impl)) {}

CurvatureProfile CurvatureProfile::const_diag(const Eigen::VectorXd& values) {
    if (values.size() < 1) {
        throw InvalidInputError("const_diag profile: empty value list");
    }
    if (!values.allFinite()) {
        throw InvalidInputError("const_diag profile: non-finite value");
    }
    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::ConstDiag;
    impl->n = static_cast<int>(values.size());
    impl->values = values;
    return CurvatureProfile(std::move(impl));
}

CurvatureProfile CurvatureProfile::trig(std::vector<Eigen::MatrixXd> cos_coeff,
                                        std::vector<Eigen::MatrixXd> sin_coeff) {
    if (cos_coeff.empty() && sin_coeff.empty()) {
        throw InvalidInputError("trig profile: no coefficients");
    }
    const Eigen::MatrixXd& first =
        cos_coeff.empty() ? sin_coeff.front() : cos_coeff.front();
    const int n = static_cast<int>(first.rows());

    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Trig;
    impl->n = n;
    for (auto& c : cos_coeff) {
        if (c.rows() != n)
            throw InvalidInputError("trig profile: inconsistent matrix size");
        impl->cosc.push_back(symmetrized(c, "trig coefficient", &impl->input_asymmetry));
    }
    for (auto& s : sin_coeff) {
        if (s.rows() != n)
            throw InvalidInputError("trig profile: inconsistent matrix size");
        impl->sinc.push_back(symmetrized(s, "trig coefficient", &impl->input_asymmetry));
    }
    return CurvatureProfile(std::move(impl));
}

CurvatureProfile CurvatureProfile::samples(std::vector<double> xs,
                                           std::vector<Eigen::MatrixXd> values) {
    if (xs.size() < 2 || xs.size() != values.size()) {
        throw InvalidInputError("sampled profile: need matching xs/matrices, >= 2 points");
    }
    if (std::abs(xs.front()) > 1e-12 || std::abs(xs.back() - 1.0) > 1e-12) {
        throw InvalidInputError("sampled profile: grid must span [0, 1]");
    }
    for (size_t i = 0; i + 1 < xs.size(); ++i) {
        if (!(xs[i] < xs[i + 1])) {
            throw InvalidInputError("sampled profile: grid not strictly increasing");
        }
    }
    const int n = static_cast<int>(values.front().rows());

    auto impl = std::make_shared<Impl>();
    impl->kind = Kind::Samples;
    impl->n = n;
    impl->xs = std::move(xs);
    impl->ys.reserve(values.size());
    for (auto& v : values) {
        if (v.rows() != n)
            throw InvalidInputError("sampled profile: inconsistent matrix size");
        impl->ys.push_back(symmetrized(v, "sample matrix", &impl->input_asymmetry));
    }
    impl->xs.front() = 0.0;
    impl->xs.back() = 1.0;

    // Natural cubic spline, entrywise. Splining is linear, so the tridiagonal
    // solve goes through with matrix-valued unknowns directly.
    const int m = static_cast<int>(impl->xs.size()) - 1;  // interval count
    std::vector<Eigen::MatrixXd>& m2 = impl->m2;
    m2.assign(m + 1, Eigen::MatrixXd::Zero(n, n));
    if (m >= 2) {
        const int k = m - 1;  // interior unknowns
        std::vector<double> diag(k), sub(k), sup(k);
        std::vector<Eigen::MatrixXd> rhs(k);
        for (int i = 1; i <= k; ++i) {
            const double h0 = impl->xs[i] - impl->xs[i - 1];
            const double h1 = impl->xs[i + 1] - impl->xs[i];
            sub[i - 1] = h0;
            diag[i - 1] = 2.0 * (h0 + h1);
            sup[i - 1] = h1;
            rhs[i - 1] = 6.0 * ((impl->ys[i + 1] - impl->ys[i]) / h1 -
                                (impl->ys[i] - impl->ys[i - 1]) / h0);
        }
        // Thomas algorithm
        for (int i = 1; i < k; ++i) {
            const double w = sub[i] / diag[i - 1];
            diag[i] -= w * sup[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m2[k] = rhs[k - 1] / diag[k - 1];
        for (int i = k - 1; i >= 1; --i) {
            m2[i] = (rhs[i - 1] - sup[i - 1] * m2[i + 1]) / diag[i - 1];
        }
    }
    return CurvatureProfile(std::move(impl));
}

CurvatureProfile::Kind CurvatureProfile::kind() const { return impl_->kind; }
int CurvatureProfile::dim() const { return impl_->n; }
double CurvatureProfile::input_asymmetry() const { return impl_->input_asymmetry; }

bool CurvatureProfile::has_derivative() const {
    return impl_->kind != Kind::Samples || impl_->xs.size() >= 4;
}

void CurvatureProfile::eval(double x, Eigen::MatrixXd& out) const {
    const Impl& im = *impl_;
    const int n = im.n;
    out.resize(n, n);
    switch (im.kind) {
        case Kind::ConstDiag:
            out.setZero();
            out.diagonal() = im.values;
            return;
        case Kind::Trig: {
            out.setZero();
            for (size_t k = 0; k < im.cosc.size(); ++k) {
                out += std::cos(static_cast<double>(k) * M_PI * x) * im.cosc[k];
            }
            for (size_t k = 0; k < im.sinc.size(); ++k) {
                out += std::sin(static_cast<double>(k + 1) * M_PI * x) * im.sinc[k];
            }
            return;
        }
        case Kind::Samples: {
            const double xc = clamp_unit(x);
            auto it = std::upper_bound(im.xs.begin(), im.xs.end(), xc);
            int i = static_cast<int>(it - im.xs.begin()) - 1;
            i = std::clamp(i, 0, static_cast<int>(im.xs.size()) - 2);
            const double h = im.xs[i + 1] - im.xs[i];
            const double a = (im.xs[i + 1] - xc) / h;
            const double b = (xc - im.xs[i]) / h;
            out = a * im.ys[i] + b * im.ys[i + 1] +
                  ((a * a * a - a) * im.m2[i] + (b * b * b - b) * im.m2[i + 1]) *
                      (h * h / 6.0);
            return;
        }
    }
}

void CurvatureProfile::eval_derivative(double x, Eigen::MatrixXd& out) const {
    const Impl& im = *impl_;
    const int n = im.n;
    out.resize(n, n);
    switch (im.kind) {
        case Kind::ConstDiag:
            out.setZero();
            return;
        case Kind::Trig: {
            out.setZero();
            for (size_t k = 1; k < im.cosc.size(); ++k) {
                const double w = static_cast<double>(k) * M_PI;
                out -= w * std::sin(w * x) * im.cosc[k];
            }
            for (size_t k = 0; k < im.sinc.size(); ++k) {
                const double w = static_cast<double>(k + 1) * M_PI;
                out += w * std::cos(w * x) * im.sinc[k];
            }
            return;
        }
        case Kind::Samples: {
            if (!has_derivative()) {
                throw DerivativeUnavailableError(
                    "sampled profile needs at least 4 grid points for S'");
            }
            const double xc = clamp_unit(x);
            auto it = std::upper_bound(im.xs.begin(), im.xs.end(), xc);
            int i = static_cast<int>(it - im.xs.begin()) - 1;
            i = std::clamp(i, 0, static_cast<int>(im.xs.size()) - 2);
            const double h = im.xs[i + 1] - im.xs[i];
            const double a = (im.xs[i + 1] - xc) / h;
            const double b = (xc - im.xs[i]) / h;
            out = (im.ys[i + 1] - im.ys[i]) / h +
                  ((3.0 * b * b - 1.0) * im.m2[i + 1] - (3.0 * a * a - 1.0) * im.m2[i]) *
                      (h / 6.0);
            return;
        }
    }
}

Eigen::MatrixXd CurvatureProfile::operator()(double x) const {
    Eigen::MatrixXd out;
    eval(x, out);
    return out;
}

CurvatureProfile CurvatureProfile::shifted(double c) const {
    const Impl& im = *impl_;
    switch (im.kind) {
        case Kind::ConstDiag:
            return const_diag(im.values.array() + c);
        case Kind::Trig: {
            auto cosc = im.cosc;
            if (cosc.empty()) cosc.push_back(Eigen::MatrixXd::Zero(im.n, im.n));
            cosc[0] += c * Eigen::MatrixXd::Identity(im.n, im.n);
            return trig(std::move(cosc), im.sinc);
        }
        case Kind::Samples: {
            auto ys = im.ys;
            for (auto& y : ys) y += c * Eigen::MatrixXd::Identity(im.n, im.n);
            return samples(im.xs, std::move(ys));
        }
    }
    throw MorseSturmError("unreachable profile kind");
}

const Eigen::VectorXd& CurvatureProfile::const_values() const { return impl_->values; }
const std::vector<Eigen::MatrixXd>& CurvatureProfile::cos_coefficients() const {
    return impl_->cosc;
}
const std::vector<Eigen::MatrixXd>& CurvatureProfile::sin_coefficients() const {
    return impl_->sinc;
}
const std::vector<double>& CurvatureProfile::sample_xs() const { return impl_->xs; }
const std::vector<Eigen::MatrixXd>& CurvatureProfile::sample_values() const {
    return impl_->ys;
}

// ------------------------------------------------------------------- family

void family_S_real(const MorseSturmSystem& sys, double t, double x,
                   Eigen::MatrixXd& out) {
    if (x < -1e-12 || x > 1.0 + 1e-12) {
        throw InvalidInputError("family_S: x outside [0, 1]");
    }
    const double tau = clamp_unit(t);
    sys.profile.eval(tau * clamp_unit(x), out);
    out *= tau * tau;
}

void family_S(const MorseSturmSystem& sys, const ComplexParameter& z, double x,
              Eigen::MatrixXcd& out) {
    Eigen::MatrixXd re;
    family_S_real(sys, z.t, x, re);
    out = re.cast<std::complex<double>>();
    out.diagonal().array() += std::complex<double>(0.0, z.s);
}

Eigen::MatrixXcd family_S(const MorseSturmSystem& sys, const ComplexParameter& z,
                          double x) {
    Eigen::MatrixXcd out;
    family_S(sys, z, x, out);
    return out;
}

void family_S_dt(const MorseSturmSystem& sys, double t, double x,
                 Eigen::MatrixXd& out) {
    if (!sys.profile.has_derivative()) {
        throw DerivativeUnavailableError(
            "sampled profile needs at least 4 grid points for S'");
    }
    // d/dt [t^2 S(tx)] = 2t S(tx) + t^2 x S'(tx)
    Eigen::MatrixXd sp;
    sys.profile.eval(t * x, out);
    sys.profile.eval_derivative(t * x, sp);
    out = 2.0 * t * out + t * t * x * sp;
}

Eigen::MatrixXd family_S_dt(const MorseSturmSystem& sys, double t, double x) {
    Eigen::MatrixXd out;
    family_S_dt(sys, t, x, out);
    return out;
}

// ----------------------------------------------------------------- validate

ValidationReport validate(const MorseSturmSystem& sys) {
    if (sys.signature.dim() != sys.profile.dim()) {
        std::ostringstream os;
        os << "dimension mismatch: signature n = " << sys.signature.dim()
           << ", profile n = " << sys.profile.dim();
        throw InvalidInputError(os.str());
    }
    ValidationReport report{sys, {}};
    const double asym = sys.profile.input_asymmetry();
    if (asym > 0.0) {
        std::ostringstream os;
        os << "input asymmetry " << asym << " symmetrized away";
        report.defects.push_back(os.str());
    }
    return report;
}

// --------------------------------------------------------------------- json

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) {
        throw InvalidInputError("matrix: expected non-empty nested array");
    }
    const size_t rows = j.size();
    Eigen::MatrixXd m;
    for (size_t r = 0; r < rows; ++r) {
        const auto& row = j.at(r);
        if (!row.is_array() || row.size() != rows) {
            throw InvalidInputError("matrix: ragged or non-square nested array");
        }
        if (r == 0) m.resize(rows, rows);
        for (size_t c = 0; c < rows; ++c) {
            const auto& v = row.at(c);
            if (!v.is_number()) throw InvalidInputError("matrix: non-numeric entry");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                v.get<double>();
        }
    }
    if (!m.allFinite()) throw InvalidInputError("matrix: non-finite entry");
    return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<Eigen::MatrixXd> matrices_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw InvalidInputError("expected array of matrices");
    std::vector<Eigen::MatrixXd> out;
    out.reserve(j.size());
    for (const auto& m : j) out.push_back(matrix_from_json(m));
    return out;
}

}  // namespace

MorseSturmSystem system_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("nu") || !j.contains("S")) {
        throw InvalidInputError("system: need fields n, nu, S");
    }
    const int n = j.at("n").get<int>();
    const int nu = j.at("nu").get<int>();
    SignatureMatrix sig(n, nu);

    const auto& S = j.at("S");
    if (!S.is_object() || !S.contains("type")) {
        throw InvalidInputError("system: S needs a type field");
    }
    const std::string type = S.at("type").get<std::string>();

    CurvatureProfile profile = [&]() -> CurvatureProfile {
        if (type == "const_diag") {
            const auto& vals = S.at("values");
            if (!vals.is_array()) throw InvalidInputError("const_diag: values array");
            Eigen::VectorXd v(vals.size());
            for (size_t i = 0; i < vals.size(); ++i) v(i) = vals.at(i).get<double>();
            return CurvatureProfile::const_diag(v);
        }
        if (type == "trig") {
            std::vector<Eigen::MatrixXd> cosc, sinc;
            if (S.contains("cos")) cosc = matrices_from_json(S.at("cos"));
            if (S.contains("sin")) sinc = matrices_from_json(S.at("sin"));
            return CurvatureProfile::trig(std::move(cosc), std::move(sinc));
        }
        if (type == "samples") {
            const auto& xs_j = S.at("xs");
            std::vector<double> xs;
            for (const auto& x : xs_j) xs.push_back(x.get<double>());
            auto mats = matrices_from_json(S.at("matrices"));
            return CurvatureProfile::samples(std::move(xs), std::move(mats));
        }
        throw InvalidInputError("system: unknown profile type '" + type + "'");
    }();

    if (profile.dim() != n) {
        throw InvalidInputError("system: profile dimension differs from n");
    }
    return MorseSturmSystem{sig, profile};
}

nlohmann::json system_to_json(const MorseSturmSystem& sys) {
    nlohmann::json j;
    j["n"] = sys.signature.dim();
    j["nu"] = sys.signature.index();
    nlohmann::json S;
    switch (sys.profile.kind()) {
        case CurvatureProfile::Kind::ConstDiag: {
            S["type"] = "const_diag";
            nlohmann::json vals = nlohmann::json::array();
            const auto& v = sys.profile.const_values();
            for (Eigen::Index i = 0; i < v.size(); ++i) vals.push_back(v(i));
            S["values"] = std::move(vals);
            break;
        }
        case CurvatureProfile::Kind::Trig: {
            S["type"] = "trig";
            nlohmann::json cosj = nlohmann::json::array();
            for (const auto& c : sys.profile.cos_coefficients())
                cosj.push_back(matrix_to_json(c));
            nlohmann::json sinj = nlohmann::json::array();
            for (const auto& s : sys.profile.sin_coefficients())
                sinj.push_back(matrix_to_json(s));
            S["cos"] = std::move(cosj);
            S["sin"] = std::move(sinj);
            break;
        }
        case CurvatureProfile::Kind::Samples: {
            S["type"] = "samples";
            S["xs"] = sys.profile.sample_xs();
            nlohmann::json mats = nlohmann::json::array();
            for (const auto& m : sys.profile.sample_values())
                mats.push_back(matrix_to_json(m));
            S["matrices"] = std::move(mats);
            break;
        }
    }
    j["S"] = std::move(S);
    return j;
}

MorseSturmSystem load_system(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read system file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInputError("system file is not valid JSON: " + std::string(e.what()));
    }
    return system_from_json(j);
}

}  // namespace morsesturm
