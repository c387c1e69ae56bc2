#include "qmb/metrics.hpp"

#include "qmb/channels.hpp"

#include <cmath>
#include <stdexcept>

namespace qmb {

namespace {

Eigen::Index factor_dim(const Matrix& j) {
    if (j.rows() != j.cols()) throw std::invalid_argument("expected a square matrix");
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(j.rows()))));
    if (d * d != j.rows()) throw std::invalid_argument("matrix size is not a perfect square d^2");
    return d;
}

} // namespace

double trace_norm(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("trace_norm: matrix must be square");
    if (a.size() == 0) return 0.0;
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if (hermitian_defect(a) <= 1e-14 * scale) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
        return es.eigenvalues().cwiseAbs().sum();
    }
    return trace_norm_svd(a);
}

double trace_norm_svd(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("trace_norm: matrix must be square");
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().sum();
}

double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

Matrix partial_trace(const Matrix& j, Subsystem traced) {
    const Eigen::Index d = factor_dim(j);
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index p = 0; p < d; ++p)
        for (Eigen::Index q = 0; q < d; ++q) {
            cplx acc = 0.0;
            for (Eigen::Index k = 0; k < d; ++k)
                acc += traced == Subsystem::Output ? j(k * d + p, k * d + q) : j(p * d + k, q * d + k);
            out(p, q) = acc;
        }
    return out;
}

ChoiBounds choi_bounds(const Matrix& j) {
    const Eigen::Index d = factor_dim(j);
    const double norm = trace_norm(j);
    return {norm / static_cast<double>(d), norm};
}

const char* to_string(DiamondStatus s) {
    switch (s) {
    case DiamondStatus::Converged: return "converged";
    case DiamondStatus::BoundOnly: return "bound_only";
    case DiamondStatus::Failed: return "failed";
    }
    return "?";
}

double diamond_lower_bound(const Matrix& j, const Matrix& sigma) {
    const Eigen::Index d = factor_dim(j);
    if (sigma.rows() != d || sigma.cols() != d)
        throw std::invalid_argument("diamond_lower_bound: sigma has the wrong dimension");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(sigma));
    RealVector w = es.eigenvalues().cwiseMax(0.0);
    const double total = w.sum();
    if (total <= 0.0) return 0.0;
    w /= total;
    const Matrix root = es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    const Matrix lift = identity_kron(d, root);
    return trace_norm(hermitian_part(lift * j * lift));
}

DiamondResult diamond_distance(const SuperOp& e, const SuperOp& f, const DiamondOptions& opts) {
    if (e.choi.rows() != f.choi.rows() || e.choi.cols() != f.choi.cols())
        throw std::invalid_argument("diamond_distance: channel dimensions differ");
    return diamond_norm(e.choi - f.choi, opts);
}

} // namespace qmb
