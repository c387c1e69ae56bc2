// linalg.hpp: shared matrix aliases and small dense helpers

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace qmb {

using cplx = std::complex<double>;

/// Operators on the two-qubit space, bare ordering |00>, |01>, |10>, |11>
/// with |ij> = |i>_1 (x) |j>_2.
using Matrix4 = Eigen::Matrix<cplx, 4, 4>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr int kQubitDim = 4;
inline constexpr double kPi = 3.14159265358979323846;

// ||A - A^dagger||_max
inline double hermitian_defect(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

// Smallest eigenvalue of the Hermitian part of a.
inline double min_eigenvalue(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline double max_eigenvalue(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

// I_d (x) m: block diagonal with d copies of m.
inline Matrix identity_kron(Eigen::Index d, const Matrix& m) {
    const Eigen::Index k = m.rows();
    Matrix out = Matrix::Zero(d * k, d * k);
    for (Eigen::Index a = 0; a < d; ++a) out.block(a * k, a * k, k, k) = m;
    return out;
}

} // namespace qmb
