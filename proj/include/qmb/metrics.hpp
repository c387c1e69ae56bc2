// metrics.hpp: operator and superoperator norms.
//
// Choi matrices follow the convention of channels.hpp: a d^2 x d^2 matrix
// with the output system on the first tensor factor and the input system
// on the second.

#pragma once

#include "qmb/linalg.hpp"

#include <string>

namespace qmb {

struct SuperOp;

/// Sum of singular values. Hermitian inputs go through the eigenvalue path.
double trace_norm(const Matrix& a);
/// Sum of singular values via SVD, regardless of structure.
double trace_norm_svd(const Matrix& a);
/// Largest singular value.
double spectral_norm(const Matrix& a);

/// Tensor factor of a Choi matrix.
enum class Subsystem { Output, Input };

/// Traces out `traced` from a d^2 x d^2 matrix on C^d (x) C^d.
///   traced = Output: A (x) B -> tr(A) B   (lives on the input space)
///   traced = Input:  A (x) B -> tr(B) A   (lives on the output space)
Matrix partial_trace(const Matrix& j, Subsystem traced);

struct ChoiBounds {
    double lo = 0.0;  ///< ||J||_1 / d
    double hi = 0.0;  ///< ||J||_1
};

ChoiBounds choi_bounds(const Matrix& j);

enum class DiamondStatus { Converged, BoundOnly, Failed };

const char* to_string(DiamondStatus s);

struct DiamondResult {
    double value = 0.0;
    double lower_cert = 0.0;
    double upper_cert = 0.0;
    DiamondStatus status = DiamondStatus::Failed;
    int iterations = 0;
};

struct DiamondOptions {
    double tol = 1e-7;          ///< absolute certified gap for Converged
    double floor = 1e-9;        ///< ||J||_1 at or below this is reported as a bracket only
    double rel_target = 1e-11;  ///< relative gap at which the solver stops early
    int max_iterations = 80;
};

/// Diamond norm of the Hermiticity-preserving map with Choi matrix j,
/// solved as a semidefinite program with primal and dual certificates.
/// Throws std::invalid_argument if j is not square of size d^2 or not
/// Hermitian.
DiamondResult diamond_norm(const Matrix& j, const DiamondOptions& opts = {});

/// ||e - f||_diamond.
DiamondResult diamond_distance(const SuperOp& e, const SuperOp& f, const DiamondOptions& opts = {});

/// Lower certificate for the state sigma on the input space:
/// || (I (x) sqrt(sigma)) J (I (x) sqrt(sigma)) ||_1.
double diamond_lower_bound(const Matrix& j, const Matrix& sigma);

} // namespace qmb
