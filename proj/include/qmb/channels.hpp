// channels.hpp: measurement superoperators on two qubits.
//
// Every channel here is stored in Kraus-pair form
//
//     E(rho) = sum_{a,b} C(a,b) K_a rho K_b^dagger,    C Hermitian,
//
// together with its Choi matrix
//
//     J(E) = sum_{i,j} E(|i><j|) (x) |i><j|,
//     J[(a,i),(b,j)] = <a| E(|i><j|) |b>,   row index a*d + i.
//
// The output index sits on the first tensor factor and the input index on
// the second. With vec(K)[a*d + i] = K(a,i) this gives
// J = sum_{a,b} C(a,b) vec(K_a) vec(K_b)^dagger.

#pragma once

#include "qmb/linalg.hpp"
#include "qmb/spectrum.hpp"

#include <string>
#include <vector>

namespace qmb {

/// Readout result: + is the pointer state of qubit 1 in |0>.
enum class Outcome : int { Plus = +1, Minus = -1 };

inline int sign_of(Outcome x) { return static_cast<int>(x); }
inline Outcome flipped(Outcome x) { return x == Outcome::Plus ? Outcome::Minus : Outcome::Plus; }

enum class ChannelKind { NiggGirvin, Ideal, Snr };

const char* to_string(ChannelKind kind);

struct SuperOp {
    ChannelKind kind = ChannelKind::Ideal;
    SystemParams params;
    Outcome outcome = Outcome::Plus;
    double gamma = 0.0;                ///< reference basis angle (ideal/snr channels)
    std::vector<Matrix4> ops;          ///< K_a
    Matrix coeffs;                     ///< C(a,b)
    Matrix choi;                       ///< 16x16
    std::vector<std::string> warnings;
};

/// Coefficient g_x(m, n) = <m|E_x|n><n|alpha><alpha|m> of the halfplane POVM.
/// chi_sign selects which halfplane belongs to outcome +.
cplx g_coefficient(double alpha, Outcome x, int n, int m, int chi_sign);

/// Poisson-tail heuristic: n_max >= alpha^2 + 6 alpha + 10.
bool truncation_sufficient(double alpha, int n_max);

/// Discretised dispersive readout: coherent-state probe, interaction for t_m,
/// halfplane POVM on the resonator, resonator traced out.
SuperOp nigg_girvin_channel(const SystemParams& p, Outcome x);

struct ChiMatrix {
    Eigen::Matrix2d entries;
};

ChiMatrix chi_matrix(double alpha, Outcome x);

/// How the free evolution of a reference measurement is built. All three
/// are diagonal in the gamma frame and agree at gamma = gamma_0.
///  - StarkFree: propagator of Fock sector n(gamma) with the pointer phase
///    chi n(gamma) Z~_1 removed; gamma-frame energies
///    (-(w1+w2)/2, d0 + J tan(gamma), -(d0 + J tan(gamma)), (w1+w2)/2).
///    Defined for every gamma, reduces to U_0 at gamma = 0.
///  - Diagonal:  phases from the diagonal of H_0 expressed in the gamma frame.
///  - Literal:   propagator of Fock sector n(gamma); undefined at gamma = 0.
enum class IdealVariant { StarkFree, Diagonal, Literal };
enum class Snr { Perfect, Finite };

const char* to_string(IdealVariant v);
IdealVariant parse_variant(const std::string& s);

/// Reference single-qubit measurement of qubit 1 in the gamma-dressed basis:
/// E(rho) = sum_{ij} w_ij P_i U rho U^dagger P_j.
SuperOp ideal_channel(const SystemParams& p, BasisAngle gamma, Outcome x,
                      IdealVariant variant = IdealVariant::StarkFree, Snr snr = Snr::Perfect);

/// Free evolution used by ideal_channel.
Matrix4 reference_evolution(const SystemParams& p, BasisAngle gamma, IdealVariant variant);

/// Unnormalised post-measurement state. Rejects inputs that are not density
/// matrices (Hermitian, PSD, unit trace to 1e-10).
Matrix4 apply(const SuperOp& e, const Matrix4& rho);

/// Same map evaluated by contracting the Choi matrix.
Matrix apply_choi(const Matrix& choi, const Matrix& rho);

/// Choi matrix of sum_{a,b} C(a,b) K_a . K_b^dagger.
Matrix choi_from_kraus_pairs(const std::vector<Matrix4>& ops, const Matrix& coeffs);

/// Conjugates both input and output of the map by v: rho -> v E(v^dagger rho v) v^dagger.
SuperOp conjugated(const SuperOp& e, const Matrix4& v);

} // namespace qmb
