// spectrum.hpp: two-qubit + readout-resonator Hamiltonian, its exact
// diagonalisation per Fock sector, and the one-parameter family of
// candidate measurement bases.

#pragma once

#include "qmb/linalg.hpp"

#include <array>
#include <optional>

namespace qmb {

/// Physical parameters. All frequencies are angular frequencies in one
/// consistent unit; every observable depends only on their ratios to chi.
struct SystemParams {
    double omega1 = -102.0;
    double omega2 = 102.0;
    double J = 3.8;
    double chi = 5.0;
    double alpha = 2.0;
    int n_max = 40;

    /// omega1 = -delta0, omega2 = +delta0.
    static SystemParams from_detuning(double delta0, double J, double chi, double alpha,
                                      int n_max);

    double delta0() const { return 0.5 * (omega2 - omega1); }
    /// Detuning of the {|01>,|10>} block at resonator occupation n.
    double detuning(double n) const { return delta0() + chi * n; }
    /// Interaction time pi / (2 |chi|). Throws std::domain_error for chi = 0.
    double t_m() const;

    /// Copy with every frequency multiplied by lambda.
    SystemParams scaled(double lambda) const;
    /// Copy with omega1 and omega2 both shifted by shift.
    SystemParams gauge_shifted(double shift) const;
};

/// sgn with sgn(0) = +1.
inline double sgn(double x) { return x >= 0.0 ? 1.0 : -1.0; }

/// Basis angle gamma together with the rotation taking bare states to the
/// gamma-dressed states (|00>, |0~1~>, |1~0~>, |11>):
///   |0~1~> =  cos(gamma)|01> + sin(gamma)|10>
///   |1~0~> = -sin(gamma)|01> + cos(gamma)|10>
struct BasisAngle {
    double gamma = 0.0;

    Matrix4 rotation() const;
    /// Projector of qubit 1 onto |0~> (outcome 0) or |1~> (outcome 1).
    Matrix4 qubit1_projector(int outcome) const;
};

struct EigenSystem {
    double n = 0.0;
    double gamma = 0.0;
    /// E^1..E^4, paired with the columns of BasisAngle{gamma}.rotation().
    std::array<double, 4> energies{};
};

/// gamma_n with tan(2 gamma_n) = J / delta_n and gamma_n -> 0 as J -> 0.
/// Range is (-pi/4, pi/4] except at delta_n = 0 with J < 0, where the
/// eigenvector pairing forces -pi/4. Throws std::domain_error when
/// delta_n = J = 0.
BasisAngle mixing_angle(const SystemParams& p, double n);

EigenSystem eigenenergies(const SystemParams& p, double n);

/// Qubit Hamiltonian of Fock sector n (a^dagger a replaced by n).
Matrix4 qubit_hamiltonian(const SystemParams& p, double n);

/// exp(-i H_n t) through the exact block rotation.
Matrix4 propagator(const SystemParams& p, double n, double t);

/// Occupation n(gamma) at which the gamma-rotated basis diagonalises H_n.
/// Throws std::domain_error for gamma = 0 (bare basis, n -> infinity).
double n_of_gamma(const SystemParams& p, double gamma);

struct CrossoverEstimates {
    std::optional<double> chi_c;    ///< sqrt(delta0^2 + J^2) / alpha^2, needs alpha > 0
    std::optional<double> alpha_c;  ///< sqrt(sqrt(delta0^2 + J^2) / chi), needs chi > 0
};

CrossoverEstimates crossover_estimates(const SystemParams& p);

} // namespace qmb
