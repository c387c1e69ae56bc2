#include "qmb/spectrum.hpp"

#include <cmath>
#include <stdexcept>

namespace qmb {

SystemParams SystemParams::from_detuning(double delta0, double J, double chi, double alpha,
                                         int n_max) {
    SystemParams p;
    p.omega1 = -delta0;
    p.omega2 = delta0;
    p.J = J;
    p.chi = chi;
    p.alpha = alpha;
    p.n_max = n_max;
    return p;
}

double SystemParams::t_m() const {
    if (chi == 0.0) throw std::domain_error("t_m undefined: chi must be nonzero");
    return kPi / (2.0 * std::abs(chi));
}

SystemParams SystemParams::scaled(double lambda) const {
    SystemParams p = *this;
    p.omega1 *= lambda;
    p.omega2 *= lambda;
    p.J *= lambda;
    p.chi *= lambda;
    return p;
}

SystemParams SystemParams::gauge_shifted(double shift) const {
    SystemParams p = *this;
    p.omega1 += shift;
    p.omega2 += shift;
    return p;
}

Matrix4 BasisAngle::rotation() const {
    const double c = std::cos(gamma);
    const double s = std::sin(gamma);
    Matrix4 r = Matrix4::Zero();
    r(0, 0) = 1.0;
    r(1, 1) = c;
    r(2, 1) = s;
    r(1, 2) = -s;
    r(2, 2) = c;
    r(3, 3) = 1.0;
    return r;
}

Matrix4 BasisAngle::qubit1_projector(int outcome) const {
    if (outcome != 0 && outcome != 1)
        throw std::invalid_argument("qubit1_projector: outcome must be 0 or 1");
    const Matrix4 r = rotation();
    Matrix4 p = Matrix4::Zero();
    // |0~> spans columns 0,1 of the rotation; |1~> spans columns 2,3.
    for (int k = 2 * outcome; k < 2 * outcome + 2; ++k) p += r.col(k) * r.col(k).adjoint();
    return p;
}

BasisAngle mixing_angle(const SystemParams& p, double n) {
    const double delta = p.detuning(n);
    if (delta == 0.0 && p.J == 0.0)
        throw std::domain_error("undefined mixing angle: delta_n = 0 and J = 0");
    if (delta == 0.0) return {sgn(p.J) * kPi / 4.0};
    const double ratio = std::abs(delta) / std::hypot(delta, p.J);
    const double c = std::sqrt(0.5 * (1.0 + ratio));
    const double s = sgn(p.J * delta) * std::sqrt(0.5 * (1.0 - ratio));
    return {std::atan2(s, c)};
}

EigenSystem eigenenergies(const SystemParams& p, double n) {
    const double delta = p.detuning(n);
    const double outer = -0.5 * (p.omega1 + p.omega2) + p.chi * n;
    const double inner = sgn(delta) * std::hypot(delta, p.J);
    EigenSystem es;
    es.n = n;
    es.gamma = (delta == 0.0 && p.J == 0.0) ? 0.0 : mixing_angle(p, n).gamma;
    es.energies = {outer, inner, -inner, -outer};
    return es;
}

Matrix4 qubit_hamiltonian(const SystemParams& p, double n) {
    const double delta = p.detuning(n);
    const double outer = -0.5 * (p.omega1 + p.omega2) + p.chi * n;
    Matrix4 h = Matrix4::Zero();
    h(0, 0) = outer;
    h(1, 1) = delta;
    h(2, 2) = -delta;
    h(3, 3) = -outer;
    h(1, 2) = p.J;
    h(2, 1) = p.J;
    return h;
}

Matrix4 propagator(const SystemParams& p, double n, double t) {
    const EigenSystem es = eigenenergies(p, n);
    const Matrix4 r = BasisAngle{es.gamma}.rotation();
    Matrix4 phases = Matrix4::Zero();
    for (int k = 0; k < 4; ++k) phases(k, k) = std::polar(1.0, -es.energies[k] * t);
    return r * phases * r.adjoint();
}

double n_of_gamma(const SystemParams& p, double gamma) {
    if (gamma == 0.0) throw std::domain_error("bare basis corresponds to n -> infinity");
    return (p.omega1 - p.omega2 + 2.0 * p.J / std::tan(2.0 * gamma)) / (2.0 * p.chi);
}

CrossoverEstimates crossover_estimates(const SystemParams& p) {
    const double splitting = std::hypot(p.delta0(), p.J);
    CrossoverEstimates out;
    if (p.alpha > 0.0) out.chi_c = splitting / (p.alpha * p.alpha);
    if (p.chi > 0.0) out.alpha_c = std::sqrt(splitting / p.chi);
    return out;
}

} // namespace qmb
