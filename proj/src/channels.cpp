#include "qmb/channels.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace qmb {

const char* to_string(ChannelKind kind) {
    switch (kind) {
    case ChannelKind::NiggGirvin: return "nigg_girvin";
    case ChannelKind::Ideal: return "ideal";
    case ChannelKind::Snr: return "snr";
    }
    return "?";
}

const char* to_string(IdealVariant v) {
    switch (v) {
    case IdealVariant::StarkFree: return "stark_free";
    case IdealVariant::Diagonal: return "diagonal";
    case IdealVariant::Literal: return "literal";
    }
    return "?";
}

IdealVariant parse_variant(const std::string& s) {
    if (s == "diagonal") return IdealVariant::Diagonal;
    if (s == "literal") return IdealVariant::Literal;
    if (s == "stark_free") return IdealVariant::StarkFree;
    throw std::invalid_argument("unknown ideal-channel variant '" + s +
                                "' (expected stark_free, diagonal or literal)");
}

cplx g_coefficient(double alpha, Outcome x, int n, int m, int chi_sign) {
    if (n < 0 || m < 0) throw std::invalid_argument("g_coefficient: negative Fock index");
    if (n == m) {
        if (alpha == 0.0) return n == 0 ? 0.5 : 0.0;
        const double log_mag = -alpha * alpha + 2.0 * n * std::log(alpha) - std::lgamma(n + 1.0);
        return 0.5 * std::exp(log_mag);
    }
    const int diff = m - n;
    if (diff % 2 == 0 || alpha == 0.0) return 0.0;
    const double log_mag = -alpha * alpha + (n + m) * std::log(alpha) +
                           std::lgamma(0.5 * (n + m) + 1.0) - std::lgamma(n + 1.0) -
                           std::lgamma(m + 1.0) - std::log(kPi);
    const double im = -sign_of(x) * chi_sign * std::exp(log_mag) / diff;
    return {0.0, im};
}

bool truncation_sufficient(double alpha, int n_max) {
    return n_max >= alpha * alpha + 6.0 * alpha + 10.0;
}

Matrix choi_from_kraus_pairs(const std::vector<Matrix4>& ops, const Matrix& coeffs) {
    const auto k = static_cast<Eigen::Index>(ops.size());
    if (coeffs.rows() != k || coeffs.cols() != k)
        throw std::invalid_argument("choi_from_kraus_pairs: coefficient table size mismatch");
    Matrix vecs(kQubitDim * kQubitDim, k);
    for (Eigen::Index c = 0; c < k; ++c)
        for (int a = 0; a < kQubitDim; ++a)
            for (int i = 0; i < kQubitDim; ++i) vecs(a * kQubitDim + i, c) = ops[c](a, i);
    return vecs * coeffs * vecs.adjoint();
}

SuperOp nigg_girvin_channel(const SystemParams& p, Outcome x) {
    if (p.n_max < 0) throw std::invalid_argument("nigg_girvin_channel: n_max must be >= 0");
    if (p.alpha < 0.0) throw std::invalid_argument("nigg_girvin_channel: alpha must be >= 0");
    const double t = p.t_m();
    const int chi_sign = p.chi > 0.0 ? 1 : -1;
    const int count = p.n_max + 1;

    SuperOp e;
    e.kind = ChannelKind::NiggGirvin;
    e.params = p;
    e.outcome = x;
    e.ops.reserve(count);
    for (int n = 0; n < count; ++n) e.ops.push_back(propagator(p, n, t));
    // C(n, m) multiplies Q_n rho Q_m^dagger.
    e.coeffs.resize(count, count);
    for (int n = 0; n < count; ++n)
        for (int m = 0; m < count; ++m) e.coeffs(n, m) = g_coefficient(p.alpha, x, n, m, chi_sign);
    e.choi = choi_from_kraus_pairs(e.ops, e.coeffs);

    if (!truncation_sufficient(p.alpha, p.n_max)) {
        std::ostringstream msg;
        msg << "n_max = " << p.n_max << " is below alpha^2 + 6 alpha + 10 = "
            << p.alpha * p.alpha + 6.0 * p.alpha + 10.0 << " for alpha = " << p.alpha
            << "; truncation error may be visible";
        e.warnings.push_back(msg.str());
    }
    return e;
}

ChiMatrix chi_matrix(double alpha, Outcome x) {
    if (alpha < 0.0) throw std::invalid_argument("chi_matrix: alpha must be >= 0");
    const double e = std::erf(alpha);
    const double coh = std::exp(-2.0 * alpha * alpha);
    ChiMatrix out;
    out.entries << 1.0 + sign_of(x) * e, coh, coh, 1.0 - sign_of(x) * e;
    out.entries *= 0.5;
    return out;
}

Matrix4 reference_evolution(const SystemParams& p, BasisAngle gamma, IdealVariant variant) {
    const double t = p.t_m();
    if (variant == IdealVariant::Literal) {
        if (gamma.gamma == 0.0)
            throw std::domain_error("n(gamma) diverges: literal variant needs gamma != 0");
        return propagator(p, n_of_gamma(p, gamma.gamma), t);
    }
    const Matrix4 r = gamma.rotation();
    std::array<double, 4> energies{};
    if (variant == IdealVariant::Diagonal) {
        const Matrix4 h_frame = r.adjoint() * qubit_hamiltonian(p, 0.0) * r;
        for (int k = 0; k < 4; ++k) energies[k] = h_frame(k, k).real();
    } else {
        // sgn(delta_n) sqrt(delta_n^2 + J^2) - chi n at n = n(gamma), in closed form.
        const double outer = -0.5 * (p.omega1 + p.omega2);
        const double inner = p.delta0() + p.J * std::tan(gamma.gamma);
        energies = {outer, inner, -inner, -outer};
    }
    Matrix4 phases = Matrix4::Zero();
    for (int k = 0; k < 4; ++k) phases(k, k) = std::polar(1.0, -energies[k] * t);
    return r * phases * r.adjoint();
}

SuperOp ideal_channel(const SystemParams& p, BasisAngle gamma, Outcome x, IdealVariant variant,
                      Snr snr) {
    const Matrix4 u = reference_evolution(p, gamma, variant);

    SuperOp e;
    e.kind = snr == Snr::Finite ? ChannelKind::Snr : ChannelKind::Ideal;
    e.params = p;
    e.outcome = x;
    e.gamma = gamma.gamma;
    e.ops = {gamma.qubit1_projector(0) * u, gamma.qubit1_projector(1) * u};
    e.coeffs = Matrix::Zero(2, 2);
    if (snr == Snr::Finite) {
        e.coeffs = chi_matrix(p.alpha, x).entries.cast<cplx>();
    } else {
        e.coeffs(x == Outcome::Plus ? 0 : 1, x == Outcome::Plus ? 0 : 1) = 1.0;
    }
    e.choi = choi_from_kraus_pairs(e.ops, e.coeffs);
    return e;
}

namespace {

void require_density(const Matrix& rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("apply: rho must be square");
    if (hermitian_defect(rho) > 1e-10) throw std::invalid_argument("apply: rho is not Hermitian");
    if (std::abs(rho.trace() - cplx(1.0)) > 1e-10)
        throw std::invalid_argument("apply: rho does not have unit trace");
    if (min_eigenvalue(rho) < -1e-10)
        throw std::invalid_argument("apply: rho is not positive semidefinite");
}

} // namespace

Matrix4 apply(const SuperOp& e, const Matrix4& rho) {
    require_density(rho);
    const auto k = static_cast<Eigen::Index>(e.ops.size());
    std::vector<Matrix4> left(k);
    for (Eigen::Index a = 0; a < k; ++a) left[a] = e.ops[a] * rho;
    Matrix4 out = Matrix4::Zero();
    for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index b = 0; b < k; ++b) {
            const cplx c = e.coeffs(a, b);
            if (c == cplx(0.0)) continue;
            out.noalias() += c * left[a] * e.ops[b].adjoint();
        }
    return out;
}

Matrix apply_choi(const Matrix& choi, const Matrix& rho) {
    const Eigen::Index d = rho.rows();
    if (choi.rows() != d * d || choi.cols() != d * d)
        throw std::invalid_argument("apply_choi: dimension mismatch");
    Matrix out = Matrix::Zero(d, d);
    for (Eigen::Index a = 0; a < d; ++a)
        for (Eigen::Index b = 0; b < d; ++b) {
            cplx acc = 0.0;
            for (Eigen::Index i = 0; i < d; ++i)
                for (Eigen::Index j = 0; j < d; ++j) acc += choi(a * d + i, b * d + j) * rho(i, j);
            out(a, b) = acc;
        }
    return out;
}

SuperOp conjugated(const SuperOp& e, const Matrix4& v) {
    SuperOp out = e;
    for (auto& k : out.ops) k = v * k * v.adjoint();
    out.choi = choi_from_kraus_pairs(out.ops, out.coeffs);
    return out;
}

} // namespace qmb
