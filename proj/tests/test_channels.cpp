#include "oracles.hpp"
#include "qmb/channels.hpp"
#include "qmb/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qmb;

namespace {

SystemParams fig2(double chi = 5.0) { return SystemParams::from_detuning(102.0, 3.8, chi, 2.0, 40); }

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

Matrix4 to4(const Matrix& m) { return Matrix4(m); }

} // namespace

TEST_CASE("g coefficient matches halfplane quadrature") {
    for (double alpha : {0.5, 1.0, 2.0})
        for (int chi_sign : {1, -1})
            for (Outcome x : {Outcome::Plus, Outcome::Minus})
                for (int n = 0; n <= 6; ++n)
                    for (int m = 0; m <= 6; ++m) {
                        const cplx exact = g_coefficient(alpha, x, n, m, chi_sign);
                        const cplx quad = oracle::g_quadrature(alpha, x, n, m, chi_sign);
                        CHECK_MESSAGE(std::abs(exact - quad) <= 1e-8, "alpha=", alpha, " n=", n, " m=", m,
                                      " x=", sign_of(x), " chi_sign=", chi_sign);
                    }
}

TEST_CASE("g coefficient values") {
    // Even index difference: no off-diagonal part.
    CHECK(g_coefficient(1.3, Outcome::Plus, 0, 2, 1) == cplx(0.0));
    const cplx g01 = g_coefficient(1.0, Outcome::Plus, 0, 1, 1);
    CHECK(std::abs(g01) == doctest::Approx(std::exp(-1.0) / (2.0 * std::sqrt(kPi))).epsilon(1e-12));
    CHECK(std::abs(g01) == doctest::Approx(0.10378).epsilon(1e-4));
    // Large indices stay finite.
    const cplx big = g_coefficient(3.0, Outcome::Plus, 300, 301, 1);
    CHECK(std::isfinite(big.imag()));
    CHECK(std::abs(big) < 1e-100);
}

TEST_CASE("g coefficient table is Hermitian and Poisson-normalised") {
    for (double alpha : {0.5, 1.0, 2.0, 3.0}) {
        double diag_sum = 0.0;
        for (int n = 0; n <= 60; ++n) {
            for (int m = 0; m <= 60; ++m)
                for (Outcome x : {Outcome::Plus, Outcome::Minus}) {
                    const cplx a = g_coefficient(alpha, x, n, m, 1);
                    const cplx b = g_coefficient(alpha, x, m, n, 1);
                    CHECK(std::abs(a - std::conj(b)) <= 1e-15);
                }
            diag_sum += (g_coefficient(alpha, Outcome::Plus, n, n, 1) + g_coefficient(alpha, Outcome::Minus, n, n, 1)).real();
        }
        CHECK(diag_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("outcome pair is complete and each outcome is CP") {
    const SystemParams p = fig2();
    const SuperOp plus = nigg_girvin_channel(p, Outcome::Plus);
    const SuperOp minus = nigg_girvin_channel(p, Outcome::Minus);
    const Matrix tp = partial_trace(plus.choi + minus.choi, Subsystem::Output);
    CHECK(max_abs(tp - Matrix::Identity(4, 4)) <= 1e-12);
    CHECK(min_eigenvalue(plus.choi) >= -1e-10);
    CHECK(min_eigenvalue(minus.choi) >= -1e-10);
    CHECK(hermitian_defect(plus.choi) <= 1e-12);
    CHECK(plus.warnings.empty());
}

TEST_CASE("alpha = 0 is a fair coin after the zero-photon evolution") {
    SystemParams p = fig2();
    p.alpha = 0.0;
    const SuperOp e = nigg_girvin_channel(p, Outcome::Plus);
    const Matrix4 q0 = propagator(p, 0.0, p.t_m());
    std::mt19937_64 rng(11);
    for (int k = 0; k < 5; ++k) {
        const Matrix4 rho = to4(oracle::random_density(4, rng));
        const Matrix4 out = qmb::apply(e, rho);
        CHECK(max_abs(out - 0.5 * q0 * rho * q0.adjoint()) <= 1e-14);
        CHECK(out.trace().real() == doctest::Approx(0.5).epsilon(1e-14));
    }
}

TEST_CASE("apply agrees with Choi contraction") {
    std::mt19937_64 rng(2024);
    const SuperOp ng = nigg_girvin_channel(fig2(), Outcome::Plus);
    const SuperOp ref = ideal_channel(fig2(), BasisAngle{0.01}, Outcome::Minus, IdealVariant::Diagonal, Snr::Finite);
    for (int k = 0; k < 20; ++k) {
        const Matrix4 rho = to4(oracle::random_density(4, rng));
        CHECK(max_abs(Matrix(qmb::apply(ng, rho)) - apply_choi(ng.choi, rho)) <= 1e-12);
        CHECK(max_abs(Matrix(qmb::apply(ref, rho)) - apply_choi(ref.choi, rho)) <= 1e-12);
    }
}

TEST_CASE("Choi matrices agree with an explicit Kraus construction") {
    const SuperOp ref = ideal_channel(fig2(), BasisAngle{0.02}, Outcome::Plus);
    std::vector<Matrix> kraus;
    for (const auto& k : ref.ops) kraus.push_back(Matrix(k));
    // Perfect-SNR reference: a single Kraus operator P0 U.
    CHECK(max_abs(ref.choi - oracle::choi_of_kraus({kraus[0]})) <= 1e-14);
}

TEST_CASE("apply rejects non-density inputs") {
    const SuperOp e = ideal_channel(fig2(), BasisAngle{0.0}, Outcome::Plus);
    Matrix4 bad = Matrix4::Identity();
    CHECK_THROWS_AS(qmb::apply(e, bad), std::invalid_argument);
    bad = Matrix4::Zero();
    bad(0, 1) = 1.0;
    bad(0, 0) = 1.0;
    CHECK_THROWS_AS(qmb::apply(e, bad), std::invalid_argument);
    Matrix4 neg = Matrix4::Zero();
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(qmb::apply(e, neg), std::invalid_argument);
}

TEST_CASE("outcome probabilities lie in [0, 1] and sum to one") {
    std::mt19937_64 rng(5);
    const SystemParams p = fig2(12.0);
    const SuperOp plus = nigg_girvin_channel(p, Outcome::Plus);
    const SuperOp minus = nigg_girvin_channel(p, Outcome::Minus);
    for (int k = 0; k < 10; ++k) {
        const Matrix4 rho = to4(oracle::random_density(4, rng));
        const Matrix4 a = qmb::apply(plus, rho);
        const Matrix4 b = qmb::apply(minus, rho);
        CHECK(a.trace().real() >= 0.0);
        CHECK(a.trace().real() <= 1.0);
        CHECK((a + b).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(min_eigenvalue(a) >= -1e-10);
    }
}

TEST_CASE("truncation warning") {
    SystemParams p = fig2();
    p.n_max = 20;
    CHECK_FALSE(nigg_girvin_channel(p, Outcome::Plus).warnings.empty());
    CHECK(truncation_sufficient(2.0, 26));
    CHECK_FALSE(truncation_sufficient(2.0, 25));
}

TEST_CASE("chi matrix") {
    const ChiMatrix zero = chi_matrix(0.0, Outcome::Plus);
    CHECK(zero.entries.isApprox(Eigen::Matrix2d::Constant(0.5)));
    const ChiMatrix two = chi_matrix(2.0, Outcome::Plus);
    CHECK(two.entries(0, 0) == doctest::Approx(0.5 * (1.0 + 0.995322265)).epsilon(1e-9));
    CHECK(two.entries(1, 1) == doctest::Approx(0.5 * (1.0 - 0.995322265)).epsilon(1e-6));
    CHECK(two.entries(0, 1) == doctest::Approx(1.6773e-4).epsilon(1e-4));
    const ChiMatrix big = chi_matrix(40.0, Outcome::Plus);
    CHECK(big.entries(0, 0) == 1.0);
    CHECK(big.entries(1, 1) == 0.0);
    CHECK(big.entries(0, 1) == 0.0);
    for (double a : {0.3, 1.0, 2.5}) {
        const auto s = chi_matrix(a, Outcome::Plus).entries + chi_matrix(a, Outcome::Minus).entries;
        CHECK(s(0, 0) == doctest::Approx(1.0));
        CHECK(s(1, 1) == doctest::Approx(1.0));
        CHECK(s(0, 1) == doctest::Approx(std::exp(-2 * a * a)));
    }
}

TEST_CASE("reference variants coincide at the dressed angle") {
    const SystemParams p = fig2();
    const double g0 = mixing_angle(p, 0.0).gamma;
    const Matrix4 lit = reference_evolution(p, BasisAngle{g0}, IdealVariant::Literal);
    const Matrix4 diag = reference_evolution(p, BasisAngle{g0}, IdealVariant::Diagonal);
    const Matrix4 sf = reference_evolution(p, BasisAngle{g0}, IdealVariant::StarkFree);
    CHECK(max_abs(lit - diag) <= 1e-12);
    CHECK(max_abs(lit - sf) <= 1e-12);
    CHECK(max_abs(lit - propagator(p, 0.0, p.t_m())) <= 1e-12);
    CHECK_THROWS_WITH_AS(reference_evolution(p, BasisAngle{0.0}, IdealVariant::Literal),
                         doctest::Contains("n(gamma) diverges"), std::domain_error);
}

TEST_CASE("stark-free reference is the sector-n(gamma) propagator without the pointer phase") {
    const SystemParams p = fig2();
    for (double g : {0.004, 0.011, 0.0175}) {
        const double n = n_of_gamma(p, g);
        const Matrix4 lit = propagator(p, n, p.t_m());
        // Remove exp(-i chi n Z1 t) with Z1 = diag(1, 1, -1, -1) up to a global phase:
        // the sector-n energies carry +chi n on |00>, -chi n on |11>, and the
        // 01/10 block carries -chi n relative to delta0 + J tan(gamma).
        const Matrix4 sf = reference_evolution(p, BasisAngle{g}, IdealVariant::StarkFree);
        const Matrix4 r = BasisAngle{g}.rotation();
        const Matrix4 a = r.adjoint() * lit * r;
        const Matrix4 b = r.adjoint() * sf * r;
        const double t = p.t_m();
        const double shifts[4] = {p.chi * n, p.chi * n, -p.chi * n, -p.chi * n};
        for (int k = 0; k < 4; ++k) CHECK(std::abs(a(k, k) - b(k, k) * std::polar(1.0, -shifts[k] * t)) <= 1e-10);
    }
    // Bare limit: U_0.
    CHECK(max_abs(reference_evolution(p, BasisAngle{0.0}, IdealVariant::StarkFree) -
                  reference_evolution(p, BasisAngle{0.0}, IdealVariant::Diagonal)) <= 1e-14);
}

TEST_CASE("ideal channel at gamma = 0 is the bare projective measurement after U_0") {
    const SystemParams p = fig2();
    const SuperOp e = ideal_channel(p, BasisAngle{0.0}, Outcome::Plus, IdealVariant::Diagonal);
    Matrix4 u0 = Matrix4::Zero();
    const Matrix4 h0 = qubit_hamiltonian(p, 0.0);
    for (int k = 0; k < 4; ++k) u0(k, k) = std::polar(1.0, -h0(k, k).real() * p.t_m());
    Matrix4 p0 = Matrix4::Zero();
    p0(0, 0) = p0(1, 1) = 1.0;
    const Matrix k = Matrix(p0 * u0);
    CHECK(max_abs(e.choi - oracle::choi_of_kraus({k})) <= 1e-14);
}

TEST_CASE("finite-SNR reference on a gamma eigenstate gives outcome probability (1 + erf alpha)/2") {
    const SystemParams p = fig2();
    for (double g : {0.0, 0.01, 0.3}) {
        const Matrix4 r = BasisAngle{g}.rotation();
        const Matrix4 rho = r.col(1) * r.col(1).adjoint();
        const SuperOp e = ideal_channel(p, BasisAngle{g}, Outcome::Plus, IdealVariant::StarkFree, Snr::Finite);
        CHECK(qmb::apply(e, rho).trace().real() == doctest::Approx(0.5 * (1 + std::erf(p.alpha))).epsilon(1e-12));
    }
}

TEST_CASE("J = 0 measurement equals the finite-SNR bare reference") {
    SystemParams p = fig2();
    p.J = 0.0;
    for (Outcome x : {Outcome::Plus, Outcome::Minus}) {
        const SuperOp ng = nigg_girvin_channel(p, x);
        const SuperOp ref = ideal_channel(p, BasisAngle{0.0}, x, IdealVariant::StarkFree, Snr::Finite);
        CHECK(max_abs(ng.choi - ref.choi) <= 1e-12);
        const DiamondResult d = diamond_distance(ng, ref);
        CHECK(d.value <= 1e-6);
    }
}

TEST_CASE("common frequency shift is a gauge: distances unchanged") {
    const SystemParams p = fig2();
    const double g = mixing_angle(p, 4.0).gamma;
    auto distance = [&](const SystemParams& q) {
        return diamond_distance(nigg_girvin_channel(q, Outcome::Plus),
                                ideal_channel(q, BasisAngle{g}, Outcome::Plus, IdealVariant::StarkFree, Snr::Finite))
            .value;
    };
    const double base = distance(p);
    for (double shift : {50.0, 1000.0}) CHECK(std::abs(distance(p.gauge_shifted(shift)) - base) <= 1e-8);
    // The other variants are gauge covariant too.
    for (IdealVariant v : {IdealVariant::Diagonal, IdealVariant::Literal}) {
        const double a = diamond_distance(nigg_girvin_channel(p, Outcome::Plus),
                                          ideal_channel(p, BasisAngle{g}, Outcome::Plus, v)).value;
        const SystemParams q = p.gauge_shifted(1000.0);
        const double b = diamond_distance(nigg_girvin_channel(q, Outcome::Plus),
                                          ideal_channel(q, BasisAngle{g}, Outcome::Plus, v)).value;
        CHECK(std::abs(a - b) <= 1e-8);
    }
}

TEST_CASE("conjugation by a product unitary leaves the distance unchanged") {
    std::mt19937_64 rng(77);
    const SuperOp a = nigg_girvin_channel(fig2(), Outcome::Plus);
    const SuperOp b = ideal_channel(fig2(), BasisAngle{0.0}, Outcome::Plus);
    const Matrix4 v = to4(oracle::random_unitary(4, rng));
    const double d0 = diamond_distance(a, b).value;
    const double d1 = diamond_distance(conjugated(a, v), conjugated(b, v)).value;
    CHECK(std::abs(d0 - d1) <= 1e-7);
}

TEST_CASE("truncation converges for alpha <= 3") {
    for (double alpha : {1.0, 2.0, 3.0}) {
        SystemParams p = fig2();
        p.alpha = alpha;
        p.n_max = 40;
        SystemParams q = p;
        q.n_max = 50;
        const double g = mixing_angle(p, alpha * alpha).gamma;
        const SuperOp ref = ideal_channel(p, BasisAngle{g}, Outcome::Plus);
        const double a = diamond_distance(nigg_girvin_channel(p, Outcome::Plus), ref).value;
        const double b = diamond_distance(nigg_girvin_channel(q, Outcome::Plus), ref).value;
        CHECK(std::abs(a - b) <= 1e-8);
    }
}

TEST_CASE("variant names") {
    CHECK(parse_variant("diagonal") == IdealVariant::Diagonal);
    CHECK(parse_variant("literal") == IdealVariant::Literal);
    CHECK(parse_variant("stark_free") == IdealVariant::StarkFree);
    CHECK_THROWS_AS(parse_variant("other"), std::invalid_argument);
    CHECK(std::string(to_string(IdealVariant::StarkFree)) == "stark_free");
}
