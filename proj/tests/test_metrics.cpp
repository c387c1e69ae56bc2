#include "oracles.hpp"
#include "qmb/channels.hpp"
#include "qmb/metrics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qmb;

namespace {

Matrix random_hermitian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
    return hermitian_part(a);
}

void check_bracket(const DiamondResult& r, const Matrix& j) {
    const ChoiBounds b = choi_bounds(j);
    const double slack = 1e-12 * std::max(1.0, b.hi);
    CHECK(r.lower_cert <= r.value + slack);
    CHECK(r.value <= r.upper_cert + slack);
    CHECK(b.lo <= r.value + slack);
    CHECK(r.value <= b.hi + slack);
    if (r.status == DiamondStatus::Converged) CHECK(r.upper_cert - r.lower_cert <= 1e-7);
}

Matrix identity_choi(int d) {
    return oracle::choi_of_kraus({Matrix::Identity(d, d)});
}

} // namespace

TEST_CASE("trace norm basics") {
    CHECK(trace_norm(Matrix::Identity(4, 4)) == doctest::Approx(4.0));
    std::mt19937_64 rng(1);
    const Matrix v = oracle::random_unitary(4, rng).col(0) * 1.7;
    CHECK(trace_norm(v * v.adjoint()) == doctest::Approx(v.squaredNorm()).epsilon(1e-12));
    for (int k = 0; k < 10; ++k) {
        const Matrix h = random_hermitian(8, rng);
        CHECK(std::abs(trace_norm(h) - trace_norm_svd(h)) <= 1e-12 * trace_norm_svd(h));
        CHECK(std::abs(trace_norm_svd(h) - oracle::trace_norm(h)) <= 1e-12 * trace_norm_svd(h));
    }
    CHECK_THROWS_AS(trace_norm(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("trace norm is unitarily invariant") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 10; ++k) {
        const Matrix a = random_hermitian(6, rng) + cplx(0, 1) * random_hermitian(6, rng);
        const Matrix u = oracle::random_unitary(6, rng);
        const Matrix w = oracle::random_unitary(6, rng);
        CHECK(std::abs(trace_norm(u * a * w) - trace_norm(a)) <= 1e-12 * trace_norm(a));
    }
}

TEST_CASE("partial trace conventions") {
    std::mt19937_64 rng(4);
    const Matrix a = random_hermitian(4, rng);
    const Matrix b = random_hermitian(4, rng);
    Matrix ab(16, 16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) ab.block(4 * i, 4 * j, 4, 4) = a(i, j) * b;
    CHECK((partial_trace(ab, Subsystem::Output) - a.trace() * b).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((partial_trace(ab, Subsystem::Input) - b.trace() * a).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(std::abs(partial_trace(ab, Subsystem::Output).trace() - ab.trace()) <= 1e-12);
    CHECK((partial_trace(identity_choi(4), Subsystem::Output) - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(partial_trace(Matrix::Zero(15, 15), Subsystem::Output), std::invalid_argument);
}

TEST_CASE("choi bounds") {
    std::mt19937_64 rng(5);
    const Matrix j = oracle::choi_of_kraus(oracle::random_kraus(4, 3, true, rng));
    const ChoiBounds b = choi_bounds(j);
    CHECK(b.hi == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(b.lo == doctest::Approx(1.0).epsilon(1e-12));
    const ChoiBounds z = choi_bounds(Matrix::Zero(16, 16));
    CHECK(z.lo == 0.0);
    CHECK(z.hi == 0.0);
}

TEST_CASE("identity channel has diamond norm one") {
    for (int d : {2, 4}) {
        const Matrix j = identity_choi(d);
        const DiamondResult r = diamond_norm(j);
        CHECK(r.status == DiamondStatus::Converged);
        CHECK(r.value == doctest::Approx(1.0).epsilon(1e-7));
        check_bracket(r, j);
    }
}

TEST_CASE("CP maps: diamond norm is the spectral norm of the input-side marginal") {
    std::mt19937_64 rng(6);
    for (int k = 0; k < 25; ++k) {
        const int d = k % 5 == 0 ? 2 : 4;
        const Matrix j = oracle::choi_of_kraus(oracle::random_kraus(d, 1 + k % 4, false, rng));
        const DiamondResult r = diamond_norm(j);
        const double expected = spectral_norm(partial_trace(j, Subsystem::Output));
        CHECK(r.status == DiamondStatus::Converged);
        CHECK(std::abs(r.value - expected) <= 1e-7);
        check_bracket(r, j);
    }
}

TEST_CASE("identity vs completely depolarizing qubit channel is 3/2") {
    const Matrix j = identity_choi(2) - oracle::depolarizing_choi(1.0);
    std::mt19937_64 rng(7);
    const double brute = oracle::diamond_pure_state(j, rng, 10);
    CHECK(brute == doctest::Approx(1.5).epsilon(1e-6));
    const DiamondResult r = diamond_norm(j);
    CHECK(std::abs(r.value - 1.5) <= 1e-4);
    CHECK(std::abs(r.value - brute) <= 1e-4);
    check_bracket(r, j);
}

TEST_CASE("random channel differences agree with pure-state maximisation") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 10; ++k) {
        const Matrix ja = oracle::choi_of_kraus(oracle::random_kraus(2, 2, true, rng));
        const Matrix jb = oracle::choi_of_kraus(oracle::random_kraus(2, 1 + k % 3, true, rng));
        const Matrix j = ja - jb;
        const DiamondResult r = diamond_norm(j);
        const double brute = oracle::diamond_pure_state(j, rng, 20);
        CHECK(r.status == DiamondStatus::Converged);
        CHECK(brute <= r.upper_cert + 1e-9);
        CHECK(std::abs(r.value - brute) <= 1e-4);
        CHECK(r.value >= 0.0);
        CHECK(r.value <= 2.0 + 1e-9);
        check_bracket(r, j);
    }
}

TEST_CASE("diamond distance basics") {
    const SystemParams p = SystemParams::from_detuning(102.0, 3.8, 5.0, 2.0, 40);
    const SuperOp a = nigg_girvin_channel(p, Outcome::Plus);
    const SuperOp b = ideal_channel(p, BasisAngle{0.0}, Outcome::Plus);
    const DiamondResult self = diamond_distance(a, a);
    CHECK(self.value <= 1e-7);
    CHECK(self.status == DiamondStatus::BoundOnly);
    const DiamondResult ab = diamond_distance(a, b);
    const DiamondResult ba = diamond_distance(b, a);
    CHECK(std::abs(ab.value - ba.value) <= 1e-9);
    check_bracket(ab, a.choi - b.choi);
}

TEST_CASE("tiny differences report the Choi bracket") {
    std::mt19937_64 rng(9);
    const Matrix j = 1e-11 * hermitian_part(oracle::random_density(16, rng));
    const DiamondResult r = diamond_norm(j);
    CHECK(r.status == DiamondStatus::BoundOnly);
    const ChoiBounds b = choi_bounds(j);
    CHECK(r.lower_cert == doctest::Approx(b.lo));
    CHECK(r.upper_cert == doctest::Approx(b.hi));
}

TEST_CASE("looser tolerance still certifies within the request") {
    std::mt19937_64 rng(10);
    const Matrix j = oracle::choi_of_kraus(oracle::random_kraus(4, 2, true, rng)) -
                     oracle::choi_of_kraus(oracle::random_kraus(4, 2, true, rng));
    for (double tol : {1e-3, 1e-5, 1e-7}) {
        DiamondOptions o;
        o.tol = tol;
        const DiamondResult r = diamond_norm(j, o);
        CHECK(r.status == DiamondStatus::Converged);
        CHECK(r.upper_cert - r.lower_cert <= tol);
    }
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(diamond_norm(Matrix::Zero(15, 15)), std::invalid_argument);
    Matrix j = Matrix::Zero(16, 16);
    j(0, 1) = 1.0;
    CHECK_THROWS_AS(diamond_norm(j), std::invalid_argument);
}

TEST_CASE("lower certificate from an input state") {
    const Matrix j = identity_choi(2) - oracle::depolarizing_choi(1.0);
    CHECK(diamond_lower_bound(j, Matrix::Identity(2, 2) / 2.0) == doctest::Approx(1.5).epsilon(1e-12));
}
