// Diamond norm of a Hermiticity-preserving map as a small dense SDP.
//
// With Choi matrix J on C^d (output) (x) C^d (input), N = d^2:
//
//   max  <J, W>
//   s.t. I (x) sigma - W >= 0,  I (x) sigma + W >= 0,  tr sigma = 1,
//
//   min  lambda_max(Tr_out(Y0 + Y1))
//   s.t. Y0 - Y1 = J,  Y0, Y1 >= 0.
//
// The first problem is posed in inequality ("dual") form over the real
// coordinates y = (W, traceless part of sigma), the second is its primal
// partner with X = (X1, X2) = (Y0, Y1). A Mehrotra predictor-corrector
// with the HKM search direction drives both.
//
// Certificates are recomputed from the iterates independently of the
// solver's own objective values:
//   lower: ||(I (x) sqrt(sigma)) J (I (x) sqrt(sigma))||_1 for sigma projected
//          onto the density matrices,
//   upper: lambda_max(Tr_out(Y0 + Y1)) for Y0 = (X1 + X2 + J)/2,
//          Y1 = (X1 + X2 - J)/2, shifted by a multiple of the identity until
//          both are PSD.

#include "qmb/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qmb {

namespace {

struct Entry {
    int row;
    int col;
    cplx value;
};

// One coordinate direction A_i, split over the two PSD blocks.
struct Direction {
    std::vector<Entry> block[2];
};

struct Problem {
    int d = 0;
    int n = 0;  // block size d^2
    std::vector<Direction> dirs;
    RealVector b;
    std::vector<int> sigma_dirs;      // indices into dirs for the sigma coordinates
    std::vector<Matrix> sigma_basis;  // matching traceless d x d generators
};

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Orthonormal Hermitian basis of k x k matrices (under Re tr(A B)).
template <typename Emit>
void hermitian_basis(int k, Emit emit) {
    const cplx i_unit(0.0, 1.0);
    for (int p = 0; p < k; ++p) emit(std::vector<Entry>{{p, p, 1.0}});
    for (int p = 0; p < k; ++p)
        for (int q = p + 1; q < k; ++q) {
            emit(std::vector<Entry>{{p, q, kInvSqrt2}, {q, p, kInvSqrt2}});
            emit(std::vector<Entry>{{p, q, i_unit * kInvSqrt2}, {q, p, -i_unit * kInvSqrt2}});
        }
}

Problem build_problem(const Matrix& j, int d) {
    Problem pr;
    pr.d = d;
    pr.n = d * d;
    std::vector<double> b;

    // W coordinates: +B in block 0, -B in block 1.
    hermitian_basis(pr.n, [&](std::vector<Entry> entries) {
        Direction dir;
        double bi = 0.0;
        for (const auto& e : entries) {
            dir.block[0].push_back(e);
            dir.block[1].push_back({e.row, e.col, -e.value});
            bi += (e.value * j(e.col, e.row)).real();
        }
        pr.dirs.push_back(std::move(dir));
        b.push_back(bi);
    });

    // sigma coordinates: -(I (x) T) in both blocks, T traceless Hermitian.
    std::vector<std::vector<Entry>> generators;
    hermitian_basis(d, [&](std::vector<Entry> entries) {
        if (entries.size() == 1) {
            const int k = entries.front().row;
            if (k == d - 1) return;
            generators.push_back({{k, k, kInvSqrt2}, {d - 1, d - 1, -kInvSqrt2}});
        } else {
            generators.push_back(std::move(entries));
        }
    });
    for (const auto& gen : generators) {
        Direction dir;
        Matrix t = Matrix::Zero(d, d);
        for (const auto& e : gen) {
            t(e.row, e.col) += e.value;
            for (int a = 0; a < d; ++a) {
                const Entry lifted{a * d + e.row, a * d + e.col, -e.value};
                dir.block[0].push_back(lifted);
                dir.block[1].push_back(lifted);
            }
        }
        pr.sigma_dirs.push_back(static_cast<int>(pr.dirs.size()));
        pr.sigma_basis.push_back(std::move(t));
        pr.dirs.push_back(std::move(dir));
        b.push_back(0.0);
    }
    pr.b = Eigen::Map<RealVector>(b.data(), static_cast<Eigen::Index>(b.size()));
    return pr;
}

struct Blocks {
    Matrix m[2];
};

// A(X)_i = sum_b Re tr(A_i^b X_b)
RealVector apply_a(const Problem& pr, const Blocks& x) {
    RealVector out(pr.dirs.size());
    for (size_t i = 0; i < pr.dirs.size(); ++i) {
        double acc = 0.0;
        for (int blk = 0; blk < 2; ++blk)
            for (const auto& e : pr.dirs[i].block[blk]) acc += (e.value * x.m[blk](e.col, e.row)).real();
        out(static_cast<Eigen::Index>(i)) = acc;
    }
    return out;
}

// sum_i y_i A_i
Blocks apply_at(const Problem& pr, const RealVector& y) {
    Blocks out{{Matrix::Zero(pr.n, pr.n), Matrix::Zero(pr.n, pr.n)}};
    for (size_t i = 0; i < pr.dirs.size(); ++i) {
        const double yi = y(static_cast<Eigen::Index>(i));
        if (yi == 0.0) continue;
        for (int blk = 0; blk < 2; ++blk)
            for (const auto& e : pr.dirs[i].block[blk]) out.m[blk](e.row, e.col) += yi * e.value;
    }
    return out;
}

// M_ij = sum_b Re tr(A_i X A_j S^-1), symmetric positive definite.
RealMatrix schur_complement(const Problem& pr, const Blocks& x, const Blocks& s_inv) {
    const auto m = static_cast<Eigen::Index>(pr.dirs.size());
    RealMatrix out(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index jj = i; jj < m; ++jj) {
            double acc = 0.0;
            for (int blk = 0; blk < 2; ++blk) {
                const Matrix& xb = x.m[blk];
                const Matrix& sb = s_inv.m[blk];
                for (const auto& ei : pr.dirs[i].block[blk])
                    for (const auto& ej : pr.dirs[jj].block[blk])
                        acc += (ei.value * ej.value * xb(ei.col, ej.row) * sb(ej.col, ei.row)).real();
            }
            out(i, jj) = acc;
            out(jj, i) = acc;
        }
    return out;
}

double inner(const Blocks& a, const Blocks& b) {
    double acc = 0.0;
    for (int blk = 0; blk < 2; ++blk) acc += (a.m[blk].adjoint() * b.m[blk]).trace().real();
    return acc;
}

// Largest step t in (0, inf] with x + t dx >= 0; x must be positive definite.
double max_step(const Matrix& x, const Matrix& dx) {
    Eigen::LLT<Matrix> llt(x);
    if (llt.info() != Eigen::Success) return 0.0;
    const Matrix l_inv = llt.matrixL().solve(Matrix::Identity(x.rows(), x.cols()));
    const Matrix scaled = hermitian_part(l_inv * dx * l_inv.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(scaled, Eigen::EigenvaluesOnly);
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

Matrix inverse_pd(const Matrix& s) {
    Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) return hermitian_part(s).inverse();
    return hermitian_part(llt.solve(Matrix::Identity(s.rows(), s.cols())));
}

struct Certificates {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

Certificates certify(const Problem& pr, const Matrix& j, const Blocks& x, const RealVector& y) {
    const int d = pr.d;
    Certificates c;

    Matrix sigma = Matrix::Identity(d, d) / static_cast<double>(d);
    for (size_t k = 0; k < pr.sigma_dirs.size(); ++k) sigma += y(pr.sigma_dirs[k]) * pr.sigma_basis[k];
    c.lower = diamond_lower_bound(j, sigma);

    const Matrix total = hermitian_part(x.m[0] + x.m[1]);
    const Matrix y0 = 0.5 * (total + j);
    const Matrix y1 = 0.5 * (total - j);
    const double shift = std::max({0.0, -min_eigenvalue(y0), -min_eigenvalue(y1)});
    c.upper = max_eigenvalue(partial_trace(total, Subsystem::Output)) + 2.0 * shift * d;
    return c;
}

} // namespace

DiamondResult diamond_norm(const Matrix& j_in, const DiamondOptions& opts) {
    if (j_in.rows() != j_in.cols()) throw std::invalid_argument("diamond_norm: J must be square");
    const int d = static_cast<int>(std::llround(std::sqrt(static_cast<double>(j_in.rows()))));
    if (d < 1 || d * d != j_in.rows()) throw std::invalid_argument("diamond_norm: J must be d^2 x d^2");
    const double entry_scale = std::max(1.0, j_in.cwiseAbs().maxCoeff());
    if (hermitian_defect(j_in) > 1e-10 * entry_scale)
        throw std::invalid_argument("diamond_norm: J is not Hermitian");

    const Matrix j_herm = hermitian_part(j_in);
    const ChoiBounds bracket = choi_bounds(j_herm);

    DiamondResult res;
    res.lower_cert = bracket.lo;
    res.upper_cert = bracket.hi;
    if (!(bracket.hi > opts.floor)) {
        res.value = bracket.lo;
        res.status = std::isfinite(bracket.hi) ? DiamondStatus::BoundOnly : DiamondStatus::Failed;
        return res;
    }

    // The norm is homogeneous; solve with ||J||_1 = 1.
    const double scale = bracket.hi;
    const Matrix j = j_herm / scale;
    const Problem pr = build_problem(j, d);
    const int n = pr.n;
    const double nu = 2.0 * n;

    Blocks x{{Matrix::Identity(n, n), Matrix::Identity(n, n)}};
    Blocks c{{Matrix::Identity(n, n) / static_cast<double>(d), Matrix::Identity(n, n) / static_cast<double>(d)}};
    Blocks s = c;
    RealVector y = RealVector::Zero(static_cast<Eigen::Index>(pr.dirs.size()));

    double best_lower = 1.0 / d;
    double best_upper = 1.0;
    const double target = std::max(opts.rel_target, 0.0);
    constexpr double kStepFraction = 0.97;

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        const double mu = inner(x, s) / nu;
        const double pobj = inner(c, x);
        const double dobj = pr.b.dot(y);
        if (std::abs(pobj - dobj) < 1e-5) {
            const Certificates cert = certify(pr, j, x, y);
            best_lower = std::max(best_lower, cert.lower);
            best_upper = std::min(best_upper, cert.upper);
            if (best_upper - best_lower <= target) break;
        }
        if (!(mu > 1e-18)) break;

        Blocks s_inv{{inverse_pd(s.m[0]), inverse_pd(s.m[1])}};
        const Blocks at_y = apply_at(pr, y);
        Blocks rd;
        for (int blk = 0; blk < 2; ++blk) rd.m[blk] = c.m[blk] - s.m[blk] - at_y.m[blk];

        const RealMatrix schur = schur_complement(pr, x, s_inv);
        Eigen::LLT<RealMatrix> chol(schur);
        const bool chol_ok = chol.info() == Eigen::Success;
        Eigen::LDLT<RealMatrix> ldlt;
        if (!chol_ok) ldlt.compute(schur);
        auto solve = [&](const RealVector& rhs) -> RealVector {
            return chol_ok ? RealVector(chol.solve(rhs)) : RealVector(ldlt.solve(rhs));
        };

        Blocks x_rd_sinv;
        for (int blk = 0; blk < 2; ++blk) x_rd_sinv.m[blk] = x.m[blk] * rd.m[blk] * s_inv.m[blk];
        const RealVector base_rhs = pr.b + apply_a(pr, x_rd_sinv);

        // rc is the complementarity target: X S + dX S + X dS = rc.
        auto direction = [&](const Blocks& rc, RealVector& dy, Blocks& dx, Blocks& ds) {
            Blocks rc_sinv;
            for (int blk = 0; blk < 2; ++blk) rc_sinv.m[blk] = rc.m[blk] * s_inv.m[blk];
            dy = solve(base_rhs - apply_a(pr, rc_sinv));
            const Blocks at_dy = apply_at(pr, dy);
            for (int blk = 0; blk < 2; ++blk) {
                ds.m[blk] = rd.m[blk] - at_dy.m[blk];
                dx.m[blk] = hermitian_part(rc_sinv.m[blk] - x.m[blk] * ds.m[blk] * s_inv.m[blk]) - x.m[blk];
                ds.m[blk] = hermitian_part(ds.m[blk]);
            }
        };
        auto step_lengths = [&](const Blocks& dx, const Blocks& ds, double& ap, double& ad) {
            ap = 1.0;
            ad = 1.0;
            for (int blk = 0; blk < 2; ++blk) {
                ap = std::min(ap, kStepFraction * max_step(x.m[blk], dx.m[blk]));
                ad = std::min(ad, kStepFraction * max_step(s.m[blk], ds.m[blk]));
            }
        };

        // Predictor.
        Blocks zero_rc{{Matrix::Zero(n, n), Matrix::Zero(n, n)}};
        RealVector dy_aff;
        Blocks dx_aff, ds_aff;
        direction(zero_rc, dy_aff, dx_aff, ds_aff);
        double ap_aff, ad_aff;
        step_lengths(dx_aff, ds_aff, ap_aff, ad_aff);
        Blocks x_try, s_try;
        for (int blk = 0; blk < 2; ++blk) {
            x_try.m[blk] = x.m[blk] + ap_aff * dx_aff.m[blk];
            s_try.m[blk] = s.m[blk] + ad_aff * ds_aff.m[blk];
        }
        const double mu_aff = inner(x_try, s_try) / nu;
        const double centering = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

        // Corrector.
        Blocks rc;
        for (int blk = 0; blk < 2; ++blk)
            rc.m[blk] = centering * mu * Matrix::Identity(n, n) - dx_aff.m[blk] * ds_aff.m[blk];
        RealVector dy;
        Blocks dx, ds;
        direction(rc, dy, dx, ds);
        double ap, ad;
        step_lengths(dx, ds, ap, ad);
        if (ap < 1e-12 && ad < 1e-12) break;

        for (int blk = 0; blk < 2; ++blk) {
            x.m[blk] = hermitian_part(x.m[blk] + ap * dx.m[blk]);
            s.m[blk] = hermitian_part(s.m[blk] + ad * ds.m[blk]);
        }
        y += ad * dy;
    }

    const Certificates cert = certify(pr, j, x, y);
    best_lower = std::max(best_lower, cert.lower);
    best_upper = std::min(best_upper, cert.upper);

    res.iterations = it;
    res.lower_cert = std::max(bracket.lo, best_lower * scale);
    res.upper_cert = std::min(bracket.hi, best_upper * scale);
    if (!std::isfinite(res.lower_cert) || !std::isfinite(res.upper_cert) ||
        res.lower_cert > res.upper_cert + 1e-12 * scale) {
        res.status = DiamondStatus::Failed;
        res.lower_cert = bracket.lo;
        res.upper_cert = bracket.hi;
        res.value = bracket.lo;
        return res;
    }
    res.upper_cert = std::max(res.upper_cert, res.lower_cert);
    res.value = 0.5 * (res.lower_cert + res.upper_cert);
    res.status = res.upper_cert - res.lower_cert <= opts.tol ? DiamondStatus::Converged
                                                             : DiamondStatus::BoundOnly;
    return res;
}

} // namespace qmb
