#include "qmb/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace qmb {

namespace {

constexpr double kGolden = 0.61803398874989484820;

// gamma = 0 has no literal reference; every variant shares the U_0 limit there.
IdealVariant variant_at(IdealVariant v, double gamma) {
    return (v == IdealVariant::Literal && gamma == 0.0) ? IdealVariant::StarkFree : v;
}

SuperOp reference(const SystemParams& p, double gamma, Outcome x, Snr snr, IdealVariant v) {
    return ideal_channel(p, BasisAngle{gamma}, x, variant_at(v, gamma), snr);
}

struct RowValues {
    DiamondResult r[4];
};

RowValues row_distances(const SystemParams& p, Outcome x, const SweepOptions& opts) {
    const SuperOp measurement = nigg_girvin_channel(p, x);
    const double gamma0 = mixing_angle(p, 0.0).gamma;
    const double gamma_a = mixing_angle(p, p.alpha * p.alpha).gamma;
    RowValues out;
    out.r[0] = diamond_distance(measurement, reference(p, 0.0, x, Snr::Perfect, opts.variant), opts.diamond);
    out.r[1] = diamond_distance(measurement, reference(p, gamma0, x, Snr::Perfect, opts.variant), opts.diamond);
    out.r[2] = diamond_distance(measurement, reference(p, gamma_a, x, Snr::Perfect, opts.variant), opts.diamond);
    out.r[3] = diamond_distance(measurement, reference(p, gamma_a, x, Snr::Finite, opts.variant), opts.diamond);
    return out;
}

double bare_minus_dressed(const SystemParams& p, const SweepOptions& opts) {
    const SuperOp measurement = nigg_girvin_channel(p, Outcome::Plus);
    const double gamma0 = mixing_angle(p, 0.0).gamma;
    const DiamondResult bare =
        diamond_distance(measurement, reference(p, 0.0, Outcome::Plus, Snr::Perfect, opts.variant), opts.diamond);
    const DiamondResult dressed = diamond_distance(
        measurement, reference(p, gamma0, Outcome::Plus, Snr::Perfect, opts.variant), opts.diamond);
    if (bare.status == DiamondStatus::Failed || dressed.status == DiamondStatus::Failed)
        throw std::runtime_error("diamond-norm solve failed during crossover search");
    return bare.value - dressed.value;
}

} // namespace

bool SweepRow::failed() const {
    if (!error.empty()) return true;
    for (const DiamondResult* r : {&bare, &dressed, &nalpha2, &nalpha2_snr})
        if (r->status == DiamondStatus::Failed) return true;
    return false;
}

unsigned resolve_threads(unsigned requested) {
    unsigned n = requested;
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("QMB_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

SweepRow evaluate_row(const SystemParams& p, const SweepOptions& opts) {
    SweepRow row;
    row.chi = p.chi;
    row.alpha = p.alpha;
    try {
        row.gamma = mixing_angle(p, p.alpha * p.alpha).gamma;
        const RowValues plus = row_distances(p, Outcome::Plus, opts);
        row.bare = plus.r[0];
        row.dressed = plus.r[1];
        row.nalpha2 = plus.r[2];
        row.nalpha2_snr = plus.r[3];
        if (opts.check_outcomes) {
            const RowValues minus = row_distances(p, Outcome::Minus, opts);
            const char* names[] = {"bare", "dressed", "nalpha2", "nalpha2_snr"};
            for (int k = 0; k < 4; ++k) {
                const double diff = std::abs(plus.r[k].value - minus.r[k].value);
                if (diff > 1e-8) {
                    std::ostringstream msg;
                    msg << "outcome asymmetry in d_" << names[k] << ": |d+ - d-| = " << diff;
                    row.notes.push_back(msg.str());
                }
            }
        }
        if (!truncation_sufficient(p.alpha, p.n_max)) {
            std::ostringstream msg;
            msg << "n_max = " << p.n_max << " below truncation heuristic for alpha = " << p.alpha;
            row.notes.push_back(msg.str());
        }
    } catch (const std::exception& e) {
        row.error = e.what();
        for (DiamondResult* r : {&row.bare, &row.dressed, &row.nalpha2, &row.nalpha2_snr})
            r->status = DiamondStatus::Failed;
    }
    return row;
}

std::vector<SweepRow> sweep_chi(const SystemParams& tmpl, const std::vector<double>& chi_grid,
                                const SweepOptions& opts) {
    std::vector<SweepRow> rows(chi_grid.size());
    parallel_for(chi_grid.size(), opts.threads, [&](std::size_t i) {
        SystemParams p = tmpl;
        p.chi = chi_grid[i];
        if (p.chi == 0.0) {
            rows[i].chi = 0.0;
            rows[i].alpha = p.alpha;
            rows[i].error = "chi must be nonzero";
            for (DiamondResult* r : {&rows[i].bare, &rows[i].dressed, &rows[i].nalpha2, &rows[i].nalpha2_snr})
                r->status = DiamondStatus::Failed;
            return;
        }
        rows[i] = evaluate_row(p, opts);
    });
    return rows;
}

std::vector<SweepRow> sweep_alpha(const SystemParams& tmpl, const std::vector<double>& alpha_grid,
                                  const SweepOptions& opts) {
    std::vector<SweepRow> rows(alpha_grid.size());
    parallel_for(alpha_grid.size(), opts.threads, [&](std::size_t i) {
        SystemParams p = tmpl;
        p.alpha = alpha_grid[i];
        rows[i] = evaluate_row(p, opts);
    });
    return rows;
}

DiamondResult gamma_distance(const SystemParams& p, double gamma, Snr snr, const SweepOptions& opts,
                             const SuperOp* measurement) {
    if (measurement) return diamond_distance(*measurement, reference(p, gamma, Outcome::Plus, snr, opts.variant), opts.diamond);
    const SuperOp own = nigg_girvin_channel(p, Outcome::Plus);
    return diamond_distance(own, reference(p, gamma, Outcome::Plus, snr, opts.variant), opts.diamond);
}

std::vector<double> gamma_grid(const SystemParams& p, int resolution, bool* experimental) {
    if (resolution < 2) throw std::invalid_argument("gamma_grid: resolution must be >= 2");
    const double gamma0 = mixing_angle(p, 0.0).gamma;
    std::vector<double> grid;
    const bool opposite = p.chi * p.delta0() < 0.0 && p.J != 0.0;
    if (experimental) *experimental = opposite;
    if (!opposite) {
        if (gamma0 == 0.0) return {0.0};
        for (int k = 0; k < resolution; ++k) grid.push_back(gamma0 * k / (resolution - 1));
        return grid;
    }
    // [-pi/4, pi/4] minus the open interval between 0 and gamma_0.
    const double lo_gap = std::min(0.0, gamma0);
    const double hi_gap = std::max(0.0, gamma0);
    const double span = kPi / 2.0 - (hi_gap - lo_gap);
    for (int k = 1; k <= resolution; ++k) {
        const double t = span * k / resolution;
        const double left = lo_gap + kPi / 4.0;  // length of [-pi/4, lo_gap]
        grid.push_back(t <= left ? -kPi / 4.0 + t : hi_gap + (t - left));
    }
    return grid;
}

GammaScan scan_gamma_chi(const SystemParams& tmpl, const std::vector<double>& chi_grid,
                         int gamma_resolution, const SweepOptions& opts, Snr snr, double refine_tol) {
    GammaScan scan;
    scan.alpha = tmpl.alpha;
    scan.slices.resize(chi_grid.size());
    parallel_for(chi_grid.size(), opts.threads, [&](std::size_t i) {
        GammaSlice& slice = scan.slices[i];
        SystemParams p = tmpl;
        p.chi = chi_grid[i];
        slice.chi = p.chi;
        try {
            SweepOptions inner = opts;
            inner.threads = 1;
            const SuperOp measurement = nigg_girvin_channel(p, Outcome::Plus);
            auto eval = [&](double g) { return gamma_distance(p, g, snr, inner, &measurement); };

            slice.gammas = gamma_grid(p, gamma_resolution, &slice.experimental);
            slice.distances.reserve(slice.gammas.size());
            for (double g : slice.gammas) slice.distances.push_back(eval(g));
            slice.gamma_nalpha2 = mixing_angle(p, p.alpha * p.alpha).gamma;
            slice.at_nalpha2 = eval(slice.gamma_nalpha2);

            // Grid minimum; ties go to the smaller |gamma|.
            double best = std::numeric_limits<double>::infinity();
            for (const auto& d : slice.distances) best = std::min(best, d.value);
            const double tie_band = std::max(1e-12, 1e-9 * best);
            std::size_t arg = 0;
            int ties = 0;
            for (std::size_t k = 0; k < slice.gammas.size(); ++k) {
                if (slice.distances[k].value > best + tie_band) continue;
                ++ties;
                if (ties == 1 || std::abs(slice.gammas[k]) < std::abs(slice.gammas[arg])) arg = k;
            }
            slice.tie = ties > 1;
            slice.grid_argmin = slice.gammas[arg];
            slice.grid_min = slice.distances[arg].value;
            slice.refined_argmin = slice.grid_argmin;
            slice.refined_min = slice.grid_min;

            if (slice.gammas.size() >= 2) {
                // Bracketing triple; an endpoint minimum brackets with its single neighbour.
                double a = slice.gammas[arg > 0 ? arg - 1 : arg];
                double b = slice.gammas[arg + 1 < slice.gammas.size() ? arg + 1 : arg];
                if (a > b) std::swap(a, b);
                auto consider = [&](double g, double v) {
                    if (v < slice.refined_min) {
                        slice.refined_min = v;
                        slice.refined_argmin = g;
                    }
                };
                double c = b - kGolden * (b - a);
                double d = a + kGolden * (b - a);
                double fc = eval(c).value;
                double fd = eval(d).value;
                consider(c, fc);
                consider(d, fd);
                while (b - a > refine_tol) {
                    if (fc < fd) {
                        b = d;
                        d = c;
                        fd = fc;
                        c = b - kGolden * (b - a);
                        fc = eval(c).value;
                        consider(c, fc);
                    } else {
                        a = c;
                        c = d;
                        fc = fd;
                        d = a + kGolden * (b - a);
                        fd = eval(d).value;
                        consider(d, fd);
                    }
                }
            }
        } catch (const std::exception& e) {
            slice.error = e.what();
        }
    });
    return scan;
}

const char* to_string(SweepAxis a) { return a == SweepAxis::Chi ? "chi" : "alpha"; }

Crossover find_crossover(const SystemParams& tmpl, SweepAxis axis, double lo, double hi,
                         const SweepOptions& opts, double rel_width) {
    if (!(lo < hi)) throw std::invalid_argument("find_crossover: bracket must satisfy lo < hi");
    if (axis == SweepAxis::Chi && !(lo > 0.0))
        throw std::invalid_argument("find_crossover: chi bracket must be positive");
    if (axis == SweepAxis::Alpha && lo < 0.0)
        throw std::invalid_argument("find_crossover: alpha bracket must be non-negative");

    auto at = [&](double v) {
        SystemParams p = tmpl;
        (axis == SweepAxis::Chi ? p.chi : p.alpha) = v;
        return bare_minus_dressed(p, opts);
    };

    Crossover out;
    double f_lo = at(lo);
    double f_hi = at(hi);
    out.evaluations = 2;
    if (f_lo == 0.0 && f_hi == 0.0) {
        std::ostringstream msg;
        msg << "no sign change of d_bare - d_dressed over " << to_string(axis) << " in [" << lo << ", "
            << hi << "]: the difference vanishes at both ends";
        throw NoSignChange(msg.str(), f_lo, f_hi);
    }
    if (f_lo == 0.0 || f_hi == 0.0) {
        out.value = out.lo = out.hi = f_lo == 0.0 ? lo : hi;
        return out;
    }
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        std::ostringstream msg;
        msg << "no sign change of d_bare - d_dressed over " << to_string(axis) << " in [" << lo << ", "
            << hi << "]: " << f_lo << " at " << lo << ", " << f_hi << " at " << hi;
        throw NoSignChange(msg.str(), f_lo, f_hi);
    }
    constexpr int kMaxBisections = 200;
    for (int step = 0; step < kMaxBisections && (lo <= 0.0 || hi / lo - 1.0 > rel_width); ++step) {
        const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
        const double f_mid = at(mid);
        ++out.evaluations;
        if (f_mid == 0.0) {
            lo = hi = mid;
            break;
        }
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    out.lo = lo;
    out.hi = hi;
    out.value = std::sqrt(lo * hi);
    return out;
}

double truncation_delta(const SystemParams& p, const SweepOptions& opts, int extra) {
    SystemParams more = p;
    more.n_max += extra;
    const SweepRow a = evaluate_row(p, opts);
    const SweepRow b = evaluate_row(more, opts);
    if (a.failed() || b.failed()) return std::numeric_limits<double>::infinity();
    return std::max({std::abs(a.bare.value - b.bare.value), std::abs(a.dressed.value - b.dressed.value),
                     std::abs(a.nalpha2.value - b.nalpha2.value),
                     std::abs(a.nalpha2_snr.value - b.nalpha2_snr.value)});
}

} // namespace qmb
