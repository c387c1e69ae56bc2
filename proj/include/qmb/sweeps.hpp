// sweeps.hpp: parameter scans of measurement-vs-reference distances.

#pragma once

#include "qmb/channels.hpp"
#include "qmb/metrics.hpp"
#include "qmb/spectrum.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmb {

struct SweepOptions {
    DiamondOptions diamond;
    /// Variant used for every reference measurement.
    IdealVariant variant = IdealVariant::StarkFree;
    /// Worker count; 0 means QMB_THREADS or hardware concurrency.
    unsigned threads = 0;
    /// Also evaluate outcome - and record a note when it differs from + by more than 1e-8.
    bool check_outcomes = false;
};

/// Distances from the measurement (outcome +) to the four reference models.
struct SweepRow {
    double chi = 0.0;
    double alpha = 0.0;
    std::optional<double> gamma;  ///< gamma_{n = alpha^2}
    DiamondResult bare;         ///< gamma = 0, perfect SNR
    DiamondResult dressed;      ///< gamma = gamma_0, perfect SNR
    DiamondResult nalpha2;      ///< gamma = gamma_{n = alpha^2}, perfect SNR
    DiamondResult nalpha2_snr;  ///< gamma = gamma_{n = alpha^2}, finite SNR
    std::string error;          ///< set when the row could not be evaluated
    std::vector<std::string> notes;

    bool failed() const;
};

/// Worker count from QMB_THREADS (if set and positive) capped by the request.
unsigned resolve_threads(unsigned requested);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; callers write results into slot i.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

/// One row at the given parameters. Never throws; failures land in row.error.
SweepRow evaluate_row(const SystemParams& p, const SweepOptions& opts = {});

std::vector<SweepRow> sweep_chi(const SystemParams& tmpl, const std::vector<double>& chi_grid,
                                const SweepOptions& opts = {});

std::vector<SweepRow> sweep_alpha(const SystemParams& tmpl, const std::vector<double>& alpha_grid,
                                  const SweepOptions& opts = {});

/// Distance from the measurement to the gamma-basis reference.
DiamondResult gamma_distance(const SystemParams& p, double gamma, Snr snr, const SweepOptions& opts,
                             const SuperOp* measurement = nullptr);

/// Gamma values scanned at the given parameters. For chi * delta0 >= 0 this is
/// an even grid over [0, gamma_0] (gamma_0 = 0 gives the single point 0). For
/// opposite signs the grid covers [-pi/4, pi/4] without the interior of that
/// interval, and `experimental` is set.
std::vector<double> gamma_grid(const SystemParams& p, int resolution, bool* experimental = nullptr);

struct GammaSlice {
    double chi = 0.0;
    std::vector<double> gammas;
    std::vector<DiamondResult> distances;
    double gamma_nalpha2 = 0.0;
    DiamondResult at_nalpha2;
    double grid_argmin = 0.0;
    double grid_min = 0.0;
    double refined_argmin = 0.0;
    double refined_min = 0.0;
    bool tie = false;           ///< several grid points share the minimum
    bool experimental = false;  ///< opposite-sign chi scan
    std::string error;
};

struct GammaScan {
    double alpha = 0.0;
    std::vector<GammaSlice> slices;  ///< ordered like chi_grid
};

/// Grid over gamma per chi, then golden-section refinement (tolerance
/// `refine_tol` rad) on the bracketing triple around the grid minimum.
GammaScan scan_gamma_chi(const SystemParams& tmpl, const std::vector<double>& chi_grid,
                         int gamma_resolution, const SweepOptions& opts = {},
                         Snr snr = Snr::Perfect, double refine_tol = 1e-4);

enum class SweepAxis { Chi, Alpha };

const char* to_string(SweepAxis a);

struct Crossover {
    double value = 0.0;  ///< geometric midpoint of the final bracket
    double lo = 0.0;
    double hi = 0.0;
    int evaluations = 0;
};

struct NoSignChange : std::runtime_error {
    NoSignChange(const std::string& what, double lo_diff, double hi_diff)
        : std::runtime_error(what), lo_difference(lo_diff), hi_difference(hi_diff) {}
    double lo_difference;
    double hi_difference;
};

/// Bisection on sign(d_bare - d_dressed) until hi/lo - 1 <= rel_width.
/// Throws NoSignChange when the endpoints agree in sign.
Crossover find_crossover(const SystemParams& tmpl, SweepAxis axis, double lo, double hi,
                         const SweepOptions& opts = {}, double rel_width = 1e-2);

/// Largest change of any distance in the row when n_max grows by `extra`.
double truncation_delta(const SystemParams& p, const SweepOptions& opts = {}, int extra = 10);

} // namespace qmb
