// config.hpp: run configuration: JSON parsing, presets, validation.

#pragma once

#include "qmb/channels.hpp"
#include "qmb/spectrum.hpp"
#include "qmb/sweeps.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmb {

enum class Task { Spectrum, Distance, Fig2, Fig3, Fig4, Crossover };

const char* to_string(Task t);
Task parse_task(const std::string& s);

/// Schema violation. `path` is the dotted key path ("params.chi_grid[3]"),
/// `line` the 1-based line of the offending key in the source text (0 if
/// unknown).
struct ConfigError : std::runtime_error {
    ConfigError(std::string path, int line, const std::string& message);
    std::string path;
    int line;
};

struct RunConfig {
    Task task = Task::Fig2;
    std::optional<std::string> preset;

    double delta0 = 102.0;
    std::optional<double> omega1;
    std::optional<double> omega2;
    double J = 3.8;
    std::optional<double> chi;
    std::vector<double> chi_grid;
    std::optional<double> alpha;
    std::vector<double> alpha_grid;
    int n_max = 40;

    double tol = 1e-7;
    IdealVariant variant = IdealVariant::StarkFree;
    int gamma_resolution = 41;
    Snr gamma_snr = Snr::Perfect;
    SweepAxis crossover_axis = SweepAxis::Chi;
    std::optional<double> bracket_lo;
    std::optional<double> bracket_hi;
    bool check_outcomes = false;
    std::string output;  ///< empty: stdout

    /// Physical parameters with omega1/omega2 resolved from delta0 when absent.
    /// chi and alpha come from the scalar fields (or the first grid entry).
    SystemParams params() const;
    SweepOptions sweep_options() const;

    /// Fully resolved configuration in the input schema.
    nlohmann::json to_json() const;
};

/// Names accepted by `preset`: fig2, fig3, fig4.
std::vector<std::string> preset_names();

/// Applies a preset's parameter set onto cfg. Throws ConfigError for unknown names.
void apply_preset(RunConfig& cfg, const std::string& name);

/// log10-spaced grid with endpoints 10^from and 10^to.
std::vector<double> log_grid(double log10_from, double log10_to, int per_decade);
std::vector<double> linear_grid(double from, double to, int count);

/// Parses a JSON configuration (or a run manifest, whose "config" block is
/// used), applies its preset, then its explicit keys, and validates.
/// `task_override` replaces the document's task, as a CLI subcommand does.
RunConfig parse_config(const std::string& text, std::optional<Task> task_override = std::nullopt);

/// Validates cross-field constraints; throws ConfigError.
void validate(const RunConfig& cfg);

} // namespace qmb
