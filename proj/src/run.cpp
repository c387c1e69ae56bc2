#include "qmb/run.hpp"

#include "qmb/output.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#ifndef QMB_VERSION
#define QMB_VERSION "unknown"
#endif

namespace qmb {

using nlohmann::json;

const char* code_version() { return QMB_VERSION; }

namespace {

std::vector<double> values_of(const std::optional<double>& scalar, const std::vector<double>& grid) {
    return scalar ? std::vector<double>{*scalar} : grid;
}

void add_warning(RunOutcome& out, const std::string& w) {
    for (const auto& have : out.warnings)
        if (have == w) return;
    out.warnings.push_back(w);
}

void run_rows(const RunConfig& cfg, RunOutcome& out) {
    const SystemParams tmpl = cfg.params();
    const SweepOptions opts = cfg.sweep_options();
    const auto chis = values_of(cfg.chi, cfg.chi_grid);
    const auto alphas = values_of(cfg.alpha, cfg.alpha_grid);

    // chi outer, alpha inner.
    std::vector<SweepRow> rows(chis.size() * alphas.size());
    parallel_for(rows.size(), opts.threads, [&](std::size_t i) {
        SystemParams p = tmpl;
        p.chi = chis[i / alphas.size()];
        p.alpha = alphas[i % alphas.size()];
        rows[i] = evaluate_row(p, opts);
    });

    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& row = rows[i];
        for (const auto& n : row.notes) add_warning(out, n);
        if (row.failed()) {
            json f = {{"index", i}, {"chi", row.chi}, {"alpha", row.alpha}};
            if (!row.error.empty()) f["error"] = row.error;
            out.failed_rows.push_back(f);
        }
    }
    out.csv = rows_csv(rows);
    out.result["rows"] = rows.size();
}

void run_spectrum(const RunConfig& cfg, RunOutcome& out) {
    const SystemParams tmpl = cfg.params();
    std::vector<SpectrumRow> rows;
    for (double chi : values_of(cfg.chi, cfg.chi_grid)) {
        SystemParams p = tmpl;
        p.chi = chi;
        for (int n = 0; n <= p.n_max; ++n) {
            try {
                rows.push_back({chi, eigenenergies(p, n)});
            } catch (const std::exception& e) {
                out.failed_rows.push_back({{"chi", chi}, {"n", n}, {"error", e.what()}});
            }
        }
    }
    out.csv = spectrum_csv(rows);
    out.result["rows"] = rows.size();
}

void run_gamma_scan(const RunConfig& cfg, RunOutcome& out) {
    const GammaScan scan = scan_gamma_chi(cfg.params(), values_of(cfg.chi, cfg.chi_grid), cfg.gamma_resolution,
                                          cfg.sweep_options(), cfg.gamma_snr);
    for (std::size_t i = 0; i < scan.slices.size(); ++i) {
        const auto& s = scan.slices[i];
        bool failed = !s.error.empty() || s.at_nalpha2.status == DiamondStatus::Failed;
        for (const auto& d : s.distances) failed = failed || d.status == DiamondStatus::Failed;
        if (failed) {
            json f = {{"index", i}, {"chi", s.chi}};
            if (!s.error.empty()) f["error"] = s.error;
            out.failed_rows.push_back(f);
        }
        if (s.experimental)
            add_warning(out, "opposite-sign chi and delta0: gamma scan over [-pi/4, pi/4] is experimental");
    }
    out.csv = gamma_grid_csv(scan);
    out.minima_csv = gamma_minima_csv(scan);
    out.result["slices"] = scan.slices.size();
}

void run_crossover(const RunConfig& cfg, RunOutcome& out) {
    SystemParams tmpl = cfg.params();
    const SweepAxis axis = cfg.crossover_axis;
    const double lo = cfg.bracket_lo.value_or(axis == SweepAxis::Chi ? 1.0 : 0.5);
    const double hi = cfg.bracket_hi.value_or(axis == SweepAxis::Chi ? 1000.0 : 3.2);
    if (axis == SweepAxis::Chi) tmpl.chi = lo;

    CrossoverRow row;
    row.axis = axis;
    const CrossoverEstimates est = crossover_estimates(tmpl);
    row.estimate = axis == SweepAxis::Chi ? est.chi_c : est.alpha_c;
    try {
        row.result = find_crossover(tmpl, axis, lo, hi, cfg.sweep_options());
    } catch (const NoSignChange& e) {
        out.failed_rows.push_back({{"error", e.what()},
                                   {"lo", lo},
                                   {"hi", hi},
                                   {"lo_difference", e.lo_difference},
                                   {"hi_difference", e.hi_difference}});
        out.result["error"] = e.what();
        return;
    }
    out.csv = crossover_csv(row);
    out.result["value"] = row.result.value;
    out.result["lo"] = row.result.lo;
    out.result["hi"] = row.result.hi;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

std::string sibling(const std::string& output, const std::string& suffix) {
    std::filesystem::path p(output);
    p.replace_extension(suffix);
    return p.string();
}

} // namespace

std::string manifest_path(const std::string& output) { return sibling(output, ".manifest.json"); }
std::string minima_path(const std::string& output) { return sibling(output, ".minima.csv"); }

RunOutcome execute(const RunConfig& cfg) {
    validate(cfg);
    RunOutcome out;
    if (cfg.task != Task::Spectrum) {
        std::set<double> alphas;
        for (double a : values_of(cfg.alpha, cfg.alpha_grid)) alphas.insert(a);
        if (cfg.task == Task::Crossover && cfg.crossover_axis == SweepAxis::Alpha && cfg.bracket_hi)
            alphas.insert(*cfg.bracket_hi);
        for (double a : alphas)
            if (!truncation_sufficient(a, cfg.n_max))
                add_warning(out, "n_max = " + std::to_string(cfg.n_max) +
                                     " is below alpha^2 + 6 alpha + 10 for alpha = " + format_number(a));
    }
    switch (cfg.task) {
    case Task::Spectrum: run_spectrum(cfg, out); break;
    case Task::Distance:
    case Task::Fig2:
    case Task::Fig4: run_rows(cfg, out); break;
    case Task::Fig3: run_gamma_scan(cfg, out); break;
    case Task::Crossover: run_crossover(cfg, out); break;
    }
    out.exit_code = out.failed_rows.empty() ? kExitOk : kExitPartial;
    return out;
}

json make_manifest(const RunConfig& cfg, const RunOutcome& outcome, double wall_time_s, const json& outputs) {
    const DiamondOptions d = cfg.sweep_options().diamond;
    json m;
    m["config"] = cfg.to_json();
    m["code_version"] = code_version();
    m["solver"] = {{"tol", d.tol}, {"floor", d.floor}, {"rel_target", d.rel_target},
                   {"max_iterations", d.max_iterations}};
    m["wall_time_s"] = wall_time_s;
    m["exit_code"] = outcome.exit_code;
    m["status"] = outcome.exit_code == kExitOk ? "ok" : "partial_failure";
    m["failed_rows"] = outcome.failed_rows;
    m["warnings"] = outcome.warnings;
    m["result"] = outcome.result;
    m["outputs"] = outputs;
    return m;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const auto start = std::chrono::steady_clock::now();
    const RunOutcome outcome = execute(cfg);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    for (const auto& w : outcome.warnings) log << "warning: " << w << '\n';
    for (const auto& f : outcome.failed_rows) log << "failed: " << f.dump() << '\n';

    if (cfg.output.empty()) {
        out << outcome.csv;
        return outcome.exit_code;
    }
    json outputs = json::object();
    if (!outcome.csv.empty()) {
        write_file(cfg.output, outcome.csv);
        outputs["csv"] = cfg.output;
    }
    if (outcome.minima_csv) {
        write_file(minima_path(cfg.output), *outcome.minima_csv);
        outputs["minima_csv"] = minima_path(cfg.output);
    }
    const std::string mpath = manifest_path(cfg.output);
    write_file(mpath, make_manifest(cfg, outcome, wall, outputs).dump(2) + "\n");
    log << "wrote " << cfg.output << " and " << mpath << '\n';
    return outcome.exit_code;
}

} // namespace qmb
