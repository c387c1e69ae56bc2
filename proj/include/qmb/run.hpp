// run.hpp: task dispatch for a validated RunConfig.

#pragma once

#include "qmb/config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qmb {

const char* code_version();

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitPartial = 2 };

struct RunOutcome {
    int exit_code = kExitOk;
    std::string csv;
    std::optional<std::string> minima_csv;  ///< fig3 only
    nlohmann::json result = nlohmann::json::object();
    nlohmann::json failed_rows = nlohmann::json::array();
    std::vector<std::string> warnings;
};

/// Computes every artifact of the task in memory. Does no file I/O.
RunOutcome execute(const RunConfig& cfg);

nlohmann::json make_manifest(const RunConfig& cfg, const RunOutcome& outcome, double wall_time_s,
                             const nlohmann::json& outputs);

/// Paths derived from cfg.output: "<stem>.manifest.json" and "<stem>.minima.csv".
std::string manifest_path(const std::string& output);
std::string minima_path(const std::string& output);

/// Executes the task and writes its artifacts. With an empty cfg.output the
/// CSV goes to `out` and no files are written; otherwise the CSV, the fig3
/// minima table and the manifest are written next to cfg.output. Progress
/// and warnings go to `log`. Returns the exit code.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

} // namespace qmb
