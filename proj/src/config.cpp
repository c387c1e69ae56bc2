#include "qmb/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace qmb {

using nlohmann::json;

namespace {

std::string format_error(const std::string& path, int line, const std::string& message) {
    std::ostringstream out;
    out << "config error";
    if (!path.empty()) out << " at '" << path << "'";
    if (line > 0) out << " (line " << line << ")";
    out << ": " << message;
    return out.str();
}

int line_of_offset(const std::string& text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Locates a key path by searching for each quoted key in turn after the
// previous one. Array indices in the path are skipped.
int line_of_path(const std::string& text, const std::vector<std::string>& keys) {
    std::size_t pos = 0;
    for (const auto& k : keys) {
        const std::string quoted = "\"" + k.substr(0, k.find('[')) + "\"";
        std::size_t hit = pos;
        while (true) {
            hit = text.find(quoted, hit);
            if (hit == std::string::npos) return 0;
            std::size_t after = hit + quoted.size();
            while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
            if (after < text.size() && text[after] == ':') break;
            hit += quoted.size();
        }
        pos = hit + quoted.size();
    }
    return keys.empty() ? 0 : line_of_offset(text, pos);
}

// Walks the document while remembering where each key lives in the text.
class Reader {
public:
    Reader(const std::string& text, std::vector<std::string> root) : text_(text), root_(std::move(root)) {}

    [[noreturn]] void fail(const std::vector<std::string>& keys, const std::string& message) const {
        std::vector<std::string> full = root_;
        full.insert(full.end(), keys.begin(), keys.end());
        std::string path;
        for (const auto& k : keys) path += (path.empty() ? "" : ".") + k;
        throw ConfigError(path, line_of_path(text_, full), message);
    }

    void reject_unknown(const json& obj, const std::vector<std::string>& where,
                        const std::set<std::string>& allowed) const {
        if (!obj.is_object()) fail(where, "expected an object");
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (allowed.count(it.key())) continue;
            std::vector<std::string> keys = where;
            keys.push_back(it.key());
            std::string names;
            for (const auto& a : allowed) names += (names.empty() ? "" : ", ") + a;
            fail(keys, "unknown key (allowed: " + names + ")");
        }
    }

    double number(const json& v, const std::vector<std::string>& keys) const {
        if (!v.is_number()) fail(keys, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(keys, "expected a finite number");
        return x;
    }

    int integer(const json& v, const std::vector<std::string>& keys) const {
        if (!v.is_number_integer()) fail(keys, "expected an integer");
        return v.get<int>();
    }

    std::string string(const json& v, const std::vector<std::string>& keys) const {
        if (!v.is_string()) fail(keys, "expected a string");
        return v.get<std::string>();
    }

    bool boolean(const json& v, const std::vector<std::string>& keys) const {
        if (!v.is_boolean()) fail(keys, "expected true or false");
        return v.get<bool>();
    }

    std::vector<double> grid(const json& v, const std::vector<std::string>& keys) const {
        if (v.is_array()) {
            std::vector<double> out;
            for (std::size_t i = 0; i < v.size(); ++i) {
                std::vector<std::string> k = keys;
                k.back() += "[" + std::to_string(i) + "]";
                if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) fail(k, "expected a finite number");
                out.push_back(v[i].get<double>());
            }
            return out;
        }
        if (!v.is_object()) fail(keys, "expected an array of numbers or a grid generator object");
        if (v.contains("log10_from") || v.contains("log10_to") || v.contains("per_decade")) {
            reject_unknown(v, keys, {"log10_from", "log10_to", "per_decade"});
            const double from = number(field(v, keys, "log10_from"), sub(keys, "log10_from"));
            const double to = number(field(v, keys, "log10_to"), sub(keys, "log10_to"));
            const int per = integer(field(v, keys, "per_decade"), sub(keys, "per_decade"));
            if (per < 1) fail(sub(keys, "per_decade"), "must be >= 1");
            if (!(to > from)) fail(sub(keys, "log10_to"), "must exceed log10_from");
            return log_grid(from, to, per);
        }
        reject_unknown(v, keys, {"from", "to", "count"});
        const double from = number(field(v, keys, "from"), sub(keys, "from"));
        const double to = number(field(v, keys, "to"), sub(keys, "to"));
        const int count = integer(field(v, keys, "count"), sub(keys, "count"));
        if (count < 1) fail(sub(keys, "count"), "must be >= 1");
        return linear_grid(from, to, count);
    }

    const json& field(const json& obj, const std::vector<std::string>& keys, const std::string& name) const {
        if (!obj.contains(name)) fail(keys, "missing required key '" + name + "'");
        return obj.at(name);
    }

    static std::vector<std::string> sub(std::vector<std::string> keys, const std::string& k) {
        keys.push_back(k);
        return keys;
    }

private:
    const std::string& text_;
    std::vector<std::string> root_;
};

void check_grid(const std::vector<double>& g, const std::string& name) {
    if (g.empty()) throw ConfigError("params." + name, 0, "grid must not be empty");
    for (std::size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1]))
            throw ConfigError("params." + name, 0,
                              "grid must be strictly increasing (entry " + std::to_string(i) + ")");
}

} // namespace

ConfigError::ConfigError(std::string p, int l, const std::string& message)
    : std::runtime_error(format_error(p, l, message)), path(std::move(p)), line(l) {}

const char* to_string(Task t) {
    switch (t) {
    case Task::Spectrum: return "spectrum";
    case Task::Distance: return "distance";
    case Task::Fig2: return "fig2";
    case Task::Fig3: return "fig3";
    case Task::Fig4: return "fig4";
    case Task::Crossover: return "crossover";
    }
    return "?";
}

Task parse_task(const std::string& s) {
    static const std::map<std::string, Task> names{
        {"spectrum", Task::Spectrum}, {"distance", Task::Distance}, {"fig2", Task::Fig2},
        {"fig3", Task::Fig3},         {"fig4", Task::Fig4},         {"crossover", Task::Crossover}};
    const auto it = names.find(s);
    if (it == names.end())
        throw std::invalid_argument("unknown task '" + s +
                                    "' (expected spectrum, distance, fig2, fig3, fig4 or crossover)");
    return it->second;
}

std::vector<double> log_grid(double log10_from, double log10_to, int per_decade) {
    if (per_decade < 1) throw std::invalid_argument("log_grid: per_decade must be >= 1");
    const int steps = std::max(1, static_cast<int>(std::lround((log10_to - log10_from) * per_decade)));
    std::vector<double> out;
    out.reserve(steps + 1);
    for (int k = 0; k <= steps; ++k)
        out.push_back(std::pow(10.0, log10_from + (log10_to - log10_from) * k / steps));
    return out;
}

std::vector<double> linear_grid(double from, double to, int count) {
    if (count < 1) throw std::invalid_argument("linear_grid: count must be >= 1");
    if (count == 1) return {from};
    std::vector<double> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) out.push_back(from + (to - from) * k / (count - 1));
    return out;
}

std::vector<std::string> preset_names() { return {"fig2", "fig3", "fig4"}; }

void apply_preset(RunConfig& cfg, const std::string& name) {
    if (name == "fig2" || name == "fig3") {
        cfg.delta0 = 102.0;
        cfg.omega1.reset();
        cfg.omega2.reset();
        cfg.J = 3.8;
        cfg.chi.reset();
        cfg.alpha = 2.0;
        cfg.alpha_grid.clear();
        cfg.n_max = 40;
        cfg.chi_grid = name == "fig2" ? log_grid(-0.5, 3.0, 13) : log_grid(-0.5, 3.0, 6);
        return;
    }
    if (name == "fig4") {
        cfg.delta0 = 80.0;
        cfg.omega1.reset();
        cfg.omega2.reset();
        cfg.J = 10.0;
        cfg.chi = 20.0;
        cfg.chi_grid.clear();
        cfg.alpha.reset();
        cfg.alpha_grid = linear_grid(0.1, 3.2, 32);
        cfg.n_max = 40;
        return;
    }
    throw ConfigError("preset", 0, "unknown preset '" + name + "' (expected fig2, fig3 or fig4)");
}

SystemParams RunConfig::params() const {
    SystemParams p;
    if (omega1 && omega2) {
        p.omega1 = *omega1;
        p.omega2 = *omega2;
    } else {
        p.omega1 = -delta0;
        p.omega2 = delta0;
    }
    p.J = J;
    p.chi = chi ? *chi : (chi_grid.empty() ? 0.0 : chi_grid.front());
    p.alpha = alpha ? *alpha : (alpha_grid.empty() ? 0.0 : alpha_grid.front());
    p.n_max = n_max;
    return p;
}

SweepOptions RunConfig::sweep_options() const {
    SweepOptions o;
    o.diamond.tol = tol;
    o.variant = variant;
    o.check_outcomes = check_outcomes;
    return o;
}

json RunConfig::to_json() const {
    json params = json::object();
    params["delta0"] = delta0;
    if (omega1 && omega2) {
        params["omega1"] = *omega1;
        params["omega2"] = *omega2;
    }
    params["J"] = J;
    if (chi) params["chi"] = *chi;
    if (!chi_grid.empty()) params["chi_grid"] = chi_grid;
    if (alpha) params["alpha"] = *alpha;
    if (!alpha_grid.empty()) params["alpha_grid"] = alpha_grid;
    params["n_max"] = n_max;

    json out = json::object();
    out["task"] = to_string(task);
    if (preset) out["preset"] = *preset;
    out["params"] = params;
    out["tol"] = tol;
    out["variant"] = qmb::to_string(variant);
    out["gamma"] = {{"resolution", gamma_resolution},
                    {"snr", gamma_snr == Snr::Perfect ? "perfect" : "finite"}};
    json cross = {{"axis", qmb::to_string(crossover_axis)}};
    if (bracket_lo) cross["lo"] = *bracket_lo;
    if (bracket_hi) cross["hi"] = *bracket_hi;
    out["crossover"] = cross;
    out["check_outcomes"] = check_outcomes;
    if (!output.empty()) out["output"] = output;
    return out;
}

void validate(const RunConfig& cfg) {
    if (cfg.n_max < 1) throw ConfigError("params.n_max", 0, "n_max must be >= 1");
    if (!(cfg.tol > 0.0)) throw ConfigError("tol", 0, "tol must be positive");
    if (cfg.gamma_resolution < 2) throw ConfigError("gamma.resolution", 0, "resolution must be >= 2");
    if (cfg.omega1.has_value() != cfg.omega2.has_value())
        throw ConfigError("params.omega1", 0, "omega1 and omega2 must be given together");
    if (cfg.omega1) {
        const double implied = 0.5 * (*cfg.omega2 - *cfg.omega1);
        if (std::abs(implied - cfg.delta0) > 1e-12 * std::max(1.0, std::abs(cfg.delta0)))
            throw ConfigError("params.delta0", 0,
                              "delta0 is inconsistent with (omega2 - omega1)/2 = " + std::to_string(implied));
    }
    if (cfg.chi && !cfg.chi_grid.empty())
        throw ConfigError("params.chi", 0, "give either chi or chi_grid, not both");
    if (cfg.alpha && !cfg.alpha_grid.empty())
        throw ConfigError("params.alpha", 0, "give either alpha or alpha_grid, not both");
    if (!cfg.chi_grid.empty()) check_grid(cfg.chi_grid, "chi_grid");
    if (!cfg.alpha_grid.empty()) check_grid(cfg.alpha_grid, "alpha_grid");

    const bool has_chi = cfg.chi || !cfg.chi_grid.empty();
    const bool has_alpha = cfg.alpha || !cfg.alpha_grid.empty();
    const bool crossover_chi = cfg.task == Task::Crossover && cfg.crossover_axis == SweepAxis::Chi;
    const bool crossover_alpha = cfg.task == Task::Crossover && cfg.crossover_axis == SweepAxis::Alpha;
    if (!has_chi && !crossover_chi)
        throw ConfigError("params", 0, "missing chi: give either params.chi or params.chi_grid");
    if (!has_alpha && cfg.task != Task::Spectrum && !crossover_alpha)
        throw ConfigError("params", 0, "missing alpha: give either params.alpha or params.alpha_grid");

    auto values = [](const std::optional<double>& s, const std::vector<double>& g) {
        return s ? std::vector<double>{*s} : g;
    };
    for (double c : values(cfg.chi, cfg.chi_grid))
        if (c == 0.0) throw ConfigError("params.chi", 0, "chi must be nonzero");
    for (double a : values(cfg.alpha, cfg.alpha_grid))
        if (a < 0.0) throw ConfigError("params.alpha", 0, "alpha must be >= 0");

    if (cfg.task == Task::Fig3 && !cfg.alpha)
        throw ConfigError("params.alpha", 0, "fig3 needs a single alpha");
    if (cfg.task == Task::Crossover) {
        if (crossover_chi && !cfg.alpha)
            throw ConfigError("params.alpha", 0, "a chi crossover needs a single alpha");
        if (crossover_alpha && !cfg.chi)
            throw ConfigError("params.chi", 0, "an alpha crossover needs a single chi");
        if (cfg.bracket_lo && cfg.bracket_hi && !(*cfg.bracket_lo < *cfg.bracket_hi))
            throw ConfigError("crossover.lo", 0, "bracket must satisfy lo < hi");
    }
}

RunConfig parse_config(const std::string& text, std::optional<Task> task_override) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0), e.what());
    }
    if (!doc.is_object()) throw ConfigError("", 1, "top level must be an object");

    std::vector<std::string> root;
    if (doc.contains("config")) {
        // A run manifest: only its config block matters.
        Reader(text, {}).reject_unknown(
            doc, {}, {"config", "code_version", "wall_time_s", "failed_rows", "warnings", "outputs", "status", "exit_code", "result", "solver"});
        doc = json(doc.at("config"));
        root = {"config"};
    }
    const Reader rd(text, root);
    rd.reject_unknown(doc, {},
                      {"task", "preset", "params", "tol", "variant", "gamma", "crossover",
                       "check_outcomes", "output"});

    RunConfig cfg;
    if (doc.contains("task")) {
        try {
            cfg.task = parse_task(rd.string(doc["task"], {"task"}));
        } catch (const std::invalid_argument& e) {
            rd.fail({"task"}, e.what());
        }
    }
    if (task_override) cfg.task = *task_override;

    if (doc.contains("preset")) {
        const std::string name = rd.string(doc["preset"], {"preset"});
        const auto names = preset_names();
        if (std::find(names.begin(), names.end(), name) == names.end())
            rd.fail({"preset"}, "unknown preset '" + name + "' (expected fig2, fig3 or fig4)");
        cfg.preset = name;
    } else if (cfg.task == Task::Fig2 || cfg.task == Task::Fig3 || cfg.task == Task::Fig4) {
        cfg.preset = std::string(to_string(cfg.task));
    }
    if (cfg.preset) apply_preset(cfg, *cfg.preset);

    if (doc.contains("params")) {
        const json& p = doc["params"];
        const std::vector<std::string> at{"params"};
        rd.reject_unknown(p, at,
                          {"delta0", "omega1", "omega2", "J", "chi", "chi_grid", "alpha", "alpha_grid", "n_max"});
        auto num = [&](const char* k) { return rd.number(p[k], Reader::sub(at, k)); };
        if (p.contains("omega1") || p.contains("omega2")) {
            if (!p.contains("omega1") || !p.contains("omega2"))
                rd.fail(Reader::sub(at, p.contains("omega1") ? "omega1" : "omega2"),
                        "omega1 and omega2 must be given together");
            cfg.omega1 = num("omega1");
            cfg.omega2 = num("omega2");
            const double implied = 0.5 * (*cfg.omega2 - *cfg.omega1);
            if (p.contains("delta0")) {
                cfg.delta0 = num("delta0");
                if (std::abs(implied - cfg.delta0) > 1e-12 * std::max(1.0, std::abs(cfg.delta0)))
                    rd.fail(Reader::sub(at, "delta0"),
                            "delta0 is inconsistent with (omega2 - omega1)/2 = " + std::to_string(implied));
            } else {
                cfg.delta0 = implied;
            }
        } else if (p.contains("delta0")) {
            cfg.delta0 = num("delta0");
            cfg.omega1.reset();
            cfg.omega2.reset();
        }
        if (p.contains("J")) cfg.J = num("J");
        if (p.contains("chi") || p.contains("chi_grid")) {
            cfg.chi.reset();
            cfg.chi_grid.clear();
            if (p.contains("chi")) cfg.chi = num("chi");
            if (p.contains("chi_grid")) cfg.chi_grid = rd.grid(p["chi_grid"], Reader::sub(at, "chi_grid"));
        }
        if (p.contains("alpha") || p.contains("alpha_grid")) {
            cfg.alpha.reset();
            cfg.alpha_grid.clear();
            if (p.contains("alpha")) cfg.alpha = num("alpha");
            if (p.contains("alpha_grid")) cfg.alpha_grid = rd.grid(p["alpha_grid"], Reader::sub(at, "alpha_grid"));
        }
        if (p.contains("n_max")) cfg.n_max = rd.integer(p["n_max"], Reader::sub(at, "n_max"));
    }
    if (doc.contains("tol")) cfg.tol = rd.number(doc["tol"], {"tol"});
    if (doc.contains("variant")) {
        try {
            cfg.variant = parse_variant(rd.string(doc["variant"], {"variant"}));
        } catch (const std::invalid_argument& e) {
            rd.fail({"variant"}, e.what());
        }
    }
    if (doc.contains("gamma")) {
        const json& g = doc["gamma"];
        rd.reject_unknown(g, {"gamma"}, {"resolution", "snr"});
        if (g.contains("resolution")) cfg.gamma_resolution = rd.integer(g["resolution"], {"gamma", "resolution"});
        if (g.contains("snr")) {
            const std::string s = rd.string(g["snr"], {"gamma", "snr"});
            if (s == "perfect") cfg.gamma_snr = Snr::Perfect;
            else if (s == "finite") cfg.gamma_snr = Snr::Finite;
            else rd.fail({"gamma", "snr"}, "expected perfect or finite");
        }
    }
    if (doc.contains("crossover")) {
        const json& c = doc["crossover"];
        rd.reject_unknown(c, {"crossover"}, {"axis", "lo", "hi"});
        if (c.contains("axis")) {
            const std::string s = rd.string(c["axis"], {"crossover", "axis"});
            if (s == "chi") cfg.crossover_axis = SweepAxis::Chi;
            else if (s == "alpha") cfg.crossover_axis = SweepAxis::Alpha;
            else rd.fail({"crossover", "axis"}, "expected chi or alpha");
        }
        if (c.contains("lo")) cfg.bracket_lo = rd.number(c["lo"], {"crossover", "lo"});
        if (c.contains("hi")) cfg.bracket_hi = rd.number(c["hi"], {"crossover", "hi"});
    }
    if (doc.contains("check_outcomes")) cfg.check_outcomes = rd.boolean(doc["check_outcomes"], {"check_outcomes"});
    if (doc.contains("output")) cfg.output = rd.string(doc["output"], {"output"});

    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        // Attach the source line when the offending key is present in the text.
        std::vector<std::string> keys;
        std::stringstream ss(e.path);
        for (std::string k; std::getline(ss, k, '.');) keys.push_back(k);
        const std::string message = std::string(e.what()).substr(std::string(e.what()).find(": ") + 2);
        std::vector<std::string> full = root;
        full.insert(full.end(), keys.begin(), keys.end());
        throw ConfigError(e.path, line_of_path(text, full), message);
    }
    return cfg;
}

} // namespace qmb
