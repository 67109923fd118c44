#include "qlr/run_config.hpp"

#include <cstdlib>
#include <fstream>

#include "qlr/error.hpp"
#include "qlr/quantale.hpp"

namespace qlr {

void RunConfig::validate() const {
    if (model != "q" && model != "qr" && model != "pv" && model != "ll")
        throw DomainError("model must be one of q, qr, pv, ll (got '" + model + "')");
    if (format != "text" && format != "json" && format != "csv")
        throw DomainError("format must be one of text, json, csv (got '" + format + "')");
    if (grid < 3) throw DomainError("grid resolution must be at least 3");
    if (!(tol > 0)) throw DomainError("tolerance must be positive");
    if (radii.empty()) throw DomainError("radii list is empty");
    for (double r : radii)
        if (!(r >= 0) || r == kInf) throw DomainError("radii must be finite and non-negative");
}

RunConfig apply_json(RunConfig base, const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "model")
                base.model = v.get<std::string>();
            else if (key == "grid")
                base.grid = v.get<std::size_t>();
            else if (key == "radii")
                base.radii = v.get<std::vector<double>>();
            else if (key == "tol")
                base.tol = v.get<double>();
            else if (key == "seed")
                base.seed = v.get<std::uint64_t>();
            else if (key == "format")
                base.format = v.get<std::string>();
            else
                throw DomainError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("bad config value: ") + e.what());
    }
    return base;
}

RunConfig resolve_config(const RunConfigFlags& flags) {
    RunConfig c;
    std::optional<std::string> path = flags.config_path;
    if (!path)
        if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
    if (path) {
        std::ifstream in(*path);
        if (!in) throw DomainError("cannot open config " + *path);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw DomainError("config " + *path + ": " + e.what());
        }
        c = apply_json(c, j);
    }
    if (flags.model) c.model = *flags.model;
    if (flags.grid) c.grid = *flags.grid;
    if (flags.radii) c.radii = *flags.radii;
    if (flags.tol) c.tol = *flags.tol;
    if (flags.seed) c.seed = *flags.seed;
    if (flags.format) c.format = *flags.format;
    c.validate();
    return c;
}

nlohmann::json to_json(const RunConfig& c) {
    return {{"model", c.model}, {"grid", c.grid}, {"radii", c.radii},
            {"tol", c.tol},     {"seed", c.seed}, {"format", c.format}};
}

} // namespace qlr
