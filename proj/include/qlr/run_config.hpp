#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qlr/semantics.hpp"

namespace qlr {

struct RunConfig {
    std::string model = "q"; // q | qr | pv | ll
    std::size_t grid = kDefaultGrid;
    std::vector<double> radii = default_radii();
    double tol = 1e-9;
    std::uint64_t seed = 1;
    std::string format = "text"; // text | json | csv

    // DomainError on a value outside its range.
    void validate() const;
};

// Command-line values; unset fields fall through to the config file, then the defaults.
struct RunConfigFlags {
    std::optional<std::string> model;
    std::optional<std::size_t> grid;
    std::optional<std::vector<double>> radii;
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::optional<std::string> config_path;
};

inline constexpr const char* kConfigEnv = "QLR_CONFIG";

RunConfig apply_json(RunConfig base, const nlohmann::json& j);
// Reads config_path, or the file named by QLR_CONFIG when the flag is absent.
RunConfig resolve_config(const RunConfigFlags& flags);
nlohmann::json to_json(const RunConfig& c);

} // namespace qlr
