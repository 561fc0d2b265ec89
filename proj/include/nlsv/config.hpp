/// @file config.hpp
/// @brief Flat `key = value` run configuration with validation and round-trip serialization.

#pragma once

#include "nlsv/fields.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nlsv {

struct RunConfig {
    std::string scenario = "coupled-cloud";
    GridSpec grid;
    std::vector<double> eps_list{0.25};
    std::string A0;  ///< empty: take the scenario's coefficient
    std::string A1;
    std::string initial_f = "scenario";  ///< "scenario" or "none"
    std::string initial_u = "scenario";  ///< "scenario" or "zero"
    double vmax = 1.0;
    double lambda = 0.0;
    std::array<int, 4> lattice{32, 32, 16, 16};
    std::size_t max_particles = 1000000;
    double solver_tol = 1e-10;
    double tol_ledger = 10.0;  ///< ledger slack factor, multiplied by dt
    int n_cell = 64;
    int moment_grid = 16;      ///< coarse grid on which particle densities are compared
    std::string out_dir = "out";
    int snapshot_stride = 0;   ///< 0 disables field snapshots

    /// Throws ConfigError naming the violated constraint.
    void validate() const;
    /// The grid with eps set to the first entry of eps_list.
    GridSpec fine_grid(double eps) const;

    bool operator==(const RunConfig&) const = default;
};

/// Keys that must be present in a configuration file.
const std::vector<std::string>& required_config_keys();

RunConfig parse_config(const std::string& text, const std::string& source = "<string>");
RunConfig load_config(const std::string& path);
/// Every key, fixed order, full precision; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& c);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL);
std::uint64_t config_hash(const RunConfig& c);
std::string hex64(std::uint64_t v);

}  // namespace nlsv
