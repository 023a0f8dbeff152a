#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nswn/solver.hpp"

namespace nswn {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// full run description: lattice, noise ladder, solver knobs, experiment block.
/// INI text <-> RunConfig round-trips canonically, and the canonical text is
/// what the config hash covers.
struct RunConfig {
    // [grid]
    int N = 16;
    double T = 0.25;
    int steps = 32;

    // [noise]
    std::vector<double> eps_ladder = {0.5, 0.25, 0.125, 0.0625};
    std::vector<uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};
    std::string profile = "plateau";

    // [solver]
    SolverParams solver;

    // [experiment]
    std::string study = "converge";
    int samples = 8; // bundle sample times per run
    std::string out_dir = "out";

    void validate() const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
/// canonical INI serialization (fixed key order, shortest exact doubles)
std::string canonical_text(const RunConfig& cfg);
/// FNV-1a over the canonical text
uint64_t config_hash(const RunConfig& cfg);
std::string code_version();

/// "# config_hash=... version=..." header line shared by every report
std::string report_header(const RunConfig& cfg);

std::vector<uint64_t> parse_seed_list(const std::string& s);

} // namespace nswn
