#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace l2morse {

// Parsed experiment description. Sections [complex] [group] [morse] [run],
// `key = value` lines, '#' comments. Unknown keys, duplicate keys, type
// mismatches, and cross-field conflicts are all errors carrying the line
// number of the offending key.
struct ExperimentConfig {
    // [complex]
    std::string base = "circle"; // circle | torus | file
    int p = 3;
    int q = 3;                   // torus only
    std::string complex_path;    // base = file
    double vertex_weight = 1.0;
    double edge_weight = 1.0;
    double face_weight = 1.0;    // torus only

    // [group]
    std::string kind = "lattice"; // lattice | cyclic
    int rank = 1;                 // lattice
    std::int64_t order = 4;       // cyclic

    // [morse]
    std::string pattern = "none"; // none | zigzag | quasiperiodic | file
    int c = 1;                    // zigzag critical pairs per tile
    double alpha = 0.6180339887498949; // quasiperiodic rotation number
    double amplitude = 0.3;            // quasiperiodic shift amplitude
    std::string morse_path;            // pattern = file

    // [run]
    double s = 1.0;                  // heat time
    std::vector<double> t_list{0.0}; // deformation parameters
    int window_radius = 0;           // 0 = sized automatically
    double cheb_eps = 1e-8;
    int folner_kmin = 2;
    int folner_kmax = 10;
    double ker_tol = 1e-8;
    double rank_tol = 1e-10;
    std::uint64_t seed = 1;
    int samples = 64;
    double tol = 1e-6; // verdict tolerance
    int pairs = 100;   // trace-props sample count
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Executes one command against a parsed config, writing CSV files into
// out_dir. Returns 0 when every verdict passes, 2 when a verdict fails.
// Configuration and runtime errors throw (the CLI maps them to exit 1).
// Commands: oracle-betti, heat-trace, morse-verify, trace-props, decay-fit.
int run_experiment(const ExperimentConfig& cfg, const std::string& command,
                   const std::string& out_dir);

} // namespace l2morse
