#ifndef VSPIKE_CONFIG_HPP
#define VSPIKE_CONFIG_HPP

#include <optional>
#include <string>
#include <vector>

namespace vspike {

struct RunConfig {
    int p = 2;
    double g = 1.0;
    double alpha = 1.0;
    double delta = 0.35;
    std::vector<double> delta_list;  // sweep points; falls back to delta when empty
    double Lx = 16.0;
    int Nx = 512;
    int Ny = 192;
    double tol_shoot = 1e-13;
    double tol_solve = 1e-12;
    double tol_eigen = 1e-10;
    double tol_fixed_point = 1e-12;
    double tol_tau = 1e-11;
    double rescale_C = 10.0;
    std::string out_dir = "out";
    int threads = 1;
    double eigen_hy_target = 0.012;  // finer walls spacing for the spectral sweep

    std::vector<std::string> warnings;

    // canonical JSON (sorted keys) used for hashing and provenance
    std::string canonical_json() const;
    std::string hash() const;
};

// Parse a JSON config document; unknown keys are rejected.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// Validation throws std::invalid_argument; fills warnings for soft issues.
void validate(RunConfig& cfg);

} // namespace vspike

#endif
