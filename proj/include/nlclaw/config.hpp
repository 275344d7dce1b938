#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nlclaw/initial_data.hpp"

namespace nlclaw {

struct ConfigError {
    int line = 0;  // 0 when not tied to a line
    std::string key;
    std::string message;
};

struct GridSpec {
    int dim = 1;
    int n = 64;
    double length = 1.0;
};

struct KernelSpec {
    enum class Type { hks, cgv, gaussian_gradient, box, file };
    Type type = Type::hks;
    double sigma = 0.1;       // gaussian-gradient
    double half_width = 0.25; // box
    std::string path_x;       // file (per-component snapshots)
    std::string path_y;
};

struct MobilitySpec {
    enum class Type { polynomial, power, logistic, logistic_power };
    Type type = Type::logistic;
    std::vector<double> coeffs;  // polynomial
    double m = 1.0;              // power
    double alpha = 1.0;          // logistic-power
};

struct ProblemSpec {
    double epsilon = 0.0;
    double horizon = 1.0;
    double cfl_advection = 0.45;
    double cfl_diffusion = 0.45;
    double blowup_threshold = 1e6;
    double support_fraction = 0.5;
};

struct OutputSpec {
    std::string dir = "out";
    std::vector<double> times;  // explicit output times; empty -> uniform count
    int count = 9;
    bool write_snapshots = false;
};

struct RateSpec {
    std::vector<double> epsilons;
    double horizon = 0.05;
};

struct StabilitySpec {
    double horizon = 0.05;
};

struct LemmaSpec {
    int trials = 100;
    int size = 64;
};

struct KuznetsovSpec {
    double delta = 0.1;
    double eta = 0.02;
    double epsilon_viscous = 0.05;
    int snapshots = 32;
    double horizon = 0.25;
};

struct PicardSpec {
    double t_short = 0.01;
    int iterations = 8;
    int substeps = 64;
};

struct BoundsSpec {
    double horizon = 0.1;
    int count = 33;
};

struct RunConfig {
    std::string command;  // set by the caller, not the file
    std::uint64_t seed = 0;
    std::string preset;   // "", "hks", "cgv"
    std::string tv_bound_uses = "full";  // full | divergence | gradient
    double ode_constant = 1.0;
    GridSpec grid;
    KernelSpec kernel;
    MobilitySpec mobility;
    ProblemSpec problem;
    U0Spec u0;
    OutputSpec output;
    RateSpec rate;
    StabilitySpec stability;
    LemmaSpec lemmas;
    KuznetsovSpec kuznetsov;
    PicardSpec picard;
    BoundsSpec bounds;
    bool has_u0 = false;
};

struct ParsedConfig {
    RunConfig config;
    std::vector<ConfigError> errors;  // every violation, not first-error-only
    bool ok() const { return errors.empty(); }
};

/// Parse and validate a TOML-style config file ([section], key = value,
/// numbers/strings/bools/arrays, # comments). Unknown keys are rejected with
/// a nearest-key suggestion; all violations are reported together.
ParsedConfig parse_config(const std::string& path);

std::string format_errors(const ParsedConfig& parsed, const std::string& path);

/// FNV-1a 64-bit hash of the raw file bytes (manifest fingerprint).
std::uint64_t fnv1a_file_hash(const std::string& path);

}  // namespace nlclaw
