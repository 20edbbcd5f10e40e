#ifndef WLAB_EXPERIMENTS_HPP
#define WLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wlab/canonical.hpp"
#include "wlab/immersion.hpp"

namespace wlab {

enum class ExperimentKind { Invariance, CanonicalSweep, Boundary, StabilityScaling, Identities };

std::string experiment_name(ExperimentKind kind);
ExperimentKind parse_experiment_name(const std::string& name);

/// Recursive surface description: the reference torus, a perturbation of a
/// base surface, a conformal image of a base surface, or a surface file.
struct SurfaceSpec {
    enum class Kind { Clifford, Perturbed, Conformal, File };
    Kind kind = Kind::Clifford;
    std::string name = "clifford";
    PerturbationSpec perturbation;          // Perturbed
    Vec4 v = Vec4::Zero();                  // Conformal
    std::shared_ptr<SurfaceSpec> base;      // Perturbed / Conformal (null = clifford)
    std::string path;                       // File

    static SurfaceSpec clifford();
    static SurfaceSpec perturbed(std::string name, PerturbationSpec spec);
    static SurfaceSpec conformal(std::string name, const Vec4& v, SurfaceSpec base);
};

Immersion build_surface(const SurfaceSpec& spec, const TorusGrid& grid);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Invariance;
    int n_theta = 128;
    int n_phi = 128;
    std::uint64_t seed = 1;
    std::string out_dir = "out";

    // invariance / identities
    std::vector<SurfaceSpec> surfaces;      // empty = default corpus
    std::vector<double> invariance_radii = {0.3, 0.6, 0.9};
    int invariance_directions = 3;

    // canonical sweep
    SurfaceSpec surface;                    // default clifford
    std::vector<double> sweep_radii = default_sweep_radii();
    int sweep_directions = 12;
    int sweep_t_steps = 64;

    // boundary
    std::vector<double> pole_radii = {0.9, 0.95, 0.99};

    // stability scaling
    std::vector<double> epsilons = {0.0, 0.002, 0.005, 0.01, 0.015, 0.02};
    int mode_m = 2;
    int mode_n = 0;

    // identities
    int monotonicity_samples = 10;
    double monotonicity_radius = 0.5;
};

/// Per-experiment defaults (the boundary experiment runs on a finer grid).
ExperimentConfig default_config(ExperimentKind kind);

/// Loads a JSON config file on top of the defaults for its experiment kind.
/// Throws ConfigError with field diagnostics; every |v| must stay <= 0.995
/// and every perturbation mode must be resolvable on the configured grid.
ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> kind);

/// Re-checks all invariants of a config (called by load_config and the CLI).
void validate_config(const ExperimentConfig& config);

struct ExperimentResult {
    bool pass = true;
    std::vector<std::string> failures;
    std::vector<std::string> outputs; // files written
};

ExperimentResult run_invariance(const ExperimentConfig& config);
ExperimentResult run_canonical_sweep(const ExperimentConfig& config);
ExperimentResult run_boundary(const ExperimentConfig& config);
ExperimentResult run_stability_scaling(const ExperimentConfig& config);
ExperimentResult run_identities(const ExperimentConfig& config);

ExperimentResult run_experiment(const ExperimentConfig& config);

/// Scaling slopes and constants reported by the stability experiment.
struct StabilityScalingSummary {
    double slope_dist_w22 = 0.0;
    double slope_h_l2 = 0.0;
    double slope_u_inf = 0.0;
    double slope_moduli_gap = 0.0;
    double ratio_min = 0.0; // dist_w22 / h_l2 extremes over the family
    double ratio_max = 0.0;
};

/// Computation core of run_stability_scaling, exposed for the test suites.
StabilityScalingSummary stability_scaling_summary(const ExperimentConfig& config,
                                                  std::vector<std::vector<double>>* rows);

} // namespace wlab

#endif
