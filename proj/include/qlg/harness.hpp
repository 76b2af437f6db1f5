#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "qlg/limitshape.hpp"
#include "qlg/tiling.hpp"

namespace qlg::harness {

inline constexpr const char* kToolkitVersion = "1.0.0";
/// Master seed -> per-stream seeds via the splitmix64 derivation in core.hpp.
inline constexpr const char* kPrngId = "mt19937_64/splitmix64-streams";

/// Covariance-experiment configuration (hexagon model).  JSON keys match the
/// field names; unknown keys are rejected.
struct ExperimentConfig {
    int a = 2, b = 2, c = 2;
    double q = 0.9, kappa2 = 0.0;
    std::vector<int> slices;
    std::vector<std::vector<double>> polys;  // coefficient arrays of f_i
    int samples = 1000;
    std::string sampler = "mcmc";  // "mcmc" (joint) or "dpp" (exact per-slice)
    uint64_t seed = 1;
    long burnin_sweeps = -1;  // -1: default 50 sweeps
    long thinning_sweeps = 5;
    int chains = 4;  // mcmc samples are split across this many chains
    std::string init = "mean-profile";  // chain start: "mean-profile" | "minimal"
    std::string out_dir;

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    uint64_t hash() const;
    tiling::HexagonSpec hexagon() const;
};

struct CovReport {
    Eigen::MatrixXd cov_emp, cov_gff, ratio;  // ratio NaN below the gff floor
    nlohmann::json metadata;
    nlohmann::json to_json() const;
};

/// Section 8.4-style experiment: Y_i = -sqrt(pi) sum_j R_i(V_j) on slice t_i
/// (R_i the antiderivative of f_i), Cov_Emp from joint MCMC samples (sample
/// mean centering) or exactly from the projection kernels when sampler =
/// "dpp" (then only pairs with t_i = t_j are defined and n is irrelevant),
/// Cov_GFF from the complex-structure prediction.
CovReport run_covariance_experiment(const ExperimentConfig& cfg);

/// Exact law-of-large-numbers check for one scaled parameter set: for each N
/// compare the kernel-diagonal counting profile (1/N) E #{lambda_i <= s N}
/// with int_0^s mu on a grid; returns sup-errors keyed by N.
nlohmann::json run_lln_check(const limitshape::ScaledParams& sp, const std::vector<int>& Ns,
                             int grid = 120);

/// Named invariant bundles per module, machine-readable verdicts.
/// selection from {qspecial, orthopoly, ensemble, tiling, limitshape,
/// nekrasov, varsolve}; empty = all.
nlohmann::json run_verification_suite(const std::vector<std::string>& selection,
                                      uint64_t seed = 12345);

/// Loop-equation report for a q-Racah instance: brute-force values on
/// Chebyshev points, degree-4 fit, agreement with the determinant route.
nlohmann::json run_nekrasov_report(int M, int N, double q, double alpha_mult, double beta_mult,
                                   double delta_frac, double tol = 1e-8);

/// CSV writers for the declared external formats.
void write_tiling_samples_csv(const std::string& path, const tiling::HexagonSpec& spec,
                              const std::vector<tiling::TilingState>& states);
void write_limit_shape_csv(const std::string& path, const limitshape::HexScaledParams& hp,
                           int grid_x, int grid_y);
nlohmann::json ellipse_json(const limitshape::HexScaledParams& hp, const std::vector<double>& us);
void write_equilibrium_csv(const std::string& path, const limitshape::ScaledParams& sp, int grid);

}  // namespace qlg::harness
