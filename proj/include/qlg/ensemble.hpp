#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "qlg/orthopoly.hpp"

namespace qlg::ensemble {

using orthopoly::QRacahParams;
using orthopoly::QuadraticLattice;

/// Strictly increasing particle positions 0 <= l_1 < ... < l_N <= M.
struct ParticleConfig {
    std::vector<int> lambdas;
    bool operator<(const ParticleConfig& o) const { return lambdas < o.lambdas; }
    bool operator==(const ParticleConfig& o) const { return lambdas == o.lambdas; }
};

void validate_config(const QRacahParams& p, const ParticleConfig& c);

/// Rank-N Christoffel-Darboux projection kernel on the M+1 lattice nodes:
/// K(x,y) = sqrt(w(x)w(y)) sum_{n<N} P_n(x)P_n(y)/c_n.
struct ProjectionKernel {
    QuadraticLattice lattice;
    Eigen::MatrixXd K;
};

/// log of prod_{i<j} (sigma(q^{-l_i}) - sigma(q^{-l_j}))^2 * prod_i w(l_i).
double log_unnormalized_weight(const QRacahParams& p, const ParticleConfig& c);

struct Enumeration {
    double logZ;
    std::map<ParticleConfig, double> probs;  // normalized, sums to 1
};

/// Exhaustive law of the ensemble; throws when binom(M+1, N) exceeds cap.
Enumeration enumerate_exact(const QRacahParams& p, uint64_t cap = 1000000);

/// Number of configurations binom(M+1, N), saturated at 2^63-1.
uint64_t config_count(int M, int N);

/// Kernel construction (spectral path on the Jacobi matrix).  Verifies the
/// projection invariants ||K^2 - K||_max and |trace K - N| and throws
/// std::runtime_error if they exceed 1e-8.
ProjectionKernel build_kernel(const QRacahParams& p);

/// One exact draw of the rank-N projection DPP; deterministic given seed.
ParticleConfig dpp_sample(const ProjectionKernel& k, uint64_t seed);

/// Reusable sampler: extracts the orthonormal frame of the kernel range once
/// and draws independent configurations from per-call seeds.
class DppSampler {
  public:
    explicit DppSampler(const ProjectionKernel& k);
    ParticleConfig sample(uint64_t seed) const;

  private:
    Eigen::MatrixXd frame_;  // (M+1) x N, orthonormal columns
};

struct LinearStatMoments {
    double mean_f, mean_g, cov_fg;
};

/// Exact first/second moments of linear statistics sum_x f(x), sum_x g(x)
/// over occupied nodes:  E = sum f K_xx,
/// Cov = sum_x f g K_xx - sum_{x,y} f(x) g(y) K_xy^2.
LinearStatMoments exact_linear_stat_moments(const ProjectionKernel& k,
                                            const std::function<double(int)>& f,
                                            const std::function<double(int)>& g);

/// E[prod_i (x - l_i)/(y - l_i)] in spectral coordinates via the
/// determinantal formula (k_{N-1}/k_N) c_{N-1}^{-1} [H_{N-1}(y)P_N(x) - H_N(y)P_{N-1}(x)].
double prod_ratio_expectation(const QRacahParams& p, double x, double y);

}  // namespace qlg::ensemble
