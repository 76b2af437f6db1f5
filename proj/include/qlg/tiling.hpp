#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "qlg/ensemble.hpp"

namespace qlg::tiling {

/// Hexagon with side lengths a, b, c and weight parameters (q, kappa) in the
/// real positivity window kappa in [0, q^{(b+c-1)/2}).  Derived path-picture
/// sizes: N = a paths over T = b+c time steps with total rise S = c.
struct HexagonSpec {
    int a, b, c;
    double q, kappa;
    int N, T, S;

    HexagonSpec(int a_, int b_, int c_, double q_, double kappa_);

    /// Window of admissible particle positions on slice t.
    int window_lo(int t) const { return std::max(0, t - (T - S)); }
    int window_hi(int t) const { return std::min(S, t) + N - 1; }
};

/// A tiling as N interlacing up-right paths: x[t][k], t = 0..T, k = 0..N-1,
/// with x[0] = (0..N-1), x[T] = (S..S+N-1), x[t+1][k]-x[t][k] in {0,1} and
/// strict increase in k.
struct TilingState {
    std::vector<std::vector<int>> x;
};

void validate_state(const HexagonSpec& spec, const TilingState& st);

/// Minimal tiling: every path as low as the boundary allows,
/// x[t][k] = k + max(0, t-(T-S)).
TilingState minimal_tiling(const HexagonSpec& spec);

/// log |prod over horizontal lozenges of (kappa^2 q^{j-(c+1)/2} - q^{-j+(c+1)/2})|.
/// Horizontal lozenges on slice t are the window holes; the j-coordinate of a
/// hole at height y is j = y - t/2 + 1 (fixed by the exhaustive cross-check
/// against the slice ensembles).  All lozenge factors share one sign in the
/// real window; sign-constancy is asserted.
double tiling_log_weight(const HexagonSpec& spec, const TilingState& st);

/// Weight ratio of flipping particle k on slice t from x to x +- 1, i.e. the
/// single moved hole: |w(j(t, x_old))| / |w(j(t, x_new))|.
double local_flip_ratio(const HexagonSpec& spec, int t, int x_old, int x_new);

/// Number of tilings (DP over slices), saturated at 2^63-1.
uint64_t count_tilings(const HexagonSpec& spec);

/// All tilings with normalized probabilities; throws above the cap.
std::vector<std::pair<TilingState, double>> enumerate_tilings(const HexagonSpec& spec,
                                                              uint64_t cap = 100000);

/// Theorem-level slice law: q-Racah parameters and the particle shift such
/// that (x^t_k + shift) is distributed as the ensemble.  Case conditions are
/// widened to their parameter-validity ranges so every t is covered; on
/// overlaps the induced laws coincide.
std::pair<ensemble::QRacahParams, int> slice_to_ensemble(const HexagonSpec& spec, int t);

/// Metropolis single-box dynamics from the minimal tiling; one sweep is
/// (T-1)*N proposal attempts.  Deterministic given seed.
TilingState mcmc_sample(const HexagonSpec& spec, long sweeps, uint64_t seed);

/// Deterministic near-equilibrium initial state: per slice, particle k sits
/// at the (k+1/2)-quantile of the exact kernel one-point function, repaired
/// to a valid path family.  Used to cut chain burn-in at large sizes.
TilingState mean_profile_tiling(const HexagonSpec& spec);

/// Same dynamics continued from a given state (used for thinning chains).
void mcmc_run(const HexagonSpec& spec, TilingState& st, long sweeps, std::mt19937_64& rng);

/// Height data of one tiling: h(t, s) counts particles below s on slice t,
/// the transformed coordinates are U(t) = q^{-t},
/// V(t,k) = q^{-x} + kappa^2 q^{x - S - t}, and the transformed height
/// Hcal(q^{-t}, v) counts V-values below v.
struct HeightSample {
    const HexagonSpec spec;
    TilingState tiling;
    std::vector<std::vector<double>> V;  // V[t][k]

    int h(int t, double s) const;          // #{k : x[t][k] < s}
    int height_transformed(int t, double v) const;  // #{k : V[t][k] < v}
    double U(int t) const { return std::pow(spec.q, -t); }
};

HeightSample height_functions(const HexagonSpec& spec, const TilingState& st);

/// Upper integration endpoint of the transformed height integrals:
/// q^{-S-N} + kappa^2 q^{-S-T} + 1; all particles have V-coordinate below it.
double v_range_max(const HexagonSpec& spec);

/// int Hcal(q^{-t}, v) f(v) dv evaluated exactly from the antiderivative R of
/// f as -sum_j R(V_j) + N R(v_range_max).
double linear_statistic(const HeightSample& hs, int t, const std::function<double(double)>& R);

}  // namespace qlg::tiling
