#include "qlg/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace qlg::tiling {

HexagonSpec::HexagonSpec(int a_, int b_, int c_, double q_, double kappa_)
    : a(a_), b(b_), c(c_), q(q_), kappa(kappa_) {
    require(a >= 1 && b >= 1 && c >= 1, "HexagonSpec: sides must be >= 1");
    require(q > 0.0 && q < 1.0, "HexagonSpec: q in (0,1) violated");
    require(kappa >= 0.0, "HexagonSpec: kappa >= 0 violated");
    require(kappa < std::pow(q, (b + c - 1) / 2.0),
            "HexagonSpec: kappa below q^{(b+c-1)/2} violated");
    N = a;
    T = b + c;
    S = c;
}

void validate_state(const HexagonSpec& spec, const TilingState& st) {
    require(static_cast<int>(st.x.size()) == spec.T + 1, "TilingState: wrong slice count");
    for (int t = 0; t <= spec.T; ++t) {
        require(static_cast<int>(st.x[t].size()) == spec.N, "TilingState: wrong particle count");
        for (int k = 0; k < spec.N; ++k) {
            require(st.x[t][k] >= spec.window_lo(t) && st.x[t][k] <= spec.window_hi(t),
                    "TilingState: particle outside slice window");
            if (k) require(st.x[t][k - 1] < st.x[t][k], "TilingState: not strictly increasing");
            if (t) {
                int d = st.x[t][k] - st.x[t - 1][k];
                require(d == 0 || d == 1, "TilingState: step not in {0,1}");
            }
        }
    }
    for (int k = 0; k < spec.N; ++k) {
        require(st.x[0][k] == k, "TilingState: left boundary");
        require(st.x[spec.T][k] == spec.S + k, "TilingState: right boundary");
    }
}

TilingState minimal_tiling(const HexagonSpec& spec) {
    TilingState st;
    st.x.assign(spec.T + 1, std::vector<int>(spec.N));
    for (int t = 0; t <= spec.T; ++t)
        for (int k = 0; k < spec.N; ++k) st.x[t][k] = k + spec.window_lo(t);
    return st;
}

namespace {
// lozenge factor at the hole (t, y): j = y - t/2 + 1
LogVal lozenge_factor(const HexagonSpec& spec, int t, int y) {
    double j = y - 0.5 * t + 1.0;
    double e = j - (spec.c + 1) / 2.0;
    double v = spec.kappa * spec.kappa * std::pow(spec.q, e) - std::pow(spec.q, -e);
    return LogVal::from(v);
}
}  // namespace

double tiling_log_weight(const HexagonSpec& spec, const TilingState& st) {
    validate_state(spec, st);
    double s = 0.0;
    int sign = 0;
    for (int t = 0; t <= spec.T; ++t) {
        std::vector<bool> occ(spec.window_hi(t) - spec.window_lo(t) + 1, false);
        for (int k = 0; k < spec.N; ++k) occ[st.x[t][k] - spec.window_lo(t)] = true;
        for (int y = spec.window_lo(t); y <= spec.window_hi(t); ++y) {
            if (occ[y - spec.window_lo(t)]) continue;
            LogVal f = lozenge_factor(spec, t, y);
            require(f.sign != 0, "tiling_log_weight: vanishing lozenge factor");
            if (sign == 0) sign = f.sign;
            require(f.sign == sign, "tiling_log_weight: lozenge factors change sign");
            s += f.lg;
        }
    }
    return s;
}

double local_flip_ratio(const HexagonSpec& spec, int t, int x_old, int x_new) {
    return std::exp(lozenge_factor(spec, t, x_old).lg - lozenge_factor(spec, t, x_new).lg);
}

namespace {
template <typename F>
void for_each_slice_step(const HexagonSpec& spec, const std::vector<int>& cur, int t, F&& fn) {
    // enumerate valid next-slice configurations reachable from cur
    const int N = spec.N;
    std::vector<int> nxt(N);
    std::function<void(int)> rec = [&](int k) {
        if (k == N) {
            fn(nxt);
            return;
        }
        for (int d = 0; d <= 1; ++d) {
            int v = cur[k] + d;
            if (v < spec.window_lo(t + 1) || v > spec.window_hi(t + 1)) continue;
            if (k && v <= nxt[k - 1]) continue;
            nxt[k] = v;
            rec(k + 1);
        }
    };
    rec(0);
}
}  // namespace

uint64_t count_tilings(const HexagonSpec& spec) {
    std::map<std::vector<int>, uint64_t> cur;
    std::vector<int> start(spec.N);
    for (int k = 0; k < spec.N; ++k) start[k] = k;
    cur[start] = 1;
    for (int t = 0; t < spec.T; ++t) {
        std::map<std::vector<int>, uint64_t> nxt;
        for (auto& [cfg, cnt] : cur)
            for_each_slice_step(spec, cfg, t, [&](const std::vector<int>& n) {
                uint64_t& slot = nxt[n];
                slot = (slot > UINT64_MAX - cnt) ? UINT64_MAX : slot + cnt;
            });
        cur = std::move(nxt);
    }
    std::vector<int> end(spec.N);
    for (int k = 0; k < spec.N; ++k) end[k] = spec.S + k;
    auto it = cur.find(end);
    return it == cur.end() ? 0 : it->second;
}

std::vector<std::pair<TilingState, double>> enumerate_tilings(const HexagonSpec& spec,
                                                              uint64_t cap) {
    uint64_t count = count_tilings(spec);
    if (count > cap)
        throw std::runtime_error("enumerate_tilings: " + std::to_string(count) +
                                 " tilings exceed cap " + std::to_string(cap));
    std::vector<std::pair<TilingState, double>> out;
    TilingState st;
    st.x.assign(spec.T + 1, std::vector<int>(spec.N));
    for (int k = 0; k < spec.N; ++k) st.x[0][k] = k;
    std::function<void(int)> rec = [&](int t) {
        if (t == spec.T) {
            for (int k = 0; k < spec.N; ++k)
                if (st.x[spec.T][k] != spec.S + k) return;
            out.emplace_back(st, tiling_log_weight(spec, st));
            return;
        }
        for_each_slice_step(spec, st.x[t], t, [&](const std::vector<int>& n) {
            st.x[t + 1] = n;
            rec(t + 1);
        });
    };
    rec(0);
    double mx = -std::numeric_limits<double>::infinity();
    for (auto& [s, lw] : out) mx = std::max(mx, lw);
    KahanSum z;
    for (auto& [s, lw] : out) z.add(std::exp(lw - mx));
    double logZ = mx + std::log(z.total());
    for (auto& [s, lw] : out) lw = std::exp(lw - logZ);
    return out;
}

std::pair<ensemble::QRacahParams, int> slice_to_ensemble(const HexagonSpec& spec, int t) {
    require(t >= 0 && t <= spec.T, "slice_to_ensemble: t outside [0,T]");
    const int N = spec.N, T = spec.T, S = spec.S;
    const double q = spec.q, k2 = spec.kappa * spec.kappa;
    auto qp = [&](int e) { return std::pow(q, e); };
    if (t <= S && t <= T - S)
        return {ensemble::QRacahParams(qp(-S - N), qp(S - T - N), k2 * qp(-S + N), q, t + N - 1, N),
                0};
    if (S <= t && t <= T - S)
        return {ensemble::QRacahParams(qp(-t - N), qp(t - T - N), k2 * qp(-t + N), q, S + N - 1, N),
                0};
    if (T - S <= t && t <= S)
        return {ensemble::QRacahParams(qp(-T - N + t), qp(-t - N), k2 * qp(-T + t + N), q,
                                       T - S + N - 1, N),
                T - t - S};
    return {ensemble::QRacahParams(qp(-T - N + S), qp(-S - N), k2 * qp(-T + S + N), q,
                                   T - t + N - 1, N),
            T - t - S};
}

void mcmc_run(const HexagonSpec& spec, TilingState& st, long sweeps, std::mt19937_64& rng) {
    if (spec.T < 2) return;  // no mutable slice
    const long per_sweep = static_cast<long>(spec.T - 1) * spec.N;
    std::uniform_int_distribution<int> ut(1, spec.T - 1), uk(0, spec.N - 1);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (long it = 0; it < sweeps * per_sweep; ++it) {
        int t = ut(rng), k = uk(rng);
        int dir = (rng() & 1) ? 1 : -1;
        int x0 = st.x[t][k], x1 = x0 + dir;
        if (x1 < spec.window_lo(t) || x1 > spec.window_hi(t)) continue;
        if (k > 0 && x1 <= st.x[t][k - 1]) continue;
        if (k + 1 < spec.N && x1 >= st.x[t][k + 1]) continue;
        int dprev = x1 - st.x[t - 1][k];
        int dnext = st.x[t + 1][k] - x1;
        if ((dprev != 0 && dprev != 1) || (dnext != 0 && dnext != 1)) continue;
        double ratio = local_flip_ratio(spec, t, x0, x1);
        if (ratio >= 1.0 || unif(rng) < ratio) st.x[t][k] = x1;
    }
}

TilingState mcmc_sample(const HexagonSpec& spec, long sweeps, uint64_t seed) {
    TilingState st = minimal_tiling(spec);
    std::mt19937_64 rng(seed);
    mcmc_run(spec, st, sweeps, rng);
    return st;
}

TilingState mean_profile_tiling(const HexagonSpec& spec) {
    TilingState st;
    st.x.assign(spec.T + 1, std::vector<int>(spec.N));
    std::vector<std::vector<int>> target(spec.T + 1, std::vector<int>(spec.N));
    for (int t = 0; t <= spec.T; ++t) {
        auto [params, shift] = slice_to_ensemble(spec, t);
        auto kern = ensemble::build_kernel(params);
        std::vector<double> cum(params.M + 2, 0.0);
        for (int x = 0; x <= params.M; ++x) cum[x + 1] = cum[x] + kern.K(x, x);
        int lam = 0;
        for (int k = 0; k < spec.N; ++k) {
            while (lam <= params.M && cum[lam + 1] < k + 0.5) ++lam;
            target[t][k] = std::min(lam, params.M) - shift;
        }
    }
    for (int k = 0; k < spec.N; ++k) st.x[0][k] = k;
    for (int t = 1; t <= spec.T; ++t)
        for (int k = 0; k < spec.N; ++k) {
            int lo = std::max(st.x[t - 1][k], spec.window_lo(t));
            if (k > 0) lo = std::max(lo, st.x[t][k - 1] + 1);
            int hi = std::min(st.x[t - 1][k] + 1, spec.window_hi(t) - (spec.N - 1 - k));
            require(lo <= hi, "mean_profile_tiling: repair infeasible");
            st.x[t][k] = std::min(std::max(target[t][k], lo), hi);
        }
    validate_state(spec, st);
    return st;
}

int HeightSample::h(int t, double s) const {
    int c = 0;
    for (int v : tiling.x[t]) c += (v < s);
    return c;
}

int HeightSample::height_transformed(int t, double v) const {
    int c = 0;
    for (double w : V[t]) c += (w < v);
    return c;
}

HeightSample height_functions(const HexagonSpec& spec, const TilingState& st) {
    validate_state(spec, st);
    HeightSample hs{spec, st, {}};
    hs.V.assign(spec.T + 1, std::vector<double>(spec.N));
    const double k2 = spec.kappa * spec.kappa;
    for (int t = 0; t <= spec.T; ++t)
        for (int k = 0; k < spec.N; ++k) {
            int x = st.x[t][k];
            hs.V[t][k] = std::pow(spec.q, -x) + k2 * std::pow(spec.q, x - spec.S - t);
        }
    return hs;
}

double v_range_max(const HexagonSpec& spec) {
    return std::pow(spec.q, -spec.S - spec.N) +
           spec.kappa * spec.kappa * std::pow(spec.q, -spec.S - spec.T) + 1.0;
}

double linear_statistic(const HeightSample& hs, int t, const std::function<double(double)>& R) {
    double rm = v_range_max(hs.spec);
    double s = hs.spec.N * R(rm);
    for (double v : hs.V[t]) s -= R(v);
    return s;
}

}  // namespace qlg::tiling
