#include "qlg/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qlg::ensemble {

void validate_config(const QRacahParams& p, const ParticleConfig& c) {
    require(static_cast<int>(c.lambdas.size()) == p.N, "ParticleConfig: size != N");
    for (size_t i = 0; i < c.lambdas.size(); ++i) {
        require(c.lambdas[i] >= 0 && c.lambdas[i] <= p.M, "ParticleConfig: position outside [0,M]");
        if (i) require(c.lambdas[i - 1] < c.lambdas[i], "ParticleConfig: not strictly increasing");
    }
}

double log_unnormalized_weight(const QRacahParams& p, const ParticleConfig& c) {
    validate_config(p, c);
    double s = 0.0;
    std::vector<double> y(c.lambdas.size());
    for (size_t i = 0; i < c.lambdas.size(); ++i) {
        int l = c.lambdas[i];
        y[i] = std::pow(p.q, -l) + p.u * std::pow(p.q, l);
        s += orthopoly::log_weight(p, l);
    }
    for (size_t i = 0; i < y.size(); ++i)
        for (size_t j = i + 1; j < y.size(); ++j) s += 2.0 * std::log(std::abs(y[i] - y[j]));
    return s;
}

uint64_t config_count(int M, int N) {
    // binom(M+1, N) with saturation
    long double v = 1.0L;
    for (int i = 0; i < N; ++i) v = v * (M + 1 - i) / (i + 1);
    if (v > 9.0e18L) return UINT64_MAX;
    return static_cast<uint64_t>(std::llroundl(v));
}

namespace {
template <typename F>
void for_each_config(int M, int N, F&& fn) {
    std::vector<int> lam(N);
    for (int i = 0; i < N; ++i) lam[i] = i;
    while (true) {
        fn(lam);
        int i = N - 1;
        while (i >= 0 && lam[i] == M - (N - 1 - i)) --i;
        if (i < 0) break;
        ++lam[i];
        for (int j = i + 1; j < N; ++j) lam[j] = lam[j - 1] + 1;
    }
}
}  // namespace

Enumeration enumerate_exact(const QRacahParams& p, uint64_t cap) {
    uint64_t count = config_count(p.M, p.N);
    if (count > cap)
        throw std::runtime_error("enumerate_exact: " + std::to_string(count) +
                                 " configurations exceed cap " + std::to_string(cap));
    std::vector<std::pair<ParticleConfig, double>> logw;
    logw.reserve(count);
    double mx = -std::numeric_limits<double>::infinity();
    for_each_config(p.M, p.N, [&](const std::vector<int>& lam) {
        ParticleConfig c{lam};
        double lw = log_unnormalized_weight(p, c);
        mx = std::max(mx, lw);
        logw.emplace_back(std::move(c), lw);
    });
    KahanSum z;
    for (auto& [c, lw] : logw) z.add(std::exp(lw - mx));
    Enumeration out;
    out.logZ = mx + std::log(z.total());
    for (auto& [c, lw] : logw) out.probs.emplace(std::move(c), std::exp(lw - out.logZ));
    return out;
}

ProjectionKernel build_kernel(const QRacahParams& p) {
    QuadraticLattice lat(p);
    Eigen::MatrixXd U = orthopoly::orthonormal_matrix(lat);
    Eigen::MatrixXd Usel = U.leftCols(p.N);
    Eigen::MatrixXd K = Usel * Usel.transpose();
    double projErr = (K * K - K).cwiseAbs().maxCoeff();
    double traceErr = std::abs(K.trace() - p.N);
    if (projErr > 1e-8 || traceErr > 1e-8)
        throw std::runtime_error("build_kernel: projection invariant failed (||K^2-K||=" +
                                 std::to_string(projErr) + ", |tr K - N|=" +
                                 std::to_string(traceErr) + ")");
    return ProjectionKernel{std::move(lat), std::move(K)};
}

DppSampler::DppSampler(const ProjectionKernel& k) {
    const int dim = static_cast<int>(k.K.rows());
    const int N = k.lattice.params.N;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k.K);
    frame_.resize(dim, N);
    int col = 0;
    for (int i = dim - 1; i >= 0 && col < N; --i) {  // eigenvalues ascending
        if (es.eigenvalues()[i] > 0.5) frame_.col(col++) = es.eigenvectors().col(i);
    }
    require(col == N, "DppSampler: kernel rank != N");
}

ParticleConfig dpp_sample(const ProjectionKernel& k, uint64_t seed) {
    return DppSampler(k).sample(seed);
}

ParticleConfig DppSampler::sample(uint64_t seed) const {
    const int dim = static_cast<int>(frame_.rows());
    const int N = static_cast<int>(frame_.cols());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // HKPV sequential sampling on an orthonormal frame of the kernel range.
    Eigen::MatrixXd V = frame_;
    std::vector<int> picked;
    picked.reserve(N);
    for (int step = N; step >= 1; --step) {
        // P(x) = ||row_x(V)||^2 / step
        double r = unif(rng) * step;
        double acc = 0.0;
        int x = dim - 1;
        for (int i = 0; i < dim; ++i) {
            acc += V.leftCols(step).row(i).squaredNorm();
            if (acc >= r) {
                x = i;
                break;
            }
        }
        picked.push_back(x);
        if (step == 1) break;
        // project the frame onto the complement of e_x: eliminate row x using
        // its largest column, drop that column, re-orthonormalize.
        int jmax = 0;
        V.row(x).head(step).cwiseAbs().maxCoeff(&jmax);
        Eigen::VectorXd piv = V.col(jmax);
        double px = V(x, jmax);
        for (int j = 0; j < step; ++j) {
            if (j == jmax) continue;
            V.col(j) -= (V(x, j) / px) * piv;
        }
        if (jmax != step - 1) V.col(jmax) = V.col(step - 1);
        // Gram-Schmidt on the remaining step-1 columns
        for (int j = 0; j < step - 1; ++j) {
            for (int l = 0; l < j; ++l) V.col(j) -= V.col(l).dot(V.col(j)) * V.col(l);
            double nrm = V.col(j).norm();
            require(nrm > 1e-12, "dpp_sample: degenerate frame");
            V.col(j) /= nrm;
        }
    }
    std::sort(picked.begin(), picked.end());
    return ParticleConfig{std::move(picked)};
}

LinearStatMoments exact_linear_stat_moments(const ProjectionKernel& k,
                                            const std::function<double(int)>& f,
                                            const std::function<double(int)>& g) {
    const int dim = static_cast<int>(k.K.rows());
    Eigen::VectorXd fv(dim), gv(dim);
    for (int x = 0; x < dim; ++x) {
        fv[x] = f(x);
        gv[x] = g(x);
    }
    LinearStatMoments out;
    out.mean_f = fv.dot(k.K.diagonal());
    out.mean_g = gv.dot(k.K.diagonal());
    // symmetrized evaluation so cov_fg == cov_gf holds exactly in floating point
    Eigen::MatrixXd K2 = k.K.cwiseProduct(k.K);
    double cross = 0.5 * (fv.dot(K2 * gv) + gv.dot(K2 * fv));
    out.cov_fg = (fv.array() * gv.array() * k.K.diagonal().array()).sum() - cross;
    return out;
}

double prod_ratio_expectation(const QRacahParams& p, double x, double y) {
    QuadraticLattice lat(p);
    const int N = p.N;
    double scale = std::abs(y) + lat.nodes.back();
    for (double node : lat.nodes)
        if (std::abs(y - node) < 1e-12 * scale)
            throw std::domain_error("prod_ratio_expectation: y coincides with a lattice node");
    orthopoly::StieltjesTable tab(lat);
    LogVal kratio = orthopoly::log_leading_coeff(p, N - 1) / orthopoly::log_leading_coeff(p, N);
    LogVal det = tab.h(N - 1, y) * LogVal::from(tab.poly(N, x)) +
                 tab.h(N, y) * LogVal::from(-tab.poly(N - 1, x));
    return (kratio * det / orthopoly::log_norm(p, N - 1)).value();
}

}  // namespace qlg::ensemble
