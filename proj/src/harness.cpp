#include "qlg/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>

#include "qlg/ensemble.hpp"
#include "qlg/nekrasov.hpp"
#include "qlg/qspecial.hpp"
#include "qlg/varsolve.hpp"

namespace qlg::harness {

using nlohmann::json;

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    static const std::vector<std::string> known = {
        "a", "b", "c", "q", "kappa2", "slices", "polys", "samples", "sampler",
        "seed", "burnin_sweeps", "thinning_sweeps", "chains", "init", "out_dir"};
    for (auto it = j.begin(); it != j.end(); ++it)
        require(std::find(known.begin(), known.end(), it.key()) != known.end(),
                "config: unknown key '" + it.key() + "'");
    ExperimentConfig c;
    c.a = j.value("a", c.a);
    c.b = j.value("b", c.b);
    c.c = j.value("c", c.c);
    c.q = j.value("q", c.q);
    c.kappa2 = j.value("kappa2", c.kappa2);
    c.slices = j.value("slices", c.slices);
    c.polys = j.value("polys", c.polys);
    c.samples = j.value("samples", c.samples);
    c.sampler = j.value("sampler", c.sampler);
    c.seed = j.value("seed", c.seed);
    c.burnin_sweeps = j.value("burnin_sweeps", c.burnin_sweeps);
    c.thinning_sweeps = j.value("thinning_sweeps", c.thinning_sweeps);
    c.chains = j.value("chains", c.chains);
    c.init = j.value("init", c.init);
    c.out_dir = j.value("out_dir", c.out_dir);
    require(c.chains >= 1, "config: chains >= 1 required");
    require(c.init == "mean-profile" || c.init == "minimal",
            "config: init must be mean-profile or minimal");
    require(!c.slices.empty() && c.slices.size() == c.polys.size(),
            "config: slices and polys must be nonempty and of equal length");
    require(c.samples >= 1, "config: samples >= 1 required");
    require(c.sampler == "mcmc" || c.sampler == "dpp", "config: sampler must be mcmc or dpp");
    for (const auto& p : c.polys) require(!p.empty(), "config: empty polynomial");
    return c;
}

json ExperimentConfig::to_json() const {
    return json{{"a", a},
                {"b", b},
                {"c", c},
                {"q", q},
                {"kappa2", kappa2},
                {"slices", slices},
                {"polys", polys},
                {"samples", samples},
                {"sampler", sampler},
                {"seed", seed},
                {"burnin_sweeps", burnin_sweeps},
                {"thinning_sweeps", thinning_sweeps},
                {"chains", chains},
                {"init", init},
                {"out_dir", out_dir}};
}

uint64_t ExperimentConfig::hash() const {
    std::string s = to_json().dump();
    uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

tiling::HexagonSpec ExperimentConfig::hexagon() const {
    return tiling::HexagonSpec(a, b, c, q, std::sqrt(kappa2));
}

namespace {
double gff_floor(const Eigen::MatrixXd& g) { return 1e-12 * g.cwiseAbs().maxCoeff(); }
}  // namespace

CovReport run_covariance_experiment(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    tiling::HexagonSpec spec = cfg.hexagon();
    const int m = static_cast<int>(cfg.slices.size());
    for (int t : cfg.slices) require(t >= 1 && t < spec.T, "covariance: slice outside (0,T)");

    std::vector<Polynomial> fs, Rs;
    for (const auto& co : cfg.polys) {
        fs.emplace_back(co);
        Rs.push_back(fs.back().antiderivative());
    }
    limitshape::HexScaledParams hp(cfg.q, spec.N, spec.T, spec.S, cfg.kappa2);
    limitshape::ComplexStructure cs(hp);

    CovReport rep;
    rep.cov_emp.setZero(m, m);
    rep.cov_gff.setZero(m, m);
    rep.ratio.setConstant(m, m, std::numeric_limits<double>::quiet_NaN());
    std::string centering;

    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            double ui = std::pow(cfg.q, -cfg.slices[i]), uj = std::pow(cfg.q, -cfg.slices[j]);
            rep.cov_gff(i, j) = limitshape::gff_covariance_cross_slice(cs, ui, uj, fs[i], fs[j]);
        }

    if (cfg.sampler == "dpp") {
        // exact kernel covariances; defined only for same-slice pairs
        centering = "exact-kernel-mean";
        rep.cov_emp.setConstant(m, m, std::numeric_limits<double>::quiet_NaN());
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                if (cfg.slices[i] != cfg.slices[j]) continue;
                auto [params, shift] = tiling::slice_to_ensemble(spec, cfg.slices[i]);
                auto kern = ensemble::build_kernel(params);
                int t = cfg.slices[i];
                auto Vof = [&](int lam) {
                    int x = lam - shift;
                    return std::pow(cfg.q, -x) + cfg.kappa2 * std::pow(cfg.q, x - spec.S - t);
                };
                auto mom = ensemble::exact_linear_stat_moments(
                    kern, [&](int x) { return Rs[i](Vof(x)); },
                    [&](int x) { return Rs[j](Vof(x)); });
                rep.cov_emp(i, j) = 3.14159265358979323846 * mom.cov_fg;
            }
    } else {
        centering = "sample-mean";
        long burn = cfg.burnin_sweeps >= 0 ? cfg.burnin_sweeps : 50;
        // samples are split across chains; each chain burns in once and then
        // emits thinned states
        tiling::TilingState start = cfg.init == "mean-profile"
                                        ? tiling::mean_profile_tiling(spec)
                                        : tiling::minimal_tiling(spec);
        Eigen::MatrixXd Y(cfg.samples, m);
        int row = 0;
        for (int ch = 0; ch < cfg.chains; ++ch) {
            int want = cfg.samples / cfg.chains + (ch < cfg.samples % cfg.chains ? 1 : 0);
            if (want == 0) continue;
            std::mt19937_64 rng(split_seed(cfg.seed, ch));
            tiling::TilingState st = start;
            tiling::mcmc_run(spec, st, burn, rng);
            for (int k = 0; k < want; ++k) {
                if (k > 0) tiling::mcmc_run(spec, st, cfg.thinning_sweeps, rng);
                auto hs = tiling::height_functions(spec, st);
                for (int i = 0; i < m; ++i) {
                    double s = 0.0;
                    for (double v : hs.V[cfg.slices[i]]) s += Rs[i](v);
                    Y(row, i) = -std::sqrt(3.14159265358979323846) * s;
                }
                ++row;
            }
        }
        require(row == cfg.samples, "covariance: sample bookkeeping error");
        Eigen::RowVectorXd mean = Y.colwise().mean();
        Eigen::MatrixXd Yc = Y.rowwise() - mean;
        rep.cov_emp = (Yc.transpose() * Yc) / std::max(1, cfg.samples - 1);
    }
    double floor = gff_floor(rep.cov_gff);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (std::abs(rep.cov_gff(i, j)) > floor && std::isfinite(rep.cov_emp(i, j)))
                rep.ratio(i, j) = rep.cov_emp(i, j) / rep.cov_gff(i, j);

    auto wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.metadata = json{{"config", cfg.to_json()},
                        {"config_hash", cfg.hash()},
                        {"seed", cfg.seed},
                        {"prng", kPrngId},
                        {"version", kToolkitVersion},
                        {"centering", centering},
                        {"chains", cfg.chains},
                        {"initial_state", cfg.init},
                        {"statistic_coordinate", "raw V"},
                        {"wall_seconds", wall}};
    return rep;
}

json CovReport::to_json() const {
    auto mat = [](const Eigen::MatrixXd& M) {
        json rows = json::array();
        for (int i = 0; i < M.rows(); ++i) {
            json r = json::array();
            for (int j = 0; j < M.cols(); ++j) {
                if (std::isfinite(M(i, j)))
                    r.push_back(M(i, j));
                else
                    r.push_back(nullptr);
            }
            rows.push_back(r);
        }
        return rows;
    };
    return json{{"cov_emp", mat(cov_emp)},
                {"cov_gff", mat(cov_gff)},
                {"ratio", mat(ratio)},
                {"metadata", metadata}};
}

json run_lln_check(const limitshape::ScaledParams& sp, const std::vector<int>& Ns, int grid) {
    json out;
    out["params"] = {{"a", sp.a}, {"b", sp.b}, {"c", sp.c}, {"d", sp.d}, {"q", sp.q}};
    json per = json::array();
    // reference cumulative int_0^s mu by fine midpoint rule
    const int fine = 40000;
    std::vector<double> cum(fine + 1, 0.0);
    double hM = sp.Mscaled / fine;
    for (int i = 0; i < fine; ++i)
        cum[i + 1] = cum[i] + limitshape::mu_density(sp, (i + 0.5) * hM) * hM;
    auto mu_cdf = [&](double s) {
        if (s <= 0) return 0.0;
        if (s >= sp.Mscaled) return cum[fine];
        double t = s / hM;
        int i = std::min(static_cast<int>(t), fine - 1);
        return cum[i] + (t - i) * (cum[i + 1] - cum[i]);
    };
    for (int N : Ns) {
        auto p = sp.embed(N);
        auto kern = ensemble::build_kernel(p);
        double sup = 0.0;
        std::vector<double> partial(p.M + 2, 0.0);
        for (int x = 0; x <= p.M; ++x) partial[x + 1] = partial[x] + kern.K(x, x);
        for (int g = 0; g <= grid; ++g) {
            double s = sp.Mscaled * g / grid;
            int count = std::min(p.M + 1, static_cast<int>(std::floor(s * N)) + 1);
            if (s * N < 0) count = 0;
            double lhs = partial[std::max(0, count)] / N;
            sup = std::max(sup, std::abs(lhs - mu_cdf(s)));
        }
        per.push_back(json{{"N", N}, {"sup_error", sup}});
    }
    out["profiles"] = per;
    return out;
}

json run_nekrasov_report(int M, int N, double q, double alpha_mult, double beta_mult,
                         double delta_frac, double tol) {
    double gamma = std::pow(q, -(M + 1));
    ensemble::QRacahParams p(alpha_mult * gamma, beta_mult * gamma,
                             delta_frac / (beta_mult * gamma), q, M, N);
    auto spec = nekrasov::qracah_theta_spec(p);
    nekrasov::PhiPair phis(spec, nekrasov::qracah_phi_plus(p), nekrasov::qracah_phi_minus(p));
    json out;
    out["instance"] = {{"M", M}, {"N", N}, {"q", q},         {"alpha", p.alpha},
                       {"beta", p.beta},   {"delta", p.delta}, {"gamma", p.gamma}};
    std::vector<double> zs, vals;
    double top = gamma;
    bool brute = ensemble::config_count(M, N) <= 200000;
    for (int i = 0; i < 12; ++i) {
        double t = std::cos(3.14159265358979323846 * (i + 0.5) / 12);
        zs.push_back(top * (2.5 + 1.2 * t));
        vals.push_back(nekrasov::rtilde_orthopoly(p, zs.back()));
    }
    auto fit = nekrasov::polynomiality_certificate(zs, vals, 4, tol);
    out["evaluation_points"] = zs;
    out["values"] = vals;
    out["fit_coefficients"] = fit.coeffs;
    out["fit_residual"] = fit.residual;
    out["is_polynomial_deg4"] = fit.is_poly;
    if (brute) {
        auto em = nekrasov::enumerate_measure(spec);
        double worst = 0.0;
        for (size_t i = 0; i < zs.size(); ++i) {
            double bf = nekrasov::rtilde_bruteforce(spec, phis, em, {zs[i], 0.0}).real();
            worst = std::max(worst, std::abs(bf - vals[i]) / std::max(1.0, std::abs(bf)));
        }
        out["bruteforce_vs_orthopoly_max_rel"] = worst;
        out["pass"] = fit.is_poly && worst < 1e-9;
    } else {
        out["pass"] = fit.is_poly;
    }
    return out;
}

namespace {
struct Check {
    std::string module, name;
    bool pass;
    std::string detail;
};

void add(std::vector<Check>& cs, const std::string& mod, const std::string& name, bool pass,
         const std::string& detail = "") {
    cs.push_back({mod, name, pass, detail});
}
}  // namespace

json run_verification_suite(const std::vector<std::string>& selection, uint64_t seed) {
    auto wanted = [&](const std::string& mod) {
        return selection.empty() ||
               std::find(selection.begin(), selection.end(), mod) != selection.end();
    };
    std::vector<Check> cs;
    std::mt19937_64 rng(seed);

    if (wanted("qspecial")) {
        using namespace qspecial;
        bool ok = true;
        for (double q : {0.3, 0.9, 0.99})
            for (double x = 0.5; x <= 20.0; x += 0.9) {
                double lhs = q_gamma(x + 1.0, q);
                double rhs = q_gamma(x, q) * (1.0 - std::pow(q, x)) / (1.0 - q);
                ok &= std::abs(lhs / rhs - 1.0) < 1e-12;
            }
        add(cs, "qspecial", "q_gamma functional equation", ok);
        double dl = dilog(0.5);
        add(cs, "qspecial", "dilog(1/2) value", std::abs(dl - 0.582240526465012) < 1e-12);
    }
    if (wanted("orthopoly")) {
        std::uniform_real_distribution<double> uq(0.4, 0.9), um(0.1, 1.4), ud(0.0, 0.8);
        bool gram_ok = true, rec_ok = true;
        for (int trial = 0; trial < 5; ++trial) {
            int N = 2 + static_cast<int>(rng() % 5);
            int M = N + 3 + static_cast<int>(rng() % 10);
            double q = uq(rng);
            double g = std::pow(q, -(M + 1));
            orthopoly::QRacahParams p(g * std::exp(um(rng)), g * std::exp(um(rng)), 0.0, q, M, N);
            std::vector<std::vector<double>> P(N + 1);
            for (int n = 0; n <= N; ++n) P[n] = orthopoly::poly_lattice_recursion(p, n);
            for (int n = 0; n <= N; ++n) {
                double cn = orthopoly::norm(p, n);
                for (int mm = n; mm <= N; ++mm) {
                    double gsum = 0.0;
                    for (int x = 0; x <= M; ++x)
                        gsum += orthopoly::weight(p, x) * P[n][x] * P[mm][x];
                    if (mm == n)
                        gram_ok &= std::abs(gsum / cn - 1.0) < 1e-9;
                    else
                        gram_ok &= std::abs(gsum) / std::sqrt(cn * orthopoly::norm(p, mm)) < 1e-9;
                }
                for (int x = 0; x <= M; ++x)
                    rec_ok &= std::abs(P[n][x] - orthopoly::poly_eval(p, n, x)) <
                              1e-10 * (std::abs(P[n][x]) + 1.0);
            }
        }
        add(cs, "orthopoly", "Gram matrix diagonal with closed-form norms", gram_ok);
        add(cs, "orthopoly", "recursion equals series on the lattice", rec_ok);
    }
    if (wanted("ensemble")) {
        double q = 0.55;
        int M = 7, N = 3;
        double g = std::pow(q, -(M + 1));
        ensemble::QRacahParams p(1.7 * g, 2.1 * g, 0.35 / (2.1 * g), q, M, N);
        auto e = ensemble::enumerate_exact(p);
        auto k = ensemble::build_kernel(p);
        double worst = 0.0;
        std::vector<double> occ(M + 1, 0.0);
        for (auto& [c, pr] : e.probs)
            for (int l : c.lambdas) occ[l] += pr;
        for (int x = 0; x <= M; ++x) worst = std::max(worst, std::abs(occ[x] - k.K(x, x)));
        add(cs, "ensemble", "kernel one-point vs enumeration", worst < 1e-10);
        add(cs, "ensemble", "projection invariants",
            (k.K * k.K - k.K).cwiseAbs().maxCoeff() < 1e-8 && std::abs(k.K.trace() - N) < 1e-8);
    }
    if (wanted("tiling")) {
        tiling::HexagonSpec spec(2, 2, 2, 0.6, std::sqrt(0.05));
        auto law = tiling::enumerate_tilings(spec);
        double worst = 0.0;
        for (int t = 0; t <= spec.T; ++t) {
            auto [params, shift] = tiling::slice_to_ensemble(spec, t);
            auto em = ensemble::enumerate_exact(params);
            std::map<std::vector<int>, double> marg;
            for (auto& [st, pr] : law) marg[st.x[t]] += pr;
            for (auto& [cfg, pr] : marg) {
                std::vector<int> lam(cfg);
                for (int& v : lam) v += shift;
                auto it = em.probs.find(ensemble::ParticleConfig{lam});
                double pe = it == em.probs.end() ? 0.0 : it->second;
                worst = std::max(worst, std::abs(pe - pr));
            }
        }
        add(cs, "tiling", "slice law equals mapped ensemble (2x2x2)", worst < 1e-12,
            "max abs diff " + std::to_string(worst));
    }
    if (wanted("limitshape")) {
        limitshape::HexScaledParams hp(0.8, 3.0, 7.0, 2.0, 0.04);
        limitshape::ComplexStructure csx(hp);
        std::uniform_real_distribution<double> uu(1.0 + 1e-6, 1.0 / hp.qT - 1e-6), u01(0, 1);
        bool okinv = true, okdisc = true;
        for (int t = 0; t < 200; ++t) {
            double u = uu(rng);
            auto [vlo, vhi] = csx.v_band(u);
            double v = vlo + (vhi - vlo) * u01(rng);
            if (!csx.in_liquid(u, v)) continue;
            auto w = csx.omega(u, v);
            auto [fu, fv] = csx.f_inverse(w);
            okinv &= std::abs(fu - u) < 1e-9 * u && std::abs(fv - v) < 1e-9 * std::abs(v);
            double lhs = std::pow(csx.a1()(u, v), 2) - 4 * csx.a2()(u, v) * csx.a0()(u, v);
            okdisc &= std::abs(lhs - hp.qN * hp.qN * csx.qtilde(u, v)) <
                      1e-10 * (std::abs(lhs) + 1.0);
        }
        add(cs, "limitshape", "f o Omega identity", okinv);
        add(cs, "limitshape", "discriminant identity", okdisc);
        limitshape::ScaledParams sp(6.0, 5.0, std::pow(0.5, -1.6), 0.15, 0.5);
        auto eq = limitshape::q2_roots(sp);
        add(cs, "limitshape", "Q^2 root products",
            std::abs(eq.x3 * eq.x8 - sp.c * sp.d) < 1e-10 * sp.c * sp.d &&
                std::abs(eq.x4 * eq.x7 - sp.c * sp.d) < 1e-10 * sp.c * sp.d);
    }
    if (wanted("nekrasov")) {
        auto rep = run_nekrasov_report(7, 3, 0.55, 1.7, 2.1, 0.35);
        add(cs, "nekrasov", "degree-4 loop polynomiality (3,7)", rep["pass"].get<bool>(),
            "residual " + std::to_string(rep["fit_residual"].get<double>()));
    }
    if (wanted("varsolve")) {
        limitshape::ScaledParams sp(6.0, 5.0, std::pow(0.5, -1.6), 0.15, 0.5);
        auto res = varsolve::solve_equilibrium(sp, 256, 20000);
        double l2 = 0.0;
        for (size_t i = 0; i < res.measure.grid.size(); ++i) {
            double d = res.measure.density[i] -
                       varsolve::closed_form_density_sigma(sp, res.measure.grid[i]);
            l2 += d * d * res.measure.cell;
        }
        add(cs, "varsolve", "maximizer vs closed form (L2)", std::sqrt(l2) < 0.05,
            "l2 " + std::to_string(std::sqrt(l2)));
    }

    json out;
    out["seed"] = seed;
    out["version"] = kToolkitVersion;
    json checks = json::array();
    bool all = true;
    for (auto& c : cs) {
        checks.push_back(json{{"module", c.module}, {"name", c.name}, {"pass", c.pass},
                              {"detail", c.detail}});
        all &= c.pass;
    }
    out["checks"] = checks;
    out["all_pass"] = all;
    return out;
}

void write_tiling_samples_csv(const std::string& path, const tiling::HexagonSpec& spec,
                              const std::vector<tiling::TilingState>& states) {
    std::ofstream f(path);
    require(f.good(), "cannot open " + path);
    f << "sample_id,t,k,x,U,V\n";
    for (size_t s = 0; s < states.size(); ++s) {
        auto hs = tiling::height_functions(spec, states[s]);
        for (int t = 0; t <= spec.T; ++t)
            for (int k = 0; k < spec.N; ++k)
                f << s << ',' << t << ',' << (k + 1) << ',' << states[s].x[t][k] << ','
                  << hs.U(t) << ',' << hs.V[t][k] << '\n';
    }
}

void write_limit_shape_csv(const std::string& path, const limitshape::HexScaledParams& hp,
                           int grid_x, int grid_y) {
    std::ofstream f(path);
    require(f.good(), "cannot open " + path);
    f << "x,y,phi,h_hat,in_liquid\n";
    for (int i = 1; i < grid_x; ++i) {
        double x = hp.Tt * i / grid_x;
        for (int j = 0; j <= grid_y; ++j) {
            double y = hp.y_lo(x) + (hp.y_hi(x) - hp.y_lo(x)) * j / grid_y;
            auto pt = limitshape::limit_shape(hp, x, y);
            f << x << ',' << y << ',' << pt.phi << ',' << pt.hhat << ',' << (pt.in_liquid ? 1 : 0)
              << '\n';
        }
    }
}

json ellipse_json(const limitshape::HexScaledParams& hp, const std::vector<double>& us) {
    limitshape::ComplexStructure csx(hp);
    const auto& qt = csx.qtilde_coeffs();
    json bands = json::array();
    for (double u : us) {
        auto [lo, hi] = csx.v_band(u);
        bands.push_back(json{{"u", u}, {"v_lo", lo}, {"v_hi", hi}});
    }
    return json{{"qtilde", {{"uu", qt[0]}, {"vv", qt[1]}, {"uv", qt[2]},
                            {"u", qt[3]}, {"v", qt[4]}, {"const", qt[5]}}},
                {"u_range", {1.0, 1.0 / hp.qT}},
                {"bands", bands}};
}

void write_equilibrium_csv(const std::string& path, const limitshape::ScaledParams& sp, int grid) {
    auto res = varsolve::solve_equilibrium(sp, grid);
    std::ofstream f(path);
    require(f.good(), "cannot open " + path);
    f << "x,rho_numeric,rho_closed_form,F_eff\n";
    for (size_t i = 0; i < res.measure.grid.size(); ++i)
        f << res.measure.grid[i] << ',' << res.measure.density[i] << ','
          << varsolve::closed_form_density_sigma(sp, res.measure.grid[i]) << ','
          << res.effective[i] << '\n';
}

}  // namespace qlg::harness
