// qlg: simulation and verification CLI for the q-Racah tiling model and
// log-gases on quadratic lattices.
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "qlg/ensemble.hpp"
#include "qlg/harness.hpp"
#include "qlg/nekrasov.hpp"
#include "qlg/varsolve.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream f(path);
    if (!f.good()) throw std::runtime_error("cannot read config file " + path);
    json j;
    f >> j;
    return j;
}

void emit(const json& j, const std::string& out_dir, const std::string& name,
          const std::string& format) {
    if (out_dir.empty()) {
        std::cout << j.dump(2) << std::endl;
        return;
    }
    fs::create_directories(out_dir);
    std::string path = (fs::path(out_dir) / (name + "." + format)).string();
    std::ofstream f(path);
    f << j.dump(2) << std::endl;
    std::cout << "wrote " << path << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"q-Racah tiling / quadratic-lattice log-gas toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, format = "json";
    uint64_t seed = 1;
    int samples = 1000;
    app.add_option("--config", config_path, "JSON config file")->capture_default_str();
    app.add_option("--seed", seed, "master seed")->capture_default_str();
    app.add_option("--out", out_dir, "output directory (default: stdout)");
    app.add_option("--samples", samples, "sample count")->capture_default_str();
    app.add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

    // verify
    auto* verify = app.add_subcommand("verify", "run module invariant suites");
    verify->fallthrough();
    std::vector<std::string> suites;
    verify->add_option("--suite", suites, "subset of modules (default: all)");

    // sample-slice
    auto* sslice = app.add_subcommand("sample-slice", "exact DPP samples of one slice ensemble");
    sslice->fallthrough();
    int sa = 2, sb = 2, sc = 2, st = 1;
    double sq = 0.9, sk2 = 0.0;
    sslice->add_option("-a", sa, "hexagon side a");
    sslice->add_option("-b", sb, "hexagon side b");
    sslice->add_option("-c", sc, "hexagon side c");
    sslice->add_option("-t", st, "slice index");
    sslice->add_option("-q", sq, "q");
    sslice->add_option("--kappa2", sk2, "kappa^2");

    // sample-tiling
    auto* stil = app.add_subcommand("sample-tiling", "MCMC whole-tiling samples");
    stil->fallthrough();
    long sweeps = -1;
    stil->add_option("-a", sa, "hexagon side a");
    stil->add_option("-b", sb, "hexagon side b");
    stil->add_option("-c", sc, "hexagon side c");
    stil->add_option("-q", sq, "q");
    stil->add_option("--kappa2", sk2, "kappa^2");
    stil->add_option("--sweeps", sweeps, "burn-in sweeps per sample (default 50)");

    // limit-shape
    auto* lshape = app.add_subcommand("limit-shape", "closed-form limit shape grid + ellipse");
    lshape->fallthrough();
    int gx = 24, gy = 24;
    lshape->add_option("-a", sa, "hexagon side a");
    lshape->add_option("-b", sb, "hexagon side b");
    lshape->add_option("-c", sc, "hexagon side c");
    lshape->add_option("-q", sq, "q");
    lshape->add_option("--kappa2", sk2, "kappa^2");
    lshape->add_option("--grid-x", gx, "x resolution");
    lshape->add_option("--grid-y", gy, "y resolution");

    // covariance
    auto* cov = app.add_subcommand("covariance", "empirical vs GFF covariance ratios (section-8.4 style)");
    cov->fallthrough();

    // nekrasov
    auto* nek = app.add_subcommand("nekrasov", "loop-equation polynomiality report");
    nek->fallthrough();
    int nM = 7, nN = 3;
    double nq = 0.55, nam = 1.7, nbm = 2.1, ndf = 0.35;
    nek->add_option("-M", nM, "lattice size M");
    nek->add_option("-N", nN, "particle count N");
    nek->add_option("-q", nq, "q");
    nek->add_option("--alpha-mult", nam, "alpha / gamma");
    nek->add_option("--beta-mult", nbm, "beta / gamma");
    nek->add_option("--delta-frac", ndf, "beta*delta");

    // equilibrium
    auto* eqc = app.add_subcommand("equilibrium", "variational equilibrium vs closed form");
    eqc->fallthrough();
    double ea = 6.0, eb = 5.0, eM = 1.6, ed = 0.15, eq = 0.5;
    int egrid = 400;
    eqc->add_option("--pa", ea, "scaled a");
    eqc->add_option("--pb", eb, "scaled b");
    eqc->add_option("--pM", eM, "scaled M (c = q^{-M})");
    eqc->add_option("--pd", ed, "scaled d");
    eqc->add_option("--pq", eq, "scaled q");
    eqc->add_option("--grid", egrid, "grid size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            json rep = qlg::harness::run_verification_suite(suites, seed);
            emit(rep, out_dir, "verify", "json");
            for (const auto& c : rep["checks"])
                std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ")
                          << c["module"].get<std::string>() << ": "
                          << c["name"].get<std::string>() << std::endl;
            return rep["all_pass"].get<bool>() ? 0 : 1;
        }
        if (*sslice) {
            qlg::tiling::HexagonSpec spec(sa, sb, sc, sq, std::sqrt(sk2));
            auto [params, shift] = qlg::tiling::slice_to_ensemble(spec, st);
            auto kern = qlg::ensemble::build_kernel(params);
            qlg::ensemble::DppSampler sampler(kern);
            json draws = json::array();
            for (int i = 0; i < samples; ++i) {
                auto cfg = sampler.sample(qlg::split_seed(seed, i));
                std::vector<int> xs(cfg.lambdas);
                for (int& v : xs) v -= shift;
                draws.push_back(xs);
            }
            json out{{"hexagon", {{"a", sa}, {"b", sb}, {"c", sc}, {"q", sq}, {"kappa2", sk2}}},
                     {"slice", st},
                     {"ensemble",
                      {{"M", params.M}, {"N", params.N}, {"alpha", params.alpha},
                       {"beta", params.beta}, {"delta", params.delta}, {"q", params.q}}},
                     {"shift", shift},
                     {"seed", seed},
                     {"prng", qlg::harness::kPrngId},
                     {"samples", draws}};
            emit(out, out_dir, "slice_samples", "json");
            return 0;
        }
        if (*stil) {
            qlg::tiling::HexagonSpec spec(sa, sb, sc, sq, std::sqrt(sk2));
            long burn = sweeps >= 0 ? sweeps : 50;
            std::vector<qlg::tiling::TilingState> states;
            for (int i = 0; i < samples; ++i)
                states.push_back(qlg::tiling::mcmc_sample(spec, burn, qlg::split_seed(seed, i)));
            fs::create_directories(out_dir.empty() ? "." : out_dir);
            std::string base = (fs::path(out_dir.empty() ? "." : out_dir) / "tilings").string();
            qlg::harness::write_tiling_samples_csv(base + ".csv", spec, states);
            json meta{{"a", sa}, {"b", sb}, {"c", sc}, {"q", sq}, {"kappa2", sk2},
                      {"sweeps", burn}, {"seed", seed}, {"prng", qlg::harness::kPrngId},
                      {"samples", samples}, {"version", qlg::harness::kToolkitVersion}};
            std::ofstream mf(base + ".json");
            mf << meta.dump(2) << std::endl;
            std::cout << "wrote " << base << ".csv and sidecar .json" << std::endl;
            return 0;
        }
        if (*lshape) {
            qlg::limitshape::HexScaledParams hp(sq, sa, sb + sc, sc, sk2);
            fs::create_directories(out_dir.empty() ? "." : out_dir);
            std::string base = (fs::path(out_dir.empty() ? "." : out_dir)).string();
            qlg::harness::write_limit_shape_csv(base + "/limit_shape.csv", hp, gx, gy);
            std::vector<double> us;
            for (int i = 1; i < 5; ++i) us.push_back(std::pow(1.0 / hp.qT, i / 5.0));
            std::ofstream ef(base + "/ellipse.json");
            ef << qlg::harness::ellipse_json(hp, us).dump(2) << std::endl;
            std::cout << "wrote " << base << "/limit_shape.csv and ellipse.json" << std::endl;
            return 0;
        }
        if (*cov) {
            json jc = load_config(config_path);
            if (!jc.contains("seed")) jc["seed"] = seed;
            if (!jc.contains("samples")) jc["samples"] = samples;
            auto cfg = qlg::harness::ExperimentConfig::from_json(jc);
            auto rep = qlg::harness::run_covariance_experiment(cfg);
            emit(rep.to_json(), out_dir, "covariance", "json");
            return 0;
        }
        if (*nek) {
            json rep = qlg::harness::run_nekrasov_report(nM, nN, nq, nam, nbm, ndf);
            emit(rep, out_dir, "nekrasov", "json");
            return rep["pass"].get<bool>() ? 0 : 1;
        }
        if (*eqc) {
            qlg::limitshape::ScaledParams sp(ea, eb, std::pow(eq, -eM), ed, eq);
            fs::create_directories(out_dir.empty() ? "." : out_dir);
            std::string path =
                (fs::path(out_dir.empty() ? "." : out_dir) / "equilibrium.csv").string();
            qlg::harness::write_equilibrium_csv(path, sp, egrid);
            std::cout << "wrote " << path << std::endl;
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}
