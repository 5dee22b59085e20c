// bl: command line front end for the blwave library.
#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "blwave/experiment.hpp"
#include "blwave/lab.hpp"
#include "blwave/parallel.hpp"
#include "blwave/soliton.hpp"

using namespace blwave;
namespace fs = std::filesystem;

namespace {

struct Globals {
    std::string config;
    std::string out = "out";
    int threads = 0;
    long long seed = -1;
    std::vector<std::string> set;  // key=value overrides
};

KeyValueConfig load_kv(const Globals& g) {
    KeyValueConfig kv = g.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(g.config);
    for (const auto& s : g.set) {
        const auto e = s.find('=');
        if (e == std::string::npos || e == 0) throw std::invalid_argument("--set expects key=value, got '" + s + "'");
        kv.set(s.substr(0, e), s.substr(e + 1));
    }
    if (g.seed >= 0) kv.set("seed", std::to_string(g.seed));
    return kv;
}

std::string out_path(const Globals& g, const std::string& name) {
    fs::create_directories(g.out);
    return (fs::path(g.out) / name).string();
}

void print_fit(const std::string& name, const FitResult& f) {
    std::printf("%s: slope %.6f  95%% CI [%.6f, %.6f]  R^2 %.6f  window [%g, %g]  n %d\n", name.c_str(), f.slope,
                f.ci_low, f.ci_high, f.r2, f.t_min, f.t_max, f.n);
}

int cmd_soliton(const Globals& g, double a, double b, double c, double L, int N) {
    const PhysParams p{a, b};
    p.validate();
    const SolitonProfile s(p, c);
    std::vector<double> z(N), phi(N), q(N), r(N), res(N);
    double worst = 0.0;
    for (int j = 0; j < N; ++j) {
        z[j] = -L + 2.0 * L * j / N;
        phi[j] = s.phi(z[j]);
        q[j] = s.q(z[j]);
        r[j] = s.r(z[j]);
        res[j] = s.qc_residual(z[j]);
        worst = std::max(worst, std::abs(res[j]));
    }
    SeriesRecord rec;
    rec.add("z", "", z);
    rec.add("phi", "", phi);
    rec.add("q", "", q);
    rec.add("r", "", r);
    rec.add("qc_residual", "", res);
    const std::string path = out_path(g, "soliton.csv");
    export_series(rec, path);
    std::printf("c %.6g  alpha_c %.12g  beta(c) %.12g  max |residual| %.3e\nwrote %s\n", c, s.alpha(), s.beta(),
                worst, path.c_str());
    return 0;
}

int cmd_evolve(const Globals& g) {
    const ExperimentConfig cfg = ExperimentConfig::from_kv(load_kv(g));
    const ExperimentResult r = run_experiment(cfg, g.out);
    const auto& tr = r.track;
    std::printf("%zu snapshots, runtime %.1f s, weighted initial norm %.6g\n", tr.samples.size(), r.runtime_s,
                r.init_norm);
    double worst = 0.0;
    for (double v : r.residual) worst = std::max(worst, v);
    std::printf("max Newton residual %.3e\n", worst);
    if (!tr.samples.empty()) {
        const auto& s = tr.samples.back();
        std::printf("final: ||ctil|| %.6g  sup|gamma| %.6g  plateau %.6g  outside cone %.6g\n", s.c_norm,
                    s.gamma_sup, r.plateau.back(), r.outside.back());
    }
    if (r.has_fit) print_fit("||ctil|| decay", r.c_fit);
    std::printf("wrote %s\n", g.out.c_str());
    return 0;
}

int cmd_spectrum(const Globals& g, int n_eta) {
    const ExperimentConfig cfg = ExperimentConfig::from_kv(load_kv(g));
    const PhysParams& p = cfg.phys;
    const Grid1D grid = default_grid1d(p, cfg.c0, cfg.alpha, cfg.grid1d_N);
    CoefficientOptions co;
    co.alpha = cfg.alpha;
    co.eta0 = cfg.eta0;
    const ModulationCoefficients mc = modulation_coefficients(p, cfg.c0, grid, co);
    std::cout << mc.report();
    std::vector<double> etas;
    for (int i = 0; i < n_eta; ++i) etas.push_back(mc.eta0 * (i + 1) / n_eta);
    const EigenCurve ec = eigencurve(p, cfg.c0, grid, etas, mc);
    std::vector<double> re, im;
    for (const auto& l : ec.lambda) {
        re.push_back(l.real());
        im.push_back(l.imag());
    }
    SeriesRecord rec;
    rec.add("eta", "", ec.eta);
    rec.add("re_lambda", "", re);
    rec.add("im_lambda", "", im);
    export_series(rec, out_path(g, "eigencurve.csv"));
    std::printf("lambda1 %.8g (fit %.8g)  lambda2 %.8g (fit %.8g)\n", mc.lambda1, ec.lambda1_fit, mc.lambda2,
                ec.lambda2_fit);
    std::vector<double> gap_eta;
    for (int i = 0; i <= 2 * n_eta; ++i) gap_eta.push_back(0.5 * mc.eta0 + 2.0 * mc.eta0 * i / (2 * n_eta));
    const GapReport gr = spectral_gap_check(p, cfg.c0, grid, mc.eta0, mc, gap_eta);
    std::printf("spectral gap: max Re outside band %.6e  (%s)\n", gr.max_re_outside_band, gr.pass ? "ok" : "violated");
    return 0;
}

int cmd_modulation(const Globals& g, const std::string& run_dir) {
    const ModulationTrack tr = extract_modulation(run_dir);
    const std::string path = out_path(g, "modulation.csv");
    tr.write_csv(path);
    std::printf("%zu snapshots decomposed, wrote %s\n", tr.samples.size(), path.c_str());
    return 0;
}

int cmd_reduce(const Globals& g, double amp, double width, double Ly, int Ny, double dt, double T, bool linear) {
    const ExperimentConfig cfg = ExperimentConfig::from_kv(load_kv(g));
    CoefficientOptions co;
    co.alpha = cfg.alpha;
    co.eta0 = cfg.eta0;
    const ModulationCoefficients mc =
        modulation_coefficients(cfg.phys, cfg.c0, default_grid1d(cfg.phys, cfg.c0, cfg.alpha, cfg.grid1d_N), co);
    const YGrid yg = make_ygrid(Ly, Ny);
    ReducedState f(yg);
    std::vector<double> c0(Ny);
    for (int k = 0; k < Ny; ++k) c0[k] = amp * std::exp(-0.5 * yg.y(k) * yg.y(k) / (width * width));
    f.ctil = band_project(yg, c0, mc.eta0);
    ReducedConfig rc;
    rc.dt = dt;
    rc.T = T;
    rc.t_first = std::min(10.0, T);
    rc.nonlinear = !linear;
    const ModulationTrack tr = integrate_reduced(f, mc, rc);
    const std::string path = out_path(g, "reduced.csv");
    tr.write_csv(path);
    const auto t = tr.times();
    const double lo = std::min(100.0, 0.01 * T);
    try {
        print_fit("||ctil||", fit_decay_exponent(t, tr.column(&ModulationSample::c_norm), lo, T, cfg.bootstrap, cfg.seed));
        print_fit("||ctil_y||", fit_decay_exponent(t, tr.column(&ModulationSample::cy_norm), lo, T, cfg.bootstrap, cfg.seed));
    } catch (const std::invalid_argument& e) {
        std::printf("no fit: %s\n", e.what());
    }
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_burgers(const Globals& g, double mp, double mm, double t, double Ly, int Ny) {
    const ExperimentConfig cfg = ExperimentConfig::from_kv(load_kv(g));
    CoefficientOptions co;
    co.alpha = cfg.alpha;
    co.eta0 = cfg.eta0;
    const ModulationCoefficients mc =
        modulation_coefficients(cfg.phys, cfg.c0, default_grid1d(cfg.phys, cfg.c0, cfg.alpha, cfg.grid1d_N), co);
    const BurgersProfile b = burgers_profile(mc, mp, mm);
    const YGrid yg = make_ygrid(Ly, Ny);
    std::vector<double> y(Ny), up(Ny), um(Ny);
    for (int k = 0; k < Ny; ++k) {
        y[k] = yg.y(k);
        // Centered on the characteristics y = -+ lambda1 t.
        up[k] = b.plus(t, y[k] + mc.lambda1 * t);
        um[k] = b.minus(t, y[k] - mc.lambda1 * t);
    }
    SeriesRecord rec;
    rec.add("y", "", y);
    rec.add("u_plus", "", up);
    rec.add("u_minus", "", um);
    const std::string path = out_path(g, "burgers.csv");
    export_series(rec, path);
    std::printf("m+ %.12g  m- %.12g\nwrote %s\n", b.m_plus, b.m_minus, path.c_str());
    return 0;
}

int cmd_fit(const Globals& g, const std::string& csv, const std::string& tcol, const std::string& col, double tmin,
            double tmax, int bootstrap) {
    const SeriesRecord r = read_series_csv(csv);
    const long long seed = g.seed >= 0 ? g.seed : 1;
    print_fit(col, fit_decay_exponent(r.at(tcol).values, r.at(col).values, tmin, tmax, bootstrap, std::uint64_t(seed)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Benney-Luke line soliton simulator and diagnostics"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "key = value experiment configuration")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "output directory");
    app.add_option("--threads", g.threads, "worker threads (overrides BL_THREADS)")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "bootstrap seed");
    app.add_option("--set", g.set, "config override key=value (repeatable)")
        ->expected(1)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);

    auto* sol = app.add_subcommand("soliton", "sample the line soliton profile and its ODE residual");
    double sa = 0.5, sb = 1.0, sc = 1.05, sL = 40.0;
    int sN = 2048;
    sol->add_option("--a", sa);
    sol->add_option("--b", sb);
    sol->add_option("--c", sc);
    sol->add_option("--L", sL, "half-length of the z interval");
    sol->add_option("--N", sN);

    auto* evo = app.add_subcommand("evolve", "run the 2D experiment and decompose every snapshot");

    auto* spec = app.add_subcommand("spectrum", "modulation coefficients, eigencurve and spectral gap");
    int n_eta = 8;
    spec->add_option("--n-eta", n_eta, "eigencurve samples in (0, eta0]")->check(CLI::PositiveNumber);

    auto* mod = app.add_subcommand("modulation", "re-extract (ctil, gamma) from a run with snapshots");
    std::string run_dir;
    mod->add_option("run_dir", run_dir, "directory holding manifest.toml and snapshots/")->required();

    auto* red = app.add_subcommand("reduce", "integrate the reduced modulation system from Gaussian ctil");
    double ramp = 1e-2, rw = 5.0, rLy = 8000.0, rdt = 1.0, rT = 1e4;
    int rNy = 1024;
    bool rlin = false;
    red->add_option("--amp", ramp);
    red->add_option("--width", rw);
    red->add_option("--Ly", rLy);
    red->add_option("--Ny", rNy);
    red->add_option("--dt", rdt);
    red->add_option("--T", rT);
    red->add_flag("--linear", rlin, "drop the quadratic terms");

    auto* bur = app.add_subcommand("burgers", "self-similar Burgers profiles for given masses");
    double mp = 0.5, mm = -0.5, bt = 1e3, bLy = 2000.0;
    int bNy = 1024;
    bur->add_option("--mass-plus", mp);
    bur->add_option("--mass-minus", mm);
    bur->add_option("--t", bt);
    bur->add_option("--Ly", bLy);
    bur->add_option("--Ny", bNy);

    auto* fit = app.add_subcommand("fit", "fit a power-law decay exponent to a CSV column");
    std::string csv, tcol = "t", col;
    double tmin = 0.0, tmax = 0.0;
    int boot = 1000;
    fit->add_option("csv", csv)->required()->check(CLI::ExistingFile);
    fit->add_option("--column", col)->required();
    fit->add_option("--time-column", tcol);
    fit->add_option("--tmin", tmin)->required();
    fit->add_option("--tmax", tmax)->required();
    fit->add_option("--bootstrap", boot);

    CLI11_PARSE(app, argc, argv);
    try {
        if (g.threads > 0) set_num_threads(g.threads);
        if (*sol) return cmd_soliton(g, sa, sb, sc, sL, sN);
        if (*evo) return cmd_evolve(g);
        if (*spec) return cmd_spectrum(g, n_eta);
        if (*mod) return cmd_modulation(g, run_dir);
        if (*red) return cmd_reduce(g, ramp, rw, rLy, rNy, rdt, rT, rlin);
        if (*bur) return cmd_burgers(g, mp, mm, bt, bLy, bNy);
        if (*fit) return cmd_fit(g, csv, tcol, col, tmin, tmax, boot);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bl: %s\n", e.what());
        return 1;
    }
    return 0;
}
