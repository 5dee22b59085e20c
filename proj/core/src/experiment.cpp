#include "blwave/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "blwave/snapshot.hpp"

namespace blwave {

Perturbation parse_perturbation(const std::string& s) {
    if (s == "none") return Perturbation::None;
    if (s == "localized-bump") return Perturbation::LocalizedBump;
    if (s == "left-going-bump") return Perturbation::LeftGoingBump;
    if (s == "resonant-mode") return Perturbation::ResonantMode;
    throw std::invalid_argument("unknown perturbation '" + s +
                                "' (none | localized-bump | left-going-bump | resonant-mode)");
}

std::string to_string(Perturbation p) {
    switch (p) {
        case Perturbation::None: return "none";
        case Perturbation::LocalizedBump: return "localized-bump";
        case Perturbation::LeftGoingBump: return "left-going-bump";
        case Perturbation::ResonantMode: return "resonant-mode";
    }
    return "none";
}

const std::vector<std::string>& ExperimentConfig::keys() {
    static const std::vector<std::string> k = {
        "a", "b", "c0", "Lx", "Ly", "Nx", "Ny", "grid1d_N", "dt", "T", "integrator", "dealias",
        "snapshot_every", "sponge_width", "sponge_strength", "perturbation", "epsilon", "bump_x0", "bump_sx",
        "bump_sy", "mode_width", "h", "eta0", "alpha", "newton_tol", "newton_max_iter", "smallness",
        "fit_t_min", "fit_t_max", "cone_delta", "seed", "bootstrap", "write_snapshots"};
    return k;
}

ExperimentConfig ExperimentConfig::from_kv(const KeyValueConfig& kv) {
    std::vector<std::string> unknown;
    for (const auto& k : kv.unknown_keys(keys()))
        if (k.rfind("derived.", 0) != 0) unknown.push_back(k);
    if (!unknown.empty()) throw std::invalid_argument("config: unknown key '" + unknown.front() + "'");
    ExperimentConfig c;
    c.phys.a = kv.get_double("a", c.phys.a);
    c.phys.b = kv.get_double("b", c.phys.b);
    c.c0 = kv.get_double("c0", c.c0);
    c.Lx = kv.get_double("Lx", c.Lx);
    c.Ly = kv.get_double("Ly", c.Ly);
    c.Nx = int(kv.get_int("Nx", c.Nx));
    c.Ny = int(kv.get_int("Ny", c.Ny));
    c.grid1d_N = int(kv.get_int("grid1d_N", c.grid1d_N));
    c.dt = kv.get_double("dt", c.dt);
    c.T = kv.get_double("T", c.T);
    c.integrator = parse_integrator(kv.get_string("integrator", to_string(c.integrator)));
    c.dealias = kv.get_bool("dealias", c.dealias);
    c.snapshot_every = int(kv.get_int("snapshot_every", c.snapshot_every));
    c.sponge.width = kv.get_double("sponge_width", c.sponge.width);
    c.sponge.strength = kv.get_double("sponge_strength", c.sponge.strength);
    c.perturbation = parse_perturbation(kv.get_string("perturbation", to_string(c.perturbation)));
    c.epsilon = kv.get_double("epsilon", c.epsilon);
    c.bump_x0 = kv.get_double("bump_x0", c.bump_x0);
    c.bump_sx = kv.get_double("bump_sx", c.bump_sx);
    c.bump_sy = kv.get_double("bump_sy", c.bump_sy);
    c.mode_width = kv.get_double("mode_width", c.mode_width);
    c.h = kv.get_double("h", c.h);
    c.eta0 = kv.get_double("eta0", c.eta0);
    c.alpha = kv.get_double("alpha", c.alpha);
    c.newton_tol = kv.get_double("newton_tol", c.newton_tol);
    c.newton_max_iter = int(kv.get_int("newton_max_iter", c.newton_max_iter));
    c.smallness = kv.get_double("smallness", c.smallness);
    c.fit_t_min = kv.get_double("fit_t_min", c.fit_t_min);
    c.fit_t_max = kv.get_double("fit_t_max", c.fit_t_max);
    c.cone_delta = kv.get_double("cone_delta", c.cone_delta);
    c.seed = std::uint64_t(kv.get_int("seed", (long long)c.seed));
    c.bootstrap = int(kv.get_int("bootstrap", c.bootstrap));
    c.write_snapshots = kv.get_bool("write_snapshots", c.write_snapshots);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) { return from_kv(KeyValueConfig::load(path)); }

KeyValueConfig ExperimentConfig::to_kv() const {
    KeyValueConfig kv;
    auto d = [&](const char* k, double v) { kv.set(k, format_double(v)); };
    auto i = [&](const char* k, long long v) { kv.set(k, std::to_string(v)); };
    auto b = [&](const char* k, bool v) { kv.set(k, v ? "true" : "false"); };
    d("a", phys.a);
    d("b", phys.b);
    d("c0", c0);
    d("Lx", Lx);
    d("Ly", Ly);
    i("Nx", Nx);
    i("Ny", Ny);
    i("grid1d_N", grid1d_N);
    d("dt", dt);
    d("T", T);
    kv.set("integrator", to_string(integrator));
    b("dealias", dealias);
    i("snapshot_every", snapshot_every);
    d("sponge_width", sponge.width);
    d("sponge_strength", sponge.strength);
    kv.set("perturbation", to_string(perturbation));
    d("epsilon", epsilon);
    d("bump_x0", bump_x0);
    d("bump_sx", bump_sx);
    d("bump_sy", bump_sy);
    d("mode_width", mode_width);
    d("h", h);
    d("eta0", eta0);
    d("alpha", alpha);
    d("newton_tol", newton_tol);
    i("newton_max_iter", newton_max_iter);
    d("smallness", smallness);
    d("fit_t_min", fit_t_min);
    d("fit_t_max", fit_t_max);
    d("cone_delta", cone_delta);
    i("seed", (long long)seed);
    i("bootstrap", bootstrap);
    b("write_snapshots", write_snapshots);
    return kv;
}

void ExperimentConfig::validate() const {
    phys.validate();
    auto req = [](bool ok, const std::string& msg) {
        if (!ok) throw std::invalid_argument("config: " + msg);
    };
    req(c0 > 1.0, "c0 must exceed 1");
    req(Lx > 0.0 && Ly > 0.0, "Lx, Ly must be positive");
    req(Nx >= 8 && Ny >= 8 && Nx % 2 == 0 && Ny % 2 == 0, "Nx, Ny must be even and >= 8");
    req(grid1d_N >= 64 && grid1d_N % 2 == 0, "grid1d_N must be even and >= 64");
    req(snapshot_every > 0, "snapshot_every must be positive");
    req(epsilon >= 0.0, "epsilon must be nonnegative");
    req(bump_sx > 0.0 && bump_sy > 0.0, "bump widths must be positive");
    req(mode_width > 0.0 && mode_width < 1.0, "mode_width must lie in (0, 1)");
    req(h >= 0.0, "h must be nonnegative");
    req(newton_tol > 0.0 && newton_max_iter > 0, "Newton tolerance and iteration cap must be positive");
    req(fit_t_max > fit_t_min, "fit window is empty");
    req(bootstrap >= 0, "bootstrap must be nonnegative");
    EvolutionConfig ec;
    ec.dt = dt;
    ec.T = T;
    ec.snapshot_every = snapshot_every;
    ec.validate();
}

double weighted_initial_norm(const FieldPair& U0) {
    const Grid2D& g = U0.grid();
    auto weight = [&](const Field2D& f) {
        Field2D o(g);
        for (int k = 0; k < g.Ny(); ++k)
            for (int j = 0; j < g.Nx(); ++j) o(j, k) = (1.0 + g.x(j) * g.x(j) + g.y(k) * g.y(k)) * f(j, k);
        return o;
    };
    auto dx = [](const Field2D& f) { return apply_multiplier(f, [](double xi, double) { return cplx(0.0, xi); }); };
    auto dy = [](const Field2D& f) { return apply_multiplier(f, [](double, double eta) { return cplx(0.0, eta); }); };
    auto sq = [&](const Field2D& f) {
        double s = 0.0;
        for (double v : f.values()) s += v * v;
        return s * g.dx() * g.dy();
    };
    auto h1 = [&](const Field2D& f) { return std::sqrt(sq(f) + sq(dx(f)) + sq(dy(f))); };
    const Field2D u1 = U0.phi1_physical();
    const double n1 = std::sqrt(std::pow(h1(weight(dx(u1))), 2) + std::pow(h1(weight(dy(u1))), 2));
    return n1 + h1(weight(U0.phi2));
}

FieldPair make_perturbation(const ExperimentConfig& cfg, const ModulationCoefficients& mc, const Grid2D& g) {
    FieldPair u(g);
    if (cfg.perturbation == Perturbation::None || cfg.epsilon == 0.0) return u;
    const double eps = cfg.epsilon;
    if (cfg.perturbation == Perturbation::LocalizedBump) {
        for (int k = 0; k < g.Ny(); ++k)
            for (int j = 0; j < g.Nx(); ++j) {
                const double X = (g.x(j) - cfg.bump_x0) / cfg.bump_sx, Y = g.y(k) / cfg.bump_sy;
                const double w = 1.0 + X * X + Y * Y;
                u.phi1(j, k) = u.phi2(j, k) = eps / (w * w);
            }
        return u;
    }
    if (cfg.perturbation == Perturbation::LeftGoingBump) {
        for (int k = 0; k < g.Ny(); ++k)
            for (int j = 0; j < g.Nx(); ++j) {
                const double X = (g.x(j) - cfg.bump_x0) / cfg.bump_sx, Y = g.y(k) / cfg.bump_sy;
                const double w = 1.0 + X * X + Y * Y;
                u.phi1(j, k) = eps / (w * w);
                u.phi2(j, k) = -4.0 * eps * X / (cfg.bump_sx * w * w * w);
            }
        return u;
    }
    // (F^{-1} zeta)(y) = (1/Ly) sum_m zeta(eta_m) e^{i y eta_m}, so its integral is zeta(0) = 1.
    const YGrid yg = make_ygrid(g.Ly(), g.Ny());
    std::vector<cplx> s(g.Ny());
    for (int k = 0; k < g.Ny(); ++k) {
        const double eta = yg.eta(k);
        const double z = smooth_cutoff(eta, 0.0, cfg.mode_width * mc.eta0);
        s[k] = z * std::polar(1.0, eta * yg.y(0)) * double(g.Ny()) / g.Ly();
    }
    const std::vector<double> prof = y_inverse(s);
    const SolitonProfile sp(cfg.phys, cfg.c0);
    const PsiCorrection psi(cfg.phys, cfg.c0, cfg.c0, cfg.h);
    for (int j = 0; j < g.Nx(); ++j) {
        const ProfilePoint pt = sp.point(g.x(j));
        const double v1 = pt.phi(1, 0) - psi.dc_psi_tilde(psi.z1(g.x(j), 0.0)), v2 = pt.r(1, 0);
        for (int k = 0; k < g.Ny(); ++k) {
            u.phi1(j, k) = eps * v1 * prof[k];
            u.phi2(j, k) = eps * v2 * prof[k];
        }
    }
    return u;
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("stage '") + name + "': " + e.what());
    }
}

void write_text(const std::filesystem::path& p, const std::string& s) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + p.string() + "' for writing");
    os << s;
    if (!os) throw std::runtime_error("write failed for '" + p.string() + "'");
}

std::string snapshot_name(const char* tag, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s_%05d.blk", tag, i);
    return buf;
}

}  // namespace

namespace {

ModulationCoefficients experiment_coefficients(const ExperimentConfig& cfg) {
    return stage("coefficients", [&] {
        CoefficientOptions co;
        co.alpha = cfg.alpha;
        co.eta0 = cfg.eta0;
        return modulation_coefficients(cfg.phys, cfg.c0, default_grid1d(cfg.phys, cfg.c0, cfg.alpha, cfg.grid1d_N),
                                       co);
    });
}

DecompositionOptions decomposition_options(const ExperimentConfig& cfg, const ModulationCoefficients& mc) {
    DecompositionOptions dopt;
    dopt.h = cfg.h;
    dopt.eta0 = mc.eta0;
    dopt.alpha = mc.alpha;
    dopt.tol = cfg.newton_tol;
    dopt.max_iter = cfg.newton_max_iter;
    dopt.smallness = cfg.smallness;
    dopt.sponge_width = cfg.sponge.active() ? cfg.sponge.width : 0.0;
    return dopt;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    const auto clock0 = std::chrono::steady_clock::now();
    stage("config", [&] { cfg.validate(); });
    const PhysParams& p = cfg.phys;
    ExperimentResult res;
    res.coefficients = experiment_coefficients(cfg);
    const ModulationCoefficients& mc = res.coefficients;
    res.cone_delta = cfg.cone_delta > 0.0 ? cfg.cone_delta : mc.lambda1;
    const Grid2D g = make_grid(cfg.Lx, cfg.Ly, cfg.Nx, cfg.Ny);
    const YGrid yg = make_ygrid(cfg.Ly, cfg.Ny);

    const FieldPair U0 = stage("perturbation", [&] { return make_perturbation(cfg, mc, g); });
    res.init_norm = weighted_initial_norm(U0);
    FieldPair phi0 = stage("soliton", [&] { return line_wave_field(g, SolitonProfile(p, cfg.c0)); });
    for (std::size_t i = 0; i < g.size(); ++i) {
        phi0.phi1.values()[i] += U0.phi1.values()[i];
        phi0.phi2.values()[i] += U0.phi2.values()[i];
    }

    const DecompositionOptions dopt = decomposition_options(cfg, mc);
    const ProjectionTable table = stage("projection", [&] { return ProjectionTable(p, mc, g, dopt); });

    EvolutionConfig ec;
    ec.dt = cfg.dt;
    ec.T = cfg.T;
    ec.integrator = cfg.integrator;
    ec.dealias = cfg.dealias;
    ec.snapshot_every = cfg.snapshot_every;
    ec.frame_speed = cfg.c0;
    ec.sponge = cfg.sponge;

    namespace fs = std::filesystem;
    const bool write = !out_dir.empty();
    const fs::path dir(out_dir);
    if (write) {
        fs::create_directories(dir);
        if (cfg.write_snapshots) fs::create_directories(dir / "snapshots");
    }

    std::vector<FieldPair> refs;
    stage("free reference", [&] {
        evolve_free_reference(U0, p, cfg.c0, ec, [&](double, int, const FieldPair& s) { refs.push_back(s); });
    });

    res.track.grid = yg;
    int idx = 0;
    const EvolutionResult run = stage("evolution", [&] {
        return evolve(phi0, p, ec, [&](double t, int, const FieldPair& s) {
            const FieldPair& u1 = refs.at(idx);
            const DecompositionState st = stage("decomposition", [&] { return decompose_snapshot(s, u1, t, table); });
            res.track.samples.push_back(measure_sample(t, yg, st.gamma, st.ctil, mc));
            res.track.gamma.push_back(st.gamma);
            res.track.ctil.push_back(st.ctil);
            res.track.b.push_back(b_from_ctil(yg, st.ctil, mc));
            res.residual.push_back(st.residual);
            res.iterations.push_back(st.iterations);
            res.w_norm.push_back(st.w_norm);
            res.reconstruction.push_back(st.reconstruction);
            double us = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i)
                us = std::max({us, std::abs(st.U2.phi1.values()[i]), std::abs(st.U2.phi2.values()[i])});
            res.u2_sup.push_back(us);
            double in = 0.0, out = 0.0;
            for (int k = 0; k < cfg.Ny; ++k) {
                const double y = std::abs(yg.y(k)), v = std::abs(st.gamma[k]);
                if (y <= mc.lambda1 * t) in = std::max(in, v);
                if (y >= (mc.lambda1 + res.cone_delta) * t) out = std::max(out, v);
            }
            res.plateau.push_back(in);
            res.outside.push_back(out);
            if (write && cfg.write_snapshots) {
                write_snapshot((dir / "snapshots" / snapshot_name("phi", idx)).string(), s);
                write_snapshot((dir / "snapshots" / snapshot_name("u1", idx)).string(), u1);
                write_snapshot((dir / "snapshots" / snapshot_name("u2", idx)).string(), st.U2);
            }
            ++idx;
        });
    });
    res.energy_t = run.ledger.t;
    res.energy = run.ledger.E;

    const std::vector<double> t = res.track.times();
    const std::vector<double> cn = res.track.column(&ModulationSample::c_norm);
    int in_window = 0;
    bool positive = true;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] >= cfg.fit_t_min && t[i] <= cfg.fit_t_max) {
            ++in_window;
            positive = positive && cn[i] > 0.0;
        }
    if (in_window >= 20 && positive) {
        res.c_fit = fit_decay_exponent(t, cn, cfg.fit_t_min, cfg.fit_t_max, cfg.bootstrap, cfg.seed);
        res.has_fit = true;
    }
    res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock0).count();

    if (write) {
        stage("output", [&] {
            KeyValueConfig man = cfg.to_kv();
            auto d = [&](const char* k, double v) { man.set(std::string("derived.") + k, format_double(v)); };
            d("eta0", mc.eta0);
            d("alpha", mc.alpha);
            d("lambda1", mc.lambda1);
            d("lambda2", mc.lambda2);
            d("nu", mc.nu);
            d("beta1", mc.beta1);
            d("beta2", mc.beta2);
            d("mollifier_constant", mollifier_constant());
            d("cone_delta", res.cone_delta);
            d("init_norm", res.init_norm);
            d("band_modes", table.modes());
            d("grid1d_L", table.grid1d().L);
            d("grid1d_N", table.grid1d().N);
            write_text(dir / "manifest.toml", man.dump());
            write_text(dir / "coefficients.txt", mc.report());

            SeriesRecord r;
            r.add("t", "", t);
            r.add("c_norm", "", cn);
            r.add("cy_norm", "", res.track.column(&ModulationSample::cy_norm));
            r.add("gy_norm", "", res.track.column(&ModulationSample::gy_norm));
            r.add("gamma_sup", "", res.track.column(&ModulationSample::gamma_sup));
            r.add("b_minus_c", "", res.track.column(&ModulationSample::b_minus_c));
            r.add("burgers_mismatch", "", res.track.column(&ModulationSample::burgers_mismatch));
            r.add("plateau", "", res.plateau);
            r.add("outside_cone", "", res.outside);
            if (res.has_fit) r.fits.push_back({"c_norm", res.c_fit});
            export_series(r, (dir / "modulation.csv").string());

            SeriesRecord dr;
            dr.add("t", "", t);
            dr.add("residual", "", res.residual);
            dr.add("iterations", "", std::vector<double>(res.iterations.begin(), res.iterations.end()));
            dr.add("w_norm", "", res.w_norm);
            dr.add("reconstruction", "", res.reconstruction);
            dr.add("u2_sup", "", res.u2_sup);
            export_series(dr, (dir / "decomposition.csv").string());

            SeriesRecord er;
            er.add("t", "", run.ledger.t);
            er.add("E", "", run.ledger.E);
            er.add("I", "", run.ledger.I);
            er.add("flux_residual", "", run.ledger.flux_residual);
            export_series(er, (dir / "energy.csv").string());

            SeriesRecord fr;
            std::vector<double> y(cfg.Ny);
            for (int k = 0; k < cfg.Ny; ++k) y[k] = yg.y(k);
            fr.add("y", "", y);
            fr.add("gamma", "", res.track.gamma.back());
            fr.add("ctil", "", res.track.ctil.back());
            fr.add("b", "", res.track.b.back());
            export_series(fr, (dir / "final_profile.csv").string());
        });
    }
    return res;
}

ModulationTrack extract_modulation(const std::string& run_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(run_dir);
    const ExperimentConfig cfg = stage("manifest", [&] { return ExperimentConfig::load((dir / "manifest.toml").string()); });
    const ModulationCoefficients mc = experiment_coefficients(cfg);
    const Grid2D g = make_grid(cfg.Lx, cfg.Ly, cfg.Nx, cfg.Ny);
    const ProjectionTable table =
        stage("projection", [&] { return ProjectionTable(cfg.phys, mc, g, decomposition_options(cfg, mc)); });
    ModulationTrack tr;
    tr.grid = make_ygrid(cfg.Ly, cfg.Ny);
    for (int i = 0;; ++i) {
        const fs::path ph = dir / "snapshots" / snapshot_name("phi", i), u1 = dir / "snapshots" / snapshot_name("u1", i);
        if (!fs::exists(ph)) {
            if (i == 0) throw std::runtime_error("extract_modulation: no snapshots in '" + (dir / "snapshots").string() + "'");
            break;
        }
        const double t = double(i) * cfg.snapshot_every * cfg.dt;
        const DecompositionState st = stage("decomposition", [&] {
            return decompose_snapshot(read_pair_snapshot(ph.string()), read_pair_snapshot(u1.string()), t, table);
        });
        tr.samples.push_back(measure_sample(t, tr.grid, st.gamma, st.ctil, mc));
        tr.gamma.push_back(st.gamma);
        tr.ctil.push_back(st.ctil);
        tr.b.push_back(b_from_ctil(tr.grid, st.ctil, mc));
    }
    return tr;
}

}  // namespace blwave
