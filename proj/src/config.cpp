#include "helix/config.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "helix/cluster.hpp"
#include "helix/errors.hpp"
#include "helix/reduced_energy.hpp"

namespace helix {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Best-effort line number of a key's first occurrence, for error messages.
int line_of_key(const std::string& raw, const std::string& key) {
    const std::string needle = "\"" + key + "\"";
    const size_t pos = raw.find(needle);
    if (pos == std::string::npos) return -1;
    return 1 + static_cast<int>(std::count(raw.begin(), raw.begin() + pos, '\n'));
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where, const std::string& raw) {
    if (!obj.is_object()) throw ValidationError(where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            const int line = line_of_key(raw, it.key());
            throw ValidationError("unknown key '" + it.key() + "' in " + where +
                                  (line > 0 ? " (line " + std::to_string(line) + ")" : ""));
        }
    }
}

double get_num(const json& obj, const std::string& key, double dflt,
               bool require_positive, const std::string& raw) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number())
        throw ValidationError("key '" + key + "' must be a number (line " +
                              std::to_string(line_of_key(raw, key)) + ")");
    const double v = obj[key].get<double>();
    if (require_positive && !(v > 0.0))
        throw ValidationError("key '" + key + "' must be positive (line " +
                              std::to_string(line_of_key(raw, key)) + ")");
    return v;
}

int get_int(const json& obj, const std::string& key, int dflt, const std::string& raw) {
    if (!obj.contains(key)) return dflt;
    if (!obj[key].is_number_integer())
        throw ValidationError("key '" + key + "' must be an integer (line " +
                              std::to_string(line_of_key(raw, key)) + ")");
    return obj[key].get<int>();
}

bool power_of_two_plus_one(int n) {
    const int m = n - 1;
    return m >= 2 && (m & (m - 1)) == 0;
}

const std::set<std::string> FAMILY_KEYS = {"case",   "pitch",  "theta0",  "n",
                                           "kappa",  "mu",     "kappa0",  "kappa1",
                                           "kappa2", "r_star", "lambda1", "lambda2",
                                           "solve",  "guess"};

HelicalFamily parse_family(const json& fam, const std::string& raw) {
    check_keys(fam, FAMILY_KEYS, "family", raw);
    if (!fam.contains("case")) throw ValidationError("family needs a 'case'");
    const std::string c = fam["case"].get<std::string>();
    HelicalFamily f;
    f.pitch = get_num(fam, "pitch", 1.0, true, raw);
    f.global_phase = get_num(fam, "theta0", 0.0, false, raw);
    if (c == "polygon") {
        f.shape = PolygonCase{get_int(fam, "n", 3, raw), get_num(fam, "kappa", 1.0, true, raw),
                              get_num(fam, "r_star", 1.0, true, raw)};
    } else if (c == "polygon_plus_center") {
        f.shape = PolygonPlusCenterCase{get_int(fam, "n", 3, raw),
                                        get_num(fam, "kappa", 1.0, true, raw),
                                        get_num(fam, "mu", 1.0, true, raw),
                                        get_num(fam, "r_star", 1.0, true, raw)};
    } else if (c == "asym2") {
        f.shape = Asym2Case{get_num(fam, "kappa1", 1.0, true, raw),
                            get_num(fam, "kappa2", 1.0, true, raw),
                            get_num(fam, "lambda1", 1.0, true, raw),
                            get_num(fam, "lambda2", 1.0, true, raw)};
    } else if (c == "two_by_two") {
        f.shape = TwoByTwoCase{get_num(fam, "kappa", 1.0, true, raw),
                               get_num(fam, "mu", 1.0, true, raw),
                               get_num(fam, "lambda1", 1.0, true, raw),
                               get_num(fam, "lambda2", 1.0, true, raw)};
    } else if (c == "two_by_two_plus_center") {
        f.shape = TwoByTwoPlusCenterCase{get_num(fam, "kappa0", 1.0, true, raw),
                                         get_num(fam, "kappa", 1.0, true, raw),
                                         get_num(fam, "mu", 1.0, true, raw),
                                         get_num(fam, "lambda1", 1.0, true, raw),
                                         get_num(fam, "lambda2", 1.0, true, raw)};
    } else {
        throw ValidationError("unknown family case '" + c + "'");
    }
    // Optional: solve one parameter from the compatibility condition.
    if (fam.contains("solve")) {
        const std::string which = fam["solve"].get<std::string>();
        const double guess = get_num(fam, "guess", -1.0, false, raw);
        if (which == "kappa2") {
            const double v = solve_missing_parameter(f, MissingParam::Kappa2, guess);
            std::get<Asym2Case>(f.shape).kappa2 = v;
        } else if (which == "lambda2") {
            const double v = solve_missing_parameter(f, MissingParam::Lambda2, guess);
            if (auto* t = std::get_if<TwoByTwoCase>(&f.shape)) t->lambda2 = v;
            else std::get<TwoByTwoPlusCenterCase>(f.shape).lambda2 = v;
        } else {
            throw ValidationError("family 'solve' must be kappa2 or lambda2");
        }
    }
    return f;
}

json family_to_json(const HelicalFamily& f) {
    json j;
    j["case"] = f.case_name();
    j["pitch"] = f.pitch;
    j["theta0"] = f.global_phase;
    if (auto* c = std::get_if<PolygonCase>(&f.shape)) {
        j["n"] = c->n; j["kappa"] = c->kappa; j["r_star"] = c->r_star;
    } else if (auto* c = std::get_if<PolygonPlusCenterCase>(&f.shape)) {
        j["n"] = c->n; j["kappa"] = c->kappa; j["mu"] = c->mu; j["r_star"] = c->r_star;
    } else if (auto* c = std::get_if<Asym2Case>(&f.shape)) {
        j["kappa1"] = c->kappa1; j["kappa2"] = c->kappa2;
        j["lambda1"] = c->lambda1; j["lambda2"] = c->lambda2;
    } else if (auto* c = std::get_if<TwoByTwoCase>(&f.shape)) {
        j["kappa"] = c->kappa; j["mu"] = c->mu;
        j["lambda1"] = c->lambda1; j["lambda2"] = c->lambda2;
    } else if (auto* c = std::get_if<TwoByTwoPlusCenterCase>(&f.shape)) {
        j["kappa0"] = c->kappa0; j["kappa"] = c->kappa; j["mu"] = c->mu;
        j["lambda1"] = c->lambda1; j["lambda2"] = c->lambda2;
    }
    return j;
}

std::vector<HelicalFamily> default_families() {
    std::vector<HelicalFamily> out;
    out.push_back({PolygonCase{3, 1.0, 1.0}, 1.0, 0.0});
    out.push_back({PolygonPlusCenterCase{3, 1.0, 0.5, 1.0}, 1.0, 0.0});
    {
        HelicalFamily f{Asym2Case{1.0, 1.0, 1.0, 1.5}, 1.0, 0.0};
        std::get<Asym2Case>(f.shape).kappa2 =
            solve_missing_parameter(f, MissingParam::Kappa2);
        out.push_back(f);
    }
    {
        HelicalFamily f{TwoByTwoCase{1.0, 0.8, 1.0, 1.0}, 1.0, 0.0};
        std::get<TwoByTwoCase>(f.shape).lambda2 =
            solve_missing_parameter(f, MissingParam::Lambda2, 1.0);
        out.push_back(f);
    }
    {
        HelicalFamily f{TwoByTwoPlusCenterCase{1.0, 1.0, 2.0, 1.1, 1.0}, 1.0, 0.0};
        std::get<TwoByTwoPlusCenterCase>(f.shape).lambda2 =
            solve_missing_parameter(f, MissingParam::Lambda2, 1.0);
        out.push_back(f);
    }
    return out;
}

const std::set<std::string> SCENARIO_KEYS = {"case",    "n",       "kappa", "mu",
                                             "kappa0",  "r_star",  "pitch", "p",
                                             "lambda1", "lambda2", "eps"};

Scenario parse_scenario(const json& sc, const RunConfig& cfg, const std::string& raw) {
    check_keys(sc, SCENARIO_KEYS, "scenario", raw);
    const std::string c = sc.contains("case") ? sc["case"].get<std::string>() : "thm1_1";
    const double pitch = get_num(sc, "pitch", 1.0, true, raw);
    const double p = get_num(sc, "p", 2.0, true, raw);
    const double eps = get_num(sc, "eps", 0.02, true, raw);
    if (!(p > 1.0)) throw ValidationError("scenario exponent p must exceed 1");
    if (!(eps < 1.0)) throw ValidationError("scenario eps must be below 1");
    const double R = cfg.grid_R();
    const int n = cfg.grid_n();
    Scenario s;
    if (c == "thm1_1") {
        s = make_scenario_polygon(get_int(sc, "n", 2, raw), get_num(sc, "kappa", 2 * M_PI, true, raw),
                                  get_num(sc, "r_star", 1.0, true, raw), pitch, p, eps, R, n);
    } else if (c == "thm1_2") {
        s = make_scenario_polygon_center(
            get_int(sc, "n", 2, raw), get_num(sc, "kappa", 2 * M_PI, true, raw),
            get_num(sc, "mu", M_PI, true, raw), get_num(sc, "r_star", 1.0, true, raw), pitch,
            p, eps, R, n);
    } else if (c == "thm1_3") {
        HelicalFamily f{Asym2Case{get_num(sc, "kappa", 1.0, true, raw), 1.0,
                                  get_num(sc, "lambda1", 1.0, true, raw),
                                  get_num(sc, "lambda2", 1.2, true, raw)},
                        pitch, 0.0};
        std::get<Asym2Case>(f.shape).kappa2 = solve_missing_parameter(f, MissingParam::Kappa2);
        const auto& a = std::get<Asym2Case>(f.shape);
        s = make_scenario_asym_pair(a.kappa1, a.kappa2, a.lambda1, a.lambda2, pitch, p, eps, R, n);
    } else if (c == "thm1_4") {
        s = make_scenario_cross(get_num(sc, "kappa", 1.0, true, raw),
                                get_num(sc, "mu", 1.0, true, raw),
                                get_num(sc, "lambda1", 1.0, true, raw),
                                get_num(sc, "lambda2", 1.0, true, raw), pitch, p, eps, R, n);
    } else if (c == "thm1_5") {
        s = make_scenario_cross_center(get_num(sc, "kappa0", 1.0, true, raw),
                                       get_num(sc, "kappa", 1.0, true, raw),
                                       get_num(sc, "mu", 1.0, true, raw),
                                       get_num(sc, "lambda1", 1.1, true, raw),
                                       get_num(sc, "lambda2", 1.0, true, raw), pitch, p, eps,
                                       R, n);
    } else {
        throw ValidationError("unknown scenario case '" + c + "'");
    }
    s.cg_tol = cfg.solver_cg_tol();
    s.picard_tol = cfg.solver_picard_tol();
    s.max_sweeps = cfg.solver_max_sweeps();
    s.damping = cfg.solver_damping();
    return s;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << j.dump(2) << "\n";
}

struct Manifest {
    std::string command;
    std::string hash;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    std::vector<std::string> artifacts;

    void finish(const std::string& dir) const {
        json j;
        j["command"] = command;
        j["config_hash"] = hash;
        j["version"] = "0.1.0";
        j["wall_seconds"] = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        j["artifacts"] = artifacts;
        write_json(j, dir + "/manifest.json");
    }
};

int run_equilibria(RunConfig& cfg, const std::string& dir, Manifest& man) {
    std::vector<HelicalFamily> fams;
    if (cfg.doc.contains("equilibria") && cfg.doc["equilibria"].contains("cases")) {
        for (const json& fj : cfg.doc["equilibria"]["cases"])
            fams.push_back(parse_family(fj, cfg.raw_text));
    } else {
        fams = default_families();
    }
    json rep = json::array();
    bool ok = true;
    for (const HelicalFamily& f : fams) {
        const Configuration c = build_configuration(f);
        const double res = equilibrium_residual(f);
        json r;
        r["case"] = f.case_name();
        r["parameters"] = family_to_json(f);
        r["alpha"] = c.alpha;
        r["compat_residual"] = compatibility_residual(f);
        r["equilibrium_residual"] = res;
        rep.push_back(r);
        if (res > 1e-12) ok = false;
    }
    write_json(rep, dir + "/equilibria_report.json");
    man.artifacts.push_back("equilibria_report.json");
    return ok ? 0 : 1;
}

int run_simulate(RunConfig& cfg, const std::string& dir, Manifest& man) {
    if (!cfg.doc.contains("simulate")) throw ValidationError("missing 'simulate' block");
    const json& sim = cfg.doc["simulate"];
    check_keys(sim, {"family", "dt", "T", "M", "save_stride"}, "simulate", cfg.raw_text);
    if (!sim.contains("family")) throw ValidationError("simulate needs a 'family'");
    const HelicalFamily fam = parse_family(sim["family"], cfg.raw_text);
    const double dt = get_num(sim, "dt", 1e-4, true, cfg.raw_text);
    const double T = get_num(sim, "T", 0.1, true, cfg.raw_text);
    const int M = get_int(sim, "M", 64, cfg.raw_text);
    const int stride = get_int(sim, "save_stride", 100, cfg.raw_text);

    const FilamentEnsemble e0 = sample_filaments(fam, M);
    const Trajectory traj = kmd_integrate(e0, dt, T, stride);

    {
        FILE* fp = std::fopen((dir + "/trajectory.csv").c_str(), "w");
        if (!fp) throw ValidationError("cannot write trajectory.csv");
        std::fprintf(fp, "tau,j,s_index,re,im\n");
        for (size_t k = 0; k < traj.states.size(); ++k)
            for (int j = 0; j < traj.states[k].count(); ++j)
                for (int sidx = 0; sidx < traj.states[k].modes(); ++sidx)
                    std::fprintf(fp, "%.17g,%d,%d,%.17g,%.17g\n", traj.taus[k], j, sidx,
                                 traj.states[k].positions[j][sidx].real(),
                                 traj.states[k].positions[j][sidx].imag());
        std::fclose(fp);
        man.artifacts.push_back("trajectory.csv");
    }
    {
        FILE* fp = std::fopen((dir + "/diagnostics.csv").c_str(), "w");
        if (!fp) throw ValidationError("cannot write diagnostics.csv");
        std::fprintf(fp, "tau,mean_re,mean_im,second_moment,hamiltonian,min_sep\n");
        for (size_t k = 0; k < traj.states.size(); ++k) {
            const KmdDiagnostics d = kmd_diagnostics(traj.states[k]);
            std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", traj.taus[k],
                         d.mean_vorticity_center.real(), d.mean_vorticity_center.imag(),
                         d.second_moment, d.hamiltonian, d.min_separation);
        }
        std::fclose(fp);
        man.artifacts.push_back("diagnostics.csv");
    }
    if (traj.collided) {
        json j;
        j["collided"] = true;
        j["collision_tau"] = traj.collision_tau;
        write_json(j, dir + "/collision.json");
        man.artifacts.push_back("collision.json");
        return 1;
    }
    return 0;
}

int run_landscape(RunConfig& cfg, const std::string& dir, Manifest& man) {
    if (!cfg.doc.contains("landscape")) throw ValidationError("missing 'landscape' block");
    const json& lc = cfg.doc["landscape"];
    check_keys(lc,
               {"case_id", "n", "pitch", "kappa", "mu", "kappa0", "kappa1", "kappa2",
                "lambda1", "lambda2", "r_star", "start", "mode", "multistart", "alpha",
                "beta"},
               "landscape", cfg.raw_text);
    const int case_id = get_int(lc, "case_id", 1, cfg.raw_text);
    const std::string mode_s = lc.contains("mode") ? lc["mode"].get<std::string>() : "max";
    const ExtremumMode mode =
        mode_s == "max" ? ExtremumMode::Maximize : ExtremumMode::Minimize;

    Landscape L;
    json params_out;
    if (case_id == 0) {
        // Reduced functional over N free positions on the helical field.
        const int N = get_int(lc, "n", 2, cfg.raw_text);
        const double pitch = get_num(lc, "pitch", 1.0, true, cfg.raw_text);
        const WeightProfile w{get_num(lc, "alpha", 0.0, false, cfg.raw_text),
                              get_num(lc, "beta", 1.0, true, cfg.raw_text)};
        const CoefficientField field = CoefficientField::helical(pitch, cfg.grid_R());
        const ReducedEnergyContext ctx = make_context(field, w, N);
        L.dim = 2 * N;
        L.value = [ctx, N](const std::vector<double>& x) {
            std::vector<Vec2> pos(N);
            for (int i = 0; i < N; ++i) pos[i] = {x[2 * i], x[2 * i + 1]};
            return h_n_eval(ctx, pos).value;
        };
        L.gradient = [ctx, N](const std::vector<double>& x) {
            std::vector<Vec2> pos(N);
            for (int i = 0; i < N; ++i) pos[i] = {x[2 * i], x[2 * i + 1]};
            const HnResult r = h_n_eval(ctx, pos);
            std::vector<double> g(2 * N);
            for (int i = 0; i < N; ++i) {
                g[2 * i] = r.gradient[i].x;
                g[2 * i + 1] = r.gradient[i].y;
            }
            return g;
        };
        params_out = {{"n", N}, {"pitch", pitch}, {"alpha", w.alpha}, {"beta", w.beta}};
    } else {
        LandscapeParams p;
        p.n = get_int(lc, "n", 2, cfg.raw_text);
        p.h = get_num(lc, "pitch", 1.0, true, cfg.raw_text);
        p.kappa = get_num(lc, "kappa", 2 * M_PI, true, cfg.raw_text);
        p.mu = get_num(lc, "mu", M_PI, true, cfg.raw_text);
        p.kappa0 = get_num(lc, "kappa0", 1.0, true, cfg.raw_text);
        p.kappa1 = get_num(lc, "kappa1", 1.0, true, cfg.raw_text);
        p.kappa2 = get_num(lc, "kappa2", 1.0, true, cfg.raw_text);
        p.lambda1 = get_num(lc, "lambda1", 1.0, true, cfg.raw_text);
        p.lambda2 = get_num(lc, "lambda2", 1.0, true, cfg.raw_text);
        p.r_star = get_num(lc, "r_star", 1.0, true, cfg.raw_text);
        L = landscape_case(case_id, p);
        params_out = {{"n", p.n},         {"pitch", p.h},        {"kappa", p.kappa},
                      {"mu", p.mu},       {"kappa0", p.kappa0},  {"kappa1", p.kappa1},
                      {"kappa2", p.kappa2}, {"lambda1", p.lambda1}, {"lambda2", p.lambda2},
                      {"r_star", p.r_star}};
    }

    std::vector<double> start(L.dim, 1.0);
    if (lc.contains("start")) {
        start = lc["start"].get<std::vector<double>>();
        if (static_cast<int>(start.size()) != L.dim)
            throw ValidationError("landscape start has wrong dimension");
    }
    FindCriticalOptions opts;
    opts.multistart = get_int(lc, "multistart", 0, cfg.raw_text);
    opts.multistart_seed = cfg.seed();
    const CriticalPoint c = find_critical(L, start, mode, opts);

    json j;
    j["case"] = case_id;
    j["params"] = params_out;
    j["point"] = c.point;
    j["grad_norm"] = c.gradient_norm;
    j["hessian_eigs"] = c.hessian_eigenvalues;
    j["classification"] = c.classification;
    write_json(j, dir + "/critical_point.json");
    man.artifacts.push_back("critical_point.json");
    return 0;
}

int run_green(RunConfig& cfg, const std::string& dir, Manifest& man) {
    if (!cfg.doc.contains("green")) throw ValidationError("missing 'green' block");
    const json& gc = cfg.doc["green"];
    check_keys(gc, {"field", "pitch", "y"}, "green", cfg.raw_text);
    const std::string kind = gc.contains("field") ? gc["field"].get<std::string>() : "helical";
    const double pitch = get_num(gc, "pitch", 1.0, true, cfg.raw_text);
    Vec2 y{0.4, 0.0};
    if (gc.contains("y")) {
        const auto v = gc["y"].get<std::vector<double>>();
        if (v.size() != 2) throw ValidationError("green 'y' must have two entries");
        y = {v[0], v[1]};
    }
    const CoefficientField field =
        kind == "identity" ? CoefficientField::identity(cfg.grid_R())
                           : CoefficientField::helical(pitch, cfg.grid_R());
    const Grid grid(cfg.grid_R(), cfg.grid_n());
    const EllipticOperator op(grid, field);
    const GreenResult res = green_function(op, field, y, cfg.solver_cg_tol());

    write_field_binary(res.G, dir + "/green.bin");
    write_field_binary(res.S, dir + "/regular_part.bin");
    man.artifacts.push_back("green.bin");
    man.artifacts.push_back("regular_part.bin");
    for (const std::string& f : cfg.output_formats())
        if (f == "csv") {
            write_field_csv(res.G, dir + "/green.csv");
            write_field_csv(res.S, dir + "/regular_part.csv");
            man.artifacts.push_back("green.csv");
            man.artifacts.push_back("regular_part.csv");
        }

    json j;
    j["robin"] = res.robin;
    j["source"] = {res.source.x, res.source.y};
    // Corrector probe values on a small ring.
    json probes = json::array();
    const double rr = 8.0 * grid.spacing();
    for (int k = 0; k < 8; ++k) {
        const double th = 2.0 * M_PI * k / 8.0;
        const Vec2 x = res.source + Vec2{rr * std::cos(th), rr * std::sin(th)};
        double F1, F2;
        eval_correctors(field, res.source, x, F1, F2);
        probes.push_back({{"x", {x.x, x.y}}, {"F1", F1}, {"F2", F2}});
    }
    j["corrector_probes"] = probes;
    write_json(j, dir + "/green.json");
    man.artifacts.push_back("green.json");
    return 0;
}

json component_to_json(const ClusterComponent& c) {
    return {{"centroid", {c.centroid.x, c.centroid.y}},
            {"diameter", c.diameter},
            {"circulation", c.circulation},
            {"circulation_target", c.circulation_target},
            {"species", c.species},
            {"node_count", c.node_count}};
}

int run_solve(RunConfig& cfg, const std::string& dir, Manifest& man) {
    if (!cfg.doc.contains("solve")) throw ValidationError("missing 'solve' block");
    const Scenario s = parse_scenario(cfg.doc["solve"], cfg, cfg.raw_text);
    const ClusterSolution sol = solve_clustered(s);

    json j;
    j["converged"] = sol.report.converged;
    j["iterations"] = sol.report.iterations;
    j["final_residual"] = sol.report.final_residual;
    j["config_gradient"] = sol.report.config_gradient;
    j["energy"] = sol.report.energy;
    j["ansatz_sup_residual"] = sol.report.ansatz_sup_residual;
    j["support_contained"] = sol.report.support_contained;
    j["components"] = json::array();
    for (const auto& c : sol.report.components) j["components"].push_back(component_to_json(c));
    j["qhat"] = sol.params.qhat;
    j["core_radii"] = sol.params.s_eps;
    write_json(j, dir + "/cluster_report.json");
    man.artifacts.push_back("cluster_report.json");

    write_field_binary(sol.u, dir + "/solution.bin");
    man.artifacts.push_back("solution.bin");
    for (const std::string& f : cfg.output_formats())
        if (f == "csv") {
            write_field_csv(sol.u, dir + "/solution.csv");
            man.artifacts.push_back("solution.csv");
        }

    // helical lift sampled along one turn of each component's tube centerline
    if (!sol.report.components.empty()) {
        std::vector<Vec3> samples;
        for (const auto& c : sol.report.components)
            for (int k = 0; k < 16; ++k) {
                const double x3 = 2.0 * M_PI * s.pitch * k / 16.0;
                const double th = x3 / s.pitch;
                samples.push_back({std::cos(th) * c.centroid.x + std::sin(th) * c.centroid.y,
                                   -std::sin(th) * c.centroid.x + std::cos(th) * c.centroid.y,
                                   x3});
            }
        const std::vector<Vec3> w = lift_vorticity_3d(sol.u, s, samples, 0.0);
        FILE* fp = std::fopen((dir + "/vorticity_3d.csv").c_str(), "w");
        if (!fp) throw ValidationError("cannot write vorticity_3d.csv");
        std::fprintf(fp, "x1,x2,x3,w1,w2,w3\n");
        for (size_t k = 0; k < samples.size(); ++k)
            std::fprintf(fp, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", samples[k].x,
                         samples[k].y, samples[k].z, w[k].x, w[k].y, w[k].z);
        std::fclose(fp);
        man.artifacts.push_back("vorticity_3d.csv");
    }
    return sol.report.converged ? 0 : 1;
}

int run_energy(RunConfig& cfg, const std::string& dir, Manifest& man) {
    if (!cfg.doc.contains("energy")) throw ValidationError("missing 'energy' block");
    json ec = cfg.doc["energy"];
    std::vector<double> ladder = {0.04, 0.02, 0.01};
    if (ec.contains("eps_ladder")) {
        ladder = ec["eps_ladder"].get<std::vector<double>>();
        ec.erase("eps_ladder");
    }
    json rows = json::array();
    for (double eps : ladder) {
        json sc = ec;
        sc["eps"] = eps;
        const Scenario s = parse_scenario(sc, cfg, cfg.raw_text);
        const Grid grid(s.grid_half_width, s.grid_n);
        const CoefficientField field = CoefficientField::helical(s.pitch, s.grid_half_width);
        const EllipticOperator op(grid, field);
        const ProfileTable table = solve_profile(s.p);

        const std::vector<Vec2> centers = s.physical_centers();
        std::vector<WeightProfile> profiles;
        for (size_t j = 0; j < centers.size(); ++j)
            profiles.push_back(s.species[s.center_species[j]].weight);
        const CenterGreenData green = compute_center_green(op, field, centers, s.cg_tol);
        AnsatzParameters params;
        params.centers = centers;
        params.eps = eps;
        params.qhat = solve_qhat(field, profiles, table, centers, eps, green);
        for (size_t j = 0; j < centers.size(); ++j)
            params.s_eps.push_back(solve_core_radius(eps, params.qhat[j], table));

        ExpansionInputs in;
        in.epsilon = eps;
        in.p = s.p;
        for (size_t j = 0; j < centers.size(); ++j) {
            in.q_values.push_back(profiles[j].q(centers[j]));
            in.sqrt_det_values.push_back(field.eval_metric(centers[j]).sqrt_det);
            in.robin_values.push_back(green.robin[j]);
        }
        in.green_values = green.green;
        const ExpansionResult ex = energy_expansion(in);
        const double ea = energy_of_ansatz(s, op, field, table, params);

        json row;
        row["eps"] = eps;
        row["energy_of_ansatz"] = ea;
        row["energy_expansion"] = ex.total;
        row["terms"] = ex.terms;
        rows.push_back(row);
    }
    json j;
    j["ladder"] = rows;
    write_json(j, dir + "/energy.json");
    man.artifacts.push_back("energy.json");
    return 0;
}

}  // namespace

double RunConfig::grid_R() const {
    return doc.contains("grid") ? get_num(doc["grid"], "R", 1.2, true, raw_text) : 1.2;
}
int RunConfig::grid_n() const {
    const int n = doc.contains("grid") ? get_int(doc["grid"], "n", 257, raw_text) : 257;
    if (!power_of_two_plus_one(n) || n < 65)
        throw ValidationError("grid n must be a power of two plus one, at least 65");
    return n;
}
double RunConfig::solver_cg_tol() const {
    return doc.contains("solver") ? get_num(doc["solver"], "cg_tol", 1e-10, true, raw_text)
                                  : 1e-10;
}
double RunConfig::solver_picard_tol() const {
    return doc.contains("solver")
               ? get_num(doc["solver"], "picard_tol", 1e-8, true, raw_text)
               : 1e-8;
}
int RunConfig::solver_max_sweeps() const {
    return doc.contains("solver") ? get_int(doc["solver"], "max_sweeps", 300, raw_text) : 300;
}
double RunConfig::solver_damping() const {
    return doc.contains("solver") ? get_num(doc["solver"], "damping", 0.6, true, raw_text)
                                  : 0.6;
}
std::string RunConfig::output_dir() const {
    if (doc.contains("output") && doc["output"].contains("dir"))
        return doc["output"]["dir"].get<std::string>();
    return "out";
}
std::vector<std::string> RunConfig::output_formats() const {
    if (doc.contains("output") && doc["output"].contains("formats"))
        return doc["output"]["formats"].get<std::vector<std::string>>();
    return {"csv", "json"};
}
unsigned RunConfig::seed() const {
    return doc.contains("seed") ? doc["seed"].get<unsigned>() : 12345u;
}

RunConfig parse_config_text(const std::string& text, const std::string& command) {
    RunConfig cfg;
    cfg.raw_text = text;
    try {
        cfg.doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const int line =
            1 + static_cast<int>(std::count(text.begin(), text.begin() + std::min(text.size(), e.byte), '\n'));
        throw ValidationError("config parse error near line " + std::to_string(line) + ": " +
                              e.what());
    }
    check_keys(cfg.doc,
               {"seed", "grid", "output", "solver", "equilibria", "simulate", "landscape",
                "green", "solve", "energy"},
               "config", text);
    if (cfg.doc.contains("grid"))
        check_keys(cfg.doc["grid"], {"R", "n"}, "grid", text);
    if (cfg.doc.contains("solver"))
        check_keys(cfg.doc["solver"], {"cg_tol", "picard_tol", "max_sweeps", "damping"},
                   "solver", text);
    if (cfg.doc.contains("output"))
        check_keys(cfg.doc["output"], {"dir", "formats"}, "output", text);
    if (cfg.doc.contains("equilibria"))
        check_keys(cfg.doc["equilibria"], {"cases"}, "equilibria", text);
    if (cfg.doc.contains("solve"))
        check_keys(cfg.doc["solve"], SCENARIO_KEYS, "solve", text);
    if (cfg.doc.contains("energy")) {
        auto keys = SCENARIO_KEYS;
        keys.insert("eps_ladder");
        check_keys(cfg.doc["energy"], keys, "energy", text);
    }
    // Touch the common accessors so malformed values fail at parse time.
    cfg.grid_R();
    if (command == "solve" || command == "energy" || command == "green") cfg.grid_n();
    cfg.solver_cg_tol();
    cfg.solver_picard_tol();
    cfg.solver_damping();
    return cfg;
}

RunConfig parse_config_file(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read config file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text, command);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ValidationError("override must look like path.to.key=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json* node = &cfg.doc;
    size_t start = 0;
    std::vector<std::string> parts;
    while (true) {
        const size_t dot = path.find('.', start);
        parts.push_back(path.substr(start, dot == std::string::npos ? dot : dot - start));
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    try {
        (*node)[parts.back()] = json::parse(value);
    } catch (const json::parse_error&) {
        (*node)[parts.back()] = value;
    }
}

std::string config_hash(const RunConfig& cfg) {
    const std::string s = cfg.doc.dump();
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

int run_command(const std::string& command, RunConfig& cfg) {
    try {
        const std::string dir = cfg.output_dir();
        fs::create_directories(dir);
        Manifest man;
        man.command = command;
        man.hash = config_hash(cfg);

        int rc;
        if (command == "equilibria") rc = run_equilibria(cfg, dir, man);
        else if (command == "simulate") rc = run_simulate(cfg, dir, man);
        else if (command == "landscape") rc = run_landscape(cfg, dir, man);
        else if (command == "green") rc = run_green(cfg, dir, man);
        else if (command == "solve") rc = run_solve(cfg, dir, man);
        else if (command == "energy") rc = run_energy(cfg, dir, man);
        else throw ValidationError("unknown subcommand '" + command + "'");
        man.finish(dir);
        return rc;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

}  // namespace helix
