// benthic: command-line front end for steady states, continuation and time integration.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "benthic/config.hpp"
#include "benthic/continuation.hpp"
#include "benthic/homogeneous.hpp"
#include "benthic/landau.hpp"
#include "benthic/timestep.hpp"

namespace fs = std::filesystem;
using namespace benthic;

namespace {

constexpr const char* kOutputRootEnv = "BENTHIC_OUTPUT_ROOT";

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p);
    if (!os) throw Error("cannot write " + p.string());
    return os;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::set<std::string> with(std::set<std::string> a, const std::set<std::string>& b) {
    a.insert(b.begin(), b.end());
    return a;
}

Field read_field_file(const fs::path& p) {
    std::ifstream is(p);
    if (!is) throw UsageError("cannot read field file " + p.string());
    return read_field(is);
}

// Points spread over [lo, hi] including both ends.
std::vector<double> linspace(const Range& r) {
    std::vector<double> out;
    for (int i = 0; i < r.n; ++i) out.push_back(r.n == 1 ? r.lo : r.lo + (r.hi - r.lo) * i / (r.n - 1));
    return out;
}

int cmd_scan(Config& c, const fs::path& out) {
    const Range s = parse_range(c.text("sigma", "0:0.25:200"), "sigma");
    const Range g = parse_range(c.text("gamma", "0:0.6:200"), "gamma");
    const ParameterSet base = parameters_from(c, false, false);
    const ScanRaster r = plane_scan({s.lo, s.hi, s.n}, {g.lo, g.hi, g.n}, base);
    auto os = open_out(out / "scan.csv");
    write_scan_csv(os, r);
    std::cout << "scan: " << s.n << " x " << g.n << " cells -> " << (out / "scan.csv").string() << '\n';
    return 0;
}

int cmd_homog(Config& c, const fs::path& out) {
    const ParameterSet p = parameters_from(c);
    const double lo = c.number("sigma_lo", 1e-3), hi = c.number("sigma_hi", 0.3);
    auto os = open_out(out / "homog.csv");
    os << "root_index,u,v,real,positive,class,b1,b2,b3,b4,k_minus,k_plus\n";
    for (const auto& s : all_homogeneous_roots(p)) {
        os << s.index << ',';
        if (!s.is_real) {
            os << "NA,NA,0,0," << scan_label(s) << ",NA,NA,NA,NA,NA,NA\n";
            continue;
        }
        os << fmt(s.u) << ',' << fmt(s.v) << ",1," << s.is_positive << ',' << scan_label(s) << ',' << fmt(s.stability.b1)
           << ',' << fmt(s.stability.b2) << ',' << fmt(s.stability.b3) << ',' << fmt(s.stability.b4) << ',';
        if (s.stability.kind == Stability::TuringUnstable) {
            const auto [km, kp] = neutral_wavenumbers(s, p);
            os << fmt(km) << ',' << fmt(kp) << '\n';
        } else {
            os << "NA,NA\n";
        }
        std::cout << "root " << s.index << ": u = " << fmt(s.u) << ", v = " << fmt(s.v) << ", " << scan_label(s) << '\n';
    }
    auto cs = open_out(out / "critical.csv");
    cs << "root_index,sigma_c,k_c\n";
    for (int idx : {1, 3}) {
        for (const auto& cp : critical_points(p, lo, hi, idx)) {
            cs << idx << ',' << fmt(cp.sigma) << ',' << fmt(cp.k) << '\n';
            std::cout << "Turing point of root " << idx << ": sigma_c = " << fmt(cp.sigma) << ", k_c = " << fmt(cp.k)
                      << '\n';
        }
    }
    return 0;
}

int cmd_disp(Config& c, const fs::path& out) {
    const ParameterSet p = parameters_from(c);
    const int root = static_cast<int>(c.integer("root", 1));
    const Range k = parse_range(c.text("k_range", "0:0.5:201"), "k_range");
    if (k.lo < 0.0) throw UsageError("k_range must be non-negative");
    const HomogeneousState s = homogeneous_state(p, root);
    if (!s.is_real) throw NoSolutionError("root " + std::to_string(root) + " is not real at these parameters");
    auto os = open_out(out / "dispersion.csv");
    os << "k,mu_plus_re,mu_plus_im,mu_minus_re,mu_minus_im\n";
    for (double kk : linspace(k)) {
        const auto d = dispersion(s, p, kk);
        os << fmt(kk) << ',' << fmt(d.mu_plus.real()) << ',' << fmt(d.mu_plus.imag()) << ',' << fmt(d.mu_minus.real())
           << ',' << fmt(d.mu_minus.imag()) << '\n';
    }
    std::cout << "disp: " << k.n << " wavenumbers, root " << root << " (" << scan_label(s) << ")\n";
    return 0;
}

int cmd_landau(Config& c, const fs::path& out) {
    const Range g = parse_range(c.text("gamma", "0.01:0.6:60"), "gamma");
    const ParameterSet base = parameters_from(c, true, false);
    const int root = static_cast<int>(c.integer("root", 1));
    const double lo = c.number("sigma_lo", 1e-3), hi = c.number("sigma_hi", 0.3);
    const double offset = c.number("offset", 0.0);
    const std::string mode = c.text("mode", "classical"), variant = c.text("variant", "printed");
    if (mode != "classical" && mode != "uniform") throw UsageError("mode must be classical or uniform");
    if (variant != "printed" && variant != "conjugated") throw UsageError("variant must be printed or conjugated");
    auto os = open_out(out / "landau.csv");
    os << "gamma,sigma_c,k_c,c1,c2,c3,c4,c_f\n";
    int na = 0;
    for (double gamma : linspace(g)) {
        ParameterSet p = base;
        p.gamma = gamma;
        std::vector<CriticalPoint> cps;
        if (gamma > 0.0) cps = critical_points(p, lo, hi, root);
        if (cps.empty()) {
            os << fmt(gamma) << ",NA,NA,NA,NA,NA,NA,NA\n";
            ++na;
            continue;
        }
        const CriticalPoint cp = cps.back();
        const auto lc = onset_coefficients(p, cp, root, cp.sigma + offset,
                                           mode == "uniform" ? LandauMode::Uniform : LandauMode::Classical,
                                           variant == "conjugated" ? QuarticVariant::Conjugated : QuarticVariant::AsPrinted);
        os << fmt(gamma) << ',' << fmt(cp.sigma) << ',' << fmt(cp.k) << ',' << fmt(lc.c1.real()) << ','
           << fmt(lc.c2.real()) << ',' << fmt(lc.c3.real()) << ',' << fmt(lc.c4.real()) << ',';
        try {
            os << fmt(subcriticality_index(lc)) << '\n';
        } catch (const DegenerateError&) {
            os << "NA\n";
        }
    }
    std::cout << "landau: " << g.n << " gamma values, " << na << " without a Turing point\n";
    return 0;
}

ContinuationSettings settings_from(Config& c) {
    ContinuationSettings s;
    s.ds = c.number("ds", s.ds);
    s.ds_min = c.number("ds_min", s.ds_min);
    s.ds_max = c.number("ds_max", s.ds_max);
    s.newton_tol = c.number("newton_tol", s.newton_tol);
    s.max_newton = static_cast<int>(c.integer("max_newton", s.max_newton));
    s.sigma_min = c.number("sigma_min", s.sigma_min);
    s.sigma_max = c.number("sigma_max", s.sigma_max);
    s.n_eigs = static_cast<int>(c.integer("n_eigs", s.n_eigs));
    s.spectrum.seed = static_cast<std::uint64_t>(c.integer("seed", 1));
    if (!(s.ds_min > 0.0 && s.ds_min <= s.ds && s.ds <= s.ds_max)) throw UsageError("need 0 < ds_min <= ds <= ds_max");
    if (!(s.sigma_min < s.sigma_max)) throw UsageError("need sigma_min < sigma_max");
    if (s.n_eigs < 1 || s.max_newton < 1) throw UsageError("n_eigs and max_newton must be positive");
    return s;
}

void print_branch(const Branch& b) {
    std::cout << b.label << ": " << b.points.size() << " points, ended: " << b.end_reason << '\n';
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        const auto& p = b.points[i];
        if (p.tag == PointTag::Regular) continue;
        std::cout << "  " << to_string(p.tag) << " #" << i << " at sigma = " << fmt(p.sigma)
                  << ", n_unstable = " << p.n_unstable << '\n';
    }
}

void dump_branch(const Branch& b, const fs::path& out, const std::string& name, long every) {
    {
        auto os = open_out(out / (name + ".csv"));
        write_branch_csv(os, b);
    }
    const fs::path dir = out / "snapshots";
    fs::create_directories(dir);
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        const bool last = i + 1 == b.points.size();
        if (b.points[i].tag != PointTag::Regular || last || (every > 0 && i % every == 0)) {
            char stem[64];
            std::snprintf(stem, sizeof stem, "%s_%05zu", name.c_str(), i);
            write_snapshot(dir / stem, b.points[i]);
        }
    }
}

int cmd_cont(Config& c, const fs::path& out) {
    const ParameterSet p = parameters_from(c);
    ContinuationSettings s = settings_from(c);
    const std::string start = c.text("start", "homogeneous");
    const long steps = c.integer("steps", 500);
    const int direction = static_cast<int>(c.integer("direction", -1));
    const long switch_at = c.integer("switch", 0);
    const int sign = static_cast<int>(c.integer("sign", 1));
    const double amplitude = c.number("amplitude", 1e-3);
    const long every = c.integer("snapshot_every", 0);
    const std::string label = c.text("label", "branch");
    if (steps < 1 || (direction != 1 && direction != -1) || (sign != 1 && sign != -1) || !(amplitude > 0.0)) {
        throw UsageError("need steps >= 1, direction and sign in {-1, 1}, amplitude > 0");
    }
    const bool from_snapshot = start != "homogeneous";

    BranchPoint first;
    Domain d;
    if (from_snapshot) {
        first = read_snapshot(start);
        d = first.field.domain;
    } else {
        d = domain_from(c, p);
    }
    const Continuation cont(d, p, s);
    if (from_snapshot) {
        if (cont.residual_norm(first.field, first.sigma) >= s.newton_tol) {
            throw ConvergenceError("snapshot " + start + " is not a converged point at these parameters");
        }
        first.eigenvalues = cont.spectrum(first.field, first.sigma).values;
    } else {
        const int root = static_cast<int>(c.integer("root", 1));
        first = cont.point_at(homogeneous_field(d, p, root), p.sigma, direction);
    }

    if (from_snapshot && first.tag == PointTag::Bifurcation && switch_at == 0 && c.has("sign")) {
        // switch directly at a stored bifurcation point
        const SparseOperator J = cont.discretization().jacobian(first.field, p.with_sigma(first.sigma));
        const Spectrum near = spectrum_near(J, 0.0, 1, s.spectrum);
        Eigen::VectorXd phi = near.vectors.col(0).real();
        const BranchPoint sw = cont.switch_branch(first, sign, amplitude, phi);
        Branch b = cont.continue_branch(sw, +1, steps);
        b.label = label;
        b.sign = sign;
        dump_branch(b, out, label, every);
        print_branch(b);
        return 0;
    }

    Branch b = cont.continue_branch(first, +1, steps);
    b.label = switch_at > 0 ? label + "_parent" : label;
    dump_branch(b, out, b.label, every);
    print_branch(b);
    if (switch_at > 0) {
        const auto bifs = b.indices(PointTag::Bifurcation);
        if (switch_at > static_cast<long>(bifs.size())) {
            throw NotFoundError("branch has " + std::to_string(bifs.size()) + " bifurcation points, asked for #" +
                                std::to_string(switch_at));
        }
        const int at = bifs[switch_at - 1];
        const BranchPoint sw = cont.switch_branch(b.points[at], sign, amplitude);
        Branch child = cont.continue_branch(sw, +1, steps);
        child.label = label;
        child.parent = b.label;
        child.parent_index = at;
        child.sign = sign;
        dump_branch(child, out, label, every);
        print_branch(child);
    }
    return 0;
}

int cmd_ti(Config& c, const fs::path& out) {
    const ParameterSet p = parameters_from(c);
    const Domain d = domain_from(c, p);
    IntegrationRun run;
    run.dt = c.number("dt", run.dt);
    run.t_end = c.number("t_end", 2000.0);
    run.window = c.number("window", run.window);
    run.quiescence_tol = c.number("quiescence_tol", run.quiescence_tol);
    run.stop_when_quiescent = c.integer("stop_when_quiescent", 1) != 0;
    const double amplitude = c.number("amplitude", 0.01);
    const auto seed = static_cast<std::uint64_t>(c.integer("seed", 1));
    const std::string init = c.text("init", "1,1");
    const std::string profile = c.text("sigma_profile", "none");
    const std::string snaps = c.text("snapshots", "none");

    StateVector w0;
    if (init == "root1" || init == "root3") {
        const HomogeneousState s = homogeneous_state(p, init == "root1" ? 1 : 3);
        if (!s.is_real) throw NoSolutionError("initial root is not real");
        w0 = s.state();
    } else {
        const auto parts = detail::split(init, ',');
        if (parts.size() != 2) throw UsageError("init must be 'u,v', root1 or root3");
        w0 = {detail::to_double(parts[0], "init"), detail::to_double(parts[1], "init")};
    }
    Field f = Field::uniform(d, w0);
    if (profile != "none") {
        const auto parts = detail::split(profile, ',');
        if (parts.size() != 3) throw UsageError("sigma_profile must be 's0,rate,y0'");
        f.sigma = sigma_profile(d, detail::to_double(parts[0], "sigma_profile"), detail::to_double(parts[1], "sigma_profile"),
                                detail::to_double(parts[2], "sigma_profile"));
    }
    if (snaps != "none")
        for (const auto& t : detail::split(snaps, ',')) run.snapshot_times.push_back(detail::to_double(t, "snapshots"));
    if (amplitude < 0.0) throw UsageError("amplitude must be non-negative");
    run.initial = perturb(f, amplitude, seed);
    try {
        run.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }

    StripThresholds th;
    th.dominance = c.number("dominance", th.dominance);
    th.skewness = c.number("skewness", th.skewness);
    th.homogeneous = c.number("homogeneous_threshold", th.homogeneous);
    const double k_ref = c.number("k_ref", 0.0);
    const double strip = parse_length(c.text("strip_height", "1wl"), k_ref, "strip_height");

    const Trajectory tr = integrate(run, p);
    for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
        auto os = open_out(out / ("snapshot_t" + fmt(tr.times[i]) + ".field"));
        write_field(os, tr.snapshots[i]);
    }
    {
        auto os = open_out(out / "final.field");
        write_field(os, tr.final);
    }
    {
        auto os = open_out(out / "ti.csv");
        os << "t,steps,quiescent,last_change\n"
           << fmt(tr.t) << ',' << tr.steps << ',' << tr.quiescent << ',' << fmt(tr.last_change) << '\n';
    }
    std::cout << "ti: t = " << fmt(tr.t) << ", " << (tr.quiescent ? "quiescent" : "not quiescent")
              << ", relative change over the last window " << fmt(tr.last_change) << '\n';
    if (d.dim == 2) {
        const auto strips = classify_strips(tr.final, strip, th);
        auto os = open_out(out / "layering.csv");
        write_layering_csv(os, strips);
        std::map<std::string, int> counts;
        for (const auto& s : strips) ++counts[to_string(s.label)];
        std::cout << "strips:";
        for (const auto& [k, n] : counts) std::cout << ' ' << k << '=' << n;
        std::cout << '\n';
    }
    return 0;
}

int cmd_norms(Config& c, const fs::path& out) {
    const std::string path = c.text("field", "");
    if (path.empty()) throw UsageError("norms needs --field");
    const FieldNorms n = norms(read_field_file(path));
    auto os = open_out(out / "norms.csv");
    os << "component,l1,l2,l8\n";
    os << "u," << fmt(n.u.l1) << ',' << fmt(n.u.l2) << ',' << fmt(n.u.l8) << '\n';
    os << "v," << fmt(n.v.l1) << ',' << fmt(n.v.l2) << ',' << fmt(n.v.l8) << '\n';
    std::cout << "u: l1 " << fmt(n.u.l1) << "  l2 " << fmt(n.u.l2) << "  l8 " << fmt(n.u.l8) << '\n'
              << "v: l1 " << fmt(n.v.l1) << "  l2 " << fmt(n.v.l2) << "  l8 " << fmt(n.v.l8) << '\n';
    return 0;
}

int cmd_export(Config& c, const fs::path& out) {
    const std::string path = c.text("field", "");
    if (path.empty()) throw UsageError("export needs --field");
    const Field w = read_field_file(path);
    const std::string name = fs::path(path).stem().string() + ".csv";
    auto os = open_out(out / name);
    os << (w.domain.dim == 2 ? "x,y,u,v" : "x,u,v") << (w.sigma ? ",sigma\n" : "\n");
    for (int i = 0; i < w.domain.size(); ++i) {
        const auto xy = w.coords(i);
        os << fmt(xy[0]) << ',';
        if (w.domain.dim == 2) os << fmt(xy[1]) << ',';
        os << fmt(w.u[i]) << ',' << fmt(w.v[i]);
        if (w.sigma) os << ',' << fmt((*w.sigma)[i]);
        os << '\n';
    }
    std::cout << "export: " << w.domain.size() << " nodes -> " << (out / name).string() << '\n';
    return 0;
}

struct Command {
    std::string name;
    std::string help;
    std::set<std::string> keys;
    std::function<int(Config&, const fs::path&)> run;
};

std::vector<Command> commands() {
    const auto params = parameter_keys();
    const auto dom = domain_keys();
    const std::set<std::string> cont_keys{"root", "start", "steps", "direction", "switch", "sign", "amplitude",
                                          "snapshot_every", "label", "ds", "ds_min", "ds_max", "newton_tol",
                                          "max_newton", "sigma_min", "sigma_max", "n_eigs"};
    const std::set<std::string> ti_keys{"dt", "t_end", "window", "quiescence_tol", "stop_when_quiescent",
                                        "amplitude", "init", "sigma_profile", "snapshots", "dominance",
                                        "skewness", "homogeneous_threshold", "strip_height"};
    return {
        {"scan", "classify homogeneous states on a sigma-gamma raster", params, cmd_scan},
        {"homog", "homogeneous states, stability and Turing points", with(params, {"sigma_lo", "sigma_hi"}),
         cmd_homog},
        {"disp", "dispersion relation of one homogeneous state", with(params, {"root", "k_range"}), cmd_disp},
        {"landau", "Landau coefficients at the Turing point over a gamma sweep",
         with(params, {"root", "sigma_lo", "sigma_hi", "offset", "mode", "variant"}), cmd_landau},
        {"cont", "pseudo-arclength continuation of steady states", with(with(params, dom), cont_keys), cmd_cont},
        {"ti", "time integration and strip classification", with(with(params, dom), ti_keys), cmd_ti},
        {"norms", "averaged L1, L2 and L8 norms of a field dump", {"field"}, cmd_norms},
        {"export", "field dump to CSV", {"field"}, cmd_export},
    };
}

std::string flag_name(std::string key) {
    for (auto& ch : key)
        if (ch == '_') ch = '-';
    return "--" + key;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Steady states, bifurcations and time integration of a bacteria-nutrient reaction-diffusion model"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every command");
    const auto cmds = commands();
    struct Bound {
        CLI::App* sub = nullptr;
        std::string config_file;
        std::string out;
        std::map<std::string, std::string> flags;
    };
    std::vector<Bound> bound(cmds.size());
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        Bound& b = bound[i];
        b.sub = app.add_subcommand(cmds[i].name, cmds[i].help);
        b.sub->add_option("--config", b.config_file, "key = value configuration file")->check(CLI::ExistingFile);
        b.sub->add_option("--out", b.out,
                          std::string("output directory (default $") + kOutputRootEnv + "/<command> or ./benthic-out/<command>)");
        for (const auto& key : with(cmds[i].keys, {"seed"})) {
            b.sub->add_option(flag_name(key), b.flags[key], key);
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    for (std::size_t i = 0; i < cmds.size(); ++i) {
        Bound& b = bound[i];
        if (!b.sub->parsed()) continue;
        const Command& cmd = cmds[i];
        try {
            Config cfg;
            if (!b.config_file.empty()) {
                std::ifstream is(b.config_file);
                cfg = Config::parse(is, b.config_file);
                if (cfg.has("command")) {
                    if (cfg.values().at("command") != cmd.name) {
                        throw UsageError("config file is for command '" + cfg.values().at("command") + "'");
                    }
                    Config rest;
                    for (const auto& [k, v] : cfg.values())
                        if (k != "command") rest.set(k, v);
                    cfg = rest;
                }
            }
            for (const auto& [k, v] : b.flags) {
                if (b.sub->count(flag_name(k)) > 0) cfg.set(k, v);
            }
            cfg.require_known(with(cmd.keys, {"seed"}));
            cfg.integer("seed", 1);

            fs::path out;
            if (!b.out.empty()) {
                out = b.out;
            } else if (const char* root = std::getenv(kOutputRootEnv); root && *root) {
                out = fs::path(root) / cmd.name;
            } else {
                out = fs::path("benthic-out") / cmd.name;
            }
            fs::create_directories(out);
            const int rc = cmd.run(cfg, out);
            auto os = open_out(out / "resolved.cfg");
            os << "command = " << cmd.name << '\n';
            cfg.write(os);
            return rc;
        } catch (const UsageError& e) {
            std::cerr << "benthic " << cmd.name << ": " << e.what() << '\n';
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "benthic " << cmd.name << ": " << e.what() << '\n';
            return 3;
        }
    }
    return 2;
}
