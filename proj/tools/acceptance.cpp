// Acceptance checks. `acceptance N...` runs the listed criteria (all when none are given)
// and prints one "criterion N: PASS|FAIL  detail" line each. Exit status 1 if any fails.
//
// Criteria 8 and 9 read the 2D branch summary written by criterion 7 (`--cache FILE`,
// default diagram_2d.csv); without it they compute the diagram themselves.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "benthic/continuation.hpp"
#include "benthic/landau.hpp"
#include "benthic/timestep.hpp"

using namespace benthic;
using std::numbers::pi;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void note(const std::string& s) { std::cerr << "  " << s << std::endl; }

// ---------------------------------------------------------------- 1: cubic coefficients

Verdict cubic_constants() {
    const CubicCoefficients c = cubic_coefficients(ParameterSet::standard(0.1, 0.25));
    struct Row { const char* name; double got, want, tol; };
    const Row rows[] = {{"b_g", c.b_g, 1.47, 0.01},   {"b_s", c.b_s, -11.53, 0.01}, {"b_0", c.b_0, -0.47, 0.01},
                        {"c_g", c.c_g, -0.02, 0.01},  {"c_s", c.c_s, 7.39, 0.01},   {"c_sg", c.c_sg, -19.04, 0.01},
                        {"c_0", c.c_0, 0.01, 0.01},   {"d_s", c.d_s, -0.12, 0.01},  {"d_0", c.d_0, -1e-4, 5e-5}};
    Verdict v{true, ""};
    for (const auto& r : rows) {
        const bool ok = std::abs(r.got - r.want) <= r.tol;
        v.pass = v.pass && ok;
        v.detail += fmt("%s=%.4g%s ", r.name, r.got, ok ? "" : "(!)");
    }
    return v;
}

// ---------------------------------------------------------------- 2: critical points

Verdict critical_values() {
    Verdict v{true, ""};
    auto check = [&](const char* what, double got, double want, double tol) {
        const bool ok = std::abs(got - want) <= tol;
        v.pass = v.pass && ok;
        v.detail += fmt("%s=%.5f%s ", what, got, ok ? "" : "(!)");
    };
    const auto g03 = critical_points(ParameterSet::standard(0.1, 0.3), 1e-3, 0.3);
    if (g03.size() != 2) return {false, fmt("gamma=0.3: %zu Turing points, expected 2", g03.size())};
    check("sigma_l", g03[0].sigma, 0.025, 0.005);
    check("k_l", g03[0].k, 0.067, 0.005);
    check("sigma_r", g03[1].sigma, 0.11, 0.005);
    check("k_r", g03[1].k, 0.187, 0.005);
    const auto g025 = critical_points(ParameterSet::standard(0.1, 0.25), 1e-3, 0.3);
    check("k_c(0.25)", g025.back().k, 0.19, 0.005);
    const auto g0004 = critical_points(ParameterSet::standard(0.1, 0.004), 1e-3, 0.3);
    check("sigma_c(0.004)", g0004.back().sigma, 0.196, 0.002);
    check("k_c(0.004)", g0004.back().k, 0.212, 0.005);
    return v;
}

// ---------------------------------------------------------------- 3: plane topology

Verdict plane_topology() {
    const ScanRaster r = plane_scan({0.0, 0.25, 200}, {0.0, 0.6, 200});
    int i5_turing = 0, i3_rows = 0, i3_bad = 0, root3_real = 0, root3_unstable = 0;
    double g_lo = 1.0, g_hi = 0.0;
    for (int j = 0; j < r.gamma.n; ++j) {
        const double g = r.gamma.at(j);
        std::vector<bool> turing(r.sigma.n, false);
        for (int i = 0; i < r.sigma.n; ++i) {
            const auto& cell = r.at(i, j);
            for (const auto& s : cell.roots)
                if (s.is_real && s.is_positive && s.stability.kind == Stability::TuringUnstable) turing[i] = true;
            if (g > 0.47 && turing[i]) ++i5_turing;
            const auto& r3 = cell.roots[2];
            if (r3.is_real && r3.is_positive) {
                ++root3_real;
                if (r3.stability.kind != Stability::Stable) {
                    ++root3_unstable;
                    g_lo = std::min(g_lo, g);
                    g_hi = std::max(g_hi, g);
                }
            }
        }
        if (g > 0.28 && g <= 0.34) {
            ++i3_rows;
            int bands = 0;
            for (int i = 0; i < r.sigma.n; ++i) bands += turing[i] && (i == 0 || !turing[i - 1]);
            if (bands != 2) ++i3_bad;
        }
    }
    Verdict v;
    v.pass = i5_turing == 0 && i3_rows > 0 && i3_bad == 0 && root3_unstable == 0;
    v.detail = fmt("I5 Turing cells %d; I3 rows with two bands %d/%d; root 3 not stable in %d of %d real cells", i5_turing,
                   i3_rows - i3_bad, i3_rows, root3_unstable, root3_real);
    if (root3_unstable > 0) v.detail += fmt(" (gamma %.4f..%.4f)", g_lo, g_hi);
    return v;
}

// ---------------------------------------------------------------- 4: Landau signs

CriticalPoint right_onset(const ParameterSet& base) { return critical_points(base, 1e-3, 0.3).back(); }

AmplitudeCoefficients onset_amplitudes(double gamma) {
    const ParameterSet base = ParameterSet::standard(0.1, gamma);
    return AmplitudeCoefficients::of(onset_coefficients(base, right_onset(base)));
}

// zero of f on a gamma grid, refined by bisection
std::optional<double> gamma_root(const std::function<double(double)>& f, double lo, double hi, int samples) {
    double a = lo, fa = f(lo);
    for (int i = 1; i <= samples; ++i) {
        const double b = lo + (hi - lo) * i / samples, fb = f(b);
        if ((fa > 0) != (fb > 0)) {
            double x0 = a, x1 = b;
            for (int it = 0; it < 60; ++it) {
                const double m = 0.5 * (x0 + x1);
                if ((f(m) > 0) == (fa > 0)) x0 = m; else x1 = m;
            }
            return 0.5 * (x0 + x1);
        }
        a = b;
        fa = fb;
    }
    return std::nullopt;
}

Verdict landau_signs() {
    const auto g3 = gamma_root([](double g) { return onset_amplitudes(g).c3; }, 0.12, 0.28, 32);
    const auto g34 = gamma_root([](double g) { const auto c = onset_amplitudes(g); return c.c3 + 2 * c.c4; }, 0.02, 0.2, 36);
    const ParameterSet base = ParameterSet::standard(0.1, 0.25);
    const CriticalPoint cp = right_onset(base);
    int beans = 0, stable_beans = 0;
    for (int i = 1; i <= 30; ++i) {
        const auto c = AmplitudeCoefficients::of(onset_coefficients(base, cp, 1, cp.sigma - 0.001 * i));
        for (const auto& t : mixed_mode_amplitudes(c)) {
            if (!t.is_bean()) continue;
            ++beans;
            if (amplitude_stability(t, c).stable) ++stable_beans;
        }
    }
    Verdict v;
    v.pass = g3 && std::abs(*g3 - 0.209) <= 0.01 && g34 && std::abs(*g34 - 0.08) <= 0.01 && beans > 0 && stable_beans == 0;
    v.detail = fmt("c3 root gamma=%.4f; c3+2c4 root gamma=%.4f; stable beans %d of %d", g3.value_or(NAN),
                   g34.value_or(NAN), stable_beans, beans);
    return v;
}

// ---------------------------------------------------------------- 5: wavelength selection

double cosine_coefficient(const Field& w, int j) {
    const Domain& d = w.domain;
    const Eigen::VectorXd q = quadrature_weights(d);
    const double mean = q.dot(w.u);
    double c = 0.0;
    for (int i = 0; i < d.size(); ++i) c += q[i] * (w.u[i] - mean) * std::cos(j * pi * (d.x.at(i) - d.x.lo) / d.x.length());
    return 2.0 * c;
}

int dominant_cosine(const Eigen::VectorXd& u, const Domain& d, int max_j) {
    Field w = Field::uniform(d, {0.0, 0.0});
    w.u = u;
    int best = 1;
    double top = 0.0;
    for (int j = 1; j <= max_j; ++j) {
        const double c = std::abs(cosine_coefficient(w, j));
        if (c > top) top = c, best = j;
    }
    return best;
}

Verdict wavelength_selection() {
    const ParameterSet base = ParameterSet::standard(0.1, 0.3);
    const CriticalPoint cp = right_onset(base);
    const double L = 8 * pi / cp.k;  // four critical wavelengths
    const Domain d = Domain::line(-L / 2, L / 2, nodes_for(L, cp.k, 32));
    ContinuationSettings s;
    s.sigma_min = 0.005;
    s.n_eigs = 12;
    Continuation c(d, base, s);
    const BranchPoint start = c.point_at(homogeneous_field(d, base.with_sigma(cp.sigma + 0.005)), cp.sigma + 0.005, -1);
    const Branch h = c.continue_branch(start, +1, 400, [](const Branch& b) { return b.indices(PointTag::Bifurcation).size() >= 4; });
    const auto bifs = h.indices(PointTag::Bifurcation);
    if (bifs.size() < 4) return {false, fmt("homogeneous branch: %zu bifurcations (%s)", bifs.size(), h.end_reason.c_str())};

    // mode j is j/2 periods on the domain
    const int expected[] = {8, 7, 9, 6};
    Verdict v{true, ""};
    for (int n = 0; n < 4; ++n) {
        const BranchPoint& bp = h.points[bifs[n]];
        const int j = dominant_cosine(bp.kernel.col(0).head(d.size()), d, 40);
        const bool order_ok = j == expected[n];
        const BranchPoint sw = c.switch_branch(bp, +1, 1e-3);
        const double a0 = cosine_coefficient(sw.field, j);
        const Branch b = c.continue_branch(sw, +1, 3000, [&](const Branch& br) {
            return br.points.size() > 5 && cosine_coefficient(br.points.back().field, j) * a0 < 0;
        });
        const auto& P = b.points;
        double end = NAN;
        if (P.size() > 5 && cosine_coefficient(P.back().field, j) * a0 < 0) {
            const double y0 = cosine_coefficient(P[P.size() - 2].field, j), y1 = cosine_coefficient(P.back().field, j);
            end = P[P.size() - 2].sigma + (P.back().sigma - P[P.size() - 2].sigma) * y0 / (y0 - y1);
        }
        // second sigma at which wavenumber j pi / L is neutral
        const double k = j * pi / L;
        auto det = [&](double sg) {
            const ParameterSet p = base.with_sigma(sg);
            return mode_determinant(derivatives(homogeneous_state(p, 1).state(), p).jacobian(), p.delta(), k);
        };
        double a = 0.005, bb = bp.sigma - 1e-4;
        const bool fa = det(a) > 0;
        for (int it = 0; it < 100; ++it) {
            const double m = 0.5 * (a + bb);
            if ((det(m) > 0) == fa) a = m; else bb = m;
        }
        const double neutral = 0.5 * (a + bb);
        const bool end_ok = std::abs(end - neutral) <= 0.002;
        v.pass = v.pass && order_ok && end_ok;
        v.detail += fmt("[%.1f periods: onset %.5f, end %.5f vs neutral %.5f%s] ", j / 2.0, bp.sigma, end, neutral,
                        order_ok && end_ok ? "" : " (!)");
    }
    return v;
}

// ---------------------------------------------------------------- 6: snaking

// Fraction of one-wavelength windows whose local amplitude reaches half the global one.
double filled_fraction(const Field& w, double wavelength) {
    const Domain& d = w.domain;
    const Eigen::ArrayXd dev = (w.u.array() - w.u.mean()).abs();
    const double top = dev.maxCoeff();
    if (top == 0.0) return 0.0;
    const int windows = std::max(1, static_cast<int>(std::lround(d.x.length() / wavelength)));
    int filled = 0;
    for (int k = 0; k < windows; ++k) {
        double m = 0.0;
        for (int i = 0; i < d.size(); ++i) {
            const int win = std::min(windows - 1, static_cast<int>((d.x.at(i) - d.x.lo) / d.x.length() * windows));
            if (win == k) m = std::max(m, dev[i]);
        }
        filled += m >= 0.5 * top;
    }
    return static_cast<double>(filled) / windows;
}

Verdict snaking() {
    const ParameterSet base = ParameterSet::standard(0.1, 0.004);
    const CriticalPoint cp = right_onset(base);
    const double L = 48 * pi / cp.k;
    const Domain d = Domain::line(-L / 2, L / 2, nodes_for(L, cp.k, 32));
    ContinuationSettings s;
    s.sigma_min = 0.15;
    s.n_eigs = 16;
    Continuation c(d, base, s);
    const BranchPoint start = c.point_at(homogeneous_field(d, base.with_sigma(cp.sigma + 0.002)), cp.sigma + 0.002, -1);
    const Branch h = c.continue_branch(start, +1, 400, [](const Branch& b) { return !b.indices(PointTag::Bifurcation).empty(); });
    if (h.indices(PointTag::Bifurcation).empty()) return {false, "no bifurcation on the homogeneous branch"};
    const BranchPoint& onset = h.points[h.indices(PointTag::Bifurcation)[0]];
    note(fmt("onset %.6f", onset.sigma));

    const BranchPoint sw = c.switch_branch(onset, +1, 1e-3);
    const Branch stripes = c.continue_branch(sw, sw.tangent_sigma > 0 ? 1 : -1, 3000,
                                             [](const Branch& b) { return !b.indices(PointTag::Fold).empty(); });
    const auto folds = stripes.indices(PointTag::Fold);
    if (folds.empty()) return {false, "stripe branch has no fold: " + stripes.end_reason};
    const double fold = stripes.points[folds[0]].sigma;
    int bifs = 0;
    for (int i : stripes.indices(PointTag::Bifurcation)) bifs += i < folds[0];
    const bool subcritical = stripes.points[1].sigma > onset.sigma;
    note(fmt("stripes: fold %.6f, %d bifurcations", fold, bifs));

    // localized branch from the first bifurcation on the stripes, followed until the pattern fills the domain
    const BranchPoint& b1 = stripes.points[stripes.indices(PointTag::Bifurcation)[0]];
    const double wl = 2 * pi / cp.k;
    const BranchPoint l1s = c.switch_branch(b1, +1, 1e-3);
    const Branch l1 = c.continue_branch(l1s, +1, 4000, [&](const Branch& b) {
        return b.points.size() > 10 && filled_fraction(b.points.back().field, wl) >= 0.95;
    });
    std::vector<double> snake;
    for (int i : l1.indices(PointTag::Fold)) snake.push_back(l1.points[i].sigma);
    note(fmt("l1: %zu points, %zu folds, end %s, filled %.2f", l1.points.size(), snake.size(), l1.end_reason.c_str(),
             filled_fraction(l1.points.back().field, wl)));
    double lo = NAN, hi = NAN;
    if (!snake.empty()) {
        lo = *std::min_element(snake.begin(), snake.end());
        hi = *std::max_element(snake.begin(), snake.end());
    }
    const bool snake_ok = snake.size() >= 4 && hi - lo <= 2e-3 && std::abs(0.5 * (lo + hi) - 0.19789) <= 5e-4;
    Verdict v;
    v.pass = subcritical && std::abs(onset.sigma - 0.196) <= 0.002 && std::abs(fold - 0.1985) <= 0.001 && bifs == 10 &&
             snake_ok;
    v.detail = fmt("onset %.5f %s; fold %.5f; %d bifurcations before the fold; l1 snake %zu folds in [%.6f, %.6f]",
                   onset.sigma, subcritical ? "subcritical" : "supercritical", fold, bifs, snake.size(), lo, hi);
    return v;
}

// ---------------------------------------------------------------- 7-9: 2D diagram at gamma = 0.25

struct Setup2d {
    ParameterSet base = ParameterSet::standard(0.1, 0.25);
    CriticalPoint cp;
    LandauCoefficients lc;
    Domain d;

    Setup2d() {
        cp = right_onset(base);
        lc = onset_coefficients(base, cp);
        const double lx = 2 * pi / cp.k, ly = 2 * pi / (std::sqrt(3.0) * cp.k);
        d = Domain::rect(-lx, lx, nodes_for(2 * lx, cp.k, 16), -ly, ly, nodes_for(2 * ly, cp.k, 16));
    }

    double phi_u() const { return lc.Phi[0].real(); }

    // (A, B): u - mean projected on cos(k x) / 2 and on cos(k x / 2) cos(sqrt3 k y / 2) / 4
    std::pair<double, double> amplitudes(const Field& w) const {
        const double m = w.u.mean();
        double a = 0, b = 0, na = 0, nb = 0;
        for (int i = 0; i < d.size(); ++i) {
            const auto c = w.coords(i);
            const double ca = std::cos(cp.k * c[0]), cb = std::cos(cp.k * c[0] / 2) * std::cos(std::sqrt(3.0) * cp.k * c[1] / 2);
            a += (w.u[i] - m) * ca;
            na += ca * ca;
            b += (w.u[i] - m) * cb;
            nb += cb * cb;
        }
        return {a / na / 2, b / nb / 4};
    }

    Field seed(const AmplitudeTriple& t, double sigma) const {
        const ParameterSet p = base.with_sigma(sigma);
        Field w = reconstruct_field(t, lc, d);
        const StateVector h = homogeneous_state(p, 1).state();
        w.u.array() += h.u - lc.base.u;
        w.v.array() += h.v - lc.base.v;
        IntegrationRun run;
        run.initial = w;
        run.t_end = 20000;
        return integrate(run, p).final;
    }
};

enum class Shape { Flat, Stripe, HexHot, HexCold, Bean, Rectangle };

const char* to_string(Shape s) {
    switch (s) {
        case Shape::Flat: return "flat";
        case Shape::Stripe: return "stripe";
        case Shape::HexHot: return "hot_hexagon";
        case Shape::HexCold: return "cold_hexagon";
        case Shape::Bean: return "bean";
        case Shape::Rectangle: return "rectangle";
    }
    return "?";
}

struct Pt {
    double sigma = 0, A = 0, B = 0, u_l1 = 0, v_l1 = 0;
    int n_unstable = 0;
    std::string tag;
};

struct Curve {
    std::string name;
    std::vector<Pt> pts;
};

Shape shape_of(const Pt& p, double phi_u) {
    const double a = std::abs(p.A), b = std::abs(p.B);
    if (std::max(a, b) < 0.02) return Shape::Flat;
    if (b <= 0.05 * a) return Shape::Stripe;
    const double r = (a - b) / (a + b);
    if (std::abs(r) <= 0.05) return p.A * phi_u > 0 ? Shape::HexHot : Shape::HexCold;
    return r > 0 ? Shape::Bean : Shape::Rectangle;
}

Curve summarize(const std::string& name, const Setup2d& S, const std::vector<const Branch*>& parts) {
    // one part is taken as is; with two, the first is walked backwards into the second
    Curve c{name, {}};
    auto add = [&](const BranchPoint& p) {
        const auto [A, B] = S.amplitudes(p.field);
        c.pts.push_back({p.sigma, A, B, p.norms.u.l1, p.norms.v.l1, p.n_unstable, to_string(p.tag)});
    };
    if (parts.size() == 1) {
        for (const auto& p : parts[0]->points) add(p);
        return c;
    }
    for (auto it = parts[0]->points.rbegin(); it != parts[0]->points.rend(); ++it) add(*it);
    for (std::size_t i = 1; i < parts[1]->points.size(); ++i) add(parts[1]->points[i]);
    return c;
}

std::vector<Curve> compute_diagram(const Setup2d& S) {
    ContinuationSettings s;
    s.sigma_min = 0.02;
    s.sigma_max = 0.3;
    s.n_eigs = 16;
    const Continuation c(S.d, S.base, s);
    const double hot = S.phi_u() > 0 ? 0.05 : -0.05;
    auto shape = [&](const BranchPoint& p) {
        const auto [A, B] = S.amplitudes(p.field);
        Pt q;
        q.A = A;
        q.B = B;
        return shape_of(q, S.phi_u());
    };
    std::vector<Curve> out;

    note("stripes");
    const BranchPoint st = c.point_at(S.seed({0.05, 0, 0, PatternTag::Stripe}, 0.10), 0.10, +1);
    // forward runs through the Turing point onto the opposite phase
    const Branch s_up = c.continue_branch(st, +1, 400, [&](const Branch& b) {
        const auto& p = b.points.back();
        return b.points.size() > 20 && S.amplitudes(p.field).first * S.amplitudes(b.points[0].field).first < 0 && p.sigma < 0.118;
    });
    const Branch s_dn = c.continue_branch(st, -1, 200, [](const Branch& b) { return b.points.back().sigma < 0.085; });
    out.push_back(summarize("stripes", S, {&s_dn, &s_up}));

    note("hot hexagons");
    const BranchPoint hh = c.point_at(S.seed({hot, hot, hot, PatternTag::HexagonPlus}, 0.08), 0.08, +1);
    const Branch h_up = c.continue_branch(hh, +1, 400, [&](const Branch& b) {
        return b.points.back().sigma < 0.095 && shape(b.points.back()) == Shape::Stripe;
    });
    const Branch h_dn = c.continue_branch(hh, -1, 200, [](const Branch& b) {
        return b.points.back().sigma < 0.045 && b.points.back().n_unstable > 0;
    });
    out.push_back(summarize("hot_hexagons", S, {&h_dn, &h_up}));

    note("cold hexagons");
    const BranchPoint ch = c.point_at(S.seed({-hot, -hot, -hot, PatternTag::HexagonMinus}, 0.12), 0.12, +1);
    bool seen_rect = false;
    const Branch c_up = c.continue_branch(ch, +1, 500, [&](const Branch& b) {
        const Shape sh = shape(b.points.back());
        seen_rect = seen_rect || sh == Shape::Rectangle;
        return seen_rect && sh == Shape::HexCold && b.points.back().sigma > 0.118;
    });
    const Branch c_dn = c.continue_branch(ch, -1, 200, [](const Branch& b) { return b.points.back().sigma < 0.105; });
    out.push_back(summarize("cold_hexagons", S, {&c_dn, &c_up}));

    // cold beans leave the opposite-phase stripes where those lose stability at large sigma
    note("cold beans");
    int at = -1;
    const double a0 = S.amplitudes(s_up.points[0].field).first;
    for (int i : s_up.indices(PointTag::Bifurcation)) {
        const auto& p = s_up.points[i];
        if (S.amplitudes(p.field).first * a0 < 0 && p.sigma > 0.11 && (at < 0 || p.sigma < s_up.points[at].sigma)) at = i;
    }
    if (at >= 0) {
        const BranchPoint sw = c.switch_branch(s_up.points[at], +1, 1e-3);
        const Branch cb = c.continue_branch(sw, sw.tangent_sigma > 0 ? -1 : 1, 300, [&](const Branch& b) {
            return b.points.back().sigma < 0.105 || (b.points.size() > 10 && shape(b.points.back()) == Shape::Stripe);
        });
        Curve beans = summarize("cold_beans", S, {&cb});
        const BranchPoint& root = s_up.points[at];
        const auto [A, B] = S.amplitudes(root.field);
        beans.pts.insert(beans.pts.begin(), {root.sigma, A, B, root.norms.u.l1, root.norms.v.l1, root.n_unstable, "bifurcation"});
        out.push_back(beans);
    } else {
        out.push_back({"cold_beans", {}});
    }
    return out;
}

void write_diagram(const std::filesystem::path& f, const std::vector<Curve>& curves) {
    std::ofstream os(f);
    os << "curve,sigma,A,B,u_l1,v_l1,n_unstable,tag\n";
    for (const auto& c : curves)
        for (const auto& p : c.pts)
            os << fmt("%s,%.15g,%.15g,%.15g,%.15g,%.15g,%d,%s\n", c.name.c_str(), p.sigma, p.A, p.B, p.u_l1, p.v_l1,
                      p.n_unstable, p.tag.c_str());
}

std::vector<Curve> read_diagram(const std::filesystem::path& f) {
    std::ifstream is(f);
    std::vector<Curve> out;
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::string name, field;
        std::getline(ss, name, ',');
        Pt p;
        std::getline(ss, field, ',');
        p.sigma = std::stod(field);
        std::getline(ss, field, ',');
        p.A = std::stod(field);
        std::getline(ss, field, ',');
        p.B = std::stod(field);
        std::getline(ss, field, ',');
        p.u_l1 = std::stod(field);
        std::getline(ss, field, ',');
        p.v_l1 = std::stod(field);
        std::getline(ss, field, ',');
        p.n_unstable = std::stoi(field);
        std::getline(ss, p.tag, ',');
        if (out.empty() || out.back().name != name) out.push_back({name, {}});
        out.back().pts.push_back(p);
    }
    return out;
}

const Curve& curve(const std::vector<Curve>& cs, const std::string& name) {
    for (const auto& c : cs)
        if (c.name == name) return c;
    throw NotFoundError("no curve " + name);
}

struct Run {
    const Curve* c;
    int first, last;  // inclusive point indices
    Shape shape;
    bool stable;
    double lo, hi;
};

// maximal runs of consecutive points with one shape and one stability verdict
std::vector<Run> runs(const Curve& c, double phi_u) {
    std::vector<Run> out;
    for (int i = 0; i < static_cast<int>(c.pts.size()); ++i) {
        const Shape sh = shape_of(c.pts[i], phi_u);
        const bool st = c.pts[i].n_unstable == 0;
        if (out.empty() || out.back().shape != sh || out.back().stable != st) {
            out.push_back({&c, i, i, sh, st, c.pts[i].sigma, c.pts[i].sigma});
        } else {
            out.back().last = i;
            out.back().lo = std::min(out.back().lo, c.pts[i].sigma);
            out.back().hi = std::max(out.back().hi, c.pts[i].sigma);
        }
    }
    return out;
}

// widest stable run of a shape over all curves
std::optional<Run> stable_range(const std::vector<Curve>& cs, Shape sh, double phi_u) {
    std::optional<Run> best;
    for (const auto& c : cs)
        for (const auto& r : runs(c, phi_u))
            if (r.shape == sh && r.stable && (!best || r.hi - r.lo > best->hi - best->lo)) best = r;
    return best;
}

// maximal runs of one shape regardless of stability, with the shapes on either side
struct Segment {
    int first, last;
    Shape before, after;
};

std::vector<Segment> segments(const Curve& c, Shape sh, double phi_u) {
    std::vector<Segment> out;
    const int n = static_cast<int>(c.pts.size());
    for (int i = 0; i < n;) {
        if (shape_of(c.pts[i], phi_u) != sh) { ++i; continue; }
        int j = i;
        while (j + 1 < n && shape_of(c.pts[j + 1], phi_u) == sh) ++j;
        const Shape before = i > 0 ? shape_of(c.pts[i - 1], phi_u) : sh;
        const Shape after = j + 1 < n ? shape_of(c.pts[j + 1], phi_u) : sh;
        out.push_back({i, j, before, after});
        i = j + 1;
    }
    return out;
}

std::vector<Curve> diagram(const Setup2d& S, const std::filesystem::path& cache, bool recompute) {
    if (!recompute && std::filesystem::exists(cache)) return read_diagram(cache);
    auto cs = compute_diagram(S);
    write_diagram(cache, cs);
    return cs;
}

Verdict bifurcation_diagram(const Setup2d& S, const std::vector<Curve>& cs) {
    const double phi = S.phi_u(), sc = S.cp.sigma;
    Verdict v{true, ""};
    auto fail = [&](const std::string& why) { v.pass = false; v.detail += why + "; "; };

    // branches through the Turing point: smallest amplitude near sigma_c, flanked by the two phases
    for (const char* name : {"stripes", "cold_hexagons"}) {
        const Curve& c = curve(cs, name);
        int best = -1;
        for (int i = 0; i < static_cast<int>(c.pts.size()); ++i)
            if (best < 0 || std::max(std::abs(c.pts[i].A), std::abs(c.pts[i].B)) <
                                std::max(std::abs(c.pts[best].A), std::abs(c.pts[best].B)))
                best = i;
        const Pt& p = c.pts.at(best);
        const double amp = std::max(std::abs(p.A), std::abs(p.B));
        Shape before = Shape::Flat, after = Shape::Flat;
        for (int i = best; i >= 0 && before == Shape::Flat; --i) before = shape_of(c.pts[i], phi);
        for (int i = best; i < static_cast<int>(c.pts.size()) && after == Shape::Flat; ++i) after = shape_of(c.pts[i], phi);
        bool ok = amp < 0.02 && std::abs(p.sigma - sc) < 1e-3;
        if (std::string(name) == "stripes") {
            ok = ok && before == Shape::Stripe && after == Shape::Stripe;
        } else {
            ok = ok && ((before == Shape::HexHot && after == Shape::HexCold) || (before == Shape::HexCold && after == Shape::HexHot));
        }
        v.detail += fmt("%s reach amplitude %.1e at sigma %.5f (sigma_c %.5f) between %s and %s; ", name, amp, p.sigma, sc,
                        to_string(before), to_string(after));
        if (!ok) fail(std::string(name) + " do not branch at the Turing point");
    }

    const auto cold = stable_range(cs, Shape::HexCold, phi), str = stable_range(cs, Shape::Stripe, phi),
               hot = stable_range(cs, Shape::HexHot, phi);
    if (!cold || !str || !hot) {
        fail("missing stable range");
        return v;
    }
    v.detail += fmt("stable: cold hexagons [%.4f, %.4f], stripes [%.4f, %.4f], hot hexagons [%.4f, %.4f]; ", cold->lo,
                    cold->hi, str->lo, str->hi, hot->lo, hot->hi);
    if (!(cold->hi > str->hi && str->hi > hot->hi)) fail("stability onsets out of order");
    if (std::abs(hot->lo - 0.04) > 0.01 || std::abs(hot->hi - 0.10) > 0.01) fail("hot hexagon range off");

    // beans: from stripes to hexagons, no stable point
    auto check_beans = [&](const char* name, Shape hex) {
        const Curve& c = curve(cs, name);
        bool found = false;
        for (const auto& sg : segments(c, Shape::Bean, phi)) {
            if (!((sg.before == Shape::Stripe && sg.after == hex) || (sg.before == hex && sg.after == Shape::Stripe))) continue;
            found = true;
            int stable = 0;
            for (int i = sg.first; i <= sg.last; ++i) stable += c.pts[i].n_unstable == 0;
            v.detail += fmt("%s beans sigma %.4f..%.4f, %d of %d points stable; ", hex == Shape::HexHot ? "hot" : "cold",
                            std::min(c.pts[sg.first].sigma, c.pts[sg.last].sigma),
                            std::max(c.pts[sg.first].sigma, c.pts[sg.last].sigma), stable, sg.last - sg.first + 1);
            if (stable > 0) fail("stable beans");
        }
        if (!found) fail(std::string("no bean connection on ") + name);
    };
    check_beans("hot_hexagons", Shape::HexHot);
    check_beans("cold_beans", Shape::HexCold);

    // rectangles: cold to hot hexagons, stable at both ends, unstable in between
    {
        const Curve& c = curve(cs, "cold_hexagons");
        bool found = false;
        for (const auto& sg : segments(c, Shape::Rectangle, phi)) {
            const bool joins = (sg.before == Shape::HexCold && sg.after == Shape::HexHot) ||
                               (sg.before == Shape::HexHot && sg.after == Shape::HexCold);
            if (!joins) continue;
            found = true;
            // an unstable stretch that ends at a fold belongs to the hexagon branch folding back
            int lo = sg.first, hi = sg.last;
            for (int i = lo; i <= hi && c.pts[i].n_unstable > 0; ++i)
                if (i + 1 <= hi && c.pts[i + 1].tag == "fold") lo = i + 1;
            for (int i = hi; i >= lo && c.pts[i].n_unstable > 0; --i)
                if (i - 1 >= lo && c.pts[i - 1].tag == "fold") hi = i - 1;
            int unstable = 0;
            for (int i = lo + 1; i < hi; ++i) unstable += c.pts[i].n_unstable > 0;
            const bool ends = c.pts[lo].n_unstable == 0 && c.pts[hi].n_unstable == 0;
            v.detail += fmt("rectangles sigma %.4f..%.4f, ends %s, %d unstable inside; ",
                            std::min(c.pts[lo].sigma, c.pts[hi].sigma), std::max(c.pts[lo].sigma, c.pts[hi].sigma),
                            ends ? "stable" : "not stable", unstable);
            if (!ends || unstable == 0) fail("rectangle stability pattern");
        }
        if (!found) fail("no rectangle connection");
    }
    return v;
}

Verdict landau_amplitudes(const Setup2d& S, const std::vector<Curve>& cs) {
    const double phi = S.phi_u(), sc = S.cp.sigma;
    struct Tally {
        int n = 0, bad = 0;
        double worst = 0.0, first_miss = std::numeric_limits<double>::infinity();
    };
    Tally st, hs, hl; // stripes, small hexagons, large hexagons
    auto compare = [](Tally& t, double pde, double landau, double ds) {
        const double rel = std::abs(pde - landau) / std::abs(landau);
        t.worst = std::max(t.worst, rel);
        ++t.n;
        t.bad += rel > 0.10;
        if (rel > 0.10) t.first_miss = std::min(t.first_miss, ds);
    };
    for (const auto& c : cs) {
        // the hexagon fold above sigma_c separates the small root from the large one
        double a_fold = std::numeric_limits<double>::infinity();
        for (const auto& p : c.pts)
            if (p.tag == "fold" && p.sigma > sc) a_fold = std::min(a_fold, std::abs(p.A / phi));
        for (const auto& p : c.pts) {
            const double ds = std::abs(p.sigma - sc);
            if (ds > 0.002) continue;
            const Shape sh = shape_of(p, phi);
            const auto lc = onset_coefficients(S.base, S.cp, 1, p.sigma);
            if (sh == Shape::Stripe) {
                try {
                    compare(st, std::abs(p.A / phi), stripe_amplitudes(lc).first, ds);
                } catch (const NoSolutionError&) {
                    ++st.n, ++st.bad, st.first_miss = std::min(st.first_miss, ds);
                }
            } else if (sh == Shape::HexHot || sh == Shape::HexCold) {
                const double a = p.A / phi;
                const bool large = std::abs(a) > a_fold;
                Tally& t = large ? hl : hs;
                try {
                    const auto [hp, hm] = hexagon_amplitudes(lc);
                    compare(t, a, large ? hm : hp, ds);
                } catch (const NoSolutionError&) {
                    ++t.n, ++t.bad, t.first_miss = std::min(t.first_miss, ds);
                }
            }
        }
    }
    const auto pr = hexagon_amplitudes(onset_coefficients(S.base, S.cp, 1, sc - 0.001, LandauMode::Classical, QuarticVariant::AsPrinted));
    const auto cj = hexagon_amplitudes(onset_coefficients(S.base, S.cp, 1, sc - 0.001, LandauMode::Classical, QuarticVariant::Conjugated));
    auto line = [](const char* name, const Tally& t) {
        return fmt("%s: %d points, %d beyond 10%%, worst %.1f%%, nearest miss at |sigma-sigma_c| %.1e; ", name,
                   t.n, t.bad, 100 * t.worst, t.first_miss);
    };
    Verdict v;
    v.pass = st.n > 0 && hs.n > 0 && st.bad == 0 && hs.bad == 0 && hl.bad == 0;
    v.detail = line("stripes", st) + line("small hexagons", hs) + line("large hexagons", hl) +
               fmt("hexagon roots of both quartic variants agree to %.1e",
                   std::max(std::abs(pr.first - cj.first), std::abs(pr.second - cj.second)));
    return v;
}

// linear interpolation of a norm along a run at sigma
std::pair<double, double> norms_at(const Run& r, double sigma) {
    const auto& P = r.c->pts;
    for (int i = r.first; i < r.last; ++i) {
        const double a = P[i].sigma, b = P[i + 1].sigma;
        if ((sigma - a) * (sigma - b) <= 0 && a != b) {
            const double t = (sigma - a) / (b - a);
            return {P[i].u_l1 + t * (P[i + 1].u_l1 - P[i].u_l1), P[i].v_l1 + t * (P[i + 1].v_l1 - P[i].v_l1)};
        }
    }
    throw NotFoundError("sigma outside run");
}

Verdict exchange_monotonicity(const Setup2d& S, const std::vector<Curve>& cs) {
    const double phi = S.phi_u();
    const auto cold = stable_range(cs, Shape::HexCold, phi), str = stable_range(cs, Shape::Stripe, phi),
               hot = stable_range(cs, Shape::HexHot, phi);
    if (!cold || !str || !hot) return {false, "missing stable range"};
    Verdict v{true, ""};
    // descending sigma: stripes take over from cold hexagons, hot hexagons from stripes
    auto pair = [&](const Run& old_r, const Run& new_r, const char* o, const char* n) {
        const double lo = std::max(old_r.lo, new_r.lo), hi = std::min(old_r.hi, new_r.hi);
        if (!(lo < hi)) {
            v.pass = false;
            v.detail += fmt("%s/%s: no bistable range; ", o, n);
            return;
        }
        const double mid = 0.5 * (lo + hi);
        const auto [ou, ov] = norms_at(old_r, mid);
        const auto [nu, nv] = norms_at(new_r, mid);
        const bool ok = nu < ou && nv > ov;
        v.pass = v.pass && ok;
        v.detail += fmt("%s->%s at %.4f: |u|1 %.4f->%.4f, |v|1 %.4f->%.4f%s; ", o, n, mid, ou, nu, ov, nv, ok ? "" : " (!)");
    };
    pair(*cold, *str, "cold hexagons", "stripes");
    pair(*str, *hot, "stripes", "hot hexagons");
    return v;
}

// ---------------------------------------------------------------- 10: transverse stability

Verdict transverse(const Setup2d& S) {
    ContinuationSettings s;
    s.sigma_min = 0.02;
    s.n_eigs = 16;
    const Continuation c(S.d, S.base, s);
    const double hot = S.phi_u() > 0 ? 0.05 : -0.05;
    const double delta = S.base.delta();

    // max transverse growth rate over kz > 0
    auto growth = [&](const BranchPoint& p, double lz, int count) {
        const auto kz = transverse_wavenumbers(lz, count);
        const std::vector<double> positive(kz.begin() + 1, kz.end());
        TransverseSample top{0.0, -INFINITY};
        for (const auto& t : transverse_spectrum(jacobian(p.field, S.base.with_sigma(p.sigma)), delta, positive, s.spectrum))
            if (t.max_real > top.max_real) top = t;
        return top;
    };
    // stable part of a branch through the seed, sampled every dsig in sigma
    auto stable_points = [&](const BranchPoint& seed, double dsig) {
        std::vector<BranchPoint> out;
        for (int dir : {-1, +1}) {
            const Branch b = c.continue_branch(seed, dir, 300, [](const Branch& br) { return br.points.back().n_unstable > 0; });
            double last = NAN;
            for (const auto& p : b.points) {
                if (p.n_unstable > 0) break;
                if (std::isnan(last) || std::abs(p.sigma - last) >= dsig) {
                    out.push_back(p);
                    last = p.sigma;
                }
            }
        }
        std::sort(out.begin(), out.end(), [](const BranchPoint& a, const BranchPoint& b) { return a.sigma < b.sigma; });
        return out;
    };

    Verdict v{true, ""};
    // lz = 200: kz up to about 1.5 k_c
    const int count200 = static_cast<int>(std::ceil(1.5 * S.cp.k * 400 / pi)) + 1;
    for (auto [name, t, sig] : {std::tuple{"cold hexagons", AmplitudeTriple{-hot, -hot, -hot, PatternTag::HexagonMinus}, 0.12},
                                std::tuple{"stripes", AmplitudeTriple{0.05, 0, 0, PatternTag::Stripe}, 0.10}}) {
        note(name);
        const auto pts = stable_points(c.point_at(S.seed(t, sig), sig, +1), 0.002);
        TransverseSample worst{0.0, -INFINITY};
        double at = NAN;
        int unstable = 0;
        for (const auto& p : pts) {
            const auto g = growth(p, 200.0, count200);
            unstable += g.max_real > s.unstable_tol;
            if (g.max_real > worst.max_real) worst = g, at = p.sigma;
        }
        const bool ok = !pts.empty() && unstable == 0;
        v.pass = v.pass && ok;
        v.detail += fmt("%s: %zu points on [%.4f, %.4f], %d transversely unstable, max Re %.2e at sigma %.4f kz/k_c %.3f; ",
                        name, pts.size(), pts.empty() ? NAN : pts.front().sigma, pts.empty() ? NAN : pts.back().sigma,
                        unstable, worst.max_real, at, worst.kz / S.cp.k);
    }
    // lz = 10: onset of transverse instability of hot hexagons in descending sigma
    note("hot hexagons");
    const int count10 = static_cast<int>(std::ceil(1.5 * S.cp.k * 20 / pi)) + 1;
    const auto pts = stable_points(c.point_at(S.seed({hot, hot, hot, PatternTag::HexagonPlus}, 0.08), 0.08, +1), 0.001);
    double onset = NAN;
    for (int i = static_cast<int>(pts.size()) - 1; i >= 0; --i) {
        if (growth(pts[i], 10.0, count10).max_real > s.unstable_tol) {
            onset = i + 1 < static_cast<int>(pts.size()) ? 0.5 * (pts[i].sigma + pts[i + 1].sigma) : pts[i].sigma;
            break;
        }
    }
    const bool ok = !std::isnan(onset) && std::abs(onset - 0.06) <= 0.01;
    v.pass = v.pass && ok;
    v.detail += fmt("hot hexagons (lz=10) turn transversely unstable at sigma %.4f", onset);
    return v;
}

// ---------------------------------------------------------------- 11: layering

Verdict layering() {
    const ParameterSet p = ParameterSet::standard(0.1, 0.25);
    const double kc = right_onset(p).k, wl = 2 * pi / kc;
    const double lx = 4 * wl, ly = 800.0;
    const Domain d = Domain::rect(0.0, lx, nodes_for(lx, kc), 0.0, ly, nodes_for(ly, kc));
    Field f = Field::uniform(d, {1.0, 1.0});
    f.sigma = sigma_profile(d);
    IntegrationRun run;
    run.initial = perturb(f, 0.01, 42);
    run.t_end = 30000;
    const Trajectory tr = integrate(run, p);
    const auto strips = classify_strips(tr.final, wl);
    std::string labels;
    for (const auto& s : strips) labels += to_string(s.label)[0] == 's' && s.label != StripLabel::Stripes ? 'o' : to_string(s.label)[0];
    // transitions between spots (o) and stripes (s), as y of the strip boundary
    std::vector<std::pair<double, std::string>> changes;
    const double h = ly / strips.size();
    for (std::size_t i = 1; i < strips.size(); ++i) {
        const char a = labels[i - 1], b = labels[i];
        if ((a == 'o' && b == 's') || (a == 's' && b == 'o')) changes.push_back({i * h, std::string{a} + b});
    }
    auto inside = [&](const std::string& kind, double lo, double hi) {
        for (const auto& [y, k] : changes)
            if (k == kind && y >= lo - h && y <= hi + h) return y;
        return std::numeric_limits<double>::quiet_NaN();
    };
    const double first = inside("os", 265, 296), second = inside("so", 380, 418);
    Verdict v;
    v.pass = tr.quiescent && !std::isnan(first) && !std::isnan(second);
    v.detail = fmt("t=%.0f %s (window change %.2e); strips %s; spots->stripes at y=%.0f, stripes->spots at y=%.0f", tr.t,
                   tr.quiescent ? "quiescent" : "not quiescent", tr.last_change, labels.c_str(), first, second);
    return v;
}

// ---------------------------------------------------------------- 12: numerics hygiene

Verdict hygiene() {
    Verdict v{true, ""};
    const ParameterSet p = ParameterSet::standard(0.1, 0.25);

    // Jacobian against central differences on a random 2D field with a sigma profile
    {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> uni(0.5, 2.0), dir(-1.0, 1.0);
        const Domain d = Domain::rect(0.0, 30.0, 12, 0.0, 20.0, 9);
        Field w = Field::uniform(d, {0.0, 0.0});
        for (int i = 0; i < d.size(); ++i) w.u[i] = uni(rng), w.v[i] = uni(rng);
        w.sigma = sigma_profile(d, 0.128, 0.05, 10.0);
        const Discretization disc(d);
        const SparseOperator J = disc.jacobian(w, p);
        double worst = 0.0;
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd e(2 * d.size());
            for (auto& x : e) x = dir(rng);
            const double hstep = 1e-6;
            const Eigen::VectorXd z = w.stacked();
            const Eigen::VectorXd fd = (disc.residual(Field::from_stacked(d, z + hstep * e, w.sigma), p) -
                                        disc.residual(Field::from_stacked(d, z - hstep * e, w.sigma), p)) / (2 * hstep);
            worst = std::max(worst, (fd - J * e).norm() / (J * e).norm());
        }
        v.pass = v.pass && worst < 1e-6;
        v.detail += fmt("Jacobian vs differences %.1e; ", worst);
    }
    // Laplacian rows sum to zero
    {
        double worst = 0.0;
        for (const Domain& d : {Domain::line(0.0, 7.0, 23), Domain::rect(0.0, 30.0, 17, -3.0, 11.0, 13)}) {
            const SparseOperator L = assemble_laplacian(d);
            const Eigen::VectorXd rows = L * Eigen::VectorXd::Ones(L.cols());
            const double scale = L.coeffs().abs().maxCoeff();
            worst = std::max(worst, rows.cwiseAbs().maxCoeff() / scale);
        }
        const bool ok = worst <= 4 * std::numeric_limits<double>::epsilon();
        v.pass = v.pass && ok;
        v.detail += fmt("Laplacian row sums %.1e of the largest entry; ", worst);
    }
    // converged residuals and fold invariance on the homogeneous branch through its fold
    auto through_fold = [&](double ds_max) {
        const ParameterSet q = ParameterSet::standard(0.1, 0.2);
        const Domain d = Domain::line(0.0, 10.0, 3);
        ContinuationSettings s;
        s.ds_max = ds_max;
        s.locate_bifurcations = false;
        const Continuation c(d, q, s);
        const BranchPoint start = c.point_at(homogeneous_field(d, q), q.sigma, -1);
        return c.continue_branch(start, +1, 2000, [](const Branch& b) { return !b.indices(PointTag::Fold).empty(); });
    };
    {
        const Branch a = through_fold(0.01), b = through_fold(0.005);
        double res = 0.0;
        for (const auto& pt : a.points) res = std::max(res, pt.residual);
        const auto fa = a.indices(PointTag::Fold), fb = b.indices(PointTag::Fold);
        const double shift = fa.empty() || fb.empty() ? INFINITY : std::abs(a.points[fa[0]].sigma - b.points[fb[0]].sigma);
        v.pass = v.pass && res < 1e-8 && shift < 1e-6;
        v.detail += fmt("max Newton residual %.1e; fold shift under halved ds_max %.1e; ", res, shift);
    }
    // byte-identical reruns: branch CSV, spectrum and a time integration
    {
        auto once = [&] {
            std::ostringstream os;
            const Domain d = Domain::line(0.0, 4 * 2 * pi / 0.1929, 65);
            ContinuationSettings s;
            const Continuation c(d, p, s);
            const BranchPoint start = c.point_at(homogeneous_field(d, p.with_sigma(0.13)), 0.13, -1);
            write_branch_csv(os, c.continue_branch(start, +1, 40));
            const Domain d2 = Domain::rect(0.0, 60.0, 33, 0.0, 60.0, 33);
            IntegrationRun run;
            run.initial = perturb(Field::uniform(d2, homogeneous_state(p, 1).state()), 0.01, 3);
            run.t_end = 200;
            write_field(os, integrate(run, p).final);
            return os.str();
        };
        const bool same = once() == once();
        v.pass = v.pass && same;
        v.detail += same ? "reruns byte-identical" : "reruns differ";
    }
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::vector<int> which;
    std::string cache = "diagram_2d.csv";
    bool recompute = false;
    app.add_option("criteria", which, "criterion numbers 1-12 (default: all)")->check(CLI::Range(1, 12));
    app.add_option("--cache", cache, "2D branch summary shared by criteria 7-9");
    app.add_flag("--recompute", recompute, "ignore an existing 2D cache");
    CLI11_PARSE(app, argc, argv);
    if (which.empty())
        for (int i = 1; i <= 12; ++i) which.push_back(i);

    std::optional<Setup2d> S;
    std::optional<std::vector<Curve>> cs;
    auto two_d = [&]() -> const Setup2d& { if (!S) S.emplace(); return *S; };
    auto curves = [&](bool fresh) -> const std::vector<Curve>& {
        if (!cs) cs = diagram(two_d(), cache, fresh);
        return *cs;
    };

    bool all = true;
    for (int n : which) {
        Verdict v;
        try {
            switch (n) {
                case 1: v = cubic_constants(); break;
                case 2: v = critical_values(); break;
                case 3: v = plane_topology(); break;
                case 4: v = landau_signs(); break;
                case 5: v = wavelength_selection(); break;
                case 6: v = snaking(); break;
                case 7: v = bifurcation_diagram(two_d(), curves(recompute)); break;
                case 8: v = landau_amplitudes(two_d(), curves(recompute)); break;
                case 9: v = exchange_monotonicity(two_d(), curves(recompute)); break;
                case 10: v = transverse(two_d()); break;
                case 11: v = layering(); break;
                case 12: v = hygiene(); break;
            }
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        all = all && v.pass;
        std::cout << "criterion " << n << ": " << (v.pass ? "PASS" : "FAIL") << "  " << v.detail << std::endl;
    }
    return all ? 0 : 1;
}
