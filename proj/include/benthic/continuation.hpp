#ifndef BENTHIC_CONTINUATION_HPP
#define BENTHIC_CONTINUATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "benthic/errors.hpp"
#include "benthic/homogeneous.hpp"
#include "benthic/pde.hpp"
#include "benthic/spectrum.hpp"

namespace benthic {

struct ContinuationSettings {
    double ds = 1e-3;
    double ds_min = 1e-6;
    double ds_max = 0.01;
    double newton_tol = 1e-8;
    int max_newton = 10;
    int max_steps = 500;
    double sigma_min = 1e-3;
    double sigma_max = 0.3;
    int n_eigs = 8;
    double unstable_tol = 1e-10;  // Re lambda above this counts as unstable
    double crossing_tol = 1e-8;   // |Re lambda| at a located bifurcation
    double fold_tol = 1e-10;      // |d sigma / ds| at a located fold
    bool locate_folds = true;
    bool locate_bifurcations = true;
    SpectrumOptions spectrum;
};

enum class PointTag { Regular, Fold, Bifurcation };

inline const char* to_string(PointTag t) {
    switch (t) {
        case PointTag::Regular: return "regular";
        case PointTag::Fold: return "fold";
        case PointTag::Bifurcation: return "bifurcation";
    }
    return "?";
}

inline PointTag parse_tag(const std::string& s) {
    if (s == "regular") return PointTag::Regular;
    if (s == "fold") return PointTag::Fold;
    if (s == "bifurcation") return PointTag::Bifurcation;
    throw MismatchError("unknown point tag '" + s + "'");
}

struct BranchPoint {
    double sigma = 0.0;
    Field field;
    FieldNorms norms;
    int n_unstable = 0;
    PointTag tag = PointTag::Regular;
    std::vector<std::complex<double>> eigenvalues;
    Eigen::VectorXd tangent;     // field part of the unit tangent (scaled inner product)
    double tangent_sigma = 0.0;  // parameter part
    double ds = 0.0;             // step proposed for the next point
    double residual = 0.0;
    Eigen::MatrixXd kernel;      // crossing eigenvectors at a bifurcation
};

struct Branch {
    std::string label;
    std::string parent;
    int parent_index = -1;
    int sign = 0;
    std::vector<BranchPoint> points;
    std::string end_reason;

    std::vector<int> indices(PointTag t) const {
        std::vector<int> out;
        for (int i = 0; i < static_cast<int>(points.size()); ++i)
            if (points[i].tag == t) out.push_back(i);
        return out;
    }
};

struct NewtonResult {
    Field field;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
};

/// RMS distance between two fields on one domain.
inline double rms_distance(const Field& a, const Field& b) {
    const double n = static_cast<double>(a.u.size());
    return std::sqrt(((a.u - b.u).squaredNorm() + (a.v - b.v).squaredNorm()) / n);
}

/// Path follower in sigma for one domain and fixed remaining parameters.
/// Unknowns X = (z, sigma) with <a, b> = a_z . b_z / N + a_sigma b_sigma, N = grid nodes.
class Continuation {
public:
    Continuation(const Domain& d, const ParameterSet& p, ContinuationSettings s = {})
        : disc_(d), p_(p), s_(std::move(s)) {}

    const Discretization& discretization() const noexcept { return disc_; }
    const ParameterSet& parameters() const noexcept { return p_; }
    const ContinuationSettings& settings() const noexcept { return s_; }
    ContinuationSettings& settings() noexcept { return s_; }

    /// Damped Newton on the residual at fixed sigma.
    NewtonResult newton(const Field& guess, double sigma, std::optional<double> tol = {},
                        std::optional<int> max_iter = {}) const {
        const double eps = tol.value_or(s_.newton_tol);
        const int iters = max_iter.value_or(s_.max_newton);
        const ParameterSet p = p_.with_sigma(sigma);
        guess.check();
        NewtonResult r{guess, 0, INFINITY, false};
        Eigen::VectorXd F;
        if (!try_residual(r.field, p, F)) return r;
        r.residual = F.lpNorm<Eigen::Infinity>();
        Eigen::SparseLU<SparseOperator> lu;
        while (r.residual >= eps && r.iterations < iters) {
            lu.compute(disc_.jacobian(r.field, p));
            if (lu.info() != Eigen::Success) return r;
            const Eigen::VectorXd step = lu.solve(F);
            if (!step.allFinite()) return r;
            ++r.iterations;
            bool moved = false;
            for (double lam = 1.0; lam > 1.0 / 64; lam *= 0.5) {
                Field trial = Field::from_stacked(disc_.domain(), r.field.stacked() - lam * step);
                Eigen::VectorXd Ft;
                if (!try_residual(trial, p, Ft)) continue;
                const double rt = Ft.lpNorm<Eigen::Infinity>();
                if (rt < r.residual || lam == 1.0 / 32) {
                    r.field = std::move(trial);
                    F = std::move(Ft);
                    r.residual = rt;
                    moved = true;
                    break;
                }
            }
            if (!moved) return r;
        }
        r.converged = r.residual < eps;
        return r;
    }

    /// Converged point at fixed sigma with spectrum and a unit tangent oriented so that
    /// sigma increases along it for direction = +1 (decreases for -1).
    BranchPoint point_at(const Field& guess, double sigma, int direction = +1) const {
        const NewtonResult nr = newton(guess, sigma);
        if (!nr.converged) {
            throw ConvergenceError("Newton did not converge at sigma = " + std::to_string(sigma) +
                                   " (residual " + std::to_string(nr.residual) + ")");
        }
        BranchPoint bp;
        bp.sigma = sigma;
        bp.field = nr.field;
        bp.residual = nr.residual;
        bp.ds = s_.ds;
        const Eigen::VectorXd ref_z = Eigen::VectorXd::Zero(2 * disc_.domain().size());
        const auto t = tangent(bp.field.stacked(), sigma, ref_z, direction >= 0 ? 1.0 : -1.0);
        if (!t) throw DegenerateError("no tangent at the start point (singular bordered system)");
        bp.tangent = t->first;
        bp.tangent_sigma = t->second;
        decorate(bp);
        return bp;
    }

    /// Pseudo-arclength continuation from `start` along direction * start tangent.
    Branch continue_branch(const BranchPoint& start, int direction = +1, std::optional<int> n_steps = {},
                           const std::function<bool(const Branch&)>& stop = {}) const {
        if (start.tangent.size() != 2 * disc_.domain().size()) throw MismatchError("start point has no tangent");
        Branch b;
        BranchPoint first = start;
        if (direction < 0) {
            first.tangent = -first.tangent;
            first.tangent_sigma = -first.tangent_sigma;
        }
        if (first.ds <= 0.0) first.ds = s_.ds;
        b.points.push_back(first);
        const int steps = n_steps.value_or(s_.max_steps);
        for (int k = 0; k < steps; ++k) {
            const BranchPoint& cur = b.points.back();
            std::optional<BranchPoint> next;
            double ds = std::clamp(cur.ds, s_.ds_min, s_.ds_max);
            int iters = 0;
            while (true) {
                next = step(cur, ds, &iters);
                if (next) {
                    decorate(*next);
                    // split steps across which several eigenvalues cross at once
                    // and fold steps hiding a second crossing besides the fold eigenvalue
                    const bool turned = cur.tangent_sigma * next->tangent_sigma < 0.0;
                    const int jump = std::abs(next->n_unstable - cur.n_unstable);
                    if ((turned ? jump == 1 : jump <= 1) || ds < 4 * s_.ds_min) break;
                }
                ds *= 0.5;
                if (ds < s_.ds_min) {
                    b.end_reason = "no convergence at ds_min";
                    return b;
                }
            }
            if (next->sigma < s_.sigma_min || next->sigma > s_.sigma_max) {
                b.end_reason = "sigma left [" + std::to_string(s_.sigma_min) + ", " + std::to_string(s_.sigma_max) + "]";
                return b;
            }
            double grown = ds;
            if (iters <= 2) grown = ds * 1.5;
            if (iters >= 5) grown = ds * 0.6;
            next->ds = std::clamp(grown, s_.ds_min, s_.ds_max);

            const BranchPoint prev = b.points.back();
            const bool fold = s_.locate_folds && prev.tangent_sigma * next->tangent_sigma < 0.0;
            if (fold) {
                if (auto f = locate_fold(prev, ds, *next)) b.points.push_back(std::move(*f));
            } else if (s_.locate_bifurcations && prev.n_unstable != next->n_unstable) {
                if (auto bif = locate_bifurcation(prev, ds, *next)) b.points.push_back(std::move(*bif));
            }
            b.points.push_back(std::move(*next));
            if (stop && stop(b)) {
                b.end_reason = "stop condition";
                return b;
            }
        }
        b.end_reason = "step limit";
        return b;
    }

    /// New branch from a bifurcation point: predictor bif + sign * amplitude * phi (phi of unit
    /// RMS), corrected on the hyperplane orthogonal to phi with sigma free. Retries with doubled
    /// amplitude (up to 3 times) when the corrector falls back onto the parent.
    BranchPoint switch_branch(const BranchPoint& bif, int sign, double amplitude,
                              std::optional<Eigen::VectorXd> direction = {}) const {
        const int n = disc_.domain().size();
        Eigen::VectorXd phi;
        if (direction) {
            phi = *direction;
        } else {
            if (bif.kernel.cols() == 0) throw DegenerateError("point carries no crossing eigenvector");
            phi = bif.kernel.col(0);
        }
        if (phi.size() != 2 * n) throw MismatchError("switch direction does not match the domain");
        phi /= std::sqrt(phi.squaredNorm() / n);
        const Eigen::VectorXd zb = bif.field.stacked();
        double amp = amplitude;
        for (int attempt = 0; attempt <= 3; ++attempt, amp *= 2.0) {
            const Eigen::VectorXd zp = zb + (sign >= 0 ? amp : -amp) * phi;
            const auto c = correct(zp, bif.sigma, phi, 0.0);
            if (!c) continue;
            const Eigen::VectorXd dz = c->first - zb;
            if (std::sqrt(dz.squaredNorm() / n) <= 0.5 * amp) continue;
            BranchPoint bp;
            bp.sigma = c->second;
            bp.field = Field::from_stacked(disc_.domain(), c->first);
            bp.residual = residual_norm(bp.field, bp.sigma);
            bp.ds = s_.ds;
            const auto t = tangent(c->first, c->second, dz, c->second - bif.sigma);
            if (!t) continue;
            bp.tangent = t->first;
            bp.tangent_sigma = t->second;
            decorate(bp);
            return bp;
        }
        throw ConvergenceError("branch switch fell back onto the parent branch");
    }

    double residual_norm(const Field& w, double sigma) const {
        return disc_.residual(w, p_.with_sigma(sigma)).lpNorm<Eigen::Infinity>();
    }

    Spectrum spectrum(const Field& w, double sigma) const {
        SpectrumOptions o = s_.spectrum;
        o.nev = s_.n_eigs;
        return leading_spectrum(disc_.jacobian(w, p_.with_sigma(sigma)), o);
    }

private:
    bool try_residual(const Field& w, const ParameterSet& p, Eigen::VectorXd& F) const {
        try {
            F = disc_.residual(w, p);
        } catch (const DomainError&) {
            return false;
        }
        return F.allFinite();
    }

    double dot(const Eigen::VectorXd& az, double as, const Eigen::VectorXd& bz, double bs) const {
        return az.dot(bz) / disc_.domain().size() + as * bs;
    }

    SparseOperator bordered(const Field& w, double sigma, const Eigen::VectorXd& cz, double cs) const {
        const ParameterSet p = p_.with_sigma(sigma);
        const SparseOperator J = disc_.jacobian(w, p);
        const Eigen::VectorXd Fs = disc_.sigma_derivative(w, p);
        const int m = static_cast<int>(J.rows());
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(J.nonZeros() + 2 * m + 1));
        for (int k = 0; k < J.outerSize(); ++k)
            for (SparseOperator::InnerIterator it(J, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
        const double wn = 1.0 / disc_.domain().size();
        for (int i = 0; i < m; ++i) {
            if (Fs[i] != 0.0) t.emplace_back(i, m, Fs[i]);
            if (cz[i] != 0.0) t.emplace_back(m, i, cz[i] * wn);
        }
        t.emplace_back(m, m, cs);
        SparseOperator A(m + 1, m + 1);
        A.setFromTriplets(t.begin(), t.end());
        A.makeCompressed();
        return A;
    }

    /// Newton on F(z, sigma) = 0, <c, X - Xp> = 0.
    std::optional<std::pair<Eigen::VectorXd, double>> correct(const Eigen::VectorXd& zp, double sp,
                                                               const Eigen::VectorXd& cz, double cs,
                                                               int* iterations = nullptr) const {
        const Domain& d = disc_.domain();
        const int m = 2 * d.size();
        Eigen::VectorXd z = zp;
        double sg = sp;
        Eigen::SparseLU<SparseOperator> lu;
        for (int it = 0; it <= s_.max_newton; ++it) {
            if (!(sg > 0.0)) return std::nullopt;
            const Field w = Field::from_stacked(d, z);
            Eigen::VectorXd F;
            if (!try_residual(w, p_.with_sigma(sg), F)) return std::nullopt;
            const double g = dot(cz, cs, z - zp, sg - sp);
            if (F.lpNorm<Eigen::Infinity>() < s_.newton_tol && std::abs(g) < 1e-12) {
                if (iterations) *iterations = it;
                return std::make_pair(z, sg);
            }
            if (it == s_.max_newton) break;
            lu.compute(bordered(w, sg, cz, cs));
            if (lu.info() != Eigen::Success) return std::nullopt;
            Eigen::VectorXd rhs(m + 1);
            rhs << F, g;
            const Eigen::VectorXd dx = lu.solve(rhs);
            if (!dx.allFinite()) return std::nullopt;
            z -= dx.head(m);
            sg -= dx[m];
        }
        return std::nullopt;
    }

    /// Unit tangent at X, oriented to have positive product with the reference direction.
    std::optional<std::pair<Eigen::VectorXd, double>> tangent(const Eigen::VectorXd& z, double sigma,
                                                               const Eigen::VectorXd& rz, double rs) const {
        const Domain& d = disc_.domain();
        const int m = 2 * d.size();
        Eigen::SparseLU<SparseOperator> lu;
        lu.compute(bordered(Field::from_stacked(d, z), sigma, rz, rs));
        if (lu.info() != Eigen::Success) return std::nullopt;
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m + 1);
        e[m] = 1.0;
        Eigen::VectorXd t = lu.solve(e);
        if (!t.allFinite()) return std::nullopt;
        Eigen::VectorXd tz = t.head(m);
        double ts = t[m];
        const double nrm = std::sqrt(dot(tz, ts, tz, ts));
        tz /= nrm;
        ts /= nrm;
        if (dot(tz, ts, rz, rs) < 0.0) {
            tz = -tz;
            ts = -ts;
        }
        return std::make_pair(tz, ts);
    }

    /// Corrected point at arclength ds from `from` along its tangent.
    std::optional<BranchPoint> step(const BranchPoint& from, double ds, int* iterations = nullptr) const {
        const Eigen::VectorXd z0 = from.field.stacked();
        const Eigen::VectorXd zp = z0 + ds * from.tangent;
        const double sp = from.sigma + ds * from.tangent_sigma;
        const auto c = correct(zp, sp, from.tangent, from.tangent_sigma, iterations);
        if (!c) return std::nullopt;
        const auto t = tangent(c->first, c->second, from.tangent, from.tangent_sigma);
        if (!t) return std::nullopt;
        // reject steps that turn the tangent by more than ~60 degrees
        if (dot(t->first, t->second, from.tangent, from.tangent_sigma) < 0.5) return std::nullopt;
        BranchPoint bp;
        bp.sigma = c->second;
        bp.field = Field::from_stacked(disc_.domain(), c->first);
        bp.residual = residual_norm(bp.field, bp.sigma);
        bp.tangent = t->first;
        bp.tangent_sigma = t->second;
        bp.ds = ds;
        return bp;
    }

    void decorate(BranchPoint& bp) const {
        bp.norms = norms(bp.field);
        const Spectrum sp = spectrum(bp.field, bp.sigma);
        bp.eigenvalues = sp.values;
        bp.n_unstable = sp.n_unstable(s_.unstable_tol);
    }

    /// Regula falsi (Illinois) in arclength on the sigma component of the tangent.
    std::optional<BranchPoint> locate_fold(const BranchPoint& left, double ds, const BranchPoint& right) const {
        double a = 0.0, b = ds, fa = left.tangent_sigma, fb = right.tangent_sigma;
        std::optional<BranchPoint> best;
        int side = 0;
        for (int it = 0; it < 80; ++it) {
            double s = (a * fb - b * fa) / (fb - fa);
            if (!(s > a && s < b)) s = 0.5 * (a + b);
            auto p = step(left, s);
            if (!p) {
                s = 0.5 * (a + b);
                p = step(left, s);
                if (!p) break;
            }
            const double fs = p->tangent_sigma;
            if (!best || std::abs(fs) < std::abs(best->tangent_sigma)) best = std::move(p);
            if (std::abs(fs) < s_.fold_tol || b - a < 1e-15) break;
            if ((fs > 0) == (fa > 0)) {
                a = s;
                fa = fs;
                if (side == -1) fb *= 0.5;
                side = -1;
            } else {
                b = s;
                fb = fs;
                if (side == +1) fa *= 0.5;
                side = +1;
            }
        }
        if (!best) return std::nullopt;
        best->tag = PointTag::Fold;
        best->ds = left.ds;
        decorate(*best);
        return best;
    }

    /// Bisection in arclength on the unstable count, accelerated by regula falsi on the signed
    /// distance of the eigenvalue nearest zero; stops once |Re lambda| < crossing_tol.
    std::optional<BranchPoint> locate_bifurcation(const BranchPoint& left, double ds, const BranchPoint& right) const {
        const int n_left = left.n_unstable;
        SpectrumOptions o = s_.spectrum;
        auto probe = [&](const BranchPoint& p, Spectrum* near) {
            const SparseOperator J = disc_.jacobian(p.field, p_.with_sigma(p.sigma));
            *near = spectrum_near(J, 0.0, 4, o);
            const double re = std::abs(near->values.front().real());
            return p.n_unstable == n_left ? -re : re;
        };
        Spectrum near;
        double a = 0.0, b = ds;
        double fa = probe(left, &near), fb = probe(right, &near);
        std::optional<BranchPoint> best;
        Spectrum best_near;
        double best_f = INFINITY;
        int side = 0;
        for (int it = 0; it < 100; ++it) {
            double s = (fb != fa) ? (a * fb - b * fa) / (fb - fa) : 0.5 * (a + b);
            if (!(s > a && s < b)) s = 0.5 * (a + b);
            auto p = step(left, s);
            if (!p) {
                // the bordered system is singular exactly at a branch point; back off
                s = 0.5 * (a + b);
                p = step(left, s);
                if (!p) break;
            }
            decorate(*p);
            const double fs = probe(*p, &near);
            if (!best || std::abs(fs) < std::abs(best_f)) {
                best = std::move(p);
                best_near = near;
                best_f = fs;
            }
            if (std::abs(fs) < s_.crossing_tol || b - a < 1e-14) break;
            if (fs < 0) {
                a = s;
                fa = fs;
                if (side == -1) fb *= 0.5;
                side = -1;
            } else {
                b = s;
                fb = fs;
                if (side == +1) fa *= 0.5;
                side = +1;
            }
        }
        if (!best) return std::nullopt;
        best->tag = PointTag::Bifurcation;
        best->ds = left.ds;
        // kernel: eigenvectors whose eigenvalues cross, i.e. within a small band of zero
        const int jump = std::max(1, std::abs(right.n_unstable - n_left));
        const int m = std::min<int>(jump, static_cast<int>(best_near.values.size()));
        best->kernel.resize(2 * disc_.domain().size(), m);
        for (int j = 0; j < m; ++j) {
            Eigen::VectorXd v = best_near.vectors.col(j).real();
            if (v.norm() < 1e-8) v = best_near.vectors.col(j).imag();
            best->kernel.col(j) = v / v.norm();
        }
        return best;
    }

    Discretization disc_;
    ParameterSet p_;
    ContinuationSettings s_;
};

/// Branch CSV: idx,sigma,u_l1,u_l2,u_l8,v_l1,v_l2,v_l8,n_unstable,tag.
inline void write_branch_csv(std::ostream& os, const Branch& b) {
    os << "idx,sigma,u_l1,u_l2,u_l8,v_l1,v_l2,v_l8,n_unstable,tag\n";
    char buf[256];
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        const BranchPoint& p = b.points[i];
        std::snprintf(buf, sizeof buf, "%zu,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,%d,%s\n", i, p.sigma, p.norms.u.l1,
                      p.norms.u.l2, p.norms.u.l8, p.norms.v.l1, p.norms.v.l2, p.norms.v.l8, p.n_unstable,
                      to_string(p.tag));
        os << buf;
    }
}

/// Snapshot of one point: `<stem>.field`, `<stem>.tangent` (tangent in field format) and
/// `<stem>.meta` (sigma, tangent_sigma, ds, n_unstable, tag). Enough to restart a branch.
inline void write_snapshot(const std::filesystem::path& stem, const BranchPoint& p) {
    auto open = [](const std::filesystem::path& f) {
        std::ofstream os(f);
        if (!os) throw Error("cannot write " + f.string());
        return os;
    };
    {
        auto os = open(stem.string() + ".field");
        write_field(os, p.field);
    }
    {
        auto os = open(stem.string() + ".tangent");
        write_field(os, Field::from_stacked(p.field.domain, p.tangent));
    }
    auto os = open(stem.string() + ".meta");
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g", p.sigma);
    os << "sigma = " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", p.tangent_sigma);
    os << "tangent_sigma = " << buf << '\n';
    std::snprintf(buf, sizeof buf, "%.17g", p.ds);
    os << "ds = " << buf << '\n';
    os << "n_unstable = " << p.n_unstable << '\n' << "tag = " << to_string(p.tag) << '\n';
}

/// Reads a snapshot written by write_snapshot. Norms and spectrum are recomputed by the caller.
inline BranchPoint read_snapshot(const std::filesystem::path& stem) {
    auto open = [](const std::filesystem::path& f) {
        std::ifstream is(f);
        if (!is) throw Error("cannot read " + f.string());
        return is;
    };
    BranchPoint p;
    {
        auto is = open(stem.string() + ".field");
        p.field = read_field(is);
    }
    {
        auto is = open(stem.string() + ".tangent");
        const Field t = read_field(is);
        if (!(t.domain == p.field.domain)) throw MismatchError("snapshot tangent lives on another domain");
        p.tangent = t.stacked();
    }
    auto is = open(stem.string() + ".meta");
    std::map<std::string, std::string> kv;
    for (std::string line; std::getline(is, line);) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t\r") + 1);
            return s;
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    for (const char* key : {"sigma", "tangent_sigma", "ds", "n_unstable", "tag"})
        if (!kv.count(key)) throw MismatchError(std::string("snapshot meta lacks '") + key + "'");
    p.sigma = std::stod(kv["sigma"]);
    p.tangent_sigma = std::stod(kv["tangent_sigma"]);
    p.ds = std::stod(kv["ds"]);
    p.n_unstable = std::stoi(kv["n_unstable"]);
    p.tag = parse_tag(kv["tag"]);
    p.norms = norms(p.field);
    return p;
}

/// Uniform field at homogeneous root `root_index` for the sigma of p.
inline Field homogeneous_field(const Domain& d, const ParameterSet& p, int root_index = 1) {
    return Field::uniform(d, homogeneous_state(p, root_index).state());
}

}  // namespace benthic

#endif
