#ifndef BENTHIC_TIMESTEP_HPP
#define BENTHIC_TIMESTEP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <fftw3.h>

#include "benthic/errors.hpp"
#include "benthic/kinetics.hpp"
#include "benthic/pde.hpp"

namespace benthic {

struct IntegrationRun {
    Field initial;
    double dt = 0.1;
    double t_end = 1000.0;
    std::vector<double> snapshot_times;
    double quiescence_tol = 1e-7;
    double window = 100.0;  // quiescence is tested over this many time units
    bool stop_when_quiescent = true;

    void validate() const {
        initial.check();
        if (!(dt > 0.0) || !(t_end >= dt)) throw DomainError("integration needs dt > 0 and t_end >= dt");
        if (!(window >= dt)) throw DomainError("quiescence window must be at least one step");
        if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) {
            throw DomainError("snapshot times must be sorted");
        }
    }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Field> snapshots;
    Field final;
    double t = 0.0;
    long steps = 0;
    bool quiescent = false;
    double last_change = INFINITY;  // relative L2 change over the last complete window
};

/// Implicit-diffusion, explicit-kinetics Euler step. The Neumann three-point Laplacian is
/// diagonal in the DCT-I basis, so each implicit solve is two transforms and a division.
class ImexStepper {
public:
    ImexStepper(const Domain& d, const ParameterSet& p, double dt) : d_(d), p_(p), dt_(dt) {
        d.validate();
        const int n = d.size();
        buf_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
        if (!buf_) throw Error("cannot allocate transform buffer");
        if (d.dim == 1) {
            plan_.reset(fftw_plan_r2r_1d(d.nx(), buf_.get(), buf_.get(), FFTW_REDFT00, FFTW_ESTIMATE));
        } else {
            plan_.reset(
                fftw_plan_r2r_2d(d.ny(), d.nx(), buf_.get(), buf_.get(), FFTW_REDFT00, FFTW_REDFT00, FFTW_ESTIMATE));
        }
        if (!plan_) throw Error("cannot create DCT plan");
        lambda_.resize(n);
        auto symbol = [](const Axis& a, int j) {
            const double s = std::sin(std::numbers::pi * j / (2.0 * (a.n - 1)));
            return -4.0 / (a.h() * a.h()) * s * s;
        };
        double norm = 2.0 * (d.nx() - 1);
        if (d.dim == 2) norm *= 2.0 * (d.ny() - 1);
        for (int iy = 0; iy < d.ny(); ++iy)
            for (int ix = 0; ix < d.nx(); ++ix)
                lambda_[d.index(ix, iy)] = symbol(d.x, ix) + (d.dim == 2 ? symbol(d.y, iy) : 0.0);
        scale_u_ = (1.0 / (1.0 - dt * lambda_.array()) / norm).matrix();
        scale_v_ = (1.0 / (1.0 - dt * p.delta() * lambda_.array()) / norm).matrix();
    }

    /// Eigenvalue of the discrete Laplacian for the DCT mode stored at node index i.
    double laplacian_symbol(int i) const { return lambda_[i]; }

    /// w <- (I - dt D Lap)^{-1} (w + dt f(w)); throws DomainError where the kinetics are undefined.
    void step(Field& w) const {
        const int n = d_.size();
        ParameterSet q = p_;
        for (int i = 0; i < n; ++i) {
            q.sigma = w.sigma_at(i, p_);
            const StateVector f = reaction({w.u[i], w.v[i]}, q);
            w.u[i] += dt_ * f.u;
            w.v[i] += dt_ * f.v;
        }
        solve(w.u, scale_u_);
        solve(w.v, scale_v_);
    }

private:
    void solve(Eigen::VectorXd& x, const Eigen::VectorXd& scale) const {
        const int n = d_.size();
        std::copy(x.data(), x.data() + n, buf_.get());
        fftw_execute(plan_.get());
        for (int i = 0; i < n; ++i) buf_.get()[i] *= scale[i];
        fftw_execute(plan_.get());
        std::copy(buf_.get(), buf_.get() + n, x.data());
    }

    struct PlanFree {
        void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
    };
    struct BufFree {
        void operator()(double* p) const { fftw_free(p); }
    };

    Domain d_;
    ParameterSet p_;
    double dt_;
    std::unique_ptr<double, BufFree> buf_;
    std::unique_ptr<fftw_plan_s, PlanFree> plan_;
    Eigen::VectorXd lambda_, scale_u_, scale_v_;
};

/// Integrates from run.initial until t_end, or until quiescent when stop_when_quiescent.
/// The observer, if given, sees the field after every step.
inline Trajectory integrate(const IntegrationRun& run, const ParameterSet& p,
                            const std::function<void(double, const Field&)>& observer = {}) {
    run.validate();
    const ImexStepper stepper(run.initial.domain, p, run.dt);
    Trajectory tr;
    Field w = run.initial;
    const long total = std::lround(run.t_end / run.dt);
    const long per_window = std::max(1L, std::lround(run.window / run.dt));
    std::size_t next_snap = 0;
    auto take_snapshots = [&](long k) {
        while (next_snap < run.snapshot_times.size() && std::lround(run.snapshot_times[next_snap] / run.dt) <= k) {
            tr.times.push_back(k * run.dt);
            tr.snapshots.push_back(w);
            ++next_snap;
        }
    };
    take_snapshots(0);
    Eigen::VectorXd mark = w.stacked();
    for (long k = 1; k <= total; ++k) {
        try {
            stepper.step(w);
        } catch (const DomainError& e) {
            throw InstabilityError(std::string("integration left the kinetics domain at t = ") +
                                   std::to_string(k * run.dt) + ": " + e.what(),
                                   k * run.dt);
        }
        if (!w.u.allFinite() || !w.v.allFinite()) {
            throw InstabilityError("non-finite values at t = " + std::to_string(k * run.dt), k * run.dt);
        }
        tr.steps = k;
        tr.t = k * run.dt;
        if (observer) observer(tr.t, w);
        take_snapshots(k);
        if (k % per_window == 0) {
            const Eigen::VectorXd z = w.stacked();
            tr.last_change = (z - mark).norm() / z.norm();
            mark = z;
            tr.quiescent = tr.last_change < run.quiescence_tol;
            if (tr.quiescent && run.stop_when_quiescent) break;
        }
    }
    tr.final = std::move(w);
    return tr;
}

/// Adds seeded uniform noise in [-amplitude, amplitude] to both components.
inline Field perturb(const Field& base, double amplitude, std::uint64_t seed) {
    if (!(amplitude >= 0.0)) throw DomainError("perturbation amplitude must be non-negative");
    Field w = base;
    if (amplitude == 0.0) return w;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-amplitude, amplitude);
    for (Eigen::Index i = 0; i < w.u.size(); ++i) w.u[i] += uni(rng);
    for (Eigen::Index i = 0; i < w.v.size(); ++i) w.v[i] += uni(rng);
    return w;
}

enum class StripLabel { Homogeneous, Stripes, SpotsHot, SpotsCold, Mixed };

inline const char* to_string(StripLabel l) {
    switch (l) {
        case StripLabel::Homogeneous: return "homogeneous";
        case StripLabel::Stripes: return "stripes";
        case StripLabel::SpotsHot: return "spots_hot";
        case StripLabel::SpotsCold: return "spots_cold";
        case StripLabel::Mixed: return "mixed";
    }
    return "?";
}

struct StripThresholds {
    double dominance = 3.0;     // anisotropy ratio at or above which the strip is stripes
    double skewness = 0.1;      // |skew u| needed to call spots hot or cold
    double homogeneous = 1e-2;  // std(u) / |mean u| below which the strip is homogeneous
};

struct StripSummary {
    int index = 0;
    double y_center = 0.0;
    StripLabel label = StripLabel::Mixed;
    double anisotropy = 0.0;
    double skewness = 0.0;
    double contrast = 0.0;
};

/// Per horizontal strip: the second-moment tensor of the power spectrum of u, sum |u_k|^2 k k^T,
/// evaluated through Parseval as the mean of grad u grad u^T. One dominant wave-vector pair
/// makes it strongly anisotropic (stripes); a hexagonal triad makes it isotropic (spots).
inline std::vector<StripSummary> classify_strips(const Field& w, double strip_height,
                                                 const StripThresholds& th = {}) {
    w.check();
    const Domain& d = w.domain;
    if (d.dim != 2) throw MismatchError("strip classification needs a 2D field");
    if (!(strip_height > 0.0)) throw DomainError("strip height must be positive");
    const int count = std::max(1, static_cast<int>(std::lround(d.y.length() / strip_height)));
    const double h = d.y.length() / count;
    std::vector<std::vector<int>> rows(count);
    for (int iy = 0; iy < d.ny(); ++iy) {
        const int s = std::min(count - 1, static_cast<int>((d.y.at(iy) - d.y.lo) / h));
        rows[s].push_back(iy);
    }
    auto at = [&](int ix, int iy) { return w.u[d.index(ix, iy)]; };
    auto grad = [&](int ix, int iy) {
        // one-sided at the walls
        const int xl = std::max(ix - 1, 0), xr = std::min(ix + 1, d.nx() - 1);
        const int yl = std::max(iy - 1, 0), yr = std::min(iy + 1, d.ny() - 1);
        return Eigen::Vector2d((at(xr, iy) - at(xl, iy)) / ((xr - xl) * d.x.h()),
                               (at(ix, yr) - at(ix, yl)) / ((yr - yl) * d.y.h()));
    };
    std::vector<StripSummary> out;
    for (int s = 0; s < count; ++s) {
        StripSummary sm;
        sm.index = s;
        sm.y_center = d.y.lo + (s + 0.5) * h;
        if (rows[s].empty()) {
            out.push_back(sm);
            continue;
        }
        double sum = 0.0;
        long n = 0;
        for (int iy : rows[s])
            for (int ix = 0; ix < d.nx(); ++ix, ++n) sum += at(ix, iy);
        const double mean = sum / n;
        double m2 = 0.0, m3 = 0.0;
        Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
        for (int iy : rows[s]) {
            for (int ix = 0; ix < d.nx(); ++ix) {
                const double e = at(ix, iy) - mean;
                m2 += e * e;
                m3 += e * e * e;
                const Eigen::Vector2d g = grad(ix, iy);
                M += g * g.transpose();
            }
        }
        m2 /= n;
        m3 /= n;
        const double sd = std::sqrt(m2);
        sm.contrast = std::abs(mean) > 0.0 ? sd / std::abs(mean) : sd;
        sm.skewness = sd > 0.0 ? m3 / (sd * sd * sd) : 0.0;
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(M).eigenvalues();
        sm.anisotropy = ev[0] > 0.0 ? ev[1] / ev[0] : INFINITY;
        if (sm.contrast < th.homogeneous) {
            sm.label = StripLabel::Homogeneous;
        } else if (sm.anisotropy >= th.dominance) {
            sm.label = StripLabel::Stripes;
        } else if (sm.skewness > th.skewness) {
            sm.label = StripLabel::SpotsHot;
        } else if (sm.skewness < -th.skewness) {
            sm.label = StripLabel::SpotsCold;
        } else {
            sm.label = StripLabel::Mixed;
        }
        out.push_back(sm);
    }
    return out;
}

/// `strip_index,y_center,label`.
inline void write_layering_csv(std::ostream& os, const std::vector<StripSummary>& strips) {
    os << "strip_index,y_center,label\n";
    char buf[64];
    for (const auto& s : strips) {
        std::snprintf(buf, sizeof buf, "%.10g", s.y_center);
        os << s.index << ',' << buf << ',' << to_string(s.label) << '\n';
    }
}

}  // namespace benthic

#endif
