#ifndef BENTHIC_HOMOGENEOUS_HPP
#define BENTHIC_HOMOGENEOUS_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include "benthic/errors.hpp"
#include "benthic/kinetics.hpp"
#include "benthic/parameters.hpp"

namespace benthic {

/// Coefficients of u^3 + b u^2 + c u + d = 0, whose roots are the homogeneous
/// bacteria densities, split into their gamma/sigma dependence.
struct CubicCoefficients {
    double b_g, b_s, b_0;
    double c_g, c_s, c_sg, c_0;
    double d_s, d_0;
    double b, c, d;

    double p() const noexcept { return c - b * b / 3.0; }
    double q() const noexcept { return 2.0 * b * b * b / 27.0 + d - b * c / 3.0; }
    double evaluate(double u) const noexcept { return ((u + b) * u + c) * u + d; }
};

inline CubicCoefficients cubic_coefficients(const ParameterSet& p) {
    if (std::abs(p.m - 1.0) < 1e-14) throw SingularParameterError("cubic coefficients are singular at m = 1");
    if (!(p.sigma > 0.0)) throw SingularParameterError("cubic coefficients need sigma > 0");
    const double k = p.k, v0 = p.v0, e = p.eps, m = p.m;
    const double mm = m * (m - 1.0);
    CubicCoefficients cc{};
    cc.b_g = -k / (m - 1.0);
    cc.b_s = (v0 - v0 * m - m) / mm;
    cc.b_0 = (m * m * k + e - 2.0 * m * e) / mm;
    cc.c_g = e * k / mm;
    cc.c_s = (v0 + 1.0) * (e - m * k) / mm;
    cc.c_sg = v0 * k / mm;
    cc.c_0 = (-2.0 * m * e * k + e * e) / mm;
    cc.d_s = e * k * (v0 + 1.0) / mm;
    cc.d_0 = e * e * k / mm;
    cc.b = cc.b_g * p.gamma + cc.b_s * p.sigma + cc.b_0;
    cc.c = cc.c_g * p.gamma + cc.c_s * p.sigma + cc.c_sg * p.sigma * p.gamma + cc.c_0;
    cc.d = cc.d_s * p.sigma + cc.d_0;
    return cc;
}

/// Nutrient level on the line g + h = 0: v = v0 - (m u - eps)/sigma.
inline double nutrient_from_bacteria(double u, const ParameterSet& p) noexcept {
    return p.v0 - (p.m * u - p.eps) / p.sigma;
}

enum class Stability { Stable, TuringUnstable, SpaceIndependentUnstable, NotReal, NotPositive, Indeterminate };

inline const char* to_string(Stability s) {
    switch (s) {
        case Stability::Stable: return "stable";
        case Stability::TuringUnstable: return "turing";
        case Stability::SpaceIndependentUnstable: return "siu";
        case Stability::NotReal: return "complex";
        case Stability::NotPositive: return "nonpositive";
        case Stability::Indeterminate: return "indeterminate";
    }
    return "?";
}

/// Stability verdict together with the diagnostics b1..b4 it was derived from.
struct StabilityClass {
    Stability kind = Stability::NotReal;
    double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;
};

struct HomogeneousState {
    int index = 1;  // 1: bacteria-rich, 3: bacteria-poor (when all three roots are real)
    double u = 0.0;
    double v = 0.0;
    bool is_real = false;
    bool is_positive = false;
    StabilityClass stability;

    StateVector state() const noexcept { return {u, v}; }
};

namespace detail {

constexpr double kArccosClamp = 1e-12;
constexpr double kIndeterminateTol = 1e-10;

inline double polish_cubic_root(const CubicCoefficients& cc, double u) {
    for (int it = 0; it < 8; ++it) {
        const double f = cc.evaluate(u);
        const double df = (3.0 * u + 2.0 * cc.b) * u + cc.c;
        if (df == 0.0) break;
        const double step = f / df;
        u -= step;
        if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(u))) break;
    }
    return u;
}

/// -(4p^3 + 27q^2): positive for three distinct real roots, negative for one.
inline double cubic_discriminant(const CubicCoefficients& cc) {
    const double p = cc.p(), q = cc.q();
    return -(4.0 * p * p * p + 27.0 * q * q);
}

/// Trigonometric roots u_1 >= u_2 >= u_3; only meaningful when p < 0 and the discriminant is >= 0.
inline std::array<double, 3> trig_roots(const CubicCoefficients& cc) {
    const double pi = std::numbers::pi;
    const double p = cc.p(), q = cc.q();
    double arg = -q / 2.0 * std::sqrt(-27.0 / (p * p * p));
    if (arg > 1.0 && arg < 1.0 + kArccosClamp) arg = 1.0;
    if (arg < -1.0 && arg > -1.0 - kArccosClamp) arg = -1.0;
    const double amp = std::sqrt(-4.0 * p / 3.0);
    const double th = std::acos(arg) / 3.0;
    const double shift = cc.b / 3.0;
    return {amp * std::cos(th) - shift, -amp * std::cos(th + pi / 3.0) - shift, -amp * std::cos(th - pi / 3.0) - shift};
}

/// The real root and the complex pair when the discriminant is negative (Cardano).
inline std::array<std::complex<double>, 3> single_real_root(const CubicCoefficients& cc) {
    const double p = cc.p(), q = cc.q();
    const double rad = std::sqrt(std::max(0.0, q * q / 4.0 + p * p * p / 27.0));
    double r = std::cbrt(-q / 2.0 + rad) + std::cbrt(-q / 2.0 - rad) - cc.b / 3.0;
    r = polish_cubic_root(cc, r);
    // deflate: u^2 + (b + r) u + (c + (b + r) r)
    const double b1 = cc.b + r, c1 = cc.c + b1 * r;
    const std::complex<double> sq = std::sqrt(std::complex<double>(b1 * b1 / 4.0 - c1, 0.0));
    return {r, -b1 / 2.0 + sq, -b1 / 2.0 - sq};
}

using Poly = std::vector<double>;  // ascending powers of sigma

inline Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

inline Poly poly_axpy(double alpha, const Poly& x, const Poly& y) {
    Poly out(std::max(x.size(), y.size()), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
    for (std::size_t i = 0; i < y.size(); ++i) out[i] += y[i];
    return out;
}

/// Positive sigma at which two homogeneous roots merge for fixed gamma: zeros of the
/// cubic discriminant, a degree-6 polynomial in sigma.
inline std::vector<double> fold_sigmas(const ParameterSet& base) {
    const CubicCoefficients cc = cubic_coefficients(base.with_sigma(1.0));
    const double g = base.gamma;
    const Poly b{cc.b_g * g + cc.b_0, cc.b_s};
    const Poly c{cc.c_g * g + cc.c_0, cc.c_s + cc.c_sg * g};
    const Poly d{cc.d_0, cc.d_s};
    const Poly p = poly_axpy(-1.0 / 3.0, poly_mul(b, b), c);
    const Poly bb = poly_mul(b, b);
    const Poly q = poly_axpy(-1.0 / 3.0, poly_mul(b, c), poly_axpy(2.0 / 27.0, poly_mul(bb, b), d));
    Poly disc = poly_axpy(4.0, poly_mul(poly_mul(p, p), p), poly_axpy(27.0, poly_mul(q, q), Poly{0.0}));
    double scale = 0.0;
    for (double x : disc) scale = std::max(scale, std::abs(x));
    while (disc.size() > 1 && std::abs(disc.back()) <= 1e-14 * scale) disc.pop_back();
    std::vector<double> out;
    if (disc.size() < 2) return out;
    Eigen::VectorXd coeffs = Eigen::Map<const Eigen::VectorXd>(disc.data(), static_cast<Eigen::Index>(disc.size()));
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
        const auto z = solver.roots()[i];
        if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z)) && z.real() > 0.0) out.push_back(z.real());
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Label (1 or 3) of the lone real root at base.sigma: the label of the simple root
/// at the nearest fold in sigma, which is the root it continues into. Defaults to 1.
inline int lone_root_index(const ParameterSet& base) {
    const auto folds = fold_sigmas(base);
    if (folds.empty()) return 1;
    double nearest = folds.front();
    for (double f : folds) {
        if (std::abs(f - base.sigma) < std::abs(nearest - base.sigma)) nearest = f;
    }
    const CubicCoefficients cc = cubic_coefficients(base.with_sigma(nearest));
    const double p = cc.p(), q = cc.q();
    if (std::abs(p) < 1e-12) return 1;  // triple root at the cusp
    // double root -3q/(2p), simple root 3q/p
    return q / p > 0.0 ? 1 : 3;
}

}  // namespace detail

/// Applies the three sign conditions on b1..b4 to a real state. Positivity is not
/// part of the verdict; it is reported separately on HomogeneousState.
inline StabilityClass classify_stability(const HomogeneousState& s, const ParameterSet& p) {
    StabilityClass out;
    if (!s.is_real) {
        out.kind = Stability::NotReal;
        return out;
    }
    const Eigen::Matrix2d J = DerivativeTensor(s.state(), p).jacobian();
    const double gu = J(0, 0), gv = J(0, 1), hu = J(1, 0), hv = J(1, 1);
    const double delta = p.delta();
    out.b1 = -gu - hv;
    out.b2 = gu * hv - gv * hu;
    out.b3 = delta * gu + hv;
    out.b4 = out.b3 * out.b3 - 4.0 * delta * out.b2;
    const double tol = detail::kIndeterminateTol;
    if (std::abs(out.b1) < tol || std::abs(out.b2) < tol || std::abs(out.b3) < tol || std::abs(out.b4) < tol) {
        out.kind = Stability::Indeterminate;
    } else if (out.b1 < 0.0 || out.b2 < 0.0) {
        out.kind = Stability::SpaceIndependentUnstable;
    } else if (out.b3 > 0.0 && out.b4 > 0.0) {
        out.kind = Stability::TuringUnstable;
    } else {
        out.kind = Stability::Stable;
    }
    return out;
}

/// All three roots. With three real roots they are labelled 1..3 by descending u; a lone
/// real root keeps the label of the root it connects to through the nearest fold in sigma.
/// Non-real roots carry the real part of their value and is_real = false.
inline std::array<HomogeneousState, 3> all_homogeneous_roots(const ParameterSet& p) {
    const CubicCoefficients cc = cubic_coefficients(p);
    const double disc = detail::cubic_discriminant(cc);
    const bool three_real = cc.p() < 0.0 && disc >= 0.0;
    std::array<HomogeneousState, 3> out;
    if (three_real) {
        const auto z = detail::trig_roots(cc);
        for (int i = 0; i < 3; ++i) {
            out[i].u = detail::polish_cubic_root(cc, z[i]);
            out[i].is_real = true;
        }
    } else {
        const auto z = detail::single_real_root(cc);
        const int lone = detail::lone_root_index(p) - 1;
        int other = 0;
        for (int i = 0; i < 3; ++i) {
            if (i == lone) {
                out[i].u = z[0].real();
                out[i].is_real = true;
            } else {
                out[i].u = z[1 + other++].real();
            }
        }
    }
    const double scale = std::max({1.0, std::abs(cc.b), std::abs(cc.c), std::abs(cc.d)});
    const bool double_root = std::abs(disc) < 1e-12 * std::pow(scale, 6);
    for (int i = 0; i < 3; ++i) {
        HomogeneousState& s = out[i];
        s.index = i + 1;
        s.v = nutrient_from_bacteria(s.u, p);
        s.is_positive = s.is_real && s.u > 0.0 && s.v > 0.0;
        if (!s.is_real) {
            s.stability.kind = Stability::NotReal;
        } else if (s.u <= -0.5 * p.k || s.v <= -0.5) {
            s.stability.kind = Stability::NotPositive;  // outside the kinetics domain, cannot be linearized
        } else {
            s.stability = classify_stability(s, p);
            if (double_root) s.stability.kind = Stability::Indeterminate;
        }
    }
    return out;
}

/// Real homogeneous steady states (one or three), ordered by index.
inline std::vector<HomogeneousState> homogeneous_states(const ParameterSet& p) {
    std::vector<HomogeneousState> out;
    for (const auto& s : all_homogeneous_roots(p)) {
        if (s.is_real) out.push_back(s);
    }
    return out;
}

/// Real root with the given index; throws NotFoundError if it is complex.
inline HomogeneousState homogeneous_state(const ParameterSet& p, int index) {
    if (index < 1 || index > 3) throw NotFoundError("root index must be 1, 2 or 3");
    const auto roots = all_homogeneous_roots(p);
    const auto& s = roots[index - 1];
    if (!s.is_real) {
        throw NotFoundError("homogeneous root " + std::to_string(index) + " is not real at sigma = " +
                            std::to_string(p.sigma) + ", gamma = " + std::to_string(p.gamma));
    }
    return s;
}

/// Linear operator of one Fourier mode: J_f - diag(1, delta) k^2.
inline Eigen::Matrix2d mode_operator(const Eigen::Matrix2d& J, double delta, double k) {
    Eigen::Matrix2d L = J;
    L(0, 0) -= k * k;
    L(1, 1) -= delta * k * k;
    return L;
}

struct DispersionSample {
    double k = 0.0;
    std::complex<double> mu_plus;
    std::complex<double> mu_minus;
};

inline DispersionSample dispersion(const Eigen::Matrix2d& J, double delta, double k) {
    const Eigen::Matrix2d L = mode_operator(J, delta, k);
    const double half_tr = 0.5 * L.trace();
    const std::complex<double> root = std::sqrt(std::complex<double>(half_tr * half_tr - L.determinant(), 0.0));
    return {k, half_tr + root, half_tr - root};
}

inline DispersionSample dispersion(const HomogeneousState& s, const ParameterSet& p, double k) {
    if (!s.is_real) throw DomainError("dispersion relation needs a real homogeneous state");
    if (k < 0.0) throw DomainError("wavenumber must be non-negative");
    return dispersion(DerivativeTensor(s.state(), p).jacobian(), p.delta(), k);
}

/// det(J_f - D k^2) as a function of k.
inline double mode_determinant(const Eigen::Matrix2d& J, double delta, double k) {
    return mode_operator(J, delta, k).determinant();
}

/// Positive zeros k_- <= k_+ of det(J_f - D k^2).
inline std::pair<double, double> neutral_wavenumbers(const Eigen::Matrix2d& J, double delta) {
    const double gu = J(0, 0), gv = J(0, 1), hu = J(1, 0), hv = J(1, 1);
    const double mid = (delta * gu + hv) / (2.0 * delta);
    const double rad = mid * mid + (gv * hu - gu * hv) / delta;
    if (rad < 0.0) throw NoSolutionError("no neutral wavenumber: complex radicand");
    const double sq = std::sqrt(rad);
    const double km2 = mid - sq, kp2 = mid + sq;
    if (km2 < 0.0) throw NoSolutionError("no neutral wavenumber: k_-^2 < 0");
    return {std::sqrt(km2), std::sqrt(kp2)};
}

inline std::pair<double, double> neutral_wavenumbers(const HomogeneousState& s, const ParameterSet& p) {
    if (!s.is_real) throw DomainError("neutral wavenumbers need a real homogeneous state");
    return neutral_wavenumbers(DerivativeTensor(s.state(), p).jacobian(), p.delta());
}

struct CriticalPoint {
    double sigma = 0.0;
    double k = 0.0;
};

namespace detail {

/// b4 of root `index` at sigma, or nullopt where that root is not real.
inline std::optional<StabilityClass> diagnostics_at(const ParameterSet& base, double sigma, int index) {
    const ParameterSet p = base.with_sigma(sigma);
    const auto roots = all_homogeneous_roots(p);
    const auto& s = roots[index - 1];
    if (!s.is_real || s.u <= -0.5 * p.k || s.v <= -0.5) return std::nullopt;
    return classify_stability(s, p);
}

}  // namespace detail

/// Turing bifurcation point of root `index` inside [sigma_lo, sigma_hi]: the sigma at which
/// det(J_f - D k^2) acquires a double zero, i.e. b4 = 0 with b3 > 0, and k_c^2 = b3/(2 delta).
inline CriticalPoint critical_point(const ParameterSet& base, double sigma_lo, double sigma_hi, int index = 1) {
    if (!(sigma_lo < sigma_hi) || sigma_lo <= 0.0) throw NotFoundError("invalid sigma bracket");
    auto lo = detail::diagnostics_at(base, sigma_lo, index);
    auto hi = detail::diagnostics_at(base, sigma_hi, index);
    if (!lo || !hi) throw NotFoundError("homogeneous root is not real at the bracket ends");
    if ((lo->b4 > 0.0) == (hi->b4 > 0.0)) throw NotFoundError("no sign change of b4 in the sigma bracket");
    double a = sigma_lo, b = sigma_hi;
    const bool a_positive = lo->b4 > 0.0;
    for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
        const double mid = 0.5 * (a + b);
        auto dm = detail::diagnostics_at(base, mid, index);
        if (!dm) throw NotFoundError("homogeneous root turns complex inside the sigma bracket");
        if ((dm->b4 > 0.0) == a_positive) {
            a = mid;
        } else {
            b = mid;
        }
    }
    const double sc = 0.5 * (a + b);
    const auto d = detail::diagnostics_at(base, sc, index);
    if (!d || d->b3 <= 0.0) throw NotFoundError("b4 vanishes with b3 <= 0: not a Turing point");
    return {sc, std::sqrt(d->b3 / (2.0 * base.delta()))};
}

/// All Turing bifurcation points of root `index` on a sigma interval, found by
/// sampling b4 on `samples` points and refining every sign change.
inline std::vector<CriticalPoint> critical_points(const ParameterSet& base, double sigma_lo, double sigma_hi,
                                                  int index = 1, int samples = 400) {
    std::vector<CriticalPoint> out;
    std::optional<StabilityClass> prev;
    double prev_sigma = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const double s = sigma_lo + (sigma_hi - sigma_lo) * i / samples;
        auto cur = detail::diagnostics_at(base, s, index);
        if (cur && prev && (cur->b4 > 0.0) != (prev->b4 > 0.0)) {
            try {
                out.push_back(critical_point(base, prev_sigma, s, index));
            } catch (const NotFoundError&) {
                // b4 changed sign with b3 < 0: not a Turing point
            }
        }
        prev = cur;
        prev_sigma = s;
    }
    return out;
}

/// Evenly spaced, cell-centred sample points of an open interval.
struct ScanAxis {
    double lo = 0.0;
    double hi = 1.0;
    int n = 1;

    double at(int i) const noexcept { return lo + (hi - lo) * (i + 0.5) / n; }
};

struct ScanCell {
    double sigma = 0.0;
    double gamma = 0.0;
    std::array<HomogeneousState, 3> roots;
};

/// Row-major raster over (gamma rows, sigma columns).
struct ScanRaster {
    ScanAxis sigma;
    ScanAxis gamma;
    std::vector<ScanCell> cells;

    const ScanCell& at(int sigma_index, int gamma_index) const { return cells.at(gamma_index * sigma.n + sigma_index); }
};

inline ScanCell scan_cell(const ParameterSet& base, double sigma, double gamma) {
    ParameterSet p = base;
    p.sigma = sigma;
    p.gamma = gamma;
    return {sigma, gamma, all_homogeneous_roots(p)};
}

enum class ScanOrder { RowMajor, ColumnMajor };

inline ScanRaster plane_scan(const ScanAxis& sigma, const ScanAxis& gamma, const ParameterSet& base = {},
                             ScanOrder order = ScanOrder::RowMajor) {
    if (sigma.n < 1 || gamma.n < 1 || !(sigma.hi > sigma.lo) || !(gamma.hi > gamma.lo) || sigma.lo < 0.0 ||
        gamma.lo < 0.0) {
        throw DomainError("scan ranges must be positive and non-empty");
    }
    ScanRaster r{sigma, gamma, std::vector<ScanCell>(static_cast<std::size_t>(sigma.n) * gamma.n)};
    auto fill = [&](int i, int j) { r.cells[static_cast<std::size_t>(j) * sigma.n + i] = scan_cell(base, sigma.at(i), gamma.at(j)); };
    if (order == ScanOrder::RowMajor) {
        for (int j = 0; j < gamma.n; ++j)
            for (int i = 0; i < sigma.n; ++i) fill(i, j);
    } else {
        for (int i = 0; i < sigma.n; ++i)
            for (int j = 0; j < gamma.n; ++j) fill(i, j);
    }
    return r;
}

/// Label written to the raster CSV: reality first, then positivity, then stability.
inline const char* scan_label(const HomogeneousState& s) {
    if (!s.is_real) return to_string(Stability::NotReal);
    if (!s.is_positive) return to_string(Stability::NotPositive);
    return to_string(s.stability.kind);
}

/// Writes `sigma,gamma,root_index,u,v,class`, one line per real root of every cell.
inline void write_scan_csv(std::ostream& os, const ScanRaster& r) {
    os << "sigma,gamma,root_index,u,v,class\n";
    char buf[160];
    for (const auto& cell : r.cells) {
        for (const auto& s : cell.roots) {
            if (!s.is_real) continue;
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%d,%.12g,%.12g,%s\n", cell.sigma, cell.gamma, s.index, s.u, s.v,
                          scan_label(s));
            os << buf;
        }
    }
}

}  // namespace benthic

#endif
