#ifndef BENTHIC_LANDAU_HPP
#define BENTHIC_LANDAU_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include "benthic/errors.hpp"
#include "benthic/homogeneous.hpp"
#include "benthic/kinetics.hpp"
#include "benthic/pde.hpp"

namespace benthic {

using cplx = std::complex<double>;

/// Wave vectors k1 = k(1,0), k2 = k/2(-1,sqrt3), k3 = k/2(-1,-sqrt3).
struct HexLattice {
    double k = 0.0;

    std::array<Eigen::Vector2d, 3> vectors() const {
        const double s3 = std::sqrt(3.0);
        return {Eigen::Vector2d(k, 0.0), Eigen::Vector2d(-0.5 * k, 0.5 * s3 * k),
                Eigen::Vector2d(-0.5 * k, -0.5 * s3 * k)};
    }
};

/// <a, b> = sum a_i conj(b_i).
inline cplx inner(const Eigen::Vector2cd& a, const Eigen::Vector2cd& b) { return b.dot(a); }

struct Eigenpair {
    cplx mu;
    Eigen::Vector2cd phi;
    Eigen::Vector2cd phi_star;
    cplx other_mu;
    Eigen::Vector2cd other_phi;
};

/// Leading eigenpair of a 2x2 mode operator and its adjoint, with <phi, phi_star> = 1.
/// phi has unit norm and a real positive first nonzero component.
inline Eigenpair critical_eigenpair(const Eigen::Matrix2d& L) {
    Eigen::EigenSolver<Eigen::Matrix2d> es(L);
    if (es.info() != Eigen::Success) throw ConvergenceError("2x2 eigen decomposition failed");
    const Eigen::Vector2cd ev = es.eigenvalues();
    if (std::abs(ev[0] - ev[1]) < 1e-10) throw DegenerateError("mode operator has a repeated eigenvalue");
    const int top = ev[0].real() >= ev[1].real() ? 0 : 1;
    Eigen::Matrix2cd V = es.eigenvectors();
    for (int j = 0; j < 2; ++j) {
        Eigen::Vector2cd c = V.col(j);
        c /= c.norm();
        const int lead = std::abs(c[0]) > 1e-14 ? 0 : 1;
        c *= std::conj(c[lead]) / std::abs(c[lead]);
        V.col(j) = c;
    }
    const Eigen::Matrix2cd W = V.inverse();  // rows: left eigenvectors, W V = I
    Eigenpair out;
    out.mu = ev[top];
    out.phi = V.col(top);
    out.phi_star = W.row(top).conjugate().transpose();
    out.other_mu = ev[1 - top];
    out.other_phi = V.col(1 - top);
    return out;
}

inline Eigenpair critical_eigenpair(const HomogeneousState& s, const ParameterSet& p, double k) {
    if (!s.is_real) throw DomainError("eigenpair needs a real homogeneous state");
    return critical_eigenpair(mode_operator(DerivativeTensor(s.state(), p).jacobian(), p.delta(), k));
}

struct QuadraticCorrections {
    Eigen::Vector2cd phi_ii;
    Eigen::Vector2cd phi_0;
    Eigen::Vector2cd phi_ij;
};

namespace detail {

inline Eigen::Vector2cd solve_mode(const Eigen::Matrix2d& J, double delta, double kappa, const Eigen::Vector2cd& rhs,
                                   const char* what) {
    const Eigen::Matrix2d L = mode_operator(J, delta, kappa);
    if (std::abs(L.determinant()) < 1e-12) {
        throw DegenerateError(std::string("resonance: L(") + what + ") is singular");
    }
    return L.cast<cplx>().partialPivLu().solve(rhs);
}

}  // namespace detail

/// phi_ii = -L(2k)^-1 B(Phi,Phi), phi_0 = -2 L(0)^-1 B(Phi,conj Phi), phi_ij = -2 L(sqrt3 k)^-1 B(Phi,conj Phi).
inline QuadraticCorrections quadratic_corrections(const DerivativeTensor& d, double delta, double k,
                                                  const Eigen::Vector2cd& phi) {
    const Eigen::Matrix2d J = d.jacobian();
    const Eigen::Vector2cd pc = phi.conjugate();
    const Eigen::Vector2cd bpp = bilinear_B<cplx>(phi, phi, d);
    const Eigen::Vector2cd bpc = bilinear_B<cplx>(phi, pc, d);
    return {-detail::solve_mode(J, delta, 2.0 * k, bpp, "2k"), -2.0 * detail::solve_mode(J, delta, 0.0, bpc, "0"),
            -2.0 * detail::solve_mode(J, delta, std::sqrt(3.0) * k, bpc, "sqrt3 k")};
}

enum class LandauMode { Classical, Uniform };

/// Which cubic form enters d4: as printed, 6 C(Phi,Phi,Phi); or 6 C(Phi,Phi,conj Phi).
enum class QuarticVariant { AsPrinted, Conjugated };

struct LandauCoefficients {
    cplx c1, c2, c3, c4;
    Eigen::Vector2cd Phi;
    Eigen::Vector2cd PhiStar;
    Eigen::Vector2cd phi_ii, phi_0, phi_ij;
    std::array<Eigen::Vector2cd, 4> d;
    double k = 0.0;
    double sigma_c = 0.0;     // where Phi and the corrections were evaluated
    double sigma_eval = 0.0;  // where c1 was evaluated
    LandauMode mode = LandauMode::Classical;
    QuarticVariant variant = QuarticVariant::AsPrinted;
    StateVector base;  // homogeneous state at sigma_eval
};

/// Landau coefficients of root `root_index` on the lattice of wavenumber k. `pc.sigma`
/// is the expansion point sigma_c; c1 is evaluated at sigma_eval. In uniform mode every
/// quantity is evaluated at sigma_eval.
inline LandauCoefficients landau_coefficients(const ParameterSet& pc, int root_index, double k, double sigma_eval,
                                              LandauMode mode = LandauMode::Classical,
                                              QuarticVariant variant = QuarticVariant::AsPrinted) {
    const double sig = mode == LandauMode::Classical ? pc.sigma : sigma_eval;
    const ParameterSet p = pc.with_sigma(sig);
    const HomogeneousState s = homogeneous_state(p, root_index);
    const DerivativeTensor d(s.state(), p);
    const Eigen::Matrix2d J = d.jacobian();
    const Eigenpair ep = critical_eigenpair(mode_operator(J, p.delta(), k));
    const QuadraticCorrections q = quadratic_corrections(d, p.delta(), k, ep.phi);

    LandauCoefficients lc;
    lc.Phi = ep.phi;
    lc.PhiStar = ep.phi_star;
    lc.phi_ii = q.phi_ii;
    lc.phi_0 = q.phi_0;
    lc.phi_ij = q.phi_ij;
    lc.k = k;
    lc.sigma_c = sig;
    lc.sigma_eval = sigma_eval;
    lc.mode = mode;
    lc.variant = variant;

    const ParameterSet pe = pc.with_sigma(sigma_eval);
    const HomogeneousState se = homogeneous_state(pe, root_index);
    lc.base = se.state();
    const cplx mu = mode == LandauMode::Uniform ? ep.mu : dispersion(se, pe, k).mu_plus;

    const Eigen::Vector2cd P = ep.phi, Pc = ep.phi.conjugate();
    lc.d[0] = mu * P;
    lc.d[1] = 2.0 * bilinear_B<cplx>(Pc, Pc, d);
    lc.d[2] = 3.0 * trilinear_C<cplx>(P, P, Pc, d) + 2.0 * bilinear_B<cplx>(Pc, q.phi_ii, d) +
              2.0 * bilinear_B<cplx>(P, q.phi_0, d);
    const Eigen::Vector2cd cubic = variant == QuarticVariant::AsPrinted ? trilinear_C<cplx>(P, P, P, d)
                                                                        : trilinear_C<cplx>(P, P, Pc, d);
    lc.d[3] = 6.0 * cubic + 2.0 * bilinear_B<cplx>(P, q.phi_ij, d) + 2.0 * bilinear_B<cplx>(P, q.phi_0, d);
    lc.c1 = inner(lc.d[0], ep.phi_star);
    lc.c2 = inner(lc.d[1], ep.phi_star);
    lc.c3 = inner(lc.d[2], ep.phi_star);
    lc.c4 = inner(lc.d[3], ep.phi_star);
    return lc;
}

/// Coefficients at the Turing point of root `root_index` for the gamma of `base`.
inline LandauCoefficients onset_coefficients(const ParameterSet& base, const CriticalPoint& cp, int root_index = 1,
                                             std::optional<double> sigma_eval = {},
                                             LandauMode mode = LandauMode::Classical,
                                             QuarticVariant variant = QuarticVariant::AsPrinted) {
    return landau_coefficients(base.with_sigma(cp.sigma), root_index, cp.k, sigma_eval.value_or(cp.sigma), mode,
                               variant);
}

/// Real parts of c1..c4, the coefficients of the amplitude system used for steady states.
struct AmplitudeCoefficients {
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;

    static AmplitudeCoefficients of(const LandauCoefficients& lc) {
        return {lc.c1.real(), lc.c2.real(), lc.c3.real(), lc.c4.real()};
    }
};

enum class PatternTag { Homogeneous, Stripe, HexagonPlus, HexagonMinus, Mixed };

inline const char* to_string(PatternTag t) {
    switch (t) {
        case PatternTag::Homogeneous: return "homogeneous";
        case PatternTag::Stripe: return "stripe";
        case PatternTag::HexagonPlus: return "hexagon_plus";
        case PatternTag::HexagonMinus: return "hexagon_minus";
        case PatternTag::Mixed: return "mixed";
    }
    return "?";
}

struct AmplitudeTriple {
    cplx A1, A2, A3;
    PatternTag tag = PatternTag::Homogeneous;

    std::array<cplx, 3> array() const { return {A1, A2, A3}; }
    /// Mixed modes (A,B,B): bean when |A| > |B|, rectangle when |A| < |B|.
    bool is_bean() const { return tag == PatternTag::Mixed && std::abs(A1) > std::abs(A2); }
    bool is_rectangle() const { return tag == PatternTag::Mixed && std::abs(A1) < std::abs(A2); }
};

/// Right-hand side (f1, f2, f3) of the amplitude system.
inline std::array<cplx, 3> amplitude_rhs(const std::array<cplx, 3>& A, const AmplitudeCoefficients& c) {
    std::array<cplx, 3> f;
    for (int j = 0; j < 3; ++j) {
        const cplx& a = A[j];
        const cplx& b = A[(j + 1) % 3];
        const cplx& e = A[(j + 2) % 3];
        f[j] = c.c1 * a + c.c2 * std::conj(b) * std::conj(e) + c.c3 * a * std::norm(a) +
               c.c4 * a * (std::norm(b) + std::norm(e));
    }
    return f;
}

inline double amplitude_residual(const AmplitudeTriple& t, const AmplitudeCoefficients& c) {
    const auto f = amplitude_rhs(t.array(), c);
    return std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2])});
}

/// S+- = +-sqrt(-c1/c3).
inline std::pair<double, double> stripe_amplitudes(const AmplitudeCoefficients& c) {
    if (c.c3 == 0.0) throw DegenerateError("c3 = 0: stripe amplitude undefined");
    const double rad = -c.c1 / c.c3;
    if (rad < 0.0) throw NoSolutionError("no stripes: -c1/c3 < 0");
    return {std::sqrt(rad), -std::sqrt(rad)};
}

inline std::pair<double, double> stripe_amplitudes(const LandauCoefficients& lc) {
    return stripe_amplitudes(AmplitudeCoefficients::of(lc));
}

/// H+- = -c2/(2(c3+2c4)) +- sqrt(c2^2/(4(c3+2c4)^2) - c1/(c3+2c4)).
inline std::pair<double, double> hexagon_amplitudes(const AmplitudeCoefficients& c) {
    const double e = c.c3 + 2.0 * c.c4;
    if (std::abs(e) < 1e-12) throw DegenerateError("c3 + 2 c4 = 0: hexagon cubic degenerates");
    const double mid = -c.c2 / (2.0 * e);
    const double rad = mid * mid - c.c1 / e;
    if (rad < 0.0) throw NoSolutionError("no hexagons: negative radicand");
    return {mid + std::sqrt(rad), mid - std::sqrt(rad)};
}

inline std::pair<double, double> hexagon_amplitudes(const LandauCoefficients& lc) {
    return hexagon_amplitudes(AmplitudeCoefficients::of(lc));
}

/// c_f = c2^2 / (4 (c3 + 2 c4)^2).
inline double subcriticality_index(const AmplitudeCoefficients& c) {
    const double e = c.c3 + 2.0 * c.c4;
    if (std::abs(e) < 1e-12) throw DegenerateError("c3 + 2 c4 = 0: subcriticality index diverges");
    return c.c2 * c.c2 / (4.0 * e * e);
}

inline double subcriticality_index(const LandauCoefficients& lc) {
    return subcriticality_index(AmplitudeCoefficients::of(lc));
}

/// Real A values of (A,B,B) solutions with B != 0: roots of
/// (c3-c4)(c3+2c4) A^3 - 3 c2 c4 A^2 + (c1 (c3-c4) - c2^2) A - c1 c2 = 0,
/// each with B^2 = -(c1 + c2 A + c4 A^2)/(c3 + c4).
inline std::vector<std::pair<double, double>> mixed_branch_points(const AmplitudeCoefficients& c) {
    std::vector<std::pair<double, double>> out;
    if (std::abs(c.c3 + c.c4) < 1e-14) return out;
    Eigen::Vector4d coeffs(-c.c1 * c.c2, c.c1 * (c.c3 - c.c4) - c.c2 * c.c2, -3.0 * c.c2 * c.c4,
                           (c.c3 - c.c4) * (c.c3 + 2.0 * c.c4));
    int deg = 3;
    const double scale = coeffs.cwiseAbs().maxCoeff();
    while (deg > 0 && std::abs(coeffs[deg]) <= 1e-14 * scale) --deg;
    if (deg == 0) return out;
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(Eigen::VectorXd(coeffs.head(deg + 1)));
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
        const cplx z = solver.roots()[i];
        if (std::abs(z.imag()) > 1e-9 * std::max(1.0, std::abs(z))) continue;
        double A = z.real();
        // one Newton step on the cubic against root-finder round-off
        const double f = ((coeffs[3] * A + coeffs[2]) * A + coeffs[1]) * A + coeffs[0];
        const double df = (3.0 * coeffs[3] * A + 2.0 * coeffs[2]) * A + coeffs[1];
        if (deg == 3 && df != 0.0) A -= f / df;
        const double B2 = -(c.c1 + c.c2 * A + c.c4 * A * A) / (c.c3 + c.c4);
        if (B2 > 0.0) out.emplace_back(A, std::sqrt(B2));
    }
    return out;
}

/// Real mixed-mode steady states (A, B, B) with |A| != |B| and A != 0; both signs of B.
inline std::vector<AmplitudeTriple> mixed_mode_amplitudes(const AmplitudeCoefficients& c) {
    std::vector<AmplitudeTriple> out;
    for (const auto& [A, B] : mixed_branch_points(c)) {
        const double tol = 1e-9 * std::max(1.0, std::abs(A));
        if (std::abs(A) <= tol || std::abs(std::abs(A) - B) <= tol) continue;
        for (double sgn : {1.0, -1.0}) out.push_back({A, sgn * B, sgn * B, PatternTag::Mixed});
    }
    std::sort(out.begin(), out.end(), [](const AmplitudeTriple& a, const AmplitudeTriple& b) {
        return std::pair(a.A1.real(), a.A2.real()) < std::pair(b.A1.real(), b.A2.real());
    });
    return out;
}

inline std::vector<AmplitudeTriple> mixed_mode_amplitudes(const LandauCoefficients& lc) {
    return mixed_mode_amplitudes(AmplitudeCoefficients::of(lc));
}

/// 6x6 real Jacobian in coordinates (Re A1, Im A1, Re A2, Im A2, Re A3, Im A3).
inline Eigen::Matrix<double, 6, 6> amplitude_jacobian(const std::array<cplx, 3>& A, const AmplitudeCoefficients& c) {
    // Wirtinger derivatives dA[j][l] = d f_j / d A_l, dAc[j][l] = d f_j / d conj(A_l)
    std::array<std::array<cplx, 3>, 3> dA{}, dAc{};
    for (int j = 0; j < 3; ++j) {
        const int m = (j + 1) % 3, n = (j + 2) % 3;
        const cplx a = A[j];
        dA[j][j] = c.c1 + 2.0 * c.c3 * std::norm(a) + c.c4 * (std::norm(A[m]) + std::norm(A[n]));
        dAc[j][j] = c.c3 * a * a;
        dA[j][m] = c.c4 * a * std::conj(A[m]);
        dAc[j][m] = c.c2 * std::conj(A[n]) + c.c4 * a * A[m];
        dA[j][n] = c.c4 * a * std::conj(A[n]);
        dAc[j][n] = c.c2 * std::conj(A[m]) + c.c4 * a * A[n];
    }
    Eigen::Matrix<double, 6, 6> M;
    const cplx iu(0.0, 1.0);
    for (int j = 0; j < 3; ++j) {
        for (int l = 0; l < 3; ++l) {
            const cplx dx = dA[j][l] + dAc[j][l];
            const cplx dy = iu * (dA[j][l] - dAc[j][l]);
            M(2 * j, 2 * l) = dx.real();
            M(2 * j + 1, 2 * l) = dx.imag();
            M(2 * j, 2 * l + 1) = dy.real();
            M(2 * j + 1, 2 * l + 1) = dy.imag();
        }
    }
    return M;
}

struct AmplitudeStability {
    std::vector<cplx> eigenvalues;  // all six, sorted by descending real part
    int symmetry_modes = 0;         // zero eigenvalues from translations, excluded from the verdict
    bool stable = false;
};

/// Linear stability of a steady state of the amplitude system. Translations act on the
/// triple as A_j -> A_j exp(i theta_j) with theta_1 + theta_2 + theta_3 = 0; the rank of
/// that orbit's tangent space gives the number of neutral eigenvalues that are ignored.
inline AmplitudeStability amplitude_stability(const AmplitudeTriple& t, const AmplitudeCoefficients& c) {
    const auto A = t.array();
    Eigen::EigenSolver<Eigen::Matrix<double, 6, 6>> es(amplitude_jacobian(A, c), false);
    AmplitudeStability out;
    for (int i = 0; i < 6; ++i) out.eigenvalues.push_back(es.eigenvalues()[i]);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end(),
              [](const cplx& a, const cplx& b) { return a.real() > b.real(); });
    Eigen::Matrix<double, 6, 2> tangents = Eigen::Matrix<double, 6, 2>::Zero();
    const std::array<std::array<double, 3>, 2> thetas{{{1.0, -1.0, 0.0}, {1.0, 0.0, -1.0}}};
    for (int g = 0; g < 2; ++g) {
        for (int j = 0; j < 3; ++j) {
            const cplx tj = cplx(0.0, thetas[g][j]) * A[j];
            tangents(2 * j, g) = tj.real();
            tangents(2 * j + 1, g) = tj.imag();
        }
    }
    const double scale = std::max(1.0, std::abs(A[0]) + std::abs(A[1]) + std::abs(A[2]));
    Eigen::JacobiSVD<Eigen::Matrix<double, 6, 2>> svd(tangents);
    for (int i = 0; i < 2; ++i) out.symmetry_modes += svd.singularValues()[i] > 1e-10 * scale;
    std::vector<cplx> rest = out.eigenvalues;
    for (int r = 0; r < out.symmetry_modes; ++r) {
        auto it = std::min_element(rest.begin(), rest.end(),
                                   [](const cplx& a, const cplx& b) { return std::abs(a) < std::abs(b); });
        rest.erase(it);
    }
    out.stable = std::all_of(rest.begin(), rest.end(), [](const cplx& z) { return z.real() < -1e-10; });
    return out;
}

inline AmplitudeStability amplitude_stability(const AmplitudeTriple& t, const LandauCoefficients& lc) {
    return amplitude_stability(t, AmplitudeCoefficients::of(lc));
}

/// Extended ansatz on the grid, with the cosine phase so that Neumann conditions hold.
/// 1D domains accept stripes (A,0,0) only; 2D rectangles need real amplitudes with A2 = A3
/// and extents at which every active wave vector is a Neumann mode.
inline Field reconstruct_field(const AmplitudeTriple& t, const LandauCoefficients& lc, const Domain& d) {
    d.validate();
    const auto A = t.array();
    for (const auto& a : A) {
        if (std::abs(a.imag()) > 1e-12 * std::max(1.0, std::abs(a))) {
            throw MismatchError("reconstruction on a Neumann domain needs real amplitudes");
        }
    }
    const bool stripe_only = std::abs(A[1]) == 0.0 && std::abs(A[2]) == 0.0;
    if (d.dim == 1 && !stripe_only) throw MismatchError("1D domains carry stripes (A,0,0) only");
    if (!stripe_only && std::abs(A[1] - A[2]) > 1e-12 * std::max(1.0, std::abs(A[1]))) {
        throw MismatchError("Neumann rectangles need A2 = A3");
    }
    const auto kv = HexLattice{lc.k}.vectors();
    std::vector<Eigen::Vector2d> active;
    for (int j = 0; j < 3; ++j) {
        if (std::abs(A[j]) == 0.0) continue;
        active.push_back(kv[j]);
        active.push_back(2.0 * kv[j]);
        for (int l = j + 1; l < 3; ++l)
            if (std::abs(A[l]) != 0.0) active.push_back(kv[j] - kv[l]);
    }
    auto neumann = [](double kc, const Axis& a) {
        for (double b : {a.lo, a.hi}) {
            if (std::abs(std::sin(kc * b)) > 1e-8) return false;
        }
        return true;
    };
    for (const auto& kvec : active) {
        if (!neumann(kvec[0], d.x) || (d.dim == 2 && !neumann(kvec[1], d.y))) {
            throw MismatchError("domain extents are not compatible with the lattice wave vectors");
        }
    }

    Field w = Field::uniform(d, lc.base);
    const cplx iu(0.0, 1.0);
    for (int i = 0; i < d.size(); ++i) {
        const int ix = i % d.nx(), iy = i / d.nx();
        const Eigen::Vector2d x(d.x.at(ix), d.dim == 2 ? d.y.at(iy) : 0.0);
        std::array<cplx, 3> e;
        for (int j = 0; j < 3; ++j) e[j] = std::exp(iu * kv[j].dot(x));
        Eigen::Vector2cd sum = Eigen::Vector2cd::Zero();
        for (int j = 0; j < 3; ++j) {
            sum += A[j] * e[j] * lc.Phi + A[j] * A[j] * e[j] * e[j] * lc.phi_ii + 0.5 * std::norm(A[j]) * lc.phi_0;
            for (int l = j + 1; l < 3; ++l) sum += A[j] * std::conj(A[l]) * e[j] * std::conj(e[l]) * lc.phi_ij;
        }
        w.u[i] += 2.0 * sum[0].real();
        w.v[i] += 2.0 * sum[1].real();
    }
    return w;
}

}  // namespace benthic

#endif
