#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "benthic/landau.hpp"

namespace benthic {
namespace {

struct Onset {
    ParameterSet base;
    CriticalPoint cp;
};

Onset onset(double gamma) {
    const ParameterSet base = ParameterSet::standard(0.1, gamma);
    return {base, critical_points(base, 0.001, 0.25).back()};
}

TEST(Lattice, VectorsCloseAndHaveEqualLength) {
    const auto kv = HexLattice{0.19}.vectors();
    for (const auto& v : kv) EXPECT_NEAR(v.norm(), 0.19, 1e-15);
    EXPECT_NEAR((kv[0] + kv[1] + kv[2]).norm(), 0.0, 1e-15);
}

TEST(Eigenpair, DefiningPropertiesAtOnset) {
    const auto [base, cp] = onset(0.25);
    const ParameterSet p = base.with_sigma(cp.sigma);
    const auto s = homogeneous_state(p, 1);
    const Eigen::Matrix2d L = mode_operator(DerivativeTensor(s.state(), p).jacobian(), p.delta(), cp.k);
    const Eigenpair ep = critical_eigenpair(s, p, cp.k);
    EXPECT_LT((L.cast<cplx>() * ep.phi - ep.mu * ep.phi).norm(), 1e-12);
    EXPECT_LT((L.transpose().cast<cplx>() * ep.phi_star - std::conj(ep.mu) * ep.phi_star).norm(), 1e-12);
    EXPECT_NEAR(std::abs(inner(ep.phi, ep.phi_star) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(ep.phi.norm(), 1.0, 1e-14);
    EXPECT_GT(ep.phi[0].real(), 0.0);
    EXPECT_NEAR(ep.phi[0].imag(), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(ep.mu), 0.0, 1e-8);

    // other eigenvector from the 2x2 null space of L - mu_- I, built by hand
    const double tr = L.trace(), det = L.determinant();
    const double mu_minus = 0.5 * tr - std::sqrt(0.25 * tr * tr - det);
    const Eigen::Vector2cd perp(L(0, 1), mu_minus - L(0, 0));
    EXPECT_LT(std::abs(inner(perp, ep.phi_star)), 1e-12 * perp.norm());
}

TEST(Eigenpair, RepeatedEigenvalueThrows) {
    EXPECT_THROW(critical_eigenpair(Eigen::Matrix2d::Identity()), DegenerateError);
}

TEST(Corrections, SolveTheirDefiningEquations) {
    const auto [base, cp] = onset(0.25);
    const ParameterSet p = base.with_sigma(cp.sigma);
    const auto s = homogeneous_state(p, 1);
    const DerivativeTensor d(s.state(), p);
    const Eigenpair ep = critical_eigenpair(s, p, cp.k);
    const auto q = quadratic_corrections(d, p.delta(), cp.k, ep.phi);
    const Eigen::Matrix2d J = d.jacobian();
    auto L = [&](double kappa) { return mode_operator(J, p.delta(), kappa).cast<cplx>().eval(); };
    const Eigen::Vector2cd pc = ep.phi.conjugate();
    EXPECT_LT((L(2 * cp.k) * q.phi_ii + bilinear_B<cplx>(ep.phi, ep.phi, d)).norm(), 1e-12);
    EXPECT_LT((L(0.0) * q.phi_0 + 2.0 * bilinear_B<cplx>(ep.phi, pc, d)).norm(), 1e-12);
    EXPECT_LT((L(std::sqrt(3.0) * cp.k) * q.phi_ij + 2.0 * bilinear_B<cplx>(ep.phi, pc, d)).norm(), 1e-12);
}

TEST(Corrections, ResonanceIsReported) {
    const ParameterSet p = ParameterSet::standard(0.115, 0.25);
    const auto s = homogeneous_state(p, 1);
    const auto [km, kp] = neutral_wavenumbers(s, p);
    const DerivativeTensor d(s.state(), p);
    const Eigenpair ep = critical_eigenpair(s, p, 0.5 * kp);
    EXPECT_THROW(quadratic_corrections(d, p.delta(), 0.5 * kp, ep.phi), DegenerateError);
    (void)km;
}

// Quadratic part of the residual, L(Lap) w2 + B(w1, w1), projected on the lattice modes
// 2k1, k1 - k2 and 0 over one periodic cell by an exact discrete Fourier sum.
TEST(Corrections, QuadraticResidualVanishesOnLatticeModes) {
    const auto [base, cp] = onset(0.25);
    const ParameterSet p = base.with_sigma(cp.sigma);
    const auto s = homogeneous_state(p, 1);
    const DerivativeTensor d(s.state(), p);
    const auto lc = landau_coefficients(p, 1, cp.k, cp.sigma);
    const auto kv = HexLattice{cp.k}.vectors();
    std::mt19937_64 rng(8);
    std::normal_distribution<double> n01;
    const std::array<cplx, 3> A{cplx(n01(rng), n01(rng)) * 1e-2, cplx(n01(rng), n01(rng)) * 1e-2,
                                cplx(n01(rng), n01(rng)) * 1e-2};
    const double pi = std::numbers::pi;
    const double Lx = 4 * pi / cp.k, Ly = 4 * pi / (std::sqrt(3.0) * cp.k);
    const int N = 16;
    const cplx I(0, 1);
    const std::array<Eigen::Vector2d, 3> modes{2.0 * kv[0], kv[0] - kv[1], Eigen::Vector2d::Zero()};
    const Eigen::Matrix2d J = d.jacobian();
    for (const auto& m : modes) {
        Eigen::Vector2cd projB = Eigen::Vector2cd::Zero(), projW = Eigen::Vector2cd::Zero();
        for (int ix = 0; ix < N; ++ix) {
            for (int iy = 0; iy < N; ++iy) {
                const Eigen::Vector2d x(Lx * ix / N, Ly * iy / N);
                std::array<cplx, 3> e;
                for (int j = 0; j < 3; ++j) e[j] = std::exp(I * kv[j].dot(x));
                Eigen::Vector2cd w1 = Eigen::Vector2cd::Zero(), w2 = Eigen::Vector2cd::Zero();
                for (int j = 0; j < 3; ++j) {
                    w1 += A[j] * e[j] * lc.Phi;
                    w2 += A[j] * A[j] * e[j] * e[j] * lc.phi_ii + 0.5 * std::norm(A[j]) * lc.phi_0;
                    for (int l = j + 1; l < 3; ++l) w2 += A[j] * std::conj(A[l]) * e[j] * std::conj(e[l]) * lc.phi_ij;
                }
                const Eigen::Vector2d w1r = 2.0 * w1.real(), w2r = 2.0 * w2.real();
                const Eigen::Vector2cd b = bilinear_B<double>(w1r, w1r, d).cast<cplx>();
                const cplx conj_mode = std::exp(-I * m.dot(x));
                projB += b * conj_mode / double(N * N);
                projW += w2r.cast<cplx>() * conj_mode / double(N * N);
            }
        }
        const Eigen::Vector2cd res = mode_operator(J, p.delta(), m.norm()).cast<cplx>() * projW + projB;
        EXPECT_LT(res.norm(), 1e-10) << "mode (" << m[0] << ", " << m[1] << ")";
    }
}

TEST(Coefficients, LinearCoefficientVanishesAtOnset) {
    const auto [base, cp] = onset(0.25);
    const auto lc = onset_coefficients(base, cp);
    EXPECT_NEAR(std::abs(lc.c1), 0.0, 1e-8);
    const std::array<cplx, 4> c{lc.c1, lc.c2, lc.c3, lc.c4};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(inner(lc.d[i] - c[i] * lc.Phi, lc.PhiStar)), 0.0, 1e-12);
}

TEST(Coefficients, ModesCoincideAtOnset) {
    const auto [base, cp] = onset(0.3);
    const auto a = onset_coefficients(base, cp, 1, cp.sigma, LandauMode::Classical);
    const auto b = onset_coefficients(base, cp, 1, cp.sigma, LandauMode::Uniform);
    EXPECT_NEAR(std::abs(a.c1 - b.c1), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a.c3 - b.c3), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(a.c4 - b.c4), 0.0, 1e-14);
    const auto off = onset_coefficients(base, cp, 1, cp.sigma - 0.005, LandauMode::Classical);
    EXPECT_EQ(off.c3, a.c3);
    EXPECT_GT(off.c1.real(), 0.0);
}

TEST(Coefficients, CubicSignAgainstActivity) {
    const auto [b025, cp025] = onset(0.25);
    EXPECT_LT(onset_coefficients(b025, cp025).c3.real(), 0.0);
    const auto [b0004, cp0004] = onset(0.004);
    EXPECT_GT(onset_coefficients(b0004, cp0004).c3.real(), 0.0);
}

TEST(Coefficients, VariantsCoincideForRealEigenvector) {
    const auto [base, cp] = onset(0.25);
    const auto a = onset_coefficients(base, cp, 1, {}, LandauMode::Classical, QuarticVariant::AsPrinted);
    const auto b = onset_coefficients(base, cp, 1, {}, LandauMode::Classical, QuarticVariant::Conjugated);
    EXPECT_NEAR(a.Phi.imag().norm(), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(a.c4 - b.c4), 0.0, 1e-14);
}

TEST(Stripes, AmplitudeFormula) {
    const auto [base, cp] = onset(0.25);
    const auto at = AmplitudeCoefficients::of(onset_coefficients(base, cp));
    const auto [sp, sm] = stripe_amplitudes(AmplitudeCoefficients{0.0, at.c2, at.c3, at.c4});
    EXPECT_EQ(sp, 0.0);
    EXPECT_EQ(sm, 0.0);
    // supercritical (c3 < 0): stripes for sigma < sigma_c where mu > 0
    const auto below = onset_coefficients(base, cp, 1, cp.sigma - 0.002);
    const auto [s1, s2] = stripe_amplitudes(below);
    EXPECT_NEAR(s1, std::sqrt(-below.c1.real() / below.c3.real()), 1e-15);
    EXPECT_EQ(s2, -s1);
    EXPECT_THROW(stripe_amplitudes(onset_coefficients(base, cp, 1, cp.sigma + 0.002)), NoSolutionError);
}

TEST(Hexagons, RootsSolveTheReducedCubic) {
    const auto [base, cp] = onset(0.25);
    for (double ds : {-0.004, -0.001, 0.0, 0.0005}) {
        const auto c = AmplitudeCoefficients::of(onset_coefficients(base, cp, 1, cp.sigma + ds));
        const auto [hp, hm] = hexagon_amplitudes(c);
        for (double H : {hp, hm}) {
            EXPECT_LT(std::abs(c.c1 * H + c.c2 * H * H + (c.c3 + 2 * c.c4) * H * H * H), 1e-10);
            EXPECT_LT(amplitude_residual({H, H, H, PatternTag::HexagonPlus}, c), 1e-10);
        }
        if (ds > 0.0) {
            // beyond onset (mu < 0) both hexagon roots persist: disturbed pitchfork
            EXPECT_NE(hp, 0.0);
            EXPECT_NE(hm, 0.0);
        }
    }
    const auto c0 = AmplitudeCoefficients::of(onset_coefficients(base, cp));
    const auto [hp, hm] = hexagon_amplitudes(AmplitudeCoefficients{0.0, c0.c2, c0.c3, c0.c4});
    const double nontrivial = -c0.c2 / (c0.c3 + 2 * c0.c4);
    EXPECT_NEAR(std::min(std::abs(hp), std::abs(hm)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(hp) > std::abs(hm) ? hp : hm, nontrivial, 1e-14);
    EXPECT_THROW(hexagon_amplitudes(AmplitudeCoefficients{0.1, 0.01, 1.0, -0.5}), DegenerateError);
}

TEST(Hexagons, NoneFarAboveOnset) {
    const auto [base, cp] = onset(0.25);
    EXPECT_THROW(hexagon_amplitudes(onset_coefficients(base, cp, 1, cp.sigma + 0.05)), NoSolutionError);
}

// Newton on the real (A, B, B) system from many seeds; collects all distinct real solutions.
std::vector<std::pair<double, double>> brute_force_ab(const AmplitudeCoefficients& c, int seeds, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.5, 1.5);
    std::vector<std::pair<double, double>> found;
    for (int s = 0; s < seeds; ++s) {
        double A = uni(rng), B = uni(rng);
        bool ok = false;
        for (int it = 0; it < 100; ++it) {
            const double F1 = c.c1 * A + c.c2 * B * B + c.c3 * A * A * A + 2 * c.c4 * A * B * B;
            const double F2 = c.c1 * B + c.c2 * A * B + c.c3 * B * B * B + c.c4 * B * (A * A + B * B);
            if (std::hypot(F1, F2) < 1e-15) {
                ok = true;
                break;
            }
            Eigen::Matrix2d Jm;
            Jm << c.c1 + 3 * c.c3 * A * A + 2 * c.c4 * B * B, 2 * c.c2 * B + 4 * c.c4 * A * B,
                c.c2 * B + 2 * c.c4 * A * B, c.c1 + c.c2 * A + 3 * c.c3 * B * B + c.c4 * (A * A + 3 * B * B);
            const Eigen::Vector2d step = Jm.fullPivLu().solve(Eigen::Vector2d(F1, F2));
            if (!step.allFinite()) break;
            A -= step[0];
            B -= step[1];
            if (std::abs(A) > 1e3 || std::abs(B) > 1e3) break;
        }
        if (!ok) continue;
        const double tol = 1e-5;  // the origin is a degenerate root at onset; Newton stalls near it
        if (std::abs(A) < tol || std::abs(B) < tol || std::abs(std::abs(A) - std::abs(B)) < tol) continue;
        bool dup = false;
        for (const auto& [a, b] : found) dup |= std::abs(a - A) < 1e-6 && std::abs(b - B) < 1e-6;
        if (!dup) found.emplace_back(A, B);
    }
    std::sort(found.begin(), found.end());
    return found;
}

TEST(MixedModes, MatchNewtonSweepAndSolveSystem) {
    const auto [base, cp] = onset(0.25);
    int total = 0;
    for (double ds : {-0.02, -0.01, -0.005, 0.0, 0.003}) {
        const auto c = AmplitudeCoefficients::of(onset_coefficients(base, cp, 1, cp.sigma + ds));
        const auto mixed = mixed_mode_amplitudes(c);
        for (const auto& t : mixed) {
            EXPECT_LT(amplitude_residual(t, c), 1e-10);
            EXPECT_TRUE(t.is_bean() || t.is_rectangle());
        }
        const auto oracle = brute_force_ab(c, 4000, 17);
        auto near = [](double a1, double b1, const AmplitudeTriple& t) {
            return std::abs(a1 - t.A1.real()) < 1e-6 && std::abs(b1 - t.A2.real()) < 1e-6;
        };
        for (const auto& [A, B] : oracle) {
            bool seen = false;
            for (const auto& t : mixed) seen |= near(A, B, t);
            EXPECT_TRUE(seen) << "ds = " << ds << ": Newton found (" << A << ", " << B << ")";
        }
        for (const auto& t : mixed) {
            bool seen = false;
            for (const auto& [A, B] : oracle) seen |= near(A, B, t);
            EXPECT_TRUE(seen) << "ds = " << ds << ": missed by Newton (" << t.A1.real() << ", " << t.A2.real() << ")";
        }
        total += static_cast<int>(mixed.size());
    }
    EXPECT_GT(total, 0);
}

TEST(MixedModes, DegenerateIntoHexagonsAndStripes) {
    const auto [base, cp] = onset(0.25);
    const auto c = AmplitudeCoefficients::of(onset_coefficients(base, cp, 1, cp.sigma - 0.01));
    // B = A: the (A,B,B) cubic contains the hexagon roots
    const auto pts = mixed_branch_points(c);
    const auto [hp, hm] = hexagon_amplitudes(c);
    for (double H : {hp, hm}) {
        bool seen = false;
        for (const auto& [A, B] : pts) seen |= std::abs(A - H) < 1e-9 && std::abs(B - std::abs(H)) < 1e-9;
        EXPECT_TRUE(seen) << "hexagon root " << H;
    }
    // B = 0: the second equation is void and the first reduces to the stripe equation
    const auto [sp, sm] = stripe_amplitudes(c);
    EXPECT_LT(amplitude_residual({sp, 0.0, 0.0, PatternTag::Stripe}, c), 1e-12);
    EXPECT_LT(amplitude_residual({sm, 0.0, 0.0, PatternTag::Stripe}, c), 1e-12);
}

TEST(AmplitudeStability, OriginHasRateC1) {
    const AmplitudeCoefficients c{-0.01, -0.03, -0.007, -0.05};
    const auto st = amplitude_stability({0.0, 0.0, 0.0, PatternTag::Homogeneous}, c);
    for (const auto& z : st.eigenvalues) EXPECT_NEAR(std::abs(z - c.c1), 0.0, 1e-15);
    EXPECT_EQ(st.symmetry_modes, 0);
    EXPECT_TRUE(st.stable);
}

TEST(AmplitudeStability, JacobianMatchesFiniteDifferences) {
    const AmplitudeCoefficients c{0.004, -0.035, -0.007, -0.056};
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    for (int trial = 0; trial < 20; ++trial) {
        std::array<cplx, 3> A;
        for (auto& a : A) a = cplx(n01(rng), n01(rng)) * 0.3;
        const auto M = amplitude_jacobian(A, c);
        const double h = 1e-6;
        for (int col = 0; col < 6; ++col) {
            auto Ap = A, Am = A;
            const cplx dir = col % 2 == 0 ? cplx(h, 0) : cplx(0, h);
            Ap[col / 2] += dir;
            Am[col / 2] -= dir;
            const auto fp = amplitude_rhs(Ap, c), fm = amplitude_rhs(Am, c);
            for (int row = 0; row < 6; ++row) {
                const cplx df = (fp[row / 2] - fm[row / 2]) / (2 * h);
                const double fd = row % 2 == 0 ? df.real() : df.imag();
                EXPECT_NEAR(fd, M(row, col), 1e-6 * std::max(1.0, std::abs(M(row, col))));
            }
        }
    }
}

TEST(AmplitudeStability, BeansAreUnstableAtGamma025) {
    const auto [base, cp] = onset(0.25);
    int beans = 0;
    for (double ds = -0.03; ds <= 0.0; ds += 0.001) {
        const auto c = AmplitudeCoefficients::of(onset_coefficients(base, cp, 1, cp.sigma + ds));
        for (const auto& t : mixed_mode_amplitudes(c)) {
            if (!t.is_bean()) continue;
            ++beans;
            const auto st = amplitude_stability(t, c);
            EXPECT_FALSE(st.stable) << "sigma = " << cp.sigma + ds;
            EXPECT_EQ(st.symmetry_modes, 2);
        }
    }
    EXPECT_GT(beans, 0);
}

TEST(Subcriticality, IndexBehaviour) {
    const auto [b012, cp012] = onset(0.12);
    const auto [b025, cp025] = onset(0.25);
    const double f012 = subcriticality_index(onset_coefficients(b012, cp012));
    const double f025 = subcriticality_index(onset_coefficients(b025, cp025));
    EXPECT_GE(f025, 0.0);
    EXPECT_GT(f012, f025);
    // pole where c3 + 2 c4 changes sign, between gamma = 0.08 and 0.09
    double prev = 0.0;
    for (double g : {0.05, 0.07, 0.08}) {
        const auto [b, cp] = onset(g);
        const double f = subcriticality_index(onset_coefficients(b, cp));
        EXPECT_GT(f, prev);
        prev = f;
    }
    EXPECT_GT(prev, 10.0 * f012);
}

TEST(Reconstruct, ZeroTripleIsHomogeneous) {
    const auto [base, cp] = onset(0.25);
    const auto lc = onset_coefficients(base, cp);
    const double pi = std::numbers::pi;
    const Domain d = Domain::rect(-2 * pi / cp.k, 2 * pi / cp.k, 33, -2 * pi / (std::sqrt(3.0) * cp.k),
                                  2 * pi / (std::sqrt(3.0) * cp.k), 20);
    const Field w = reconstruct_field({0.0, 0.0, 0.0}, lc, d);
    EXPECT_NEAR((w.u.array() - lc.base.u).abs().maxCoeff(), 0.0, 1e-15);
    EXPECT_NEAR((w.v.array() - lc.base.v).abs().maxCoeff(), 0.0, 1e-15);
    EXPECT_NO_THROW(reconstruct_field({0.05, 0.05, 0.05}, lc, d));
    EXPECT_NO_THROW(reconstruct_field({0.05, 0.0, 0.0}, lc, d));
    EXPECT_THROW(reconstruct_field({0.05, 0.02, 0.03}, lc, d), MismatchError);
    EXPECT_THROW(reconstruct_field({cplx(0.05, 0.01), 0.0, 0.0}, lc, d), MismatchError);
    const Domain bad = Domain::rect(-2 * pi / cp.k, 2.3 * pi / cp.k, 33, -1.0, 1.0, 5);
    EXPECT_THROW(reconstruct_field({0.05, 0.05, 0.05}, lc, bad), MismatchError);
}

TEST(Reconstruct, StripeCarriesDominantMode) {
    const auto [base, cp] = onset(0.25);
    const auto lc = onset_coefficients(base, cp, 1, cp.sigma - 0.002);
    const double A = stripe_amplitudes(lc).first;
    const double pi = std::numbers::pi;
    const int n = 257;
    const Domain d = Domain::line(-8 * pi / cp.k, 8 * pi / cp.k, n);
    const Field w = reconstruct_field({A, 0.0, 0.0, PatternTag::Stripe}, lc, d);
    const Eigen::VectorXd q = quadrature_weights(d);
    double amp = 0.0;
    for (int i = 0; i < n; ++i) amp += 2.0 * q[i] * (w.u[i] - lc.base.u) * std::cos(cp.k * d.x.at(i));
    EXPECT_NEAR(amp, 2.0 * A * lc.Phi[0].real(), 1e-10);
    EXPECT_THROW(reconstruct_field({A, A, A}, lc, d), MismatchError);
}

}  // namespace
}  // namespace benthic
