#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "benthic/continuation.hpp"
#include "benthic/landau.hpp"

namespace benthic {
namespace {

using std::numbers::pi;

// Cosine coefficient of u - mean against mode j of the Neumann line.
double cosine_mode(const Field& w, int j) {
    const Domain& d = w.domain;
    const Eigen::VectorXd q = quadrature_weights(d);
    const double mean = q.dot(w.u);
    double c = 0.0;
    for (int i = 0; i < d.size(); ++i) c += q[i] * (w.u[i] - mean) * std::cos(j * pi * (d.x.at(i) - d.x.lo) / d.x.length());
    return 2.0 * c;
}

int dominant_mode(const Field& w, int max_j) {
    int best = 1;
    for (int j = 1; j <= max_j; ++j)
        if (std::abs(cosine_mode(w, j)) > std::abs(cosine_mode(w, best))) best = j;
    return best;
}

TEST(Newton, HomogeneousRootNeedsNoIterations) {
    const ParameterSet p = ParameterSet::standard(0.2, 0.25);
    const Domain d = Domain::line(0.0, 100.0, 41);
    const Continuation c(d, p);
    const NewtonResult r = c.newton(homogeneous_field(d, p), p.sigma);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.iterations, 0);
    EXPECT_LT(r.residual, 1e-8);
}

TEST(Newton, SmallNoiseReturnsToStableRoot) {
    const ParameterSet p = ParameterSet::standard(0.2, 0.25);
    const Domain d = Domain::line(0.0, 100.0, 41);
    const Continuation c(d, p);
    Field g = homogeneous_field(d, p);
    const Field h = g;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1e-3, 1e-3);
    for (int i = 0; i < d.size(); ++i) {
        g.u[i] += uni(rng);
        g.v[i] += uni(rng);
    }
    const NewtonResult r = c.newton(g, p.sigma);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(rms_distance(r.field, h), 1e-9);
}

TEST(Newton, LandauStripeGuessConvergesToStripe) {
    const ParameterSet base = ParameterSet::standard(0.1, 0.25);
    const CriticalPoint cp = critical_point(base, 0.11, 0.14);
    const double sigma = cp.sigma - 0.002;
    const auto lc = onset_coefficients(base, cp, 1, sigma);
    const double A = stripe_amplitudes(lc).first;
    const double L = 8 * pi / cp.k;
    const Domain d = Domain::line(-L / 2, L / 2, nodes_for(L, cp.k));
    const Continuation c(d, base);
    const Field guess = reconstruct_field({A, 0.0, 0.0, PatternTag::Stripe}, lc, d);
    const NewtonResult r = c.newton(guess, sigma);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(r.iterations, 10);
    // four periods: mode 8 of the Neumann line, same phase as the guess
    EXPECT_EQ(dominant_mode(r.field, 20), 8);
    EXPECT_GT(cosine_mode(r.field, 8) * cosine_mode(guess, 8), 0.0);
    EXPECT_GT(rms_distance(r.field, homogeneous_field(d, base.with_sigma(sigma))), 1e-3);
}

TEST(Newton, ReportsFailureInsteadOfThrowing) {
    const ParameterSet p = ParameterSet::standard(0.2, 0.25);
    const Domain d = Domain::line(0.0, 100.0, 11);
    const Continuation c(d, p);
    Field g = homogeneous_field(d, p);
    g.u.setConstant(-5.0);
    const NewtonResult r = c.newton(g, p.sigma, 1e-8, 3);
    EXPECT_FALSE(r.converged);
    EXPECT_THROW(c.point_at(g, p.sigma), ConvergenceError);
}

// Homogeneous root 1 at gamma = 0.2 merges with root 2 in a fold of the cubic.
Branch homogeneous_through_fold(double ds_max) {
    const ParameterSet p = ParameterSet::standard(0.2, 0.2);
    const Domain d = Domain::line(0.0, 10.0, 3);
    ContinuationSettings s;
    s.ds_max = ds_max;
    s.locate_bifurcations = false;
    const Continuation c(d, p, s);
    const BranchPoint start = c.point_at(homogeneous_field(d, p), p.sigma, -1);
    return c.continue_branch(start, +1, 2000, [](const Branch& b) { return !b.indices(PointTag::Fold).empty(); });
}

TEST(Continuation, FoldOfTheHomogeneousCubic) {
    const Branch b = homogeneous_through_fold(0.01);
    const auto folds = b.indices(PointTag::Fold);
    ASSERT_EQ(folds.size(), 1u) << b.end_reason;
    const double oracle = detail::fold_sigmas(ParameterSet::standard(0.1, 0.2)).front();
    EXPECT_NEAR(b.points[folds[0]].sigma, oracle, 1e-8);
    EXPECT_LT(std::abs(b.points[folds[0]].tangent_sigma), 1e-10);
}

TEST(Continuation, FoldInvariantUnderHalvedStepBound) {
    const Branch a = homogeneous_through_fold(0.01), b = homogeneous_through_fold(0.005);
    ASSERT_FALSE(a.indices(PointTag::Fold).empty());
    ASSERT_FALSE(b.indices(PointTag::Fold).empty()) << b.end_reason << " " << b.points.size();
    EXPECT_NEAR(a.points[a.indices(PointTag::Fold)[0]].sigma, b.points[b.indices(PointTag::Fold)[0]].sigma, 1e-6);
}

TEST(Continuation, PointsRespectStepBoundAndResidual) {
    const Branch b = homogeneous_through_fold(0.01);
    const Continuation c(b.points[0].field.domain, ParameterSet::standard(0.2, 0.2));
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        EXPECT_LT(b.points[i].residual, 1e-8);
        EXPECT_LT(c.residual_norm(b.points[i].field, b.points[i].sigma), 1e-8);
        EXPECT_EQ(b.points[i].n_unstable, c.spectrum(b.points[i].field, b.points[i].sigma).n_unstable(1e-10));
    }
}

// gamma = 0.25 homogeneous branch on four critical wavelengths, descending through onset.
struct Onset {
    ParameterSet base = ParameterSet::standard(0.14, 0.25);
    CriticalPoint cp;
    Domain d;
    Branch branch;
    int bif = -1;
};

const Onset& onset_branch() {
    static const Onset o = [] {
        Onset o;
        o.cp = critical_point(o.base, 0.11, 0.14);
        const double L = 8 * pi / o.cp.k;
        o.d = Domain::line(-L / 2, L / 2, nodes_for(L, o.cp.k));
        const Continuation c(o.d, o.base);
        const BranchPoint start = c.point_at(homogeneous_field(o.d, o.base), o.base.sigma, -1);
        o.branch = c.continue_branch(start, +1, 200,
                                     [](const Branch& b) { return !b.indices(PointTag::Bifurcation).empty(); });
        const auto bifs = o.branch.indices(PointTag::Bifurcation);
        if (!bifs.empty()) o.bif = bifs[0];
        return o;
    }();
    return o;
}

TEST(Bifurcation, FirstCrossingAtTheTuringPoint) {
    const Onset& o = onset_branch();
    ASSERT_GE(o.bif, 0) << o.branch.end_reason;
    const BranchPoint& p = o.branch.points[o.bif];
    EXPECT_NEAR(p.sigma, o.cp.sigma, 1e-3);
    double nearest = INFINITY;
    for (auto z : p.eigenvalues) nearest = std::min(nearest, std::abs(z.real()));
    EXPECT_LT(nearest, 1e-8);
}

TEST(Bifurcation, CrossingEigenvectorIsTheCriticalMode) {
    const Onset& o = onset_branch();
    ASSERT_GE(o.bif, 0);
    const BranchPoint& p = o.branch.points[o.bif];
    ASSERT_EQ(p.kernel.cols(), 1);
    Field phi = Field::from_stacked(o.d, p.kernel.col(0));
    EXPECT_EQ(dominant_mode(phi, 30), 8);
}

TEST(Bifurcation, SwitchGivesPhaseOppositeStripes) {
    const Onset& o = onset_branch();
    ASSERT_GE(o.bif, 0);
    const Continuation c(o.d, o.base);
    const BranchPoint& bif = o.branch.points[o.bif];
    const double amp = 1e-3;
    const BranchPoint hot = c.switch_branch(bif, +1, amp), cold = c.switch_branch(bif, -1, amp);
    EXPECT_GT(rms_distance(hot.field, bif.field), amp / 2);
    EXPECT_GT(rms_distance(cold.field, bif.field), amp / 2);
    EXPECT_LT(hot.residual, 1e-8);
    EXPECT_LT(cosine_mode(hot.field, 8) * cosine_mode(cold.field, 8), 0.0);
    // a regular point carries no crossing vector
    EXPECT_THROW(c.switch_branch(o.branch.points.front(), +1, amp), DegenerateError);
}

TEST(Snapshot, RestartReproducesRows) {
    const Onset& o = onset_branch();
    const Continuation c(o.d, o.base);
    const Branch full = c.continue_branch(o.branch.points.front(), +1, 12);
    const auto dir = std::filesystem::temp_directory_path() / "benthic_snapshot_test";
    std::filesystem::create_directories(dir);
    write_snapshot(dir / "p6", full.points[6]);
    const BranchPoint back = read_snapshot(dir / "p6");
    EXPECT_LT(c.residual_norm(back.field, back.sigma), 1e-8);
    const Branch rest = c.continue_branch(back, +1, 6);
    ASSERT_EQ(rest.points.size(), 7u);
    for (int i = 0; i <= 6; ++i) {
        const BranchPoint &a = full.points[6 + i], &b = rest.points[i];
        EXPECT_NEAR(a.sigma, b.sigma, 1e-10) << i;
        EXPECT_NEAR(a.norms.u.l2, b.norms.u.l2, 1e-10) << i;
        EXPECT_NEAR(a.norms.v.l8, b.norms.v.l8, 1e-10) << i;
        EXPECT_EQ(a.n_unstable, b.n_unstable);
    }
    std::filesystem::remove_all(dir);
}

TEST(Csv, HeaderAndRows) {
    const Branch b = homogeneous_through_fold(0.01);
    std::ostringstream os;
    write_branch_csv(os, b);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "idx,sigma,u_l1,u_l2,u_l8,v_l1,v_l2,v_l8,n_unstable,tag");
    int rows = 0, folds = 0;
    while (std::getline(is, line)) {
        ++rows;
        folds += line.ends_with(",fold");
    }
    EXPECT_EQ(rows, static_cast<int>(b.points.size()));
    EXPECT_EQ(folds, 1);
    EXPECT_EQ(parse_tag("bifurcation"), PointTag::Bifurcation);
    EXPECT_THROW(parse_tag("cusp"), MismatchError);
}

}  // namespace
}  // namespace benthic
