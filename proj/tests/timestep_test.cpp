#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include <Eigen/SparseLU>

#include "benthic/continuation.hpp"
#include "benthic/homogeneous.hpp"
#include "benthic/landau.hpp"
#include "benthic/timestep.hpp"

namespace benthic {
namespace {

using std::numbers::pi;

// One IMEX step by a sparse solve with the assembled Laplacian.
Field reference_step(const Field& w, const ParameterSet& p, double dt) {
    const Domain& d = w.domain;
    const int n = d.size();
    const SparseOperator L = assemble_laplacian(d);
    SparseOperator I(n, n);
    I.setIdentity();
    Field r = w;
    for (int i = 0; i < n; ++i) {
        ParameterSet q = p;
        q.sigma = w.sigma_at(i, p);
        const StateVector f = reaction({w.u[i], w.v[i]}, q);
        r.u[i] += dt * f.u;
        r.v[i] += dt * f.v;
    }
    Eigen::SparseLU<SparseOperator> lu;
    lu.compute(SparseOperator(I - dt * L));
    r.u = lu.solve(r.u);
    lu.compute(SparseOperator(I - dt * p.delta() * L));
    r.v = lu.solve(r.v);
    return r;
}

TEST(Imex, TransformSolveMatchesSparseSolve) {
    const ParameterSet p = ParameterSet::standard(0.1, 0.25);
    for (const Domain& d : {Domain::line(0.0, 70.0, 37), Domain::rect(0.0, 60.0, 21, -10.0, 40.0, 13)}) {
        Field w = perturb(homogeneous_field(d, p), 0.05, 3);
        w.sigma = sigma_profile(d, 0.12, 0.05, 20.0);
        const Field ref = reference_step(w, p, 0.7);
        ImexStepper(d, p, 0.7).step(w);
        EXPECT_LT((w.u - ref.u).lpNorm<Eigen::Infinity>(), 1e-12);
        EXPECT_LT((w.v - ref.v).lpNorm<Eigen::Infinity>(), 1e-12);
    }
}

TEST(Imex, StableRootIsStationary) {
    const ParameterSet p = ParameterSet::standard(0.2, 0.25);
    const Domain d = Domain::rect(0.0, 50.0, 17, 0.0, 30.0, 11);
    IntegrationRun run;
    run.initial = perturb(homogeneous_field(d, p), 0.0, 1);
    run.t_end = 300.0;
    run.snapshot_times = {0.0, 150.0, 300.0};
    const Trajectory tr = integrate(run, p);
    EXPECT_TRUE(tr.quiescent);
    EXPECT_DOUBLE_EQ(tr.t, 100.0);
    ASSERT_EQ(tr.snapshots.size(), 1u);
    EXPECT_LT(rms_distance(tr.final, run.initial), 1e-13);
    run.stop_when_quiescent = false;
    const Trajectory full = integrate(run, p);
    ASSERT_EQ(full.times.size(), 3u);
    EXPECT_DOUBLE_EQ(full.times[1], 150.0);
    EXPECT_LT(rms_distance(full.snapshots[2], run.initial), 1e-13);
}

TEST(Imex, BlowUpReportsTime) {
    const ParameterSet p = ParameterSet::standard(0.1, 0.25);
    const Domain d = Domain::line(0.0, 50.0, 11);
    IntegrationRun run;
    run.initial = Field::uniform(d, {20.0, 0.01});
    run.dt = 50.0;
    run.t_end = 5000.0;
    try {
        integrate(run, p);
        FAIL() << "expected an instability";
    } catch (const InstabilityError& e) {
        EXPECT_GT(e.time(), 0.0);
        EXPECT_NE(std::string(e.what()).find("t = "), std::string::npos);
    }
}

TEST(Imex, RejectsBadRuns) {
    const Domain d = Domain::line(0.0, 50.0, 11);
    IntegrationRun run;
    run.initial = Field::uniform(d, {1.0, 1.0});
    run.dt = 0.0;
    EXPECT_THROW(run.validate(), DomainError);
    run.dt = 0.1;
    run.snapshot_times = {5.0, 1.0};
    EXPECT_THROW(run.validate(), DomainError);
}

TEST(Perturb, SeededUniformNoise) {
    const Domain d = Domain::rect(0.0, 1.0, 100, 0.0, 1.0, 100);
    const Field base = Field::uniform(d, {1.0, 2.0});
    const Field same = perturb(base, 0.0, 9);
    EXPECT_EQ(same.u, base.u);
    EXPECT_EQ(same.v, base.v);
    const double amp = 0.01;
    const Field a = perturb(base, amp, 9), b = perturb(base, amp, 9), c = perturb(base, amp, 10);
    EXPECT_EQ(a.u, b.u);
    EXPECT_EQ(a.v, b.v);
    EXPECT_NE(a.u, c.u);
    const double bound = 3 * amp / std::sqrt(3.0 * d.size());
    EXPECT_LT(std::abs((a.u.array() - 1.0).mean()), bound);
    EXPECT_LT(std::abs((a.v.array() - 2.0).mean()), bound);
    EXPECT_LE((a.u.array() - 1.0).abs().maxCoeff(), amp);
    EXPECT_THROW(perturb(base, -1.0, 1), DomainError);
}

// 1D pattern selection from noise; the quiescent state is a steady state.
Trajectory settle(double dt) {
    const ParameterSet p = ParameterSet::standard(0.1, 0.25);
    const Domain d = Domain::line(0.0, 4 * 2 * pi / 0.1929, 65);
    IntegrationRun run;
    run.initial = perturb(homogeneous_field(d, p), 0.01, 5);
    run.dt = dt;
    run.t_end = 40000.0;
    return integrate(run, p);
}

TEST(Imex, QuiescentStateIsSteadyState) {
    const Trajectory tr = settle(0.1);
    ASSERT_TRUE(tr.quiescent) << tr.last_change;
    const ParameterSet p = ParameterSet::standard(0.1, 0.25);
    const Continuation c(tr.final.domain, p);
    const NewtonResult r = c.newton(tr.final, p.sigma);
    ASSERT_TRUE(r.converged);
    EXPECT_LT(r.residual, 1e-8);
    EXPECT_LT(rms_distance(r.field, tr.final), 1e-4);
    EXPECT_GT(norms(r.field).u.l2 - norms(r.field).u.l1, 1e-3);
}

TEST(Imex, HalvedStepKeepsQuiescentNorms) {
    const Trajectory a = settle(0.1), b = settle(0.05);
    ASSERT_TRUE(a.quiescent && b.quiescent);
    const FieldNorms na = norms(a.final), nb = norms(b.final);
    EXPECT_NEAR(na.u.l1, nb.u.l1, 1e-4);
    EXPECT_NEAR(na.u.l2, nb.u.l2, 1e-4);
    EXPECT_NEAR(na.v.l8, nb.v.l8, 1e-4);
}

TEST(Imex, BitIdenticalReruns) {
    const ParameterSet p = ParameterSet::standard(0.08, 0.25);
    const Domain d = Domain::rect(0.0, 65.0, 33, 0.0, 65.0, 33);
    IntegrationRun run;
    run.initial = perturb(Field::uniform(d, {1.0, 1.0}), 0.01, 11);
    run.t_end = 200.0;
    const Trajectory a = integrate(run, p), b = integrate(run, p);
    EXPECT_EQ(a.final.u, b.final.u);
    EXPECT_EQ(a.final.v, b.final.v);
}

TEST(Strips, StripeFieldsInEitherOrientation) {
    const double k = 0.19;
    const Domain d = Domain::rect(0.0, 8 * pi / k, 65, 0.0, 200.0, 101);
    Field x = Field::uniform(d, {1.0, 1.0}), y = x;
    for (int i = 0; i < d.size(); ++i) {
        const auto c = x.coords(i);
        x.u[i] += 0.3 * std::cos(k * c[0]);
        y.u[i] += 0.3 * std::cos(k * c[1]);
    }
    for (const auto& s : classify_strips(x, 2 * pi / k)) EXPECT_EQ(s.label, StripLabel::Stripes) << s.index;
    for (const auto& s : classify_strips(y, 2 * pi / k)) EXPECT_EQ(s.label, StripLabel::Stripes) << s.index;
}

TEST(Strips, LandauHexagonsHotAndCold) {
    const ParameterSet base = ParameterSet::standard(0.1, 0.25);
    const CriticalPoint cp = critical_point(base, 0.11, 0.14);
    const auto lc = onset_coefficients(base, cp, 1, cp.sigma + 0.001);
    const auto [h1, h2] = hexagon_amplitudes(lc);
    const double lx = 4 * pi / cp.k, ly = 4 * pi / (std::sqrt(3.0) * cp.k);
    const Domain d = Domain::rect(-lx, lx, 65, -ly, ly, 41);
    for (double H : {h1, h2}) {
        const Field w = reconstruct_field({H, H, H, PatternTag::HexagonPlus}, lc, d);
        // maxima of u at the lattice points when H Phi_u > 0
        const StripLabel want = H * lc.Phi[0].real() > 0 ? StripLabel::SpotsHot : StripLabel::SpotsCold;
        const auto strips = classify_strips(w, ly);
        ASSERT_EQ(strips.size(), 2u);
        for (const auto& s : strips) {
            EXPECT_EQ(s.label, want) << "H = " << H << " anisotropy " << s.anisotropy << " skew " << s.skewness;
        }
    }
}

TEST(Strips, HomogeneousAndCsv) {
    const Domain d = Domain::rect(0.0, 100.0, 21, 0.0, 90.0, 31);
    const auto strips = classify_strips(Field::uniform(d, {1.2, 3.0}), 30.0);
    ASSERT_EQ(strips.size(), 3u);
    for (const auto& s : strips) EXPECT_EQ(s.label, StripLabel::Homogeneous);
    EXPECT_DOUBLE_EQ(strips[1].y_center, 45.0);
    std::ostringstream os;
    write_layering_csv(os, strips);
    EXPECT_EQ(os.str(), "strip_index,y_center,label\n0,15,homogeneous\n1,45,homogeneous\n2,75,homogeneous\n");
    EXPECT_THROW(classify_strips(Field::uniform(Domain::line(0, 1, 5), {1, 1}), 1.0), MismatchError);
}

}  // namespace
}  // namespace benthic
