#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "subriem/flow.hpp"
#include "subriem/models.hpp"

using namespace subriem;

namespace {

struct Fixture {
    ModelDef def;
    ContactStructure cs;
    LiftedFields lf;
    explicit Fixture(ModelDef m) : def(std::move(m)), cs(ContactStructure::build(def.frame)), lf(cs) {}
};

Fixture& heis_fix() {
    static Fixture f(heisenberg());
    return f;
}
Fixture& hopf_fix() {
    static Fixture f(hopf());
    return f;
}

}  // namespace

TEST_SUITE_BEGIN("flow");

TEST_CASE("Heisenberg geodesic with p3 = 0 is a straight line with the z quadrature") {
    auto& F = heis_fix();
    const double x0 = 0.3, y0 = -0.2, z0 = 0.1, p1 = 0.8, p2 = -0.5;
    PhasePoint alpha{{x0, y0, z0}, {p1, p2, 0.0}};
    Trajectory traj = integrate_flow(F.lf, alpha, 1.0, {}, 50);
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const double t = traj.t[k];
        const Vec6& y = traj.y[k];
        CHECK(y[0] == doctest::Approx(x0 + p1 * t).epsilon(1e-8));
        CHECK(y[1] == doctest::Approx(y0 + p2 * t).epsilon(1e-8));
        CHECK(y[2] == doctest::Approx(z0 + (x0 * p2 - y0 * p1) * t / 2).epsilon(1e-8).scale(1.0));
        CHECK(y[5] == doctest::Approx(0.0).scale(1.0));
    }
}

TEST_CASE("T = 0 yields a single sample equal to alpha") {
    auto& F = heis_fix();
    PhasePoint alpha{{0.1, 0.2, 0.3}, {1.0, 0.5, 0.25}};
    Trajectory traj = integrate_flow(F.lf, alpha, 0.0);
    REQUIRE(traj.t.size() == 1);
    CHECK(traj.y[0][0] == doctest::Approx(0.1));
    CHECK(traj.y[0][3] == doctest::Approx(1.0));
}

TEST_CASE("energy is conserved to 1e-10 on the Hopf model with default settings") {
    auto& F = hopf_fix();
    PhasePoint alpha = phase_from_h(F.cs, {0.2, -0.3, 0.1}, {0.6, 0.8, 0.3});
    Trajectory traj = integrate_flow(F.lf, alpha, 1.0, {}, 100);
    CHECK(traj.energy_ok);
    CHECK(traj.max_energy_drift <= 1e-10 * std::max(1.0, traj.H0));
}

TEST_CASE("h0 is a constant of motion on bundle-type models") {
    for (auto* F : {&heis_fix(), &hopf_fix()}) {
        CAPTURE(F->def.name);
        PhasePoint alpha = phase_from_h(F->cs, {0.25, 0.1, -0.2}, {-0.7, 0.5, 0.6});
        Trajectory traj = integrate_flow(F->lf, alpha, 1.0, {}, 60);
        CHECK(traj.max_h0_drift <= 1e-8 * std::max(1.0, std::fabs(traj.h0_0)));
    }
}

TEST_CASE("adaptive integrator lands on the fixed-step orbit") {
    auto& F = hopf_fix();
    PhasePoint alpha = phase_from_h(F.cs, {0.1, 0.2, -0.1}, {0.4, 0.9, -0.2});
    Trajectory fixed = integrate_flow(F.lf, alpha, 1.0, {}, 10);
    FlowOptions opt;
    opt.adaptive = true;
    opt.tol = 1e-11;
    Trajectory ad = integrate_flow(F.lf, alpha, 1.0, opt, 10);
    for (std::size_t k = 0; k < fixed.t.size(); ++k)
        for (int i = 0; i < 6; ++i)
            CHECK(ad.y[k][static_cast<std::size_t>(i)] ==
                  doctest::Approx(fixed.y[k][static_cast<std::size_t>(i)]).epsilon(1e-8).scale(1.0));
}

TEST_CASE("frame transport preserves all Darboux pairings along the flow") {
    for (auto* F : {&heis_fix(), &hopf_fix()}) {
        CAPTURE(F->def.name);
        PhasePoint alpha = phase_from_h(F->cs, {0.15, -0.1, 0.2}, {0.5, 0.9, 0.35});
        auto fj = integrate_flow_with_jacobian(F->lf, alpha, 1.0, {}, 40);
        auto tf = transport_frame(F->lf, fj);
        CHECK(transport_darboux_defect(tf) <= 1e-7);
    }
}

TEST_CASE("f3(t) is constant and e3(t) = (E - tH)/sqrt(2H) after pullback") {
    auto& F = heis_fix();
    PhasePoint alpha = phase_from_h(F.cs, {0.3, 0.2, 0.0}, {0.8, 0.7, -0.4});
    auto fj = integrate_flow_with_jacobian(F.lf, alpha, 1.0, {}, 40);
    auto tf = transport_frame(F.lf, fj);
    EvalContext ctx(alpha.flat());
    const double H = F.lf.H().eval(ctx, 0).value();
    const double sq = std::sqrt(2 * H);
    const Vec6 Hv = vf_value(F.lf.Hv(), ctx);
    const Vec6 E0 = vf_value(F.lf.euler(), ctx);
    for (std::size_t k = 0; k < tf.t.size(); ++k) {
        for (int i = 0; i < 6; ++i) {
            const auto ii = static_cast<std::size_t>(i);
            CHECK(tf.frames[k].f[2][ii] == doctest::Approx(-Hv[ii] / sq).epsilon(1e-7).scale(1.0));
            const double e3_want = (E0[ii] - tf.t[k] * Hv[ii]) / sq;
            CHECK(tf.frames[k].e[2][ii] == doctest::Approx(e3_want).epsilon(1e-7).scale(1.0));
        }
    }
}

TEST_CASE("Euler field pullback matches E - tH on both builtin models") {
    for (auto* F : {&heis_fix(), &hopf_fix()}) {
        CAPTURE(F->def.name);
        PhasePoint alpha = phase_from_h(F->cs, {0.2, 0.15, -0.25}, {0.6, 0.8, -0.3});
        auto fj = integrate_flow_with_jacobian(F->lf, alpha, 1.0, {}, 50);
        CHECK(euler_pullback_residual(F->lf, fj) <= 1e-7);
    }
}

TEST_CASE("structural equations hold along the flow; R^11 routes agree") {
    for (auto* F : {&heis_fix(), &hopf_fix()}) {
        CAPTURE(F->def.name);
        PhasePoint alpha = phase_from_h(F->cs, {0.1, -0.15, 0.2}, {0.5, 1.0, 0.2});
        FlowOptions opt;
        opt.step = 1e-3;
        auto fj = integrate_flow_with_jacobian(F->lf, alpha, 1.0, opt, 100);
        auto tf = transport_frame(F->lf, fj);
        auto res = structural_residuals(F->lf, fj, tf);
        CHECK(res.e1 <= 1e-5);
        CHECK(res.e2 <= 1e-5);
        CHECK(res.e3 <= 1e-5);
        CHECK(res.f1 <= 1e-5);
        CHECK(res.f2 <= 1e-5);
        CHECK(res.f3 <= 1e-7);
        CHECK(res.r11_gap <= 1e-5);
    }
}

TEST_CASE("residuals converge at 4th order: halving the sampling step gains >= 8x") {
    auto& F = hopf_fix();
    PhasePoint alpha = phase_from_h(F.cs, {0.15, 0.1, -0.1}, {0.6, 0.9, 0.3});
    auto run = [&](int samples) {
        FlowOptions opt;
        opt.step = 1.0 / samples;  // sampling grid = integration grid
        auto fj = integrate_flow_with_jacobian(F.lf, alpha, 1.0, opt, samples);
        auto tf = transport_frame(F.lf, fj);
        auto res = structural_residuals(F.lf, fj, tf);
        return std::max({res.e1, res.e2, res.f1, res.f2});
    };
    const double coarse = run(50);
    const double fine = run(100);
    CHECK(coarse / fine >= 8.0);
    CHECK(fine < 1e-5);
}

TEST_SUITE_END();
