#pragma once

// Hamiltonian flow on the cotangent bundle, the linearized (variational) flow
// for frame transport, and numerical verification of the structural equations
// along geodesics.

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "subriem/lift.hpp"
#include "subriem/numerics.hpp"

namespace subriem {

struct FlowOptions {
    double step = 1e-3;        // fixed RK4 step
    bool adaptive = false;     // use the embedded Dormand-Prince 5(4) pair
    double tol = 1e-9;         // adaptive error tolerance (abs and rel)
    double energy_tol = 1e-8;  // relative drift beyond which the run is flagged
    int max_order = kDefaultMaxOrder;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<Vec6> y;
    double H0 = 0.0;
    double h0_0 = 0.0;
    double max_energy_drift = 0.0;
    double max_h0_drift = 0.0;
    bool energy_ok = true;
    std::string method;

    const Vec6& state(std::size_t k) const { return y[k]; }
};

struct TransportedFrame {
    std::vector<double> t;
    std::vector<DarbouxFrame0> frames;  // pulled back to the initial point
};

struct StructuralResiduals {
    double e1 = 0, e2 = 0, e3 = 0;  // de1 - f1, de2 - e1, de3 - f3
    double f1 = 0, f2 = 0, f3 = 0;  // df1 + R11 e1 + f2, df2 + R22 e2, df3
    double r11_gap = 0;             // relative gap between the two R^11 routes
    double r22_gap = 0;             // absolute gap between the two R^22 routes
};

namespace detail {

class HamiltonianRhs {
public:
    HamiltonianRhs(const LiftedFields& lf, int max_order) : lf_(lf), max_order_(max_order) {}

    Vec6 operator()(const Vec6& y) const {
        EvalContext ctx(std::vector<double>(y.begin(), y.end()), max_order_);
        Vec6 dy;
        for (int i = 0; i < 6; ++i) dy[static_cast<std::size_t>(i)] = lf_.Hv().comp(i).eval(ctx, 0).value();
        return dy;
    }

    // Value and Jacobian of the Hamiltonian field at y.
    std::pair<Vec6, Mat6> with_jacobian(const Vec6& y) const {
        EvalContext ctx(std::vector<double>(y.begin(), y.end()), max_order_);
        Vec6 f;
        Mat6 A;
        for (int i = 0; i < 6; ++i) {
            Jet j = lf_.Hv().comp(i).eval(ctx, 1);
            f[static_cast<std::size_t>(i)] = j.value();
            for (int k = 0; k < 6; ++k) A[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = j.partial(k).value();
        }
        return {f, A};
    }

private:
    const LiftedFields& lf_;
    int max_order_;
};

inline Vec6 axpy6(const Vec6& y, double s, const Vec6& d) {
    Vec6 out;
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + s * d[static_cast<std::size_t>(i)];
    return out;
}

inline Vec6 rk4_step(const HamiltonianRhs& rhs, const Vec6& y, double h) {
    const Vec6 k1 = rhs(y);
    const Vec6 k2 = rhs(axpy6(y, h / 2, k1));
    const Vec6 k3 = rhs(axpy6(y, h / 2, k2));
    const Vec6 k4 = rhs(axpy6(y, h, k3));
    Vec6 out;
    for (int i = 0; i < 6; ++i)
        out[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] +
                                           h / 6 * (k1[static_cast<std::size_t>(i)] + 2 * k2[static_cast<std::size_t>(i)] +
                                                    2 * k3[static_cast<std::size_t>(i)] + k4[static_cast<std::size_t>(i)]);
    return out;
}

// One Dormand-Prince 5(4) step with error estimate; returns (y5, err_norm).
inline std::pair<Vec6, double> dopri_step(const HamiltonianRhs& rhs, const Vec6& y, double h,
                                          double tol) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    (void)c2;
    (void)c3;
    (void)c4;
    (void)c5;
    const Vec6 k1 = rhs(y);
    const Vec6 k2 = rhs(axpy6(y, h * a21, k1));
    Vec6 tmp = y;
    auto acc = [&](std::initializer_list<std::pair<double, const Vec6*>> terms) {
        Vec6 out = y;
        for (auto [w, k] : terms)
            for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] += h * w * (*k)[static_cast<std::size_t>(i)];
        return out;
    };
    const Vec6 k3 = rhs(acc({{a31, &k1}, {a32, &k2}}));
    const Vec6 k4 = rhs(acc({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Vec6 k5 = rhs(acc({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Vec6 k6 = rhs(acc({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Vec6 y5 = acc({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const Vec6 k7 = rhs(y5);
    double err = 0.0;
    for (int i = 0; i < 6; ++i) {
        const double e = h * (e1 * k1[static_cast<std::size_t>(i)] + e3 * k3[static_cast<std::size_t>(i)] + e4 * k4[static_cast<std::size_t>(i)] +
                              e5 * k5[static_cast<std::size_t>(i)] + e6 * k6[static_cast<std::size_t>(i)] + e7 * k7[static_cast<std::size_t>(i)]);
        const double sc = tol + tol * std::fabs(y5[static_cast<std::size_t>(i)]);
        err = std::max(err, std::fabs(e) / sc);
    }
    (void)tmp;
    return {y5, err};
}

// Advance from t to t+span, landing exactly on the endpoint.
inline Vec6 advance(const HamiltonianRhs& rhs, Vec6 y, double span, const FlowOptions& opt) {
    if (span == 0.0) return y;
    if (!opt.adaptive) {
        const int n = std::max(1, static_cast<int>(std::ceil(std::fabs(span) / opt.step)));
        const double h = span / n;
        for (int s = 0; s < n; ++s) y = rk4_step(rhs, y, h);
        return y;
    }
    double t = 0.0;
    double h = std::min(std::fabs(span), opt.step * 10);
    const double dir = span > 0 ? 1.0 : -1.0;
    int guard = 0;
    while (t < std::fabs(span) - 1e-15) {
        if (++guard > 2000000) fail(ErrorKind::numeric, "adaptive integrator stalled");
        h = std::min(h, std::fabs(span) - t);
        auto [ynew, err] = dopri_step(rhs, y, dir * h, opt.tol);
        if (err <= 1.0) {
            y = ynew;
            t += h;
        }
        const double fac = std::clamp(0.9 * std::pow(err > 0 ? err : 1e-10, -0.2), 0.2, 5.0);
        h *= fac;
        if (h < 1e-14) fail(ErrorKind::numeric, "step-size underflow in adaptive integrator");
    }
    return y;
}

}  // namespace detail

// Integrates the Hamiltonian flow from alpha over [0, T], storing samples+1
// equally spaced states (a single state when T == 0).
inline Trajectory integrate_flow(const LiftedFields& lf, const PhasePoint& alpha, double T,
                                 const FlowOptions& opt = {}, int samples = 100) {
    detail::HamiltonianRhs rhs(lf, opt.max_order);
    Trajectory traj;
    traj.method = opt.adaptive ? "dopri54" : "rk4";
    Vec6 y{alpha.q[0], alpha.q[1], alpha.q[2], alpha.p[0], alpha.p[1], alpha.p[2]};

    EvalContext ctx0(alpha.flat(), opt.max_order);
    traj.H0 = lf.H().eval(ctx0, 0).value();
    if (traj.H0 <= 0.0) fail(ErrorKind::domain, "H must be positive along normal geodesics");
    traj.h0_0 = lf.h(0).eval(ctx0, 0).value();

    if (T == 0.0 || samples < 1) {
        traj.t = {0.0};
        traj.y = {y};
        return traj;
    }
    traj.t.reserve(static_cast<std::size_t>(samples) + 1);
    traj.y.reserve(static_cast<std::size_t>(samples) + 1);
    traj.t.push_back(0.0);
    traj.y.push_back(y);
    const double dt = T / samples;
    for (int k = 1; k <= samples; ++k) {
        y = detail::advance(rhs, y, dt, opt);
        traj.t.push_back(k * dt);
        traj.y.push_back(y);
        EvalContext ctx(std::vector<double>(y.begin(), y.end()), opt.max_order);
        const double Hk = lf.H().eval(ctx, 0).value();
        const double h0k = lf.h(0).eval(ctx, 0).value();
        traj.max_energy_drift = std::max(traj.max_energy_drift, std::fabs(Hk - traj.H0));
        traj.max_h0_drift = std::max(traj.max_h0_drift, std::fabs(h0k - traj.h0_0));
    }
    traj.energy_ok = traj.max_energy_drift <= opt.energy_tol * std::max(1.0, std::fabs(traj.H0));
    return traj;
}

// Trajectory plus the flow differential J(t) = d e^{t H} at alpha, from the
// variational equations J' = A(t) J integrated alongside the base state.
struct FlowWithJacobian {
    Trajectory traj;
    std::vector<Mat6> jac;
};

inline FlowWithJacobian integrate_flow_with_jacobian(const LiftedFields& lf,
                                                     const PhasePoint& alpha, double T,
                                                     const FlowOptions& opt = {},
                                                     int samples = 100) {
    detail::HamiltonianRhs rhs(lf, opt.max_order);
    FlowWithJacobian out;
    out.traj.method = "rk4+var";
    EvalContext ctx0(alpha.flat(), opt.max_order);
    out.traj.H0 = lf.H().eval(ctx0, 0).value();
    if (out.traj.H0 <= 0.0) fail(ErrorKind::domain, "H must be positive along normal geodesics");
    out.traj.h0_0 = lf.h(0).eval(ctx0, 0).value();

    Vec6 y{alpha.q[0], alpha.q[1], alpha.q[2], alpha.p[0], alpha.p[1], alpha.p[2]};
    Mat6 J = mat_identity<6>();
    out.traj.t.push_back(0.0);
    out.traj.y.push_back(y);
    out.jac.push_back(J);
    if (T == 0.0 || samples < 1) return out;

    struct State {
        Vec6 y;
        Mat6 J;
    };
    auto deriv = [&](const State& s) {
        auto [f, A] = rhs.with_jacobian(s.y);
        return State{f, A * s.J};
    };
    auto add = [](const State& s, double w, const State& d) {
        State out{s.y, s.J};
        for (int i = 0; i < 6; ++i) {
            out.y[static_cast<std::size_t>(i)] += w * d.y[static_cast<std::size_t>(i)];
            for (int j = 0; j < 6; ++j)
                out.J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += w * d.J[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        return out;
    };

    const double dt = T / samples;
    State s{y, J};
    for (int k = 1; k <= samples; ++k) {
        const int n = std::max(1, static_cast<int>(std::ceil(std::fabs(dt) / opt.step)));
        const double h = dt / n;
        for (int sub = 0; sub < n; ++sub) {
            State k1 = deriv(s);
            State k2 = deriv(add(s, h / 2, k1));
            State k3 = deriv(add(s, h / 2, k2));
            State k4 = deriv(add(s, h, k3));
            State next = add(s, h / 6, k1);
            next = add(next, h / 3, k2);
            next = add(next, h / 3, k3);
            next = add(next, h / 6, k4);
            s = next;
        }
        out.traj.t.push_back(k * dt);
        out.traj.y.push_back(s.y);
        out.jac.push_back(s.J);
        EvalContext ctx(std::vector<double>(s.y.begin(), s.y.end()), opt.max_order);
        const double Hk = lf.H().eval(ctx, 0).value();
        out.traj.max_energy_drift = std::max(out.traj.max_energy_drift, std::fabs(Hk - out.traj.H0));
    }
    out.traj.energy_ok =
        out.traj.max_energy_drift <= opt.energy_tol * std::max(1.0, std::fabs(out.traj.H0));
    return out;
}

// Pulls the canonical frame back along the flow: the frame at time t is the
// canonical Darboux frame evaluated at e^{tH}(alpha), mapped to T_alpha by
// J(t)^{-1}.
inline TransportedFrame transport_frame(const LiftedFields& lf, const FlowWithJacobian& fj,
                                        int max_order = kDefaultMaxOrder) {
    TransportedFrame tf;
    tf.t = fj.traj.t;
    tf.frames.resize(tf.t.size());
    for (std::size_t k = 0; k < tf.t.size(); ++k) {
        const Vec6& y = fj.traj.y[k];
        PhasePoint pt{{y[0], y[1], y[2]}, {y[3], y[4], y[5]}};
        DarbouxFrame0 moving = lf.darboux0(pt, max_order);
        DarbouxFrame0 pulled;
        for (int i = 0; i < 3; ++i) {
            pulled.e[static_cast<std::size_t>(i)] = lu_solve(fj.jac[k], moving.e[static_cast<std::size_t>(i)]);
            pulled.f[static_cast<std::size_t>(i)] = lu_solve(fj.jac[k], moving.f[static_cast<std::size_t>(i)]);
        }
        tf.frames[k] = pulled;
    }
    return tf;
}

// max_t | J(t)^{-1} E(e^{tH} alpha) - (E(alpha) - t H(alpha)) |_inf
inline double euler_pullback_residual(const LiftedFields& lf, const FlowWithJacobian& fj) {
    double worst = 0.0;
    EvalContext ctx0(std::vector<double>(fj.traj.y[0].begin(), fj.traj.y[0].end()));
    const Vec6 E0 = vf_value(lf.euler(), ctx0);
    const Vec6 Hv0 = vf_value(lf.Hv(), ctx0);
    for (std::size_t k = 0; k < fj.traj.t.size(); ++k) {
        const Vec6& y = fj.traj.y[k];
        Vec6 E{0, 0, 0, y[3], y[4], y[5]};
        const Vec6 pulled = lu_solve(fj.jac[k], E);
        for (int i = 0; i < 6; ++i) {
            const double want = E0[static_cast<std::size_t>(i)] - fj.traj.t[k] * Hv0[static_cast<std::size_t>(i)];
            worst = std::max(worst, std::fabs(pulled[static_cast<std::size_t>(i)] - want));
        }
    }
    return worst;
}

// Symplectic pairing defect of the transported frame over all samples.
inline double transport_darboux_defect(const TransportedFrame& tf) {
    double worst = 0.0;
    for (const auto& fr : tf.frames) worst = std::max(worst, darboux_defect(fr));
    return worst;
}

// Structural-equation residuals with 4th-order finite differences in time.
// R^11/R^22 route (i) evaluates the invariant fields at the flowed point;
// route (ii) extracts them from the frame derivatives via omega(df_i, f_i).
inline StructuralResiduals structural_residuals(const LiftedFields& lf,
                                                const FlowWithJacobian& fj,
                                                const TransportedFrame& tf,
                                                int max_order = kDefaultMaxOrder) {
    const std::size_t n = tf.t.size();
    if (n < 5) fail(ErrorKind::numeric, "grid too coarse for 4th-order differences");
    const double h = tf.t[1] - tf.t[0];

    // derivative of each frame vector component series
    auto dframe = [&](auto pick) {
        std::vector<std::array<Vec6, 3>> d(n);
        for (int i = 0; i < 3; ++i)
            for (int c = 0; c < 6; ++c) {
                std::vector<double> series(n);
                for (std::size_t k = 0; k < n; ++k) series[k] = pick(tf.frames[k], i)[static_cast<std::size_t>(c)];
                for (std::size_t k = 0; k < n; ++k) d[k][static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] = stencil_d1(series, k, h);
            }
        return d;
    };
    auto de = dframe([](const DarbouxFrame0& fr, int i) -> const Vec6& { return fr.e[static_cast<std::size_t>(i)]; });
    auto df = dframe([](const DarbouxFrame0& fr, int i) -> const Vec6& { return fr.f[static_cast<std::size_t>(i)]; });

    StructuralResiduals res;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& fr = tf.frames[k];
        const auto R = lf.curvature_pair_at(
            std::vector<double>(fj.traj.y[k].begin(), fj.traj.y[k].end()), max_order);
        const double r11_i = R[0], r22_i = R[1];
        const double r11_ii = omega6(df[k][0], fr.f[0]);
        const double r22_ii = omega6(df[k][1], fr.f[1]);
        res.r11_gap = std::max(res.r11_gap,
                               std::fabs(r11_i - r11_ii) / std::max(1.0, std::fabs(r11_i)));
        res.r22_gap = std::max(res.r22_gap, std::fabs(r22_i - r22_ii));
        for (int c = 0; c < 6; ++c) {
            const auto ci = static_cast<std::size_t>(c);
            res.e1 = std::max(res.e1, std::fabs(de[k][0][ci] - fr.f[0][ci]));
            res.e2 = std::max(res.e2, std::fabs(de[k][1][ci] - fr.e[0][ci]));
            res.e3 = std::max(res.e3, std::fabs(de[k][2][ci] - fr.f[2][ci]));
            res.f1 = std::max(res.f1, std::fabs(df[k][0][ci] + r11_i * fr.e[0][ci] + fr.f[1][ci]));
            res.f2 = std::max(res.f2, std::fabs(df[k][1][ci] + r22_i * fr.e[1][ci]));
            res.f3 = std::max(res.f3, std::fabs(df[k][2][ci]));
        }
    }
    return res;
}

}  // namespace subriem
