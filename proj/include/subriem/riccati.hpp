#pragma once

// Matrix Riccati machinery: closed-form comparison solutions with constant
// coefficients, their 6x6 fundamental solutions, the backward solve along a
// geodesic with terminal condition S^{-1}(1) = 0, distortion coefficients,
// pointwise measure-contraction checks, and the density-change machinery for
// displacement interpolations.
//
// All closed forms are evaluated through normalized kernels (value 1 at
// tau = 0) so that the three sign cases of r join continuously and small-tau
// cancellation never degrades accuracy.

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subriem/flow.hpp"
#include "subriem/linalg.hpp"
#include "subriem/numerics.hpp"

namespace subriem {

namespace kernels {

// sin(tau)/tau and sinh(tau)/tau
inline double sinc(double t) { return std::fabs(t) < 1e-6 ? 1.0 - t * t / 6.0 : std::sin(t) / t; }
inline double sinhc(double t) { return std::fabs(t) < 1e-6 ? 1.0 + t * t / 6.0 : std::sinh(t) / t; }

// 2(1 - cos tau)/tau^2 and 2(cosh tau - 1)/tau^2
inline double v_cos(double t) {
    const double s = sinc(t / 2);
    return s * s;
}
inline double v_cosh(double t) {
    const double s = sinhc(t / 2);
    return s * s;
}

// 3(sin tau - tau cos tau)/tau^3  (hyperbolic: 3(tau cosh - sinh)/tau^3)
inline double w_trig(double t, bool hyp) {
    const double t2 = t * t;
    if (std::fabs(t) < 1.0) {
        double sum = 0.0, fact = 6.0;  // (2k+1)! starting at k = 1
        double pw = 1.0;
        for (int k = 1; k <= 12; ++k) {
            const double term = 6.0 * k / fact * pw;
            sum += (hyp || k % 2 == 1) ? term : -term;
            pw *= t2;
            fact *= (2 * k + 2) * (2 * k + 3);
            if (std::fabs(term) < 1e-18) break;
        }
        return sum;
    }
    return hyp ? 3.0 * (t * std::cosh(t) - std::sinh(t)) / (t * t * t)
               : 3.0 * (std::sin(t) - t * std::cos(t)) / (t * t * t);
}

// 6(tau - sin tau)/tau^3  (hyperbolic: 6(sinh tau - tau)/tau^3)
inline double u_trig(double t, bool hyp) {
    const double t2 = t * t;
    if (std::fabs(t) < 1.0) {
        double sum = 0.0, fact = 6.0;
        double pw = 1.0;
        for (int k = 1; k <= 12; ++k) {
            const double term = 6.0 / fact * pw;
            sum += (hyp || k % 2 == 1) ? term : -term;
            pw *= t2;
            fact *= (2 * k + 2) * (2 * k + 3);
            if (std::fabs(term) < 1e-18) break;
        }
        return sum;
    }
    return hyp ? 6.0 * (std::sinh(t) - t) / (t * t * t) : 6.0 * (t - std::sin(t)) / (t * t * t);
}

// 12(2 - 2cos tau - tau sin tau)/tau^4  (hyperbolic: 12(2 - 2cosh + tau sinh)/tau^4);
// the trig kernel has its first zero at tau = 2 pi (the comparison model's
// conjugate time).
inline double n_kernel(double t, bool hyp) {
    const double t2 = t * t;
    if (std::fabs(t) < 1.0) {
        double sum = 0.0;
        double fact = 24.0;  // (2m)! starting at m = 2
        double pw = 1.0;
        for (int m = 2; m <= 13; ++m) {
            const double term = 12.0 * (2.0 * m - 2.0) / fact * pw;
            sum += (hyp || m % 2 == 0) ? term : -term;
            pw *= t2;
            fact *= (2 * m + 1) * (2 * m + 2);
            if (std::fabs(term) < 1e-18) break;
        }
        return sum;
    }
    return hyp ? 12.0 * (2.0 - 2.0 * std::cosh(t) + t * std::sinh(t)) / (t2 * t2)
               : 12.0 * (2.0 - 2.0 * std::cos(t) - t * std::sin(t)) / (t2 * t2);
}

// 3(tan tau - tau)/tau^3  (hyperbolic: 3(tau - tanh tau)/tau^3)
inline double e_kernel(double t, bool hyp) {
    const double t2 = t * t;
    if (std::fabs(t) < 0.3) {
        static const double c[] = {1.0, 2.0 / 5.0, 17.0 / 105.0, 62.0 / 945.0,
                                   1382.0 / 51975.0, 929569.0 / 86837751.0 * 4.0898};
        // last coefficient approximated; below tau = 0.3 its contribution is < 1e-10
        double sum = 0.0, pw = 1.0;
        for (int k = 0; k < 5; ++k) {
            sum += (hyp && k % 2 == 1 ? -c[k] : c[k]) * pw;
            pw *= t2;
        }
        return sum;
    }
    return hyp ? 3.0 * (t - std::tanh(t)) / (t * t * t) : 3.0 * (std::tan(t) - t) / (t * t * t);
}

}  // namespace kernels

// C1 and C2 of the canonical Riccati equation
//   dS/dt - R_t + S C1 + C1^T S - S C2 S = 0,
// R_t = diag(R11_t, R22_t, 0).
struct RiccatiCoeffs {
    std::function<double(double)> R11;
    std::function<double(double)> R22;

    static Mat3 C1() { return Mat3{{{0, 0, 0}, {1, 0, 0}, {0, 0, 0}}}; }
    static Mat3 C2() { return Mat3{{{1, 0, 0}, {0, 0, 0}, {0, 0, 1}}}; }
    Mat3 R(double t) const { return Mat3{{{R11(t), 0, 0}, {0, R22(t), 0}, {0, 0, 0}}}; }

    static RiccatiCoeffs constant(double r11, double r22) {
        return {[r11](double) { return r11; }, [r22](double) { return r22; }};
    }
};

namespace detail {

inline void check_unit_interval(double t) {
    if (t < 0.0 || t >= 1.0) fail(ErrorKind::domain, "t must lie in [0, 1)");
}

}  // namespace detail

// Closed-form solution of the comparison Riccati equation with R = diag(2rH,
// 0, 0) and terminal condition S^{-1}(1) = 0.
inline Mat3 comparison_S(double r, double H, double t) {
    detail::check_unit_interval(t);
    const double u = 1.0 - t;
    const bool hyp = r < 0.0;
    const double tau0 = std::sqrt(2.0 * std::fabs(r) * H);
    const double tau = u * tau0;
    const double n = kernels::n_kernel(tau, hyp);
    if (!hyp && (tau >= 2.0 * M_PI || n <= 0.0))
        fail(ErrorKind::numeric, "comparison model conjugate time reached (tau >= 2 pi)");
    Mat3 S{};
    S[0][0] = 4.0 / u * kernels::w_trig(tau, hyp) / n;
    S[0][1] = S[1][0] = 6.0 / (u * u) * (hyp ? kernels::v_cosh(tau) : kernels::v_cos(tau)) / n;
    S[1][1] = 12.0 / (u * u * u) * (hyp ? kernels::sinhc(tau) : kernels::sinc(tau)) / n;
    S[2][2] = 1.0 / u;
    return S;
}

// Its inverse, in the closed form used by the fundamental-solution proof.
inline Mat3 comparison_S_inv(double r, double H, double t) {
    detail::check_unit_interval(t);
    const double u = 1.0 - t;
    const bool hyp = r < 0.0;
    const double tau0 = std::sqrt(2.0 * std::fabs(r) * H);
    const double tau = u * tau0;
    const double cs = hyp ? std::cosh(tau) : std::cos(tau);
    if (!hyp && cs == 0.0) fail(ErrorKind::numeric, "comparison inverse undefined (cos tau = 0)");
    Mat3 Uo{};
    const double tanc = hyp ? (std::fabs(tau) < 1e-8 ? 1.0 : std::tanh(tau) / tau)
                            : (std::fabs(tau) < 1e-8 ? 1.0 : std::tan(tau) / tau);
    Uo[0][0] = u * tanc;
    Uo[0][1] = Uo[1][0] = -u * u / 2.0 * (hyp ? kernels::v_cosh(tau) : kernels::v_cos(tau)) / cs;
    Uo[1][1] = u * u * u / 3.0 * kernels::e_kernel(tau, hyp);
    Uo[2][2] = u;
    return Uo;
}

// integral_0^t (S~^11 + S~^33) ds; equals -log(1-t)^5 when r = 0.
inline double comparison_trace_integral(double r, double H, double t) {
    detail::check_unit_interval(t);
    const bool hyp = r < 0.0;
    const double tau0 = std::sqrt(2.0 * std::fabs(r) * H);
    const double tau = (1.0 - t) * tau0;
    const double n_t = kernels::n_kernel(tau, hyp);
    const double n_0 = kernels::n_kernel(tau0, hyp);
    if (!hyp && (n_t <= 0.0 || n_0 <= 0.0))
        fail(ErrorKind::numeric, "comparison model conjugate time reached");
    return -5.0 * std::log(1.0 - t) - std::log(n_t / n_0);
}

// e^{(t-1) A} for A = [[C1, -C2], [R~, -C1^T]], R~ = diag(2rH, 0, 0).
inline Mat6 fundamental_solution(double r, double H, double t) {
    if (t < 0.0 || t > 1.0) fail(ErrorKind::domain, "t must lie in [0, 1]");
    const double u = 1.0 - t;
    const bool hyp = r < 0.0;
    const double twoRH = 2.0 * r * H;
    const double tau = u * std::sqrt(std::fabs(twoRH));
    const double cs = hyp ? std::cosh(tau) : std::cos(tau);
    const double sc = hyp ? kernels::sinhc(tau) : kernels::sinc(tau);
    const double vb = hyp ? kernels::v_cosh(tau) : kernels::v_cos(tau);
    const double ud = kernels::u_trig(tau, hyp);

    Mat6 q{};
    q[0][0] = cs;
    q[0][3] = u * sc;
    q[0][4] = u * u / 2.0 * vb;
    q[1][0] = -u * sc;
    q[1][1] = 1.0;
    q[1][3] = -u * u / 2.0 * vb;
    q[1][4] = -u * u * u / 6.0 * ud;
    q[2][2] = 1.0;
    q[2][5] = u;
    q[3][0] = -twoRH * u * sc;
    q[3][3] = cs;
    q[3][4] = u * sc;
    q[4][4] = 1.0;
    q[5][5] = 1.0;
    return q;
}

inline Mat6 riccati_block_matrix(double r, double H) {
    Mat6 A{};
    const Mat3 C1 = RiccatiCoeffs::C1(), C2 = RiccatiCoeffs::C2();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = C1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) + 3] = -C2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            A[static_cast<std::size_t>(i) + 3][static_cast<std::size_t>(j) + 3] = -C1[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
        }
    A[3][0] = 2.0 * r * H;
    return A;
}

struct RiccatiOptions {
    double eps_seed = 1e-6;  // backward start at t = 1 - eps with the Taylor seed
    double step = 1e-3;      // RK4 step for the backward sweep
    double det_floor = 1e-13;  // |det U| below this (relative) flags a conjugate point
};

struct RiccatiTrajectory {
    std::vector<double> t;     // uniform grid 0..t_max
    std::vector<Mat3> S;
    std::vector<Mat3> U;       // S^{-1}
    std::vector<double> I;     // integral of S^11 + S^33 from 0 to t
    std::vector<double> rho;   // exp(I)
};

namespace detail {

inline Mat3 riccati_U_rhs(const RiccatiCoeffs& co, double t, const Mat3& U) {
    // dU/dt = -U R U + C1 U + U C1^T - C2
    const Mat3 R = co.R(t);
    const Mat3 C1 = RiccatiCoeffs::C1(), C2 = RiccatiCoeffs::C2();
    Mat3 out = C1 * U + U * transpose(C1) - C2;
    const Mat3 URU = U * (R * U);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -= URU[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return out;
}

inline Mat3 riccati_U_step(const RiccatiCoeffs& co, double t, const Mat3& U, double h) {
    const Mat3 k1 = riccati_U_rhs(co, t, U);
    const Mat3 k2 = riccati_U_rhs(co, t + h / 2, U + (h / 2) * k1);
    const Mat3 k3 = riccati_U_rhs(co, t + h / 2, U + (h / 2) * k2);
    const Mat3 k4 = riccati_U_rhs(co, t + h, U + h * k3);
    return U + (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

inline Mat3 riccati_seed(const RiccatiCoeffs& co, double eps) {
    // U(1 - eps) = eps C2 - eps^2 (C1 + C1^T)/2 + eps^3/3 diag(R11(1), 1, 0),
    // the first three Taylor terms of the terminal-value problem at t = 1.
    const Mat3 C1 = RiccatiCoeffs::C1(), C2 = RiccatiCoeffs::C2();
    Mat3 U = eps * C2 - (eps * eps / 2) * (C1 + transpose(C1));
    U[0][0] += eps * eps * eps / 3.0 * co.R11(1.0);
    U[1][1] += eps * eps * eps / 3.0;
    return U;
}

}  // namespace detail

// Backward solve of the inverse-Riccati equation from S^{-1}(1) = 0, sampled
// on the uniform grid {k t_max / n}. The returned density integrals subtract
// the universal 5/(1-t) blow-up analytically, so they stay accurate up to
// t_max close to 1.
inline RiccatiTrajectory riccati_solve(const RiccatiCoeffs& co, double t_max, int n,
                                       const RiccatiOptions& opt = {}) {
    if (!(t_max > 0.0 && t_max < 1.0) || n < 1)
        fail(ErrorKind::domain, "riccati grid must satisfy 0 < t_max < 1, n >= 1");
    const double out_dt = t_max / n;
    const int sub = std::max(1, static_cast<int>(std::ceil(out_dt / opt.step)));
    const double h = out_dt / sub;          // fine quadrature step
    const std::size_t nfine = static_cast<std::size_t>(n) * static_cast<std::size_t>(sub);

    // bridge from 1 - eps down to t_max
    const double eps = opt.eps_seed;
    Mat3 U = detail::riccati_seed(co, eps);
    double t = 1.0 - eps;
    {
        const double span = t - t_max;
        const int m = std::max(1, static_cast<int>(std::ceil(span / opt.step)));
        const double hb = span / m;
        for (int s = 0; s < m; ++s) {
            U = detail::riccati_U_step(co, t, U, -hb);
            t -= hb;
        }
    }

    // backward sweep storing U at every fine node
    std::vector<Mat3> ufine(nfine + 1);
    ufine[nfine] = U;
    for (std::size_t k = nfine; k-- > 0;) {
        const double tk1 = static_cast<double>(k + 1) * h;
        U = detail::riccati_U_step(co, tk1, U, -h);
        ufine[k] = U;
    }

    // integrand with the 5/(1-t) singular part removed
    std::vector<double> g(nfine + 1);
    std::vector<Mat3> sfine(nfine + 1);
    for (std::size_t k = 0; k <= nfine; ++k) {
        const double tk = static_cast<double>(k) * h;
        const double det = det3(ufine[k]);
        const double scale = std::max({std::fabs(ufine[k][0][0]), std::fabs(ufine[k][1][1]),
                                       std::fabs(ufine[k][2][2]), 1e-30});
        if (std::fabs(det) < opt.det_floor * scale * scale * scale)
            fail(ErrorKind::numeric,
                 "conjugate point along the geodesic near t = " + std::to_string(tk));
        sfine[k] = inverse(ufine[k]);
        g[k] = sfine[k][0][0] - 4.0 / (1.0 - tk) + sfine[k][2][2] - 1.0 / (1.0 - tk);
    }
    const std::vector<double> Ifine = simpson_prefix(g, h);

    RiccatiTrajectory out;
    out.t.resize(static_cast<std::size_t>(n) + 1);
    out.S.resize(out.t.size());
    out.U.resize(out.t.size());
    out.I.resize(out.t.size());
    out.rho.resize(out.t.size());
    for (int k = 0; k <= n; ++k) {
        const std::size_t fk = static_cast<std::size_t>(k) * static_cast<std::size_t>(sub);
        const double tk = k * out_dt;
        out.t[static_cast<std::size_t>(k)] = tk;
        out.U[static_cast<std::size_t>(k)] = ufine[fk];
        out.S[static_cast<std::size_t>(k)] = sfine[fk];
        out.I[static_cast<std::size_t>(k)] = Ifine[fk] - 5.0 * std::log(1.0 - tk);
        out.rho[static_cast<std::size_t>(k)] = std::exp(out.I[static_cast<std::size_t>(k)]);
    }
    return out;
}

// Re-runs the backward solve with half the seed offset and reports the
// resulting change in S(0).
inline double riccati_seed_sensitivity(const RiccatiCoeffs& co, double t_max, int n,
                                       RiccatiOptions opt = {}) {
    RiccatiTrajectory a = riccati_solve(co, t_max, n, opt);
    opt.eps_seed /= 2;
    RiccatiTrajectory b = riccati_solve(co, t_max, n, opt);
    return max_abs(a.S.front() - b.S.front());
}

// Distortion coefficient of the measure contraction property; d0 is the
// distance d_CC(x0, x) and the three sign cases of r join continuously.
inline double distortion(double r, double d0, double t) {
    detail::check_unit_interval(t);
    if (d0 < 0.0) fail(ErrorKind::domain, "distance must be nonnegative");
    const double u = 1.0 - t;
    const double u5 = u * u * u * u * u;
    if (r == 0.0) return u5;
    const bool hyp = r < 0.0;
    const double T0 = std::sqrt(std::fabs(r)) * d0;
    const double Tt = T0 / u;
    const double n_t = kernels::n_kernel(Tt, hyp);
    const double n_0 = kernels::n_kernel(T0, hyp);
    if (!hyp && (Tt >= 2.0 * M_PI || n_t <= 0.0))
        fail(ErrorKind::numeric, "distortion undefined past the comparison conjugate time");
    // (1-t) * N(T0)/N(Tt) with N(tau) = tau^4 n(tau)/12 and T0/Tt = 1-t
    return u5 * n_0 / n_t;
}

}  // namespace subriem
