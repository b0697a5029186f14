#pragma once

// Cotangent-bundle realization of the frame: Hamiltonian lifts h_i, the
// subriemannian Hamiltonian H, vertical lifts of the co-frame, the fields
// xi_1 / xi_2, and the generalized curvature invariants together with the
// canonical Darboux frame at t = 0.
//
// Canonical coordinates are (q1, q2, q3, p1, p2, p3) with the symplectic form
// omega = sum dp_i ^ dq_i (the exterior derivative of p dq). A Hamiltonian
// field is (dF/dp, -dF/dq) and the vertical lift of a base 1-form beta is
// -sum_j beta_j d/dp_j; these conventions reproduce the pairing identities
// alpha_i(h_j) = -dh_i(alpha_j) = delta_ij used throughout.

#include <array>
#include <vector>

#include "subriem/contact.hpp"
#include "subriem/linalg.hpp"

namespace subriem {

struct PhasePoint {
    std::array<double, 3> q{};
    std::array<double, 3> p{};

    std::vector<double> flat() const { return {q[0], q[1], q[2], p[0], p[1], p[2]}; }
};

struct InvariantRecord {
    double h0 = 0, h1 = 0, h2 = 0, H = 0;
    double a = 0, a_alg = 0;
    double chi0 = 0, chi1 = 0, chi2 = 0;
    double kappa = 0;
    double ric = 0;        // R^11_0 by the closed formula h0^2 + 2H kappa - (3/2) xi1 a
    double ric_cross = 0;  // R^11_0 via -chi0 - chi2
    double r = 0;          // R^22_0
};

struct DarbouxFrame0 {
    std::array<Vec6, 3> e{};
    std::array<Vec6, 3> f{};
};

// omega(X, Y) for omega = sum dp_i ^ dq_i.
inline double omega6(const Vec6& x, const Vec6& y) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        s += x[static_cast<std::size_t>(i + 3)] * y[static_cast<std::size_t>(i)] -
             x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i + 3)];
    return s;
}

inline Vec6 vf_value(const VectorFieldJ& v, EvalContext& ctx) {
    Vec6 out{};
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = v.comp(i).eval(ctx, 0).value();
    return out;
}

// Hamiltonian vector field of a phase-space function.
inline VectorFieldJ hamiltonian_vf(const ScalarField& F) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < 3; ++i) comps.push_back(partial(F, 3 + i));
    for (int i = 0; i < 3; ++i) comps.push_back(-1.0 * partial(F, i));
    return VectorFieldJ(std::move(comps));
}

// Vertical lift of a base 1-form given by its component fields.
inline VectorFieldJ vertical_lift(const std::array<ScalarField, 3>& form) {
    std::vector<ScalarField> comps;
    for (int i = 0; i < 3; ++i) comps.push_back(ScalarField::constant(6, 0.0));
    for (int i = 0; i < 3; ++i) comps.push_back(-1.0 * pullback(form[static_cast<std::size_t>(i)], 6));
    return VectorFieldJ(std::move(comps));
}

// Gauss-curvature-type invariant of the structure constants:
// kappa = v1 a_12^2 - v2 a_12^1 - (a_12^1)^2 - (a_12^2)^2 - (a_01^2 - a_02^1)/2.
inline ScalarField kappa_field(const ContactStructure& cs) {
    const auto& a = cs.structure_constants().a;
    return apply_vf(cs.frame(1), a[1][2][2]) - apply_vf(cs.frame(2), a[1][2][1]) -
           a[1][2][1] * a[1][2][1] - a[1][2][2] * a[1][2][2] -
           0.5 * (a[0][1][2] - a[0][2][1]);
}

class LiftedFields {
public:
    explicit LiftedFields(const ContactStructure& cs) : cs_(cs) {
        auto p_coord = [](int j) { return ScalarField::coordinate(6, 3 + j); };

        for (int i = 0; i < 3; ++i) {
            ScalarField hi = ScalarField::constant(6, 0.0);
            for (int j = 0; j < 3; ++j) hi = hi + p_coord(j) * pullback(cs.frame(i).comp(j), 6);
            h_[static_cast<std::size_t>(i)] = hi;
        }
        H_ = 0.5 * (h_[1] * h_[1] + h_[2] * h_[2]);

        for (int i = 0; i < 3; ++i) hv_[static_cast<std::size_t>(i)] = hamiltonian_vf(h_[static_cast<std::size_t>(i)]);
        Hv_ = hamiltonian_vf(H_);

        for (int i = 0; i < 3; ++i) alphav_[static_cast<std::size_t>(i)] = vertical_lift(cs.coframe(i));
        xi1v_ = h_[1] * alphav_[2] - h_[2] * alphav_[1];
        xi2v_ = h_[1] * alphav_[1] + h_[2] * alphav_[2];

        {
            std::vector<ScalarField> comps;
            for (int i = 0; i < 3; ++i) comps.push_back(ScalarField::constant(6, 0.0));
            for (int i = 0; i < 3; ++i) comps.push_back(p_coord(i));
            euler_ = VectorFieldJ(std::move(comps));
        }

        // Lifts h_ij of the frame brackets.
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j) {
                    hij_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = ScalarField::constant(6, 0.0);
                    continue;
                }
                VectorFieldJ br = lie_bracket(cs.frame(i), cs.frame(j));
                ScalarField lift = ScalarField::constant(6, 0.0);
                for (int m = 0; m < 3; ++m) lift = lift + p_coord(m) * pullback(br.comp(m), 6);
                hij_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = lift;
            }

        a_ = apply_vf(Hv_, h_[0]);
        // algebraic route: a = h1 h10 + h2 h20 = -(h1 h01 + h2 h02)
        a_alg_ = -1.0 * (h_[1] * hij_[0][1] + h_[2] * hij_[0][2]);

        xi1_a_ = apply_vf(xi1v_, a_);
        chi0_ = h_[2] * hij_[0][1] - h_[1] * hij_[0][2] + xi1_a_;
        chi1_ = h_[0] * a_ + 2.0 * apply_vf(Hv_, xi1_a_) - apply_vf(xi1v_, apply_vf(Hv_, a_));
        xi1_h12_ = apply_vf(xi1v_, hij_[1][2]);
        chi2_ = h_[0] * hij_[1][2] + 2.0 * apply_vf(Hv_, xi1_h12_) -
                apply_vf(xi1v_, apply_vf(Hv_, hij_[1][2]));

        kappa_base_ = kappa_field(cs);
        kappa_ = pullback(kappa_base_, 6);

        ric_ = h_[0] * h_[0] + 2.0 * H_ * kappa_ - 1.5 * xi1_a_;
        ric_cross_ = -1.0 * chi0_ - chi2_;

        ScalarField Ha = apply_vf(Hv_, a_);
        r_ = ric_ * xi1_a_ - 3.0 * apply_vf(Hv_, apply_vf(xi1v_, Ha)) +
             3.0 * apply_vf(Hv_, apply_vf(Hv_, xi1_a_)) +
             apply_vf(xi1v_, apply_vf(Hv_, Ha));
    }

    const ContactStructure& contact() const { return cs_; }
    const ScalarField& h(int i) const { return h_[static_cast<std::size_t>(i)]; }
    const ScalarField& H() const { return H_; }
    const ScalarField& hij(int i, int j) const { return hij_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; }
    const ScalarField& a() const { return a_; }
    const ScalarField& a_algebraic() const { return a_alg_; }
    const ScalarField& chi0() const { return chi0_; }
    const ScalarField& chi1() const { return chi1_; }
    const ScalarField& chi2() const { return chi2_; }
    const ScalarField& kappa() const { return kappa_; }
    const ScalarField& kappa_base() const { return kappa_base_; }
    const ScalarField& ric() const { return ric_; }
    const ScalarField& ric_cross() const { return ric_cross_; }
    const ScalarField& r() const { return r_; }
    const ScalarField& xi1_a() const { return xi1_a_; }
    const ScalarField& xi1_h12() const { return xi1_h12_; }

    const VectorFieldJ& hv(int i) const { return hv_[static_cast<std::size_t>(i)]; }
    const VectorFieldJ& Hv() const { return Hv_; }
    const VectorFieldJ& alphav(int i) const { return alphav_[static_cast<std::size_t>(i)]; }
    const VectorFieldJ& xi1v() const { return xi1v_; }
    const VectorFieldJ& xi2v() const { return xi2v_; }
    const VectorFieldJ& euler() const { return euler_; }

    // beta = h1 dh2 - h2 dh1 as a 1-form evaluator on vector fields.
    ScalarField beta(const VectorFieldJ& X) const {
        return h_[1] * apply_vf(X, h_[2]) - h_[2] * apply_vf(X, h_[1]);
    }

    InvariantRecord record_at(const PhasePoint& pt, int max_order = kDefaultMaxOrder) const {
        EvalContext ctx(pt.flat(), max_order);
        InvariantRecord rec;
        rec.H = H_.eval(ctx, 0).value();
        if (rec.H <= 0.0) fail(ErrorKind::domain, "H must be positive at the phase point");
        rec.h0 = h_[0].eval(ctx, 0).value();
        rec.h1 = h_[1].eval(ctx, 0).value();
        rec.h2 = h_[2].eval(ctx, 0).value();
        rec.a = a_.eval(ctx, 0).value();
        rec.a_alg = a_alg_.eval(ctx, 0).value();
        rec.chi0 = chi0_.eval(ctx, 0).value();
        rec.chi1 = chi1_.eval(ctx, 0).value();
        rec.chi2 = chi2_.eval(ctx, 0).value();
        rec.kappa = kappa_.eval(ctx, 0).value();
        rec.ric = ric_.eval(ctx, 0).value();
        rec.ric_cross = ric_cross_.eval(ctx, 0).value();
        rec.r = r_.eval(ctx, 0).value();
        return rec;
    }

    // R^11 and R^22 only; shares the machinery with record_at.
    std::array<double, 2> curvature_pair_at(const std::vector<double>& y,
                                            int max_order = kDefaultMaxOrder) const {
        EvalContext ctx(y, max_order);
        return {ric_.eval(ctx, 0).value(), r_.eval(ctx, 0).value()};
    }

    // Canonical Darboux frame at t = 0 based at pt.
    DarbouxFrame0 darboux0(const PhasePoint& pt, int max_order = kDefaultMaxOrder) const {
        EvalContext ctx(pt.flat(), max_order);
        const double H = H_.eval(ctx, 0).value();
        if (H <= 0.0) fail(ErrorKind::domain, "H must be positive at the phase point");
        const double sq = std::sqrt(2.0 * H);

        const Vec6 sigma_v = vf_value(alphav_[0], ctx);
        const Vec6 xi1 = vf_value(xi1v_, ctx);
        const Vec6 xi2 = vf_value(xi2v_, ctx);
        const Vec6 ev = vf_value(euler_, ctx);
        const Vec6 Hvv = vf_value(Hv_, ctx);
        const Vec6 h0v = vf_value(hv_[0], ctx);
        const Vec6 h1v = vf_value(hv_[1], ctx);
        const Vec6 h2v = vf_value(hv_[2], ctx);

        const double h0 = h_[0].eval(ctx, 0).value();
        const double h1 = h_[1].eval(ctx, 0).value();
        const double h2 = h_[2].eval(ctx, 0).value();
        const double a = a_.eval(ctx, 0).value();
        const double chi0 = chi0_.eval(ctx, 0).value();
        const double chi1 = chi1_.eval(ctx, 0).value();
        const double h12 = hij_[1][2].eval(ctx, 0).value();
        const double xi1a = xi1_a_.eval(ctx, 0).value();
        const double xi1h12 = xi1_h12_.eval(ctx, 0).value();

        DarbouxFrame0 fr;
        auto axpy = [](Vec6& acc, double s, const Vec6& v) {
            for (int i = 0; i < 6; ++i) acc[static_cast<std::size_t>(i)] += s * v[static_cast<std::size_t>(i)];
        };
        for (int i = 0; i < 6; ++i) {
            fr.e[0][static_cast<std::size_t>(i)] = xi1[static_cast<std::size_t>(i)] / sq;
            fr.e[1][static_cast<std::size_t>(i)] = sigma_v[static_cast<std::size_t>(i)] / sq;
            fr.e[2][static_cast<std::size_t>(i)] = ev[static_cast<std::size_t>(i)] / sq;
            fr.f[2][static_cast<std::size_t>(i)] = -Hvv[static_cast<std::size_t>(i)] / sq;
        }
        Vec6 f1{};
        axpy(f1, h1, h2v);
        axpy(f1, -h2, h1v);
        axpy(f1, chi0, sigma_v);
        axpy(f1, xi1h12, xi1);
        axpy(f1, -h12, xi2);
        Vec6 f2{};
        axpy(f2, 2.0 * H, h0v);
        axpy(f2, -h0, Hvv);
        axpy(f2, -chi1, sigma_v);
        axpy(f2, xi1a, xi1);
        axpy(f2, -a, xi2);
        for (int i = 0; i < 6; ++i) {
            fr.f[0][static_cast<std::size_t>(i)] = f1[static_cast<std::size_t>(i)] / sq;
            fr.f[1][static_cast<std::size_t>(i)] = f2[static_cast<std::size_t>(i)] / sq;
        }
        return fr;
    }

private:
    ContactStructure cs_;
    std::array<ScalarField, 3> h_;
    ScalarField H_;
    std::array<std::array<ScalarField, 3>, 3> hij_;
    ScalarField a_, a_alg_, xi1_a_, xi1_h12_;
    ScalarField chi0_, chi1_, chi2_;
    ScalarField kappa_, kappa_base_;
    ScalarField ric_, ric_cross_, r_;
    std::array<VectorFieldJ, 3> hv_;
    VectorFieldJ Hv_;
    std::array<VectorFieldJ, 3> alphav_;
    VectorFieldJ xi1v_, xi2v_, euler_;
};

// Covector with prescribed frame pairings: solves p from h_i(q, p) = h_i.
inline PhasePoint phase_from_h(const ContactStructure& cs, const std::array<double, 3>& q,
                               const std::array<double, 3>& h_targets,
                               int max_order = kDefaultMaxOrder) {
    EvalContext ctx(std::vector<double>(q.begin(), q.end()), max_order);
    Mat3 V;
    for (int i = 0; i < 3; ++i)
        for (int m = 0; m < 3; ++m)
            V[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
                cs.frame(i).comp(m).eval(ctx, 0).value();
    Vec3 p = lu_solve(V, Vec3{h_targets[0], h_targets[1], h_targets[2]});
    return {q, {p[0], p[1], p[2]}};
}

// Low-discrepancy phase points over a chart box with (h0, h1, h2) drawn so
// that sqrt(2H) stays within [0.7, 1.3] and h0 within [-1, 1].
inline std::vector<PhasePoint> sample_phase_points(const ContactStructure& cs, const Box& box,
                                                   int n, std::uint64_t seed) {
    std::vector<PhasePoint> out;
    out.reserve(static_cast<std::size_t>(n));
    const std::array<double, 6> lo{box.lo[0], box.lo[1], box.lo[2], -1.0, 0.0, 0.7};
    const std::array<double, 6> hi{box.hi[0], box.hi[1], box.hi[2], 1.0, 6.283185307179586, 1.3};
    for (int k = 0; k < n; ++k) {
        const auto u = halton_point<6>(static_cast<std::uint64_t>(k), seed, lo, hi);
        const std::array<double, 3> q{u[0], u[1], u[2]};
        const double h0 = u[3], phi = u[4], ell = u[5];
        out.push_back(phase_from_h(cs, q, {h0, ell * std::cos(phi), ell * std::sin(phi)}));
    }
    return out;
}

// Maximum absolute deviation of the 15 distinct Darboux pairings from their
// canonical values: omega(e_i, e_j) = omega(f_i, f_j) = 0, omega(f_i, e_j) =
// delta_ij.
inline double darboux_defect(const DarbouxFrame0& fr) {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i < j) {
                worst = std::max(worst, std::fabs(omega6(fr.e[static_cast<std::size_t>(i)], fr.e[static_cast<std::size_t>(j)])));
                worst = std::max(worst, std::fabs(omega6(fr.f[static_cast<std::size_t>(i)], fr.f[static_cast<std::size_t>(j)])));
            }
            const double expect = (i == j) ? 1.0 : 0.0;
            worst = std::max(worst,
                             std::fabs(omega6(fr.f[static_cast<std::size_t>(i)], fr.e[static_cast<std::size_t>(j)]) - expect));
        }
    return worst;
}

}  // namespace subriem
