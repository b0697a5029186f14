#pragma once

// Contact structure built from a user frame: the normalized annihilator form
// sigma, the Reeb field, the dual co-frame, and the structure constants of the
// frame bracket relations, all as differentiable fields on the base chart.

#include <algorithm>
#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "subriem/field.hpp"
#include "subriem/linalg.hpp"
#include "subriem/numerics.hpp"

namespace subriem {

struct FrameSpec {
    std::vector<std::string> coords;  // three chart coordinates
    std::array<Expr, 3> v1, v2;       // orthonormal frame components
    std::optional<Expr> eta_density;  // optional density override for eta
};

struct Box {
    std::array<double, 3> lo{-1.0, -1.0, -1.0};
    std::array<double, 3> hi{1.0, 1.0, 1.0};

    bool contains(const std::array<double, 3>& p, double slack = 1e-9) const {
        for (int i = 0; i < 3; ++i)
            if (p[static_cast<std::size_t>(i)] < lo[static_cast<std::size_t>(i)] - slack ||
                p[static_cast<std::size_t>(i)] > hi[static_cast<std::size_t>(i)] + slack)
                return false;
        return true;
    }
};

struct StructureConstants {
    // a[i][j][k] with [v_i, v_j] = sum_k a_ij^k v_k; antisymmetric in (i, j).
    std::array<std::array<std::array<ScalarField, 3>, 3>, 3> a;
};

struct ContactCheckReport {
    bool pass = false;
    double min_abs_det = 0.0;
    std::array<double, 3> worst_point{};
};

struct BundleTypeReport {
    bool bundle_type = false;
    double max_violation = 0.0;
};

namespace detail {

inline std::array<ScalarField, 3> frame_component_fields(const std::array<Expr, 3>& v) {
    return {ScalarField::from_expr(v[0]), ScalarField::from_expr(v[1]),
            ScalarField::from_expr(v[2])};
}

}  // namespace detail

class ContactStructure {
public:
    static ContactStructure build(const FrameSpec& spec) {
        ContactStructure cs;
        cs.spec_ = spec;
        auto v1 = detail::frame_component_fields(spec.v1);
        auto v2 = detail::frame_component_fields(spec.v2);
        cs.vf_[1] = VectorFieldJ({v1[0], v1[1], v1[2]});
        cs.vf_[2] = VectorFieldJ({v2[0], v2[1], v2[2]});

        // Unnormalized annihilator: the coordinate cross product of the frame.
        std::array<ScalarField, 3> sh = {v1[1] * v2[2] - v1[2] * v2[1],
                                         v1[2] * v2[0] - v1[0] * v2[2],
                                         v1[0] * v2[1] - v1[1] * v2[0]};
        VectorFieldJ bracket12 = lie_bracket(cs.vf_[1], cs.vf_[2]);
        // sigma = lambda * sigma_hat with lambda = -1 / sigma_hat([v1, v2]),
        // which enforces d sigma(v1, v2) = -sigma([v1, v2]) = 1.
        ScalarField pairing =
            sh[0] * bracket12.comp(0) + sh[1] * bracket12.comp(1) + sh[2] * bracket12.comp(2);
        ScalarField lambda = ScalarField::constant(3, -1.0) / pairing;
        for (int i = 0; i < 3; ++i) cs.sigma_[static_cast<std::size_t>(i)] = lambda * sh[static_cast<std::size_t>(i)];

        // Reeb field: sigma(e) = 1, d sigma(e, v1) = 0, d sigma(e, v2) = 0.
        std::array<std::array<ScalarField, 3>, 3> dsig;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                dsig[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                    partial(cs.sigma_[static_cast<std::size_t>(j)], i) -
                    partial(cs.sigma_[static_cast<std::size_t>(i)], j);
        auto row_for = [&](const VectorFieldJ& v) {
            std::array<ScalarField, 3> row;
            for (int i = 0; i < 3; ++i)
                row[static_cast<std::size_t>(i)] = dsig[static_cast<std::size_t>(i)][0] * v.comp(0) +
                                                   dsig[static_cast<std::size_t>(i)][1] * v.comp(1) +
                                                   dsig[static_cast<std::size_t>(i)][2] * v.comp(2);
            return row;
        };
        std::array<std::array<ScalarField, 3>, 3> A = {cs.sigma_, row_for(cs.vf_[1]),
                                                       row_for(cs.vf_[2])};
        auto c = [](double v) { return ScalarField::constant(3, v); };
        auto reeb = solve_fields(A, {{c(1), c(0), c(0)}}, "Reeb field");
        cs.vf_[0] = VectorFieldJ({reeb[0][0], reeb[0][1], reeb[0][2]});

        // Dual co-frame alpha_i(v_j) = delta_ij: rows of the inverse of the
        // matrix whose columns are v0, v1, v2.
        std::array<std::array<ScalarField, 3>, 3> Ft;
        for (int j = 0; j < 3; ++j)
            for (int m = 0; m < 3; ++m)
                Ft[static_cast<std::size_t>(j)][static_cast<std::size_t>(m)] = cs.vf_[static_cast<std::size_t>(j)].comp(m);
        auto coframe = solve_fields(
            Ft, {{c(1), c(0), c(0)}, {c(0), c(1), c(0)}, {c(0), c(0), c(1)}}, "dual co-frame");
        for (int i = 0; i < 3; ++i)
            for (int m = 0; m < 3; ++m)
                cs.alpha_[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)] =
                    coframe[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];

        // Structure constants a_ij^k = alpha_k([v_i, v_j]).
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                if (i == j) {
                    for (int k = 0; k < 3; ++k)
                        cs.sc_.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = c(0);
                    continue;
                }
                if (i > j) continue;  // filled by antisymmetry below
                VectorFieldJ br = (i == 1 && j == 2) ? bracket12 : lie_bracket(cs.vf_[static_cast<std::size_t>(i)], cs.vf_[static_cast<std::size_t>(j)]);
                for (int k = 0; k < 3; ++k) {
                    ScalarField aijk = cs.alpha_[static_cast<std::size_t>(k)][0] * br.comp(0) +
                                       cs.alpha_[static_cast<std::size_t>(k)][1] * br.comp(1) +
                                       cs.alpha_[static_cast<std::size_t>(k)][2] * br.comp(2);
                    cs.sc_.a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = aijk;
                    cs.sc_.a[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] = -1.0 * aijk;
                }
            }

        // eta density: the weight making eta(e, v1, v2) = 1 unless overridden.
        if (spec.eta_density) {
            cs.eta_weight_ = ScalarField::from_expr(*spec.eta_density);
        } else {
            // det of the matrix with columns e, v1, v2
            const auto& e = cs.vf_[0];
            const auto& w1 = cs.vf_[1];
            const auto& w2 = cs.vf_[2];
            ScalarField det =
                e.comp(0) * (w1.comp(1) * w2.comp(2) - w1.comp(2) * w2.comp(1)) -
                w1.comp(0) * (e.comp(1) * w2.comp(2) - e.comp(2) * w2.comp(1)) +
                w2.comp(0) * (e.comp(1) * w1.comp(2) - e.comp(2) * w1.comp(1));
            cs.eta_weight_ = ScalarField::constant(3, 1.0) / det;
        }
        return cs;
    }

    const FrameSpec& spec() const { return spec_; }
    const VectorFieldJ& frame(int i) const { return vf_[static_cast<std::size_t>(i)]; }
    const std::array<ScalarField, 3>& sigma() const { return sigma_; }
    const std::array<ScalarField, 3>& coframe(int i) const { return alpha_[static_cast<std::size_t>(i)]; }
    const StructureConstants& structure_constants() const { return sc_; }
    const ScalarField& eta_weight() const { return eta_weight_; }

    double sigma_pair(const VectorFieldJ& v, EvalContext& ctx) const {
        double s = 0.0;
        for (int i = 0; i < 3; ++i)
            s += sigma_[static_cast<std::size_t>(i)].eval(ctx, 0).value() * v.comp(i).eval(ctx, 0).value();
        return s;
    }

private:
    FrameSpec spec_;
    std::array<VectorFieldJ, 3> vf_;       // v0 = Reeb, v1, v2
    std::array<ScalarField, 3> sigma_;
    std::array<std::array<ScalarField, 3>, 3> alpha_;  // rows alpha_0..alpha_2
    StructureConstants sc_;
    ScalarField eta_weight_;
};

// det(v1, v2, [v1, v2]) over sample points; the span is contact where the
// determinant stays away from zero.
inline ContactCheckReport verify_contact(const FrameSpec& spec,
                                         std::span<const std::array<double, 3>> pts,
                                         int max_order = kDefaultMaxOrder) {
    auto v1 = detail::frame_component_fields(spec.v1);
    auto v2 = detail::frame_component_fields(spec.v2);
    VectorFieldJ V1({v1[0], v1[1], v1[2]}), V2({v2[0], v2[1], v2[2]});
    VectorFieldJ br = lie_bracket(V1, V2);

    ContactCheckReport rep;
    rep.min_abs_det = std::numeric_limits<double>::infinity();
    for (const auto& p : pts) {
        EvalContext ctx(std::vector<double>(p.begin(), p.end()), max_order);
        Mat3 m;
        for (int i = 0; i < 3; ++i) {
            m[static_cast<std::size_t>(i)][0] = V1.comp(i).eval(ctx, 0).value();
            m[static_cast<std::size_t>(i)][1] = V2.comp(i).eval(ctx, 0).value();
            m[static_cast<std::size_t>(i)][2] = br.comp(i).eval(ctx, 0).value();
        }
        const double d = std::fabs(det3(m));
        if (d < rep.min_abs_det) {
            rep.min_abs_det = d;
            rep.worst_point = p;
        }
    }
    rep.pass = rep.min_abs_det >= 1e-12;
    return rep;
}

// Lemma-level test for bundle-type structures: beyond the identities that hold
// for every contact frame, invariance requires a_01^1 = a_02^2 = 0 and
// a_01^2 + a_02^1 = 0 at every point.
inline BundleTypeReport bundle_type_check(const ContactStructure& cs,
                                          std::span<const std::array<double, 3>> pts,
                                          double tol = 1e-9,
                                          int max_order = kDefaultMaxOrder) {
    BundleTypeReport rep;
    const auto& a = cs.structure_constants().a;
    for (const auto& p : pts) {
        EvalContext ctx(std::vector<double>(p.begin(), p.end()), max_order);
        const double a011 = a[0][1][1].eval(ctx, 0).value();
        const double a022 = a[0][2][2].eval(ctx, 0).value();
        const double a012 = a[0][1][2].eval(ctx, 0).value();
        const double a021 = a[0][2][1].eval(ctx, 0).value();
        rep.max_violation = std::max({rep.max_violation, std::fabs(a011), std::fabs(a022),
                                      std::fabs(a012 + a021)});
    }
    rep.bundle_type = rep.max_violation <= tol;
    return rep;
}

inline std::vector<std::array<double, 3>> sample_box(const Box& box, int n, std::uint64_t seed) {
    std::vector<std::array<double, 3>> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pts.push_back(halton_point<3>(static_cast<std::uint64_t>(k), seed, box.lo, box.hi));
    return pts;
}

}  // namespace subriem
