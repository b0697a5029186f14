#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "subriem/contact.hpp"
#include "subriem/models.hpp"

using namespace subriem;

namespace {

double sf_at(const ScalarField& f, const std::array<double, 3>& p) {
    return f.value_at(std::vector<double>(p.begin(), p.end()));
}

// 1-form (given by component fields) applied to a vector field at a point.
double pair_at(const std::array<ScalarField, 3>& form, const VectorFieldJ& v,
               const std::array<double, 3>& p) {
    EvalContext ctx(std::vector<double>(p.begin(), p.end()));
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += form[static_cast<std::size_t>(i)].eval(ctx, 0).value() * v.comp(i).eval(ctx, 0).value();
    return s;
}

// d(form)(u, w) at a point, via exact jet partials of the form components.
double dform_at(const std::array<ScalarField, 3>& form, const VectorFieldJ& u,
                const VectorFieldJ& w, const std::array<double, 3>& p) {
    EvalContext ctx(std::vector<double>(p.begin(), p.end()));
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double dij = form[static_cast<std::size_t>(j)].eval(ctx, 1).partial(i).value() -
                               form[static_cast<std::size_t>(i)].eval(ctx, 1).partial(j).value();
            // only i<j distinct terms, but summing the antisymmetric matrix
            // against u_i w_j covers it
            s += 0.5 * dij * (u.comp(i).eval(ctx, 0).value() * w.comp(j).eval(ctx, 0).value() -
                              u.comp(j).eval(ctx, 0).value() * w.comp(i).eval(ctx, 0).value());
        }
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("contact");

TEST_CASE("Heisenberg sigma matches the hand-derived covector and Reeb is -d/dz") {
    ModelDef m = heisenberg();
    ContactStructure cs = ContactStructure::build(m.frame);
    for (const auto& p : sample_box(m.box, 12, 3)) {
        CHECK(sf_at(cs.sigma()[0], p) == doctest::Approx(-p[1] / 2).epsilon(1e-12));
        CHECK(sf_at(cs.sigma()[1], p) == doctest::Approx(p[0] / 2).epsilon(1e-12));
        CHECK(sf_at(cs.sigma()[2], p) == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(sf_at(cs.frame(0).comp(0), p) == doctest::Approx(0.0));
        CHECK(sf_at(cs.frame(0).comp(1), p) == doctest::Approx(0.0));
        CHECK(sf_at(cs.frame(0).comp(2), p) == doctest::Approx(-1.0));
    }
}

TEST_CASE("contact verification: Heisenberg det is 1, integrable frames fail, Hopf passes") {
    ModelDef m = heisenberg();
    auto pts = sample_box(m.box, 40, 1);
    auto rep = verify_contact(m.frame, pts);
    CHECK(rep.pass);
    CHECK(rep.min_abs_det == doctest::Approx(1.0).epsilon(1e-12));

    FrameSpec integrable;
    integrable.coords = {"x", "y", "z"};
    integrable.v1 = {parse("1", integrable.coords), parse("0", integrable.coords),
                     parse("0", integrable.coords)};
    integrable.v2 = {parse("0", integrable.coords), parse("1", integrable.coords),
                     parse("0", integrable.coords)};
    auto bad = verify_contact(integrable, pts);
    CHECK_FALSE(bad.pass);
    CHECK(bad.min_abs_det == doctest::Approx(0.0));

    ModelDef h = hopf();
    auto hrep = verify_contact(h.frame, sample_box(h.box, 60, 2));
    CHECK(hrep.pass);
    CHECK(hrep.min_abs_det > 1e-3);
}

TEST_CASE("ContactStructure invariants hold at sample points for every builtin model") {
    for (const auto& m : {heisenberg(), hopf(), rotated_heisenberg(), noninvariant_perturbation(),
                          warped_bundle()}) {
        CAPTURE(m.name);
        ContactStructure cs = ContactStructure::build(m.frame);
        for (const auto& p : sample_box(m.box, 25, 5)) {
            // sigma annihilates the frame, pairs to 1 with the Reeb field
            CHECK(std::fabs(pair_at(cs.sigma(), cs.frame(1), p)) < 1e-12);
            CHECK(std::fabs(pair_at(cs.sigma(), cs.frame(2), p)) < 1e-12);
            CHECK(pair_at(cs.sigma(), cs.frame(0), p) == doctest::Approx(1.0).epsilon(1e-10));
            // d sigma normalization and Reeb contraction
            CHECK(dform_at(cs.sigma(), cs.frame(1), cs.frame(2), p) ==
                  doctest::Approx(1.0).epsilon(1e-10));
            CHECK(std::fabs(dform_at(cs.sigma(), cs.frame(0), cs.frame(1), p)) < 1e-10);
            CHECK(std::fabs(dform_at(cs.sigma(), cs.frame(0), cs.frame(2), p)) < 1e-10);
            // dual co-frame
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    CHECK(pair_at(cs.coframe(i), cs.frame(j), p) ==
                          doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("structure constants: universal contact identities at 100 points") {
    for (const auto& m : {heisenberg(), hopf(), noninvariant_perturbation(), warped_bundle()}) {
        CAPTURE(m.name);
        ContactStructure cs = ContactStructure::build(m.frame);
        const auto& a = cs.structure_constants().a;
        for (const auto& p : sample_box(m.box, 100, 7)) {
            EvalContext ctx(std::vector<double>(p.begin(), p.end()));
            CHECK(std::fabs(a[0][1][0].eval(ctx, 0).value()) < 1e-9);
            CHECK(std::fabs(a[0][2][0].eval(ctx, 0).value()) < 1e-9);
            CHECK(a[1][2][0].eval(ctx, 0).value() == doctest::Approx(-1.0).epsilon(1e-9));
            CHECK(std::fabs(a[0][1][1].eval(ctx, 0).value() + a[0][2][2].eval(ctx, 0).value()) <
                  1e-9);
        }
    }
}

TEST_CASE("Heisenberg structure constants: a_12^0 = -1 and all others vanish") {
    ModelDef m = heisenberg();
    ContactStructure cs = ContactStructure::build(m.frame);
    const auto& a = cs.structure_constants().a;
    for (const auto& p : sample_box(m.box, 20, 9)) {
        EvalContext ctx(std::vector<double>(p.begin(), p.end()));
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j)
                for (int k = 0; k < 3; ++k) {
                    const double v = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)][static_cast<std::size_t>(k)].eval(ctx, 0).value();
                    const double expect = (i == 1 && j == 2 && k == 0) ? -1.0 : 0.0;
                    CHECK(v == doctest::Approx(expect).epsilon(1e-11));
                }
    }
}

TEST_CASE("bundle type check: positives and the constructed negative") {
    auto points_for = [](const ModelDef& m) { return sample_box(m.box, 60, 11); };
    {
        ModelDef m = heisenberg();
        auto r = bundle_type_check(ContactStructure::build(m.frame), points_for(m));
        CHECK(r.bundle_type);
    }
    {
        ModelDef m = hopf();
        auto r = bundle_type_check(ContactStructure::build(m.frame), points_for(m));
        CHECK(r.bundle_type);
    }
    {
        ModelDef m = warped_bundle();
        auto r = bundle_type_check(ContactStructure::build(m.frame), points_for(m));
        CHECK(r.bundle_type);
    }
    {
        ModelDef m = noninvariant_perturbation();
        auto r = bundle_type_check(ContactStructure::build(m.frame), points_for(m));
        CHECK_FALSE(r.bundle_type);
        CHECK(r.max_violation > 1e-3);
    }
}

TEST_CASE("sigma is invariant under constant frame rotations") {
    ModelDef base = heisenberg(), rot = rotated_heisenberg();
    ContactStructure a = ContactStructure::build(base.frame);
    ContactStructure b = ContactStructure::build(rot.frame);
    for (const auto& p : sample_box(base.box, 30, 13)) {
        for (int i = 0; i < 3; ++i)
            CHECK(sf_at(a.sigma()[static_cast<std::size_t>(i)], p) ==
                  doctest::Approx(sf_at(b.sigma()[static_cast<std::size_t>(i)], p)).epsilon(1e-10));
    }
}

TEST_CASE("eta weight makes eta(e, v1, v2) = 1") {
    for (const auto& m : {heisenberg(), hopf(), warped_bundle()}) {
        CAPTURE(m.name);
        ContactStructure cs = ContactStructure::build(m.frame);
        for (const auto& p : sample_box(m.box, 10, 17)) {
            EvalContext ctx(std::vector<double>(p.begin(), p.end()));
            Mat3 f;
            for (int i = 0; i < 3; ++i) {
                f[static_cast<std::size_t>(i)][0] = cs.frame(0).comp(i).eval(ctx, 0).value();
                f[static_cast<std::size_t>(i)][1] = cs.frame(1).comp(i).eval(ctx, 0).value();
                f[static_cast<std::size_t>(i)][2] = cs.frame(2).comp(i).eval(ctx, 0).value();
            }
            const double w = cs.eta_weight().eval(ctx, 0).value();
            CHECK(w * det3(f) == doctest::Approx(1.0).epsilon(1e-11));
        }
    }
}

TEST_SUITE_END();
