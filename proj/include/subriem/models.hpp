#pragma once

// Builtin models. The Hopf chart is the stereographic projection of the unit
// 3-sphere in C^2 from (-1, 0, 0, 0); the two horizontal fields (z1, z2) ->
// (-z2, z1) and (z1, z2) -> (i z2, i z1) push forward to the polynomial frame
// below (s = x^2 + y^2 + z^2):
//   v1 = ( x*y - z,          (1 - s)/2 + y^2,  x + y*z )
//   v2 = ( y + x*z,          y*z - x,          (1 - s)/2 + z^2 )
// The chart covers the sphere minus the projection pole, so every finite
// point is admissible; the model box only bounds the sampling region.

#include <optional>
#include <string>
#include <vector>

#include "subriem/contact.hpp"

namespace subriem {

struct ModelClaims {
    std::optional<double> kappa_const;  // claimed constant curvature of the quotient
    bool bundle_type = false;
    bool r_zero = false;                // generalized curvature r vanishes identically
    std::string mcp;                    // e.g. "MCP(0,5)" or "MCP(2;2,3)"
    std::optional<double> mcp_r;        // the r in the paper's MCP claim
};

struct ModelDef {
    std::string name;
    FrameSpec frame;
    Box box;
    ModelClaims claims;
};

inline ModelDef heisenberg() {
    ModelDef m;
    m.name = "heisenberg";
    m.frame.coords = {"x", "y", "z"};
    m.frame.v1 = {parse("1", m.frame.coords), parse("0", m.frame.coords),
                  parse("-y/2", m.frame.coords)};
    m.frame.v2 = {parse("0", m.frame.coords), parse("1", m.frame.coords),
                  parse("x/2", m.frame.coords)};
    m.box = {{-2.0, -2.0, -2.0}, {2.0, 2.0, 2.0}};
    m.claims.kappa_const = 0.0;
    m.claims.bundle_type = true;
    m.claims.r_zero = true;
    m.claims.mcp = "MCP(0,5)";
    m.claims.mcp_r = 0.0;
    return m;
}

inline ModelDef hopf() {
    ModelDef m;
    m.name = "hopf";
    m.frame.coords = {"x", "y", "z"};
    const auto& c = m.frame.coords;
    m.frame.v1 = {parse("x*y - z", c), parse("(1 - (x^2 + y^2 + z^2))/2 + y^2", c),
                  parse("x + y*z", c)};
    m.frame.v2 = {parse("y + x*z", c), parse("y*z - x", c),
                  parse("(1 - (x^2 + y^2 + z^2))/2 + z^2", c)};
    m.box = {{-0.8, -0.8, -0.8}, {0.8, 0.8, 0.8}};
    m.claims.bundle_type = true;
    m.claims.r_zero = true;
    m.claims.mcp = "MCP(2;2,3)";
    m.claims.mcp_r = 2.0;  // recorded claim; the computed kappa is reported against it
    return m;
}

// Heisenberg frame rotated by a constant angle; same distribution and metric,
// so every frame-independent invariant must match the unrotated model.
inline ModelDef rotated_heisenberg(double theta = 0.7) {
    ModelDef m = heisenberg();
    m.name = "rotated_heisenberg";
    const auto& c = m.frame.coords;
    const std::string ct = "cos(" + std::to_string(theta) + ")";
    const std::string st = "sin(" + std::to_string(theta) + ")";
    m.frame.v1 = {parse(ct, c), parse(st, c),
                  parse(ct + "*(-y/2) + " + st + "*(x/2)", c)};
    m.frame.v2 = {parse("-" + st, c), parse(ct, c),
                  parse("-" + st + "*(-y/2) + " + ct + "*(x/2)", c)};
    return m;
}

// Heisenberg with the first leg rescaled by a z-dependent factor. The metric
// is no longer invariant along the Reeb direction, so a != 0 somewhere and
// the bundle-type conditions on the structure constants fail.
inline ModelDef noninvariant_perturbation() {
    ModelDef m;
    m.name = "noninvariant_perturbation";
    m.frame.coords = {"x", "y", "z"};
    const auto& c = m.frame.coords;
    m.frame.v1 = {parse("1 + z^2/4", c), parse("0", c), parse("(1 + z^2/4)*(-y/2)", c)};
    m.frame.v2 = {parse("0", c), parse("1", c), parse("x/2", c)};
    m.box = {{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
    m.claims.bundle_type = false;
    return m;
}

// Bundle-type structure over the warped-product surface dx^2 + G(x)^2 dy^2,
// G = 1 + x^2/2, whose Gauss curvature -G''/G is not constant:
//   v1 = d/dx, v2 = (1/G) d/dy + A d/dz with (A G)' = G,
// which pins the Reeb field to the constant -d/dz, so the frame's
// z-invariance is invariance under the Reeb flow.
inline ModelDef warped_bundle() {
    ModelDef m;
    m.name = "warped_bundle";
    m.frame.coords = {"x", "y", "z"};
    const auto& c = m.frame.coords;
    m.frame.v1 = {parse("1", c), parse("0", c), parse("0", c)};
    m.frame.v2 = {parse("0", c), parse("1/(1 + x^2/2)", c),
                  parse("(x + x^3/6)/(1 + x^2/2)", c)};
    m.box = {{0.2, -1.0, -1.0}, {1.2, 1.0, 1.0}};
    m.claims.bundle_type = true;
    m.claims.r_zero = true;
    return m;
}

inline ModelDef synthetic(const std::string& name) {
    if (name == "rotated_heisenberg") return rotated_heisenberg();
    if (name == "noninvariant_perturbation") return noninvariant_perturbation();
    if (name == "warped_bundle") return warped_bundle();
    fail(ErrorKind::config, "unknown synthetic model '" + name + "'");
}

inline std::optional<ModelDef> builtin_model(const std::string& name) {
    if (name == "heisenberg") return heisenberg();
    if (name == "hopf") return hopf();
    if (name == "rotated_heisenberg" || name == "noninvariant_perturbation" ||
        name == "warped_bundle")
        return synthetic(name);
    return std::nullopt;
}

}  // namespace subriem
