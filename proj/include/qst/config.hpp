#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qst/errors.hpp"
#include "qst/ratios.hpp"

namespace qst {

// Prescribed vertical displacement (per unit height) of two supports;
// these are the two boundary equations that close the compatibility
// system. z1 < z2 is required.
struct BoundaryCondition {
    int z1 = 0;
    int z2 = 0;
    double d1 = 0.0;
    double d2 = 0.0;
};

// sin/cos of the member angle, plus the exact c/s quotient. When the
// angle is given through its tangent the quotient is computed as 1/tan
// directly, so rational tangents give exact width ratios.
struct Trig {
    double s = 0.0;        // sin(beta)
    double c = 0.0;        // cos(beta)
    double c_over_s = 0.0; // cot(beta)
};

// Full parameter set of one quasi-Sierpinski truss.
// Units used throughout: kN, mm, kN/mm^2 (moduli), kN/mm (stiffness).
struct StructureConfig {
    int levels = 0;                                              // N >= 2
    double beta_rad = std::numeric_limits<double>::quiet_NaN();  // angle of inclined members
    double beta_tan = std::numeric_limits<double>::quiet_NaN();  // wins over beta_rad when both set
    double height = 0.0;                                         // Y [mm]
    double load = 0.0;                                           // F [kN], downward at the apex
    double area_inclined = 0.0;                                  // A^I [mm^2]
    double modulus_inclined = 0.0;                               // E^I [kN/mm^2]
    double area_horizontal = 0.0;                                // A^H [mm^2]
    double modulus_horizontal = 0.0;                             // E^H [kN/mm^2]
    RatioSequence ratios_inclined;                               // rho^I_1..N
    RatioSequence ratios_horizontal;                             // rho^H_2..N
    BoundaryCondition boundary;

    int support_count() const { return (1 << (levels - 1)) + 1; }
    int node_count() const { return 3 * (1 << (levels - 1)); }
    int member_count() const { return 5 * (1 << (levels - 1)) - 3; }

    bool has_beta_tan() const { return std::isfinite(beta_tan); }

    Trig trig() const {
        Trig t;
        if (has_beta_tan()) {
            const double h = std::sqrt(1.0 + beta_tan * beta_tan);
            t.s = beta_tan / h;
            t.c = 1.0 / h;
            t.c_over_s = 1.0 / beta_tan;
        } else {
            t.s = std::sin(beta_rad);
            t.c = std::cos(beta_rad);
            t.c_over_s = t.c / t.s;
        }
        return t;
    }

    double width() const { return 2.0 * height * trig().c_over_s; } // base extent, 2Yc/s [mm]

    std::vector<std::string> validate() const {
        std::vector<std::string> errors;
        if (levels < 2)
            errors.push_back("levels: must be >= 2");
        if (levels > 16)
            errors.push_back("levels: must be <= 16");
        if (has_beta_tan()) {
            if (!(beta_tan > 0.0))
                errors.push_back("beta_tan: must be > 0 (beta strictly inside (0, pi/2))");
        } else if (std::isfinite(beta_rad)) {
            if (!(beta_rad > 0.0 && beta_rad < 1.5707963267948966 &&
                  std::sin(beta_rad) > 0.0 && std::cos(beta_rad) > 0.0))
                errors.push_back("beta_rad: must lie strictly inside (0, pi/2)");
        } else {
            errors.push_back("beta: either beta_rad or beta_tan must be set");
        }
        if (!(std::isfinite(height) && height > 0.0))
            errors.push_back("height_mm: must be > 0");
        if (!(std::isfinite(load) && load > 0.0))
            errors.push_back("load_kn: must be > 0");
        if (!(std::isfinite(area_inclined) && area_inclined > 0.0))
            errors.push_back("area_inclined_mm2: must be > 0");
        if (!(std::isfinite(modulus_inclined) && modulus_inclined > 0.0))
            errors.push_back("modulus_inclined_kn_mm2: must be > 0");
        if (!(std::isfinite(area_horizontal) && area_horizontal > 0.0))
            errors.push_back("area_horizontal_mm2: must be > 0");
        if (!(std::isfinite(modulus_horizontal) && modulus_horizontal > 0.0))
            errors.push_back("modulus_horizontal_kn_mm2: must be > 0");
        if (levels >= 2) {
            if (ratios_inclined.empty() || ratios_inclined.kind() != RatioKind::inclined ||
                ratios_inclined.finite_count() != levels)
                errors.push_back("ratios_inclined: must list rho^I_1..rho^I_" + std::to_string(levels) +
                                 " (" + std::to_string(levels) + " entries)");
            if (ratios_horizontal.empty() || ratios_horizontal.kind() != RatioKind::horizontal ||
                ratios_horizontal.finite_count() != levels - 1)
                errors.push_back("ratios_horizontal: must list rho^H_2..rho^H_" + std::to_string(levels) +
                                 " (" + std::to_string(levels - 1) + " entries)");
            const int ns = support_count();
            if (boundary.z1 < 1 || boundary.z1 > ns)
                errors.push_back("boundary.z1: must lie in 1.." + std::to_string(ns));
            if (boundary.z2 < 1 || boundary.z2 > ns)
                errors.push_back("boundary.z2: must lie in 1.." + std::to_string(ns));
            if (boundary.z1 >= boundary.z2)
                errors.push_back("boundary: requires z1 < z2");
        }
        if (!std::isfinite(boundary.d1))
            errors.push_back("boundary.d1: must be finite");
        if (!std::isfinite(boundary.d2))
            errors.push_back("boundary.d2: must be finite");
        return errors;
    }

    void ensure_valid() const {
        const auto errors = validate();
        if (errors.empty())
            return;
        std::string msg = "invalid structure config:";
        for (const auto& e : errors)
            msg += "\n  - " + e;
        throw ValidationError(msg);
    }
};

} // namespace qst
