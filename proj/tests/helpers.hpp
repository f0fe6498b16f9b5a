#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "qst/analysis.hpp"
#include "qst/config.hpp"

namespace qst::testing {

// The worked-example structure: N = 5, tan(beta) = 2, Y = 16 m, F = 100 kN,
// both end supports settling 1050 mm.
inline StructureConfig reference_config() {
    StructureConfig c;
    c.levels = 5;
    c.beta_tan = 2.0;
    c.height = 16000.0;
    c.load = 100.0;
    c.area_inclined = 8.0;
    c.modulus_inclined = 210.0;
    c.area_horizontal = 0.5;
    c.modulus_horizontal = 210.0;
    c.ratios_inclined = RatioSequence::inclined({1.0, 0.5, 0.5, 0.25, 0.25});
    c.ratios_horizontal = RatioSequence::horizontal({1.0, 0.75, 0.5, 0.5});
    c.boundary = {1, 17, -1050.0 / 16000.0, -1050.0 / 16000.0};
    return c;
}

// Structurally trivial config of a given depth, unit ratios.
inline StructureConfig sized_config(int levels) {
    StructureConfig c;
    c.levels = levels;
    c.beta_tan = 2.0;
    c.height = 16000.0;
    c.load = 100.0;
    c.area_inclined = 8.0;
    c.modulus_inclined = 210.0;
    c.area_horizontal = 0.5;
    c.modulus_horizontal = 210.0;
    c.ratios_inclined = RatioSequence::inclined(std::vector<double>(levels, 1.0));
    c.ratios_horizontal = RatioSequence::horizontal(std::vector<double>(levels - 1, 1.0));
    c.boundary = {1, (1 << (levels - 1)) + 1, -0.1, -0.1};
    return c;
}

// Random admissible config: moderate parameter decades, random boundary
// pair, then d1/d2 shifted down until every support settles.
inline StructureConfig random_config(std::mt19937& rng, int levels) {
    auto uniform = [&rng](double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(rng);
    };
    StructureConfig c;
    c.levels = levels;
    c.beta_tan = uniform(0.6, 3.0);
    c.height = uniform(2000.0, 40000.0);
    c.load = uniform(20.0, 300.0);
    c.area_inclined = uniform(2.0, 50.0);
    c.modulus_inclined = uniform(30.0, 250.0);
    c.area_horizontal = uniform(0.5, 20.0);
    c.modulus_horizontal = uniform(30.0, 250.0);

    std::vector<double> incl(static_cast<std::size_t>(levels), 1.0);
    for (std::size_t i = 1; i < incl.size(); ++i)
        incl[i] = uniform(0.3, 2.5);
    c.ratios_inclined = RatioSequence::inclined(std::move(incl));
    std::vector<double> hor(static_cast<std::size_t>(levels - 1), 1.0);
    for (std::size_t i = 1; i < hor.size(); ++i)
        hor[i] = uniform(0.3, 2.5);
    c.ratios_horizontal = RatioSequence::horizontal(std::move(hor));

    const int ns = c.support_count();
    int z1 = std::uniform_int_distribution<int>(1, ns - 1)(rng);
    int z2 = std::uniform_int_distribution<int>(z1 + 1, ns)(rng);
    c.boundary = {z1, z2, uniform(-0.1, -0.02), uniform(-0.1, -0.02)};

    // shifting both prescribed displacements moves every delta equally
    const auto delta = support_displacements(c);
    const double worst = *std::max_element(delta.begin(), delta.end());
    if (worst > -0.01) {
        c.boundary.d1 -= worst + 0.02;
        c.boundary.d2 -= worst + 0.02;
    }
    return c;
}

} // namespace qst::testing
