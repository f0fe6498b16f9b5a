#include <catch2/catch.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "helpers.hpp"
#include "qst/analysis.hpp"

using namespace qst;
using qst::testing::reference_config;
using qst::testing::random_config;
using qst::testing::sized_config;

namespace {

constexpr double kOmegaH = 12.5 / 210.0; // F (c/s)^3 / (2 A^H E^H) of the reference config

double reference_omega_i() {
    const double s = 2.0 / std::sqrt(5.0);
    return 100.0 / (8.0 * 210.0 * s * s * s);
}

} // namespace

TEST_CASE("dimensionless groups of the reference config") {
    const auto g = dimensionless_groups(reference_config());
    CHECK(g.omega_h == Approx(kOmegaH).epsilon(1e-15));
    CHECK(g.omega_i == Approx(reference_omega_i()).epsilon(1e-14));
    CHECK(g.lambda1 == -0.065625); // G(0) = 0
    CHECK(g.lambda2 == -0.065625); // G(1) = 0
    CHECK(g.chi == 0.0);
}

TEST_CASE("member forces by level") {
    const auto [inclined, horizontal] = member_forces(reference_config());
    REQUIRE(inclined.size() == 5);
    REQUIRE(horizontal.size() == 4);
    CHECK(inclined[0] == Approx(-55.90169943749474).epsilon(1e-14));
    CHECK(horizontal[0] == Approx(25.0).epsilon(1e-14));
    for (std::size_t n = 0; n + 1 < inclined.size(); ++n)
        CHECK(inclined[n + 1] == Approx(0.5 * inclined[n]).epsilon(1e-14));
    for (std::size_t n = 0; n + 1 < horizontal.size(); ++n)
        CHECK(horizontal[n + 1] == Approx(0.5 * horizontal[n]).epsilon(1e-14));
}

TEST_CASE("support reactions follow the uniform pattern and balance") {
    const StructureConfig config = reference_config();
    const auto [vertical, horizontal] = support_reactions(config);
    REQUIRE(vertical.size() == 17);
    CHECK(vertical.front() == 3.125);
    CHECK(vertical.back() == 3.125);
    for (std::size_t i = 1; i + 1 < vertical.size(); ++i)
        CHECK(vertical[i] == 6.25);
    CHECK(horizontal.front() == 1.5625);
    CHECK(horizontal.back() == -1.5625);
    for (std::size_t i = 1; i + 1 < horizontal.size(); ++i)
        CHECK(horizontal[i] == 0.0);

    std::mt19937 rng(31);
    for (int n = 2; n <= 8; ++n) {
        const StructureConfig c = random_config(rng, n);
        const Topology topo = build_topology(c);
        const auto [v, h] = support_reactions(c);
        const double sum_v = std::accumulate(v.begin(), v.end(), 0.0);
        const double sum_h = std::accumulate(h.begin(), h.end(), 0.0);
        CHECK(std::abs(sum_v - c.load) <= 1e-10 * c.load);
        CHECK(std::abs(sum_h) <= 1e-10 * c.load);
        // moment balance about support 1 (loads down at the apex, reactions up)
        double moment = -c.load * topo.nodes[0].x;
        for (std::size_t i = 0; i < v.size(); ++i)
            moment += v[i] * topo.nodes[static_cast<std::size_t>(topo.supports[i].node)].x;
        CHECK(std::abs(moment) <= 1e-10 * c.load * topo.width);
    }
}

TEST_CASE("support displacements of the reference config") {
    const auto delta = support_displacements(reference_config());
    REQUIRE(delta.size() == 17);
    CHECK(delta[0] == -0.065625);
    CHECK(delta[16] == -0.065625);
    CHECK(delta[8] == Approx(kOmegaH - 0.065625).margin(1e-15)); // G(1/2) = 1

    // symmetric boundary: chi = 0 and the profile mirrors exactly
    for (int i = 1; i <= 17; ++i)
        CHECK(delta[static_cast<std::size_t>(i - 1)] == delta[static_cast<std::size_t>(17 - i)]);
}

TEST_CASE("non-settling boundaries are rejected with the offenders named") {
    StructureConfig config = reference_config();
    config.boundary.d1 = 0.0;
    config.boundary.d2 = 0.0;
    const auto delta = support_displacements(config);
    try {
        require_compressive(delta);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("non-compressive") != std::string::npos);
        CHECK(msg.find("1") != std::string::npos);
    }
    CHECK_THROWS_AS(analyze(config), ValidationError);
    CHECK_NOTHROW(analyze(config, /*allow_nonnegative_delta=*/true));
}

TEST_CASE("compatibility residuals vanish for the closed-form displacements") {
    const StructureConfig config = reference_config();
    const auto delta = support_displacements(config);
    const auto residuals = pvw_residuals(config, delta);
    REQUIRE(residuals.size() == 15); // 2^{N-1} - 1

    // by hand at (m, u) = (0, 0): delta_1 - 2 delta_9 + delta_17 = -2 Omega^H
    CHECK(delta[0] - 2.0 * delta[8] + delta[16] == Approx(-0.11904761904761904).margin(1e-15));
    for (double r : residuals)
        CHECK(std::abs(r) <= 1e-12);

    std::mt19937 rng(47);
    for (int n = 2; n <= 10; ++n) {
        for (int trial = 0; trial < 12; ++trial) {
            const StructureConfig c = random_config(rng, n);
            const auto d = support_displacements(c);
            const auto res = pvw_residuals(c, d);
            CHECK(static_cast<int>(res.size()) == (1 << (n - 1)) - 1);
            for (double r : res)
                CHECK(std::abs(r) <= 1e-12);
        }
    }

    CHECK_THROWS_AS(pvw_residuals(config, std::vector<double>(5, -0.1)), DomainError);
}

TEST_CASE("perturbing one interior support breaks at least one residual") {
    const StructureConfig config = reference_config();
    const auto delta = support_displacements(config);
    const auto base = pvw_residuals(config, delta);
    const double h = 1e-3;
    for (std::size_t i = 1; i + 1 < delta.size(); ++i) {
        auto bumped = delta;
        bumped[i] += h;
        const auto res = pvw_residuals(config, bumped);
        double worst = 0.0;
        for (std::size_t k = 0; k < res.size(); ++k)
            worst = std::max(worst, std::abs(res[k] - base[k]));
        CHECK(worst >= h);
    }
}

TEST_CASE("support stiffnesses of the reference config") {
    const StructureConfig config = reference_config();
    const auto delta = support_displacements(config);
    const auto k = support_stiffnesses(config, delta);
    REQUIRE(k.size() == 17);
    CHECK(k[0] == Approx(100.0 / 33600.0).epsilon(1e-14)); // 3.125 kN over 1050 mm
    CHECK(k[16] == Approx(100.0 / 33600.0).epsilon(1e-14));
    CHECK(k[8] == Approx(0.06402439024390244).epsilon(1e-9));
    for (double v : k)
        CHECK(v > 0.0);

    StructureConfig doubled = config;
    doubled.load = 200.0;
    const auto k2 = support_stiffnesses(doubled, delta);
    for (std::size_t i = 0; i < k.size(); ++i)
        CHECK(k2[i] == Approx(2.0 * k[i]).epsilon(1e-15));

    CHECK_THROWS_AS(support_stiffnesses(config, std::vector<double>(17, 0.1)), ValidationError);
}

TEST_CASE("vertical displacements: support row and apex") {
    const StructureConfig config = reference_config();
    const auto delta = support_displacements(config);
    const auto eps = vertical_displacements(config, delta);
    REQUIRE(eps.size() == 6);
    REQUIRE(eps[5].size() == 17);
    for (std::size_t i = 0; i < delta.size(); ++i)
        CHECK(eps[5][i] == delta[i]); // support row is the delta field itself

    // apex: mean of the end settlements minus the inclined-path stretch
    const double path_sum = 0.25 + 0.125 + 0.03125 + 0.015625 + 2.0 / 256.0;
    CHECK(path_sum == 0.4296875);
    const double expected_apex = -0.065625 - reference_omega_i() * path_sum;
    CHECK(eps[0][0] == Approx(expected_apex).margin(1e-14));
    CHECK(eps[0][0] == Approx(-0.101370).margin(5e-7));
    CHECK(eps[0][0] * config.height == Approx(-1621.9).margin(0.05));

    // with chi = 0 every node hangs at or below the flanking-support mean
    for (int n = 1; n <= 5; ++n) {
        for (int t = 1; t <= (1 << (n - 1)); ++t) {
            const double left = delta[static_cast<std::size_t>((t - 1) * (1 << (5 - n)))];
            const double right = delta[static_cast<std::size_t>(t * (1 << (5 - n)))];
            const double drop = eps[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(t - 1)] -
                                0.5 * (left + right);
            CHECK(drop < 0.0);
        }
    }
}

TEST_CASE("horizontal displacements: pinned values and antisymmetry") {
    const StructureConfig config = reference_config();
    const auto delta = support_displacements(config);
    const auto mu = horizontal_displacements(config, delta);
    REQUIRE(mu.size() == 6);
    for (double v : mu[5])
        CHECK(v == 0.0);
    CHECK(mu[0][0] == 0.0);                                       // apex, chi = 0
    CHECK(mu[1][0] == Approx(-kOmegaH).margin(1e-15));            // node (2,1): G(0) - G(1/2) = -1
    CHECK(mu[1][0] * config.height == Approx(-952.38).margin(0.01));

    // symmetric boundary: mu mirrors with opposite sign
    for (int n = 1; n <= 5; ++n)
        for (int t = 1; t <= (1 << (n - 1)); ++t)
            CHECK(mu[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(t - 1)] ==
                  -mu[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>((1 << (n - 1)) - t)]);
}

TEST_CASE("expansion form of mu equals the G-difference form") {
    std::mt19937 rng(53);
    for (int n = 2; n <= 8; ++n) {
        const StructureConfig c = random_config(rng, n);
        const auto delta = support_displacements(c);
        const auto direct = horizontal_displacements(c, delta);
        const auto expansion = horizontal_displacements_expansion(c);
        REQUIRE(direct.size() == expansion.size());
        for (std::size_t lvl = 0; lvl < direct.size(); ++lvl) {
            REQUIRE(direct[lvl].size() == expansion[lvl].size());
            for (std::size_t t = 0; t < direct[lvl].size(); ++t)
                CHECK(direct[lvl][t] == Approx(expansion[lvl][t]).margin(1e-12));
        }
    }
}

TEST_CASE("delta and mu ignore the inclined members; epsilon shifts only via the path term") {
    std::mt19937 rng(61);
    const StructureConfig base = random_config(rng, 6);
    StructureConfig tweaked = base;
    tweaked.area_inclined = base.area_inclined * 3.7;
    tweaked.modulus_inclined = base.modulus_inclined * 0.4;
    std::vector<double> incl(6, 1.0);
    for (std::size_t i = 1; i < incl.size(); ++i)
        incl[i] = 0.5 + 0.1 * static_cast<double>(i);
    tweaked.ratios_inclined = RatioSequence::inclined(std::move(incl));

    const auto delta_a = support_displacements(base);
    const auto delta_b = support_displacements(tweaked);
    for (std::size_t i = 0; i < delta_a.size(); ++i)
        CHECK(delta_a[i] == delta_b[i]); // bitwise: the evaluation path never touches them

    const auto mu_a = horizontal_displacements(base, delta_a);
    const auto mu_b = horizontal_displacements(tweaked, delta_b);
    for (std::size_t lvl = 0; lvl < mu_a.size(); ++lvl)
        for (std::size_t t = 0; t < mu_a[lvl].size(); ++t)
            CHECK(mu_a[lvl][t] == mu_b[lvl][t]);

    // epsilon + Omega^I * path_sum is the inclined-free part; it must agree
    const auto eps_a = vertical_displacements(base, delta_a);
    const auto eps_b = vertical_displacements(tweaked, delta_b);
    const auto ga = dimensionless_groups(base);
    const auto gb = dimensionless_groups(tweaked);
    for (int n = 1; n <= 6; ++n) {
        const double path_a = ga.omega_i * detail::inclined_path_sum(base, n);
        const double path_b = gb.omega_i * detail::inclined_path_sum(tweaked, n);
        for (std::size_t t = 0; t < eps_a[static_cast<std::size_t>(n - 1)].size(); ++t) {
            const double core_a = eps_a[static_cast<std::size_t>(n - 1)][t] + path_a;
            const double core_b = eps_b[static_cast<std::size_t>(n - 1)][t] + path_b;
            CHECK(core_a == Approx(core_b).margin(1e-15));
        }
    }
}

TEST_CASE("fractal functions interpolate the node displacement grids") {
    const StructureConfig config = reference_config();
    const auto delta = support_displacements(config);
    const auto eps = vertical_displacements(config, delta);
    const auto mu = horizontal_displacements(config, delta);

    // the two infinite families used alongside the worked example
    const auto ext_a = config.ratios_horizontal.with_geometric_tail(0.027, 0.3);
    const auto ext_b = config.ratios_horizontal.with_geometric_tail(0.75, 0.75);

    for (int i = 1; i <= 17; ++i) {
        const DyadicPoint x(static_cast<std::uint64_t>(i - 1), 4);
        const double fa = f_delta(x, config, ext_a);
        const double fb = f_delta(x, config, ext_b);
        CHECK(fa == fb);
        CHECK(fa == Approx(delta[static_cast<std::size_t>(i - 1)]).margin(1e-12));
        CHECK(f_epsilon(6, x, config, ext_a) == fa); // support row of f_epsilon
        CHECK(f_mu(6, x, config, ext_a) == 0.0);
    }
    for (int n = 1; n <= 5; ++n) {
        for (int t = 1; t <= (1 << (n - 1)); ++t) {
            const DyadicPoint x(static_cast<std::uint64_t>(2 * t - 1), n);
            const double fe_a = f_epsilon(n, x, config, ext_a);
            const double fe_b = f_epsilon(n, x, config, ext_b);
            CHECK(fe_a == fe_b);
            CHECK(fe_a ==
                  Approx(eps[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(t - 1)]).margin(1e-12));
            const double fm_a = f_mu(n, x, config, ext_a);
            const double fm_b = f_mu(n, x, config, ext_b);
            CHECK(fm_a == Approx(fm_b).margin(1e-15));
            CHECK(fm_a ==
                  Approx(mu[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(t - 1)]).margin(1e-12));
        }
    }

    CHECK_THROWS_AS(f_epsilon(7, DyadicPoint(1, 2), config, ext_a), DomainError);
    CHECK_THROWS_AS(f_mu(0, DyadicPoint(1, 2), config, ext_a), DomainError);

    // a ratio list that is not an extension of the structure's is rejected
    const auto unrelated = RatioSequence::geometric(0.5);
    CHECK_THROWS_AS(f_delta(DyadicPoint(1, 2), config, unrelated), DomainError);
    CHECK_THROWS_AS(f_epsilon(2, DyadicPoint(1, 2), config, unrelated), DomainError);
    CHECK_THROWS_AS(f_mu(2, DyadicPoint(1, 2), config, unrelated), DomainError);
}

TEST_CASE("analyze bundles a consistent result") {
    const StructureConfig config = reference_config();
    const AnalysisResult result = analyze(config);
    CHECK(result.delta.size() == 17);
    CHECK(result.stiffness.size() == 17);
    CHECK(result.epsilon.size() == 6);
    CHECK(result.mu.size() == 6);
    CHECK(result.inclined_force.size() == 5);
    CHECK(result.horizontal_force.size() == 4);
    CHECK(result.reaction_vertical.size() == 17);
    CHECK(result.groups.omega_h == Approx(kOmegaH));
}
