#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "qst/config.hpp"
#include "qst/dyadic.hpp"
#include "qst/errors.hpp"
#include "qst/fractal.hpp"
#include "qst/topology.hpp"

namespace qst {

// Dimensionless groups shared by every displacement formula.
// omega_h = F c^3 / (2 A^H E^H s^3), omega_i = F / (A^I E^I s^3);
// lambda1/lambda2 anchor the boundary displacements and chi is their
// slope between the two prescribed supports.
struct DimensionlessGroups {
    double omega_h = 0.0;
    double omega_i = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double chi = 0.0;
};

// Everything the closed form yields for one config. Displacements are
// stored dimensionless (per unit height); millimetre values are views
// obtained by multiplying with Y.
struct AnalysisResult {
    DimensionlessGroups groups;
    std::vector<double> inclined_force;       // [kN] by level, 1..N
    std::vector<double> horizontal_force;     // [kN] by level, 2..N
    std::vector<double> reaction_vertical;    // [kN] per support, + up
    std::vector<double> reaction_horizontal;  // [kN] per support, + right
    std::vector<double> delta;                // per support
    std::vector<double> stiffness;            // [kN/mm] per support
    std::vector<std::vector<double>> epsilon; // [level-1][t-1], levels 1..N+1, + up
    std::vector<std::vector<double>> mu;      // same layout, + right
};

namespace detail {

// G evaluated on the support grid, x = (i-1)/2^{N-1}, finite ratios only.
inline double grid_g(const StructureConfig& config, int support) {
    const DyadicPoint x(static_cast<std::uint64_t>(support - 1), config.levels - 1);
    return takagi_class(x, config.ratios_horizontal);
}

} // namespace detail

inline DimensionlessGroups dimensionless_groups(const StructureConfig& config) {
    const Trig t = config.trig();
    DimensionlessGroups g;
    const double cos3 = t.c_over_s * t.c_over_s * t.c_over_s;
    g.omega_h = config.load * cos3 / (2.0 * config.area_horizontal * config.modulus_horizontal);
    g.omega_i = config.load / (config.area_inclined * config.modulus_inclined * t.s * t.s * t.s);
    g.lambda1 = config.boundary.d1 - g.omega_h * detail::grid_g(config, config.boundary.z1);
    g.lambda2 = config.boundary.d2 - g.omega_h * detail::grid_g(config, config.boundary.z2);
    g.chi = (g.lambda2 - g.lambda1) / (config.boundary.z2 - config.boundary.z1);
    return g;
}

// Axial forces by level: -F/(2^n s) in the inclined members (compression)
// and F c/(2^{n-1} s) in the horizontal ones (tension).
inline std::pair<std::vector<double>, std::vector<double>> member_forces(const StructureConfig& config) {
    const Trig t = config.trig();
    std::vector<double> inclined(static_cast<std::size_t>(config.levels));
    for (int n = 1; n <= config.levels; ++n)
        inclined[static_cast<std::size_t>(n - 1)] = -config.load / (std::ldexp(1.0, n) * t.s);
    std::vector<double> horizontal(static_cast<std::size_t>(config.levels - 1));
    for (int n = 2; n <= config.levels; ++n)
        horizontal[static_cast<std::size_t>(n - 2)] =
            config.load * t.c_over_s / std::ldexp(1.0, n - 1);
    return {std::move(inclined), std::move(horizontal)};
}

// Uniform reaction pattern: F/2^N up at the two end supports, F/2^{N-1}
// up elsewhere; horizontal reactions only at the ends, +-Fc/(2^N s).
inline std::pair<std::vector<double>, std::vector<double>> support_reactions(const StructureConfig& config) {
    const Trig t = config.trig();
    const int ns = config.support_count();
    const double end_v = std::ldexp(config.load, -config.levels);
    const double end_h = std::ldexp(config.load * t.c_over_s, -config.levels);
    std::vector<double> vertical(static_cast<std::size_t>(ns), 2.0 * end_v);
    std::vector<double> horizontal(static_cast<std::size_t>(ns), 0.0);
    vertical.front() = end_v;
    vertical.back() = end_v;
    horizontal.front() = end_h;
    horizontal.back() = -end_h;
    return {std::move(vertical), std::move(horizontal)};
}

// delta_i = Omega^H G((i-1)/2^{N-1}) + chi (i - z1) + lambda1. The two
// prescribed supports reproduce d1 and d2 exactly.
inline std::vector<double> support_displacements(const StructureConfig& config) {
    config.ensure_valid();
    const DimensionlessGroups g = dimensionless_groups(config);
    const int ns = config.support_count();
    std::vector<double> delta(static_cast<std::size_t>(ns));
    for (int i = 1; i <= ns; ++i)
        delta[static_cast<std::size_t>(i - 1)] =
            g.omega_h * detail::grid_g(config, i) + g.chi * (i - config.boundary.z1) + g.lambda1;
    delta[static_cast<std::size_t>(config.boundary.z1 - 1)] = config.boundary.d1;
    delta[static_cast<std::size_t>(config.boundary.z2 - 1)] = config.boundary.d2;
    return delta;
}

// Every support must settle (delta_i < 0): the uniform pattern loads all
// of them downward. Lists every offender.
inline void require_compressive(const std::vector<double>& delta) {
    std::string offenders;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!(delta[i] < 0.0))
            offenders += (offenders.empty() ? "" : ", ") + std::to_string(i + 1);
    }
    if (!offenders.empty())
        throw ValidationError("non-compressive support displacement (delta >= 0) at supports: " + offenders +
                              "; adjust z1/z2/d1/d2");
}

// Residuals of the compatibility system: one equation per embedded
// sub-structure, residual(m, u) = delta_{u 2^{N-m-1}+1}
// - 2 delta_{u 2^{N-m-1}+2^{N-m-2}+1} + delta_{(u+1) 2^{N-m-1}+1}
// + Omega^H 2/(4^m rho^H_{m+2}); zero for a compatible delta field.
// Indexed m-major: (m, u) -> 2^m - 1 + u.
inline std::vector<double> pvw_residuals(const StructureConfig& config, const std::vector<double>& delta) {
    if (static_cast<int>(delta.size()) != config.support_count())
        throw DomainError("pvw_residuals: delta has " + std::to_string(delta.size()) + " entries, expected " +
                          std::to_string(config.support_count()));
    const DimensionlessGroups g = dimensionless_groups(config);
    std::vector<double> res;
    res.reserve(static_cast<std::size_t>((1 << (config.levels - 1)) - 1));
    for (int m = 0; m <= config.levels - 2; ++m) {
        const int stride = 1 << (config.levels - m - 1);
        for (int u = 0; u < (1 << m); ++u) {
            const double left = delta[static_cast<std::size_t>(u * stride)];
            const double mid = delta[static_cast<std::size_t>(u * stride + stride / 2)];
            const double right = delta[static_cast<std::size_t>((u + 1) * stride)];
            const double rhs = g.omega_h * 2.0 / (std::ldexp(1.0, 2 * m) * config.ratios_horizontal.rho(m + 2));
            res.push_back(left - 2.0 * mid + right + rhs);
        }
    }
    return res;
}

// Spring constants that realize the delta field under the uniform
// reaction pattern: k_i = F / (-2^N Y delta_i) at the ends and
// F / (-2^{N-1} Y delta_i) at interior supports.
inline std::vector<double> support_stiffnesses(const StructureConfig& config, const std::vector<double>& delta) {
    require_compressive(delta);
    const int ns = config.support_count();
    if (static_cast<int>(delta.size()) != ns)
        throw DomainError("support_stiffnesses: delta size mismatch");
    std::vector<double> k(static_cast<std::size_t>(ns));
    for (int i = 1; i <= ns; ++i) {
        const int halvings = (i == 1 || i == ns) ? config.levels : config.levels - 1;
        k[static_cast<std::size_t>(i - 1)] = config.load / (-std::ldexp(1.0, halvings) * config.height *
                                                            delta[static_cast<std::size_t>(i - 1)]);
    }
    return k;
}

namespace detail {

// Flexibility sum of the inclined load path below level n:
// 2/(4^N rho^I_N) + sum_{k=n}^{N-1} 1/(4^k rho^I_k).
inline double inclined_path_sum(const StructureConfig& config, int level) {
    double sum = 2.0 / (std::ldexp(1.0, 2 * config.levels) * config.ratios_inclined.rho(config.levels));
    for (int k = config.levels - 1; k >= level; --k)
        sum += 1.0 / (std::ldexp(1.0, 2 * k) * config.ratios_inclined.rho(k));
    return sum;
}

inline double level_g(const StructureConfig& config, int level, std::uint64_t num) {
    // G(num / 2^{level-1}) with the finite ratio list.
    return takagi_class(DyadicPoint(num, level - 1), config.ratios_horizontal);
}

} // namespace detail

// Vertical displacement per unit height of every node. Support row:
// eps_{N+1,t} = delta_t. Above it the node rides the mean of the two
// flanking support displacements minus the inclined-path stretch.
inline std::vector<std::vector<double>> vertical_displacements(const StructureConfig& config,
                                                               const std::vector<double>& delta) {
    const DimensionlessGroups g = dimensionless_groups(config);
    const int n_levels = config.levels;
    std::vector<std::vector<double>> eps(static_cast<std::size_t>(n_levels + 1));
    for (int n = 1; n <= n_levels; ++n) {
        auto& row = eps[static_cast<std::size_t>(n - 1)];
        row.resize(static_cast<std::size_t>(1) << (n - 1));
        const double path = g.omega_i * detail::inclined_path_sum(config, n);
        for (int t = 1; t <= (1 << (n - 1)); ++t) {
            const double gsum = detail::level_g(config, n, static_cast<std::uint64_t>(t - 1)) +
                                detail::level_g(config, n, static_cast<std::uint64_t>(t));
            const double offset = std::ldexp(static_cast<double>(2 * t - 1), n_levels - n - 1) + 1.0 -
                                  config.boundary.z1;
            row[static_cast<std::size_t>(t - 1)] =
                0.5 * g.omega_h * gsum + g.chi * offset + g.lambda1 - path;
        }
    }
    eps[static_cast<std::size_t>(n_levels)] = delta;
    return eps;
}

// Horizontal displacement per unit height, G-difference form:
// mu_{n,t} = (Omega^H s / 2c)(G((t-1)/2^{n-1}) - G(t/2^{n-1}))
//          - chi 2^{N-n-1} s/c; zero on the support row.
inline std::vector<std::vector<double>> horizontal_displacements(const StructureConfig& config,
                                                                 const std::vector<double>& delta) {
    if (static_cast<int>(delta.size()) != config.support_count())
        throw DomainError("horizontal_displacements: delta size mismatch");
    const DimensionlessGroups g = dimensionless_groups(config);
    const Trig trig = config.trig();
    const double s_over_c = 1.0 / trig.c_over_s;
    const int n_levels = config.levels;
    std::vector<std::vector<double>> mu(static_cast<std::size_t>(n_levels + 1));
    for (int n = 1; n <= n_levels; ++n) {
        auto& row = mu[static_cast<std::size_t>(n - 1)];
        row.resize(static_cast<std::size_t>(1) << (n - 1));
        for (int t = 1; t <= (1 << (n - 1)); ++t) {
            const double gdiff = detail::level_g(config, n, static_cast<std::uint64_t>(t - 1)) -
                                 detail::level_g(config, n, static_cast<std::uint64_t>(t));
            row[static_cast<std::size_t>(t - 1)] =
                0.5 * g.omega_h * s_over_c * gdiff - g.chi * std::ldexp(s_over_c, n_levels - n - 1);
        }
    }
    mu[static_cast<std::size_t>(n_levels)]
        .resize(static_cast<std::size_t>(config.support_count()), 0.0);
    return mu;
}

namespace detail {

// Horizontal ratios with a guaranteed value at level N+1 for the
// expansion form of mu. The appended value cancels exactly against the
// gamma_{n-1} term of J, so a unit tail is attached when the config
// does not specify an extension.
inline RatioSequence mu_ratios(const StructureConfig& config) {
    if (config.ratios_horizontal.has_extension())
        return config.ratios_horizontal;
    return config.ratios_horizontal.with_geometric_tail(1.0, 1.0);
}

} // namespace detail

// Same displacements through the dyadic-expansion route:
// mu_{n,t} = (Omega^H s / 2^{n-2} c)(2 J((2t-1)/2^n) - 1/(2^{n-1} rho^H_{n+1})
//          - sum_{k<=n-2} 1/(2^{k+1} rho^H_{k+2})) - chi 2^{N-n-1} s/c.
inline std::vector<std::vector<double>> horizontal_displacements_expansion(const StructureConfig& config) {
    const DimensionlessGroups g = dimensionless_groups(config);
    const Trig trig = config.trig();
    const double s_over_c = 1.0 / trig.c_over_s;
    const RatioSequence ratios = detail::mu_ratios(config);
    const int n_levels = config.levels;
    std::vector<std::vector<double>> mu(static_cast<std::size_t>(n_levels + 1));
    for (int n = 1; n <= n_levels; ++n) {
        auto& row = mu[static_cast<std::size_t>(n - 1)];
        row.resize(static_cast<std::size_t>(1) << (n - 1));
        double bracket_const = 1.0 / (std::ldexp(1.0, n - 1) * ratios.rho(n + 1));
        for (int k = 0; k <= n - 2; ++k)
            bracket_const += 1.0 / (std::ldexp(1.0, k + 1) * ratios.rho(k + 2));
        for (int t = 1; t <= (1 << (n - 1)); ++t) {
            const double j = j_function(DyadicPoint(static_cast<std::uint64_t>(2 * t - 1), n), ratios);
            row[static_cast<std::size_t>(t - 1)] =
                g.omega_h * s_over_c * std::ldexp(2.0 * j - bracket_const, 2 - n) -
                g.chi * std::ldexp(s_over_c, n_levels - n - 1);
        }
    }
    mu[static_cast<std::size_t>(n_levels)]
        .resize(static_cast<std::size_t>(config.support_count()), 0.0);
    return mu;
}

namespace detail {

inline void require_extends(const StructureConfig& config, const RatioSequence& ratios,
                            const char* op) {
    const auto& base = config.ratios_horizontal.finite();
    const auto& given = ratios.finite();
    bool ok = ratios.kind() == RatioKind::horizontal && given.size() >= base.size();
    for (std::size_t i = 0; ok && i < base.size(); ++i)
        ok = given[i] == base[i];
    if (!ok)
        throw DomainError(std::string(op) +
                          ": ratio list does not extend the structure's horizontal ratios");
}

} // namespace detail

// The fractal functions the node displacements live on. `ratios` must
// extend the config's finite horizontal list; the grid values never
// depend on the chosen extension.
inline double f_delta(const DyadicPoint& x, const StructureConfig& config, const RatioSequence& ratios) {
    detail::require_extends(config, ratios, "f_delta");
    const DimensionlessGroups g = dimensionless_groups(config);
    const double offset = std::ldexp(x.value(), config.levels - 1) + 1.0 - config.boundary.z1;
    return g.omega_h * takagi_class(x, ratios) + g.chi * offset + g.lambda1;
}

inline double f_epsilon(int level, const DyadicPoint& x, const StructureConfig& config,
                        const RatioSequence& ratios) {
    if (level < 1 || level > config.levels + 1)
        throw DomainError("f_epsilon: level out of range");
    if (level == config.levels + 1)
        return f_delta(x, config, ratios); // support row
    detail::require_extends(config, ratios, "f_epsilon");
    const DimensionlessGroups g = dimensionless_groups(config);
    const DyadicPoint half_step(1, level);
    const double gsum = takagi_class(x.minus(half_step), ratios) + takagi_class(x.plus(half_step), ratios);
    const double offset = std::ldexp(x.value(), config.levels - 1) + 1.0 - config.boundary.z1;
    return 0.5 * g.omega_h * gsum + g.chi * offset + g.lambda1 -
           g.omega_i * detail::inclined_path_sum(config, level);
}

inline double f_mu(int level, const DyadicPoint& x, const StructureConfig& config,
                   const RatioSequence& ratios) {
    if (level < 1 || level > config.levels + 1)
        throw DomainError("f_mu: level out of range");
    if (level == config.levels + 1)
        return 0.0;
    detail::require_extends(config, ratios, "f_mu");
    const DimensionlessGroups g = dimensionless_groups(config);
    const Trig trig = config.trig();
    const double s_over_c = 1.0 / trig.c_over_s;
    RatioSequence extended = ratios.has_extension() ? ratios : ratios.with_geometric_tail(1.0, 1.0);
    double bracket = 2.0 * j_function(x, extended) -
                     1.0 / (std::ldexp(1.0, level - 1) * extended.rho(level + 1));
    for (int k = 0; k <= level - 2; ++k)
        bracket -= 1.0 / (std::ldexp(1.0, k + 1) * extended.rho(k + 2));
    return g.omega_h * s_over_c * std::ldexp(bracket, 2 - level) -
           g.chi * std::ldexp(s_over_c, config.levels - level - 1);
}

// Full closed-form run. Throws unless every support settles, except when
// the caller explicitly allows non-negative delta for exploration.
inline AnalysisResult analyze(const StructureConfig& config, bool allow_nonnegative_delta = false) {
    config.ensure_valid();
    AnalysisResult result;
    result.groups = dimensionless_groups(config);
    auto forces = member_forces(config);
    result.inclined_force = std::move(forces.first);
    result.horizontal_force = std::move(forces.second);
    auto reactions = support_reactions(config);
    result.reaction_vertical = std::move(reactions.first);
    result.reaction_horizontal = std::move(reactions.second);
    result.delta = support_displacements(config);
    if (!allow_nonnegative_delta)
        require_compressive(result.delta);
    bool compressive = true;
    for (double d : result.delta)
        compressive = compressive && d < 0.0;
    if (compressive)
        result.stiffness = support_stiffnesses(config, result.delta);
    else
        result.stiffness.assign(result.delta.size(), std::numeric_limits<double>::quiet_NaN());
    result.epsilon = vertical_displacements(config, result.delta);
    result.mu = horizontal_displacements(config, result.delta);
    return result;
}

} // namespace qst
