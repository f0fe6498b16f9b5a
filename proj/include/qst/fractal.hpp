#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qst/dyadic.hpp"
#include "qst/errors.hpp"
#include "qst/ratios.hpp"

namespace qst {

// Series depth used when sampling the fractal functions at non-dyadic
// abscissae. The truncation error of G is bounded by the series tail
// sum_{m>M} 1/(4^m rho_{m+2}); at depth 40 that is below double
// resolution for every admissible geometric tail (4r > 1).
inline constexpr int kPlotSeriesDepth = 40;

// Triangle wave: twice the distance from x to the nearest integer.
// 1-periodic, psi(k) = 0 and psi(k + 1/2) = 1 at integer k.
inline double psi(double x) {
    if (!std::isfinite(x))
        throw DomainError("psi: input must be finite");
    if (x < 0.0)
        throw DomainError("psi: input must be non-negative");
    return std::abs(2.0 * x - 2.0 * std::floor(x + 0.5));
}

// psi(2^m x) for dyadic x, decided exactly: the result is 0 whenever
// 2^m x is an integer, with no epsilon involved.
inline double psi_scaled(const DyadicPoint& x, int m) {
    const int k = x.log2_denominator() - m; // 2^m x = num / 2^k
    if (k <= 0)
        return 0.0;
    const std::uint64_t cap = std::uint64_t{1} << k;
    const std::uint64_t frac = x.numerator() & (cap - 1);
    const std::uint64_t twice = 2 * std::min(frac, cap - frac);
    return static_cast<double>(twice) / static_cast<double>(cap);
}

namespace detail {

inline void require_horizontal(const RatioSequence& ratios, const char* op) {
    if (ratios.kind() != RatioKind::horizontal)
        throw DomainError(std::string(op) + ": expects a horizontal ratio list (rho_{m+2} weights)");
}

} // namespace detail

// Takagi-class function G(x) = sum_m psi(2^m x) / (4^m rho_{m+2}) at a
// dyadic point, summed over every non-vanishing term. At x = j/2^d all
// terms with m >= d vanish, so the value never depends on ratios past
// the finite list unless the point is deeper than the structure grid.
inline double takagi_class(const DyadicPoint& x, const RatioSequence& ratios) {
    detail::require_horizontal(ratios, "takagi_class");
    double sum = 0.0;
    for (int m = x.log2_denominator() - 1; m >= 0; --m) {
        const double p = psi_scaled(x, m);
        if (p == 0.0)
            continue;
        if (!ratios.covers_term(m))
            throw DomainError("takagi_class: no ratio defined for series term " + std::to_string(m));
        sum += p / (std::ldexp(1.0, 2 * m) * ratios.term(m));
    }
    return sum;
}

// Same sum restricted to the first `terms` terms. Every requested term
// must have a defined ratio even if its triangle-wave factor vanishes.
inline double takagi_class(const DyadicPoint& x, const RatioSequence& ratios, int terms) {
    detail::require_horizontal(ratios, "takagi_class");
    if (terms < 0)
        throw DomainError("takagi_class: negative term count");
    if (terms > 0 && !ratios.covers_term(terms - 1))
        throw DomainError("takagi_class: requested terms exceed defined ratios");
    double sum = 0.0;
    for (int m = std::min(terms, x.log2_denominator()) - 1; m >= 0; --m) {
        const double p = psi_scaled(x, m);
        if (p == 0.0)
            continue;
        sum += p / (std::ldexp(1.0, 2 * m) * ratios.term(m));
    }
    return sum;
}

// Truncated series at an arbitrary abscissa in [0, 1], for curve
// sampling. Dyadic grids should go through the exact overloads.
inline double takagi_class(double x, const RatioSequence& ratios, int terms = kPlotSeriesDepth) {
    detail::require_horizontal(ratios, "takagi_class");
    if (!(std::isfinite(x) && 0.0 <= x && x <= 1.0))
        throw DomainError("takagi_class: x must lie in [0, 1]");
    if (terms < 0)
        throw DomainError("takagi_class: negative term count");
    if (terms > 0 && !ratios.covers_term(terms - 1))
        throw DomainError("takagi_class: requested terms exceed defined ratios");
    double sum = 0.0;
    for (int m = terms - 1; m >= 0; --m) {
        const double p = psi(std::ldexp(x, m));
        if (p == 0.0)
            continue;
        sum += p / (std::ldexp(1.0, 2 * m) * ratios.term(m));
    }
    return sum;
}

// First `count` coefficients gamma_k of the dyadic expansion
// x = sum_k gamma_k / 2^{k+1}. For x = (2t-1)/2^n the expansion is
// finite with gamma_{n-1} = 1; x = 1 expands as all ones.
inline std::vector<int> dyadic_coefficients(const DyadicPoint& x, int count) {
    if (count <= 0)
        throw DomainError("dyadic_coefficients: count must be positive");
    std::vector<int> gamma(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        gamma[static_cast<std::size_t>(k)] = x.expansion_coefficient(k);
    return gamma;
}

// J(x) = sum_k gamma_k(x) / (2^{k+1} rho_{k+2}). Finite for every dyadic
// x < 1; at x = 1 the sum is infinite and needs a geometric tail with
// 2*ratio > 1, where it closes to a geometric series.
inline double j_function(const DyadicPoint& x, const RatioSequence& ratios) {
    detail::require_horizontal(ratios, "j_function");
    if (x.is_one()) {
        const auto* tail = std::get_if<GeometricTail>(&ratios.extension());
        if (tail == nullptr)
            throw DomainError("j_function: x = 1 has an infinite expansion; requires a geometric tail");
        if (!(2.0 * tail->ratio > 1.0))
            throw DomainError("j_function: series at x = 1 diverges for 2r <= 1");
        const int kt = ratios.finite_count(); // first coefficient index served by the tail
        double sum = std::ldexp(1.0, -(kt + 1)) / tail->start * (2.0 * tail->ratio) / (2.0 * tail->ratio - 1.0);
        for (int k = kt - 1; k >= 0; --k)
            sum += std::ldexp(1.0, -(k + 1)) / ratios.term(k);
        return sum;
    }
    double sum = 0.0;
    for (int k = x.log2_denominator() - 1; k >= 0; --k) {
        if (x.expansion_coefficient(k) == 0)
            continue;
        if (!ratios.covers_term(k))
            throw DomainError("j_function: no ratio defined for expansion coefficient " + std::to_string(k));
        sum += std::ldexp(1.0, -(k + 1)) / ratios.term(k);
    }
    return sum;
}

// Cantor pseudo-inverse over the bases (2r, 2): r/(2r-1) * J(x; {r^k}).
// r = 1 gives the identity. Requires r > 1/4 for summability of the
// underlying Takagi-class family, and r != 1/2.
inline double cantor_pseudo_inverse(const DyadicPoint& x, double r) {
    if (!(std::isfinite(r) && r > 0.25))
        throw DomainError("cantor_pseudo_inverse: requires r > 1/4");
    if (2.0 * r - 1.0 == 0.0)
        throw DomainError("cantor_pseudo_inverse: r = 1/2 is singular");
    return r / (2.0 * r - 1.0) * j_function(x, RatioSequence::geometric(r));
}

} // namespace qst
