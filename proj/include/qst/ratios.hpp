#pragma once

#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "qst/errors.hpp"

namespace qst {

enum class RatioKind { horizontal, inclined };

// Infinite continuation of a ratio list: the first appended element is
// `start`, each following one is multiplied by `ratio`.
// Summability of the series sum_m 1/(4^m rho_{m+2}) requires 4*ratio > 1.
struct GeometricTail {
    double start = 1.0;
    double ratio = 1.0;
};

// Stiffness ratio list rho_n of one member family.
// Horizontal lists are indexed from level 2 (rho_2 = 1), inclined lists
// from level 1 (rho_1 = 1). An optional extension supplies fictitious
// ratios past the levels that physically exist.
class RatioSequence {
public:
    using Extension = std::variant<std::monostate, std::vector<double>, GeometricTail>;

    RatioSequence() = default; // empty, fails validation when used

    static RatioSequence horizontal(std::vector<double> finite, Extension ext = std::monostate{}) {
        return RatioSequence(RatioKind::horizontal, std::move(finite), std::move(ext));
    }

    static RatioSequence inclined(std::vector<double> finite, Extension ext = std::monostate{}) {
        return RatioSequence(RatioKind::inclined, std::move(finite), std::move(ext));
    }

    // Pure geometric family rho_{m+2} = r^m, the one-parameter subfamily
    // behind the Takagi-Landsberg curves and the Cantor pseudo-inverse.
    static RatioSequence geometric(double r) {
        return horizontal({1.0}, GeometricTail{r, r});
    }

    RatioKind kind() const { return kind_; }
    int first_level() const { return kind_ == RatioKind::horizontal ? 2 : 1; }
    int finite_count() const { return static_cast<int>(finite_.size()); }
    int last_finite_level() const { return first_level() + finite_count() - 1; }
    const std::vector<double>& finite() const { return finite_; }
    bool empty() const { return finite_.empty(); }

    bool has_extension() const { return !std::holds_alternative<std::monostate>(extension_); }
    const Extension& extension() const { return extension_; }

    RatioSequence with_geometric_tail(double start, double ratio) const {
        return RatioSequence(kind_, finite_, GeometricTail{start, ratio});
    }
    RatioSequence with_explicit_tail(std::vector<double> values) const {
        return RatioSequence(kind_, finite_, std::move(values));
    }
    RatioSequence without_extension() const {
        return RatioSequence(kind_, finite_, std::monostate{});
    }

    bool covers_level(int level) const {
        const int idx = level - first_level();
        if (idx < 0)
            return false;
        if (idx < finite_count())
            return true;
        if (const auto* list = std::get_if<std::vector<double>>(&extension_))
            return idx - finite_count() < static_cast<int>(list->size());
        return std::holds_alternative<GeometricTail>(extension_);
    }

    double rho(int level) const {
        const int idx = level - first_level();
        if (idx < 0)
            throw DomainError("RatioSequence: level " + std::to_string(level) + " precedes the list");
        if (idx < finite_count())
            return finite_[static_cast<std::size_t>(idx)];
        const int j = idx - finite_count();
        if (const auto* list = std::get_if<std::vector<double>>(&extension_)) {
            if (j < static_cast<int>(list->size()))
                return (*list)[static_cast<std::size_t>(j)];
        } else if (const auto* tail = std::get_if<GeometricTail>(&extension_)) {
            return tail->start * std::pow(tail->ratio, j);
        }
        throw DomainError("RatioSequence: no ratio defined for level " + std::to_string(level));
    }

    // Series-term view: term m of the Takagi-class sum uses rho_{m+2} for
    // horizontal lists (and rho_{m+1} for inclined ones).
    bool covers_term(int m) const { return covers_level(first_level() + m); }
    double term(int m) const { return rho(first_level() + m); }

private:
    RatioSequence(RatioKind kind, std::vector<double> finite, Extension ext)
        : kind_(kind), finite_(std::move(finite)), extension_(std::move(ext)) {
        if (finite_.empty())
            throw ValidationError("ratio list must not be empty");
        for (std::size_t i = 0; i < finite_.size(); ++i) {
            if (!(std::isfinite(finite_[i]) && finite_[i] > 0.0))
                throw ValidationError("ratio " + std::to_string(i) + " must be a positive real");
        }
        if (finite_.front() != 1.0)
            throw ValidationError(std::string("leading ratio must equal 1 (") +
                                  (kind_ == RatioKind::horizontal ? "rho_2" : "rho_1") + ")");
        if (const auto* list = std::get_if<std::vector<double>>(&extension_)) {
            for (double v : *list)
                if (!(std::isfinite(v) && v > 0.0))
                    throw ValidationError("extension ratios must be positive reals");
        } else if (const auto* tail = std::get_if<GeometricTail>(&extension_)) {
            if (!(std::isfinite(tail->start) && tail->start > 0.0))
                throw ValidationError("geometric tail start must be a positive real");
            if (!(std::isfinite(tail->ratio) && 4.0 * tail->ratio > 1.0))
                throw ValidationError("geometric tail violates summability: requires 4r > 1");
        }
    }

    RatioKind kind_ = RatioKind::horizontal;
    std::vector<double> finite_;
    Extension extension_;
};

} // namespace qst
