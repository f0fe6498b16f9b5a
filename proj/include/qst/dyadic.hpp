#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "qst/errors.hpp"

namespace qst {

// Exact dyadic rational in [0, 1]: numerator / 2^log2_denominator.
// Stored reduced, so the numerator is odd unless the value is 0.
// All evaluation grids of the structure ((i-1)/2^{N-1}, (2t-1)/2^n) are
// points of this form, and keeping them exact lets the series code decide
// term vanishing by integer arithmetic instead of an epsilon.
class DyadicPoint {
public:
    DyadicPoint() = default;

    DyadicPoint(std::uint64_t numerator, int log2_denominator)
        : num_(numerator), log2_den_(log2_denominator) {
        if (log2_den_ < 0 || log2_den_ > kMaxLog2Den)
            throw DomainError("DyadicPoint: log2 denominator out of range [0, 52]");
        if (num_ > (std::uint64_t{1} << log2_den_))
            throw DomainError("DyadicPoint: value exceeds 1");
        reduce();
    }

    std::uint64_t numerator() const { return num_; }
    int log2_denominator() const { return log2_den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_one() const { return num_ == 1 && log2_den_ == 0; }

    double value() const { return std::ldexp(static_cast<double>(num_), -log2_den_); }

    DyadicPoint plus(const DyadicPoint& other) const {
        const int den = std::max(log2_den_, other.log2_den_);
        const std::uint64_t a = num_ << (den - log2_den_);
        const std::uint64_t b = other.num_ << (den - other.log2_den_);
        return DyadicPoint(a + b, den);
    }

    DyadicPoint minus(const DyadicPoint& other) const {
        const int den = std::max(log2_den_, other.log2_den_);
        const std::uint64_t a = num_ << (den - log2_den_);
        const std::uint64_t b = other.num_ << (den - other.log2_den_);
        if (b > a)
            throw DomainError("DyadicPoint: subtraction below 0");
        return DyadicPoint(a - b, den);
    }

    // k-th coefficient of the dyadic expansion x = sum gamma_k / 2^{k+1}.
    // x = 1 expands as 0.111..., every coefficient 1.
    int expansion_coefficient(int k) const {
        if (k < 0)
            throw DomainError("DyadicPoint: negative expansion index");
        if (is_one())
            return 1;
        if (k >= log2_den_)
            return 0;
        return static_cast<int>((num_ >> (log2_den_ - 1 - k)) & 1u);
    }

    friend bool operator==(const DyadicPoint& a, const DyadicPoint& b) {
        return a.num_ == b.num_ && a.log2_den_ == b.log2_den_;
    }
    friend bool operator!=(const DyadicPoint& a, const DyadicPoint& b) { return !(a == b); }

    static constexpr int kMaxLog2Den = 52;

private:
    void reduce() {
        while (log2_den_ > 0 && (num_ & 1u) == 0) {
            num_ >>= 1;
            --log2_den_;
        }
    }

    std::uint64_t num_ = 0;
    int log2_den_ = 0;
};

} // namespace qst
