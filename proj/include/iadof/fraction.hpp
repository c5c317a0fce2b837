#pragma once

#include <numeric>
#include <stdexcept>
#include <string>

namespace iadof {

// Exact rational on 64-bit integers. Scores in this tool have numerators
// bounded by K^2 and denominators by 2K, so overflow is not a concern;
// comparisons still cross-multiply in 128 bits.
struct Fraction {
    long long num = 0;
    long long den = 1;  // > 0 and coprime with num after construction

    constexpr Fraction() = default;

    Fraction(long long n, long long d) {
        if (d == 0) throw std::domain_error("fraction with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        const long long g = std::gcd(n < 0 ? -n : n, d);
        num = g ? n / g : n;
        den = g ? d / g : d;
    }

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }

    friend bool operator==(const Fraction& a, const Fraction& b) {
        return a.num == b.num && a.den == b.den;
    }

    friend bool operator<(const Fraction& a, const Fraction& b) {
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }

    friend bool operator<=(const Fraction& a, const Fraction& b) { return a == b || a < b; }
    friend bool operator>(const Fraction& a, const Fraction& b) { return b < a; }
    friend bool operator>=(const Fraction& a, const Fraction& b) { return b <= a; }
};

}  // namespace iadof
