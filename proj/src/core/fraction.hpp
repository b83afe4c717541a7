#pragma once

#include <cstdint>
#include <string>

namespace stepsvm {

// Exact non-negative rational. Error rates are counts over sample sizes, so
// thresholds like 6/181 compare exactly instead of through doubles.
struct Fraction {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Fraction of(std::int64_t num, std::int64_t den);

    // Accepts "a/b" or a decimal literal ("0.25" becomes 25/100 reduced).
    static Fraction parse(const std::string& text);

    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string str() const;

    int compare(const Fraction& other) const;

    bool operator==(const Fraction& o) const { return compare(o) == 0; }
    bool operator!=(const Fraction& o) const { return compare(o) != 0; }
    bool operator<(const Fraction& o) const { return compare(o) < 0; }
    bool operator<=(const Fraction& o) const { return compare(o) <= 0; }
    bool operator>(const Fraction& o) const { return compare(o) > 0; }
    bool operator>=(const Fraction& o) const { return compare(o) >= 0; }
};

} // namespace stepsvm
