#include "core/fraction.hpp"

#include <cctype>
#include <numeric>

#include "core/errors.hpp"

namespace stepsvm {

Fraction Fraction::of(std::int64_t num, std::int64_t den) {
    if (den <= 0)
        throw validation_error("fraction denominator must be positive");
    if (num < 0)
        throw validation_error("fraction numerator must be non-negative");
    std::int64_t g = std::gcd(num, den);
    if (g == 0) g = 1;
    return Fraction{num / g, den / g};
}

Fraction Fraction::parse(const std::string& text) {
    if (text.empty())
        throw validation_error("empty fraction literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::size_t pos_a = 0, pos_b = 0;
        std::int64_t a = 0, b = 0;
        try {
            a = std::stoll(text.substr(0, slash), &pos_a);
            b = std::stoll(text.substr(slash + 1), &pos_b);
        } catch (const std::exception&) {
            throw validation_error("cannot parse fraction '" + text + "'");
        }
        if (pos_a != slash || pos_b != text.size() - slash - 1)
            throw validation_error("cannot parse fraction '" + text + "'");
        return of(a, b);
    }
    // Decimal literal: digits with at most one dot.
    std::int64_t num = 0;
    std::int64_t den = 1;
    bool seen_dot = false;
    bool seen_digit = false;
    for (char c : text) {
        if (c == '.') {
            if (seen_dot)
                throw validation_error("cannot parse fraction '" + text + "'");
            seen_dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            if (num > (INT64_MAX - 9) / 10 || (seen_dot && den > INT64_MAX / 10))
                throw validation_error("fraction literal out of range: '" + text + "'");
            num = num * 10 + (c - '0');
            if (seen_dot) den *= 10;
            seen_digit = true;
        } else {
            throw validation_error("cannot parse fraction '" + text + "'");
        }
    }
    if (!seen_digit)
        throw validation_error("cannot parse fraction '" + text + "'");
    return of(num, den);
}

std::string Fraction::str() const {
    return std::to_string(num) + "/" + std::to_string(den);
}

int Fraction::compare(const Fraction& other) const {
    __int128 lhs = static_cast<__int128>(num) * other.den;
    __int128 rhs = static_cast<__int128>(other.num) * den;
    if (lhs < rhs) return -1;
    if (lhs > rhs) return 1;
    return 0;
}

} // namespace stepsvm
