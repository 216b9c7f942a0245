#include "journeymap/rational.hpp"

#include <charconv>
#include <numeric>

#include "journeymap/error.hpp"

namespace journey {

namespace {

__extension__ typedef __int128 i128;

std::int64_t checked(i128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw Error(ErrorCode::InvalidArgument, "rational overflow");
    return static_cast<std::int64_t>(v);
}

Rational make(i128 num, i128 den) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    i128 a = num < 0 ? -num : num;
    i128 b = den;
    while (b != 0) {
        const auto t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num /= a;
        den /= a;
    }
    return Rational(checked(num), checked(den));
}

std::int64_t parse_int(std::string_view text) {
    std::int64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(text) + "'");
    }
    return v;
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
    if (den == 0) throw Error(ErrorCode::InvalidArgument, "zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    const auto g = std::gcd(num_, den_);
    if (g > 1) {
        num_ /= g;
        den_ /= g;
    }
}

Rational Rational::parse(std::string_view text) {
    if (const auto slash = text.find('/'); slash != text.npos) {
        return Rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
    }
    if (const auto dot = text.find('.'); dot != text.npos) {
        const auto whole = text.substr(0, dot);
        const auto frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 12 || frac.front() == '-' || frac.front() == '+') {
            throw Error(ErrorCode::InvalidArgument, "not a number: '" + std::string(text) + "'");
        }
        std::int64_t scale = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
        const bool negative = !whole.empty() && whole.front() == '-';
        const std::int64_t w = (whole.empty() || whole == "-") ? 0 : parse_int(whole);
        const std::int64_t f = parse_int(frac);
        const std::int64_t magnitude = (w < 0 ? -w : w) * scale + f;
        return Rational(negative ? -magnitude : magnitude, scale);
    }
    return Rational(parse_int(text));
}

std::string Rational::to_string() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational operator+(const Rational& a, const Rational& b) {
    return make(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Rational operator-(const Rational& a, const Rational& b) {
    return make(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

Rational operator*(const Rational& a, const Rational& b) {
    return make(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    return static_cast<i128>(a.num_) * b.den_ <=> static_cast<i128>(b.num_) * a.den_;
}

}  // namespace journey
