#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ranksched {

// Exact rational on int64 with 128-bit intermediates. Denominator is kept
// positive and the fraction reduced, so equality is plain member equality.
// Narrowing back to int64 is checked; callers see std::overflow_error rather
// than silent wraparound.
class Rational {
public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = i128(a.num_) * b.den_ + i128(b.num_) * a.den_;
        __int128 d = i128(a.den_) * b.den_;
        return make(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = i128(a.num_) * b.den_ - i128(b.num_) * a.den_;
        __int128 d = i128(a.den_) * b.den_;
        return make(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational: division by zero");
        return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rational operator-() const { return Rational(-num_, den_); }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

    // Floor toward negative infinity.
    std::int64_t floor() const {
        std::int64_t q = num_ / den_;
        if (num_ % den_ != 0 && num_ < 0) --q;
        return q;
    }

    bool is_integer() const { return den_ == 1; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    // "5", "-3/4" or a terminating decimal such as "272.7".
    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    // Fixed-point decimal with the given number of places, truncating extra
    // digits. Exact whenever the denominator divides a power of ten.
    std::string decimal(int places) const {
        std::int64_t n = num_;
        std::string sign;
        if (n < 0) { sign = "-"; n = -n; }
        __int128 scale = 1;
        for (int i = 0; i < places; ++i) scale *= 10;
        __int128 scaled = i128(n) * scale / den_;
        __int128 whole = scaled / scale;
        __int128 frac = scaled % scale;
        std::string w = to_string_i128(whole);
        if (places == 0) return sign + w;
        std::string f = to_string_i128(frac);
        f.insert(f.begin(), places - static_cast<int>(f.size()), '0');
        return sign + w + "." + f;
    }

    // Accepts "3", "-3", "3/4", "2.5".
    static Rational parse(const std::string& text);

private:
    static __int128 i128(std::int64_t v) { return static_cast<__int128>(v); }

    static std::string to_string_i128(__int128 v) {
        if (v == 0) return "0";
        std::string out;
        bool neg = v < 0;
        while (v != 0) {
            int digit = static_cast<int>(neg ? -(v % 10) : (v % 10));
            out.insert(out.begin(), static_cast<char>('0' + digit));
            v /= 10;
        }
        if (neg) out.insert(out.begin(), '-');
        return out;
    }

    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational: zero denominator");
        if (d < 0) { n = -n; d = -d; }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) { n /= g; d /= g; }
        static const __int128 lo = -static_cast<__int128>(INT64_MAX) - 1;
        static const __int128 hi = static_cast<__int128>(INT64_MAX);
        if (n < lo || n > hi || d > hi)
            throw std::overflow_error("rational: value exceeds 64-bit range");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) { __int128 t = a % b; a = b; b = t; }
        return a == 0 ? 1 : a;
    }

    void normalize() {
        Rational r = make(i128(num_), i128(den_));
        num_ = r.num_;
        den_ = r.den_;
    }

    std::int64_t num_;
    std::int64_t den_;
};

inline Rational Rational::parse(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("rational: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::int64_t n = std::stoll(text.substr(0, slash));
        std::int64_t d = std::stoll(text.substr(slash + 1));
        return Rational(n, d);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string whole = text.substr(0, dot);
        std::string frac = text.substr(dot + 1);
        if (frac.empty()) throw std::invalid_argument("rational: bad decimal '" + text + "'");
        for (char c : frac)
            if (c < '0' || c > '9') throw std::invalid_argument("rational: bad decimal '" + text + "'");
        bool neg = !whole.empty() && whole[0] == '-';
        std::int64_t w = (whole.empty() || whole == "-" || whole == "+") ? 0 : std::stoll(whole);
        std::int64_t den = 1;
        for (size_t i = 0; i < frac.size(); ++i) {
            if (den > INT64_MAX / 10) throw std::overflow_error("rational: too many decimal places");
            den *= 10;
        }
        std::int64_t f = frac.empty() ? 0 : std::stoll(frac);
        Rational r = Rational(w < 0 ? -w : w) + Rational(f, den);
        if (neg || w < 0) r = -r;
        return r;
    }
    return Rational(std::stoll(text));
}

} // namespace ranksched
