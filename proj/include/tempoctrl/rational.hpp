#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tempoctrl {

/// Exact rational number on 64-bit words, always in reduced form with a
/// positive denominator. Intermediates run through 128-bit arithmetic;
/// results that do not fit back into 64 bits throw std::overflow_error.
/// Controllability verdicts hinge on exact strict-vs-nonstrict comparisons,
/// so there is no floating-point construction or conversion here.
class Rat {
public:
    constexpr Rat() = default;
    constexpr Rat(std::int64_t n) : num_(n) {} // NOLINT: implicit by design
    Rat(std::int64_t n, std::int64_t d) { *this = make(n, d); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    bool isInteger() const { return den_ == 1; }
    bool isZero() const { return num_ == 0; }
    bool isNegative() const { return num_ < 0; }
    bool isPositive() const { return num_ > 0; }

    friend Rat operator+(const Rat& a, const Rat& b) {
        return make(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                    i128(a.den_) * b.den_);
    }
    friend Rat operator-(const Rat& a, const Rat& b) {
        return make(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                    i128(a.den_) * b.den_);
    }
    friend Rat operator*(const Rat& a, const Rat& b) {
        return make(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    }
    friend Rat operator/(const Rat& a, const Rat& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return make(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    }
    Rat operator-() const {
        Rat r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rat& operator+=(const Rat& b) { return *this = *this + b; }
    Rat& operator-=(const Rat& b) { return *this = *this - b; }
    Rat& operator*=(const Rat& b) { return *this = *this * b; }
    Rat& operator/=(const Rat& b) { return *this = *this / b; }

    friend bool operator==(const Rat& a, const Rat& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
    friend bool operator<(const Rat& a, const Rat& b) {
        return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
    }
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

    Rat abs() const { return num_ < 0 ? -*this : *this; }

    /// True iff *this is an integer multiple of step (step > 0).
    bool isMultipleOf(const Rat& step) const {
        // this/step = (num*step.den)/(den*step.num); integer iff den divides.
        i128 n = i128(num_) * step.den_;
        i128 d = i128(den_) * step.num_;
        if (d < 0) { n = -n; d = -d; }
        return d != 0 && n % d == 0;
    }

    /// Largest multiple of step that is <= *this (step > 0).
    Rat floorToMultiple(const Rat& step) const {
        return step * Rat(divideFloor(*this, step));
    }
    /// Smallest multiple of step that is >= *this (step > 0).
    Rat ceilToMultiple(const Rat& step) const {
        return step * Rat(-divideFloor(-*this, step));
    }

    /// "p" when integral, "p/q" otherwise.
    std::string str() const {
        std::string s = std::to_string(num_);
        if (den_ != 1) s += "/" + std::to_string(den_);
        return s;
    }

    /// Parses "p" or "p/q" with optional sign; throws std::invalid_argument.
    static Rat parse(std::string_view text) {
        auto pos = text.find('/');
        if (pos == std::string_view::npos)
            return Rat(parseInt(text));
        return Rat(parseInt(text.substr(0, pos)), parseInt(text.substr(pos + 1)));
    }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) {
        return os << r.str();
    }

    std::size_t hashValue() const {
        std::size_t h = std::hash<std::int64_t>{}(num_);
        return h ^ (std::hash<std::int64_t>{}(den_) + 0x9e3779b97f4a7c15ULL + (h << 6));
    }

private:
    using i128 = __int128;

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;

    static i128 gcd128(i128 a, i128 b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b != 0) {
            i128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    static Rat make(i128 n, i128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) { n = -n; d = -d; }
        i128 g = gcd128(n, d);
        if (g > 1) { n /= g; d /= g; }
        constexpr i128 lo = std::numeric_limits<std::int64_t>::min();
        constexpr i128 hi = std::numeric_limits<std::int64_t>::max();
        if (n < lo || n > hi || d > hi)
            throw std::overflow_error("rational out of 64-bit range");
        Rat r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }

    /// floor(a / step) as a plain integer; step must be positive.
    static std::int64_t divideFloor(const Rat& a, const Rat& step) {
        if (!step.isPositive()) throw std::domain_error("step must be positive");
        i128 n = i128(a.num_) * step.den_;
        i128 d = i128(a.den_) * step.num_;
        i128 q = n / d;
        if (n % d != 0 && (n < 0)) q -= 1;
        constexpr i128 lo = std::numeric_limits<std::int64_t>::min();
        constexpr i128 hi = std::numeric_limits<std::int64_t>::max();
        if (q < lo || q > hi) throw std::overflow_error("quotient out of range");
        return static_cast<std::int64_t>(q);
    }

    static std::int64_t parseInt(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("empty number");
        std::size_t i = 0;
        bool neg = false;
        if (s[0] == '+' || s[0] == '-') {
            neg = s[0] == '-';
            i = 1;
        }
        if (i == s.size()) throw std::invalid_argument("sign without digits");
        i128 v = 0;
        for (; i < s.size(); ++i) {
            if (s[i] < '0' || s[i] > '9')
                throw std::invalid_argument("bad digit in number: " + std::string(s));
            v = v * 10 + (s[i] - '0');
            if (v > i128(std::numeric_limits<std::int64_t>::max()) + 1)
                throw std::overflow_error("number literal out of range");
        }
        if (neg) v = -v;
        constexpr i128 lo = std::numeric_limits<std::int64_t>::min();
        constexpr i128 hi = std::numeric_limits<std::int64_t>::max();
        if (v < lo || v > hi) throw std::overflow_error("number literal out of range");
        return static_cast<std::int64_t>(v);
    }
};

inline Rat min(const Rat& a, const Rat& b) { return a < b ? a : b; }
inline Rat max(const Rat& a, const Rat& b) { return a < b ? b : a; }

/// One end of an interval: finite rational or an explicit infinity marker.
class Bound {
public:
    constexpr Bound() = default; // finite zero
    constexpr Bound(Rat v) : kind_(Kind::Finite), value_(v) {} // NOLINT
    constexpr Bound(std::int64_t v) : kind_(Kind::Finite), value_(v) {} // NOLINT
    static constexpr Bound minusInf() { return Bound(Kind::MinusInf); }
    static constexpr Bound plusInf() { return Bound(Kind::PlusInf); }

    bool isFinite() const { return kind_ == Kind::Finite; }
    bool isMinusInf() const { return kind_ == Kind::MinusInf; }
    bool isPlusInf() const { return kind_ == Kind::PlusInf; }
    const Rat& finite() const {
        if (!isFinite()) throw std::domain_error("infinite bound where finite required");
        return value_;
    }

    friend bool operator==(const Bound& a, const Bound& b) {
        return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
    }
    friend bool operator!=(const Bound& a, const Bound& b) { return !(a == b); }
    friend bool operator<(const Bound& a, const Bound& b) {
        if (a.kind_ != b.kind_) return rank(a.kind_) < rank(b.kind_);
        return a.kind_ == Kind::Finite && a.value_ < b.value_;
    }
    friend bool operator<=(const Bound& a, const Bound& b) { return !(b < a); }
    friend bool operator>(const Bound& a, const Bound& b) { return b < a; }
    friend bool operator>=(const Bound& a, const Bound& b) { return !(a < b); }

    /// Shift by a finite amount; infinities absorb.
    friend Bound operator+(const Bound& a, const Rat& r) {
        return a.isFinite() ? Bound(a.value_ + r) : a;
    }
    friend Bound operator-(const Bound& a, const Rat& r) {
        return a.isFinite() ? Bound(a.value_ - r) : a;
    }
    Bound operator-() const {
        switch (kind_) {
        case Kind::MinusInf: return plusInf();
        case Kind::PlusInf: return minusInf();
        default: return Bound(-value_);
        }
    }

    std::string str() const {
        switch (kind_) {
        case Kind::MinusInf: return "-inf";
        case Kind::PlusInf: return "inf";
        default: return value_.str();
        }
    }

private:
    enum class Kind { MinusInf, Finite, PlusInf };
    constexpr explicit Bound(Kind k) : kind_(k) {}
    static int rank(Kind k) { return k == Kind::MinusInf ? 0 : k == Kind::Finite ? 1 : 2; }

    Kind kind_ = Kind::Finite;
    Rat value_{0};
};

/// Closed interval [lo, hi] with optionally infinite ends.
struct Interval {
    Bound lo{Rat(0)};
    Bound hi{Rat(0)};

    Interval() = default;
    Interval(Bound l, Bound h) : lo(l), hi(h) {}
    Interval(Rat l, Rat h) : lo(l), hi(h) {}
    Interval(std::int64_t l, std::int64_t h) : lo(Rat(l)), hi(Rat(h)) {}

    static Interval point(Rat v) { return Interval(v, v); }
    static Interval atLeast(Rat l) { return Interval(Bound(l), Bound::plusInf()); }
    static Interval atMost(Rat h) { return Interval(Bound::minusInf(), Bound(h)); }
    static Interval unbounded() { return Interval(Bound::minusInf(), Bound::plusInf()); }

    bool wellFormed() const { return lo <= hi && !lo.isPlusInf() && !hi.isMinusInf(); }
    bool isFinite() const { return lo.isFinite() && hi.isFinite(); }
    bool isPoint() const { return isFinite() && lo.finite() == hi.finite(); }

    bool contains(const Rat& v) const { return Bound(v) >= lo && Bound(v) <= hi; }
    bool containsInterval(const Interval& other) const {
        return lo <= other.lo && other.hi <= hi;
    }
    /// True when the two closed intervals intersect or touch.
    bool meets(const Interval& other) const {
        return lo <= other.hi && other.lo <= hi;
    }
    Interval hullWith(const Interval& other) const {
        return Interval(lo < other.lo ? lo : other.lo, hi > other.hi ? hi : other.hi);
    }
    Interval shifted(const Rat& delta) const {
        return Interval(lo + delta, hi + delta);
    }

    friend bool operator==(const Interval& a, const Interval& b) {
        return a.lo == b.lo && a.hi == b.hi;
    }
    friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }

    std::string str() const { return "[" + lo.str() + ", " + hi.str() + "]"; }
};

} // namespace tempoctrl
