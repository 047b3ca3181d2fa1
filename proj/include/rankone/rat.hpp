#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace rankone {

/// Exact rational number in lowest terms with a positive denominator.
///
/// Thin value wrapper around GMP's mpq_class. Every constructor and
/// arithmetic result is canonicalized, so equal values have equal
/// representations and `to_string` is unique per value.
class Rat {
public:
    Rat() = default;
    Rat(long v) : q_(v) {}  // NOLINT(google-explicit-constructor)
    Rat(int v) : q_(v) {}   // NOLINT(google-explicit-constructor)
    Rat(long num, long den);
    explicit Rat(mpq_class q);

    /// Parses "p", "-p" or "p/q" (q != 0). Throws ParseError.
    static Rat parse(std::string_view text);

    /// Serializes as "p/q"; integers are written "p/1".
    std::string to_string() const;
    double to_double() const { return q_.get_d(); }

    const mpq_class& raw() const { return q_; }
    mpz_class numerator() const { return q_.get_num(); }
    mpz_class denominator() const { return q_.get_den(); }

    int sign() const { return sgn(q_); }
    bool is_zero() const { return sign() == 0; }
    bool is_integer() const { return q_.get_den() == 1; }

    Rat operator-() const { return Rat(mpq_class(-q_)); }

    Rat& operator+=(const Rat& o);
    Rat& operator-=(const Rat& o);
    Rat& operator*=(const Rat& o);
    Rat& operator/=(const Rat& o);

    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) { return cmp(a.q_, b.q_) == 0; }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
        const int c = cmp(a.q_, b.q_);
        if (c < 0) return std::strong_ordering::less;
        if (c > 0) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

private:
    mpq_class q_;
};

Rat abs(const Rat& r);
Rat min(const Rat& a, const Rat& b);
Rat max(const Rat& a, const Rat& b);
/// r^e for e >= 0.
Rat pow(const Rat& r, unsigned e);

std::ostream& operator<<(std::ostream& os, const Rat& r);

}  // namespace rankone
