#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace futs {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Exact non-negative rational, always stored canonically (gcd(p,q)=1, q>=1).
/// There is no subtraction: the type cannot represent negative values.
class Rational {
public:
    Rational() : v_(0) {}

    Rational(long num, long den) : v_(num, den) {
        if (den == 0) throw Error("rational: zero denominator");
        v_.canonicalize();
        if (v_ < 0) throw Error("rational: negative value");
    }

    explicit Rational(long num) : Rational(num, 1) {}

    /// Accepts "p/q", "p", or a decimal with finite expansion ("1.25").
    static Rational parse(std::string_view text);

    static Rational zero() { return Rational(); }
    static Rational one() { return Rational(1, 1); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_positive() const { return sgn(v_) > 0; }

    Rational operator+(const Rational& o) const { return Rational(v_ + o.v_); }
    Rational operator*(const Rational& o) const { return Rational(v_ * o.v_); }

    Rational operator/(const Rational& o) const {
        if (o.is_zero()) throw Error("rational: division by zero");
        return Rational(v_ / o.v_);
    }

    friend bool operator==(const Rational& a, const Rational& b) { return cmp(a.v_, b.v_) == 0; }

    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    friend const Rational& min(const Rational& a, const Rational& b) { return b < a ? b : a; }

    /// Canonical form "p/q", denominator always explicit ("3/1", "1/2").
    std::string str() const {
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

private:
    explicit Rational(mpq_class v) : v_(std::move(v)) {}

    mpq_class v_;
};

}  // namespace futs
