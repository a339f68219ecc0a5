#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace lorentz {

/// Error kinds, mapped to CLI exit codes (parse -> 2, precondition -> 3,
/// numerical -> 4).
enum class ErrorKind { Structural, Precondition, Parameter, Numerical, Parse };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
    if (!cond) throw Error(kind, msg);
}

/// Extended real value with explicit ±infinity tags.
///
/// The arithmetic follows the noncommutative conventions used throughout the
/// causal calculus:
///
///     (+inf) - (+inf) = +inf,   (-inf) - (-inf) = +inf,
///     (±inf) + z      = ±inf    for every extended z,
///     0 * (±inf)      = 0.
///
/// Infinities are never represented as IEEE infinities inside arithmetic
/// kernels (IEEE would give inf - inf = NaN, contradicting the convention
/// above). Time-separation values live in {-inf} ∪ [0, +inf]; general causal
/// function values may be any extended real.
class ExtendedTime {
public:
    enum class Tag : std::uint8_t { NegInf, Finite, PosInf };

    constexpr ExtendedTime() : tag_(Tag::Finite), v_(0.0) {}
    constexpr ExtendedTime(double v) : tag_(Tag::Finite), v_(v) {}

    static constexpr ExtendedTime neg_inf() { return ExtendedTime(Tag::NegInf); }
    static constexpr ExtendedTime pos_inf() { return ExtendedTime(Tag::PosInf); }
    static constexpr ExtendedTime finite(double v) { return ExtendedTime(v); }

    /// Maps IEEE ±inf onto the tagged representation.
    static ExtendedTime from_double(double v) {
        if (std::isinf(v)) return v > 0 ? pos_inf() : neg_inf();
        return ExtendedTime(v);
    }

    constexpr bool is_neg_inf() const { return tag_ == Tag::NegInf; }
    constexpr bool is_pos_inf() const { return tag_ == Tag::PosInf; }
    constexpr bool is_finite() const { return tag_ == Tag::Finite; }
    constexpr Tag tag() const { return tag_; }

    /// Finite value; throws on infinities.
    double value() const {
        require(is_finite(), ErrorKind::Numerical,
                "ExtendedTime: finite value requested from infinity");
        return v_;
    }

    /// Collapses to IEEE double (±inf for the tags). For printing and
    /// comparisons only, never re-fed into the convention-aware kernels.
    constexpr double as_double() const {
        if (tag_ == Tag::NegInf) return -std::numeric_limits<double>::infinity();
        if (tag_ == Tag::PosInf) return std::numeric_limits<double>::infinity();
        return v_;
    }

    friend constexpr bool operator==(ExtendedTime a, ExtendedTime b) {
        if (a.tag_ != b.tag_) return false;
        return a.tag_ != Tag::Finite || a.v_ == b.v_;
    }
    friend constexpr bool operator<(ExtendedTime a, ExtendedTime b) {
        if (a.tag_ == b.tag_) return a.tag_ == Tag::Finite && a.v_ < b.v_;
        if (a.tag_ == Tag::NegInf) return true;
        if (b.tag_ == Tag::NegInf) return false;
        return b.tag_ == Tag::PosInf;
    }
    friend constexpr bool operator!=(ExtendedTime a, ExtendedTime b) { return !(a == b); }
    friend constexpr bool operator>(ExtendedTime a, ExtendedTime b) { return b < a; }
    friend constexpr bool operator<=(ExtendedTime a, ExtendedTime b) { return !(b < a); }
    friend constexpr bool operator>=(ExtendedTime a, ExtendedTime b) { return !(a < b); }

    /// a + b. An infinite left operand wins: (±inf) + z = ±inf.
    friend constexpr ExtendedTime operator+(ExtendedTime a, ExtendedTime b) {
        if (!a.is_finite()) return a;
        if (!b.is_finite()) return b;
        return ExtendedTime(a.v_ + b.v_);
    }

    /// a - b under the conventions: (+inf)-(+inf) = (-inf)-(-inf) = +inf.
    friend constexpr ExtendedTime operator-(ExtendedTime a, ExtendedTime b) {
        if (a.is_pos_inf()) return pos_inf();
        if (a.is_neg_inf()) return b.is_neg_inf() ? pos_inf() : neg_inf();
        if (b.is_pos_inf()) return neg_inf();
        if (b.is_neg_inf()) return pos_inf();
        return ExtendedTime(a.v_ - b.v_);
    }

    /// Scalar multiple with 0 * (±inf) = 0.
    friend constexpr ExtendedTime operator*(double c, ExtendedTime a) {
        if (a.is_finite()) return ExtendedTime(c * a.v_);
        if (c == 0.0) return ExtendedTime(0.0);
        return (c > 0) == a.is_pos_inf() ? pos_inf() : neg_inf();
    }

    friend std::ostream& operator<<(std::ostream& os, ExtendedTime a) {
        if (a.is_neg_inf()) return os << "-inf";
        if (a.is_pos_inf()) return os << "inf";
        return os << a.v_;
    }

private:
    explicit constexpr ExtendedTime(Tag t) : tag_(t), v_(0.0) {}
    Tag tag_;
    double v_;
};

/// z^q for z in {-inf} ∪ [0, +inf], with 0^q = +inf when q < 0 and
/// (+inf)^q = 0 when q < 0. (-inf)^q is not in the calculus and throws.
inline ExtendedTime pow_q(ExtendedTime z, double q) {
    require(!z.is_neg_inf(), ErrorKind::Numerical, "pow_q: base is -inf");
    if (z.is_pos_inf()) return q > 0 ? ExtendedTime::pos_inf() : ExtendedTime(0.0);
    double v = z.value();
    require(v >= 0.0, ErrorKind::Numerical, "pow_q: negative base");
    if (v == 0.0) {
        if (q < 0) return ExtendedTime::pos_inf();
        return ExtendedTime(0.0);
    }
    return ExtendedTime(std::pow(v, q));
}

/// z^q / q, the power transform used by actions and transforms.
inline ExtendedTime pow_q_over_q(ExtendedTime z, double q) {
    require(q != 0.0 && q < 1.0, ErrorKind::Parameter, "exponent q must satisfy 0 != q < 1");
    return (1.0 / q) * pow_q(z, q);
}

}  // namespace lorentz
