#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace opdual {

using Scalar = mpq_class;

// Ground field: the rationals (characteristic 0) or F_p. Values of F_p are
// kept as integers in [0, p) inside the same rational type.
class Field {
public:
    Field() : p_(2) {}

    static Field rationals() { return Field(0); }
    static Field prime(long p);
    // "q", "Q", "f2", "F3", ...
    static Field parse(const std::string& text);

    long characteristic() const { return p_; }
    bool is_rational() const { return p_ == 0; }
    std::string name() const;

    Scalar reduce(const Scalar& x) const;
    bool is_zero(const Scalar& x) const { return reduce(x) == 0; }
    bool equal(const Scalar& a, const Scalar& b) const { return is_zero(a - b); }
    Scalar inv(const Scalar& x) const;

    bool operator==(const Field& o) const { return p_ == o.p_; }
    bool operator!=(const Field& o) const { return p_ != o.p_; }

private:
    explicit Field(long p) : p_(p) {}
    long p_;
};

inline Scalar sign_scalar(int parity) { return (parity & 1) ? Scalar(-1) : Scalar(1); }

struct FieldError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace opdual
