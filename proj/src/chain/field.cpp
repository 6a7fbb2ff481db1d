#include "opdual/field.hpp"

#include <cctype>

namespace opdual {

namespace {
bool is_prime(long p) {
    if (p < 2) return false;
    for (long q = 2; q * q <= p; ++q)
        if (p % q == 0) return false;
    return true;
}
} // namespace

Field Field::prime(long p) {
    if (!is_prime(p)) throw FieldError("not a prime: " + std::to_string(p));
    return Field(p);
}

Field Field::parse(const std::string& text) {
    if (text == "q" || text == "Q") return rationals();
    if (text.size() >= 2 && (text[0] == 'f' || text[0] == 'F')) {
        long p = 0;
        for (size_t i = 1; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i])))
                throw FieldError("bad field: " + text);
            p = p * 10 + (text[i] - '0');
            if (p > 1000000007L) throw FieldError("prime too large: " + text);
        }
        return prime(p);
    }
    throw FieldError("bad field: " + text);
}

std::string Field::name() const { return p_ == 0 ? "Q" : "F" + std::to_string(p_); }

Scalar Field::reduce(const Scalar& x) const {
    if (p_ == 0) return x;
    mpz_class P(p_);
    mpz_class num = x.get_num() % P;
    if (num < 0) num += P;
    if (x.get_den() == 1) return Scalar(num);
    mpz_class den = x.get_den() % P;
    if (den == 0) throw FieldError("denominator divisible by characteristic");
    mpz_class dinv;
    mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), P.get_mpz_t());
    mpz_class r = (num * dinv) % P;
    return Scalar(r);
}

Scalar Field::inv(const Scalar& x) const {
    Scalar r = reduce(x);
    if (r == 0) throw FieldError("division by zero");
    if (p_ == 0) return 1 / r;
    mpz_class P(p_), out;
    mpz_class v = r.get_num();
    mpz_invert(out.get_mpz_t(), v.get_mpz_t(), P.get_mpz_t());
    return Scalar(out);
}

} // namespace opdual
