/**
 * @file coeff.hpp
 * @brief Integer Laurent polynomials in q and the rings q gets specialized into.
 */
#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace qakh {

using BigInt = mpz_class;
using BigRat = mpq_class;

/// Thrown for bad ring configurations (non-invertible q, unsupported kind).
class RingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * @brief Element of Z[q, q^-1] stored as exponent -> coefficient.
 *
 * Zero coefficients are never stored, so equality is structural.
 */
class LaurentPoly {
public:
    LaurentPoly() = default;
    LaurentPoly(long c);  // NOLINT: constants convert implicitly
    LaurentPoly(const BigInt& c);

    static LaurentPoly monomial(int exp, const BigInt& c = 1);
    static LaurentPoly q(int exp = 1) { return monomial(exp); }

    const std::map<int, BigInt>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_monomial() const { return terms_.size() == 1; }
    int min_exp() const;
    int max_exp() const;
    BigInt coeff(int exp) const;

    LaurentPoly& operator+=(const LaurentPoly& o);
    LaurentPoly& operator-=(const LaurentPoly& o);
    LaurentPoly& operator*=(const LaurentPoly& o);
    LaurentPoly operator-() const;
    friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
    friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b);
    bool operator==(const LaurentPoly& o) const { return terms_ == o.terms_; }
    bool operator!=(const LaurentPoly& o) const { return !(*this == o); }

    /// Multiply by q^k.
    LaurentPoly shifted(int k) const;
    /// Substitute q -> q^-1.
    LaurentPoly bar() const;

    std::string to_string() const;
    nlohmann::json to_json() const;
    static LaurentPoly from_json(const nlohmann::json& j);

private:
    void add_term(int exp, const BigInt& c);
    std::map<int, BigInt> terms_;
};

LaurentPoly laurent_add(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly laurent_mul(const LaurentPoly& a, const LaurentPoly& b);
LaurentPoly laurent_shift(const LaurentPoly& p, int k);

/// Element of a computation ring. F_p residues and F4 codes are stored as small integers.
using Scalar = BigRat;

enum class RingKind { Integers, PrimeField, Rationals, F4 };

/**
 * @brief A computation ring together with the value that q specializes to.
 *
 * F4 elements are coded 0, 1, 2 = w, 3 = w^2 = w + 1.
 */
class RingSpec {
public:
    /// Z with q = 1.
    RingSpec() : kind_(RingKind::Integers), p_(0), q_(1) {}
    static RingSpec integers(int q = 1);
    static RingSpec prime_field(long p, long q);
    static RingSpec rationals(const BigRat& q);
    static RingSpec f4(int q = 2);
    /// Parse "Z", "Q", "F5", "F4" plus a q string ("3", "1/2", "w").
    static RingSpec parse(const std::string& ring, const std::string& q);

    RingKind kind() const { return kind_; }
    long p() const { return p_; }
    const Scalar& q() const { return q_; }
    bool is_field() const { return kind_ != RingKind::Integers; }
    long characteristic() const;
    std::string name() const;
    nlohmann::json to_json() const;

    Scalar from_int(const BigInt& n) const;
    Scalar add(const Scalar& a, const Scalar& b) const;
    Scalar sub(const Scalar& a, const Scalar& b) const;
    Scalar mul(const Scalar& a, const Scalar& b) const;
    Scalar neg(const Scalar& a) const;
    Scalar inv(const Scalar& a) const;
    bool is_zero(const Scalar& a) const { return sgn(a) == 0; }
    bool is_unit(const Scalar& a) const;
    Scalar pow_q(int e) const;
    std::string format(const Scalar& a) const;

private:
    RingSpec(RingKind k, long p, Scalar q);
    Scalar reduce(const BigRat& v) const;
    RingKind kind_ = RingKind::Integers;
    long p_ = 0;
    Scalar q_;
};

/// Ring homomorphism Z[q,q^-1] -> r, q -> r.q().
Scalar specialize(const LaurentPoly& p, const RingSpec& r);

namespace f4 {
std::uint8_t add(std::uint8_t a, std::uint8_t b);
std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);
}  // namespace f4

}  // namespace qakh
