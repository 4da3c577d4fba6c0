/**
 * @file coeff.cpp
 * @brief LaurentPoly arithmetic and RingSpec scalar operations.
 */
#include "qakh/coeff.hpp"

#include <sstream>

namespace qakh {

LaurentPoly::LaurentPoly(long c) {
    if (c != 0) terms_[0] = c;
}

LaurentPoly::LaurentPoly(const BigInt& c) {
    if (sgn(c) != 0) terms_[0] = c;
}

LaurentPoly LaurentPoly::monomial(int exp, const BigInt& c) {
    LaurentPoly p;
    p.add_term(exp, c);
    return p;
}

void LaurentPoly::add_term(int exp, const BigInt& c) {
    if (sgn(c) == 0) return;
    auto it = terms_.find(exp);
    if (it == terms_.end()) {
        terms_.emplace(exp, c);
        return;
    }
    it->second += c;
    if (sgn(it->second) == 0) terms_.erase(it);
}

int LaurentPoly::min_exp() const {
    if (terms_.empty()) throw std::logic_error("min_exp of zero polynomial");
    return terms_.begin()->first;
}

int LaurentPoly::max_exp() const {
    if (terms_.empty()) throw std::logic_error("max_exp of zero polynomial");
    return terms_.rbegin()->first;
}

BigInt LaurentPoly::coeff(int exp) const {
    auto it = terms_.find(exp);
    return it == terms_.end() ? BigInt(0) : it->second;
}

LaurentPoly& LaurentPoly::operator+=(const LaurentPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

LaurentPoly& LaurentPoly::operator-=(const LaurentPoly& o) {
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

LaurentPoly LaurentPoly::operator-() const {
    LaurentPoly r = *this;
    for (auto& kv : r.terms_) kv.second = -kv.second;
    return r;
}

LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    LaurentPoly r;
    for (const auto& [ea, ca] : a.terms_)
        for (const auto& [eb, cb] : b.terms_) r.add_term(ea + eb, ca * cb);
    return r;
}

LaurentPoly& LaurentPoly::operator*=(const LaurentPoly& o) {
    *this = *this * o;
    return *this;
}

LaurentPoly LaurentPoly::shifted(int k) const {
    LaurentPoly r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(e + k, c);
    return r;
}

LaurentPoly LaurentPoly::bar() const {
    LaurentPoly r;
    for (const auto& [e, c] : terms_) r.terms_.emplace(-e, c);
    return r;
}

std::string LaurentPoly::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : terms_) {
        BigInt a = abs(c);
        if (first) {
            if (sgn(c) < 0) os << "-";
        } else {
            os << (sgn(c) < 0 ? " - " : " + ");
        }
        first = false;
        if (e == 0) {
            os << a.get_str();
            continue;
        }
        if (a != 1) os << a.get_str() << "*";
        os << "q";
        if (e != 1) os << "^" << e;
    }
    return os.str();
}

nlohmann::json LaurentPoly::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [e, c] : terms_) {
        if (c.fits_slong_p())
            j[std::to_string(e)] = c.get_si();
        else
            j[std::to_string(e)] = c.get_str();
    }
    return j;
}

LaurentPoly LaurentPoly::from_json(const nlohmann::json& j) {
    LaurentPoly p;
    for (auto it = j.begin(); it != j.end(); ++it) {
        int e = std::stoi(it.key());
        BigInt c = it->is_string() ? BigInt(it->get<std::string>()) : BigInt(it->get<long>());
        p.add_term(e, c);
    }
    return p;
}

LaurentPoly laurent_add(const LaurentPoly& a, const LaurentPoly& b) { return a + b; }
LaurentPoly laurent_mul(const LaurentPoly& a, const LaurentPoly& b) { return a * b; }
LaurentPoly laurent_shift(const LaurentPoly& p, int k) { return p.shifted(k); }

// ---------------------------------------------------------------- F4

namespace f4 {
// log table over the generator w: w^0 = 1, w^1 = 2, w^2 = 3.
static const int kLog[4] = {-1, 0, 1, 2};
static const std::uint8_t kExp[3] = {1, 2, 3};

std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0) return 0;
    return kExp[(kLog[a] + kLog[b]) % 3];
}

std::uint8_t inv(std::uint8_t a) {
    if (a == 0) throw RingError("division by zero in F4");
    return kExp[(3 - kLog[a]) % 3];
}
}  // namespace f4

// ---------------------------------------------------------------- RingSpec

static bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

RingSpec::RingSpec(RingKind k, long p, Scalar q) : kind_(k), p_(p), q_(std::move(q)) {
    q_ = reduce(q_);
    if (!is_unit(q_)) throw RingError("q = " + format(q_) + " is not invertible in " + name());
}

RingSpec RingSpec::integers(int q) {
    if (q != 1 && q != -1) throw RingError("over Z, q must be +1 or -1");
    return RingSpec(RingKind::Integers, 0, q);
}

RingSpec RingSpec::prime_field(long p, long q) {
    if (!is_prime(p)) throw RingError("F" + std::to_string(p) + ": modulus is not prime");
    return RingSpec(RingKind::PrimeField, p, Scalar(q));
}

RingSpec RingSpec::rationals(const BigRat& q) { return RingSpec(RingKind::Rationals, 0, q); }

RingSpec RingSpec::f4(int q) {
    if (q < 0 || q > 3) throw RingError("F4 elements are coded 0..3");
    return RingSpec(RingKind::F4, 2, Scalar(q));
}

RingSpec RingSpec::parse(const std::string& ring, const std::string& qs) {
    if (ring == "Z") return integers(std::stoi(qs));
    if (ring == "Q") {
        BigRat q(qs);
        q.canonicalize();
        return rationals(q);
    }
    if (ring == "F4") {
        if (qs == "w") return f4(2);
        if (qs == "w2" || qs == "w^2") return f4(3);
        return f4(std::stoi(qs));
    }
    if (ring.size() > 1 && ring[0] == 'F') return prime_field(std::stol(ring.substr(1)), std::stol(qs));
    throw RingError("unknown ring '" + ring + "' (expected Z, Q, F<p> or F4)");
}

long RingSpec::characteristic() const {
    switch (kind_) {
        case RingKind::PrimeField: return p_;
        case RingKind::F4: return 2;
        default: return 0;
    }
}

std::string RingSpec::name() const {
    switch (kind_) {
        case RingKind::Integers: return "Z";
        case RingKind::Rationals: return "Q";
        case RingKind::PrimeField: return "F" + std::to_string(p_);
        case RingKind::F4: return "F4";
    }
    return "?";
}

nlohmann::json RingSpec::to_json() const { return {{"ring", name()}, {"q", format(q_)}}; }

Scalar RingSpec::reduce(const BigRat& v) const {
    switch (kind_) {
        case RingKind::Integers:
            if (v.get_den() != 1) throw RingError("non-integral value over Z");
            return v;
        case RingKind::Rationals: return v;
        case RingKind::PrimeField: {
            BigInt num = v.get_num(), den = v.get_den();
            BigInt pp = p_;
            BigInt r = num % pp;
            if (r < 0) r += pp;
            if (den != 1) {
                BigInt di;
                if (mpz_invert(di.get_mpz_t(), den.get_mpz_t(), pp.get_mpz_t()) == 0)
                    throw RingError("denominator not invertible mod p");
                r = (r * di) % pp;
            }
            return Scalar(r);
        }
        case RingKind::F4: {
            if (v.get_den() != 1 || v < 0 || v > 3) throw RingError("bad F4 code");
            return v;
        }
    }
    return v;
}

Scalar RingSpec::from_int(const BigInt& n) const {
    if (kind_ == RingKind::F4) return Scalar(mpz_odd_p(n.get_mpz_t()) ? 1 : 0);
    return reduce(Scalar(n));
}

static std::uint8_t code(const Scalar& a) { return static_cast<std::uint8_t>(a.get_num().get_ui()); }

Scalar RingSpec::add(const Scalar& a, const Scalar& b) const {
    if (kind_ == RingKind::F4) return Scalar(f4::add(code(a), code(b)));
    return reduce(a + b);
}

Scalar RingSpec::sub(const Scalar& a, const Scalar& b) const {
    if (kind_ == RingKind::F4) return Scalar(f4::add(code(a), code(b)));
    return reduce(a - b);
}

Scalar RingSpec::mul(const Scalar& a, const Scalar& b) const {
    if (kind_ == RingKind::F4) return Scalar(f4::mul(code(a), code(b)));
    return reduce(a * b);
}

Scalar RingSpec::neg(const Scalar& a) const {
    if (kind_ == RingKind::F4) return a;
    return reduce(-a);
}

bool RingSpec::is_unit(const Scalar& a) const {
    if (kind_ == RingKind::Integers) return a == 1 || a == -1;
    return !is_zero(a);
}

Scalar RingSpec::inv(const Scalar& a) const {
    if (!is_unit(a)) throw RingError(format(a) + " is not a unit in " + name());
    switch (kind_) {
        case RingKind::Integers: return a;
        case RingKind::Rationals: return 1 / a;
        case RingKind::PrimeField: return reduce(Scalar(1) / a);
        case RingKind::F4: return Scalar(f4::inv(code(a)));
    }
    return a;
}

Scalar RingSpec::pow_q(int e) const {
    Scalar base = e >= 0 ? q_ : inv(q_);
    Scalar r = from_int(1);
    for (int i = 0; i < std::abs(e); ++i) r = mul(r, base);
    return r;
}

std::string RingSpec::format(const Scalar& a) const {
    if (kind_ == RingKind::F4) {
        static const char* names[4] = {"0", "1", "w", "w^2"};
        return names[code(a) & 3];
    }
    return a.get_str();
}

Scalar specialize(const LaurentPoly& p, const RingSpec& r) {
    Scalar acc = r.from_int(0);
    for (const auto& [e, c] : p.terms()) acc = r.add(acc, r.mul(r.from_int(c), r.pow_q(e)));
    return acc;
}

}  // namespace qakh
