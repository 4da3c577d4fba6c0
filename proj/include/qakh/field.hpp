/**
 * @file field.hpp
 * @brief Dense elimination kernels over F_p, F4 and Q, dispatched from a RingSpec.
 *
 * Scalars are converted into a native element type once per block so the inner
 * loops avoid GMP for the finite fields.
 */
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qakh/coeff.hpp"

namespace qakh {

struct FpField {
    using E = std::int64_t;
    std::int64_t p;
    E zero() const { return 0; }
    E one() const { return 1; }
    E add(E a, E b) const { E r = a + b; return r >= p ? r - p : r; }
    E sub(E a, E b) const { E r = a - b; return r < 0 ? r + p : r; }
    E neg(E a) const { return a == 0 ? 0 : p - a; }
    E mul(E a, E b) const { return static_cast<E>((static_cast<__int128>(a) * b) % p); }
    E inv(E a) const {
        E t = 0, nt = 1, r = p, nr = a;
        while (nr != 0) {
            E qq = r / nr;
            std::tie(t, nt) = std::make_pair(nt, t - qq * nt);
            std::tie(r, nr) = std::make_pair(nr, r - qq * nr);
        }
        if (r != 1) throw RingError("element not invertible mod p");
        return t < 0 ? t + p : t;
    }
    bool is_zero(E a) const { return a == 0; }
    E from(const Scalar& s) const { return s.get_num().get_si(); }
    Scalar to(E a) const { return Scalar(static_cast<long>(a)); }
};

struct F4Field {
    using E = std::uint8_t;
    E zero() const { return 0; }
    E one() const { return 1; }
    E add(E a, E b) const { return f4::add(a, b); }
    E sub(E a, E b) const { return f4::add(a, b); }
    E neg(E a) const { return a; }
    E mul(E a, E b) const { return f4::mul(a, b); }
    E inv(E a) const { return f4::inv(a); }
    bool is_zero(E a) const { return a == 0; }
    E from(const Scalar& s) const { return static_cast<E>(s.get_num().get_ui()); }
    Scalar to(E a) const { return Scalar(static_cast<unsigned long>(a)); }
};

struct QField {
    using E = BigRat;
    E zero() const { return 0; }
    E one() const { return 1; }
    E add(const E& a, const E& b) const { return a + b; }
    E sub(const E& a, const E& b) const { return a - b; }
    E neg(const E& a) const { return -a; }
    E mul(const E& a, const E& b) const { return a * b; }
    E inv(const E& a) const {
        if (sgn(a) == 0) throw RingError("division by zero in Q");
        return 1 / a;
    }
    bool is_zero(const E& a) const { return sgn(a) == 0; }
    E from(const Scalar& s) const { return s; }
    Scalar to(const E& a) const { return a; }
};

/// Calls fn with the field adaptor matching r; throws for non-fields.
template <class Fn>
decltype(auto) with_field(const RingSpec& r, Fn&& fn) {
    switch (r.kind()) {
        case RingKind::PrimeField: return fn(FpField{r.p()});
        case RingKind::F4: return fn(F4Field{});
        case RingKind::Rationals: return fn(QField{});
        default: throw RingError("operation requires a field, got " + r.name());
    }
}

/// Row-major dense matrix of native field elements.
template <class F>
struct Dense {
    using E = typename F::E;
    int rows = 0, cols = 0;
    std::vector<E> a;
    Dense() = default;
    Dense(int r, int c, const F& f) : rows(r), cols(c), a(static_cast<size_t>(r) * c, f.zero()) {}
    E& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const E& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

/**
 * In-place reduced row echelon form. Returns pivot columns; row t holds pivot t.
 * If track is non-null it receives the row operations (track * original = result).
 */
template <class F>
std::vector<int> rref(const F& f, Dense<F>& m, Dense<F>* track = nullptr) {
    using E = typename F::E;
    if (track) {
        *track = Dense<F>(m.rows, m.rows, f);
        for (int i = 0; i < m.rows; ++i) track->at(i, i) = f.one();
    }
    std::vector<int> piv;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int sel = -1;
        for (int i = r; i < m.rows; ++i)
            if (!f.is_zero(m.at(i, c))) { sel = i; break; }
        if (sel < 0) continue;
        if (sel != r) {
            for (int k = 0; k < m.cols; ++k) std::swap(m.at(sel, k), m.at(r, k));
            if (track)
                for (int k = 0; k < track->cols; ++k) std::swap(track->at(sel, k), track->at(r, k));
        }
        E iv = f.inv(m.at(r, c));
        for (int k = c; k < m.cols; ++k) m.at(r, k) = f.mul(m.at(r, k), iv);
        if (track)
            for (int k = 0; k < track->cols; ++k) track->at(r, k) = f.mul(track->at(r, k), iv);
        for (int i = 0; i < m.rows; ++i) {
            if (i == r || f.is_zero(m.at(i, c))) continue;
            E fac = m.at(i, c);
            for (int k = c; k < m.cols; ++k)
                if (!f.is_zero(m.at(r, k))) m.at(i, k) = f.sub(m.at(i, k), f.mul(fac, m.at(r, k)));
            if (track)
                for (int k = 0; k < track->cols; ++k)
                    if (!f.is_zero(track->at(r, k)))
                        track->at(i, k) = f.sub(track->at(i, k), f.mul(fac, track->at(r, k)));
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

template <class F>
int dense_rank(const F& f, Dense<F> m) {
    return static_cast<int>(rref(f, m).size());
}

/// Kernel basis of m (as column vectors, returned as rows of the result).
template <class F>
Dense<F> dense_kernel(const F& f, Dense<F> m) {
    auto piv = rref(f, m);
    std::vector<char> is_piv(m.cols, 0);
    for (int c : piv) is_piv[c] = 1;
    std::vector<int> free_cols;
    for (int c = 0; c < m.cols; ++c)
        if (!is_piv[c]) free_cols.push_back(c);
    Dense<F> k(static_cast<int>(free_cols.size()), m.cols, f);
    for (size_t t = 0; t < free_cols.size(); ++t) {
        int fc = free_cols[t];
        k.at(static_cast<int>(t), fc) = f.one();
        for (size_t r = 0; r < piv.size(); ++r)
            k.at(static_cast<int>(t), piv[r]) = f.neg(m.at(static_cast<int>(r), fc));
    }
    return k;
}

/**
 * @brief Projection of F^n onto F^n / span(relations), in the coordinates of the
 * non-pivot columns of the relations' RREF.
 */
template <class F>
struct QuotientMap {
    using E = typename F::E;
    F f;
    int ambient = 0;
    Dense<F> red;               // RREF of the relations, zero rows dropped
    std::vector<int> pivots;
    std::vector<int> free_cols;  // quotient basis = images of these unit vectors
    std::vector<int> free_index;  // ambient column -> quotient coordinate or -1

    QuotientMap(const F& field, Dense<F> relations) : f(field), ambient(relations.cols) {
        pivots = rref(f, relations);
        red = Dense<F>(static_cast<int>(pivots.size()), ambient, f);
        for (size_t r = 0; r < pivots.size(); ++r)
            for (int c = 0; c < ambient; ++c) red.at(static_cast<int>(r), c) = relations.at(static_cast<int>(r), c);
        std::vector<char> is_piv(ambient, 0);
        for (int c : pivots) is_piv[c] = 1;
        free_index.assign(ambient, -1);
        for (int c = 0; c < ambient; ++c)
            if (!is_piv[c]) {
                free_index[c] = static_cast<int>(free_cols.size());
                free_cols.push_back(c);
            }
    }
    int dim() const { return static_cast<int>(free_cols.size()); }
    int relation_rank() const { return static_cast<int>(pivots.size()); }

    /// Coordinates of the class of v.
    std::vector<E> project(std::vector<E> v) const {
        for (size_t r = 0; r < pivots.size(); ++r) {
            E c = v[pivots[r]];
            if (f.is_zero(c)) continue;
            for (int k = 0; k < ambient; ++k)
                if (!f.is_zero(red.at(static_cast<int>(r), k))) v[k] = f.sub(v[k], f.mul(c, red.at(static_cast<int>(r), k)));
        }
        std::vector<E> out(free_cols.size(), f.zero());
        for (size_t t = 0; t < free_cols.size(); ++t) out[t] = v[free_cols[t]];
        return out;
    }
};

}  // namespace qakh
