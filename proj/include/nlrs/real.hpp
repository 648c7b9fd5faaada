#pragma once

#include <algorithm>
#include <cassert>
#include <climits>
#include <cstdio>
#include <string>
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

#include "nlrs/errors.hpp"
#include "nlrs/rational.hpp"

namespace nlrs {

/// A closed interval [lo, hi] of directed-rounded MPFR numbers. Every
/// operation rounds outward, so the exact result of an expression is always
/// contained in the computed enclosure. Immutable after construction.
class RealEnclosure {
    mpfr_t lo_, hi_;

  public:
    explicit RealEnclosure(mpfr_prec_t prec = 64) {
        mpfr_init2(lo_, std::max<mpfr_prec_t>(prec, MPFR_PREC_MIN));
        mpfr_init2(hi_, std::max<mpfr_prec_t>(prec, MPFR_PREC_MIN));
        mpfr_set_zero(lo_, 1);
        mpfr_set_zero(hi_, 1);
    }
    ~RealEnclosure() {
        mpfr_clear(lo_);
        mpfr_clear(hi_);
    }
    RealEnclosure(const RealEnclosure& o) {
        mpfr_init2(lo_, mpfr_get_prec(o.lo_));
        mpfr_init2(hi_, mpfr_get_prec(o.hi_));
        mpfr_set(lo_, o.lo_, MPFR_RNDD);
        mpfr_set(hi_, o.hi_, MPFR_RNDU);
    }
    RealEnclosure(RealEnclosure&& o) noexcept {
        lo_[0] = o.lo_[0];
        hi_[0] = o.hi_[0];
        mpfr_init2(o.lo_, MPFR_PREC_MIN);
        mpfr_init2(o.hi_, MPFR_PREC_MIN);
        mpfr_set_zero(o.lo_, 1);
        mpfr_set_zero(o.hi_, 1);
    }
    RealEnclosure& operator=(RealEnclosure o) noexcept {
        std::swap(lo_[0], o.lo_[0]);
        std::swap(hi_[0], o.hi_[0]);
        return *this;
    }

    mpfr_srcptr lo() const { return lo_; }
    mpfr_srcptr hi() const { return hi_; }
    mpfr_ptr lo_mut() { return lo_; }
    mpfr_ptr hi_mut() { return hi_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(lo_); }

    bool valid() const { return mpfr_cmp(lo_, hi_) <= 0 || mpfr_nan_p(lo_) || mpfr_nan_p(hi_); }

    // ---- factories ----

    static RealEnclosure exact(const Rat& q, mpfr_prec_t prec) {
        RealEnclosure r(prec);
        mpfr_set_q(r.lo_, q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, q.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    static RealEnclosure exact(const Int& z, mpfr_prec_t prec) {
        RealEnclosure r(prec);
        mpfr_set_z(r.lo_, z.get_mpz_t(), MPFR_RNDD);
        mpfr_set_z(r.hi_, z.get_mpz_t(), MPFR_RNDU);
        return r;
    }
    static RealEnclosure exact(long v, mpfr_prec_t prec) {
        RealEnclosure r(prec);
        mpfr_set_si(r.lo_, v, MPFR_RNDD);
        mpfr_set_si(r.hi_, v, MPFR_RNDU);
        return r;
    }
    static RealEnclosure from_endpoints_rat(const Rat& lo, const Rat& hi, mpfr_prec_t prec) {
        if (lo > hi) throw InvalidInput("interval endpoints out of order");
        RealEnclosure r(prec);
        mpfr_set_q(r.lo_, lo.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_, hi.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    static RealEnclosure from_mpfr(mpfr_srcptr lo, mpfr_srcptr hi, mpfr_prec_t prec) {
        RealEnclosure r(prec);
        mpfr_set(r.lo_, lo, MPFR_RNDD);
        mpfr_set(r.hi_, hi, MPFR_RNDU);
        return r;
    }
    static RealEnclosure point_double(double v, mpfr_prec_t prec) {
        RealEnclosure r(prec);
        mpfr_set_d(r.lo_, v, MPFR_RNDD);
        mpfr_set_d(r.hi_, v, MPFR_RNDU);
        return r;
    }
    static RealEnclosure pi(mpfr_prec_t prec) {
        RealEnclosure r(prec);
        mpfr_const_pi(r.lo_, MPFR_RNDD);
        mpfr_const_pi(r.hi_, MPFR_RNDU);
        return r;
    }

    // ---- queries ----

    bool contains_zero() const { return mpfr_sgn(lo_) <= 0 && mpfr_sgn(hi_) >= 0; }
    bool excludes_zero() const { return mpfr_sgn(lo_) > 0 || mpfr_sgn(hi_) < 0; }
    bool is_positive() const { return mpfr_sgn(lo_) > 0; }
    bool is_negative() const { return mpfr_sgn(hi_) < 0; }
    bool is_point() const { return mpfr_equal_p(lo_, hi_); }

    bool contains(const Rat& q) const {
        return mpfr_cmp_q(lo_, q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, q.get_mpq_t()) >= 0;
    }
    bool contains(const RealEnclosure& o) const {
        return mpfr_cmp(lo_, o.lo_) <= 0 && mpfr_cmp(hi_, o.hi_) >= 0;
    }
    bool contains_strictly(const RealEnclosure& o) const {
        return mpfr_cmp(lo_, o.lo_) < 0 && mpfr_cmp(hi_, o.hi_) > 0;
    }
    bool disjoint(const RealEnclosure& o) const {
        return mpfr_cmp(hi_, o.lo_) < 0 || mpfr_cmp(o.hi_, lo_) < 0;
    }

    /// Exponent of the interval width: width <= 2^log2_width(). LONG_MIN for
    /// exact points, LONG_MAX when an endpoint is not finite.
    long log2_width() const {
        if (!mpfr_number_p(lo_) || !mpfr_number_p(hi_)) return LONG_MAX;
        mpfr_t w;
        mpfr_init2(w, 64);
        mpfr_sub(w, hi_, lo_, MPFR_RNDU);
        long e = mpfr_zero_p(w) ? LONG_MIN : static_cast<long>(mpfr_get_exp(w));
        mpfr_clear(w);
        return e;
    }

    /// True when the whole interval rounds to the same value at the given
    /// radius target: width <= 2^target_log2.
    bool width_below(long target_log2) const {
        long w = log2_width();
        return w != LONG_MAX && (w == LONG_MIN || w <= target_log2);
    }

    /// Midpoint as a point enclosure at this precision.
    RealEnclosure mid() const {
        RealEnclosure r(prec());
        mpfr_add(r.lo_, lo_, hi_, MPFR_RNDN);
        mpfr_div_2ui(r.lo_, r.lo_, 1, MPFR_RNDN);
        mpfr_set(r.hi_, r.lo_, MPFR_RNDN);
        return r;
    }
    double mid_double() const {
        mpfr_t m;
        mpfr_init2(m, 64);
        mpfr_add(m, lo_, hi_, MPFR_RNDN);
        mpfr_div_2ui(m, m, 1, MPFR_RNDN);
        double d = mpfr_get_d(m, MPFR_RNDN);
        mpfr_clear(m);
        return d;
    }

    /// If the enclosure is an exact point with a finite value, returns it as
    /// an exact (dyadic) rational.
    std::optional<Rat> as_exact_rational() const {
        if (!is_point() || !mpfr_number_p(lo_)) return std::nullopt;
        if (mpfr_zero_p(lo_)) return Rat(0);
        mpz_t m;
        mpz_init(m);
        mpfr_exp_t e = mpfr_get_z_2exp(m, lo_);
        Rat q = Rat(mpz_class(m));
        mpz_clear(m);
        if (e >= 0) {
            Int p2;
            mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(e));
            q *= Rat(p2);
        } else {
            Int p2;
            mpz_ui_pow_ui(p2.get_mpz_t(), 2, static_cast<unsigned long>(-e));
            q /= Rat(p2);
        }
        q.canonicalize();
        return q;
    }

    std::string str(size_t digits = 20) const {
        char* bl = nullptr;
        char* bu = nullptr;
        mpfr_asprintf(&bl, "%.*Rg", static_cast<int>(digits), lo_);
        mpfr_asprintf(&bu, "%.*Rg", static_cast<int>(digits), hi_);
        std::string s = std::string("[") + bl + ", " + bu + "]";
        mpfr_free_str(bl);
        mpfr_free_str(bu);
        return s;
    }
};

// ---- certain comparisons ----

inline bool certainly_less(const RealEnclosure& a, const RealEnclosure& b) {
    return mpfr_cmp(a.hi(), b.lo()) < 0;
}
inline bool certainly_greater(const RealEnclosure& a, const RealEnclosure& b) {
    return mpfr_cmp(a.lo(), b.hi()) > 0;
}
inline bool certainly_less(const RealEnclosure& a, const Rat& q) {
    return mpfr_cmp_q(a.hi(), q.get_mpq_t()) < 0;
}
inline bool certainly_greater(const RealEnclosure& a, const Rat& q) {
    return mpfr_cmp_q(a.lo(), q.get_mpq_t()) > 0;
}

// ---- arithmetic (explicit result precision) ----

inline RealEnclosure add(const RealEnclosure& a, const RealEnclosure& b, mpfr_prec_t prec) {
    RealEnclosure r(prec);
    mpfr_add(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_add(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

inline RealEnclosure sub(const RealEnclosure& a, const RealEnclosure& b, mpfr_prec_t prec) {
    RealEnclosure r(prec);
    mpfr_sub(r.lo_mut(), a.lo(), b.hi(), MPFR_RNDD);
    mpfr_sub(r.hi_mut(), a.hi(), b.lo(), MPFR_RNDU);
    return r;
}

inline RealEnclosure neg(const RealEnclosure& a) {
    RealEnclosure r(a.prec());
    mpfr_neg(r.lo_mut(), a.hi(), MPFR_RNDD);
    mpfr_neg(r.hi_mut(), a.lo(), MPFR_RNDU);
    return r;
}

inline RealEnclosure mul(const RealEnclosure& a, const RealEnclosure& b, mpfr_prec_t prec) {
    RealEnclosure r(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    // lower bound: min over the four endpoint products, rounded down
    mpfr_mul(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_mul(t, a.lo(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_mul(t, a.hi(), b.lo(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_mul(t, a.hi(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    // upper bound: max over the four endpoint products, rounded up
    mpfr_mul(r.hi_mut(), a.lo(), b.lo(), MPFR_RNDU);
    mpfr_mul(t, a.lo(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_mul(t, a.hi(), b.lo(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_mul(t, a.hi(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

/// Tight square: [0, max^2] when the interval straddles zero.
inline RealEnclosure sqr(const RealEnclosure& a, mpfr_prec_t prec) {
    RealEnclosure r(prec);
    if (a.is_positive() || (mpfr_sgn(a.lo()) == 0)) {
        mpfr_sqr(r.lo_mut(), a.lo(), MPFR_RNDD);
        mpfr_sqr(r.hi_mut(), a.hi(), MPFR_RNDU);
    } else if (a.is_negative() || mpfr_sgn(a.hi()) == 0) {
        mpfr_sqr(r.lo_mut(), a.hi(), MPFR_RNDD);
        mpfr_sqr(r.hi_mut(), a.lo(), MPFR_RNDU);
    } else {
        mpfr_set_zero(r.lo_mut(), 1);
        mpfr_t t;
        mpfr_init2(t, prec);
        mpfr_sqr(r.hi_mut(), a.lo(), MPFR_RNDU);
        mpfr_sqr(t, a.hi(), MPFR_RNDU);
        mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
        mpfr_clear(t);
    }
    return r;
}

inline RealEnclosure div(const RealEnclosure& a, const RealEnclosure& b, mpfr_prec_t prec) {
    if (!b.excludes_zero()) throw DivisionByUncertainZero();
    RealEnclosure r(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_div(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_div(t, a.lo(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_div(t, a.hi(), b.lo(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_div(t, a.hi(), b.hi(), MPFR_RNDD);
    mpfr_min(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_div(r.hi_mut(), a.lo(), b.lo(), MPFR_RNDU);
    mpfr_div(t, a.lo(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_div(t, a.hi(), b.lo(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_div(t, a.hi(), b.hi(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

inline RealEnclosure abs_enc(const RealEnclosure& a) {
    RealEnclosure r(a.prec());
    if (a.is_positive() || mpfr_sgn(a.lo()) == 0) return a;
    if (a.is_negative() || mpfr_sgn(a.hi()) == 0) return neg(a);
    mpfr_set_zero(r.lo_mut(), 1);
    mpfr_t t;
    mpfr_init2(t, a.prec());
    mpfr_neg(t, a.lo(), MPFR_RNDU);
    mpfr_max(r.hi_mut(), t, a.hi(), MPFR_RNDU);
    mpfr_clear(t);
    return r;
}

inline RealEnclosure mul_2si(const RealEnclosure& a, long e) {
    RealEnclosure r(a.prec());
    mpfr_mul_2si(r.lo_mut(), a.lo(), e, MPFR_RNDD);
    mpfr_mul_2si(r.hi_mut(), a.hi(), e, MPFR_RNDU);
    return r;
}

inline RealEnclosure pow_ui(const RealEnclosure& a, unsigned long e, mpfr_prec_t prec) {
    if (e == 0) return RealEnclosure::exact(Rat(1), prec);
    RealEnclosure acc = RealEnclosure::exact(Rat(1), prec);
    RealEnclosure base = a;
    bool first = true;
    while (e > 0) {
        if (e & 1) {
            acc = first ? base : mul(acc, base, prec);
            first = false;
        }
        e >>= 1;
        if (e) base = sqr(base, prec);
    }
    return acc;
}

inline RealEnclosure pow_int(const RealEnclosure& a, const Int& e, mpfr_prec_t prec) {
    if (sgn(e) == 0) return RealEnclosure::exact(Rat(1), prec);
    Int ae = abs(e);
    RealEnclosure acc = RealEnclosure::exact(Rat(1), prec);
    RealEnclosure base = a;
    bool first = true;
    size_t nbits = mpz_sizeinbase(ae.get_mpz_t(), 2);
    for (size_t i = 0; i < nbits; ++i) {
        if (mpz_tstbit(ae.get_mpz_t(), i)) {
            acc = first ? base : mul(acc, base, prec);
            first = false;
        }
        if (i + 1 < nbits) base = sqr(base, prec);
    }
    if (sgn(e) < 0) return div(RealEnclosure::exact(Rat(1), prec), acc, prec);
    return acc;
}

inline RealEnclosure sqrt_enc(const RealEnclosure& a, mpfr_prec_t prec) {
    if (mpfr_sgn(a.lo()) < 0) throw InvalidInput("sqrt of an interval with negative points");
    RealEnclosure r(prec);
    mpfr_sqrt(r.lo_mut(), a.lo(), MPFR_RNDD);
    mpfr_sqrt(r.hi_mut(), a.hi(), MPFR_RNDU);
    return r;
}

inline RealEnclosure log_enc(const RealEnclosure& a, mpfr_prec_t prec) {
    if (mpfr_sgn(a.lo()) <= 0) throw InvalidInput("log of an interval reaching <= 0");
    RealEnclosure r(prec);
    mpfr_log(r.lo_mut(), a.lo(), MPFR_RNDD);
    mpfr_log(r.hi_mut(), a.hi(), MPFR_RNDU);
    return r;
}

inline RealEnclosure exp_enc(const RealEnclosure& a, mpfr_prec_t prec) {
    RealEnclosure r(prec);
    mpfr_exp(r.lo_mut(), a.lo(), MPFR_RNDD);
    mpfr_exp(r.hi_mut(), a.hi(), MPFR_RNDU);
    return r;
}

namespace detail {
// sin/cos via midpoint evaluation widened by the radius (|f'| <= 1), then
// clamped to [-1, 1].
template <int (*F)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)>
RealEnclosure lipschitz1(const RealEnclosure& a, mpfr_prec_t prec) {
    RealEnclosure r(prec);
    mpfr_t m, rad, t;
    mpfr_init2(m, prec);
    mpfr_init2(rad, prec);
    mpfr_init2(t, prec);
    mpfr_add(m, a.lo(), a.hi(), MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    // radius upper bound: max(m - lo, hi - m) rounded up
    mpfr_sub(rad, m, a.lo(), MPFR_RNDU);
    mpfr_sub(t, a.hi(), m, MPFR_RNDU);
    mpfr_max(rad, rad, t, MPFR_RNDU);
    F(r.lo_mut(), m, MPFR_RNDD);
    F(r.hi_mut(), m, MPFR_RNDU);
    mpfr_sub(r.lo_mut(), r.lo_mut(), rad, MPFR_RNDD);
    mpfr_add(r.hi_mut(), r.hi_mut(), rad, MPFR_RNDU);
    // clamp
    mpfr_set_si(t, -1, MPFR_RNDD);
    mpfr_max(r.lo_mut(), r.lo_mut(), t, MPFR_RNDD);
    mpfr_set_si(t, 1, MPFR_RNDU);
    mpfr_min(r.hi_mut(), r.hi_mut(), t, MPFR_RNDU);
    mpfr_clears(m, rad, t, nullptr);
    return r;
}
}  // namespace detail

inline RealEnclosure sin_enc(const RealEnclosure& a, mpfr_prec_t prec) {
    return detail::lipschitz1<mpfr_sin>(a, prec);
}
inline RealEnclosure cos_enc(const RealEnclosure& a, mpfr_prec_t prec) {
    return detail::lipschitz1<mpfr_cos>(a, prec);
}

inline RealEnclosure hull(const RealEnclosure& a, const RealEnclosure& b) {
    RealEnclosure r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_max(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

/// Intersection; throws if provably disjoint.
inline RealEnclosure intersect(const RealEnclosure& a, const RealEnclosure& b) {
    if (a.disjoint(b)) throw InvalidInput("intersection of disjoint enclosures");
    RealEnclosure r(std::max(a.prec(), b.prec()));
    mpfr_max(r.lo_mut(), a.lo(), b.lo(), MPFR_RNDD);
    mpfr_min(r.hi_mut(), a.hi(), b.hi(), MPFR_RNDU);
    return r;
}

/// Widens symmetrically by `radius` (an upper bound of its own value).
inline RealEnclosure widen(const RealEnclosure& a, const RealEnclosure& radius) {
    RealEnclosure r(a.prec());
    mpfr_sub(r.lo_mut(), a.lo(), radius.hi(), MPFR_RNDD);
    mpfr_add(r.hi_mut(), a.hi(), radius.hi(), MPFR_RNDU);
    return r;
}

// Operator sugar at the max precision of the operands.
inline RealEnclosure operator+(const RealEnclosure& a, const RealEnclosure& b) {
    return add(a, b, std::max(a.prec(), b.prec()));
}
inline RealEnclosure operator-(const RealEnclosure& a, const RealEnclosure& b) {
    return sub(a, b, std::max(a.prec(), b.prec()));
}
inline RealEnclosure operator*(const RealEnclosure& a, const RealEnclosure& b) {
    return mul(a, b, std::max(a.prec(), b.prec()));
}
inline RealEnclosure operator/(const RealEnclosure& a, const RealEnclosure& b) {
    return div(a, b, std::max(a.prec(), b.prec()));
}
inline RealEnclosure operator-(const RealEnclosure& a) { return neg(a); }

}  // namespace nlrs
