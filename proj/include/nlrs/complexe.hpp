#pragma once

#include <algorithm>
#include <string>

#include "nlrs/real.hpp"

namespace nlrs {

/// Rectangular complex enclosure: a box re x im of directed-rounded bounds.
struct ComplexEnclosure {
    RealEnclosure re, im;

    ComplexEnclosure() = default;
    explicit ComplexEnclosure(mpfr_prec_t prec) : re(prec), im(prec) {}
    ComplexEnclosure(RealEnclosure r, RealEnclosure i) : re(std::move(r)), im(std::move(i)) {}

    static ComplexEnclosure from_real(RealEnclosure r) {
        mpfr_prec_t p = r.prec();
        return {std::move(r), RealEnclosure::exact(Rat(0), p)};
    }
    static ComplexEnclosure exact(const Rat& r, const Rat& i, mpfr_prec_t prec) {
        return {RealEnclosure::exact(r, prec), RealEnclosure::exact(i, prec)};
    }

    mpfr_prec_t prec() const { return std::max(re.prec(), im.prec()); }
    bool contains_zero() const { return re.contains_zero() && im.contains_zero(); }
    bool contains(const ComplexEnclosure& o) const {
        return re.contains(o.re) && im.contains(o.im);
    }
    bool contains_strictly(const ComplexEnclosure& o) const {
        return re.contains_strictly(o.re) && im.contains_strictly(o.im);
    }
    bool disjoint(const ComplexEnclosure& o) const {
        return re.disjoint(o.re) || im.disjoint(o.im);
    }
    bool is_real_point_zero_im() const { return im.is_point() && im.contains_zero(); }

    long log2_width() const { return std::max(re.log2_width(), im.log2_width()); }
    bool width_below(long target_log2) const {
        return re.width_below(target_log2) && im.width_below(target_log2);
    }

    ComplexEnclosure conj() const { return {re, neg(im)}; }

    std::string str(size_t digits = 20) const {
        return re.str(digits) + " + i*" + im.str(digits);
    }
};

inline ComplexEnclosure add(const ComplexEnclosure& a, const ComplexEnclosure& b,
                            mpfr_prec_t prec) {
    return {add(a.re, b.re, prec), add(a.im, b.im, prec)};
}
inline ComplexEnclosure sub(const ComplexEnclosure& a, const ComplexEnclosure& b,
                            mpfr_prec_t prec) {
    return {sub(a.re, b.re, prec), sub(a.im, b.im, prec)};
}
inline ComplexEnclosure neg(const ComplexEnclosure& a) { return {neg(a.re), neg(a.im)}; }

inline ComplexEnclosure mul(const ComplexEnclosure& a, const ComplexEnclosure& b,
                            mpfr_prec_t prec) {
    RealEnclosure r = sub(mul(a.re, b.re, prec), mul(a.im, b.im, prec), prec);
    RealEnclosure i = add(mul(a.re, b.im, prec), mul(a.im, b.re, prec), prec);
    return {std::move(r), std::move(i)};
}

inline RealEnclosure abs2(const ComplexEnclosure& a, mpfr_prec_t prec) {
    return add(sqr(a.re, prec), sqr(a.im, prec), prec);
}
inline RealEnclosure abs_enc(const ComplexEnclosure& a, mpfr_prec_t prec) {
    return sqrt_enc(abs2(a, prec), prec);
}

inline ComplexEnclosure div(const ComplexEnclosure& a, const ComplexEnclosure& b,
                            mpfr_prec_t prec) {
    RealEnclosure d = abs2(b, prec);
    if (!d.excludes_zero()) throw DivisionByUncertainZero();
    ComplexEnclosure num = mul(a, b.conj(), prec);
    return {div(num.re, d, prec), div(num.im, d, prec)};
}

inline ComplexEnclosure mul_real(const ComplexEnclosure& a, const RealEnclosure& s,
                                 mpfr_prec_t prec) {
    return {mul(a.re, s, prec), mul(a.im, s, prec)};
}

inline ComplexEnclosure sqr(const ComplexEnclosure& a, mpfr_prec_t prec) {
    // (x+iy)^2 = x^2 - y^2 + 2ixy, with tight real squares
    RealEnclosure r = sub(sqr(a.re, prec), sqr(a.im, prec), prec);
    RealEnclosure i = mul_2si(mul(a.re, a.im, prec), 1);
    return {std::move(r), std::move(i)};
}

inline ComplexEnclosure pow_int(const ComplexEnclosure& a, const Int& e, mpfr_prec_t prec) {
    if (sgn(e) == 0) return ComplexEnclosure::exact(Rat(1), Rat(0), prec);
    Int ae = abs(e);
    ComplexEnclosure acc = ComplexEnclosure::exact(Rat(1), Rat(0), prec);
    ComplexEnclosure base = a;
    bool first = true;
    size_t nbits = mpz_sizeinbase(ae.get_mpz_t(), 2);
    for (size_t i = 0; i < nbits; ++i) {
        if (mpz_tstbit(ae.get_mpz_t(), i)) {
            acc = first ? base : mul(acc, base, prec);
            first = false;
        }
        if (i + 1 < nbits) base = sqr(base, prec);
    }
    if (sgn(e) < 0)
        return div(ComplexEnclosure::exact(Rat(1), Rat(0), prec), acc, prec);
    return acc;
}

/// Widens both components symmetrically by `radius` (upper bound of a modulus
/// perturbation; valid because |dz| <= r implies |d(re)|, |d(im)| <= r).
inline ComplexEnclosure widen(const ComplexEnclosure& a, const RealEnclosure& radius) {
    return {widen(a.re, radius), widen(a.im, radius)};
}

/// Walks consecutive powers base^n with bounded width: incremental products
/// re-anchored by binary powering every few steps (plain iteration inflates
/// rectangle widths by roughly |re|+|im| per multiply).
class PowerWalker {
    ComplexEnclosure base_;
    mpfr_prec_t prec_;
    unsigned long n_;
    ComplexEnclosure cur_;
    int since_anchor_ = 0;

  public:
    PowerWalker(ComplexEnclosure base, unsigned long n0, mpfr_prec_t prec)
        : base_(std::move(base)), prec_(prec), n_(n0) {
        cur_ = pow_int(base_, Int(n_), prec_);
    }
    const ComplexEnclosure& value() const { return cur_; }
    unsigned long index() const { return n_; }
    void advance() {
        ++n_;
        if (++since_anchor_ >= 24) {
            cur_ = pow_int(base_, Int(n_), prec_);
            since_anchor_ = 0;
        } else {
            cur_ = mul(cur_, base_, prec_);
        }
    }
};

/// Argument of a zero-excluding box, as a real enclosure. The result may use
/// any branch representative (callers only ever use it modulo 2*pi). Uses the
/// midpoint value widened by diameter / min-modulus (the Lipschitz constant
/// of arg along the segment staying in the box).
inline RealEnclosure arg_enclosure(const ComplexEnclosure& z, mpfr_prec_t prec) {
    RealEnclosure m2 = abs2(z, prec);
    if (!m2.is_positive()) throw InvalidInput("argument of a box containing zero");
    // A box hugging the negative real axis would cross the atan2 branch cut;
    // rotate it by pi first (the caller only needs some branch representative).
    bool im_off_axis = z.im.is_positive() || z.im.is_negative();
    if (!im_off_axis && !z.re.is_positive()) {
        RealEnclosure a = arg_enclosure(neg(z), prec);
        return add(a, RealEnclosure::pi(prec), prec);
    }
    RealEnclosure modulus_lo = sqrt_enc(m2, prec);

    // half-diagonal of the box as a crude distance-to-midpoint bound
    RealEnclosure wr = sub(z.re, z.re.mid(), prec);
    RealEnclosure wi = sub(z.im, z.im.mid(), prec);
    RealEnclosure rad = sqrt_enc(add(sqr(abs_enc(wr), prec), sqr(abs_enc(wi), prec), prec), prec);

    RealEnclosure r(prec);
    mpfr_t theta_lo, theta_hi;
    mpfr_init2(theta_lo, prec);
    mpfr_init2(theta_hi, prec);
    mpfr_atan2(theta_lo, z.im.mid().lo(), z.re.mid().lo(), MPFR_RNDD);
    mpfr_atan2(theta_hi, z.im.mid().lo(), z.re.mid().lo(), MPFR_RNDU);
    RealEnclosure theta = RealEnclosure::from_mpfr(theta_lo, theta_hi, prec);
    mpfr_clears(theta_lo, theta_hi, nullptr);

    RealEnclosure slack = div(rad, modulus_lo, prec);
    return widen(theta, slack);
}

inline ComplexEnclosure operator+(const ComplexEnclosure& a, const ComplexEnclosure& b) {
    return add(a, b, std::max(a.prec(), b.prec()));
}
inline ComplexEnclosure operator-(const ComplexEnclosure& a, const ComplexEnclosure& b) {
    return sub(a, b, std::max(a.prec(), b.prec()));
}
inline ComplexEnclosure operator*(const ComplexEnclosure& a, const ComplexEnclosure& b) {
    return mul(a, b, std::max(a.prec(), b.prec()));
}
inline ComplexEnclosure operator/(const ComplexEnclosure& a, const ComplexEnclosure& b) {
    return div(a, b, std::max(a.prec(), b.prec()));
}
inline ComplexEnclosure operator-(const ComplexEnclosure& a) { return neg(a); }

}  // namespace nlrs
