#pragma once

#include <utility>
#include <vector>

#include "nlrs/refine.hpp"

namespace nlrs {

/// Continued fraction expansion with convergents p_k/q_k.
struct CFResult {
    std::vector<Int> quotients;
    std::vector<std::pair<Int, Int>> convergents;  // (p, q), q > 0
    bool exact = false;      // expansion terminated: the input is rational
    bool ambiguous = false;  // enclosure could not certify further quotients
    mpfr_prec_t used_prec = 0;
    /// When certification stopped because the next quotient straddled a single
    /// integer (the typical signature of an exactly rational input), that
    /// integer. Not certified; callers may test the extended convergent.
    std::optional<Int> pending;

    /// The convergent that would follow if `pending` were the next quotient.
    std::optional<std::pair<Int, Int>> pending_convergent() const {
        if (!pending) return std::nullopt;
        size_t n = convergents.size();
        // seeds: (p_{-1}, q_{-1}) = (1, 0), (p_{-2}, q_{-2}) = (0, 1)
        Int p1 = n >= 1 ? convergents[n - 1].first : Int(1);
        Int q1 = n >= 1 ? convergents[n - 1].second : Int(0);
        Int p2 = n >= 2 ? convergents[n - 2].first : (n == 1 ? Int(1) : Int(0));
        Int q2 = n >= 2 ? convergents[n - 2].second : (n == 1 ? Int(0) : Int(1));
        return std::make_pair(*pending * p1 + p2, *pending * q1 + q2);
    }
};

namespace detail_cf {
inline void push_convergent(CFResult& r, const Int& a) {
    size_t n = r.convergents.size();
    Int p_prev1 = n >= 1 ? r.convergents[n - 1].first : Int(1);
    Int q_prev1 = n >= 1 ? r.convergents[n - 1].second : Int(0);
    Int p_prev2 = n >= 2 ? r.convergents[n - 2].first : (n == 1 ? Int(1) : Int(0));
    Int q_prev2 = n >= 2 ? r.convergents[n - 2].second : (n == 1 ? Int(0) : Int(1));
    r.convergents.emplace_back(a * p_prev1 + p_prev2, a * q_prev1 + q_prev2);
    r.quotients.push_back(a);
}
}  // namespace detail_cf

/// Exact Euclidean continued fraction of a rational.
inline CFResult continued_fraction(const Rat& x, size_t max_terms) {
    CFResult r;
    Int num = Int(x.get_num()), den = Int(x.get_den());
    while (den != 0 && r.quotients.size() < max_terms) {
        Int a, rem;
        mpz_fdiv_qr(a.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
        detail_cf::push_convergent(r, a);
        num = den;
        den = rem;
    }
    r.exact = (den == 0);
    return r;
}

/// Certified continued fraction of a refinable real: every partial quotient
/// is a certified floor. Restarts from scratch at doubled precision whenever
/// interval blowup stops certification early; `ambiguous` is set if the
/// precision cap was reached first (common when x is actually rational).
inline CFResult continued_fraction(const RealFn& x, size_t max_terms,
                                   const PrecisionPolicy& policy) {
    CFResult best;
    mpfr_prec_t p = policy.initial;
    for (;;) {
        CFResult r;
        r.used_prec = p;
        RealEnclosure y = x(p);
        while (r.quotients.size() < max_terms) {
            auto a = try_round(y, RoundMode::Floor);
            if (!a) {
                // a single straddled integer is remembered as a candidate
                if (mpfr_number_p(y.lo()) && mpfr_number_p(y.hi())) {
                    Int fl, fh;
                    mpfr_get_z(fl.get_mpz_t(), y.lo(), MPFR_RNDD);
                    mpfr_get_z(fh.get_mpz_t(), y.hi(), MPFR_RNDD);
                    if (fh == fl + 1) r.pending = fh;
                }
                break;
            }
            detail_cf::push_convergent(r, *a);
            RealEnclosure frac = sub(y, RealEnclosure::exact(*a, y.prec()), y.prec());
            if (!frac.is_positive()) break;  // can't certify the next inversion
            y = div(RealEnclosure::exact(Rat(1), y.prec()), frac, y.prec());
        }
        if (r.quotients.size() >= max_terms) return r;
        if (r.quotients.size() >= best.quotients.size()) best = std::move(r);
        if (policy.at_cap(p)) {
            best.ambiguous = true;
            return best;
        }
        p = policy.next(p);
    }
}

}  // namespace nlrs
