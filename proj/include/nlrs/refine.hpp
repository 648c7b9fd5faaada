#pragma once

#include <functional>
#include <optional>

#include "nlrs/complexe.hpp"
#include "nlrs/policy.hpp"
#include "nlrs/real.hpp"

namespace nlrs {

/// A real value that can be recomputed at any working precision. The
/// enclosures returned for increasing precision must all contain the same
/// exact value.
using RealFn = std::function<RealEnclosure(mpfr_prec_t)>;
using ComplexFn = std::function<ComplexEnclosure(mpfr_prec_t)>;

inline RealFn constant_fn(const Rat& q) {
    return [q](mpfr_prec_t p) { return RealEnclosure::exact(q, p); };
}

struct RefineResult {
    RealEnclosure value;
    bool hit_cap = false;
    mpfr_prec_t used_prec = 0;
};

/// Evaluates `f` at doubling precision until the enclosure radius is at most
/// 2^target_log2 (or the cap is hit, flagged in the result).
inline RefineResult refine_to_radius(const RealFn& f, const PrecisionPolicy& policy,
                                     long target_log2) {
    mpfr_prec_t p = policy.initial;
    for (;;) {
        RealEnclosure v = f(p);
        if (v.width_below(target_log2)) return {std::move(v), false, p};
        if (policy.at_cap(p)) return {std::move(v), true, p};
        p = policy.next(p);
    }
}

enum class RoundMode { Floor, Ceil, NearestHalfUp };

/// Rounds a fixed enclosure under `mode` if every point of it rounds to the
/// same integer; otherwise empty.
inline std::optional<Int> try_round(const RealEnclosure& x, RoundMode mode) {
    if (!mpfr_number_p(x.lo()) || !mpfr_number_p(x.hi())) return std::nullopt;
    mpfr_prec_t p = x.prec();
    mpfr_t lo, hi;
    mpfr_init2(lo, p + 4);
    mpfr_init2(hi, p + 4);
    switch (mode) {
        case RoundMode::Floor:
            mpfr_set(lo, x.lo(), MPFR_RNDD);
            mpfr_set(hi, x.hi(), MPFR_RNDU);
            break;
        case RoundMode::Ceil:
            // ceil(x) = -floor(-x)
            mpfr_neg(lo, x.hi(), MPFR_RNDD);
            mpfr_neg(hi, x.lo(), MPFR_RNDU);
            break;
        case RoundMode::NearestHalfUp:
            // floor(x + 1/2); 1/2 is exactly representable, rounding stays outward
            mpfr_add_d(lo, x.lo(), 0.5, MPFR_RNDD);
            mpfr_add_d(hi, x.hi(), 0.5, MPFR_RNDU);
            break;
    }
    Int fl, fh;
    mpfr_get_z(fl.get_mpz_t(), lo, MPFR_RNDD);
    mpfr_get_z(fh.get_mpz_t(), hi, MPFR_RNDD);
    mpfr_clears(lo, hi, nullptr);
    if (fl != fh) return std::nullopt;
    if (mode == RoundMode::Ceil) return Int(-fl);
    return fl;
}

/// Rounds a fixed enclosure, throwing AmbiguousRounding when it straddles a
/// boundary of the rounding mode.
inline Int certified_round(const RealEnclosure& x, RoundMode mode) {
    if (auto r = try_round(x, mode)) return *r;
    throw AmbiguousRounding("enclosure " + x.str() + " straddles a rounding boundary");
}

/// Refining version: re-evaluates at doubling precision until the rounding is
/// certain; AmbiguousRounding only after the precision cap.
inline Int certified_round(const RealFn& f, RoundMode mode, const PrecisionPolicy& policy) {
    mpfr_prec_t p = policy.initial;
    for (;;) {
        RealEnclosure v = f(p);
        if (auto r = try_round(v, mode)) return *r;
        if (policy.at_cap(p))
            throw AmbiguousRounding("rounding still ambiguous at the precision cap (" +
                                    std::to_string(policy.cap) + " bits): " + v.str());
        p = policy.next(p);
    }
}

/// Exact rational rounding (reference semantics for the certified versions).
inline Int exact_round(const Rat& q, RoundMode mode) {
    switch (mode) {
        case RoundMode::Floor: return floor_rat(q);
        case RoundMode::Ceil: return ceil_rat(q);
        case RoundMode::NearestHalfUp: return round_half_up(q);
    }
    return Int(0);
}

/// Loops f at doubling precision until pred holds; throws PrecisionCapExceeded.
template <class T, class F, class P>
T refine_until(const PrecisionPolicy& policy, F&& f, P&& pred, const char* what) {
    mpfr_prec_t p = policy.initial;
    for (;;) {
        T v = f(p);
        if (pred(v)) return v;
        if (policy.at_cap(p)) throw PrecisionCapExceeded(std::string("precision cap hit: ") + what);
        p = policy.next(p);
    }
}

}  // namespace nlrs
