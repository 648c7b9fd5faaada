#pragma once

#include <algorithm>
#include <cstdlib>
#include <string>

#include <mpfr.h>

namespace nlrs {

/// Controls adaptive precision refinement: start at `initial` bits and double
/// until `cap`. Deterministic, so identical runs produce identical results.
struct PrecisionPolicy {
    mpfr_prec_t initial = 256;
    mpfr_prec_t cap = 65536;

    static mpfr_prec_t env_cap() {
        if (const char* s = std::getenv("NLRS_PRECISION_CAP")) {
            long v = std::atol(s);
            if (v >= MPFR_PREC_MIN && v <= 1L << 30) return static_cast<mpfr_prec_t>(v);
        }
        return 65536;
    }

    /// Default policy honoring the NLRS_PRECISION_CAP environment variable.
    static PrecisionPolicy standard() { return PrecisionPolicy{256, env_cap()}; }

    /// Policy whose first attempt already uses `bits` of precision; used when
    /// the needed precision is predictable (deep floors, long products).
    PrecisionPolicy starting_at(mpfr_prec_t bits) const {
        PrecisionPolicy p = *this;
        p.initial = std::max<mpfr_prec_t>(MPFR_PREC_MIN + 1, bits);
        p.cap = std::max(p.cap, p.initial);
        return p;
    }

    PrecisionPolicy with_cap(mpfr_prec_t bits) const {
        PrecisionPolicy p = *this;
        p.cap = std::max(bits, p.initial);
        return p;
    }

    mpfr_prec_t next(mpfr_prec_t prec) const { return std::min(cap, prec * 2); }
    bool at_cap(mpfr_prec_t prec) const { return prec >= cap; }
};

}  // namespace nlrs
