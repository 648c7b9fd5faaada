#pragma once

#include <optional>
#include <cstdlib>
#include <string>

#include <gmpxx.h>

#include "nlrs/errors.hpp"

namespace nlrs {

using Int = mpz_class;
using Rat = mpq_class;

inline bool is_integer(const Rat& q) { return mpz_cmp_ui(q.get_den_mpz_t(), 1) == 0; }

/// Parses "p", "p/q", a plain decimal like "-1.25", or scientific notation
/// like "1.5e-3" into an exact rational.
inline Rat parse_rational(const std::string& s) {
    if (s.empty()) throw InvalidInput("empty rational literal");
    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos && s.find('/') == std::string::npos) {
        Rat mant = parse_rational(s.substr(0, epos));
        long ex = std::stol(s.substr(epos + 1));
        Int p10;
        mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(ex < 0 ? -ex : ex));
        Rat r = ex >= 0 ? Rat(mant * Rat(p10)) : Rat(mant / Rat(p10));
        r.canonicalize();
        return r;
    }
    auto dot = s.find('.');
    if (dot != std::string::npos) {
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        size_t frac_len = s.size() - dot - 1;
        Int num;
        if (mpz_set_str(num.get_mpz_t(), digits.c_str(), 10) != 0)
            throw InvalidInput("bad decimal literal: " + s);
        Int den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_len);
        Rat q(num, den);
        q.canonicalize();
        return q;
    }
    Rat q;
    if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
        throw InvalidInput("bad rational literal: " + s);
    q.canonicalize();
    if (mpz_sgn(q.get_den_mpz_t()) == 0) throw InvalidInput("zero denominator: " + s);
    return q;
}

inline std::string to_string(const Rat& q) { return q.get_str(); }
inline std::string to_string(const Int& z) { return z.get_str(); }

inline Rat pow_rat(const Rat& base, long e) {
    Rat r;
    if (e >= 0) {
        mpz_pow_ui(r.get_num_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(e));
        mpz_pow_ui(r.get_den_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(e));
    } else {
        if (base == 0) throw InvalidInput("0 raised to a negative power");
        mpz_pow_ui(r.get_num_mpz_t(), base.get_den_mpz_t(), static_cast<unsigned long>(-e));
        mpz_pow_ui(r.get_den_mpz_t(), base.get_num_mpz_t(), static_cast<unsigned long>(-e));
    }
    r.canonicalize();
    return r;
}

inline Int floor_rat(const Rat& q) {
    Int r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Int ceil_rat(const Rat& q) {
    Int r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

/// Round half up: the bracket defined as floor(x + 1/2).
inline Int round_half_up(const Rat& q) { return floor_rat(q + Rat(1, 2)); }

inline Rat abs_rat(const Rat& q) { return q < 0 ? Rat(-q) : q; }

}  // namespace nlrs
