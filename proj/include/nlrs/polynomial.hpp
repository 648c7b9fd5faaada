#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "nlrs/complexe.hpp"
#include "nlrs/rational.hpp"
#include "nlrs/real.hpp"

namespace nlrs {

/// Dense univariate polynomial over the rationals, ascending coefficients.
/// The zero polynomial has an empty coefficient vector.
struct QPoly {
    std::vector<Rat> c;

    QPoly() = default;
    explicit QPoly(std::vector<Rat> coeffs) : c(std::move(coeffs)) { normalize(); }
    static QPoly constant(const Rat& v) { return v == 0 ? QPoly() : QPoly({v}); }
    static QPoly x_power(size_t k, const Rat& lead = Rat(1)) {
        std::vector<Rat> v(k + 1, Rat(0));
        v[k] = lead;
        return QPoly(std::move(v));
    }

    void normalize() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    bool is_zero() const { return c.empty(); }
    long degree() const { return c.empty() ? -1 : static_cast<long>(c.size()) - 1; }
    const Rat& lc() const { return c.back(); }
    bool is_monic() const { return !c.empty() && c.back() == 1; }

    Rat eval(const Rat& x) const {
        Rat acc(0);
        for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
        return acc;
    }
    RealEnclosure eval(const RealEnclosure& x, mpfr_prec_t prec) const {
        RealEnclosure acc = RealEnclosure::exact(Rat(0), prec);
        for (size_t i = c.size(); i-- > 0;)
            acc = add(mul(acc, x, prec), RealEnclosure::exact(c[i], prec), prec);
        return acc;
    }
    ComplexEnclosure eval(const ComplexEnclosure& x, mpfr_prec_t prec) const {
        ComplexEnclosure acc = ComplexEnclosure::exact(Rat(0), Rat(0), prec);
        for (size_t i = c.size(); i-- > 0;)
            acc = add(mul(acc, x, prec), ComplexEnclosure::exact(c[i], Rat(0), prec), prec);
        return acc;
    }

    QPoly derivative() const {
        if (c.size() <= 1) return QPoly();
        std::vector<Rat> d(c.size() - 1);
        for (size_t i = 1; i < c.size(); ++i) d[i - 1] = c[i] * Rat(static_cast<long>(i));
        return QPoly(std::move(d));
    }

    QPoly monic() const {
        if (is_zero()) return *this;
        std::vector<Rat> d(c);
        for (auto& v : d) v /= c.back();
        return QPoly(std::move(d));
    }

    /// x^deg * P(1/x): the reversed coefficient list.
    QPoly reversed() const {
        std::vector<Rat> d(c.rbegin(), c.rend());
        return QPoly(std::move(d));
    }

    bool operator==(const QPoly& o) const { return c == o.c; }
};

inline QPoly operator+(const QPoly& a, const QPoly& b) {
    std::vector<Rat> r(std::max(a.c.size(), b.c.size()), Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] += b.c[i];
    return QPoly(std::move(r));
}
inline QPoly operator-(const QPoly& a, const QPoly& b) {
    std::vector<Rat> r(std::max(a.c.size(), b.c.size()), Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i) r[i] += a.c[i];
    for (size_t i = 0; i < b.c.size(); ++i) r[i] -= b.c[i];
    return QPoly(std::move(r));
}
inline QPoly operator*(const QPoly& a, const QPoly& b) {
    if (a.is_zero() || b.is_zero()) return QPoly();
    std::vector<Rat> r(a.c.size() + b.c.size() - 1, Rat(0));
    for (size_t i = 0; i < a.c.size(); ++i)
        for (size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return QPoly(std::move(r));
}
inline QPoly operator*(const QPoly& a, const Rat& s) {
    std::vector<Rat> r(a.c);
    for (auto& v : r) v *= s;
    return QPoly(std::move(r));
}
inline QPoly operator-(const QPoly& a) { return a * Rat(-1); }

/// Quotient and remainder; exact rational division.
inline std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
    if (b.is_zero()) throw InvalidInput("polynomial division by zero");
    std::vector<Rat> rem(a.c);
    long db = b.degree();
    long da = static_cast<long>(rem.size()) - 1;
    if (da < db) return {QPoly(), a};
    std::vector<Rat> q(da - db + 1, Rat(0));
    for (long i = da; i >= db; --i) {
        if (rem[i] == 0) continue;
        Rat f = rem[i] / b.c[db];
        q[i - db] = f;
        for (long j = 0; j <= db; ++j) rem[i - db + j] -= f * b.c[j];
    }
    return {QPoly(std::move(q)), QPoly(std::move(rem))};
}

/// Exact quotient; throws if the division leaves a remainder.
inline QPoly divexact(const QPoly& a, const QPoly& b) {
    auto [q, r] = divmod(a, b);
    if (!r.is_zero()) throw InvalidInput("polynomial division is not exact");
    return q;
}

/// Monic gcd via the Euclidean algorithm over Q.
inline QPoly poly_gcd(QPoly a, QPoly b) {
    while (!b.is_zero()) {
        QPoly r = divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    return a.is_zero() ? a : a.monic();
}

/// Integer polynomial, ascending coefficients.
using ZPoly = std::vector<Int>;

inline long zdegree(const ZPoly& p) {
    long d = static_cast<long>(p.size()) - 1;
    while (d >= 0 && p[d] == 0) --d;
    return d;
}

/// Clears denominators and divides out the content; sign normalized so the
/// leading coefficient is positive. Returns the primitive integer polynomial.
inline ZPoly primitive_part(const QPoly& p) {
    if (p.is_zero()) return {};
    Int den(1);
    for (const auto& q : p.c) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), q.get_den_mpz_t());
    ZPoly z(p.c.size());
    for (size_t i = 0; i < p.c.size(); ++i) {
        Rat v = p.c[i] * Rat(den);
        z[i] = Int(v.get_num());
    }
    Int g(0);
    for (const auto& v : z) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (g != 0)
        for (auto& v : z) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
    if (!z.empty() && z.back() < 0)
        for (auto& v : z) v = -v;
    return z;
}

inline QPoly to_qpoly(const ZPoly& z) {
    std::vector<Rat> c(z.size());
    for (size_t i = 0; i < z.size(); ++i) c[i] = Rat(z[i]);
    return QPoly(std::move(c));
}

/// Yun's square-free factorization: returns (factor, multiplicity) pairs with
/// multiplicities ascending; the product of factor^mult is monic(p).
inline std::vector<std::pair<QPoly, int>> squarefree_factorization(const QPoly& p_in) {
    QPoly p = p_in.monic();
    std::vector<std::pair<QPoly, int>> out;
    if (p.degree() <= 0) return out;
    QPoly dp = p.derivative();
    QPoly a = poly_gcd(p, dp);
    QPoly b = divexact(p, a);
    QPoly c = divexact(dp, a) - b.derivative();
    int i = 1;
    while (b.degree() > 0) {
        QPoly d = poly_gcd(b, c);
        if (d.degree() > 0) out.emplace_back(d.monic(), i);
        b = divexact(b, d);
        c = divexact(c, d) - b.derivative();
        ++i;
    }
    return out;
}

inline bool is_squarefree(const QPoly& p) {
    return poly_gcd(p, p.derivative()).degree() == 0;
}

// ---- resultants (Bareiss fraction-free elimination on the Sylvester matrix) ----

inline Int resultant(const ZPoly& f_in, const ZPoly& g_in) {
    long df = zdegree(f_in), dg = zdegree(g_in);
    if (df < 0 || dg < 0) return Int(0);
    if (df == 0) {
        Int r;
        mpz_pow_ui(r.get_mpz_t(), f_in[0].get_mpz_t(), static_cast<unsigned long>(dg));
        return r;
    }
    if (dg == 0) {
        Int r;
        mpz_pow_ui(r.get_mpz_t(), g_in[0].get_mpz_t(), static_cast<unsigned long>(df));
        return r;
    }
    size_t n = static_cast<size_t>(df + dg);
    std::vector<std::vector<Int>> m(n, std::vector<Int>(n, Int(0)));
    for (long i = 0; i < dg; ++i)
        for (long j = 0; j <= df; ++j) m[i][i + j] = f_in[df - j];
    for (long i = 0; i < df; ++i)
        for (long j = 0; j <= dg; ++j) m[dg + i][i + j] = g_in[dg - j];
    // Bareiss
    Int denom(1);
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            size_t piv = k + 1;
            while (piv < n && m[piv][k] == 0) ++piv;
            if (piv == n) return Int(0);
            std::swap(m[k], m[piv]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i) {
            for (size_t j = k + 1; j < n; ++j) {
                Int t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), denom.get_mpz_t());
            }
            m[i][k] = 0;
        }
        denom = m[k][k];
    }
    return sign > 0 ? m[n - 1][n - 1] : Int(-m[n - 1][n - 1]);
}

inline ZPoly zderivative(const ZPoly& p) {
    if (p.size() <= 1) return {};
    ZPoly d(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) d[i - 1] = p[i] * Int(static_cast<long>(i));
    return d;
}

inline Int discriminant_numerator(const ZPoly& f) {
    // disc(f) = (-1)^{d(d-1)/2} Res(f, f') / lc(f); we only need |disc| for
    // separation bounds, so return Res(f, f') / lc exactly.
    long d = zdegree(f);
    if (d < 1) return Int(0);
    Int r = resultant(f, zderivative(f));
    Int out;
    mpz_divexact(out.get_mpz_t(), r.get_mpz_t(), f[d].get_mpz_t());
    return out;
}

/// Cauchy bound: all complex roots have modulus < 1 + max|a_i| / |a_d|.
inline Rat cauchy_root_bound(const QPoly& p) {
    Rat m(0);
    for (size_t i = 0; i + 1 < p.c.size(); ++i) m = std::max(m, abs_rat(p.c[i]));
    return Rat(1) + m / abs_rat(p.lc());
}

/// Mahler's root separation lower bound for a square-free integer polynomial:
/// sep(f) > sqrt(3 |disc|) d^{-(d+2)/2} ||f||_2^{-(d-1)}. Returned as an exact
/// dyadic rational strictly below the true bound.
inline Rat separation_lower_bound(const ZPoly& f) {
    long d = zdegree(f);
    if (d < 2) return Rat(1);
    Int disc = discriminant_numerator(f);
    if (disc == 0) throw InvalidInput("separation bound needs a square-free polynomial");
    mpfr_prec_t p = 128;
    mpfr_t acc, t;
    mpfr_init2(acc, p);
    mpfr_init2(t, p);
    // sqrt(3 |disc|), rounded down
    mpfr_set_z(acc, disc.get_mpz_t(), MPFR_RNDZ);
    mpfr_abs(acc, acc, MPFR_RNDZ);
    mpfr_mul_ui(acc, acc, 3, MPFR_RNDD);
    mpfr_sqrt(acc, acc, MPFR_RNDD);
    // d^{(d+2)/2} = sqrt(d^(d+2)), rounded up, divides
    mpfr_set_si(t, d, MPFR_RNDU);
    mpfr_pow_ui(t, t, static_cast<unsigned long>(d + 2), MPFR_RNDU);
    mpfr_sqrt(t, t, MPFR_RNDU);
    mpfr_div(acc, acc, t, MPFR_RNDD);
    // ||f||_2^{d-1}, rounded up, divides
    Int norm2(0);
    for (const auto& v : f) norm2 += v * v;
    mpfr_set_z(t, norm2.get_mpz_t(), MPFR_RNDU);
    mpfr_sqrt(t, t, MPFR_RNDU);
    mpfr_pow_ui(t, t, static_cast<unsigned long>(d - 1), MPFR_RNDU);
    mpfr_div(acc, acc, t, MPFR_RNDD);
    // halve once more so the result is strictly below the bound
    mpfr_div_2ui(acc, acc, 1, MPFR_RNDD);
    RealEnclosure e = RealEnclosure::from_mpfr(acc, acc, p);
    mpfr_clears(acc, t, nullptr);
    auto q = e.as_exact_rational();
    if (!q || *q <= 0) return Rat(1, Int(1) << 200);
    return *q;
}

// ---- Sturm sequences (square-free input) ----

inline std::vector<QPoly> sturm_sequence(const QPoly& f) {
    std::vector<QPoly> seq;
    seq.push_back(f);
    seq.push_back(f.derivative());
    while (!seq.back().is_zero()) {
        QPoly r = divmod(seq[seq.size() - 2], seq.back()).second;
        seq.push_back(-r);
    }
    seq.pop_back();
    return seq;
}

inline int sign_variations_at(const std::vector<QPoly>& seq, const Rat& x) {
    int var = 0, prev = 0;
    for (const auto& p : seq) {
        Rat v = p.eval(x);
        int s = sgn(v);
        if (s != 0) {
            if (prev != 0 && s != prev) ++var;
            prev = s;
        }
    }
    return var;
}

/// Number of real roots of square-free f in (a, b].
inline int count_real_roots(const std::vector<QPoly>& seq, const Rat& a, const Rat& b) {
    return sign_variations_at(seq, a) - sign_variations_at(seq, b);
}

inline int count_real_roots(const QPoly& f, const Rat& a, const Rat& b) {
    auto seq = sturm_sequence(f);
    return count_real_roots(seq, a, b);
}

/// All integer roots of a monic integer polynomial, found by isolating real
/// roots to width < 1 with Sturm bisection and testing the integer candidates
/// exactly. No factorization of coefficients needed.
inline std::vector<Int> integer_roots_monic(const QPoly& f_in) {
    QPoly f = f_in;
    std::vector<Int> out;
    if (f.degree() < 1) return out;
    // peel off repeated roots so Sturm counting applies
    QPoly g = poly_gcd(f, f.derivative());
    if (g.degree() > 0) f = divexact(f, g);
    Rat bound = cauchy_root_bound(f);
    Int lo = floor_rat(-bound) - 1, hi = ceil_rat(bound) + 1;
    auto seq = sturm_sequence(f);
    struct Iv {
        Rat a, b;
        int n;
    };
    std::vector<Iv> work{{Rat(lo), Rat(hi), count_real_roots(seq, Rat(lo), Rat(hi))}};
    while (!work.empty()) {
        Iv iv = work.back();
        work.pop_back();
        if (iv.n <= 0) continue;
        if (iv.b - iv.a <= 1) {
            // at most a couple of integer candidates
            for (Int k = ceil_rat(iv.a); k <= floor_rat(iv.b); ++k)
                if (f_in.eval(Rat(k)) == 0) out.push_back(k);
            continue;
        }
        Rat m = (iv.a + iv.b) / 2;
        int left = count_real_roots(seq, iv.a, m);
        work.push_back({iv.a, m, left});
        work.push_back({m, iv.b, iv.n - left});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Rational roots of an integer polynomial via the monic transform y = lc*x.
inline std::vector<Rat> rational_roots(const ZPoly& f) {
    long d = zdegree(f);
    std::vector<Rat> out;
    if (d < 1) return out;
    // monic in y: y^d + a_{d-1} y^{d-1} lc^0 ... via f(y/lc) * lc^{d-1}
    const Int& lead = f[d];
    std::vector<Rat> m(d + 1);
    Int pw(1);
    for (long i = d; i >= 0; --i) {
        m[i] = Rat(f[i] * pw);
        if (i > 0) pw *= lead;
    }
    // scale so leading coeff is 1: coefficients m[i]/m[d]
    for (long i = 0; i <= d; ++i) m[i] /= Rat(lead);
    QPoly monic(std::move(m));
    for (const Int& y : integer_roots_monic(monic)) {
        Rat x = Rat(y) / Rat(lead);
        x.canonicalize();
        out.push_back(x);
    }
    return out;
}

// ---- small-prime machinery for irreducibility screening ----

namespace gfp {

inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}
inline uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) {
    uint64_t r = 1 % p;
    while (e) {
        if (e & 1) r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}
inline uint64_t invmod(uint64_t a, uint64_t p) { return powmod(a % p, p - 2, p); }

using Fp = std::vector<uint64_t>;  // ascending, normalized

inline void fpnorm(Fp& f) {
    while (!f.empty() && f.back() == 0) f.pop_back();
}
inline Fp fpmod(Fp a, const Fp& b, uint64_t p) {
    fpnorm(a);
    long db = static_cast<long>(b.size()) - 1;
    uint64_t binv = invmod(b.back(), p);
    while (static_cast<long>(a.size()) - 1 >= db) {
        long da = static_cast<long>(a.size()) - 1;
        uint64_t f = mulmod(a.back(), binv, p);
        for (long j = 0; j <= db; ++j) {
            uint64_t sub = mulmod(f, b[j], p);
            uint64_t& t = a[da - db + j];
            t = (t + p - sub) % p;
        }
        fpnorm(a);
        if (a.empty()) break;
    }
    return a;
}
inline Fp fpmul(const Fp& a, const Fp& b, uint64_t p) {
    if (a.empty() || b.empty()) return {};
    Fp r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + mulmod(a[i], b[j], p)) % p;
    fpnorm(r);
    return r;
}
inline Fp fpgcd(Fp a, Fp b, uint64_t p) {
    fpnorm(a);
    fpnorm(b);
    while (!b.empty()) {
        Fp r = fpmod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        uint64_t inv = invmod(a.back(), p);
        for (auto& v : a) v = mulmod(v, inv, p);
    }
    return a;
}
inline Fp fpdivexact(const Fp& num_in, const Fp& g, uint64_t p) {
    Fp num = num_in;
    long dq = static_cast<long>(num.size()) - static_cast<long>(g.size());
    Fp q(dq + 1, 0);
    uint64_t ginv = invmod(g.back(), p);
    for (long t = dq; t >= 0; --t) {
        uint64_t f2 = mulmod(num[t + g.size() - 1], ginv, p);
        q[t] = f2;
        for (size_t j = 0; j < g.size(); ++j) {
            uint64_t sub = mulmod(f2, g[j], p);
            num[t + j] = (num[t + j] + p - sub) % p;
        }
    }
    fpnorm(q);
    return q;
}

inline Fp fppowmod(const Fp& base_in, uint64_t e, const Fp& modp, uint64_t p) {
    Fp acc{1};
    Fp base = fpmod(base_in, modp, p);
    while (e) {
        if (e & 1) acc = fpmod(fpmul(acc, base, p), modp, p);
        base = fpmod(fpmul(base, base, p), modp, p);
        e >>= 1;
    }
    return acc;
}

/// Factor degrees of the distinct-degree decomposition of f mod p, sorted
/// ascending. Empty optional when p divides lc(f) or f is not square-free
/// mod p (the prime is unusable for screening).
inline std::optional<std::vector<long>> ddf_degrees(const ZPoly& f, uint64_t p) {
    long d = zdegree(f);
    if (d < 1) return std::nullopt;
    Fp fp(d + 1);
    for (long i = 0; i <= d; ++i) {
        Int r = f[i] % Int(static_cast<unsigned long>(p));
        long v = r.get_si();
        fp[i] = static_cast<uint64_t>((v % static_cast<long>(p) + static_cast<long>(p)) %
                                      static_cast<long>(p));
    }
    fpnorm(fp);
    if (static_cast<long>(fp.size()) - 1 != d) return std::nullopt;  // lc vanished mod p
    Fp der(fp.size() - 1);
    for (size_t i = 1; i < fp.size(); ++i) der[i - 1] = mulmod(fp[i], i % p, p);
    fpnorm(der);
    if (der.empty() || fpgcd(fp, der, p).size() != 1) return std::nullopt;

    std::vector<long> degs;
    Fp rem = fp;
    Fp h{0, 1};  // x
    long i = 0;
    while (static_cast<long>(rem.size()) - 1 >= 2 * (i + 1)) {
        ++i;
        h = fppowmod(h, p, rem, p);  // h = x^{p^i} mod rem
        Fp hm = h;
        if (hm.size() < 2) hm.resize(2, 0);
        hm[1] = (hm[1] + p - 1) % p;  // h - x
        fpnorm(hm);
        Fp g = fpgcd(rem, hm, p);
        if (g.size() > 1) {
            long total = static_cast<long>(g.size()) - 1;
            for (long k = 0; k < total / i; ++k) degs.push_back(i);
            rem = fpdivexact(rem, g, p);
            h = fpmod(h, rem, p);
        }
    }
    if (static_cast<long>(rem.size()) - 1 > 0) degs.push_back(static_cast<long>(rem.size()) - 1);
    std::sort(degs.begin(), degs.end());
    return degs;
}

}  // namespace gfp

/// The m-th cyclotomic polynomial, exact.
inline const QPoly& cyclotomic(unsigned long m) {
    static std::map<unsigned long, QPoly> cache;
    auto it = cache.find(m);
    if (it != cache.end()) return it->second;
    std::vector<Rat> xm(m + 1, Rat(0));
    xm[0] = Rat(-1);
    xm[m] = Rat(1);
    QPoly acc(std::move(xm));
    for (unsigned long d = 1; d < m; ++d)
        if (m % d == 0) acc = divexact(acc, cyclotomic(d));
    return cache.emplace(m, std::move(acc)).first->second;
}

}  // namespace nlrs
