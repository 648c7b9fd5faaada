#pragma once

#include <algorithm>
#include <map>
#include <thread>
#include <vector>

#include "nlrs/diophantine.hpp"

namespace nlrs {

struct SolutionPair {
    Int k, m;
    bool operator==(const SolutionPair& o) const { return k == o.k && m == o.m; }
};

/// Index pairs (k, m) with a_k = b_m, exact integer equality, sorted by
/// (max(k,m), k).
struct SolutionSet {
    std::vector<SolutionPair> pairs;
    Int K{0}, M{0};  // searched ranges
};

inline void sort_solutions(std::vector<SolutionPair>& v) {
    std::sort(v.begin(), v.end(), [](const SolutionPair& x, const SolutionPair& y) {
        Int mx = x.k > x.m ? x.k : x.m;
        Int my = y.k > y.m ? y.k : y.m;
        if (mx != my) return mx < my;
        if (x.k != y.k) return x.k < y.k;
        return x.m < y.m;
    });
}

/// All common terms with k <= K, m <= M, by exact hashing of the integer
/// values. The m-range may be split across workers; the merge is
/// deterministic.
inline SolutionSet search_common(const GeneratedSequence& a, const GeneratedSequence& b,
                                 size_t K, size_t M, int workers = 1) {
    if (!a.integer_values || !b.integer_values)
        throw InvalidSpec("common-term search needs integer-valued sequences");
    if (K >= a.size() || M >= b.size())
        throw LengthMismatch("search range exceeds the generated prefix");
    SolutionSet out;
    out.K = Int(static_cast<unsigned long>(K));
    out.M = Int(static_cast<unsigned long>(M));

    std::map<Int, std::vector<size_t>> value_to_m;
    if (workers <= 1) {
        for (size_t m = 0; m <= M; ++m) value_to_m[b.value_int(m)].push_back(m);
    } else {
        size_t nw = static_cast<size_t>(workers);
        std::vector<std::map<Int, std::vector<size_t>>> maps(nw);
        std::vector<std::thread> threads;
        for (size_t w = 0; w < nw; ++w) {
            threads.emplace_back([&, w]() {
                for (size_t m = w; m <= M; m += nw) maps[w][b.value_int(m)].push_back(m);
            });
        }
        for (auto& t : threads) t.join();
        for (auto& mp : maps)
            for (auto& [v, idx] : mp) {
                auto& dst = value_to_m[v];
                dst.insert(dst.end(), idx.begin(), idx.end());
            }
        for (auto& [v, idx] : value_to_m) std::sort(idx.begin(), idx.end());
    }
    for (size_t k = 0; k <= K; ++k) {
        auto it = value_to_m.find(a.value_int(k));
        if (it == value_to_m.end()) continue;
        for (size_t m : it->second)
            out.pairs.push_back({Int(static_cast<unsigned long>(k)),
                                 Int(static_cast<unsigned long>(m))});
    }
    sort_solutions(out.pairs);
    return out;
}

// ---- Baker-type lower bound ----

struct MatveevInput {
    std::vector<AlgebraicNumber> gammas;  // positive real algebraic numbers
    std::vector<Int> b;                   // integer exponents
    Int D{1};                             // upper bound of the field degree
    Int B{1};                             // >= max |b_i|
    std::vector<RealEnclosure> A;         // optional; computed when empty
};

namespace detail_ct {

inline RealEnclosure max3(const RealEnclosure& x, const RealEnclosure& y, const Rat& c,
                          mpfr_prec_t p) {
    RealEnclosure out(p);
    mpfr_max(out.lo_mut(), x.lo(), y.lo(), MPFR_RNDD);
    mpfr_max(out.hi_mut(), x.hi(), y.hi(), MPFR_RNDU);
    RealEnclosure ce = RealEnclosure::exact(c, p);
    RealEnclosure out2(p);
    mpfr_max(out2.lo_mut(), out.lo(), ce.lo(), MPFR_RNDD);
    mpfr_max(out2.hi_mut(), out.hi(), ce.hi(), MPFR_RNDU);
    return out2;
}

/// A_i = max(D h(gamma), |log gamma|, 0.16) as an enclosure.
inline RealEnclosure matveev_A(const AlgebraicNumber& g, const Int& D, mpfr_prec_t p) {
    RealEnclosure h = height(g, -static_cast<long>(p) / 2);
    RealEnclosure dh = mul(RealEnclosure::exact(D, p), h, p);
    RealEnclosure lg = abs_enc(log_enc(abs2(g.enclosure(-static_cast<long>(p)), p), p));
    lg = mul(lg, RealEnclosure::exact(Rat(1, 2), p), p);
    return max3(dh, lg, Rat(16, 100), p);
}

}  // namespace detail_ct

/// Certifies Lambda = prod gamma_i^{b_i} - 1 != 0; throws LambdaZero when the
/// product is exactly 1.
inline void require_lambda_nonzero(const MatveevInput& in) {
    bool all_rational = true;
    for (const auto& g : in.gammas) all_rational &= g.is_rational();
    if (all_rational) {
        Rat prod(1);
        for (size_t i = 0; i < in.gammas.size(); ++i)
            prod *= pow_rat(*in.gammas[i].rational(), in.b[i].get_si());
        if (prod == 1) throw LambdaZero();
        return;
    }
    if (in.gammas.size() == 2) {
        // gamma_1^{b_1} = gamma_2^{-b_2} decided exactly
        if (detail_alg::power_equal(in.gammas[0], in.b[0], in.gammas[1], Int(-in.b[1])))
            throw LambdaZero();
        return;
    }
    // screen: refine the product enclosure away from 1
    for (mpfr_prec_t p = 192; p <= (1 << 18); p *= 2) {
        ComplexEnclosure prod = ComplexEnclosure::exact(Rat(1), Rat(0), p);
        for (size_t i = 0; i < in.gammas.size(); ++i)
            prod = mul(prod, pow_int(in.gammas[i].enclosure(-static_cast<long>(p)), in.b[i], p),
                       p);
        RealEnclosure d = sub(prod.re, RealEnclosure::exact(Rat(1), p), p);
        if (d.excludes_zero() || prod.im.excludes_zero()) return;
    }
    throw PrecisionCapExceeded("cannot certify the power product differs from 1");
}

/// Explicit lower bound for log |Lambda|: returns the enclosure of
///   -( 1.4 * 30^{t+3} * t^{4.5} * D^2 (1 + log D)(1 + log B) A_1 ... A_t ).
inline RealEnclosure matveev_lower_bound(const MatveevInput& in, mpfr_prec_t prec = 256) {
    size_t t = in.gammas.size();
    if (t == 0 || in.b.size() != t) throw InvalidInput("need matching gamma/b lists");
    if (in.D < 1) throw InvalidInput("need D >= 1");
    for (const auto& g : in.gammas) {
        if (!g.is_real() || !g.real_enclosure(-32).is_positive())
            throw InvalidInput("Matveev bases must be positive real algebraic numbers");
    }
    Int maxb(0);
    for (const auto& bi : in.b) {
        Int a = abs(bi);
        if (a > maxb) maxb = a;
    }
    if (in.B < maxb) throw InvalidInput("B must dominate every |b_i|");
    require_lambda_nonzero(in);

    std::vector<RealEnclosure> A = in.A;
    if (A.empty())
        for (const auto& g : in.gammas) A.push_back(detail_ct::matveev_A(g, in.D, prec));
    if (A.size() != t) throw InvalidInput("need one A constant per base");

    mpfr_prec_t p = prec;
    Int pow30;
    mpz_ui_pow_ui(pow30.get_mpz_t(), 30, static_cast<unsigned long>(t + 3));
    RealEnclosure acc = mul(RealEnclosure::exact(Rat(14, 10), p),
                            RealEnclosure::exact(pow30, p), p);
    // t^{4.5} = exp(4.5 ln t)
    RealEnclosure lt = log_enc(RealEnclosure::exact(Rat(static_cast<long>(t)), p), p);
    acc = mul(acc, exp_enc(mul(lt, RealEnclosure::exact(Rat(9, 2), p), p), p), p);
    Int dd = in.D * in.D;
    acc = mul(acc, RealEnclosure::exact(dd, p), p);
    acc = mul(acc,
              add(RealEnclosure::exact(Rat(1), p),
                  log_enc(RealEnclosure::exact(in.D, p), p), p),
              p);
    acc = mul(acc,
              add(RealEnclosure::exact(Rat(1), p),
                  log_enc(RealEnclosure::exact(in.B, p), p), p),
              p);
    for (const auto& a : A) acc = mul(acc, a, p);
    return neg(acc);
}

// ---- effective gap constants for consecutive common terms ----

/// Per-sequence data feeding the gap-constant chain: dominating root alpha,
/// the asymptotic coefficient, and the remainder envelope
/// |a_k - beta1 alpha^k| <= C_err alpha^{k (1 - eps)}.
struct GapSequenceData {
    AlgebraicNumber alpha;
    RealEnclosure beta1;
    Rat C_err;
    Rat eps;  // in (0, 1]
};

struct GapConstants {
    Int K0;
    Rat K1, K2;        // gap bound: k_2 > k_1 + K2 * exp(K1 * k_1)
    Rat K1_statement;  // the statement's labels swap the two
    Rat K2_statement;
    Rat eps;
    // audit trail of the effective chain
    Rat C1, C2, C3, C4, C5, C6, C7, C8, C9, C10, C11;
    std::string note;
};

namespace detail_ct {

inline Rat up(const RealEnclosure& e) { return detail_roots::dyadic_of(e.hi()); }
inline Rat lo(const RealEnclosure& e) { return detail_roots::dyadic_of(e.lo()); }

/// x^e for rational x > 0 and rational e, as an enclosure.
inline RealEnclosure rat_pow(const Rat& x, const Rat& e, mpfr_prec_t p) {
    RealEnclosure lx = log_enc(RealEnclosure::exact(x, p), p);
    return exp_enc(mul(lx, RealEnclosure::exact(e, p), p), p);
}

}  // namespace detail_ct

/// Walks the effective-constant chain behind the sparsity gap bound for two
/// sequences with multiplicatively independent real dominating roots > 1:
/// K0 is the smallest index making the normalized form land within 1/2 of 1,
/// and K1, K2 assemble the Baker-bound comparison. All constants are recorded.
inline GapConstants gap_constants(const GapSequenceData& a, const GapSequenceData& b,
                                  unsigned long indep_bound = 64) {
    mpfr_prec_t p = 320;
    {
        RealEnclosure ea = a.alpha.real_enclosure(-64), eb = b.alpha.real_enclosure(-64);
        if (!certainly_greater(ea, Rat(1)) || !certainly_greater(eb, Rat(1)))
            throw InvalidInput("dominating roots must exceed 1");
        if (!a.alpha.is_real() || !b.alpha.is_real())
            throw InvalidInput("dominating roots must be real");
    }
    if (auto rel = multiplicative_independence(a.alpha, b.alpha, indep_bound))
        throw DependentBases("alpha^" + rel->u.get_str() + " beta^" + rel->v.get_str() + " = 1");
    if (!a.beta1.excludes_zero() || !b.beta1.excludes_zero())
        throw MissingBinetData("asymptotic coefficients must exclude zero");
    if (a.C_err < 0 || b.C_err < 0 || a.eps <= 0 || b.eps <= 0 || a.eps > 1 || b.eps > 1)
        throw MissingBinetData("invalid remainder envelope");

    GapConstants out;
    out.C1 = a.C_err;
    out.C2 = b.C_err;
    out.eps = a.eps < b.eps ? a.eps : b.eps;

    RealEnclosure la = log_enc(abs2(a.alpha.enclosure(-320), p), p);
    la = mul(la, RealEnclosure::exact(Rat(1, 2), p), p);  // ln alpha
    RealEnclosure lb_ = log_enc(abs2(b.alpha.enclosure(-320), p), p);
    lb_ = mul(lb_, RealEnclosure::exact(Rat(1, 2), p), p);  // ln beta

    Rat g_lo = detail_ct::lo(abs_enc(a.beta1));  // |gamma| lower
    Rat g_up = detail_ct::up(abs_enc(a.beta1));
    Rat d_lo = detail_ct::lo(abs_enc(b.beta1));  // |delta| lower
    Rat d_up = detail_ct::up(abs_enc(b.beta1));
    if (g_lo <= 0 || d_lo <= 0) throw MissingBinetData("coefficient enclosures touch zero");

    Rat alpha_lo = detail_ct::lo(a.alpha.real_enclosure(-128));
    Rat beta_lo = detail_ct::lo(b.alpha.real_enclosure(-128));

    // c0: beta^m >= c0 alpha^k once |a_k| >= (gamma/2) alpha^k
    Rat c0 = g_lo / (2 * (d_up + b.C_err));
    // c1: beta^m <= c1 alpha^k once |b_m| >= (delta/2) beta^m
    Rat c1 = 2 * (g_up + a.C_err) / d_lo;

    // K0 scan: all five effectivity conditions, monotone in k
    auto alpha_pow_neg = [&](const Rat& base, const Rat& expo_times_k, long k) {
        // base^{-expo*k} as an enclosure
        RealEnclosure lbase = log_enc(RealEnclosure::exact(base, p), p);
        RealEnclosure e = mul(lbase, RealEnclosure::exact(-expo_times_k * k, p), p);
        return exp_enc(e, p);
    };
    long K0 = 1;
    for (;; ++K0) {
        if (K0 > 1000000) throw PrecisionCapExceeded("no effective threshold below 10^6");
        // (a) C1 alpha^{-k eps_a} <= gamma_lo / 2
        RealEnclosure t1 = mul(RealEnclosure::exact(a.C_err, p),
                               alpha_pow_neg(alpha_lo, a.eps, K0), p);
        if (!certainly_less(t1, g_lo / 2)) continue;
        // mu0(k) = (k ln alpha + ln c0) / ln beta >= 1
        RealEnclosure mu0 = div(add(mul(la, RealEnclosure::exact(Rat(K0), p), p),
                                    log_enc(RealEnclosure::exact(c0, p), p), p),
                                lb_, p);
        if (!certainly_greater(mu0, Rat(1))) continue;
        // (b) C2 beta^{-mu0 eps_b} <= delta_lo / 2
        RealEnclosure t2 = mul(RealEnclosure::exact(b.C_err, p),
                               exp_enc(mul(neg(mul(mu0, lb_, p)),
                                           RealEnclosure::exact(b.eps, p), p), p),
                               p);
        if (!certainly_less(t2, d_lo / 2)) continue;
        // (c1) orientation alpha^k >= beta^m:
        //   (C1/g) a^{-k e_a} + (C2 c1 c0^{-e_b} / g) a^{-k e_b} < 1/2
        RealEnclosure c0pow = detail_ct::rat_pow(c0, -b.eps, p);
        RealEnclosure r1 =
            add(mul(RealEnclosure::exact(a.C_err / g_lo, p), alpha_pow_neg(alpha_lo, a.eps, K0),
                    p),
                mul(mul(RealEnclosure::exact(b.C_err * c1 / g_lo, p), c0pow, p),
                    alpha_pow_neg(alpha_lo, b.eps, K0), p),
                p);
        if (!certainly_less(r1, Rat(1, 2))) continue;
        // (c2) orientation beta^m > alpha^k:
        //   (C1/(d c0)) a^{-k e_a} + (C2 c0^{-e_b}/d) a^{-k e_b} < 1/2
        RealEnclosure r2 =
            add(mul(RealEnclosure::exact(a.C_err / (d_lo * c0), p),
                    alpha_pow_neg(alpha_lo, a.eps, K0), p),
                mul(mul(RealEnclosure::exact(b.C_err / d_lo, p), c0pow, p),
                    alpha_pow_neg(alpha_lo, b.eps, K0), p),
                p);
        if (!certainly_less(r2, Rat(1, 2))) continue;
        break;
    }
    out.K0 = Int(K0);

    // C3: |X - 1| < C3 alpha^{-k eps} for every solution with k >= K0, both
    // orientations folded (the second contributes a factor 2 via X < 2)
    RealEnclosure c0pow = detail_ct::rat_pow(c0, -out.eps, p);
    Rat c3_1 = a.C_err / g_lo + b.C_err * c1 / g_lo * detail_ct::up(c0pow);
    Rat c3_2 = 2 * (a.C_err / (d_lo * c0) + b.C_err / d_lo * detail_ct::up(c0pow));
    out.C3 = c3_1 > c3_2 ? c3_1 : c3_2;
    out.C4 = 4 * out.C3;

    // C5: |m ln beta - k ln alpha| <= |ln(delta/gamma)| + ln 2, using the
    // conservative spread of the coefficient-ratio logarithm
    Rat lr1 = abs_rat(detail_ct::up(sub(log_enc(RealEnclosure::exact(d_up, p), p),
                                        log_enc(RealEnclosure::exact(g_lo, p), p), p)));
    Rat lr2 = abs_rat(detail_ct::up(sub(log_enc(RealEnclosure::exact(g_up, p), p),
                                        log_enc(RealEnclosure::exact(d_lo, p), p), p)));
    Rat ln2_up = detail_ct::up(log_enc(RealEnclosure::exact(Rat(2), p), p));
    out.C5 = (lr1 > lr2 ? lr1 : lr2) + ln2_up;

    Rat lnb_lo = detail_ct::lo(lb_);
    Rat lna_up = detail_ct::up(la);
    Rat lna_lo = detail_ct::lo(la);
    if (lnb_lo <= 0 || lna_lo <= 0) throw InvalidInput("log enclosures degenerate");
    out.C6 = 2 * out.C5 / lnb_lo;
    out.C7 = lna_up / lnb_lo;

    // Matveev with t = 2 on (beta, alpha); D bounds [Q(alpha, beta) : Q]
    Int D = Int(static_cast<long>(a.alpha.degree() * b.alpha.degree()));
    RealEnclosure A1 = detail_ct::matveev_A(b.alpha, D, p);
    RealEnclosure A2 = detail_ct::matveev_A(a.alpha, D, p);
    Int pow30;
    mpz_ui_pow_ui(pow30.get_mpz_t(), 30, 5);
    RealEnclosure c8 = mul(RealEnclosure::exact(Rat(14, 10), p),
                           RealEnclosure::exact(pow30, p), p);
    RealEnclosure two45 = exp_enc(mul(log_enc(RealEnclosure::exact(Rat(2), p), p),
                                      RealEnclosure::exact(Rat(9, 2), p), p),
                                  p);
    c8 = mul(c8, two45, p);
    Int DD = D * D;
    c8 = mul(c8, RealEnclosure::exact(DD, p), p);
    c8 = mul(c8, add(RealEnclosure::exact(Rat(1), p),
                     log_enc(RealEnclosure::exact(D, p), p), p),
             p);
    c8 = mul(c8, A1, p);
    c8 = mul(c8, A2, p);
    out.C8 = detail_ct::up(c8);
    out.C9 = out.C8;
    Rat max17 = out.C7 > 1 ? out.C7 : Rat(1);
    RealEnclosure ln_m17 = log_enc(RealEnclosure::exact(max17, p), p);
    RealEnclosure ln_1c6 = log_enc(RealEnclosure::exact(Rat(1) + out.C6 / max17, p), p);
    out.C10 = out.C8 * (Rat(1) + detail_ct::up(ln_m17) + detail_ct::up(ln_1c6));
    out.C11 = lna_lo;

    out.K1 = out.C11 * out.eps / out.C9;
    // K2 = exp(-C10/C9 - ln C4 / C9), rounded down
    RealEnclosure lnC4 = log_enc(RealEnclosure::exact(out.C4, p), p);
    RealEnclosure expo = div(neg(add(RealEnclosure::exact(out.C10, p), lnC4, p)),
                             RealEnclosure::exact(out.C9, p), p);
    out.K2 = detail_ct::lo(exp_enc(expo, p));
    if (out.K2 < 0) out.K2 = Rat(0);
    out.K1_statement = out.K2;
    out.K2_statement = out.K1;
    out.note =
        "gap bound k2 > k1 + K2*exp(K1*k1); the alternate labeling swaps the two "
        "constants (K1_statement/K2_statement)";
    return out;
}

/// Gap-data extraction from a Binet report of a sequence with a real rational
/// or algebraic dominating root.
inline GapSequenceData gap_data_from_report(const NlrsSpec& spec, const BinetReport& rep) {
    if (rep.entries.empty()) throw MissingBinetData("empty report");
    const RootReportEntry& top = rep.entries[0];
    if (!top.beta.has_value()) throw MissingBinetData("no asymptotic coefficient");
    if (!top.root.is_real()) throw InvalidInput("dominating root must be real");
    GapSequenceData out;
    // promote the dominating root handle to a validated algebraic number
    QPoly mp = minimal_polynomial_of(top.root.factor(), top.root);
    out.alpha = AlgebraicNumber::from_minpoly(primitive_part(mp), top.root.enclosure(-80));
    out.beta1 = top.beta->re;
    (void)spec;
    out.C_err = rep.residuals.bound_const;
    // remainder envelope: with no unit-circle part the constant bound gives
    // eps = 1; a linear part would need the second-root gap instead
    if (rep.residuals.bound_linear != 0)
        throw MissingBinetData("linear remainder: no dominance gap available");
    out.eps = Rat(1);
    if (out.C_err <= 0) out.C_err = Rat(1, 1000000);
    return out;
}

/// Checks a solution list against the gap certificate: no two consecutive
/// solutions with K0 <= k_1 < k_2 may violate k_2 > k_1 + K2 exp(K1 k_1).
struct GapViolation {
    SolutionPair first, second;
};

inline std::vector<GapViolation> gap_certificate_check(const SolutionSet& sols,
                                                       const GapConstants& gc) {
    std::vector<GapViolation> out;
    std::vector<SolutionPair> byk = sols.pairs;
    std::sort(byk.begin(), byk.end(), [](const SolutionPair& x, const SolutionPair& y) {
        if (x.k != y.k) return x.k < y.k;
        return x.m < y.m;
    });
    mpfr_prec_t p = 256;
    for (size_t i = 0; i + 1 < byk.size(); ++i) {
        const Int& k1 = byk[i].k;
        const Int& k2 = byk[i + 1].k;
        if (k1 < gc.K0 || k2 <= k1) continue;
        // bound = K2 exp(K1 k1), compared as k2 - k1 > bound
        RealEnclosure bound = mul(RealEnclosure::exact(gc.K2, p),
                                  exp_enc(mul(RealEnclosure::exact(gc.K1, p),
                                              RealEnclosure::exact(k1, p), p),
                                          p),
                                  p);
        RealEnclosure gap = RealEnclosure::exact(Int(k2 - k1), p);
        if (!certainly_greater(gap, detail_ct::up(bound))) out.push_back({byk[i], byk[i + 1]});
    }
    return out;
}

// ---- rational line fit ----

struct LineFit {
    Int u, v, w;  // k = (u m + w) / v with v > 0, gcd(u, v, w) = 1
    std::vector<size_t> exceptions;
};

/// Fits a rational line through all but at most `tolerance` of the pairs.
/// Candidates come from every two pairs with distinct m; empty optional when
/// no candidate covers enough points (or all m coincide).
inline std::optional<LineFit> rational_line_fit(const std::vector<SolutionPair>& pairs,
                                                size_t tolerance = 0) {
    size_t n = pairs.size();
    if (n < 2) throw InvalidInput("need at least two pairs");
    std::optional<LineFit> best;
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (pairs[i].m == pairs[j].m) continue;
            // k = (u m + w)/v through both points:
            Int u = pairs[j].k - pairs[i].k;
            Int v = pairs[j].m - pairs[i].m;
            Int w = pairs[i].k * v - u * pairs[i].m;
            if (v < 0) {
                u = -u;
                v = -v;
                w = -w;
            }
            Int g;
            mpz_gcd(g.get_mpz_t(), u.get_mpz_t(), v.get_mpz_t());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), w.get_mpz_t());
            if (g > 1) {
                mpz_divexact(u.get_mpz_t(), u.get_mpz_t(), g.get_mpz_t());
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
                mpz_divexact(w.get_mpz_t(), w.get_mpz_t(), g.get_mpz_t());
            }
            LineFit cand{u, v, w, {}};
            for (size_t t = 0; t < n; ++t)
                if (pairs[t].k * v != u * pairs[t].m + w) cand.exceptions.push_back(t);
            if (cand.exceptions.size() <= tolerance &&
                (!best || cand.exceptions.size() < best->exceptions.size()))
                best = std::move(cand);
        }
    }
    return best;
}

// ---- the two-sequence counterexample factory ----

struct CounterexampleResult {
    NlrsSpec a_spec, b_spec;
    Int u;  // offset in {-1, 0, 1}
    GammaConstruction gamma;
    SolutionSet verified;                          // exact equalities a_k = b_m
    std::vector<std::pair<Int, Int>> trace_pairs;  // all retained pairs
    std::optional<LineFit> line;                   // fit over the trace pairs
};

/// Builds the pair of integer nlrs a_n = [alpha^n], b_n = [gamma beta^n + u]
/// sharing infinitely many values; the exact equalities are verified for
/// every constructed pair small enough to evaluate, and the pair set is
/// checked against rational lines.
inline CounterexampleResult build_counterexample_pair(const AlgebraicNumber& alpha,
                                                      const AlgebraicNumber& beta, const Rat& C,
                                                      int depth,
                                                      long verify_bit_limit = 1 << 21) {
    CounterexampleResult out;
    out.gamma = construct_gamma(alpha, beta, C, depth);

    // gamma as a serializable expression: exp(sum k_i log alpha - m_i log beta)
    Expr la = Expr::log(alpha.is_rational() ? Expr::constant(*alpha.rational())
                                            : Expr::algebraic(alpha));
    Expr lbx = Expr::log(beta.is_rational() ? Expr::constant(*beta.rational())
                                            : Expr::algebraic(beta));
    const auto& stages = out.gamma.shift.stages;
    Int ksum(0), msum(0);
    for (const auto& st : stages) {
        ksum += st.k;
        msum += st.m;
    }
    Expr c_expr = Expr::constant(ksum) * la - Expr::constant(msum) * lbx;
    Expr gamma_expr = Expr::exp(c_expr);

    // the a-sequence: floor powers of alpha
    out.a_spec.degree = 1;
    if (alpha.is_rational())
        out.a_spec.coefficients = {Coef(-*alpha.rational())};
    else
        out.a_spec.coefficients = {Coef(negate(alpha))};
    out.a_spec.rule = RuleKind::Target;
    out.a_spec.rounding = TargetRounding::Floor;
    out.a_spec.targets.push_back({Expr::constant(Rat(1)), alpha});

    // determine u from the evaluable pairs: [alpha^k] - [gamma beta^m]. At
    // the final stage gamma beta^{m'} equals alpha^{k'} exactly (the constant
    // is the truncated sum), so the floors coincide structurally; a numeric
    // certified floor would sit on the boundary forever.
    struct Cand {
        Int k, m;
        bool exact_stage;
    };
    std::vector<Cand> feasible;
    for (const auto& st : out.gamma.pairs) {
        if (st.dropped) continue;
        out.trace_pairs.emplace_back(st.k_cum, st.m_cum);
        double kbits = mpz_get_d(st.k_cum.get_mpz_t()) *
                       std::log2(std::max(1.01, alpha.real_enclosure(-32).mid_double()));
        if (st.achieved_exact_zero || kbits < static_cast<double>(verify_bit_limit))
            feasible.push_back({st.k_cum, st.m_cum, st.achieved_exact_zero});
    }
    if (feasible.size() < 2)
        throw DepthInsufficient("fewer than two evaluable pairs");

    PrecisionPolicy pol = PrecisionPolicy::standard();
    pol = pol.with_cap(std::max<mpfr_prec_t>(pol.cap, 4 * verify_bit_limit));
    auto floor_alpha_pow = [&](const Int& k) {
        if (alpha.is_rational()) return floor_rat(pow_rat(*alpha.rational(), k.get_si()));
        RealFn f = [&](mpfr_prec_t pr) {
            return pow_int(alpha.real_enclosure(-static_cast<long>(pr) - 8), k, pr);
        };
        return certified_round(f, RoundMode::Floor, pol);
    };
    RealFn log_gamma = out.gamma.log_gamma;
    auto floor_gamma_beta_pow = [&](const Int& m) {
        RealFn f = [&](mpfr_prec_t pr) {
            // gamma beta^m = exp(log gamma + m log beta)
            RealEnclosure lb2 = RealInput::log_of(beta).fn(pr);
            RealEnclosure e = add(log_gamma(pr),
                                  mul(lb2, RealEnclosure::exact(m, pr), pr), pr);
            return exp_enc(e, pr);
        };
        return certified_round(f, RoundMode::Floor, pol);
    };

    std::optional<Int> u;
    std::vector<std::tuple<Int, Int, bool>> evals;  // k, m, diff-is-zero-exactly
    for (const auto& cand : feasible) {
        Int diff;
        if (cand.exact_stage) {
            diff = 0;  // same value, same floor
        } else {
            Int ak = floor_alpha_pow(cand.k);
            Int gb = floor_gamma_beta_pow(cand.m);
            diff = ak - gb;
        }
        if (!u) {
            u = diff;
        } else if (*u != diff) {
            throw DepthInsufficient("no constant offset across the constructed pairs");
        }
        evals.emplace_back(cand.k, cand.m, cand.exact_stage);
    }
    if (abs(*u) > 1)
        throw DepthInsufficient("offset escaped {-1, 0, 1}; constant C too weak");
    out.u = *u;

    // the b-sequence: floor of gamma beta^n + u
    out.b_spec.degree = 1;
    if (beta.is_rational())
        out.b_spec.coefficients = {Coef(-*beta.rational())};
    else
        out.b_spec.coefficients = {Coef(negate(beta))};
    out.b_spec.rule = RuleKind::Target;
    out.b_spec.rounding = TargetRounding::Floor;
    out.b_spec.offset = *u;
    out.b_spec.targets.push_back({gamma_expr, beta});

    // every evaluated pair is now an exact equality: b_m = [gamma beta^m] + u = a_k
    for (const auto& [k, m, exact_stage] : evals) {
        (void)exact_stage;
        out.verified.pairs.push_back({k, m});
    }
    sort_solutions(out.verified.pairs);

    // rational-line diagnosis over the trace pairs
    if (out.trace_pairs.size() >= 2) {
        std::vector<SolutionPair> tp;
        for (const auto& [k, m] : out.trace_pairs) tp.push_back({k, m});
        out.line = rational_line_fit(tp, 0);
    }
    return out;
}

/// Re-verifies one solution pair of a counterexample result exactly.
inline bool verify_counterexample_pair(const CounterexampleResult& ce, const Int& k,
                                       const Int& m,
                                       PrecisionPolicy pol = PrecisionPolicy::standard()) {
    // at the final cumulative pair gamma beta^m equals alpha^k exactly (the
    // constant is the truncated sum), so the floors agree iff the offset is 0
    if (!ce.gamma.shift.stages.empty()) {
        const auto& last = ce.gamma.shift.stages.back();
        if (last.k_cum == k && last.m_cum == m) return ce.u == 0;
    }
    pol = pol.with_cap(std::max<mpfr_prec_t>(pol.cap, 1 << 22));
    const AlgebraicNumber& alpha = ce.a_spec.targets[0].alpha;
    Int ak;
    if (alpha.is_rational()) {
        ak = floor_rat(pow_rat(*alpha.rational(), k.get_si()));
    } else {
        RealFn f = [&](mpfr_prec_t pr) {
            return pow_int(alpha.real_enclosure(-static_cast<long>(pr) - 8), k, pr);
        };
        ak = certified_round(f, RoundMode::Floor, pol);
    }
    const Expr& g = ce.b_spec.targets[0].gamma;
    const AlgebraicNumber& beta = ce.b_spec.targets[0].alpha;
    RealFn f = [&](mpfr_prec_t pr) {
        RealEnclosure bm = pow_int(beta.real_enclosure(-static_cast<long>(pr) - 8), m, pr);
        return add(mul(g.eval_real(pr), bm, pr),
                   RealEnclosure::exact(ce.b_spec.offset, pr), pr);
    };
    Int bm = certified_round(f, RoundMode::Floor, pol);
    return ak == bm;
}

}  // namespace nlrs
