#pragma once

#include <optional>
#include <tuple>
#include <vector>

#include "nlrs/binet.hpp"
#include "nlrs/contfrac.hpp"
#include "nlrs/expr.hpp"

namespace nlrs {

/// A real input that may carry an exact rational value alongside its
/// refinable form.
struct RealInput {
    RealFn fn;
    std::optional<Rat> exact;

    static RealInput from_rat(const Rat& q) {
        return {[q](mpfr_prec_t p) { return RealEnclosure::exact(q, p); }, q};
    }
    static RealInput from_expr(const Expr& e) {
        RealInput r;
        r.fn = e.real_refiner();
        if (auto x = e.eval_exact(); x && x->second == 0) r.exact = x->first;
        return r;
    }
    static RealInput log_of(const AlgebraicNumber& a) {
        if (a.rational() && *a.rational() == 1)
            return from_rat(Rat(0));
        RealFn f = [a](mpfr_prec_t p) {
            RealEnclosure m2 = abs2(a.enclosure(-static_cast<long>(p) - 8), p);
            return mul(log_enc(m2, p), RealEnclosure::exact(Rat(1, 2), p), p);
        };
        return {f, std::nullopt};
    }
};

/// One stage of a Diophantine construction with its verified inequality.
/// Magnitudes are carried in the natural-log domain so stages whose targets
/// underflow every floating-point range remain comparable.
struct DioStage {
    Int k, m;         // this stage's pair
    Int k_cum, m_cum; // cumulative pair (k'_n, m'_n)
    Rat log2_eps;     // chosen threshold: eps_n = 2^log2_eps (dyadic exponent)
    RealEnclosure log_target;            // ln of the stage inequality's right side
    std::optional<RealEnclosure> log_achieved;  // ln of the achieved left side
    bool achieved_exact_zero = false;    // left side is exactly zero (truncation)
    bool verified = false;
    bool dropped = false;  // failed the direct check and was excluded
};

struct ShiftConstruction {
    Rat C;
    std::vector<DioStage> stages;
    RealFn c_fn;               // the depth-truncated constant, refinable
    RealEnclosure c_value;     // evaluation at a default precision
    Rat tail_log2;             // log2 upper bound of the dropped infinite tail
};

// ---- continued fraction operation (certified; spec-level error contract) ----

struct ContinuedFractionResult {
    std::vector<Int> quotients;
    std::vector<std::pair<Int, Int>> convergents;
    bool exact = false;
};

inline ContinuedFractionResult continued_fraction_certified(const RealInput& x,
                                                            size_t max_terms,
                                                            const PrecisionPolicy& policy =
                                                                PrecisionPolicy::standard()) {
    if (x.exact) {
        CFResult r = continued_fraction(*x.exact, max_terms);
        return {r.quotients, r.convergents, r.exact};
    }
    CFResult r = continued_fraction(x.fn, max_terms, policy);
    if (r.ambiguous && r.quotients.size() < max_terms)
        throw AmbiguousRounding(
            "continued fraction could not be certified to the requested depth "
            "(the input may be rational)");
    return {r.quotients, r.convergents, false};
}

namespace detail_dio {

/// Dyadic midpoint of a refinable real at precision P.
inline Rat dyadic_midpoint(const RealFn& f, mpfr_prec_t P) {
    RealEnclosure v = f(P);
    return detail_roots::dyadic_of(v.mid().lo());
}

/// Finds a pair of positive integers (k, m) with 0 < a*k - b*m < 2^log2_bound,
/// guided by the continued fraction of a/b. Only certified inequalities are
/// accepted; candidates come from convergents of a dyadic approximation of
/// the ratio (their exact convergent-hood is irrelevant once certified).
inline std::optional<std::tuple<Int, Int, RealEnclosure>> find_positive_pair(
    const RealFn& a, const RealFn& b, long log2_bound, mpfr_prec_t verify_prec_hint) {
    for (int attempt = 0; attempt < 6; ++attempt) {
        mpfr_prec_t P = static_cast<mpfr_prec_t>(
            (-log2_bound) * 2 + 512 + (static_cast<mpfr_prec_t>(1) << attempt) * 256);
        RealFn ratio = [&](mpfr_prec_t p) { return div(a(p), b(p), p); };
        Rat r = dyadic_midpoint(ratio, P);
        if (r <= 0) return std::nullopt;
        Int u = Int(r.get_num()), v = Int(r.get_den());
        // Euclid walk with convergent tracking; only the last two convergents
        // are kept. Even-indexed convergents lie below the ratio, which gives
        // a*q - b*p > 0 (certified again before acceptance).
        Int pm1(1), qm1(0), pm2(0), qm2(1);  // p_{-1}/q_{-1}, p_{-2}/q_{-2}
        Int p_cur, q_cur;
        Int walk_u = u, walk_v = v;
        // convergents of the dyadic approximation track the true ratio only
        // while q^2 stays well under 2^P
        size_t q_bits_limit = static_cast<size_t>(std::max<long>(16, (P - 128) / 2));
        long idx = -1;
        while (walk_v != 0) {
            Int t, rem;
            mpz_fdiv_qr(t.get_mpz_t(), rem.get_mpz_t(), walk_u.get_mpz_t(), walk_v.get_mpz_t());
            walk_u = walk_v;
            walk_v = rem;
            p_cur = t * pm1 + pm2;
            q_cur = t * qm1 + qm2;
            pm2 = pm1;
            qm2 = qm1;
            pm1 = p_cur;
            qm1 = q_cur;
            ++idx;
            size_t qbits = mpz_sizeinbase(q_cur.get_mpz_t(), 2);
            if (qbits > q_bits_limit) break;
            if (idx % 2 != 0) continue;  // below-side convergents have even index
            if (p_cur <= 0 || q_cur <= 0) continue;
            // size screen: s ~ b / q_next <= b / q, so q must be within a few
            // dozen bits of 2^{-log2_bound} before certification can succeed
            if (static_cast<long>(qbits) < -log2_bound - 72) continue;
            mpfr_prec_t vp = static_cast<mpfr_prec_t>(
                std::max<long>(verify_prec_hint, static_cast<long>(qbits) - log2_bound + 128));
            RealEnclosure s = sub(mul(a(vp), RealEnclosure::exact(q_cur, vp), vp),
                                  mul(b(vp), RealEnclosure::exact(p_cur, vp), vp), vp);
            if (!s.is_positive()) continue;
            Rat bound = log2_bound >= 0 ? (Rat(Int(1) << static_cast<unsigned long>(log2_bound)))
                                        : Rat(1, Int(1) << static_cast<unsigned long>(-log2_bound));
            if (certainly_less(s, bound)) return std::make_tuple(q_cur, p_cur, s);
        }
    }
    return std::nullopt;
}

inline RealEnclosure log_of_pow(const Rat& base, const Int& exponent, mpfr_prec_t prec) {
    // ln(base^exponent) = exponent * ln base, with the exponent exact
    mpfr_prec_t p = std::max<mpfr_prec_t>(
        prec, static_cast<mpfr_prec_t>(mpz_sizeinbase(exponent.get_mpz_t(), 2) + 64));
    RealEnclosure lb = log_enc(RealEnclosure::exact(base, p), p);
    return mul(lb, RealEnclosure::exact(exponent, p), p);
}

}  // namespace detail_dio

/// The simultaneous affine approximation construction: builds stage pairs
/// (k_n, m_n) from continued-fraction convergents of a/b on the positive side
/// (so the constant comes out positive), with the threshold schedule
/// eps_{n+1} < min(eps_n / 2, (2C)^{-(k'_n + m'_n)}). Every retained
/// cumulative pair satisfies |a k' - b m' - c| < C^{-(k'+m')} for the
/// depth-truncated constant c, verified in enclosure arithmetic.
inline ShiftConstruction construct_shift(const RealInput& a, const RealInput& b, const Rat& C,
                                         int depth) {
    if (C <= 1) throw InvalidInput("need C > 1");
    if (depth < 1) throw InvalidInput("need depth >= 1");
    if (a.exact && b.exact) throw InvalidInput("a/b is rational");
    {
        // positivity screen
        RealEnclosure ea = a.fn(96), eb = b.fn(96);
        if (!ea.is_positive() || !eb.is_positive())
            throw InvalidInput("need a, b > 0");
    }

    ShiftConstruction out;
    out.C = C;
    Rat twoC = 2 * C;

    std::vector<std::pair<Int, Int>> stage_pairs;  // per-stage (k_n, m_n)
    Int kc(0), mc(0);
    Rat log2_eps_prev(0);

    for (int n = 1; n <= depth; ++n) {
        long bound_log2;
        Rat log2_eps;
        if (n == 1) {
            bound_log2 = -1;  // |s_1| < 1/2 < eps_1 < 1
            log2_eps = Rat(-1, 2);
        } else {
            // log2 eps_n = min(log2 eps_{n-1} - 1, -(kc+mc) log2(2C)) - margin
            double l2twoC = std::log2(twoC.get_d());
            Rat sum_km = Rat(kc + mc);
            Rat cand = -sum_km * Rat(static_cast<long>(std::ceil(l2twoC * 4096)), 4096);
            Rat other = log2_eps_prev - 1;
            log2_eps = (cand < other ? cand : other) - Rat(1, 16);
            if (log2_eps < Rat(-(1L << 24)))
                throw SearchBudgetExceeded(
                    "stage threshold requires integers beyond practical size");
            bound_log2 = floor_rat(log2_eps).get_si();
        }
        auto pair = detail_dio::find_positive_pair(a.fn, b.fn, bound_log2, 256);
        if (!pair) {
            // a stalled pair search at tiny thresholds is the typical
            // signature of a rational ratio
            throw InvalidInput("pair search failed: a/b may be rational");
        }
        auto [q, p, s_enc] = *pair;
        (void)s_enc;
        stage_pairs.emplace_back(q, p);
        kc += q;
        mc += p;
        DioStage st;
        st.k = q;
        st.m = p;
        st.k_cum = kc;
        st.m_cum = mc;
        st.log2_eps = log2_eps;
        out.stages.push_back(std::move(st));
        log2_eps_prev = log2_eps;
    }

    // truncated constant c = sum of stage terms, refinable with internal
    // precision lifted by the pair sizes (the products cancel massively)
    size_t max_bits = 0;
    for (auto& [q, p] : stage_pairs) {
        max_bits = std::max(max_bits, mpz_sizeinbase(q.get_mpz_t(), 2));
        max_bits = std::max(max_bits, mpz_sizeinbase(p.get_mpz_t(), 2));
    }
    auto pairs_copy = stage_pairs;
    RealFn afn = a.fn, bfn = b.fn;
    out.c_fn = [pairs_copy, afn, bfn, max_bits](mpfr_prec_t prec) {
        mpfr_prec_t p = prec + static_cast<mpfr_prec_t>(max_bits) + 64;
        RealEnclosure acc = RealEnclosure::exact(Rat(0), p);
        RealEnclosure av = afn(p), bv = bfn(p);
        for (const auto& [q, pp] : pairs_copy) {
            RealEnclosure s = sub(mul(av, RealEnclosure::exact(q, p), p),
                                  mul(bv, RealEnclosure::exact(pp, p), p), p);
            acc = add(acc, s, p);
        }
        return acc;
    };
    out.c_value = out.c_fn(256);
    // tail of the infinite series: bounded by 2 eps_{depth+1} <= eps_depth
    out.tail_log2 = out.stages.back().log2_eps;

    // verification: residual at stage n is sum_{l>n} s_l (exactly zero at the
    // final stage); target C^{-(k'+m')} compared in the log domain. The
    // working precision must absorb both the pair sizes and the smallest
    // stage term, which cancel against each other.
    long eps_bits = -floor_rat(out.stages.back().log2_eps).get_si();
    if (eps_bits < 0) eps_bits = 0;
    mpfr_prec_t vp = static_cast<mpfr_prec_t>(max_bits + eps_bits + 768);
    RealEnclosure av = a.fn(vp), bv = b.fn(vp);
    std::vector<RealEnclosure> svals;
    for (const auto& [q, p] : stage_pairs)
        svals.push_back(sub(mul(av, RealEnclosure::exact(q, vp), vp),
                            mul(bv, RealEnclosure::exact(p, vp), vp), vp));
    for (int n = 0; n < depth; ++n) {
        DioStage& st = out.stages[n];
        st.log_target =
            neg(detail_dio::log_of_pow(C, st.k_cum + st.m_cum, 256));
        if (n == depth - 1) {
            st.achieved_exact_zero = true;
            st.verified = true;
            continue;
        }
        RealEnclosure res = RealEnclosure::exact(Rat(0), vp);
        for (int l = n + 1; l < depth; ++l) res = add(res, svals[l], vp);
        if (!res.is_positive()) {
            st.verified = false;
            continue;
        }
        st.log_achieved = log_enc(res, 256);
        st.verified = certainly_less(*st.log_achieved, st.log_target);
    }
    for (const auto& st : out.stages)
        if (!st.verified)
            throw PrecisionCapExceeded("shift construction stage failed verification");
    return out;
}

/// The multiplicative construction: gamma > 1 with |alpha^k - gamma beta^m|
/// < C^{-(k+m)} along the cumulative pairs, obtained by running the shift
/// construction on (log alpha, log beta) at the amplified constant 2*beta*C.
/// Each pair is re-verified directly against the target inequality; early
/// pairs that fail the amplified-chain slack are dropped and flagged.
struct GammaConstruction {
    Rat C;
    ShiftConstruction shift;
    RealFn log_gamma;  // = the truncated shift constant
    RealEnclosure gamma_value;
    std::vector<DioStage> pairs;  // re-verified against the direct inequality
};

inline GammaConstruction construct_gamma(const AlgebraicNumber& alpha,
                                         const AlgebraicNumber& beta, const Rat& C, int depth,
                                         unsigned long indep_bound = 64) {
    if (C <= 1) throw InvalidInput("need C > 1");
    {
        RealEnclosure ea = alpha.real_enclosure(-64), eb = beta.real_enclosure(-64);
        if (!certainly_greater(ea, Rat(1)) || !certainly_greater(eb, Rat(1)))
            throw InvalidInput("need alpha, beta > 1");
    }
    if (auto rel = multiplicative_independence(alpha, beta, indep_bound))
        throw DependentBases("alpha^" + rel->u.get_str() + " * beta^" + rel->v.get_str() +
                             " = 1");

    // amplified constant 2*beta*C (any rational upper bound of beta works)
    Rat beta_up = detail_roots::dyadic_of(beta.real_enclosure(-64).hi());
    Rat amplified = 2 * beta_up * C;

    GammaConstruction out;
    out.C = C;
    out.shift = construct_shift(RealInput::log_of(alpha), RealInput::log_of(beta), amplified,
                                depth);
    out.log_gamma = out.shift.c_fn;
    RealFn lg = out.log_gamma;
    out.gamma_value = exp_enc(lg(256), 256);

    // direct verification: |alpha^k - gamma beta^m| = gamma beta^m |e^R - 1|
    // with R = a k' - b m' - c = -(sum of the dropped stage terms) <= 0; in
    // logs, |e^R - 1| <= |R| e^{max(R,0)} gives
    //   ln(lhs) <= ln gamma + m' ln beta + ln|R| + max(R_hi, 0).
    mpfr_prec_t vp = 512;
    long eps_bits = -floor_rat(out.shift.stages.back().log2_eps).get_si();
    if (eps_bits < 0) eps_bits = 0;
    for (size_t i = 0; i < out.shift.stages.size(); ++i)
        vp = std::max(vp, static_cast<mpfr_prec_t>(
                              mpz_sizeinbase(out.shift.stages[i].k_cum.get_mpz_t(), 2) +
                              eps_bits + 768));
    RealEnclosure la = RealInput::log_of(alpha).fn(vp);
    RealEnclosure lb = RealInput::log_of(beta).fn(vp);
    RealEnclosure c = out.shift.c_fn(vp);
    for (const auto& st : out.shift.stages) {
        DioStage d = st;
        d.log_target = neg(detail_dio::log_of_pow(C, st.k_cum + st.m_cum, 256));
        RealEnclosure R = sub(sub(mul(la, RealEnclosure::exact(st.k_cum, vp), vp),
                                  mul(lb, RealEnclosure::exact(st.m_cum, vp), vp), vp),
                              c, vp);
        RealEnclosure absR = abs_enc(R);
        if (d.achieved_exact_zero) {
            // final-stage residual is structurally zero: lhs is exactly 0
            d.verified = true;
        } else if (absR.is_positive()) {
            RealEnclosure lnR = log_enc(absR, 256);
            RealEnclosure lhs_log =
                add(add(lg(256), mul(lb, RealEnclosure::exact(st.m_cum, vp), vp), 256), lnR,
                    256);
            if (mpfr_sgn(R.hi()) > 0)
                lhs_log = add(lhs_log, RealEnclosure::from_mpfr(R.hi(), R.hi(), 256), 256);
            d.log_achieved = lhs_log;
            d.verified = certainly_less(lhs_log, d.log_target);
            d.dropped = !d.verified;
        } else {
            d.verified = false;
            d.dropped = true;
        }
        out.pairs.push_back(std::move(d));
    }
    return out;
}

/// Smallest n >= 1 with |eta_j^n - 1| < d for all j, certified. A single base
/// is resolved through best approximations of its rotation number (the
/// returned n is provably minimal); several bases fall back to a linear scan
/// within the step budget.
inline Int near_identity_search(const std::vector<ComplexFn>& etas, const Rat& d,
                                const Int& budget = Int(10000000)) {
    if (etas.empty()) throw InvalidInput("need at least one base");
    if (d <= 0 || d >= 2) throw InvalidInput("need 0 < d < 2");
    mpfr_prec_t prec = 192;

    auto certified_below = [&](const ComplexEnclosure& z, const Rat& bound,
                               mpfr_prec_t p) -> std::optional<bool> {
        ComplexEnclosure dm1 = sub(z, ComplexEnclosure::exact(Rat(1), Rat(0), p), p);
        RealEnclosure m2 = abs2(dm1, p);
        if (certainly_less(m2, bound * bound)) return true;
        if (certainly_greater(m2, bound * bound)) return false;
        return std::nullopt;
    };

    // linear prescan: catches small answers exactly (including roots of
    // unity, whose rotation numbers are rational and stall the convergent
    // walk below)
    {
        std::vector<PowerWalker> pw;
        for (const auto& e : etas) pw.emplace_back(e(prec), 1, prec);
        Int scan_to = budget < Int(4096) ? budget : Int(4096);
        for (Int n(1); n <= scan_to; ++n) {
            bool all = true;
            for (size_t j = 0; j < pw.size() && all; ++j) {
                auto r = certified_below(pw[j].value(), d, prec);
                if (!r.has_value()) {
                    mpfr_prec_t p2 = prec * 4;
                    ComplexEnclosure z = pow_int(etas[j](p2), n, p2);
                    r = certified_below(z, d, p2);
                }
                all = r.has_value() && *r;
            }
            if (all) return n;
            for (auto& w : pw) w.advance();
        }
        if (budget <= Int(4096))
            throw SearchBudgetExceeded("no index within the budget satisfies the bound");
    }

    if (etas.size() == 1) {
        const ComplexFn& eta = etas[0];
        // rotation number theta = arg(eta) / (2 pi)
        RealFn theta = [&](mpfr_prec_t p) {
            RealEnclosure t = arg_enclosure(eta(p), p);
            return div(t, mul_2si(RealEnclosure::pi(p), 1), p);
        };
        // walk convergent denominators of theta in ascending order; the first
        // denominator that certifies the test is the minimal n overall
        size_t terms = 8;
        std::vector<Int> seen;
        for (;;) {
            CFResult cf = continued_fraction(theta, terms, PrecisionPolicy{256, 1L << 22});
            for (const auto& [p_, q_] : cf.convergents) {
                if (q_ <= 0) continue;
                bool already = false;
                for (const auto& s : seen)
                    if (s == q_) already = true;
                if (already) continue;
                seen.push_back(q_);
                // the budget caps linear-scan steps; the best-approximation
                // walk is bounded by the candidate-size guard instead
                if (mpz_sizeinbase(q_.get_mpz_t(), 2) > (1u << 22))
                    throw SearchBudgetExceeded("candidate index beyond representable range");
                for (mpfr_prec_t p = prec;; p *= 2) {
                    ComplexEnclosure z = pow_int(eta(p), q_, p);
                    auto r = certified_below(z, d, p);
                    if (r.has_value()) {
                        if (*r) return q_;
                        break;
                    }
                    if (p > (1L << 20))
                        throw PrecisionCapExceeded("near-identity test undecided");
                }
            }
            if (cf.ambiguous)
                throw PrecisionCapExceeded(
                    "rotation number continued fraction stalled (root of unity?)");
            terms *= 2;
            if (terms > (1u << 20)) throw SearchBudgetExceeded("no denominator certified");
        }
    }

    // multi-base: continue the linear scan past the prescan window
    std::vector<PowerWalker> pw;
    for (const auto& e : etas) pw.emplace_back(e(prec), 4097, prec);
    for (Int n(4097); n <= budget; ++n) {
        bool all = true;
        for (size_t j = 0; j < pw.size() && all; ++j) {
            auto r = certified_below(pw[j].value(), d, prec);
            if (!r.has_value()) {
                mpfr_prec_t p2 = prec * 4;
                ComplexEnclosure z = pow_int(etas[j](p2), n, p2);
                r = certified_below(z, d, p2);
            }
            all = r.has_value() && *r;
        }
        if (all) return n;
        for (auto& w : pw) w.advance();
    }
    throw SearchBudgetExceeded("no index within the budget satisfies the bound");
}

/// Stage record of the fluctuating-tail construction.
struct FluctStage {
    Int n;                      // the index n_k
    Rat log2_threshold;         // threshold used for the near-identity step
    RealEnclosure log_target;   // ln d2^{-n_k}
    std::optional<RealEnclosure> log_achieved;
    bool achieved_exact_zero = false;
    bool verified = false;
};

struct FluctuatingTail {
    Rat d2;
    std::vector<FluctStage> stages;
    ComplexFn gamma_r;  // the constructed trailing coefficient (truncated)
    ComplexEnclosure gamma_value;
    Rat tail_log2;  // log2 bound of the dropped infinite tail
};

/// Builds gamma_r with |gamma_1 eta_1^n + ... + gamma_r eta_r^n| < d2^{-n}
/// along constructed indices n_1 < n_2 < ... (the last coefficient's base
/// eta_r enters with coefficient gamma_r = -u_{n_depth}, the truncation of
/// the telescoping series). Quotient bases eta_j / eta_r must not all be
/// roots of unity.
inline FluctuatingTail construct_fluctuating_tail(const std::vector<AlgebraicNumber>& etas,
                                                  const std::vector<ComplexFn>& gammas,
                                                  const Rat& d2, int depth,
                                                  const Int& budget = Int(10000000)) {
    size_t r = etas.size();
    if (r < 2) throw InvalidInput("need r >= 2 bases");
    if (gammas.size() != r - 1) throw InvalidInput("need r - 1 leading coefficients");
    if (d2 <= 1) throw InvalidInput("need d2 > 1");
    if (depth < 1) throw InvalidInput("need depth >= 1");
    for (const auto& e : etas)
        if (decide_modulus_vs_one(e.root()) != ModClass::Equal1)
            throw InvalidInput("all bases must lie on the unit circle");

    // quotients eta_j / eta_r; on the circle 1/eta_r = conj(eta_r)
    const AlgebraicNumber& er = etas[r - 1];
    std::vector<ComplexFn> quot;
    for (size_t j = 0; j + 1 < r; ++j) {
        const AlgebraicNumber& ej = etas[j];
        quot.push_back([ej, er](mpfr_prec_t p) {
            long t = -static_cast<long>(p) - 8;
            return mul(ej.enclosure(t), er.enclosure(t).conj(), p);
        });
    }
    // precondition: some quotient is not a root of unity, i.e. some
    // eta_j^s != eta_r^s for every s up to a small order bound
    {
        bool some_non_rou = false;
        unsigned long order_bound = 64;
        for (size_t j = 0; j + 1 < r && !some_non_rou; ++j) {
            bool is_rou = false;
            for (unsigned long s = 1; s <= order_bound && !is_rou; ++s)
                if (detail_alg::power_equal(etas[j], Int(s), er, Int(s))) is_rou = true;
            if (!is_rou) some_non_rou = true;
        }
        if (!some_non_rou) throw AllRootsOfUnity();
    }

    mpfr_prec_t prec = 256;
    std::vector<ComplexFn> gammas_copy = gammas;
    size_t r_copy = r;
    auto u_at = [quot, gammas_copy, r_copy](const Int& n, mpfr_prec_t p) {
        ComplexEnclosure acc = ComplexEnclosure::exact(Rat(0), Rat(0), p);
        for (size_t j = 0; j + 1 < r_copy; ++j)
            acc = add(acc, mul(gammas_copy[j](p), pow_int(quot[j](p), n, p), p), p);
        return acc;
    };

    // B > max |gamma_j|
    Rat B(0);
    for (const auto& g : gammas) {
        Rat up = detail_binet::abs_upper(g(128), 128);
        if (up > B) B = up;
    }
    B += 1;

    FluctuatingTail out;
    out.d2 = d2;
    std::vector<Int> idx{Int(1)};
    double l2_2d2 = std::log2(2 * d2.get_d());
    for (int k = 1; k < depth; ++k) {
        // threshold (2 d2)^{-n_k} / (r B)
        const Int& nk = idx.back();
        if (mpz_sizeinbase(nk.get_mpz_t(), 2) > 40)
            throw SearchBudgetExceeded("stage index too large for the threshold arithmetic");
        Rat log2_thr = -Rat(nk) * Rat(static_cast<long>(std::ceil(l2_2d2 * 4096)), 4096) -
                       Rat(static_cast<long>(std::ceil(
                               std::log2(static_cast<double>(r) * B.get_d()) * 16)),
                           16) -
                       Rat(1, 16);
        if (log2_thr < Rat(-(1L << 24)))
            throw SearchBudgetExceeded("threshold beyond representable range");
        // dyadic threshold value
        long e2 = floor_rat(log2_thr).get_si();
        Rat thr = Rat(1, Int(1) << static_cast<unsigned long>(-e2));
        Int step = near_identity_search(quot, thr, budget);
        idx.push_back(nk + step);
        FluctStage st;
        st.n = idx.back();
        st.log2_threshold = log2_thr;
        out.stages.push_back(std::move(st));
    }
    // stage record for n_1 at the front
    {
        FluctStage first;
        first.n = Int(1);
        first.log2_threshold = Rat(0);
        out.stages.insert(out.stages.begin(), std::move(first));
    }

    Int n_last = idx.back();
    ComplexFn gamma_r = [u_at, n_last](mpfr_prec_t p) { return neg(u_at(n_last, p)); };
    out.gamma_r = gamma_r;
    out.gamma_value = gamma_r(prec);
    // infinite tail bound: sum_{k >= depth} (2 d2)^{-n_k} <= 2 (2d2)^{-n_depth}
    {
        double l2 = std::log2(2 * d2.get_d());
        double e = -l2 * std::min(1e15, mpz_get_d(n_last.get_mpz_t())) + 1;
        out.tail_log2 = Rat(static_cast<long>(std::max(-1e9, e)));
    }

    // verification: |u_{n_l} + gamma_r| < d2^{-n_l}; the last stage is exact
    for (size_t l = 0; l < idx.size(); ++l) {
        FluctStage& st = out.stages[l];
        st.log_target = neg(detail_dio::log_of_pow(d2, idx[l], 256));
        if (l + 1 == idx.size()) {
            st.achieved_exact_zero = true;
            st.verified = true;
            continue;
        }
        mpfr_prec_t p = prec;
        for (;; p *= 2) {
            ComplexEnclosure diff = sub(u_at(idx[l], p), u_at(n_last, p), p);
            RealEnclosure m2 = abs2(diff, p);
            if (m2.is_positive()) {
                RealEnclosure lg = mul(log_enc(m2, 256), RealEnclosure::exact(Rat(1, 2), 256),
                                       256);
                st.log_achieved = lg;
                st.verified = certainly_less(lg, st.log_target);
                break;
            }
            // diff straddling zero: widen precision, or accept if the whole
            // box is already far below the target
            RealEnclosure up = RealEnclosure::from_mpfr(m2.hi(), m2.hi(), 256);
            if (up.is_positive()) {
                RealEnclosure lg = mul(log_enc(up, 256), RealEnclosure::exact(Rat(1, 2), 256),
                                       256);
                if (certainly_less(lg, st.log_target)) {
                    st.log_achieved = lg;
                    st.verified = true;
                    break;
                }
            }
            if (p > (1L << 20))
                throw PrecisionCapExceeded("fluctuating-tail verification stalled");
        }
    }
    for (const auto& st : out.stages)
        if (!st.verified) throw PrecisionCapExceeded("fluctuating-tail stage failed");
    return out;
}

/// Result of the zero-rich sequence factory.
struct ZeroRichResult {
    NlrsSpec spec;
    FluctuatingTail tail;
    std::vector<Int> zero_indices;   // certified a_{n_k} = 0
    std::vector<bool> zero_exact;    // true when the cancellation is structural
    GeneratedSequence covered;       // generated prefix
    Rat max_abs;                     // max |a_n| over the covered range
};

/// Builds an integer nlrs with certified zeros at the constructed indices:
/// bases rho*eta, rho*conj(eta), coefficients (1, gamma_r), nearest rounding
/// of the real part. The quotient eta/conj(eta) = eta^2 must not be a root of
/// unity.
inline ZeroRichResult build_zero_rich(const Rat& rho, const AlgebraicNumber& eta, const Rat& C,
                                      int depth, size_t covered_range = 0,
                                      const Int& budget = Int(10000000)) {
    if (rho <= 1) throw InvalidInput("need rho > 1");
    if (C <= 1) throw InvalidInput("need C > 1");
    if (eta.is_real()) throw InvalidInput("need a non-real unit-circle base");
    if (decide_modulus_vs_one(eta.root()) != ModClass::Equal1)
        throw InvalidInput("base must lie on the unit circle");
    if (eta.degree() != 2)
        throw InvalidInput("unit-circle bases of degree > 2 are not supported here");

    // conjugate pair
    AlgebraicNumber etabar = AlgebraicNumber::from_minpoly(eta.minpoly(),
                                                           eta.enclosure(-64).conj());
    std::vector<AlgebraicNumber> bases{eta, etabar};
    std::vector<ComplexFn> gam1{[](mpfr_prec_t p) {
        return ComplexEnclosure::exact(Rat(1), Rat(0), p);
    }};
    Rat d2 = rho * C;
    FluctuatingTail tail = construct_fluctuating_tail(bases, gam1, d2, depth, budget);

    // alternate branch: if gamma_2 = -conj(gamma_1) = -1 the real part
    // vanishes identically and the imaginary part (halved) is used instead
    bool alternate = false;
    {
        ComplexEnclosure probe = add(tail.gamma_value,
                                     ComplexEnclosure::exact(Rat(1), Rat(0), 256), 256);
        if (!probe.re.excludes_zero() && !probe.im.excludes_zero()) {
            ComplexEnclosure sharp = add(tail.gamma_r(1024),
                                         ComplexEnclosure::exact(Rat(1), Rat(0), 1024), 1024);
            if (!sharp.re.excludes_zero() && !sharp.im.excludes_zero()) alternate = true;
        }
    }

    // spec: coefficients of (x - rho eta)(x - rho etabar) = x^2 - rho(eta +
    // etabar) x + rho^2 (rational since eta has degree 2 and etabar = 1/eta)
    const ZPoly& mp = eta.minpoly();
    Rat trace_eta = Rat(-mp[1]) / Rat(mp[2]);  // eta + etabar
    trace_eta.canonicalize();
    NlrsSpec spec;
    spec.degree = 2;
    spec.coefficients = {Coef(rho * rho), Coef(-rho * trace_eta)};  // A_0, A_1
    spec.rule = RuleKind::Target;
    spec.rounding = TargetRounding::NearestHalfUp;

    // gamma_2 = -u_{n_depth} = -(eta / etabar)^{n_depth} = -eta^{2 n_depth}
    // as a serializable, refinable expression; the alternate branch rescales
    // both coefficients by 1/(2i) = -i/2, an exact complex rational
    Int n_last_idx = tail.stages.back().n;
    Expr eta_expr = Expr::algebraic(eta);
    Expr quot_expr = eta_expr * Expr::conj(Expr::algebraic(etabar));
    Expr g1_expr = Expr::constant(Rat(1));
    Expr g2_expr = -Expr::pow(quot_expr, n_last_idx);
    if (alternate) {
        Expr scale = Expr::constant(Rat(0), Rat(-1, 2));
        g1_expr = g1_expr * scale;
        g2_expr = g2_expr * scale;
    }
    AlgebraicNumber alpha1 = AlgebraicNumber::from_minpoly(
        primitive_part(QPoly(std::vector<Rat>{rho * rho, -rho * trace_eta, Rat(1)})),
        mul_real(eta.enclosure(-64), RealEnclosure::exact(rho, 128), 128));
    AlgebraicNumber alpha2 = AlgebraicNumber::from_minpoly(
        alpha1.minpoly(), alpha1.enclosure(-64).conj());
    spec.targets.push_back({g1_expr, alpha1});
    spec.targets.push_back({g2_expr, alpha2});

    ZeroRichResult out;
    out.spec = spec;
    out.tail = tail;

    // certified zeros: |t_{n_l}| < 1/2 via the stage bounds; the last stage
    // cancels exactly
    for (size_t l = 0; l < tail.stages.size(); ++l) {
        const FluctStage& st = tail.stages[l];
        bool exact = st.achieved_exact_zero;
        bool ok = exact;
        if (!exact && st.log_achieved) {
            // |t_n| <= rho^n |u_n + gamma_r|: ln bound = n ln rho + achieved
            RealEnclosure lt = add(detail_dio::log_of_pow(rho, st.n, 256), *st.log_achieved,
                                   256);
            RealEnclosure lhalf = log_enc(RealEnclosure::exact(Rat(1, 2), 256), 256);
            ok = certainly_less(lt, lhalf);
        }
        if (ok) {
            out.zero_indices.push_back(st.n);
            out.zero_exact.push_back(exact);
        }
    }

    // covered range generation
    size_t Ncov = covered_range;
    if (Ncov == 0) {
        Ncov = 200;
        if (tail.stages.size() >= 2 && mpz_fits_ulong_p(tail.stages[1].n.get_mpz_t()))
            Ncov = std::max<size_t>(Ncov, 2 * tail.stages[1].n.get_ui() + 8);
    }
    out.covered = generate(spec, Ncov);
    out.max_abs = Rat(0);
    for (const auto& v : out.covered.values) {
        Rat a = abs_rat(v);
        if (a > out.max_abs) out.max_abs = a;
    }
    return out;
}

}  // namespace nlrs
