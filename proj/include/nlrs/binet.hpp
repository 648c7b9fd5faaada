#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlrs/sequences.hpp"

namespace nlrs {

/// Negation of an algebraic number: minimal polynomial reflected through
/// x -> -x, enclosure negated.
inline AlgebraicNumber negate(const AlgebraicNumber& a) {
    if (a.is_rational()) return AlgebraicNumber::from_rational(-*a.rational());
    QPoly f = a.monic_minpoly();
    long d = f.degree();
    std::vector<Rat> r(f.c);
    for (long i = 0; i <= d; ++i)
        if ((d - i) % 2 != 0) r[i] = -r[i];
    QPoly g = QPoly(std::move(r)).monic();
    return AlgebraicNumber::from_minpoly(primitive_part(g), neg(a.enclosure(-64)));
}

/// Solves the d x d Vandermonde system sum_i g_i alpha_i^n = a_n
/// (n = 0..d-1) in enclosure arithmetic, refining until every coefficient has
/// radius at most 2^target_log2.
inline std::vector<ComplexEnclosure> binet_coefficients(const std::vector<RootHandle>& roots,
                                                        const std::vector<Rat>& initial,
                                                        long target_log2 = -64) {
    size_t d = roots.size();
    if (initial.size() != d) throw LengthMismatch("initial terms must match the root count");

    for (long t = target_log2 - 16;; t *= 2) {
        mpfr_prec_t p = static_cast<mpfr_prec_t>(-t + 64);
        // build augmented matrix [V | a]
        std::vector<std::vector<ComplexEnclosure>> m(
            d, std::vector<ComplexEnclosure>(d + 1, ComplexEnclosure(p)));
        for (size_t n = 0; n < d; ++n) {
            for (size_t i = 0; i < d; ++i)
                m[n][i] = pow_int(roots[i].enclosure(t), Int(static_cast<long>(n)), p);
            m[n][d] = ComplexEnclosure::exact(initial[n], Rat(0), p);
        }
        bool singular = false;
        for (size_t col = 0; col < d && !singular; ++col) {
            // pivot: the row whose entry is farthest from zero} (midpoint)
            size_t piv = col;
            double best = -1;
            for (size_t r = col; r < d; ++r) {
                double v = std::abs(m[r][col].re.mid_double()) +
                           std::abs(m[r][col].im.mid_double());
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            std::swap(m[col], m[piv]);
            if (!abs2(m[col][col], p).is_positive()) {
                singular = true;
                break;
            }
            for (size_t r = col + 1; r < d; ++r) {
                ComplexEnclosure f = div(m[r][col], m[col][col], p);
                for (size_t c2 = col; c2 <= d; ++c2)
                    m[r][c2] = sub(m[r][c2], mul(f, m[col][c2], p), p);
            }
        }
        if (!singular) {
            std::vector<ComplexEnclosure> g(d, ComplexEnclosure(p));
            bool wide = false;
            for (size_t r = d; r-- > 0;) {
                ComplexEnclosure acc = m[r][d];
                for (size_t c2 = r + 1; c2 < d; ++c2)
                    acc = sub(acc, mul(m[r][c2], g[c2], p), p);
                g[r] = div(acc, m[r][r], p);
                if (!g[r].width_below(target_log2)) wide = true;
            }
            if (!wide) {
                // permutation was applied to rows (equations), not columns, so
                // g is already in root order
                return g;
            }
        }
        if (t < -(1L << 20))
            throw IllConditioned("Vandermonde solve did not converge to the target width");
    }
}

/// Partial sum of the correction series c(alpha) = sum_{j>=1} e_{d+j-1}
/// alpha^{-j}, widened by the rigorous tail E |alpha|^{-N} / (|alpha| - 1).
struct CSeriesResult {
    ComplexEnclosure value;
    Rat tail_upper;  // dyadic upper bound of the tail radius actually added
    size_t terms = 0;
};

inline CSeriesResult c_enclosure(const ComplexFn& alpha,
                                 const std::function<RealEnclosure(size_t, mpfr_prec_t)>& err,
                                 size_t terms, const Rat& error_bound, mpfr_prec_t prec) {
    ComplexEnclosure a = alpha(prec);
    RealEnclosure mod = sqrt_enc(abs2(a, prec), prec);
    if (!certainly_greater(mod, Rat(1))) throw ModulusNotAboveOne();
    ComplexEnclosure inv = div(ComplexEnclosure::exact(Rat(1), Rat(0), prec), a, prec);
    ComplexEnclosure acc = ComplexEnclosure::exact(Rat(0), Rat(0), prec);
    ComplexEnclosure w = ComplexEnclosure::exact(Rat(1), Rat(0), prec);
    for (size_t j = 1; j <= terms; ++j) {
        w = mul(w, inv, prec);
        RealEnclosure e = err(j, prec);  // e_{d+j-1}
        acc = add(acc, mul_real(w, e, prec), prec);
    }
    // tail: E * |alpha|^{-terms} / (|alpha| - 1), evaluated with outward bounds
    RealEnclosure En = RealEnclosure::exact(error_bound, prec);
    RealEnclosure modpow = pow_ui(mod, terms, prec);
    RealEnclosure tail = div(div(En, modpow, prec),
                             sub(mod, RealEnclosure::exact(Rat(1), prec), prec), prec);
    CSeriesResult out;
    out.terms = terms;
    out.tail_upper = detail_roots::dyadic_of(tail.hi());
    if (out.tail_upper < 0) out.tail_upper = Rat(0);
    out.value = widen(acc, tail);
    return out;
}

/// Exact-error convenience overload.
inline CSeriesResult c_enclosure(const ComplexFn& alpha, const std::vector<Rat>& errors_from_d,
                                 const Rat& error_bound, mpfr_prec_t prec) {
    return c_enclosure(
        alpha,
        [&](size_t j, mpfr_prec_t p) {
            return RealEnclosure::exact(errors_from_d[j - 1], p);
        },
        errors_from_d.size(), error_bound, prec);
}

struct RootReportEntry {
    RootHandle root;
    ModClass mod_class = ModClass::Greater1;
    ComplexEnclosure g_hat, g_tilde;
    std::optional<ComplexEnclosure> c_alpha;
    std::optional<ComplexEnclosure> beta;
    bool beta_nonzero = false;
    Rat c_tail_upper = Rat(0);
};

struct ResidualStats {
    // max |a_n - sum beta_i alpha_i^n| per dyadic window [2^k, 2^{k+1})
    std::vector<std::pair<size_t, Rat>> window_max;
    Rat max_residual;                   // upper bound over all sampled n
    Rat bound_const, bound_linear;      // derived bound: |res_n| <= const + linear*n
    std::string growth_class;           // "bounded" | "linear" | "other"
    std::vector<std::pair<size_t, Rat>> divergence_trace;  // lower bounds of |a_n - atilde_n|
    size_t exceedance_count = 0;        // sampled n with |res_n| certainly > threshold
    Rat exceedance_threshold = Rat(0);
};

struct BinetReport {
    long degree = 0;
    int r1 = 0, r2 = 0;
    std::vector<RootReportEntry> entries;  // sorted by descending modulus
    ResidualStats residuals;
};

namespace detail_binet {

/// Root handles of the spec's characteristic polynomial x^d + A_{d-1}x^{d-1}
/// + ... + A_0, sorted by descending modulus with their circle classes.
inline std::vector<std::pair<RootHandle, ModClass>> charpoly_roots(const NlrsSpec& spec) {
    std::vector<std::pair<RootHandle, ModClass>> out;
    if (spec.all_rational_coefficients()) {
        std::vector<Rat> c;
        for (const auto& co : spec.coefficients) c.push_back(coef_rational(co));
        c.push_back(Rat(1));
        CharPoly cp = classify_roots(QPoly(std::move(c)));
        if (!cp.separable) throw InseparableInput();
        for (auto& rec : cp.roots) out.emplace_back(rec.root, rec.mod_class);
        return out;
    }
    if (spec.degree == 1) {
        // root is -A_0, an algebraic number
        AlgebraicNumber a = negate(std::get<AlgebraicNumber>(spec.coefficients[0]));
        ModClass mc = decide_modulus_vs_one(a.root());
        out.emplace_back(a.root(), mc);
        return out;
    }
    throw InvalidSpec("algebraic coefficients are supported only for degree 1");
}

inline Rat upper_of(const RealEnclosure& e) { return detail_roots::dyadic_of(abs_enc(e).hi()); }

inline Rat abs_upper(const ComplexEnclosure& e, mpfr_prec_t p) {
    return detail_roots::dyadic_of(sqrt_enc(abs2(e, p), p).hi());
}
inline Rat abs_lower(const ComplexEnclosure& e, mpfr_prec_t p) {
    Rat lo = detail_roots::dyadic_of(sqrt_enc(abs2(e, p), p).lo());
    return lo < 0 ? Rat(0) : lo;
}

}  // namespace detail_binet

/// Computes the full asymptotic report: Binet coefficients of both companion
/// recurrences, correction-series values, the asymptotic coefficients
/// beta_i = g~_i + g^_i c(alpha_i) for every root outside the unit circle,
/// and residual/divergence diagnostics against the generated terms.
inline BinetReport asymptotic_coefficients(const NlrsSpec& spec, const GeneratedSequence& seq,
                                           long coeff_target_log2 = -64,
                                           const Rat& exceedance_threshold = Rat(1, 2),
                                           size_t scan_limit = SIZE_MAX) {
    long d = spec.degree;
    auto roots = detail_binet::charpoly_roots(spec);
    BinetReport rep;
    rep.degree = d;

    std::vector<RootHandle> handles;
    for (auto& [h, mc] : roots) {
        handles.push_back(h);
        if (mc == ModClass::Greater1) ++rep.r1;
        if (mc == ModClass::Equal1) ++rep.r2;
        if (mc == ModClass::Less1)
            throw InvalidSpec("characteristic polynomial has a root inside the unit disk");
    }

    // the residual scan multiplies the beta enclosures by alpha^n, so their
    // width must undercut alpha^{-scan}; tighten the coefficient target
    // accordingly
    size_t scan_n = std::min(scan_limit, seq.size() - 1);
    double log2_alpha_max = 0.0;
    for (auto& [h, mc] : roots) {
        RealEnclosure m2 = abs2(h.enclosure(-64), 96);
        log2_alpha_max = std::max(log2_alpha_max, 0.5 * std::log2(std::max(
                                                            1.0, m2.mid_double())));
    }
    long needed = -static_cast<long>(std::ceil(static_cast<double>(scan_n) * log2_alpha_max)) -
                  48;
    long eff_target = std::min(coeff_target_log2, needed);

    std::vector<Rat> hat_init(d, Rat(0));
    hat_init[d - 1] = Rat(1);
    const std::vector<Rat>& til_init = seq.spec.initial;
    auto g_hat = binet_coefficients(handles, hat_init, eff_target);
    auto g_til = binet_coefficients(handles, til_init, eff_target);

    size_t nterms = seq.size() > static_cast<size_t>(d) ? seq.size() - d : 0;
    Rat E = seq.apriori_bound;

    // choose the working precision from the coefficient width and the series
    // length
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(-eff_target + 96);
    auto err_at = [&](size_t j, mpfr_prec_t p) {  // e_{d+j-1}
        return seq.error_enclosure(d + j - 1, p);
    };

    for (size_t i = 0; i < roots.size(); ++i) {
        RootReportEntry ent;
        ent.root = roots[i].first;
        ent.mod_class = roots[i].second;
        ent.g_hat = g_hat[i];
        ent.g_tilde = g_til[i];
        if (ent.mod_class == ModClass::Greater1) {
            ComplexFn afn = ent.root.refiner();
            CSeriesResult cs = c_enclosure(afn, err_at, nterms, E, prec);
            ent.c_alpha = cs.value;
            ent.c_tail_upper = cs.tail_upper;
            ComplexEnclosure beta = add(ent.g_tilde, mul(ent.g_hat, cs.value, prec), prec);
            ent.beta = beta;
            ent.beta_nonzero = !abs2(beta, prec).contains_zero();
        }
        rep.entries.push_back(std::move(ent));
    }

    // ---- residual diagnostics ----
    // Derived bound from the decomposition identity: the tail of each c-series
    // contributes |g^_i| E |alpha_i|^{d-1} / (|alpha_i| - 1) once the beta_i
    // term is subtracted, and each unit-circle root contributes
    // |g~_i| + |g^_i| E (n - d + 1) at index n.
    Rat bound_const(0), bound_linear(0);
    for (size_t i = 0; i < rep.entries.size(); ++i) {
        const auto& ent = rep.entries[i];
        Rat gh = detail_binet::abs_upper(ent.g_hat, prec);
        Rat gt = detail_binet::abs_upper(ent.g_tilde, prec);
        if (ent.mod_class == ModClass::Greater1) {
            RealEnclosure mod = sqrt_enc(abs2(ent.root.enclosure(-64), prec), prec);
            Rat mhi = detail_roots::dyadic_of(mod.hi());
            Rat mlo = detail_roots::dyadic_of(mod.lo());
            if (mlo <= 1) throw ModulusNotAboveOne();
            Rat powv = pow_rat(mhi, d >= 1 ? d - 1 : 0);
            bound_const += gh * E * powv / (mlo - 1);
        } else {
            bound_const += gt + gh * E;
            bound_linear += gh * E;
        }
    }
    rep.residuals.bound_const = bound_const;
    rep.residuals.bound_linear = bound_linear;
    rep.residuals.exceedance_threshold = exceedance_threshold;

    // residual r_n = a_n - sum_{i <= r1} beta_i alpha_i^n over the scan range
    size_t N = scan_n;
    std::vector<ComplexEnclosure> beta_vals;
    std::vector<PowerWalker> pw;
    for (size_t i = 0; i < rep.entries.size(); ++i) {
        if (rep.entries[i].mod_class != ModClass::Greater1) continue;
        beta_vals.push_back(*rep.entries[i].beta);
        pw.emplace_back(rep.entries[i].root.enclosure(-static_cast<long>(prec) - 8), 0, prec);
    }

    Rat maxres(0);
    size_t win_start = 1;
    Rat win_best(0);
    std::vector<std::pair<size_t, Rat>> windows;
    Rat lo_half(0), hi_half(0);  // window maxima for the growth heuristic
    size_t exceed = 0;
    for (size_t n = 0; n <= N; ++n) {
        ComplexEnclosure s = ComplexEnclosure::exact(Rat(0), Rat(0), prec);
        for (size_t k = 0; k < pw.size(); ++k)
            s = add(s, mul(beta_vals[k], pw[k].value(), prec), prec);
        ComplexEnclosure r =
            sub(ComplexEnclosure::exact(seq.values[n], Rat(0), prec), s, prec);
        Rat up = detail_binet::abs_upper(r, prec);
        Rat lo = detail_binet::abs_lower(r, prec);
        if (up > maxres) maxres = up;
        if (lo > exceedance_threshold) ++exceed;
        if (n >= win_start * 2) {
            windows.emplace_back(win_start, win_best);
            win_start *= 2;
            win_best = Rat(0);
        }
        if (up > win_best) win_best = up;
        if (n <= N / 2) {
            if (up > lo_half) lo_half = up;
        } else if (up > hi_half) {
            hi_half = up;
        }
        for (size_t k = 0; k < pw.size(); ++k) pw[k].advance();
    }
    windows.emplace_back(win_start, win_best);
    rep.residuals.window_max = std::move(windows);
    rep.residuals.max_residual = maxres;
    rep.residuals.exceedance_count = exceed;

    // growth heuristic: compare the max on (N/2, N] with the max on [0, N/2];
    // residual maxima below the arithmetic noise floor count as zero
    Rat noise(1, Int(1) << 32);
    if (hi_half <= noise)
        rep.residuals.growth_class = "bounded";
    else if (lo_half > 0 && hi_half <= lo_half * Rat(5, 4))
        rep.residuals.growth_class = "bounded";
    else if (lo_half > 0 && hi_half >= lo_half * Rat(8, 5) && hi_half <= lo_half * Rat(12, 5))
        rep.residuals.growth_class = "linear";
    else
        rep.residuals.growth_class = "other";

    // divergence trace |a_n - atilde_n| at dyadic sample points
    if (spec.all_rational_coefficients()) {
        auto [ahat, atil] = associated_lrs(seq.spec, N);
        (void)ahat;
        for (size_t n = 1; n <= N; n *= 2)
            rep.residuals.divergence_trace.emplace_back(n, abs_rat(seq.values[n] - atil[n]));
    }
    return rep;
}

/// Standalone residual profile against given asymptotic data: dyadic window
/// maxima, growth classification, exceedance count above the threshold, and
/// the divergence trace |a_n - atilde_n|.
struct ResidualProfile {
    std::vector<std::pair<size_t, Rat>> window_max;
    std::string growth_class;
    size_t exceedance_count = 0;
    std::vector<std::pair<size_t, Rat>> divergence_trace;
};

inline ResidualProfile residual_profile(const GeneratedSequence& seq,
                                        const std::vector<ComplexEnclosure>& betas,
                                        const std::vector<RootHandle>& alphas,
                                        const std::vector<Rat>& atilde,
                                        const Rat& threshold) {
    if (betas.size() != alphas.size()) throw LengthMismatch("beta/alpha count mismatch");
    mpfr_prec_t prec = 256;
    size_t N = seq.size() - 1;
    ResidualProfile out;
    std::vector<PowerWalker> pw;
    for (const auto& a : alphas)
        pw.emplace_back(a.enclosure(-static_cast<long>(prec) - 8), 0, prec);
    size_t win_start = 1;
    Rat win_best(0);
    Rat lo_half(0), hi_half(0);
    for (size_t n = 0; n <= N; ++n) {
        ComplexEnclosure s = ComplexEnclosure::exact(Rat(0), Rat(0), prec);
        for (size_t k = 0; k < pw.size(); ++k)
            s = add(s, mul(betas[k], pw[k].value(), prec), prec);
        ComplexEnclosure r = sub(ComplexEnclosure::exact(seq.values[n], Rat(0), prec), s, prec);
        Rat up = detail_binet::abs_upper(r, prec);
        Rat lo = detail_binet::abs_lower(r, prec);
        if (lo > threshold) ++out.exceedance_count;
        if (n >= win_start * 2) {
            out.window_max.emplace_back(win_start, win_best);
            win_start *= 2;
            win_best = Rat(0);
        }
        if (up > win_best) win_best = up;
        if (n <= N / 2) {
            if (up > lo_half) lo_half = up;
        } else if (up > hi_half) {
            hi_half = up;
        }
        for (size_t k = 0; k < pw.size(); ++k) pw[k].advance();
    }
    out.window_max.emplace_back(win_start, win_best);
    if (hi_half <= lo_half * Rat(5, 4))
        out.growth_class = "bounded";
    else if (hi_half >= lo_half * Rat(8, 5) && hi_half <= lo_half * Rat(12, 5))
        out.growth_class = "linear";
    else
        out.growth_class = "other";
    for (size_t n = 1; n <= N && n < atilde.size(); n *= 2)
        out.divergence_trace.emplace_back(n, abs_rat(seq.values[n] - atilde[n]));
    return out;
}

/// Count of sampled n in [0, N) with |sum gamma_i eta_i^n| certainly above the
/// threshold (the fluctuation scan used by the growth diagnostics).
inline size_t exceedance_scan(const std::vector<ComplexEnclosure>& gammas,
                              const std::vector<ComplexEnclosure>& etas, const Rat& threshold,
                              size_t N, mpfr_prec_t prec = 192) {
    if (gammas.size() != etas.size()) throw LengthMismatch("gamma/eta count mismatch");
    std::vector<PowerWalker> pw;
    for (const auto& e : etas) pw.emplace_back(e, 0, prec);
    size_t count = 0;
    for (size_t n = 0; n < N; ++n) {
        ComplexEnclosure s = ComplexEnclosure::exact(Rat(0), Rat(0), prec);
        for (size_t k = 0; k < pw.size(); ++k)
            s = add(s, mul(gammas[k], pw[k].value(), prec), prec);
        if (certainly_greater(abs2(s, prec), threshold * threshold)) ++count;
        for (size_t k = 0; k < pw.size(); ++k) pw[k].advance();
    }
    return count;
}

/// Cesaro average (1/T) sum_{n=n0}^{n0+T-1} g(n) eta^{-n}: recovers the
/// coefficient of eta^n in a bounded exponential sum.
inline ComplexEnclosure recover_coefficient(
    const std::function<ComplexEnclosure(size_t, mpfr_prec_t)>& g, const ComplexFn& eta,
    size_t n0, size_t T, mpfr_prec_t prec = 256) {
    if (T < 1) throw InvalidInput("need T >= 1");
    ComplexEnclosure e = eta(prec);
    RealEnclosure m2 = abs2(e, prec);
    if (!m2.contains(Rat(1)))
        throw InvalidInput("eta is not on the unit circle");
    ComplexEnclosure inv = div(ComplexEnclosure::exact(Rat(1), Rat(0), prec), e, prec);
    PowerWalker w(inv, static_cast<unsigned long>(n0), prec);
    ComplexEnclosure acc = ComplexEnclosure::exact(Rat(0), Rat(0), prec);
    for (size_t k = 0; k < T; ++k) {
        acc = add(acc, mul(g(n0 + k, prec), w.value(), prec), prec);
        w.advance();
    }
    return mul_real(acc, RealEnclosure::exact(Rat(1, Int(static_cast<unsigned long>(T))), prec),
                    prec);
}

}  // namespace nlrs
