#pragma once

#include <variant>
#include <vector>

#include "nlrs/expr.hpp"

namespace nlrs {

enum class RuleKind { Srs, Target, ExplicitErrors };
enum class TargetRounding { Floor, NearestHalfUp };

using Coef = std::variant<Rat, AlgebraicNumber>;

inline bool coef_is_rational(const Coef& c) { return std::holds_alternative<Rat>(c); }
inline Rat coef_rational(const Coef& c) { return std::get<Rat>(c); }

/// One exponential term of a target rule: gamma * alpha^n.
struct TargetTerm {
    Expr gamma;            // rational constant, algebraic leaf, or expression
    AlgebraicNumber alpha;
};

/// Full description of a sequence: degree, recursion coefficients A_0..A_{d-1},
/// initial terms, and the rule that pins the error sequence.
struct NlrsSpec {
    long degree = 0;
    std::vector<Coef> coefficients;  // A_0 .. A_{d-1}
    std::vector<Rat> initial;        // a_0 .. a_{d-1}; optional for Target
    RuleKind rule = RuleKind::Srs;

    // Target rule
    std::vector<TargetTerm> targets;
    TargetRounding rounding = TargetRounding::Floor;
    Int offset = Int(0);

    // ExplicitErrors rule
    std::vector<Rat> errors;
    Rat error_bound = Rat(0);

    bool all_rational_coefficients() const {
        for (const auto& c : coefficients)
            if (!coef_is_rational(c)) return false;
        return true;
    }

    void validate() const {
        if (degree < 1) throw InvalidSpec("degree must be >= 1");
        if (static_cast<long>(coefficients.size()) != degree)
            throw InvalidSpec("need exactly degree coefficients");
        if (rule == RuleKind::Target) {
            if (targets.empty()) throw InvalidSpec("target rule needs at least one term");
            if (!initial.empty() && static_cast<long>(initial.size()) != degree)
                throw InvalidSpec("initial terms, when given, must number degree");
        } else {
            if (static_cast<long>(initial.size()) != degree)
                throw InvalidSpec("need exactly degree initial terms");
        }
        if (rule == RuleKind::ExplicitErrors) {
            if (error_bound < 0) throw InvalidSpec("error bound must be >= 0");
            for (const auto& e : errors)
                if (abs_rat(e) > error_bound)
                    throw InvalidSpec("explicit error exceeds the declared bound");
        }
    }

    /// A priori bound on |e_n| implied by the rule, valid for every n.
    Rat apriori_error_bound() const {
        switch (rule) {
            case RuleKind::ExplicitErrors: return error_bound;
            case RuleKind::Srs:
            case RuleKind::Target: {
                // e_{n+d} = -delta_{n+d} - sum A_i delta_{n+i} with each
                // rounding offset delta in [0,1) (floor) or [-1/2,1/2]
                Rat dmax = rule == RuleKind::Srs
                               ? Rat(1)
                               : (rounding == TargetRounding::Floor ? Rat(1) : Rat(1, 2));
                Rat s(1);
                for (const auto& c : coefficients) {
                    if (coef_is_rational(c)) {
                        s += abs_rat(coef_rational(c));
                    } else {
                        // rational upper bound of |A_i| from a coarse enclosure
                        const auto& a = std::get<AlgebraicNumber>(c);
                        RealEnclosure m = abs_enc(a.enclosure(-32), 96);
                        Rat hi = detail_roots::dyadic_of(m.hi());
                        s += hi;
                    }
                }
                return dmax * s;
            }
        }
        return Rat(0);
    }
};

/// A generated prefix a_0..a_N with its error sequence. Values are exact
/// (integers for SRS/Target); errors are exact rationals when the
/// coefficients are rational, and on-demand enclosures otherwise.
struct GeneratedSequence {
    NlrsSpec spec;
    std::vector<Rat> values;  // a_0 .. a_N, exact
    bool integer_values = false;
    std::vector<Rat> errors_exact;  // e_0 .. e_N when exact
    bool errors_are_exact = false;
    Rat apriori_bound;   // sup_n |e_n| guaranteed by the rule
    Rat observed_bound;  // max over generated range (upper bound if inexact)

    size_t size() const { return values.size(); }
    Int value_int(size_t n) const {
        if (!is_integer(values[n])) throw InvalidSpec("sequence value is not an integer");
        return Int(values[n].get_num());
    }

    /// e_n as an enclosure at the given precision (any coefficient kind).
    RealEnclosure error_enclosure(size_t n, mpfr_prec_t prec) const {
        long d = spec.degree;
        if (n < static_cast<size_t>(d)) return RealEnclosure::exact(Rat(0), prec);
        if (errors_are_exact) return RealEnclosure::exact(errors_exact[n], prec);
        RealEnclosure acc = RealEnclosure::exact(values[n], prec);
        for (long i = 0; i < d; ++i) {
            const Coef& c = spec.coefficients[i];
            RealEnclosure a = coef_is_rational(c)
                                  ? RealEnclosure::exact(coef_rational(c), prec)
                                  : std::get<AlgebraicNumber>(c).real_enclosure(
                                        -static_cast<long>(prec) - 8);
            acc = add(acc, mul(a, RealEnclosure::exact(values[n - d + i], prec), prec), prec);
        }
        return acc;
    }
};

namespace detail_seq {

/// Working precision that certifies rounding through N terms of growth rate
/// roughly `log2_growth` bits per term.
inline mpfr_prec_t deep_generation_prec(size_t N, double log2_growth) {
    double need = 96.0 + static_cast<double>(N) * std::max(0.0, log2_growth);
    if (need > 1e9) throw PrecisionCapExceeded("generation depth requires absurd precision");
    return static_cast<mpfr_prec_t>(need);
}

inline double coef_growth_log2(const NlrsSpec& spec) {
    double s = 1.0;
    for (const auto& c : spec.coefficients) {
        double v = coef_is_rational(c)
                       ? std::abs(coef_rational(c).get_d())
                       : std::abs(std::get<AlgebraicNumber>(c).enclosure(-32).re.mid_double()) +
                             std::abs(std::get<AlgebraicNumber>(c).enclosure(-32).im.mid_double());
        s += std::abs(v);
    }
    return std::log2(s + 1.0);
}

}  // namespace detail_seq

/// Generates a_0..a_N (and the error terms) under the spec's rule.
inline GeneratedSequence generate(const NlrsSpec& spec, size_t N,
                                  PrecisionPolicy policy = PrecisionPolicy::standard()) {
    spec.validate();
    long d = spec.degree;
    if (N + 1 < static_cast<size_t>(d)) throw InvalidSpec("need N >= degree - 1");

    GeneratedSequence out;
    out.spec = spec;
    out.apriori_bound = spec.apriori_error_bound();
    out.observed_bound = Rat(0);

    auto push_error_exact = [&](const Rat& e) {
        out.errors_exact.push_back(e);
        Rat a = abs_rat(e);
        if (a > out.observed_bound) out.observed_bound = a;
    };

    switch (spec.rule) {
        case RuleKind::Srs: {
            for (const auto& v : spec.initial)
                if (!is_integer(v)) throw InvalidSpec("SRS initial terms must be integers");
            out.integer_values = true;
            out.values = spec.initial;
            out.errors_are_exact = spec.all_rational_coefficients();
            for (long i = 0; i < d; ++i) out.errors_exact.push_back(Rat(0));
            if (out.errors_are_exact) {
                for (size_t n = d; n <= N; ++n) {
                    Rat s(0);
                    for (long i = 0; i < d; ++i)
                        s += coef_rational(spec.coefficients[i]) * out.values[n - d + i];
                    Int next = -floor_rat(s);
                    out.values.push_back(Rat(next));
                    Rat e = Rat(next) + s;
                    if (e < 0 || e >= 1)
                        throw InvalidSpec("SRS error term escaped [0,1)");
                    push_error_exact(e);
                }
            } else {
                // algebraic coefficients: certified floors, precision chosen
                // once for the whole depth
                mpfr_prec_t base = detail_seq::deep_generation_prec(
                    N, detail_seq::coef_growth_log2(spec));
                policy = policy.starting_at(base).with_cap(
                    std::max(policy.cap, base * 4));
                out.errors_exact.clear();
                out.errors_are_exact = false;
                for (size_t n = d; n <= N; ++n) {
                    RealFn sum_fn = [&](mpfr_prec_t p) {
                        RealEnclosure acc = RealEnclosure::exact(Rat(0), p);
                        for (long i = 0; i < d; ++i) {
                            const Coef& c = spec.coefficients[i];
                            RealEnclosure a =
                                coef_is_rational(c)
                                    ? RealEnclosure::exact(coef_rational(c), p)
                                    : std::get<AlgebraicNumber>(c).real_enclosure(
                                          -static_cast<long>(p) - 8);
                            acc = add(acc,
                                      mul(a, RealEnclosure::exact(out.values[n - d + i], p), p),
                                      p);
                        }
                        return acc;
                    };
                    Int next = -certified_round(sum_fn, RoundMode::Floor, policy);
                    out.values.push_back(Rat(next));
                }
            }
            break;
        }
        case RuleKind::Target: {
            out.integer_values = true;
            // exact when every gamma and alpha is rational and real
            bool exact_path = true;
            for (const auto& t : spec.targets) {
                if (!t.alpha.is_rational()) exact_path = false;
                auto g = t.gamma.eval_exact();
                if (!g || g->second != 0) exact_path = false;
            }
            RoundMode mode = spec.rounding == TargetRounding::Floor ? RoundMode::Floor
                                                                    : RoundMode::NearestHalfUp;
            if (exact_path) {
                std::vector<Rat> gammas, alphas;
                for (const auto& t : spec.targets) {
                    gammas.push_back(t.gamma.eval_exact()->first);
                    alphas.push_back(*t.alpha.rational());
                }
                std::vector<Rat> pows(alphas.size(), Rat(1));
                for (size_t n = 0; n <= N; ++n) {
                    Rat t(spec.offset);
                    for (size_t i = 0; i < alphas.size(); ++i) t += gammas[i] * pows[i];
                    out.values.push_back(Rat(exact_round(t, mode)));
                    for (size_t i = 0; i < alphas.size(); ++i) pows[i] *= alphas[i];
                }
            } else {
                double growth = 0.0;
                for (const auto& t : spec.targets) {
                    auto b = t.alpha.enclosure(-32);
                    double m = std::sqrt(abs2(b, 96).mid_double());
                    growth = std::max(growth, std::log2(std::max(1.0, m)));
                }
                mpfr_prec_t base = detail_seq::deep_generation_prec(N, growth);
                policy = policy.starting_at(base).with_cap(std::max(policy.cap, base * 4));
                for (size_t n = 0; n <= N; ++n) {
                    RealFn t_fn = [&](mpfr_prec_t p) {
                        ComplexEnclosure acc =
                            ComplexEnclosure::exact(Rat(spec.offset), Rat(0), p);
                        for (const auto& t : spec.targets) {
                            ComplexEnclosure a =
                                t.alpha.enclosure(-static_cast<long>(p) - 8);
                            ComplexEnclosure g = t.gamma.eval(p);
                            acc = add(acc,
                                      mul(g, pow_int(a, Int(static_cast<long>(n)), p), p), p);
                        }
                        return acc.re;  // target value is the real part
                    };
                    out.values.push_back(Rat(certified_round(t_fn, mode, policy)));
                }
            }
            // the first d generated values serve as the initial terms; a
            // supplied list must agree
            if (!spec.initial.empty()) {
                for (long i = 0; i < d; ++i)
                    if (spec.initial[i] != out.values[i])
                        throw InvalidSpec("supplied initial terms disagree with the target rule");
            }
            out.spec.initial.assign(out.values.begin(), out.values.begin() + d);
            // errors: exact when coefficients rational (values are integers)
            out.errors_are_exact = spec.all_rational_coefficients();
            if (out.errors_are_exact) {
                for (long i = 0; i < d; ++i) out.errors_exact.push_back(Rat(0));
                for (size_t n = d; n <= N; ++n) {
                    Rat e = out.values[n];
                    for (long i = 0; i < d; ++i)
                        e += coef_rational(spec.coefficients[i]) * out.values[n - d + i];
                    push_error_exact(e);
                }
            }
            break;
        }
        case RuleKind::ExplicitErrors: {
            if (!spec.all_rational_coefficients())
                throw InvalidSpec(
                    "explicit-errors rule requires rational coefficients (exact forward solve)");
            if (spec.errors.size() < N + 1 - d)
                throw InvalidSpec("not enough explicit error terms for the requested length");
            out.values = spec.initial;
            out.integer_values = true;
            for (const auto& v : spec.initial)
                if (!is_integer(v)) out.integer_values = false;
            out.errors_are_exact = true;
            for (long i = 0; i < d; ++i) out.errors_exact.push_back(Rat(0));
            for (size_t n = d; n <= N; ++n) {
                Rat e = spec.errors[n - d];
                Rat v = e;
                for (long i = 0; i < d; ++i)
                    v -= coef_rational(spec.coefficients[i]) * out.values[n - d + i];
                out.values.push_back(v);
                if (!is_integer(v)) out.integer_values = false;
                push_error_exact(e);
            }
            break;
        }
    }
    return out;
}

/// The two companion linear recurrences: ahat with initial terms 0,...,0,1 and
/// atilde with the sequence's own initial terms, both satisfying
/// x_{n+d} + A_{d-1} x_{n+d-1} + ... + A_0 x_n = 0. Exact (rational
/// coefficients required).
inline std::pair<std::vector<Rat>, std::vector<Rat>> associated_lrs(const NlrsSpec& spec,
                                                                    size_t N) {
    spec.validate();
    if (!spec.all_rational_coefficients())
        throw InvalidSpec("associated_lrs is exact; needs rational coefficients");
    long d = spec.degree;
    if (spec.initial.empty())
        throw InvalidSpec("associated_lrs needs initial terms (generate the sequence first)");
    std::vector<Rat> ahat, atil;
    for (long i = 0; i < d - 1; ++i) ahat.push_back(Rat(0));
    ahat.push_back(Rat(1));
    atil = spec.initial;
    auto step = [&](std::vector<Rat>& v, size_t n) {
        Rat s(0);
        for (long i = 0; i < d; ++i)
            s += coef_rational(spec.coefficients[i]) * v[n - d + i];
        v.push_back(-s);
    };
    for (size_t n = d; n <= N; ++n) {
        step(ahat, n);
        step(atil, n);
    }
    return {std::move(ahat), std::move(atil)};
}

/// Residuals of the decomposition identity
///   a_n = atilde_n + sum_{j=1}^{n-d+1} ahat_{n-j} e_{d-1+j},
/// exactly zero for every valid generation with rational coefficients.
inline std::vector<Rat> verify_decomposition(const GeneratedSequence& seq,
                                             const std::vector<Rat>& ahat,
                                             const std::vector<Rat>& atilde) {
    if (!seq.errors_are_exact)
        throw InvalidSpec("exact decomposition check needs exact errors");
    size_t N = seq.size() - 1;
    if (ahat.size() < seq.size() || atilde.size() < seq.size())
        throw LengthMismatch("companion sequences shorter than the generated range");
    long d = seq.spec.degree;
    std::vector<Rat> residuals;
    residuals.reserve(seq.size());
    for (size_t n = 0; n <= N; ++n) {
        Rat acc = seq.values[n] - atilde[n];
        if (n + 1 >= static_cast<size_t>(d)) {
            for (size_t j = 1; j + d <= n + 1; ++j) acc -= ahat[n - j] * seq.errors_exact[d - 1 + j];
        }
        residuals.push_back(acc);
    }
    return residuals;
}

/// Enclosure version of the decomposition check for algebraic-coefficient
/// specs: returns residual enclosures (all must contain zero).
inline std::vector<RealEnclosure> verify_decomposition_enclosure(const GeneratedSequence& seq,
                                                                 mpfr_prec_t prec) {
    long d = seq.spec.degree;
    size_t N = seq.size() - 1;
    // companion sequences as enclosures
    std::vector<RealEnclosure> ahat, atil;
    for (long i = 0; i < d - 1; ++i) ahat.push_back(RealEnclosure::exact(Rat(0), prec));
    ahat.push_back(RealEnclosure::exact(Rat(1), prec));
    for (long i = 0; i < d; ++i) atil.push_back(RealEnclosure::exact(seq.spec.initial[i], prec));
    std::vector<RealEnclosure> coef;
    for (const auto& c : seq.spec.coefficients)
        coef.push_back(coef_is_rational(c)
                           ? RealEnclosure::exact(coef_rational(c), prec)
                           : std::get<AlgebraicNumber>(c).real_enclosure(
                                 -static_cast<long>(prec) - 8));
    auto step = [&](std::vector<RealEnclosure>& v, size_t n) {
        RealEnclosure s = RealEnclosure::exact(Rat(0), prec);
        for (long i = 0; i < d; ++i) s = add(s, mul(coef[i], v[n - d + i], prec), prec);
        v.push_back(neg(s));
    };
    std::vector<RealEnclosure> errs;
    for (size_t n = 0; n <= N; ++n) errs.push_back(seq.error_enclosure(n, prec));
    std::vector<RealEnclosure> residuals;
    for (size_t n = 0; n <= N; ++n) {
        if (n >= static_cast<size_t>(d)) {
            step(ahat, n);
            step(atil, n);
        }
        RealEnclosure acc = sub(RealEnclosure::exact(seq.values[n], prec), atil[n], prec);
        if (n + 1 >= static_cast<size_t>(d))
            for (size_t j = 1; j + d <= n + 1; ++j)
                acc = sub(acc, mul(ahat[n - j], errs[d - 1 + j], prec), prec);
        residuals.push_back(acc);
    }
    return residuals;
}

}  // namespace nlrs
