#pragma once

#include <map>
#include <memory>
#include <utility>

#include "nlrs/algebraic.hpp"
#include "nlrs/refine.hpp"

namespace nlrs {

/// Immutable arithmetic DAG over exact rational constants, algebraic-number
/// leaves, fixed enclosures, and the transcendental functions the rest of the
/// library needs (log, exp, sqrt, sin, cos, pi). Complex-valued; subtrees
/// built from real nodes keep an exactly-zero imaginary part. Evaluation at a
/// working precision yields a containing enclosure; all-rational subgraphs
/// evaluate exactly.
class Expr {
  public:
    enum class Op {
        Const,      // exact rational re + im
        Algebraic,  // refinable algebraic leaf
        Box,        // fixed enclosure leaf (not refinable)
        Pi,
        Add,
        Sub,
        Mul,
        Div,
        Neg,
        Conj,
        ReOf,
        ImOf,
        PowInt,  // integer exponent, arbitrary size (cost ~ bit length)
        Log,     // real argument > 0
        Exp,     // real argument
        Sqrt,    // real argument >= 0
        Sin,     // real argument
        Cos      // real argument
    };

    struct Node {
        Op op;
        Rat cre, cim;                            // Const
        std::shared_ptr<AlgebraicNumber> alg;    // Algebraic
        std::shared_ptr<ComplexEnclosure> box;   // Box
        Int expo;                                // PowInt
        std::vector<Expr> kids;
    };

  private:
    std::shared_ptr<const Node> n_;
    explicit Expr(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

    static Expr mk(Node&& n) { return Expr(std::make_shared<const Node>(std::move(n))); }

  public:
    Expr() = default;
    bool valid() const { return static_cast<bool>(n_); }
    const Node& node() const { return *n_; }

    static Expr constant(const Rat& re, const Rat& im = Rat(0)) {
        Node n;
        n.op = Op::Const;
        n.cre = re;
        n.cim = im;
        return mk(std::move(n));
    }
    static Expr constant(const Int& z) { return constant(Rat(z)); }
    static Expr algebraic(AlgebraicNumber a) {
        Node n;
        n.op = Op::Algebraic;
        n.alg = std::make_shared<AlgebraicNumber>(std::move(a));
        return mk(std::move(n));
    }
    static Expr box(ComplexEnclosure b) {
        Node n;
        n.op = Op::Box;
        n.box = std::make_shared<ComplexEnclosure>(std::move(b));
        return mk(std::move(n));
    }
    static Expr pi() {
        Node n;
        n.op = Op::Pi;
        return mk(std::move(n));
    }

    static Expr unary(Op op, Expr a) {
        Node n;
        n.op = op;
        n.kids = {std::move(a)};
        return mk(std::move(n));
    }
    static Expr binary(Op op, Expr a, Expr b) {
        Node n;
        n.op = op;
        n.kids = {std::move(a), std::move(b)};
        return mk(std::move(n));
    }
    static Expr pow(Expr a, Int e) {
        Node n;
        n.op = Op::PowInt;
        n.expo = std::move(e);
        n.kids = {std::move(a)};
        return mk(std::move(n));
    }

    friend Expr operator+(Expr a, Expr b) { return binary(Op::Add, std::move(a), std::move(b)); }
    friend Expr operator-(Expr a, Expr b) { return binary(Op::Sub, std::move(a), std::move(b)); }
    friend Expr operator*(Expr a, Expr b) { return binary(Op::Mul, std::move(a), std::move(b)); }
    friend Expr operator/(Expr a, Expr b) { return binary(Op::Div, std::move(a), std::move(b)); }
    friend Expr operator-(Expr a) { return unary(Op::Neg, std::move(a)); }
    static Expr log(Expr a) { return unary(Op::Log, std::move(a)); }
    static Expr exp(Expr a) { return unary(Op::Exp, std::move(a)); }
    static Expr sqrt(Expr a) { return unary(Op::Sqrt, std::move(a)); }
    static Expr sin(Expr a) { return unary(Op::Sin, std::move(a)); }
    static Expr cos(Expr a) { return unary(Op::Cos, std::move(a)); }
    static Expr conj(Expr a) { return unary(Op::Conj, std::move(a)); }
    static Expr re(Expr a) { return unary(Op::ReOf, std::move(a)); }
    static Expr im(Expr a) { return unary(Op::ImOf, std::move(a)); }

    /// Exact rational value of an all-rational subgraph (+, -, *, /, powers,
    /// conj/re/im over rational leaves). Empty for anything else.
    std::optional<std::pair<Rat, Rat>> eval_exact() const {
        using P = std::pair<Rat, Rat>;
        const Node& n = *n_;
        auto kid = [&](size_t i) { return n.kids[i].eval_exact(); };
        switch (n.op) {
            case Op::Const: return P{n.cre, n.cim};
            case Op::Algebraic:
                if (n.alg->is_rational()) return P{*n.alg->rational(), Rat(0)};
                return std::nullopt;
            case Op::Add: {
                auto a = kid(0), b = kid(1);
                if (!a || !b) return std::nullopt;
                return P{a->first + b->first, a->second + b->second};
            }
            case Op::Sub: {
                auto a = kid(0), b = kid(1);
                if (!a || !b) return std::nullopt;
                return P{a->first - b->first, a->second - b->second};
            }
            case Op::Mul: {
                auto a = kid(0), b = kid(1);
                if (!a || !b) return std::nullopt;
                return P{a->first * b->first - a->second * b->second,
                         a->first * b->second + a->second * b->first};
            }
            case Op::Div: {
                auto a = kid(0), b = kid(1);
                if (!a || !b) return std::nullopt;
                Rat d = b->first * b->first + b->second * b->second;
                if (d == 0) throw DivisionByUncertainZero();
                return P{(a->first * b->first + a->second * b->second) / d,
                         (a->second * b->first - a->first * b->second) / d};
            }
            case Op::Neg: {
                auto a = kid(0);
                if (!a) return std::nullopt;
                return P{-a->first, -a->second};
            }
            case Op::Conj: {
                auto a = kid(0);
                if (!a) return std::nullopt;
                return P{a->first, -a->second};
            }
            case Op::ReOf: {
                auto a = kid(0);
                if (!a) return std::nullopt;
                return P{a->first, Rat(0)};
            }
            case Op::ImOf: {
                auto a = kid(0);
                if (!a) return std::nullopt;
                return P{a->second, Rat(0)};
            }
            case Op::PowInt: {
                auto a = kid(0);
                if (!a) return std::nullopt;
                if (!mpz_fits_slong_p(n.expo.get_mpz_t())) return std::nullopt;
                long e = n.expo.get_si();
                if (a->second == 0) return P{pow_rat(a->first, e), Rat(0)};
                // complex rational power by repeated squaring
                bool invert = e < 0;
                unsigned long ae = invert ? -e : e;
                Rat pr(1), pi(0), br = a->first, bi = a->second;
                while (ae) {
                    if (ae & 1) {
                        Rat nr = pr * br - pi * bi, ni = pr * bi + pi * br;
                        pr = nr;
                        pi = ni;
                    }
                    Rat sr = br * br - bi * bi, si = br * bi * 2;
                    br = sr;
                    bi = si;
                    ae >>= 1;
                }
                if (invert) {
                    Rat d = pr * pr + pi * pi;
                    if (d == 0) throw DivisionByUncertainZero();
                    return P{pr / d, -pi / d};
                }
                return P{pr, pi};
            }
            default: return std::nullopt;
        }
    }

    /// Enclosure evaluation at a working precision (memoized per shared node).
    ComplexEnclosure eval(mpfr_prec_t prec) const {
        std::map<const Node*, ComplexEnclosure> memo;
        return eval_impl(prec, memo);
    }

    RealEnclosure eval_real(mpfr_prec_t prec) const {
        ComplexEnclosure v = eval(prec);
        if (!(v.im.is_point() && v.im.contains_zero()))
            throw InvalidInput("expression is not exactly real");
        return v.re;
    }

    /// Refinable views.
    ComplexFn refiner() const {
        Expr self = *this;
        return [self](mpfr_prec_t p) { return self.eval(p); };
    }
    RealFn real_refiner() const {
        Expr self = *this;
        return [self](mpfr_prec_t p) { return self.eval_real(p); };
    }

  private:
    ComplexEnclosure eval_impl(mpfr_prec_t prec,
                               std::map<const Node*, ComplexEnclosure>& memo) const {
        auto it = memo.find(n_.get());
        if (it != memo.end()) return it->second;
        const Node& n = *n_;
        auto kid = [&](size_t i) { return n.kids[i].eval_impl(prec, memo); };
        auto real_kid = [&](size_t i) {
            ComplexEnclosure v = kid(i);
            if (!(v.im.is_point() && v.im.contains_zero()))
                throw InvalidInput("transcendental over a non-real argument");
            return v.re;
        };
        ComplexEnclosure out(prec);
        switch (n.op) {
            case Op::Const: out = ComplexEnclosure::exact(n.cre, n.cim, prec); break;
            case Op::Algebraic: out = n.alg->enclosure(-static_cast<long>(prec) - 8); break;
            case Op::Box: out = *n.box; break;
            case Op::Pi:
                out = ComplexEnclosure{RealEnclosure::pi(prec),
                                       RealEnclosure::exact(Rat(0), prec)};
                break;
            case Op::Add: out = add(kid(0), kid(1), prec); break;
            case Op::Sub: out = sub(kid(0), kid(1), prec); break;
            case Op::Mul: out = mul(kid(0), kid(1), prec); break;
            case Op::Div: out = div(kid(0), kid(1), prec); break;
            case Op::Neg: out = neg(kid(0)); break;
            case Op::Conj: out = kid(0).conj(); break;
            case Op::ReOf:
                out = ComplexEnclosure{kid(0).re, RealEnclosure::exact(Rat(0), prec)};
                break;
            case Op::ImOf:
                out = ComplexEnclosure{kid(0).im, RealEnclosure::exact(Rat(0), prec)};
                break;
            case Op::PowInt: out = pow_int(kid(0), n.expo, prec); break;
            case Op::Log:
                out = ComplexEnclosure::from_real(log_enc(real_kid(0), prec));
                break;
            case Op::Exp:
                out = ComplexEnclosure::from_real(exp_enc(real_kid(0), prec));
                break;
            case Op::Sqrt:
                out = ComplexEnclosure::from_real(sqrt_enc(real_kid(0), prec));
                break;
            case Op::Sin:
                out = ComplexEnclosure::from_real(sin_enc(real_kid(0), prec));
                break;
            case Op::Cos:
                out = ComplexEnclosure::from_real(cos_enc(real_kid(0), prec));
                break;
        }
        memo.emplace(n_.get(), out);
        return out;
    }
};

struct EvalResult {
    ComplexEnclosure value;
    bool hit_cap = false;
    mpfr_prec_t used_prec = 0;
    bool exact = false;
};

/// Evaluates an expression DAG under a precision policy until the enclosure
/// radius is at most 2^target_log2. All-rational expressions bypass interval
/// arithmetic and return an exact point enclosure.
inline EvalResult eval_enclosure(const Expr& e, const PrecisionPolicy& policy,
                                 long target_log2 = -64) {
    if (auto x = e.eval_exact()) {
        EvalResult r;
        mpfr_prec_t p = policy.initial;
        // exact rationals are still *represented* at finite precision; pick
        // one wide enough that the dyadic endpoints stay adjacent
        size_t bits = mpz_sizeinbase(x->first.get_num_mpz_t(), 2) +
                      mpz_sizeinbase(x->first.get_den_mpz_t(), 2) +
                      mpz_sizeinbase(x->second.get_num_mpz_t(), 2) +
                      mpz_sizeinbase(x->second.get_den_mpz_t(), 2);
        p = std::max<mpfr_prec_t>(p, static_cast<mpfr_prec_t>(bits + 8));
        r.value = ComplexEnclosure::exact(x->first, x->second, p);
        r.used_prec = p;
        r.exact = true;
        return r;
    }
    mpfr_prec_t p = policy.initial;
    for (;;) {
        std::optional<ComplexEnclosure> v;
        try {
            v = e.eval(p);
        } catch (const DivisionByUncertainZero&) {
            if (policy.at_cap(p)) throw;
        }
        if (v && v->width_below(target_log2)) return {*v, false, p, false};
        if (policy.at_cap(p)) {
            if (v) return {*v, true, p, false};
            throw DivisionByUncertainZero();
        }
        p = policy.next(p);
    }
}

/// Certified rounding of a real-valued expression: exact on the rational fast
/// path, adaptive refinement otherwise.
inline Int certified_round(const Expr& e, RoundMode mode, const PrecisionPolicy& policy) {
    if (auto x = e.eval_exact()) {
        if (x->second != 0) throw InvalidInput("rounding a non-real expression");
        return exact_round(x->first, mode);
    }
    return certified_round(e.real_refiner(), mode, policy);
}

}  // namespace nlrs
