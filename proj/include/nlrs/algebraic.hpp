#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "nlrs/contfrac.hpp"
#include "nlrs/refine.hpp"
#include "nlrs/roots.hpp"

namespace nlrs {

/// A refinable root of a known square-free polynomial (not necessarily the
/// minimal one). Cheap shared handle; refinement is cached.
class RootHandle {
    struct Impl {
        QPoly factor;  // monic rational, square-free
        std::mutex mu;
        ComplexEnclosure box;
        bool real = false;
        std::optional<Rat> rational;
    };
    std::shared_ptr<Impl> s_;

  public:
    RootHandle() = default;
    RootHandle(QPoly factor, const IsolatedRoot& r) : s_(std::make_shared<Impl>()) {
        s_->factor = std::move(factor);
        s_->box = r.box;
        s_->real = r.real;
        s_->rational = r.rational;
    }
    static RootHandle from_rational(const Rat& q) {
        RootHandle h;
        h.s_ = std::make_shared<Impl>();
        h.s_->factor = QPoly(std::vector<Rat>{-q, Rat(1)});
        h.s_->box = ComplexEnclosure::exact(q, Rat(0), 128);
        h.s_->real = true;
        h.s_->rational = q;
        return h;
    }

    bool valid() const { return static_cast<bool>(s_); }
    const QPoly& factor() const { return s_->factor; }
    bool is_real() const { return s_->real; }
    const std::optional<Rat>& rational() const { return s_->rational; }

    /// Certified box of width at most 2^target_log2 (refined lazily, cached).
    ComplexEnclosure enclosure(long target_log2) const {
        std::lock_guard<std::mutex> lk(s_->mu);
        if (!s_->box.width_below(target_log2))
            s_->box = refine_root_box(s_->factor, s_->box, target_log2, s_->real);
        return s_->box;
    }
    RealEnclosure real_enclosure(long target_log2) const {
        if (!s_->real) throw InvalidInput("real_enclosure of a non-real root");
        return enclosure(target_log2).re;
    }
    /// Refinable view for the generic precision machinery.
    ComplexFn refiner() const {
        RootHandle self = *this;
        return [self](mpfr_prec_t p) { return self.enclosure(-static_cast<long>(p) + 8); };
    }
};

enum class ModClass { Less1, Equal1, Greater1 };

namespace detail_alg {

/// Is the root of `h` a root of polynomial g? Requires g * cof == h.factor
/// up to a constant (cof = factor/g), so exactly one of them vanishes there.
inline bool root_of_part(const RootHandle& h, const QPoly& g, const QPoly& cof) {
    if (g.degree() <= 0) return false;
    if (cof.degree() <= 0) return true;
    for (long t = -64;; t *= 2) {
        ComplexEnclosure b = h.enclosure(t);
        mpfr_prec_t p = static_cast<mpfr_prec_t>(-t + 32);
        if (!abs2(g.eval(b, p), p).contains_zero()) return false;
        if (!abs2(cof.eval(b, p), p).contains_zero()) return true;
        if (t < -(1L << 22)) throw PrecisionCapExceeded("factor membership undecided");
    }
}

/// Exact root-equality test: true iff the unique roots of two certified
/// handles coincide. Both values must be roots of gcd(f_a, f_b); distinct
/// roots of that square-free gcd are separated by its separation bound, so
/// refinement decides equality either way.
inline bool same_root(const RootHandle& a, const RootHandle& b) {
    if (a.rational() && b.rational()) return *a.rational() == *b.rational();
    QPoly g = poly_gcd(a.factor(), b.factor());
    if (g.degree() <= 0) return false;
    if (!root_of_part(a, g, divexact(a.factor(), g))) return false;
    if (!root_of_part(b, g, divexact(b.factor(), g))) return false;
    Rat sep = g.degree() >= 2 ? separation_lower_bound(primitive_part(g)) : Rat(1);
    for (long t = -64;; t *= 2) {
        ComplexEnclosure ba = a.enclosure(t);
        ComplexEnclosure bb = b.enclosure(t);
        if (ba.disjoint(bb)) return false;
        mpfr_prec_t p = static_cast<mpfr_prec_t>(-t + 32);
        RealEnclosure dist = sqrt_enc(abs2(sub(ba, bb, p), p), p);
        if (certainly_less(dist, sep)) return true;
        if (t < -(1L << 22)) throw PrecisionCapExceeded("root equality undecided");
    }
}

/// G with any x-1 / x+1 factors removed (G is square-free, so at most one of
/// each).
inline QPoly strip_unit_real_roots(QPoly g) {
    if (g.eval(Rat(1)) == 0) g = divexact(g, QPoly(std::vector<Rat>{Rat(-1), Rat(1)}));
    if (g.eval(Rat(-1)) == 0) g = divexact(g, QPoly(std::vector<Rat>{Rat(1), Rat(1)}));
    return g;
}

/// For palindromic gt of even degree 2m, the polynomial in y = x + 1/x with
/// gt(x) = x^m * ghat(y). Uses the recursion V_0 = 2, V_1 = y,
/// V_{k+1} = y V_k - V_{k-1} for x^k + x^{-k}.
inline QPoly halve_palindromic(const QPoly& gt) {
    long deg = gt.degree();
    if (deg % 2 != 0) throw InvalidInput("inversion-closed factor must have even degree");
    for (long i = 0; i <= deg; ++i)
        if (gt.c[i] != gt.c[deg - i]) throw InvalidInput("factor is not palindromic");
    long m = deg / 2;
    QPoly y = QPoly::x_power(1);
    QPoly vprev = QPoly::constant(Rat(2));
    QPoly vcur = y;
    QPoly acc = QPoly::constant(gt.c[m]);
    for (long k = 1; k <= m; ++k) {
        acc = acc + vcur * gt.c[m + k];
        QPoly vnext = y * vcur - vprev;
        vprev = vcur;
        vcur = vnext;
    }
    return acc;
}

}  // namespace detail_alg

/// Decides |root| < 1, = 1 or > 1 exactly. Interval refinement handles the
/// generic case; equality with 1 is decided symbolically through
/// G = gcd(F, reversed F) and the x + 1/x transform, since no amount of
/// interval refinement can certify |root| = 1 on its own.
inline ModClass decide_modulus_vs_one(const RootHandle& h) {
    if (h.rational()) {
        Rat q = abs_rat(*h.rational());
        if (q == 1) return ModClass::Equal1;
        return q < 1 ? ModClass::Less1 : ModClass::Greater1;
    }
    auto try_numeric = [&](long t) -> std::optional<ModClass> {
        ComplexEnclosure b = h.enclosure(t);
        RealEnclosure m2 = abs2(b, static_cast<mpfr_prec_t>(-t + 32));
        if (certainly_greater(m2, Rat(1))) return ModClass::Greater1;
        if (certainly_less(m2, Rat(1))) return ModClass::Less1;
        return std::nullopt;
    };
    for (long t : {-64L, -160L})
        if (auto r = try_numeric(t)) return *r;

    const QPoly& F = h.factor();
    // roots at 0 would have been decided numerically already
    QPoly G = poly_gcd(F, F.reversed());
    auto refine_off_circle = [&]() -> ModClass {
        for (long t = -256;; t *= 2) {
            if (auto r = try_numeric(t)) return *r;
            if (t < -(1L << 22))
                throw PrecisionCapExceeded("modulus-vs-1 comparison undecided");
        }
    };
    if (G.degree() <= 0) return refine_off_circle();

    QPoly H = divexact(F, G);
    if (!detail_alg::root_of_part(h, G, H)) return refine_off_circle();

    // root of G; +-1 decided exactly: the box isolates one root of F, so if
    // it contains the point +-1 and F(+-1) = 0, the root is that point
    {
        ComplexEnclosure b = h.enclosure(-64);
        if (F.eval(Rat(1)) == 0 && b.re.contains(Rat(1)) && b.im.contains_zero())
            return ModClass::Equal1;
        if (F.eval(Rat(-1)) == 0 && b.re.contains(Rat(-1)) && b.im.contains_zero())
            return ModClass::Equal1;
    }
    QPoly gt = detail_alg::strip_unit_real_roots(G);
    if (gt.degree() <= 0) return refine_off_circle();

    QPoly ghat = detail_alg::halve_palindromic(gt);
    Rat sep = ghat.degree() >= 2 ? separation_lower_bound(primitive_part(ghat)) : Rat(1);
    Rat half_sep = sep / 2;

    for (long t = -128;; t *= 2) {
        ComplexEnclosure b = h.enclosure(t);
        mpfr_prec_t p = static_cast<mpfr_prec_t>(-t + 32);
        ComplexEnclosure one = ComplexEnclosure::exact(Rat(1), Rat(0), p);
        ComplexEnclosure y = add(b, div(one, b, p), p);
        if (y.im.is_positive() || y.im.is_negative()) return refine_off_circle();
        RealEnclosure abs_im = abs_enc(y.im);
        if (certainly_less(abs_im, half_sep)) {
            // y is within the root separation of its own conjugate, hence real
            if (certainly_greater(y.re, Rat(-2)) && certainly_less(y.re, Rat(2)))
                return ModClass::Equal1;
            if (certainly_less(y.re, Rat(-2)) || certainly_greater(y.re, Rat(2)))
                return refine_off_circle();
        }
        if (t < -(1L << 22)) throw PrecisionCapExceeded("unit circle membership undecided");
    }
}

// ---- characteristic polynomial classification ----

struct RootRecord {
    RootHandle root;
    int multiplicity = 1;
    ModClass mod_class = ModClass::Greater1;
    int conj_of = -1;
};

struct CharPoly {
    QPoly poly;  // monic
    std::vector<RootRecord> roots;  // sorted by descending modulus (certified)
    int r1 = 0;  // roots (with multiplicity) of modulus > 1
    int r2 = 0;  // roots (with multiplicity) of modulus = 1
    bool separable = true;
    bool valid_nlrs = true;                // no root of modulus < 1
    std::optional<size_t> dominating;      // index of the strictly largest root
};

namespace detail_alg {

/// Certified modulus comparison. Structural ties (conjugates, negations,
/// both on the unit circle) are recognized exactly; everything else resolves
/// by refinement.
inline int compare_modulus(const RootRecord& a, int ia, const RootRecord& b, int ib) {
    auto rank = [](ModClass m) {
        return m == ModClass::Greater1 ? 2 : (m == ModClass::Equal1 ? 1 : 0);
    };
    if (a.mod_class == ModClass::Equal1 && b.mod_class == ModClass::Equal1) return 0;
    if (rank(a.mod_class) != rank(b.mod_class))
        return rank(a.mod_class) > rank(b.mod_class) ? 1 : -1;
    // Less1 vs Less1 on the same side of the circle still needs refinement;
    // so does Greater1 vs Greater1.
    if (a.conj_of == ib && b.conj_of == ia) return 0;
    if (a.root.rational() && b.root.rational())
        return cmp(abs_rat(*a.root.rational()), abs_rat(*b.root.rational()));

    // negation / negated-conjugate structural tie
    auto reflected = [](const QPoly& f) {
        std::vector<Rat> c(f.c);
        for (size_t i = 1; i < c.size(); i += 2) c[i] = -c[i];
        return QPoly(std::move(c)).monic();
    };
    QPoly rb_poly = reflected(b.root.factor());
    bool maybe_negation = poly_gcd(a.root.factor(), rb_poly).degree() > 0;

    for (long t = -96;; t *= 2) {
        mpfr_prec_t p = static_cast<mpfr_prec_t>(-t + 32);
        RealEnclosure d = sub(abs2(a.root.enclosure(t), p), abs2(b.root.enclosure(t), p), p);
        if (d.is_positive()) return 1;
        if (d.is_negative()) return -1;
        if (maybe_negation) {
            ComplexEnclosure na = neg(a.root.enclosure(t));
            ComplexEnclosure bb = b.root.enclosure(t);
            if (bb.contains_strictly(na) || bb.contains_strictly(na.conj())) return 0;
        }
        if (t < -(1L << 22))
            throw PrecisionCapExceeded("modulus comparison undecided (no structural tie applies)");
    }
}

}  // namespace detail_alg

/// Isolates, classifies against the unit circle, and orders all roots of a
/// monic rational polynomial by descending modulus.
inline CharPoly classify_roots(const QPoly& P_in) {
    QPoly P = P_in.monic();
    if (P.degree() < 1) throw InvalidInput("classify_roots needs degree >= 1");
    CharPoly out;
    out.poly = P;

    auto factors = squarefree_factorization(P);
    for (const auto& [fac, mult] : factors) {
        if (mult > 1) out.separable = false;
        auto iso = isolate_roots(fac, -80);
        size_t base = out.roots.size();
        for (size_t i = 0; i < iso.size(); ++i) {
            RootRecord rec;
            rec.root = RootHandle(fac, iso[i]);
            rec.multiplicity = mult;
            rec.conj_of = iso[i].conj_of >= 0 ? static_cast<int>(base) + iso[i].conj_of : -1;
            out.roots.push_back(std::move(rec));
        }
    }
    for (auto& rec : out.roots) rec.mod_class = decide_modulus_vs_one(rec.root);

    // sort by descending modulus with certified comparisons (stable selection)
    std::vector<int> order(out.roots.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    auto cmp_idx = [&](int x, int y) {
        int c = detail_alg::compare_modulus(out.roots[x], x, out.roots[y], y);
        if (c != 0) return c > 0;
        return x < y;
    };
    std::stable_sort(order.begin(), order.end(), cmp_idx);
    std::vector<int> inv(order.size());
    for (size_t i = 0; i < order.size(); ++i) inv[order[i]] = static_cast<int>(i);
    std::vector<RootRecord> sorted;
    sorted.reserve(out.roots.size());
    for (size_t i = 0; i < order.size(); ++i) {
        RootRecord rec = std::move(out.roots[order[i]]);
        if (rec.conj_of >= 0) rec.conj_of = inv[rec.conj_of];
        sorted.push_back(std::move(rec));
    }
    out.roots = std::move(sorted);

    for (const auto& rec : out.roots) {
        if (rec.mod_class == ModClass::Greater1) out.r1 += rec.multiplicity;
        if (rec.mod_class == ModClass::Equal1) out.r2 += rec.multiplicity;
        if (rec.mod_class == ModClass::Less1) out.valid_nlrs = false;
    }
    if (!out.roots.empty()) {
        bool strict = true;
        for (size_t j = 1; j < out.roots.size() && strict; ++j)
            if (detail_alg::compare_modulus(out.roots[0], 0, out.roots[j], static_cast<int>(j)) <= 0)
                strict = false;
        if (strict && out.roots.size() > 1) out.dominating = 0;
        if (out.roots.size() == 1) out.dominating = 0;
    }
    return out;
}

/// The characteristic polynomial viewed through the lens of bounded linear
/// forms: all factors x - alpha with |alpha| < 1 stripped. The kept roots are
/// returned as refinable algebraic handles (their product need not have
/// rational coefficients).
struct NlrsReduction {
    QPoly original;
    std::vector<RootRecord> kept;      // modulus >= 1, sorted descending
    std::vector<RootRecord> stripped;  // modulus < 1
};

inline NlrsReduction reduce_to_nlrs_charpoly(const QPoly& P) {
    CharPoly cp = classify_roots(P);
    NlrsReduction red;
    red.original = cp.poly;
    for (auto& rec : cp.roots) {
        if (rec.mod_class == ModClass::Less1)
            red.stripped.push_back(rec);
        else
            red.kept.push_back(rec);
    }
    // conj indices are no longer meaningful after the split
    for (auto& r : red.kept) r.conj_of = -1;
    for (auto& r : red.stripped) r.conj_of = -1;
    return red;
}

inline NlrsReduction reduce_to_nlrs_charpoly(const NlrsReduction& r) { return r; }

// ---- irreducibility and minimal polynomials (small degrees) ----

namespace detail_alg {

/// Searches for a monic rational factor of `f` (monic, square-free) whose
/// root set is exactly {roots[i] : i in mask}. Coefficient denominators of
/// such a factor divide the leading coefficient of the primitive integer
/// form, which turns each coefficient into a lattice search plus one exact
/// division.
inline std::optional<QPoly> factor_for_subset(const QPoly& f,
                                              const std::vector<RootHandle>& roots,
                                              unsigned mask, const Int& lat) {
    size_t k = static_cast<size_t>(__builtin_popcount(mask));
    for (long t = -96;; t *= 2) {
        mpfr_prec_t p = static_cast<mpfr_prec_t>(-t + 32);
        // elementary symmetric functions via incremental product
        std::vector<ComplexEnclosure> esf(k + 1, ComplexEnclosure::exact(Rat(0), Rat(0), p));
        esf[0] = ComplexEnclosure::exact(Rat(1), Rat(0), p);
        size_t used = 0;
        for (size_t i = 0; i < roots.size(); ++i) {
            if (!(mask & (1u << i))) continue;
            ComplexEnclosure r = roots[i].enclosure(t);
            ++used;
            for (size_t j = used; j >= 1; --j)
                esf[j] = add(esf[j], mul(esf[j - 1], r, p), p);
        }
        // candidate rational coefficients with denominator dividing lat
        std::vector<Rat> coeffs(k + 1);
        coeffs[k] = Rat(1);
        bool pinned = true, excluded = false;
        for (size_t j = 1; j <= k && !excluded; ++j) {
            const ComplexEnclosure& e = esf[j];
            if (!e.im.contains_zero()) {
                excluded = true;
                break;
            }
            Rat lo = detail_roots::dyadic_of(e.re.lo()) * Rat(lat);
            Rat hi = detail_roots::dyadic_of(e.re.hi()) * Rat(lat);
            Int klo = ceil_rat(lo), khi = floor_rat(hi);
            if (khi < klo) {
                excluded = true;
                break;
            }
            if (khi > klo) {
                pinned = false;
                break;
            }
            Rat cand = Rat(klo) / Rat(lat);
            cand.canonicalize();
            // coefficient of x^{k-j} is (-1)^j e_j
            coeffs[k - j] = (j % 2 == 0) ? cand : Rat(-cand);
        }
        if (excluded) return std::nullopt;
        if (pinned) {
            QPoly cand(std::move(coeffs));
            auto [q, rem] = divmod(f, cand);
            (void)q;
            if (rem.is_zero()) return cand;
            return std::nullopt;
        }
        if (t < -(1L << 20)) return std::nullopt;
    }
}

inline std::vector<RootHandle> handles_of(const QPoly& squarefree) {
    auto iso = isolate_roots(squarefree, -80);
    std::vector<RootHandle> out;
    out.reserve(iso.size());
    for (auto& r : iso) out.emplace_back(squarefree, r);
    return out;
}

}  // namespace detail_alg

/// Finds a proper monic rational factor of a square-free monic rational
/// polynomial, or nothing if irreducible. Complete for the moderate degrees
/// (<= ~16) this library targets.
inline std::optional<QPoly> find_proper_factor(const QPoly& f) {
    long d = f.degree();
    if (d <= 1) return std::nullopt;
    ZPoly zf = primitive_part(f);

    // quick certificates from factor patterns mod small primes
    std::vector<long> possible;  // degrees a rational factor could have
    for (long i = 1; i < d; ++i) possible.push_back(i);
    for (uint64_t prm : {3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull,
                         37ull, 41ull, 43ull}) {
        auto pat = gfp::ddf_degrees(zf, prm);
        if (!pat) continue;
        // subset sums of the pattern
        std::vector<char> reach(d + 1, 0);
        reach[0] = 1;
        for (long blk : *pat)
            for (long s = d; s >= blk; --s)
                if (reach[s - blk]) reach[s] = 1;
        std::vector<long> next;
        for (long v : possible)
            if (reach[v]) next.push_back(v);
        possible = std::move(next);
        if (possible.empty()) return std::nullopt;  // certified irreducible
    }

    if (d > 16) throw IsolationError("irreducibility undecided beyond degree 16");
    Int lat = primitive_part(f).back();
    auto roots = detail_alg::handles_of(f);
    // subsets by ascending popcount; degree must be an allowed one
    std::vector<unsigned> masks;
    for (unsigned m = 1; m + 1 < (1u << d); ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [](unsigned a, unsigned b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    for (unsigned m : masks) {
        long k = __builtin_popcount(m);
        if (std::find(possible.begin(), possible.end(), k) == possible.end()) continue;
        if (auto g = detail_alg::factor_for_subset(f, roots, m, lat)) return g;
    }
    return std::nullopt;
}

inline bool certify_irreducible(const ZPoly& z) {
    long d = zdegree(z);
    if (d < 1) return false;
    QPoly f = to_qpoly(z).monic();
    if (!is_squarefree(f)) return false;
    if (d == 1) return true;
    return !find_proper_factor(f).has_value();
}

/// The monic irreducible factor of square-free `f` whose root is `h`.
inline QPoly minimal_polynomial_of(const QPoly& f, const RootHandle& h) {
    long d = f.degree();
    if (d == 1) return f.monic();
    QPoly cur = f.monic();
    // repeatedly split off the factor containing h
    for (;;) {
        auto g = find_proper_factor(cur);
        if (!g) return cur;
        QPoly cof = divexact(cur, *g);
        cur = detail_alg::root_of_part(h, *g, cof) ? g->monic() : cof.monic();
        if (cur.degree() == 1) return cur;
    }
}

// ---- validated algebraic numbers ----

/// An algebraic number: certified irreducible integer minimal polynomial plus
/// an isolating enclosure; all conjugates available as refinable handles.
class AlgebraicNumber {
    ZPoly minpoly_;
    QPoly monic_;
    std::vector<RootHandle> conjugates_;
    int index_ = -1;  // which conjugate this value is

  public:
    /// Empty handle; must be assigned from a factory before use.
    AlgebraicNumber() = default;
    bool valid() const { return index_ >= 0; }

    /// Trusted constructor from pre-isolated data (internal paths).
    static AlgebraicNumber from_irreducible(const QPoly& monic_irreducible, int index,
                                            std::vector<RootHandle> conj) {
        AlgebraicNumber a;
        a.monic_ = monic_irreducible.monic();
        a.minpoly_ = primitive_part(a.monic_);
        a.conjugates_ = std::move(conj);
        a.index_ = index;
        return a;
    }

    static AlgebraicNumber from_rational(const Rat& q) {
        AlgebraicNumber a;
        a.monic_ = QPoly(std::vector<Rat>{-q, Rat(1)});
        a.minpoly_ = primitive_part(a.monic_);
        a.conjugates_ = {RootHandle::from_rational(q)};
        a.index_ = 0;
        return a;
    }

    /// Validating constructor: certifies irreducibility and that the given
    /// box isolates exactly one root of the minimal polynomial.
    static AlgebraicNumber from_minpoly(const ZPoly& mp, const ComplexEnclosure& approx) {
        long d = zdegree(mp);
        if (d < 1) throw SchemaError("minpoly", "degree must be >= 1");
        if (!certify_irreducible(mp))
            throw IsolationError("minimal polynomial is not irreducible over Q");
        QPoly f = to_qpoly(mp).monic();
        auto handles = detail_alg::handles_of(f);
        int hit = -1;
        int hits = 0;
        for (long t = -80; t >= -4096 && hits != 1; t *= 2) {
            hit = -1;
            hits = 0;
            for (size_t i = 0; i < handles.size(); ++i) {
                if (!handles[i].enclosure(t).disjoint(approx)) {
                    hit = static_cast<int>(i);
                    ++hits;
                }
            }
            if (hits == 0) throw IsolationError("approximation does not isolate any root");
        }
        if (hits != 1) throw IsolationError("approximation intersects several root boxes");
        AlgebraicNumber a;
        a.monic_ = f;
        a.minpoly_ = mp;
        if (!a.minpoly_.empty() && a.minpoly_.back() < 0)
            for (auto& v : a.minpoly_) v = -v;
        a.conjugates_ = std::move(handles);
        a.index_ = hit;
        return a;
    }

    long degree() const { return static_cast<long>(monic_.degree()); }
    const ZPoly& minpoly() const { return minpoly_; }
    const QPoly& monic_minpoly() const { return monic_; }
    const RootHandle& root() const { return conjugates_[index_]; }
    const std::vector<RootHandle>& conjugates() const { return conjugates_; }
    bool is_rational() const { return degree() == 1; }
    std::optional<Rat> rational() const { return root().rational(); }
    bool is_real() const { return root().is_real(); }
    ComplexEnclosure enclosure(long target_log2) const { return root().enclosure(target_log2); }
    RealEnclosure real_enclosure(long target_log2) const {
        return root().real_enclosure(target_log2);
    }

    bool is_root_of_unity() const {
        long d = degree();
        // phi(m) = d forces m <= ~5.3 d ln ln d; a generous scan is cheap here
        unsigned long limit = static_cast<unsigned long>(64 + 8 * d * d);
        for (unsigned long m = 1; m <= limit; ++m) {
            unsigned long phi = 1;
            unsigned long n = m;
            for (unsigned long p = 2; p * p <= n; ++p) {
                if (n % p == 0) {
                    unsigned long pk = 1;
                    while (n % p == 0) {
                        n /= p;
                        pk *= p;
                    }
                    phi *= pk / p * (p - 1);
                }
            }
            if (n > 1) phi *= n - 1;
            if (phi != static_cast<unsigned long>(d)) continue;
            if (primitive_part(cyclotomic(m)) == minpoly_) return true;
        }
        return false;
    }

    /// Order of a root of unity (smallest m with value^m = 1).
    std::optional<unsigned long> root_of_unity_order() const {
        long d = degree();
        unsigned long limit = static_cast<unsigned long>(64 + 8 * d * d);
        for (unsigned long m = 1; m <= limit; ++m)
            if (primitive_part(cyclotomic(m)) == minpoly_) return m;
        return std::nullopt;
    }
};

/// Absolute logarithmic height via the defining formula over all conjugates;
/// unit-circle conjugates contribute exactly zero (decided symbolically).
inline RealEnclosure height(const AlgebraicNumber& beta, long target_log2 = -64) {
    long n = beta.degree();
    const Int& b0 = beta.minpoly().back();
    std::vector<ModClass> classes;
    classes.reserve(beta.conjugates().size());
    for (const auto& c : beta.conjugates()) classes.push_back(decide_modulus_vs_one(c));

    Int abs_b0 = abs(b0);
    for (long t = target_log2 - 16;; t *= 2) {
        mpfr_prec_t p = static_cast<mpfr_prec_t>(-t + 32);
        RealEnclosure acc = log_enc(RealEnclosure::exact(abs_b0, p), p);
        for (size_t i = 0; i < beta.conjugates().size(); ++i) {
            if (classes[i] != ModClass::Greater1) continue;  // log max(|b|,1) = 0
            RealEnclosure m2 = abs2(beta.conjugates()[i].enclosure(t), p);
            acc = add(acc, mul(log_enc(m2, p), RealEnclosure::exact(Rat(1, 2), p), p), p);
        }
        acc = div(acc, RealEnclosure::exact(Rat(n), p), p);
        if (acc.width_below(target_log2)) return acc;
        if (t < -(1L << 22)) throw PrecisionCapExceeded("height refinement stalled");
    }
}

// ---- multiplicative independence ----

struct MultiplicativeRelation {
    Int u, v;  // a^u * b^v = 1, verified exactly
};

namespace detail_alg {

/// Characteristic polynomial of the e-th power map on Q[x]/(f): the monic
/// polynomial whose roots are alpha_i^e. Companion-matrix power plus the
/// Faddeev-LeVerrier recursion, all exact.
inline QPoly charpoly_of_power(const QPoly& monic_f, unsigned long e) {
    long d = monic_f.degree();
    using Mat = std::vector<std::vector<Rat>>;
    auto matmul = [d](const Mat& A, const Mat& B) {
        Mat C(d, std::vector<Rat>(d, Rat(0)));
        for (long i = 0; i < d; ++i)
            for (long k = 0; k < d; ++k) {
                if (A[i][k] == 0) continue;
                for (long j = 0; j < d; ++j) C[i][j] += A[i][k] * B[k][j];
            }
        return C;
    };
    Mat M(d, std::vector<Rat>(d, Rat(0)));
    for (long i = 1; i < d; ++i) M[i][i - 1] = Rat(1);
    for (long i = 0; i < d; ++i) M[i][d - 1] = -monic_f.c[i];
    // M^e by binary powering
    Mat P(d, std::vector<Rat>(d, Rat(0)));
    for (long i = 0; i < d; ++i) P[i][i] = Rat(1);
    Mat base = M;
    unsigned long ee = e;
    while (ee) {
        if (ee & 1) P = matmul(P, base);
        base = matmul(base, base);
        ee >>= 1;
    }
    // Faddeev-LeVerrier on P
    std::vector<Rat> coef(d + 1, Rat(0));
    coef[d] = Rat(1);
    Mat N(d, std::vector<Rat>(d, Rat(0)));
    for (long i = 0; i < d; ++i) N[i][i] = Rat(1);
    for (long k = 1; k <= d; ++k) {
        N = matmul(P, N);
        Rat tr(0);
        for (long i = 0; i < d; ++i) tr += N[i][i];
        Rat ck = -tr / Rat(k);
        coef[d - k] = ck;
        for (long i = 0; i < d; ++i) N[i][i] += ck;
    }
    return QPoly(std::move(coef));
}

/// Monic minimal polynomial of 1/alpha (constant coefficient must be nonzero).
inline QPoly inverse_minpoly(const QPoly& monic_f) {
    if (monic_f.c[0] == 0) throw InvalidInput("inverse of zero algebraic value");
    return monic_f.reversed().monic();
}

/// Exact test a^u == b^w for algebraic a, b and integer exponents.
inline bool power_equal(const AlgebraicNumber& a, const Int& u, const AlgebraicNumber& b,
                        const Int& w) {
    if (a.is_rational() && b.is_rational()) {
        return pow_rat(*a.rational(), u.get_si()) == pow_rat(*b.rational(), w.get_si());
    }
    QPoly fa = u >= 0 ? a.monic_minpoly() : inverse_minpoly(a.monic_minpoly());
    QPoly fb = w >= 0 ? b.monic_minpoly() : inverse_minpoly(b.monic_minpoly());
    Int abs_u = abs(u), abs_w = abs(w);
    unsigned long eu = abs_u.get_ui();
    unsigned long ew = abs_w.get_ui();
    auto squarefree_part = [](const QPoly& q) {
        QPoly der_gcd = poly_gcd(q, q.derivative());
        return der_gcd.degree() > 0 ? divexact(q, der_gcd).monic() : q.monic();
    };
    QPoly sa = squarefree_part(charpoly_of_power(fa, eu));
    QPoly sb = squarefree_part(charpoly_of_power(fb, ew));
    QPoly g = poly_gcd(sa, sb);
    if (g.degree() <= 0) return false;
    QPoly cof_a = divexact(sa, g);  // coprime to g since sa is square-free
    QPoly cof_b = divexact(sb, g);

    // membership of a value (known to be a root of the ambient square-free
    // polynomial) in g versus the cofactor, decided by exclusion
    auto member_of_g = [&](const ComplexFn& val, const QPoly& cof) -> bool {
        if (cof.degree() <= 0) return true;
        for (mpfr_prec_t p = 96;; p *= 2) {
            ComplexEnclosure v = val(p);
            if (!abs2(g.eval(v, p), p).contains_zero()) return false;
            if (!abs2(cof.eval(v, p), p).contains_zero()) return true;
            if (p > (1L << 20)) throw PrecisionCapExceeded("power membership undecided");
        }
    };
    ComplexFn va = [&](mpfr_prec_t p) {
        return pow_int(a.enclosure(-static_cast<long>(p) - 8), u, p);
    };
    ComplexFn vb = [&](mpfr_prec_t p) {
        return pow_int(b.enclosure(-static_cast<long>(p) - 8), w, p);
    };
    if (!member_of_g(va, cof_a)) return false;
    if (!member_of_g(vb, cof_b)) return false;

    // both are roots of square-free g: equal iff within its separation bound
    Rat sep = g.degree() >= 2 ? separation_lower_bound(primitive_part(g)) : Rat(1);
    for (mpfr_prec_t p = 96;; p *= 2) {
        ComplexEnclosure diffe = sub(va(p), vb(p), p);
        RealEnclosure dist = sqrt_enc(abs2(diffe, p), p);
        if (certainly_less(dist, sep)) return true;
        if (diffe.re.excludes_zero() || diffe.im.excludes_zero()) return false;
        if (p > (1L << 20)) throw PrecisionCapExceeded("power equality undecided");
    }
}

}  // namespace detail_alg

/// Bounded multiplicative-independence test: finds a verified relation
/// a^u b^v = 1 with 0 < max(|u|,|v|) <= bound, or certifies none exists up to
/// the bound. Candidate exponent ratios come from continued-fraction
/// convergents of log|a| / log|b|.
inline std::optional<MultiplicativeRelation> multiplicative_independence(
    const AlgebraicNumber& a, const AlgebraicNumber& b, unsigned long bound = 64) {
    if ((a.is_rational() && *a.rational() == 0) || (b.is_rational() && *b.rational() == 0))
        throw InvalidInput("multiplicative independence needs nonzero values");

    if (auto ma = a.root_of_unity_order(); ma && *ma <= bound)
        return MultiplicativeRelation{Int(static_cast<long>(*ma)), Int(0)};
    if (auto mb = b.root_of_unity_order(); mb && *mb <= bound)
        return MultiplicativeRelation{Int(0), Int(static_cast<long>(*mb))};

    ModClass ca = decide_modulus_vs_one(a.root());
    ModClass cb = decide_modulus_vs_one(b.root());

    auto verify = [&](const Int& u, const Int& v) -> std::optional<MultiplicativeRelation> {
        if (u == 0 && v == 0) return std::nullopt;
        Int au = abs(u), av = abs(v);
        Int mx = au > av ? au : av;
        if (mx > Int(static_cast<unsigned long>(bound))) return std::nullopt;
        // a^u b^v = 1  <=>  a^u = b^(-v)
        if (detail_alg::power_equal(a, u, b, Int(-v))) return MultiplicativeRelation{u, v};
        return std::nullopt;
    };

    if (ca != ModClass::Equal1 && cb != ModClass::Equal1) {
        // screen candidate ratios u : v = log|b| : log|a|
        RealFn ratio = [&](mpfr_prec_t p) {
            long t = -static_cast<long>(p) - 8;
            RealEnclosure la = log_enc(abs2(a.enclosure(t), p), p);
            RealEnclosure lb = log_enc(abs2(b.enclosure(t), p), p);
            return div(la, lb, p);  // log|a|^2 / log|b|^2 = log|a|/log|b|
        };
        CFResult cf = continued_fraction(ratio, 64, PrecisionPolicy{128, 1 << 14});
        auto cands = cf.convergents;
        if (auto pc = cf.pending_convergent()) cands.push_back(*pc);
        for (const auto& [pp, qq] : cands) {
            if (qq == 0) continue;
            Int u = qq, v = -pp;
            Int au = abs(u), av = abs(v);
            if (au > Int(static_cast<unsigned long>(bound)) ||
                av > Int(static_cast<unsigned long>(bound)))
                continue;
            if (auto rel = verify(u, v)) return rel;
        }
        return std::nullopt;
    }
    if (ca == ModClass::Equal1 && cb == ModClass::Equal1) {
        // both on the unit circle and neither a (small) root of unity: screen
        // the argument ratio
        RealFn ratio = [&](mpfr_prec_t p) {
            long t = -static_cast<long>(p) - 8;
            RealEnclosure ta = arg_enclosure(a.enclosure(t), p);
            RealEnclosure tb = arg_enclosure(b.enclosure(t), p);
            return div(ta, tb, p);
        };
        CFResult cf = continued_fraction(ratio, 64, PrecisionPolicy{128, 1 << 14});
        auto cands = cf.convergents;
        if (auto pc = cf.pending_convergent()) cands.push_back(*pc);
        for (const auto& [pp, qq] : cands) {
            if (qq == 0) continue;
            Int u = qq, v = -pp;
            Int au = abs(u), av = abs(v);
            if (au > Int(static_cast<unsigned long>(bound)) ||
                av > Int(static_cast<unsigned long>(bound)))
                continue;
            if (auto rel = verify(u, v)) return rel;
        }
        return std::nullopt;
    }
    // one on the circle, one off: a relation would force the off-circle
    // exponent to zero and the on-circle value to be a root of unity
    return std::nullopt;
}

}  // namespace nlrs
