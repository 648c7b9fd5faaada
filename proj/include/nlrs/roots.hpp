#pragma once

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include "nlrs/complexe.hpp"
#include "nlrs/polynomial.hpp"

namespace nlrs {

/// A certified isolating box: contains exactly one root of its polynomial.
struct IsolatedRoot {
    ComplexEnclosure box;
    bool real = false;
    std::optional<Rat> rational;  // exact value when the root is rational
    int conj_of = -1;             // index of the conjugate partner, -1 if real
};

namespace detail_roots {

/// Aberth-Ehrlich simultaneous iteration in long double; good enough to seed
/// certification for the moderate degrees this library handles.
inline std::vector<std::complex<long double>> aberth(const QPoly& f) {
    using C = std::complex<long double>;
    long d = f.degree();
    std::vector<C> coef(d + 1);
    for (long i = 0; i <= d; ++i) coef[i] = C(static_cast<long double>(f.c[i].get_d()), 0.0L);
    auto evalfd = [&](C z, C& fv, C& dv) {
        fv = coef[d];
        dv = C(0, 0);
        for (long i = d - 1; i >= 0; --i) {
            dv = dv * z + fv;
            fv = fv * z + coef[i];
        }
    };
    long double bound = 0;
    for (long i = 0; i < d; ++i) bound = std::max(bound, std::abs(coef[i] / coef[d]));
    bound += 1.0L;
    std::vector<C> z(d);
    for (long i = 0; i < d; ++i) {
        long double angle = 2.0L * 3.14159265358979323846L *
                                (0.26L + static_cast<long double>(i)) /
                                static_cast<long double>(d) +
                            0.4L;
        long double r = bound * (0.55L + 0.25L * static_cast<long double>(i % 3));
        z[i] = C(r * std::cos(angle), r * std::sin(angle));
    }
    for (int iter = 0; iter < 600; ++iter) {
        long double worst = 0;
        for (long i = 0; i < d; ++i) {
            C fv, dv;
            evalfd(z[i], fv, dv);
            if (std::abs(fv) == 0.0L) continue;
            C newton = (dv == C(0, 0)) ? C(1e-3L, 1e-3L) : fv / dv;
            C s(0, 0);
            for (long j = 0; j < d; ++j)
                if (j != i) s += C(1, 0) / (z[i] - z[j]);
            C w = newton / (C(1, 0) - newton * s);
            z[i] -= w;
            worst = std::max(worst, std::abs(w) / std::max(1.0L, std::abs(z[i])));
        }
        if (worst < 1e-17L) break;
    }
    return z;
}

/// One interval Newton contraction step for a real root: intersection of x
/// with mid - f(mid)/f'(x); empty when provably rootless.
inline std::optional<RealEnclosure> newton_step_real(const QPoly& f, const QPoly& df,
                                                     const RealEnclosure& x, mpfr_prec_t prec) {
    RealEnclosure m = x.mid();
    RealEnclosure fm = f.eval(m, prec);
    RealEnclosure dfx = df.eval(x, prec);
    if (!dfx.excludes_zero()) return x;  // cannot contract this round
    RealEnclosure cand = sub(m, div(fm, dfx, prec), prec);
    if (cand.disjoint(x)) return std::nullopt;
    return intersect(cand, x);
}

/// Krawczyk operator on a complex box. Returns the contracted box when
/// K(B) lies strictly inside B, which certifies a unique root in B.
inline std::optional<ComplexEnclosure> krawczyk(const QPoly& f, const QPoly& df,
                                                const ComplexEnclosure& box, mpfr_prec_t prec) {
    ComplexEnclosure m{box.re.mid(), box.im.mid()};
    ComplexEnclosure fm = f.eval(m, prec);
    ComplexEnclosure dfm = df.eval(m, prec);
    RealEnclosure dm2 = abs2(dfm, prec);
    if (!dm2.is_positive()) return std::nullopt;
    ComplexEnclosure dfB = df.eval(box, prec);
    ComplexEnclosure one = ComplexEnclosure::exact(Rat(1), Rat(0), prec);
    ComplexEnclosure newton = div(fm, dfm, prec);
    ComplexEnclosure slope = sub(one, div(dfB, dfm, prec), prec);
    ComplexEnclosure k =
        add(sub(m, newton, prec), mul(slope, sub(box, m, prec), prec), prec);
    if (box.contains_strictly(k)) return k;
    return std::nullopt;
}

inline Rat dyadic_of(mpfr_srcptr v) {
    RealEnclosure pt = RealEnclosure::from_mpfr(v, v, mpfr_get_prec(v));
    return pt.as_exact_rational().value();
}

}  // namespace detail_roots

/// Verifies that `box` contains exactly one root of square-free `f`,
/// returning a (possibly contracted) certified box.
inline std::optional<ComplexEnclosure> certify_unique_root(const QPoly& f,
                                                           const ComplexEnclosure& box,
                                                           mpfr_prec_t prec) {
    return detail_roots::krawczyk(f, f.derivative(), box, prec);
}

/// Contracts a certified isolating box until its width is at most
/// 2^target_log2. Real-flagged boxes stay exactly on the real axis.
inline ComplexEnclosure refine_root_box(const QPoly& f, const ComplexEnclosure& box_in,
                                        long target_log2, bool is_real) {
    QPoly df = f.derivative();
    ComplexEnclosure box = box_in;
    mpfr_prec_t prec = std::max<mpfr_prec_t>(128, box.prec());
    int stall = 0;
    while (!box.width_below(target_log2)) {
        long before = box.log2_width();
        if (is_real) {
            RealEnclosure re = box.re;
            if (re.prec() < prec) re = add(re, RealEnclosure::exact(Rat(0), prec), prec);
            auto nx = detail_roots::newton_step_real(f, df, re, prec);
            if (!nx) throw IsolationError("real Newton step emptied a certified box");
            box = ComplexEnclosure{*nx, RealEnclosure::exact(Rat(0), prec)};
        } else {
            ComplexEnclosure b = box;
            if (b.prec() < prec)
                b = add(b, ComplexEnclosure::exact(Rat(0), Rat(0), prec), prec);
            if (auto k = detail_roots::krawczyk(f, df, b, prec))
                box = ComplexEnclosure{intersect(k->re, b.re), intersect(k->im, b.im)};
        }
        long after = box.log2_width();
        if (after >= before) {
            ++stall;
            prec *= 2;
            if (prec > (1L << 26)) throw PrecisionCapExceeded("root refinement stalled");
        } else {
            stall = 0;
        }
    }
    return box;
}

/// Isolates all complex roots of a square-free rational polynomial with
/// certified, pairwise disjoint boxes. Coefficients are real, so conjugate
/// pairs come out exactly mirrored and real roots carry a zero-width
/// imaginary part.
inline std::vector<IsolatedRoot> isolate_roots(const QPoly& f_in, long target_log2 = -64) {
    QPoly f = f_in.monic();
    long d = f.degree();
    if (d < 1) throw InvalidInput("cannot isolate roots of a constant");
    if (!is_squarefree(f)) throw InvalidInput("isolate_roots requires a square-free polynomial");

    std::vector<IsolatedRoot> out;
    if (d == 1) {
        Rat r = -f.c[0] / f.c[1];
        r.canonicalize();
        IsolatedRoot ir;
        ir.box = ComplexEnclosure::exact(r, Rat(0), 128);
        ir.real = true;
        ir.rational = r;
        out.push_back(std::move(ir));
        return out;
    }

    QPoly df = f.derivative();
    auto sturm = sturm_sequence(f);

    // decides realness of a certified box whose imaginary range straddles 0;
    // refines until the box leaves the axis or a Sturm count confirms a real
    // root inside it
    auto classify_real = [&](ComplexEnclosure b,
                             mpfr_prec_t prec) -> std::optional<std::pair<ComplexEnclosure, bool>> {
        for (int rounds = 0; rounds < 256; ++rounds) {
            if (b.im.is_positive() || b.im.is_negative()) return {{b, false}};
            Rat a_lo = detail_roots::dyadic_of(b.re.lo());
            Rat a_hi = detail_roots::dyadic_of(b.re.hi());
            int cnt = count_real_roots(sturm, a_lo, a_hi);
            if (f.eval(a_lo) == 0) ++cnt;  // (a,b] count misses a root at the left end
            if (cnt >= 1) {
                // the unique root of the box must be that real root
                b = ComplexEnclosure{b.re, RealEnclosure::exact(Rat(0), b.re.prec())};
                return {{b, true}};
            }
            auto k = detail_roots::krawczyk(f, df, b, prec);
            if (k) {
                ComplexEnclosure nb{intersect(k->re, b.re), intersect(k->im, b.im)};
                if (nb.log2_width() >= b.log2_width()) prec *= 2;
                b = nb;
            } else {
                prec *= 2;
            }
            if (prec > (1L << 24)) return std::nullopt;
        }
        return std::nullopt;
    };

    for (mpfr_prec_t prec = 192; prec <= (1L << 22); prec *= 2) {
        auto approx = detail_roots::aberth(f);
        std::vector<ComplexEnclosure> boxes;
        bool all_ok = true;
        for (long i = 0; i < d && all_ok; ++i) {
            long double mind = 1e30L;
            for (long j = 0; j < d; ++j)
                if (j != i) mind = std::min(mind, std::abs(approx[i] - approx[j]));
            ComplexEnclosure z{
                RealEnclosure::point_double(static_cast<double>(approx[i].real()), prec),
                RealEnclosure::point_double(static_cast<double>(approx[i].imag()), prec)};
            for (int it = 0; it < 50; ++it) {
                ComplexEnclosure fv = f.eval(z, prec);
                ComplexEnclosure dv = df.eval(z, prec);
                if (!abs2(dv, prec).is_positive()) break;
                ComplexEnclosure nz = sub(z, div(fv, dv, prec), prec);
                z = ComplexEnclosure{nz.re.mid(), nz.im.mid()};
            }
            bool ok = false;
            double r0 = static_cast<double>(mind) / 8.0;
            if (!(r0 > 0) || r0 > 1e28) r0 = 1e-3;
            for (int attempt = 0; attempt < 36 && !ok; ++attempt) {
                double r = r0 * std::pow(0.25, attempt % 6) * std::pow(16.0, attempt / 6);
                auto rad = RealEnclosure::point_double(r, prec);
                ComplexEnclosure cand = widen(z, rad);
                if (auto k = detail_roots::krawczyk(f, df, cand, prec)) {
                    boxes.push_back(
                        ComplexEnclosure{intersect(k->re, cand.re), intersect(k->im, cand.im)});
                    ok = true;
                }
            }
            if (!ok) all_ok = false;
        }
        if (!all_ok || static_cast<long>(boxes.size()) != d) continue;

        bool disjoint = true;
        for (size_t i = 0; i < boxes.size() && disjoint; ++i)
            for (size_t j = i + 1; j < boxes.size(); ++j)
                if (!boxes[i].disjoint(boxes[j])) {
                    disjoint = false;
                    break;
                }
        if (!disjoint) continue;

        std::vector<IsolatedRoot> roots(boxes.size());
        bool classified = true;
        for (size_t i = 0; i < boxes.size() && classified; ++i) {
            auto res = classify_real(boxes[i], prec);
            if (!res) {
                classified = false;
                break;
            }
            roots[i].box = res->first;
            roots[i].real = res->second;
        }
        if (!classified) continue;

        // conjugate partners: refine the positive-imaginary box until its
        // mirror meets exactly one other box
        bool paired = true;
        for (size_t i = 0; i < roots.size() && paired; ++i) {
            if (roots[i].real || roots[i].conj_of >= 0 || !roots[i].box.im.is_positive()) continue;
            for (int rounds = 0;; ++rounds) {
                ComplexEnclosure mirror = roots[i].box.conj();
                int hit = -1, hits = 0;
                for (size_t j = 0; j < roots.size(); ++j) {
                    if (j == i || roots[j].real) continue;
                    if (!roots[j].box.im.is_negative()) continue;
                    if (!roots[j].box.disjoint(mirror)) {
                        hit = static_cast<int>(j);
                        ++hits;
                    }
                }
                if (hits == 1) {
                    roots[hit].box = mirror;
                    roots[hit].conj_of = static_cast<int>(i);
                    roots[i].conj_of = hit;
                    break;
                }
                long w = roots[i].box.log2_width();
                if (rounds > 200 || w == LONG_MIN) {
                    paired = false;
                    break;
                }
                roots[i].box = refine_root_box(f, roots[i].box, w - 8, false);
            }
        }
        if (!paired) continue;

        // tighten to the requested width, mirroring the conjugates
        for (size_t i = 0; i < roots.size(); ++i) {
            if (roots[i].conj_of >= 0 && roots[i].box.im.is_negative()) continue;
            roots[i].box = refine_root_box(f, roots[i].box, target_log2, roots[i].real);
        }
        for (size_t i = 0; i < roots.size(); ++i)
            if (roots[i].conj_of >= 0 && roots[i].box.im.is_negative())
                roots[i].box = roots[roots[i].conj_of].box.conj();

        return roots;
    }
    throw PrecisionCapExceeded("could not certify a complete root isolation");
}

}  // namespace nlrs
