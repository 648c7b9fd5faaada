#include <catch2/catch_amalgamated.hpp>

#include "nlrs/algebraic.hpp"

using namespace nlrs;

static QPoly make(std::initializer_list<long> asc) {
    std::vector<Rat> c;
    for (long v : asc) c.emplace_back(v);
    return QPoly(std::move(c));
}

TEST_CASE("classify x - 3/2") {
    QPoly p(std::vector<Rat>{Rat(-3, 2), Rat(1)});
    CharPoly cp = classify_roots(p);
    REQUIRE(cp.roots.size() == 1);
    CHECK(cp.r1 == 1);
    CHECK(cp.r2 == 0);
    CHECK(cp.valid_nlrs);
    CHECK(cp.separable);
    REQUIRE(cp.dominating.has_value());
    CHECK(cp.roots[0].root.rational().value() == Rat(3, 2));
}

TEST_CASE("classify x^2 - x - 1 is not a valid nlrs charpoly") {
    CharPoly cp = classify_roots(make({-1, -1, 1}));
    REQUIRE(cp.roots.size() == 2);
    CHECK(cp.r1 == 1);
    CHECK(cp.r2 == 0);
    CHECK_FALSE(cp.valid_nlrs);  // psi has modulus < 1
    CHECK(cp.roots[0].mod_class == ModClass::Greater1);
    CHECK(cp.roots[1].mod_class == ModClass::Less1);
    // sorted descending: theta first
    CHECK(certainly_greater(cp.roots[0].root.enclosure(-40).re, Rat(1)));
}

TEST_CASE("classify (x-2)(x^2+1): r1=1, r2=2, dominating 2") {
    QPoly p = make({-2, 1}) * make({1, 0, 1});
    CharPoly cp = classify_roots(p);
    REQUIRE(cp.roots.size() == 3);
    CHECK(cp.r1 == 1);
    CHECK(cp.r2 == 2);
    CHECK(cp.valid_nlrs);
    REQUIRE(cp.dominating.has_value());
    CHECK(cp.roots[*cp.dominating].root.enclosure(-40).re.contains(Rat(2)));
    CHECK(cp.roots[*cp.dominating].root.is_real());
    CHECK(cp.roots[1].mod_class == ModClass::Equal1);
    CHECK(cp.roots[2].mod_class == ModClass::Equal1);
}

TEST_CASE("unit circle detection for non-cyclotomic circle points") {
    // 5x^2 - 8x + 5: roots (4±3i)/5 on the unit circle, not roots of unity
    QPoly p(std::vector<Rat>{Rat(1), Rat(-8, 5), Rat(1)});
    CharPoly cp = classify_roots(p);
    CHECK(cp.r1 == 0);
    CHECK(cp.r2 == 2);
    for (auto& r : cp.roots) CHECK(r.mod_class == ModClass::Equal1);
}

TEST_CASE("salem-like mixed circle/off-circle self-reciprocal polynomial") {
    // (5x^2-8x+5)/5 * (x-2)(x-1/2): palindromic overall; roots on and off circle
    QPoly p = QPoly(std::vector<Rat>{Rat(1), Rat(-8, 5), Rat(1)}) * make({-2, 1}) *
              QPoly(std::vector<Rat>{Rat(-1, 2), Rat(1)});
    CharPoly cp = classify_roots(p);
    CHECK(cp.r1 == 1);
    CHECK(cp.r2 == 2);
    CHECK_FALSE(cp.valid_nlrs);  // root 1/2 inside the disk
}

TEST_CASE("multiplicity handling") {
    QPoly p = make({-2, 1}) * make({-2, 1}) * make({-1, -1, 1});
    CharPoly cp = classify_roots(p);
    CHECK_FALSE(cp.separable);
    int total_mult = 0;
    for (auto& r : cp.roots) total_mult += r.multiplicity;
    CHECK(total_mult == 4);
}

TEST_CASE("reduction strips only the small roots") {
    // x^2-x-1 -> keep theta only
    auto red = reduce_to_nlrs_charpoly(make({-1, -1, 1}));
    REQUIRE(red.kept.size() == 1);
    REQUIRE(red.stripped.size() == 1);
    CHECK(certainly_greater(red.kept[0].root.enclosure(-40).re, Rat(1)));
    // x - 2 -> nothing stripped
    auto red2 = reduce_to_nlrs_charpoly(make({-2, 1}));
    CHECK(red2.kept.size() == 1);
    CHECK(red2.stripped.empty());
    // (x^2-x-1)(x-2) -> theta and 2 kept
    auto red3 = reduce_to_nlrs_charpoly(make({-1, -1, 1}) * make({-2, 1}));
    CHECK(red3.kept.size() == 2);
    CHECK(red3.stripped.size() == 1);
    // idempotent by construction
    auto red4 = reduce_to_nlrs_charpoly(red3);
    CHECK(red4.kept.size() == red3.kept.size());
}

TEST_CASE("irreducibility certification") {
    CHECK(certify_irreducible({Int(-1), Int(-1), Int(1)}));                // x^2-x-1
    CHECK(certify_irreducible({Int(1), Int(0), Int(0), Int(0), Int(1)}));  // x^4+1
    CHECK(certify_irreducible({Int(4), Int(0), Int(1)}));                  // x^2+4
    CHECK(certify_irreducible({Int(5), Int(-8), Int(5)}));                 // 5x^2-8x+5
    CHECK_FALSE(certify_irreducible({Int(6), Int(-5), Int(1)}));           // (x-2)(x-3)
    CHECK_FALSE(certify_irreducible({Int(1), Int(0), Int(2), Int(0), Int(1)}));  // (x^2+1)^2
    CHECK_FALSE(certify_irreducible({Int(2), Int(3), Int(2), Int(3)}));    // (3x+2)(x^2+1)? check below
}

TEST_CASE("non-monic reducible quartic via lattice search") {
    // (2x^2+1)(3x^2+x+1) = 6x^4+2x^3+5x^2+x+1
    CHECK_FALSE(certify_irreducible({Int(1), Int(1), Int(5), Int(2), Int(6)}));
}

TEST_CASE("minimal polynomial extraction from a reducible square-free factor") {
    QPoly f = make({-1, -1, 1}) * make({-2, 1});  // roots theta, psi, 2
    auto handles = detail_alg::handles_of(f);
    for (auto& h : handles) {
        QPoly mp = minimal_polynomial_of(f, h);
        if (h.enclosure(-40).re.contains(Rat(2))) {
            CHECK(mp == make({-2, 1}).monic());
        } else {
            CHECK(mp == make({-1, -1, 1}).monic());
        }
    }
}

TEST_CASE("algebraic number heights") {
    // h(2) = log 2
    auto two = AlgebraicNumber::from_rational(Rat(2));
    auto h2 = height(two, -60);
    CHECK(certainly_greater(h2, Rat(693147, 1000000)));
    CHECK(certainly_less(h2, Rat(693148, 1000000)));

    // h(1/2) = log 2 as well
    auto half = AlgebraicNumber::from_rational(Rat(1, 2));
    auto hh = height(half, -60);
    CHECK(certainly_greater(hh, Rat(693147, 1000000)));
    CHECK(certainly_less(hh, Rat(693148, 1000000)));

    // h(theta) = (1/2) log theta = 0.2406059...
    auto theta = AlgebraicNumber::from_minpoly(
        {Int(-1), Int(-1), Int(1)},
        ComplexEnclosure{RealEnclosure::from_endpoints_rat(Rat(16, 10), Rat(17, 10), 64),
                         RealEnclosure::from_endpoints_rat(Rat(-1, 100), Rat(1, 100), 64)});
    auto ht = height(theta, -60);
    CHECK(certainly_greater(ht, Rat(2406059, 10000000)));
    CHECK(certainly_less(ht, Rat(2406060, 10000000)));
}

TEST_CASE("height of a root of unity contains zero") {
    // primitive 12th root of unity: Phi_12 = x^4 - x^2 + 1
    auto z = AlgebraicNumber::from_minpoly(
        {Int(1), Int(0), Int(-1), Int(0), Int(1)},
        ComplexEnclosure{RealEnclosure::from_endpoints_rat(Rat(85, 100), Rat(88, 100), 64),
                         RealEnclosure::from_endpoints_rat(Rat(45, 100), Rat(55, 100), 64)});
    CHECK(z.is_root_of_unity());
    auto h = height(z, -40);
    CHECK(h.contains(Rat(0)));
    CHECK(h.width_below(-38));
}

TEST_CASE("height is invariant under reciprocal for rationals") {
    for (long n : {2L, 3L, 7L, 10L}) {
        auto a = AlgebraicNumber::from_rational(Rat(n, 1));
        auto b = AlgebraicNumber::from_rational(Rat(1, n));
        auto ha = height(a, -50), hb = height(b, -50);
        CHECK_FALSE(sub(ha, hb, 128).excludes_zero());
    }
}

TEST_CASE("multiplicative dependence examples") {
    auto two = AlgebraicNumber::from_rational(Rat(2));
    auto three = AlgebraicNumber::from_rational(Rat(3));
    auto four = AlgebraicNumber::from_rational(Rat(4));
    auto eight = AlgebraicNumber::from_rational(Rat(8));

    auto r28 = multiplicative_independence(two, eight, 64);
    REQUIRE(r28.has_value());
    CHECK(pow_rat(Rat(2), r28->u.get_si()) * pow_rat(Rat(8), r28->v.get_si()) == 1);
    CHECK(r28->u == 3);
    CHECK(r28->v == -1);

    auto r48 = multiplicative_independence(four, eight, 64);
    REQUIRE(r48.has_value());
    CHECK(r48->u == 3);
    CHECK(r48->v == -2);

    auto r23 = multiplicative_independence(two, three, 64);
    CHECK_FALSE(r23.has_value());
}

TEST_CASE("exhaustive oracle agrees on small rational pairs") {
    // oracle: exhaustive exact check of all exponent pairs up to 8
    auto dependent_oracle = [](const Rat& a, const Rat& b, long bound) {
        for (long u = -bound; u <= bound; ++u)
            for (long v = -bound; v <= bound; ++v) {
                if (u == 0 && v == 0) continue;
                if (pow_rat(a, u) * pow_rat(b, v) == 1) return true;
            }
        return false;
    };
    std::vector<std::pair<long, long>> pairs{{2, 8}, {2, 3}, {4, 8}, {9, 27}, {5, 7}, {6, 36}};
    for (auto [x, y] : pairs) {
        auto a = AlgebraicNumber::from_rational(Rat(x));
        auto b = AlgebraicNumber::from_rational(Rat(y));
        bool dep = multiplicative_independence(a, b, 8).has_value();
        CAPTURE(x, y);
        CHECK(dep == dependent_oracle(Rat(x), Rat(y), 8));
    }
}

TEST_CASE("root of unity detection") {
    auto i_unit = AlgebraicNumber::from_minpoly(
        {Int(1), Int(0), Int(1)},
        ComplexEnclosure{RealEnclosure::from_endpoints_rat(Rat(-1, 10), Rat(1, 10), 64),
                         RealEnclosure::from_endpoints_rat(Rat(9, 10), Rat(11, 10), 64)});
    CHECK(i_unit.is_root_of_unity());
    CHECK(i_unit.root_of_unity_order().value() == 4);

    // (4+3i)/5 has minpoly 5x^2-8x+5: on the circle but not a root of unity
    auto eta = AlgebraicNumber::from_minpoly(
        {Int(5), Int(-8), Int(5)},
        ComplexEnclosure{RealEnclosure::from_endpoints_rat(Rat(7, 10), Rat(9, 10), 64),
                         RealEnclosure::from_endpoints_rat(Rat(5, 10), Rat(7, 10), 64)});
    CHECK_FALSE(eta.is_root_of_unity());
    CHECK(decide_modulus_vs_one(eta.root()) == ModClass::Equal1);
}

TEST_CASE("validation rejects bad input") {
    CHECK_THROWS_AS(AlgebraicNumber::from_minpoly({Int(6), Int(-5), Int(1)},
                                                  ComplexEnclosure::exact(Rat(2), Rat(0), 64)),
                    IsolationError);  // reducible
    CHECK_THROWS_AS(
        AlgebraicNumber::from_minpoly(
            {Int(-1), Int(-1), Int(1)},
            ComplexEnclosure{RealEnclosure::from_endpoints_rat(Rat(9), Rat(11), 64),
                             RealEnclosure::from_endpoints_rat(Rat(-1), Rat(1), 64)}),
        IsolationError);  // box isolates no root
}

TEST_CASE("multiplying out classified roots reproduces the polynomial") {
    QPoly p = make({-2, 1}) * make({1, 0, 1}) * make({-1, -1, 1});
    CharPoly cp = classify_roots(p);
    mpfr_prec_t pr = 256;
    // product of (x - root)^mult as enclosure coefficients
    std::vector<ComplexEnclosure> coef{ComplexEnclosure::exact(Rat(1), Rat(0), pr)};
    for (const auto& rec : cp.roots) {
        for (int t = 0; t < rec.multiplicity; ++t) {
            ComplexEnclosure r = rec.root.enclosure(-120);
            std::vector<ComplexEnclosure> next(coef.size() + 1,
                                               ComplexEnclosure::exact(Rat(0), Rat(0), pr));
            for (size_t i = 0; i < coef.size(); ++i) {
                next[i + 1] = add(next[i + 1], coef[i], pr);
                next[i] = sub(next[i], mul(coef[i], r, pr), pr);
            }
            coef = std::move(next);
        }
    }
    QPoly monic = p.monic();
    REQUIRE(coef.size() == static_cast<size_t>(monic.degree() + 1));
    for (size_t i = 0; i < coef.size(); ++i) {
        CAPTURE(i);
        CHECK(coef[i].re.contains(monic.c[i]));
        CHECK(coef[i].im.contains_zero());
    }
}
