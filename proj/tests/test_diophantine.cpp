#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "nlrs/diophantine.hpp"

using namespace nlrs;

static AlgebraicNumber alg_rat(long n, long d = 1) {
    return AlgebraicNumber::from_rational(Rat(n, d));
}

static AlgebraicNumber eta45() {
    return AlgebraicNumber::from_minpoly(
        {Int(5), Int(-8), Int(5)},
        ComplexEnclosure{RealEnclosure::from_endpoints_rat(Rat(7, 10), Rat(9, 10), 64),
                         RealEnclosure::from_endpoints_rat(Rat(5, 10), Rat(7, 10), 64)});
}

TEST_CASE("continued fraction of 13/7") {
    auto r = continued_fraction_certified(RealInput::from_rat(Rat(13, 7)), 10);
    CHECK(r.exact);
    REQUIRE(r.quotients.size() == 3);
    CHECK(r.quotients[0] == 1);
    CHECK(r.quotients[1] == 1);
    CHECK(r.quotients[2] == 6);
    CHECK(r.convergents.back().first == 13);
    CHECK(r.convergents.back().second == 7);
}

TEST_CASE("continued fraction of the golden ratio is all ones") {
    Expr theta = (Expr::constant(Rat(1)) + Expr::sqrt(Expr::constant(Rat(5)))) *
                 Expr::constant(Rat(1, 2));
    auto r = continued_fraction_certified(RealInput::from_expr(theta), 20);
    REQUIRE(r.quotients.size() == 20);
    for (const auto& q : r.quotients) CHECK(q == 1);
    // convergents are ratios of consecutive Fibonacci numbers
    CHECK(r.convergents[5].first == 13);
    CHECK(r.convergents[5].second == 8);
}

TEST_CASE("continued fraction of log2/log3 against the frozen oracle") {
    // oracle values computed with an independent high-precision evaluation
    std::vector<long> expect{0, 1, 1, 1, 2, 2, 3, 1, 5, 2, 23, 2, 2, 1, 1, 55, 1, 4, 3, 1};
    Expr ratio = Expr::log(Expr::constant(Rat(2))) / Expr::log(Expr::constant(Rat(3)));
    auto r = continued_fraction_certified(RealInput::from_expr(ratio), expect.size());
    REQUIRE(r.quotients.size() == expect.size());
    for (size_t i = 0; i < expect.size(); ++i) CHECK(r.quotients[i] == expect[i]);
}

TEST_CASE("convergents satisfy |x - p/q| < 1/q^2") {
    Expr ratio = Expr::log(Expr::constant(Rat(2))) / Expr::log(Expr::constant(Rat(3)));
    auto r = continued_fraction_certified(RealInput::from_expr(ratio), 12);
    auto x = ratio.eval_real(512);
    for (const auto& [p, q] : r.convergents) {
        if (q == 0) continue;
        RealEnclosure diff = sub(x, RealEnclosure::exact(Rat(p) / Rat(q), 512), 512);
        CHECK(certainly_less(abs_enc(diff), Rat(1) / Rat(q * q)));
    }
}

TEST_CASE("shift construction for sqrt2 over 1") {
    Expr root2 = Expr::sqrt(Expr::constant(Rat(2)));
    auto shift = construct_shift(RealInput::from_expr(root2), RealInput::from_rat(Rat(1)),
                                 Rat(6, 5), 3);
    REQUIRE(shift.stages.size() == 3);
    for (const auto& st : shift.stages) CHECK(st.verified);
    CHECK(shift.stages.back().achieved_exact_zero);
    // the threshold schedule must strictly decrease
    for (size_t n = 1; n < shift.stages.size(); ++n) {
        const auto& prev = shift.stages[n - 1];
        const auto& cur = shift.stages[n];
        CHECK(cur.log2_eps <= prev.log2_eps - 1);
        // -(k'+m') log2(2C) as a rational upper estimate
        double l2 = std::log2(2 * 1.2);
        Int cum = prev.k_cum + prev.m_cum;
        Rat cap(-static_cast<long>(std::floor(l2 * cum.get_d() * 1024)), 1024);
        CHECK(cur.log2_eps <= cap + 1);
    }
    // c is positive (positive-side convergents) and below eps_1 < 1
    CHECK(shift.c_value.is_positive());
    CHECK(certainly_less(shift.c_value, Rat(1)));
}

TEST_CASE("shift construction depth 1: residual exactly zero") {
    Expr root2 = Expr::sqrt(Expr::constant(Rat(2)));
    auto shift = construct_shift(RealInput::from_expr(root2), RealInput::from_rat(Rat(1)),
                                 Rat(6, 5), 1);
    REQUIRE(shift.stages.size() == 1);
    CHECK(shift.stages[0].achieved_exact_zero);
    CHECK(shift.stages[0].verified);
}

TEST_CASE("shift construction rejects rational ratios") {
    CHECK_THROWS_AS(construct_shift(RealInput::from_rat(Rat(2)), RealInput::from_rat(Rat(1)),
                                    Rat(6, 5), 2),
                    InvalidInput);
}

TEST_CASE("gamma construction for 2 and 3 at small depth") {
    auto g = construct_gamma(alg_rat(2), alg_rat(3), Rat(21, 20), 2);
    REQUIRE(g.pairs.size() == 2);
    for (const auto& st : g.pairs) {
        CHECK(st.verified);
        CHECK_FALSE(st.dropped);
    }
    // gamma > 1
    CHECK(certainly_greater(g.gamma_value, Rat(1)));
    // frozen stage pairs for this parameterization (cumulative)
    CHECK(g.pairs[0].k_cum == 2);
    CHECK(g.pairs[0].m_cum == 1);
    CHECK(g.pairs[1].k_cum == 24729);
    CHECK(g.pairs[1].m_cum == 15602);
}

TEST_CASE("gamma construction rejects dependent bases") {
    CHECK_THROWS_AS(construct_gamma(alg_rat(2), alg_rat(4), Rat(21, 20), 2), DependentBases);
}

TEST_CASE("near identity search: fourth roots") {
    std::vector<ComplexFn> etas{[](mpfr_prec_t p) {
        return ComplexEnclosure::exact(Rat(0), Rat(1), p);
    }};
    CHECK(near_identity_search(etas, Rat(1, 10)) == 4);
}

TEST_CASE("near identity search: golden rotation hits 89") {
    // eta = exp(2 pi i / phi^2)
    Expr phi2 = (Expr::constant(Rat(3)) + Expr::sqrt(Expr::constant(Rat(5)))) *
                Expr::constant(Rat(1, 2));  // phi^2 = phi + 1
    Expr angle = Expr::constant(Rat(2)) * Expr::pi() / phi2;
    Expr ere = Expr::cos(angle), eim = Expr::sin(angle);
    std::vector<ComplexFn> etas{[ere, eim](mpfr_prec_t p) {
        return ComplexEnclosure{ere.eval_real(p), eim.eval_real(p)};
    }};
    CHECK(near_identity_search(etas, Rat(1, 20)) == 89);
}

TEST_CASE("near identity search: simultaneous pair vs scan oracle") {
    Expr a1 = Expr::constant(Rat(2)) * Expr::pi() * Expr::sqrt(Expr::constant(Rat(2)));
    Expr a2 = Expr::constant(Rat(2)) * Expr::pi() * Expr::sqrt(Expr::constant(Rat(3)));
    auto mk = [](Expr a) {
        Expr re = Expr::cos(a), im = Expr::sin(a);
        return ComplexFn([re, im](mpfr_prec_t p) {
            return ComplexEnclosure{re.eval_real(p), im.eval_real(p)};
        });
    };
    std::vector<ComplexFn> etas{mk(a1), mk(a2)};
    Int found = near_identity_search(etas, Rat(1, 2));

    // oracle: double-precision scan
    double t1 = 2 * 3.14159265358979323846 * std::sqrt(2.0);
    double t2 = 2 * 3.14159265358979323846 * std::sqrt(3.0);
    long expect = -1;
    for (long n = 1; n < 100000; ++n) {
        std::complex<double> z1 = std::polar(1.0, t1 * n), z2 = std::polar(1.0, t2 * n);
        if (std::abs(z1 - 1.0) < 0.5 && std::abs(z2 - 1.0) < 0.5) {
            expect = n;
            break;
        }
    }
    CHECK(found == expect);
}

TEST_CASE("near identity search budget") {
    std::vector<ComplexFn> etas{[](mpfr_prec_t p) {
        return ComplexEnclosure::exact(Rat(0), Rat(1), p);
    }};
    CHECK_THROWS_AS(near_identity_search(etas, Rat(1, 10), Int(3)), SearchBudgetExceeded);
}

TEST_CASE("fluctuating tail: depth 1 is exact") {
    auto eta = eta45();
    auto etabar = AlgebraicNumber::from_minpoly(eta.minpoly(), eta.enclosure(-64).conj());
    std::vector<ComplexFn> g1{[](mpfr_prec_t p) {
        return ComplexEnclosure::exact(Rat(1), Rat(0), p);
    }};
    auto tail = construct_fluctuating_tail({eta, etabar}, g1, Rat(2), 1);
    REQUIRE(tail.stages.size() == 1);
    CHECK(tail.stages[0].achieved_exact_zero);
    CHECK(tail.stages[0].verified);
    CHECK(tail.stages[0].n == 1);
    // gamma_r = -u_{n_1} = -(eta/etabar)^1 = -eta^2 = -(7+24i)/25
    auto gv = tail.gamma_r(256);
    CHECK(gv.re.contains(Rat(-7, 25)));
    CHECK(gv.im.contains(Rat(-24, 25)));
}

TEST_CASE("fluctuating tail: depth 2 verified indices") {
    auto eta = eta45();
    auto etabar = AlgebraicNumber::from_minpoly(eta.minpoly(), eta.enclosure(-64).conj());
    std::vector<ComplexFn> g1{[](mpfr_prec_t p) {
        return ComplexEnclosure::exact(Rat(1), Rat(0), p);
    }};
    auto tail = construct_fluctuating_tail({eta, etabar}, g1, Rat(2), 2);
    REQUIRE(tail.stages.size() == 2);
    for (const auto& st : tail.stages) CHECK(st.verified);
    CHECK(tail.stages[0].n == 1);
    CHECK(tail.stages[1].n > 1);
    CHECK(tail.stages[1].achieved_exact_zero);
}

TEST_CASE("fluctuating tail rejects all-roots-of-unity") {
    auto i_unit = AlgebraicNumber::from_minpoly(
        {Int(1), Int(0), Int(1)},
        ComplexEnclosure{RealEnclosure::from_endpoints_rat(Rat(-1, 10), Rat(1, 10), 64),
                         RealEnclosure::from_endpoints_rat(Rat(9, 10), Rat(11, 10), 64)});
    std::vector<ComplexFn> g1{[](mpfr_prec_t p) {
        return ComplexEnclosure::exact(Rat(1), Rat(0), p);
    }};
    CHECK_THROWS_AS(construct_fluctuating_tail({i_unit, alg_rat(1)}, g1, Rat(2), 2),
                    AllRootsOfUnity);
}

TEST_CASE("zero-rich factory at depth 2") {
    auto z = build_zero_rich(Rat(2), eta45(), Rat(2), 2, 120);
    REQUIRE(z.zero_indices.size() == 2);
    CHECK(z.zero_indices[0] == 1);
    // generated sequence vanishes at the certified in-range indices
    for (size_t i = 0; i < z.zero_indices.size(); ++i) {
        const Int& n = z.zero_indices[i];
        if (mpz_fits_ulong_p(n.get_mpz_t()) && n.get_ui() < z.covered.size())
            CHECK(z.covered.values[n.get_ui()] == 0);
    }
    CHECK(z.max_abs > 10);
    // spec roundtrip basics
    CHECK(z.spec.degree == 2);
    CHECK(z.spec.rounding == TargetRounding::NearestHalfUp);
    REQUIRE(z.spec.targets.size() == 2);
}
