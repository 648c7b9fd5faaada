#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nlrs/binet.hpp"

using namespace nlrs;

static QPoly make(std::initializer_list<long> asc) {
    std::vector<Rat> c;
    for (long v : asc) c.emplace_back(v);
    return QPoly(std::move(c));
}

TEST_CASE("binet coefficients for Fibonacci: 1/sqrt5, -1/sqrt5") {
    CharPoly cp = classify_roots(make({-1, -1, 1}));
    std::vector<RootHandle> roots{cp.roots[0].root, cp.roots[1].root};
    auto g = binet_coefficients(roots, {Rat(0), Rat(1)}, -80);
    // oracle: 1/sqrt(5) = 0.44721359...
    auto s5 = sqrt_enc(RealEnclosure::exact(Rat(5), 256), 256);
    auto inv = div(RealEnclosure::exact(Rat(1), 256), s5, 256);
    CHECK_FALSE(g[0].re.disjoint(inv));       // g for theta = +1/sqrt5
    CHECK_FALSE(g[1].re.disjoint(neg(inv)));  // g for psi = -1/sqrt5
    CHECK(g[0].im.contains_zero());
    // reproduce the initial terms within containment
    for (long n = 0; n < 2; ++n) {
        ComplexEnclosure acc = ComplexEnclosure::exact(Rat(0), Rat(0), 256);
        for (size_t i = 0; i < 2; ++i)
            acc = add(acc, mul(g[i], pow_int(roots[i].enclosure(-80), Int(n), 256), 256), 256);
        CHECK(acc.re.contains(Rat(n)));  // a_0 = 0, a_1 = 1
        CHECK(acc.im.contains_zero());
    }
}

TEST_CASE("binet coefficients: single root and Lucas") {
    // P = x - 2, a_0 = 3 -> g = 3
    auto g1 = binet_coefficients({RootHandle::from_rational(Rat(2))}, {Rat(3)}, -40);
    CHECK(g1[0].re.contains(Rat(3)));
    // Lucas on x^2-x-1: g~ = (1, 1)
    CharPoly cp = classify_roots(make({-1, -1, 1}));
    auto g = binet_coefficients({cp.roots[0].root, cp.roots[1].root}, {Rat(2), Rat(1)}, -80);
    CHECK(g[0].re.contains(Rat(1)));
    CHECK(g[1].re.contains(Rat(1)));
    CHECK(g[0].width_below(-78));
}

TEST_CASE("c series: zero errors and geometric errors") {
    auto two = RootHandle::from_rational(Rat(2));
    auto zero_err = [](size_t, mpfr_prec_t p) { return RealEnclosure::exact(Rat(0), p); };
    auto cs = c_enclosure(two.refiner(), zero_err, 50, Rat(0), 256);
    CHECK(cs.value.re.contains(Rat(0)));
    CHECK(cs.value.width_below(-240));

    // e_j = 1 for all j, alpha = 2: c = sum 2^{-j} = 1
    auto one_err = [](size_t, mpfr_prec_t p) { return RealEnclosure::exact(Rat(1), p); };
    auto cs2 = c_enclosure(two.refiner(), one_err, 60, Rat(1), 256);
    CHECK(cs2.value.re.contains(Rat(1)));
}

TEST_CASE("c series modulus guard") {
    auto one = RootHandle::from_rational(Rat(1));
    auto err = [](size_t, mpfr_prec_t p) { return RealEnclosure::exact(Rat(0), p); };
    CHECK_THROWS_AS(c_enclosure(one.refiner(), err, 10, Rat(1), 128), ModulusNotAboveOne);
}

TEST_CASE("c-series nesting for floor powers of 3/2") {
    NlrsSpec s;
    s.degree = 1;
    s.coefficients.emplace_back(Rat(-3, 2));
    s.rule = RuleKind::Target;
    s.targets.push_back({Expr::constant(Rat(1)), AlgebraicNumber::from_rational(Rat(3, 2))});
    s.rounding = TargetRounding::Floor;
    auto seq = generate(s, 200);
    auto alpha = RootHandle::from_rational(Rat(3, 2));
    std::vector<Rat> errs(seq.errors_exact.begin() + 1, seq.errors_exact.end());
    Rat E = seq.apriori_bound;
    std::optional<ComplexEnclosure> prev;
    for (size_t N : {10u, 20u, 40u, 80u}) {
        std::vector<Rat> head(errs.begin(), errs.begin() + N);
        auto cs = c_enclosure(alpha.refiner(), head, E, 512);
        if (prev) {
            CHECK(prev->re.contains_strictly(cs.value.re));
        }
        prev = cs.value;
    }
    // oracle: N = 200 partial sum approximates the limit; the N = 80 box
    // must contain the oracle value
    auto oracle = c_enclosure(alpha.refiner(), errs, E, 512);
    CHECK_FALSE(prev->re.disjoint(oracle.value.re));
}

TEST_CASE("asymptotic coefficients: pure lrs 2^n") {
    NlrsSpec s;
    s.degree = 1;
    s.coefficients.emplace_back(Rat(-2));
    s.rule = RuleKind::Target;
    s.targets.push_back({Expr::constant(Rat(1)), AlgebraicNumber::from_rational(Rat(2))});
    s.rounding = TargetRounding::Floor;
    auto seq = generate(s, 120);
    auto rep = asymptotic_coefficients(s, seq, -64, Rat(1, 2), 40);
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.r1 == 1);
    CHECK(rep.r2 == 0);
    REQUIRE(rep.entries[0].beta.has_value());
    CHECK(rep.entries[0].beta->re.contains(Rat(1)));
    CHECK(rep.entries[0].beta_nonzero);
    CHECK(rep.residuals.max_residual < Rat(1, 1000));
    CHECK(rep.residuals.growth_class == "bounded");
}

TEST_CASE("asymptotic coefficients: Fibonacci viewed with d = 1") {
    // P = x - theta, a_0 = 0, e_j = psi^{j-1}: beta = 1/sqrt5
    auto theta = AlgebraicNumber::from_minpoly(
        {Int(-1), Int(-1), Int(1)},
        ComplexEnclosure{RealEnclosure::from_endpoints_rat(Rat(16, 10), Rat(17, 10), 64),
                         RealEnclosure::from_endpoints_rat(Rat(-1, 100), Rat(1, 100), 64)});
    NlrsSpec s;
    s.degree = 1;
    s.coefficients.emplace_back(negate(theta));
    s.initial = {Rat(0)};
    s.rule = RuleKind::ExplicitErrors;  // carrier only; values injected below
    s.error_bound = Rat(1);

    // seq: Fibonacci numbers with inexact (enclosure) errors
    GeneratedSequence seq;
    seq.spec = s;
    Int f0 = 0, f1 = 1;
    for (int i = 0; i <= 120; ++i) {
        seq.values.emplace_back(f0);
        Int t = f0 + f1;
        f0 = f1;
        f1 = t;
    }
    seq.integer_values = true;
    seq.errors_are_exact = false;
    seq.apriori_bound = Rat(1);  // |e_n| = |psi|^{n-1} <= 1

    auto rep = asymptotic_coefficients(s, seq, -80, Rat(1, 2), 60);
    REQUIRE(rep.entries.size() == 1);
    REQUIRE(rep.entries[0].beta.has_value());
    auto s5 = sqrt_enc(RealEnclosure::exact(Rat(5), 512), 512);
    auto inv = div(RealEnclosure::exact(Rat(1), 512), s5, 512);
    CHECK_FALSE(rep.entries[0].beta->re.disjoint(inv));
    CHECK(rep.entries[0].beta->width_below(-70));
    CHECK(rep.entries[0].beta_nonzero);
    // residual |F_n - theta^n/sqrt5| = psi^n/sqrt5 <= 0.448
    CHECK(rep.residuals.max_residual < Rat(45, 100));
    CHECK(rep.residuals.growth_class == "bounded");
}

TEST_CASE("floor powers of 3/2: beta = 1 + c(3/2), residual within bound") {
    NlrsSpec s;
    s.degree = 1;
    s.coefficients.emplace_back(Rat(-3, 2));
    s.rule = RuleKind::Target;
    s.targets.push_back({Expr::constant(Rat(1)), AlgebraicNumber::from_rational(Rat(3, 2))});
    s.rounding = TargetRounding::Floor;
    auto seq = generate(s, 200);
    auto rep = asymptotic_coefficients(s, seq, -64, Rat(1, 2), 110);
    REQUIRE(rep.entries.size() == 1);
    const auto& ent = rep.entries[0];
    REQUIRE(ent.beta.has_value());
    REQUIRE(ent.c_alpha.has_value());
    // beta = g~ + g^ c = 1 + c(3/2)
    ComplexEnclosure expect = add(ComplexEnclosure::exact(Rat(1), Rat(0), 256), *ent.c_alpha, 256);
    CHECK_FALSE(ent.beta->re.disjoint(expect.re));
    CHECK(ent.beta_nonzero);
    // observed residual never exceeds the derived bound (r2 = 0: constant)
    CHECK(rep.residuals.bound_linear == 0);
    CHECK(rep.residuals.max_residual <= rep.residuals.bound_const);
    CHECK(rep.residuals.growth_class == "bounded");
}

TEST_CASE("linear-growth residual classified as linear") {
    // a_n = 2^n + n: subtracting beta 2^n leaves n
    NlrsSpec s;
    s.degree = 1;
    s.coefficients.emplace_back(Rat(-2));
    s.initial = {Rat(1)};
    s.rule = RuleKind::ExplicitErrors;
    s.error_bound = Rat(2);
    GeneratedSequence seq;
    seq.spec = s;
    Int p2(1);
    for (size_t n = 0; n <= 64; ++n) {
        seq.values.push_back(Rat(p2 + Int(static_cast<long>(n))));
        p2 *= 2;
    }
    seq.integer_values = true;
    seq.errors_are_exact = true;
    seq.errors_exact.push_back(Rat(0));
    for (size_t n = 1; n <= 64; ++n)
        seq.errors_exact.push_back(seq.values[n] - Rat(2) * seq.values[n - 1]);
    seq.apriori_bound = Rat(2);
    seq.observed_bound = Rat(1);

    std::vector<ComplexEnclosure> betas{ComplexEnclosure::exact(Rat(1), Rat(0), 256)};
    std::vector<RootHandle> alphas{RootHandle::from_rational(Rat(2))};
    std::vector<Rat> atil;
    Int q(1);
    for (size_t n = 0; n <= 64; ++n) {
        atil.push_back(Rat(q));
        q *= 2;
    }
    auto prof = residual_profile(seq, betas, alphas, atil, Rat(1, 2));
    CHECK(prof.growth_class == "linear");
    CHECK(prof.exceedance_count > 0);
}

TEST_CASE("exceedance scan on a unit-modulus base") {
    // eta = (4+3i)/5, gamma = 1: |gamma eta^n| = 1 > 1/2 for every n
    auto eta = ComplexEnclosure::exact(Rat(4, 5), Rat(3, 5), 192);
    auto gamma = ComplexEnclosure::exact(Rat(1), Rat(0), 192);
    size_t c1 = exceedance_scan({gamma}, {eta}, Rat(1, 2), 500);
    size_t c2 = exceedance_scan({gamma}, {eta}, Rat(1, 2), 2000);
    CHECK(c1 == 500);
    CHECK(c2 == 2000);
}

TEST_CASE("cesaro coefficient recovery") {
    // constant signal, eta = 1
    auto one = [](size_t, mpfr_prec_t p) { return ComplexEnclosure::exact(Rat(5), Rat(0), p); };
    auto eta1 = [](mpfr_prec_t p) { return ComplexEnclosure::exact(Rat(1), Rat(0), p); };
    auto r = recover_coefficient(one, eta1, 0, 37);
    CHECK(r.re.contains(Rat(5)));
    CHECK(r.im.contains_zero());

    // g(n) = 2 i^n + 3 (-1)^n, eta = i, T = 400 (divisible by 4): exactly 2
    auto g = [](size_t n, mpfr_prec_t p) {
        ComplexEnclosure i_pow = pow_int(ComplexEnclosure::exact(Rat(0), Rat(1), p),
                                         Int(static_cast<long>(n)), p);
        ComplexEnclosure m1 = n % 2 == 0 ? ComplexEnclosure::exact(Rat(3), Rat(0), p)
                                         : ComplexEnclosure::exact(Rat(-3), Rat(0), p);
        return add(mul(ComplexEnclosure::exact(Rat(2), Rat(0), p), i_pow, p), m1, p);
    };
    auto etai = [](mpfr_prec_t p) { return ComplexEnclosure::exact(Rat(0), Rat(1), p); };
    auto r2 = recover_coefficient(g, etai, 0, 400);
    CHECK(r2.re.contains(Rat(2)));
    CHECK(r2.im.contains_zero());
    CHECK(r2.width_below(-100));
}

TEST_CASE("cesaro recovery on an irrational rotation") {
    // g(n) = 2 eta^n with eta = exp(2 pi i sqrt2): estimate within 10/T of 2
    Expr theta = Expr::constant(Rat(2)) * Expr::pi() *
                 Expr::sqrt(Expr::constant(Rat(2)));
    Expr eta_re = Expr::cos(theta), eta_im = Expr::sin(theta);
    ComplexFn eta = [&](mpfr_prec_t p) {
        return ComplexEnclosure{eta_re.eval_real(p), eta_im.eval_real(p)};
    };
    size_t T = 10000;
    auto g = [&](size_t n, mpfr_prec_t p) {
        ComplexEnclosure e = eta(p);
        return mul(ComplexEnclosure::exact(Rat(2), Rat(0), p),
                   pow_int(e, Int(static_cast<long>(n)), p), p);
    };
    auto est = recover_coefficient(g, eta, 0, T, 160);
    auto diff = sub(est, ComplexEnclosure::exact(Rat(2), Rat(0), 256), 256);
    auto dist = sqrt_enc(abs2(diff, 256), 256);
    CHECK(certainly_less(dist, Rat(10, static_cast<long>(T)) * Rat(2)));
}

TEST_CASE("uniqueness cross-check for d = 1: a_N alpha^{-N} inside beta box") {
    NlrsSpec s;
    s.degree = 1;
    s.coefficients.emplace_back(Rat(-3, 2));
    s.rule = RuleKind::Target;
    s.targets.push_back({Expr::constant(Rat(1)), AlgebraicNumber::from_rational(Rat(3, 2))});
    s.rounding = TargetRounding::Floor;
    auto seq = generate(s, 300);
    auto rep = asymptotic_coefficients(s, seq, -64, Rat(1, 2), 100);
    const auto& beta = *rep.entries[0].beta;
    // independent estimate a_N (3/2)^{-N} with the residual tail bound
    for (size_t N : {100u, 200u, 300u}) {
        Rat est = seq.values[N] / pow_rat(Rat(3, 2), static_cast<long>(N));
        Rat tail = rep.residuals.bound_const / pow_rat(Rat(3, 2), static_cast<long>(N));
        RealEnclosure wide = widen(beta.re, RealEnclosure::exact(tail, 256));
        CHECK(wide.contains(est));
    }
}
