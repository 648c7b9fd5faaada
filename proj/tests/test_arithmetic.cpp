#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nlrs/real.hpp"
#include "nlrs/complexe.hpp"
#include "nlrs/refine.hpp"

using namespace nlrs;

TEST_CASE("interval product containment") {
    auto a = RealEnclosure::from_endpoints_rat(Rat(1), Rat(2), 64);
    auto b = RealEnclosure::from_endpoints_rat(Rat(3), Rat(4), 64);
    auto p = mul(a, b, 64);
    CHECK(p.contains(Rat(3)));
    CHECK(p.contains(Rat(8)));
    CHECK(p.contains(Rat(5)));
    CHECK_FALSE(p.contains(Rat(2)));
    CHECK_FALSE(p.contains(Rat(9)));
}

TEST_CASE("enclosure arithmetic contains exact rational results") {
    std::mt19937_64 rng(20240917);
    std::uniform_int_distribution<long> num(-50, 50), den(1, 20);
    for (int trial = 0; trial < 300; ++trial) {
        Rat x(num(rng), den(rng)), y(num(rng), den(rng)), z(num(rng), den(rng));
        x.canonicalize();
        y.canonicalize();
        z.canonicalize();
        Rat exact = x * y + z * z - x;
        if (y != 0) exact += x / y;
        auto ex = RealEnclosure::exact(x, 128);
        auto ey = RealEnclosure::exact(y, 128);
        auto ez = RealEnclosure::exact(z, 128);
        auto enc = sub(add(mul(ex, ey, 128), sqr(ez, 128), 128), ex, 128);
        if (y != 0) enc = add(enc, div(ex, ey, 128), 128);
        CAPTURE(x.get_str(), y.get_str(), z.get_str());
        CHECK(enc.contains(exact));
    }
}

TEST_CASE("monotone refinement never widens") {
    // the same expression evaluated at higher precision is nested
    auto eval = [](mpfr_prec_t p) {
        auto third = div(RealEnclosure::exact(Rat(1), p), RealEnclosure::exact(Rat(3), p), p);
        auto r = log_enc(add(third, RealEnclosure::exact(Rat(2), p), p), p);
        return exp_enc(r, p);
    };
    RealEnclosure prev = eval(64);
    for (mpfr_prec_t p = 128; p <= 1024; p *= 2) {
        RealEnclosure cur = eval(p);
        CHECK(prev.contains(cur));
        prev = cur;
    }
}

TEST_CASE("division by zero-straddling interval throws") {
    auto a = RealEnclosure::exact(Rat(1), 64);
    auto b = RealEnclosure::from_endpoints_rat(Rat(-1), Rat(1), 64);
    CHECK_THROWS_AS(div(a, b, 64), DivisionByUncertainZero);
}

TEST_CASE("certified rounding boundary cases") {
    // [2.999, 3.001] straddles 3 for floor
    auto x = RealEnclosure::from_endpoints_rat(Rat(2999, 1000), Rat(3001, 1000), 64);
    CHECK_THROWS_AS(certified_round(x, RoundMode::Floor), AmbiguousRounding);

    // exact 5/2 under nearest-half-up is 3 (the tie goes up)
    auto h = RealEnclosure::exact(Rat(5, 2), 64);
    CHECK(certified_round(h, RoundMode::NearestHalfUp) == 3);

    // golden ratio to the 10th power: theta^10 in [122.991, 122.992]
    PrecisionPolicy pol;
    RealFn theta10 = [](mpfr_prec_t p) {
        auto five = RealEnclosure::exact(Rat(5), p);
        auto theta = mul(add(RealEnclosure::exact(Rat(1), p), sqrt_enc(five, p), p),
                         RealEnclosure::exact(Rat(1, 2), p), p);
        return pow_ui(theta, 10, p);
    };
    CHECK(certified_round(theta10, RoundMode::Floor, pol) == 122);
    auto v = refine_to_radius(theta10, pol, -30);
    CHECK(certainly_greater(v.value, Rat(122991, 1000)));
    CHECK(certainly_less(v.value, Rat(122992, 1000)));
}

TEST_CASE("certified rounding agrees with exact rational rounding") {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<long> num(-2000, 2000), den(1, 40);
    std::uniform_int_distribution<int> kind(0, 3);
    int checked = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        Rat q;
        switch (kind(rng)) {
            case 0: q = Rat(num(rng), den(rng)); break;
            case 1: q = Rat(num(rng)); break;                 // exact integer
            case 2: q = Rat(2 * num(rng) + 1, 2); break;      // exact half-integer
            default: q = Rat(num(rng), 1 + den(rng)); break;
        }
        q.canonicalize();
        for (RoundMode m : {RoundMode::Floor, RoundMode::Ceil, RoundMode::NearestHalfUp}) {
            auto enc = RealEnclosure::exact(q, 128);
            CHECK(certified_round(enc, m) == exact_round(q, m));
            ++checked;
        }
    }
    CHECK(checked == 3000);
}

TEST_CASE("complex enclosure powers and division") {
    // (1+i)^8 = 16
    auto z = ComplexEnclosure::exact(Rat(1), Rat(1), 128);
    auto w = pow_int(z, Int(8), 128);
    CHECK(w.re.contains(Rat(16)));
    CHECK(w.im.contains(Rat(0)));
    CHECK(w.width_below(-100));

    // (4+3i)/5 has modulus exactly 1
    auto eta = div(ComplexEnclosure::exact(Rat(4), Rat(3), 128),
                   ComplexEnclosure::exact(Rat(5), Rat(0), 128), 128);
    auto m2 = abs2(eta, 128);
    CHECK(m2.contains(Rat(1)));
    CHECK(m2.width_below(-100));

    // inverse of a unit-modulus number is its conjugate
    auto inv = div(ComplexEnclosure::exact(Rat(1), Rat(0), 128), eta, 128);
    CHECK(inv.re.contains(Rat(4, 5)));
    CHECK(inv.im.contains(Rat(-3, 5)));
}

TEST_CASE("argument enclosure is consistent with sin/cos") {
    auto eta = ComplexEnclosure::exact(Rat(4, 5), Rat(3, 5), 256);
    auto th = arg_enclosure(eta, 256);
    // atan2(3,4) = 0.6435011...
    CHECK(certainly_greater(th, Rat(6435011, 10000000)));
    CHECK(certainly_less(th, Rat(6435012, 10000000)));
    CHECK(th.width_below(-200));
    // negative real axis handling
    auto m = ComplexEnclosure::exact(Rat(-1), Rat(0), 256);
    auto thm = arg_enclosure(m, 256);
    auto pi = RealEnclosure::pi(256);
    // representative equals pi (mod 2pi); here exactly pi or -pi
    bool near_pi = !sub(thm, pi, 256).excludes_zero() ||
                   !add(thm, pi, 256).excludes_zero();
    CHECK(near_pi);
}

TEST_CASE("exp/log round trip and pi") {
    PrecisionPolicy pol;
    auto v = refine_to_radius(
        [](mpfr_prec_t p) {
            auto two = RealEnclosure::exact(Rat(2), p);
            return exp_enc(log_enc(two, p), p);
        },
        pol, -120);
    CHECK(v.value.contains(Rat(2)));
    CHECK_FALSE(v.hit_cap);
    auto pi = RealEnclosure::pi(256);
    CHECK(certainly_greater(pi, Rat(314159, 100000)));
    CHECK(certainly_less(pi, Rat(314160, 100000)));
}

TEST_CASE("huge-exponent integer powers stay exact") {
    // 2^10000 as an enclosure is an exact point
    auto two = RealEnclosure::exact(Rat(2), 64);
    auto big = pow_int(two, Int(10000), 64);
    CHECK(big.is_point());
    Int expect;
    mpz_ui_pow_ui(expect.get_mpz_t(), 2, 10000);
    CHECK(certified_round(big, RoundMode::Floor) == expect);
}
