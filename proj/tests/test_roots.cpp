#include <catch2/catch_amalgamated.hpp>

#include "nlrs/roots.hpp"

using namespace nlrs;

static QPoly make(std::initializer_list<long> asc) {
    std::vector<Rat> c;
    for (long v : asc) c.emplace_back(v);
    return QPoly(std::move(c));
}

TEST_CASE("quadratic roots of x^2 - x - 1") {
    auto roots = isolate_roots(make({-1, -1, 1}), -80);
    REQUIRE(roots.size() == 2);
    // golden ratio 1.6180339887..., conjugate -0.6180339887...
    int found_theta = 0, found_psi = 0;
    for (const auto& r : roots) {
        CHECK(r.real);
        CHECK(r.box.width_below(-80));
        if (certainly_greater(r.box.re, Rat(1))) ++found_theta;
        if (certainly_less(r.box.re, Rat(0))) ++found_psi;
        CHECK(r.box.im.is_point());
    }
    CHECK(found_theta == 1);
    CHECK(found_psi == 1);
}

TEST_CASE("complex pair of x^2 + 1") {
    auto roots = isolate_roots(make({1, 0, 1}), -100);
    REQUIRE(roots.size() == 2);
    CHECK_FALSE(roots[0].real);
    CHECK_FALSE(roots[1].real);
    CHECK(roots[0].conj_of == 1);
    CHECK(roots[1].conj_of == 0);
    int up = roots[0].box.im.is_positive() ? 0 : 1;
    CHECK(roots[up].box.im.contains(Rat(1)));
    CHECK(roots[up].box.re.contains(Rat(0)));
    CHECK(roots[1 - up].box.im.contains(Rat(-1)));
}

TEST_CASE("mixed cubic (x-2)(x^2+1)") {
    QPoly p = make({-2, 1}) * make({1, 0, 1});
    auto roots = isolate_roots(p, -90);
    REQUIRE(roots.size() == 3);
    int reals = 0, complexes = 0;
    for (const auto& r : roots) {
        if (r.real) {
            ++reals;
            CHECK(r.box.re.contains(Rat(2)));
        } else {
            ++complexes;
        }
    }
    CHECK(reals == 1);
    CHECK(complexes == 2);
}

TEST_CASE("degree one is exact") {
    auto roots = isolate_roots(make({-3, 2}));
    REQUIRE(roots.size() == 1);
    REQUIRE(roots[0].rational.has_value());
    CHECK(*roots[0].rational == Rat(3, 2));
}

TEST_CASE("unit circle quadratic 5x^2 - 8x + 5 (roots (4±3i)/5)") {
    QPoly p(std::vector<Rat>{Rat(5), Rat(-8), Rat(5)});
    auto roots = isolate_roots(p, -120);
    REQUIRE(roots.size() == 2);
    for (const auto& r : roots) {
        CHECK_FALSE(r.real);
        auto m2 = abs2(r.box, 256);
        CHECK(m2.contains(Rat(1)));
        CHECK(r.box.re.contains(Rat(4, 5)));
    }
}

TEST_CASE("refinement tightens and keeps the root") {
    auto roots = isolate_roots(make({-1, -1, 1}), -40);
    auto& theta = certainly_greater(roots[0].box.re, Rat(1)) ? roots[0] : roots[1];
    auto tight = refine_root_box(make({-1, -1, 1}), theta.box, -700, theta.real);
    CHECK(tight.width_below(-700));
    // contains (1+sqrt 5)/2 to high accuracy: check against direct sqrt
    auto five = RealEnclosure::exact(Rat(5), 1024);
    auto gold = mul(add(RealEnclosure::exact(Rat(1), 1024), sqrt_enc(five, 1024), 1024),
                    RealEnclosure::exact(Rat(1, 2), 1024), 1024);
    CHECK_FALSE(tight.re.disjoint(gold));
}

TEST_CASE("close roots still isolate") {
    // (x - 1)(x - 1001/1000)(x + 3)
    QPoly p = make({-1, 1}) * QPoly(std::vector<Rat>{Rat(-1001, 1000), Rat(1)}) * make({3, 1});
    auto roots = isolate_roots(p, -60);
    REQUIRE(roots.size() == 3);
    for (size_t i = 0; i < roots.size(); ++i)
        for (size_t j = i + 1; j < roots.size(); ++j)
            CHECK(roots[i].box.disjoint(roots[j].box));
}

TEST_CASE("degree seven with mixed real and complex roots") {
    // (x^2+1)(x^2+x+1)(x-1)(x-2)(x+5)
    QPoly p = make({1, 0, 1}) * make({1, 1, 1}) * make({-1, 1}) * make({-2, 1}) * make({5, 1});
    auto roots = isolate_roots(p, -64);
    REQUIRE(roots.size() == 7);
    int reals = 0;
    for (const auto& r : roots) reals += r.real ? 1 : 0;
    CHECK(reals == 3);
}
