#include <catch2/catch_amalgamated.hpp>

#include "ipergo/circle.hpp"

using namespace ipergo;

TEST_CASE("angle_pow on rational angles is modular arithmetic") {
    RationalAngle third(1, 3);
    CHECK(angle_pow(third, BigInt(10)) == RationalAngle(1, 3));  // 10 = 1 mod 3
    CHECK(angle_pow(RationalAngle(3, 7), BigInt(0)) == RationalAngle(0, 1));
    CHECK(angle_pow(RationalAngle(1, 4), BigInt(100)) == RationalAngle(0, 1));

    // big exponents stay exact
    BigInt huge;
    mpz_ui_pow_ui(huge.get_mpz_t(), 10, 49);
    CHECK(angle_pow(third, huge) == RationalAngle(1, 3));  // 10^49 = 1 mod 3
}

TEST_CASE("angle_pow composes multiplicatively") {
    Rng rng(7);
    for (int t = 0; t < 50; ++t) {
        RationalAngle a(BigInt(static_cast<long>(rng.below(1000))),
                        BigInt(static_cast<long>(1 + rng.below(997))));
        BigInt m(static_cast<long>(rng.below(1 << 20))), n(static_cast<long>(rng.below(1 << 20)));
        CHECK(angle_pow(angle_pow(a, m), n) == angle_pow(a, m * n));
    }
    FixedPointAngle f = FixedPointAngle::from_sqrt(2, 256);
    BigInt m(12345), n(67891);
    CHECK(angle_pow(angle_pow(f, m), n) == angle_pow(f, m * n));
}

TEST_CASE("fixed-point orbits keep full precision") {
    // x -> 10x mod 1 for the golden angle: after 50 steps the fractional part
    // is still a faithful window into the digit stream
    FixedPointAngle g = FixedPointAngle::golden(1024);
    BigInt p10 = 1;
    for (int i = 0; i < 50; ++i) p10 *= 10;
    FixedPointAngle shifted = angle_scale(g, p10);
    CHECK(shifted.frac() != 0);
    // n_max * 2^-P stays far below double noise
    double budget = 50 * std::log2(10.0) - 1024;
    CHECK(budget < -64);
}

TEST_CASE("half_sum matches the closed form") {
    CHECK(half_sum(RationalAngle(0, 1)).value() == Complex{1.0, 0.0});
    CHECK(half_sum(RationalAngle(1, 2)).is_zero());
    CHECK(half_sum(FixedPointAngle(BigInt(1) << 1023, 1024)).is_zero());

    // phi = 2pi/3: r = 1/2, theta = pi/3
    LogPolar z = half_sum(RationalAngle(1, 3));
    CHECK(z.abs() == Catch::Approx(0.5).margin(1e-15));
    CHECK(z.arg_wrapped == Catch::Approx(kPi / 3).margin(1e-15));
}

TEST_CASE("half_sum agrees with direct complex evaluation") {
    Rng rng(99);
    for (int t = 0; t < 10000; ++t) {
        double turns = rng.uniform01();
        FixedPointAngle a = FixedPointAngle::from_turns_double(turns, 128);
        LogPolar z = half_sum(a);
        double phi = 2 * kPi * a.signed_turns_double();
        Complex direct = (Complex{1, 0} + Complex{std::cos(phi), std::sin(phi)}) / 2.0;
        CHECK(std::abs(z.value() - direct) < 1e-14);
    }
}

TEST_CASE("log-polar products") {
    CHECK(logpolar_product(std::vector<LogPolar>{}).value() == Complex{1.0, 0.0});

    std::vector<LogPolar> with_zero{half_sum(RationalAngle(1, 3)), LogPolar::zero(),
                                    half_sum(RationalAngle(1, 5))};
    CHECK(logpolar_product(with_zero).is_zero());

    // 16 copies of (r=1/2, theta=pi/3) against direct multiplication
    std::vector<LogPolar> zs(16, half_sum(RationalAngle(1, 3)));
    LogPolar p = logpolar_product(zs);
    CHECK(p.log_r == Catch::Approx(16 * std::log(0.5)).epsilon(1e-13));
    CHECK(p.arg_unwrapped == Catch::Approx(16 * kPi / 3).epsilon(1e-13));
    Complex direct{1, 0};
    for (int i = 0; i < 16; ++i) direct *= Complex{0.25, std::sqrt(3.0) / 4};
    CHECK(std::abs(p.value() - direct) < 1e-12);

    // |product of half sums| <= 1, and unwrapped args add exactly
    Rng rng(3);
    std::vector<LogPolar> fam;
    double argsum = 0;
    for (int i = 0; i < 100; ++i) {
        auto z = half_sum(FixedPointAngle::from_turns_double(rng.uniform01(), 128));
        fam.push_back(z);
        argsum += z.arg_unwrapped;
    }
    LogPolar prod = logpolar_product(fam);
    CHECK(prod.abs() <= 1.0 + 1e-12);
    CHECK(prod.arg_unwrapped == Catch::Approx(argsum).margin(1e-9));
}

TEST_CASE("named fixed-point constants") {
    FixedPointAngle g = FixedPointAngle::golden(1024);
    CHECK(g.signed_turns_double() == Catch::Approx(-0.3819660113).margin(1e-9));
    FixedPointAngle s2 = FixedPointAngle::from_sqrt(2, 1024);
    CHECK(s2.signed_turns_double() == Catch::Approx(std::sqrt(2.0) - 1.0).margin(1e-12));
    FixedPointAngle rad = FixedPointAngle::from_radians(BigRat(1), 1024);
    CHECK(rad.signed_turns_double() == Catch::Approx(1.0 / (2 * kPi)).margin(1e-12));
}
