#include <catch2/catch_amalgamated.hpp>

#include "ipergo/systems.hpp"

using namespace ipergo;

namespace {
std::vector<Complex> indicator_of_zero(int m) {
    std::vector<Complex> f(m, Complex{0, 0});
    f[0] = 1;
    return f;
}
}  // namespace

TEST_CASE("mean ergodic limit on finite rotations") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);

    // Z/3: both nontrivial cube-root multipliers vanish, limit is the mean
    FiniteRotation z3(3, 1);
    auto lim = met_rational_limit(z3, indicator_of_zero(3), g, sched);
    for (const auto& v : lim) CHECK(std::abs(v - Complex{1.0 / 3, 0}) < 1e-12);

    // constants are fixed
    FiniteRotation z5(5, 2);
    std::vector<Complex> c(5, Complex{0.7, -0.2});
    auto limc = met_rational_limit(z5, c, g, sched);
    for (const auto& v : limc) CHECK(std::abs(v - Complex{0.7, -0.2}) < 1e-12);

    // Z/4 from index 3: every omega is Finite{1}, the limit is f itself
    FiniteRotation z4(4, 1);
    auto sched3 = FolnerSchedule::increasing(3);
    auto lim4 = met_rational_limit(z4, indicator_of_zero(4), g, sched3);
    for (int x = 0; x < 4; ++x)
        CHECK(std::abs(lim4[x] - (x == 0 ? Complex{1, 0} : Complex{0, 0})) < 1e-12);
}

TEST_CASE("finite-N averages approach the limit with the per-mode factor bound") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);
    FiniteRotation z3(3, 1);
    auto f = indicator_of_zero(3);
    auto hat = z3.dft(f);
    auto lim = met_rational_limit(z3, f, g, sched);
    for (std::uint32_t N = 4; N <= 14; N += 2) {
        IPWindow w(g, sched.window(N));
        auto emp = finite_rotation_average(z3, f, w);
        // modes with omega = 0 decay like their running product of |z_j|
        double bound = 0;
        for (int k = 1; k < 3; ++k)
            bound += std::abs(hat[k]) *
                     character_average(w, AngleValue(z3.eigenvalue_angle(k))).abs();
        for (int x = 0; x < 3; ++x) CHECK(std::abs(emp[x] - lim[x]) <= bound + 1e-12);
    }
}

TEST_CASE("skew product iterate law matches composition") {
    SkewProduct sys{FixedPointAngle::from_sqrt(2, 256)};
    Rng rng(11);
    for (int t = 0; t < 25; ++t) {
        AngleValue x(FixedPointAngle::from_turns_double(rng.uniform01(), 256));
        AngleValue y(FixedPointAngle::from_turns_double(rng.uniform01(), 256));
        AngleValue cx = x, cy = y;
        for (int n = 1; n <= 64; ++n) {
            // one step: (x, y) -> (x + alpha, y + x)
            AngleValue nx = angle_add(cx, AngleValue(sys.alpha));
            AngleValue ny = angle_add(cy, cx);
            cx = nx;
            cy = ny;
            if (n == 1 || n == 2 || n == 10 || n == 64) {
                auto [ix, iy] = sys.iterate(x, y, BigInt(n));
                CHECK(angle_turns_exact(ix) == angle_turns_exact(cx));
                CHECK(angle_turns_exact(iy) == angle_turns_exact(cy));
            }
        }
    }
}

TEST_CASE("pointwise averages") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);
    IPWindow w(g, sched.window(12));

    TorusRotation rot;
    rot.alpha.push_back(AngleValue(FixedPointAngle::golden(256)));

    auto one = torus_pointwise_average(rot, TrigPolynomial::constant(1.0),
                                       {AngleValue(RationalAngle(0, 1))}, w);
    CHECK(std::abs(one.value - Complex{1, 0}) < 1e-14);

    // f = e_1 factorizes through the character average
    AngleValue x(FixedPointAngle::from_turns_double(0.3251, 256));
    auto e1 = torus_pointwise_average(rot, TrigPolynomial::character(1), {x}, w);
    Complex expected =
        TrigPolynomial::character(1).evaluate({x}) * character_average(w, rot.alpha[0]).value();
    CHECK(std::abs(e1.value - expected) < 1e-12);
    // cross-check by sampling the orbit
    auto sampled = ip_average(
        w,
        [&](const BigInt& n) {
            return TrigPolynomial::character(1).evaluate(
                {angle_add(x, angle_scale(rot.alpha[0], n))});
        },
        Sampled{40000, 9});
    CHECK(std::abs(sampled.value - expected) < 5 * sampled.stderr_of_mean + 1e-3);

    // skew product observable e_(0,1) from (0,0): |value| <= 1
    SkewProduct skew{FixedPointAngle::from_sqrt(2, 256)};
    TrigPolynomial f01(2);
    f01.set({0, 1}, Complex{1, 0});
    auto sk = skew_pointwise_average(skew, f01, AngleValue(RationalAngle(0, 1)),
                                     AngleValue(RationalAngle(0, 1)), w, Sampled{20000, 3});
    CHECK(std::abs(sk.value) <= 1.0 + 1e-12);

    // interval indicator observable: sampled frequency of hitting [0, 1/4)
    IntervalSet quarter = IntervalSet::from_arcs({{BigRat(0), BigRat(1, 4)}});
    auto ind = torus_indicator_average(rot, quarter, AngleValue(RationalAngle(0, 1)), w,
                                       Sampled{20000, 5});
    CHECK(std::abs(ind.value.real() - 0.25) < 5 * ind.stderr_of_mean + 5e-3);
}

TEST_CASE("equidistribution defect") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);
    TorusRotation golden;
    golden.alpha.push_back(AngleValue(FixedPointAngle::golden(1024)));

    CHECK(equidistribution_defect(golden, 0, g, sched, 20) == Catch::Approx(1.0));

    double d20 = equidistribution_defect(golden, 1, g, sched, 20);
    double d50 = equidistribution_defect(golden, 1, g, sched, 50);
    CHECK(d50 <= d20 + 1e-15);
    CHECK(d50 < 0.01);

    // alpha = 1/3 (order coprime to 10): the mode-3 character is trivial on
    // the orbit, so its defect stays 1
    TorusRotation third;
    third.alpha.push_back(AngleValue(RationalAngle(1, 3)));
    for (std::uint32_t N : {5u, 10u, 20u})
        CHECK(equidistribution_defect(third, 3, g, sched, N) == Catch::Approx(1.0));
}

TEST_CASE("multiple averages and the Kronecker limit formula") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);
    TorusRotation rot;
    rot.alpha.push_back(AngleValue(FixedPointAngle::from_sqrt(2, 256)));

    IPWindow w(g, sched.window(14));
    auto ones = torus_multiple_average(
        rot, {TrigPolynomial::constant(1.0), TrigPolynomial::constant(1.0)}, {1, 2}, MeanMode{},
        w, Exact{});
    CHECK(std::abs(ones.value - Complex{1, 0}) < 1e-12);

    // k = 1 reduces to the single ergodic average
    AngleValue x(FixedPointAngle::from_turns_double(0.77, 256));
    auto single = torus_multiple_average(rot, {TrigPolynomial::character(2)}, {1},
                                         PointwiseAt{{x}}, w, Exact{});
    auto direct = torus_pointwise_average(rot, TrigPolynomial::character(2), {x}, w);
    CHECK(std::abs(single.value - direct.value) < 1e-12);

    CHECK_THROWS_AS(
        torus_multiple_average(rot, {TrigPolynomial::character(1), TrigPolynomial::character(2)},
                               {2, 2}, MeanMode{}, w, Exact{}),
        std::invalid_argument);

    // f1 = e2, f2 = e-1, shifts (1,2): 2*1 + (-1)*2 = 0 is the only surviving
    // tuple; the limit is e1 with coefficient 1
    auto cert = certify_spectrum_disjoint(g);
    auto kf = kronecker_limit_formula(
        rot, {TrigPolynomial::character(2), TrigPolynomial::character(-1)}, {1, 2}, cert);
    CHECK(kf.coeffs().size() == 1);
    CHECK(std::abs(kf.coeff({1}) - Complex{1, 0}) < 1e-14);

    auto k1 = kronecker_limit_formula(rot, {TrigPolynomial::character(0, {0.4, 0.1})}, {1}, cert);
    CHECK(std::abs(k1.coeff({0}) - Complex{0.4, 0.1}) < 1e-14);

    auto kc = kronecker_limit_formula(
        rot, {TrigPolynomial::constant({0.5, 0}), TrigPolynomial::constant({0.0, 0.5})}, {1, 2},
        cert);
    CHECK(std::abs(kc.coeff({0}) - Complex{0.0, 0.25}) < 1e-14);

    // a rational eigenvalue inside the spectrum obstructs the formula
    TorusRotation rational_rot;
    rational_rot.alpha.push_back(AngleValue(RationalAngle(1, 8)));  // 10^3 = 0 mod 8
    CHECK_THROWS_AS(
        kronecker_limit_formula(rational_rot,
                                {TrigPolynomial::character(1), TrigPolynomial::character(-1)},
                                {1, 2}, cert),
        SpectrumObstruction);

    auto mm = torus_multiple_average(
        rot, {TrigPolynomial::character(2), TrigPolynomial::character(-1)}, {1, 2}, MeanMode{}, w,
        Exact{});
    CHECK(std::abs(mm.value - kf.mean()) < 1e-9);
}

TEST_CASE("kronecker formula vs exact mean-mode averages on random instances") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);
    auto cert = certify_spectrum_disjoint(g);
    Rng rng(314159);
    for (int inst = 0; inst < 50; ++inst) {
        TorusRotation rot;
        rot.alpha.push_back(
            AngleValue(FixedPointAngle::from_turns_double(0.3 + 0.4 * rng.uniform01(), 256)));
        TrigPolynomial f1(1), f2(1);
        for (int m = 0; m < 5; ++m) {
            f1.add({static_cast<long>(rng.below(11)) - 5},
                   Complex{rng.uniform01() - 0.5, rng.uniform01() - 0.5});
            f2.add({static_cast<long>(rng.below(11)) - 5},
                   Complex{rng.uniform01() - 0.5, rng.uniform01() - 0.5});
        }
        IPWindow w(g, sched.window(30));
        auto kf = kronecker_limit_formula(rot, {f1, f2}, {1, 2}, cert);
        auto mm = torus_multiple_average(rot, {f1, f2}, {1, 2}, MeanMode{}, w, Exact{});
        CHECK(std::abs(mm.value - kf.mean()) < 0.05);
    }
}

TEST_CASE("divisibility weights") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);

    auto w1 = weight_1rPhi(g, sched, BigInt(1));
    CHECK(w1(BigInt(17)) == 1.0);

    auto w3 = weight_1rPhi(g, sched, BigInt(3));
    CHECK(w3.denominator == Catch::Approx(1.0 / 3).margin(1e-12));
    CHECK(w3(BigInt(6)) == Catch::Approx(3.0).margin(1e-9));
    CHECK(w3(BigInt(7)) == 0.0);

    // all generators divisible by r: denominator 1, weight 1 on every sum
    auto g3 = GeneratorSequence::explicit_terms({BigInt(3), BigInt(6), BigInt(9), BigInt(12)});
    auto w3b = weight_1rPhi(g3, sched, BigInt(3));
    CHECK(w3b.denominator == Catch::Approx(1.0).margin(1e-12));

    // normalization: the weighted average of 1 tends to 1
    TorusRotation rot;
    rot.alpha.push_back(AngleValue(FixedPointAngle::golden(256)));
    for (std::uint32_t N : {20u, 24u}) {
        IPWindow w(g, sched.window(N));
        auto me = torus_weighted_multiple_average(rot, {TrigPolynomial::constant(1.0)}, {1}, w3,
                                                  MeanMode{}, w, Sampled{20000, 17});
        CHECK(std::abs(me.value - Complex{1, 0}) <= 3 * me.stderr_of_mean + 1e-9);
    }

    // finite rotation Z/3, f = indicator {0}, l = (1), r = 3, x0 = 0: the
    // weight only keeps n = 0 mod 3, where f(x0 + n) = 1; exactly 1 at any N
    FiniteRotation z3(3, 1);
    std::vector<Complex> ind{Complex{1, 0}, Complex{0, 0}, Complex{0, 0}};
    for (std::uint32_t N : {8u, 12u, 14u}) {
        IPWindow w(g, sched.window(N));
        auto me = finite_weighted_multiple_average(z3, {ind}, {1}, w3, 0, w, Exact{});
        // the enumerated value is 3 P(3 | n), off the limit 1 by <= 2^(1-N)
        CHECK(std::abs(me.value - Complex{1, 0}) <= std::pow(2.0, 1.0 - double(N)) + 1e-12);
    }

    // weight r = 1 reduces to the plain average
    IPWindow w(g, sched.window(10));
    auto plain = torus_multiple_average(rot, {TrigPolynomial::character(1)}, {1},
                                        PointwiseAt{{AngleValue(RationalAngle(0, 1))}}, w, Exact{});
    auto weighted = torus_weighted_multiple_average(rot, {TrigPolynomial::character(1)}, {1}, w1,
                                                    PointwiseAt{{AngleValue(RationalAngle(0, 1))}},
                                                    w, Exact{});
    CHECK(std::abs(plain.value - weighted.value) < 1e-12);
}
