#include <catch2/catch_amalgamated.hpp>

#include "ipergo/spectral.hpp"
#include "ipergo/systems.hpp"

using namespace ipergo;

namespace {
// brute-force multiset mean of alpha^n, the oracle for the product formula
Complex brute_character_mean(const IPWindow& w, const AngleValue& alpha) {
    Complex acc{0, 0};
    std::uint64_t count = 0;
    for_each_sum(w, kDefaultEnumCap, [&](const BigInt& n, std::uint64_t) {
        AngleValue p = angle_scale(alpha, n);
        acc += angle_point(p);
        ++count;
    });
    return acc / static_cast<double>(count);
}
}  // namespace

TEST_CASE("character_average equals the enumeration mean") {
    auto ones = GeneratorSequence::explicit_terms({BigInt(1), BigInt(1)});
    IPWindow w(ones, {1, 2});
    Complex v = character_average(w, AngleValue(RationalAngle(1, 3))).value();
    // brute-force mean (1 + 2 w + w^2)/4 over {0,1,1,2}, w = e^{2 pi i/3}
    Complex om{std::cos(2 * kPi / 3), std::sin(2 * kPi / 3)};
    Complex brute = (Complex{1, 0} + 2.0 * om + om * om) / 4.0;
    CHECK(std::abs(v - brute) < 1e-14);
    CHECK(std::abs(v) == Catch::Approx(0.25).margin(1e-14));

    CHECK(character_average(w, AngleValue(RationalAngle(0, 1))).value() == Complex{1.0, 0.0});

    // 10^(j-1) = 1 mod 3 gives |z_j| = 1/2 for every factor
    auto g = GeneratorSequence::geometric(10);
    std::vector<std::uint32_t> idx;
    for (std::uint32_t j = 1; j <= 20; ++j) idx.push_back(j);
    LogPolar z = character_average(IPWindow(g, idx), AngleValue(RationalAngle(1, 3)));
    CHECK(z.log_r == Catch::Approx(20 * std::log(0.5)).epsilon(1e-13));
}

TEST_CASE("product formula identity on random windows") {
    Rng rng(2024);
    for (int t = 0; t < 40; ++t) {
        std::vector<BigInt> terms;
        std::size_t len = 1 + rng.below(10);
        for (std::size_t i = 0; i < len; ++i)
            terms.push_back(BigInt(static_cast<long>(1 + rng.below(1000))));
        auto gens = GeneratorSequence::explicit_terms(std::move(terms));
        std::vector<std::uint32_t> idx;
        for (std::uint32_t j = 1; j <= len; ++j) idx.push_back(j);
        IPWindow w(gens, idx);
        AngleValue alpha =
            t % 2 ? AngleValue(RationalAngle(BigInt(static_cast<long>(rng.below(100))),
                                             BigInt(static_cast<long>(1 + rng.below(97)))))
                  : AngleValue(FixedPointAngle::from_turns_double(rng.uniform01(), 256));
        Complex prod = character_average(w, alpha).value();
        Complex brute = brute_character_mean(w, alpha);
        CHECK(std::abs(prod - brute) < 1e-10);
    }
}

TEST_CASE("omega decides rational angles exactly") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);

    OmegaValue one = omega(g, sched, AngleValue(RationalAngle(0, 1)));
    CHECK(one.is_finite());
    CHECK(one.value == Complex{1.0, 0.0});

    OmegaValue third = omega(g, sched, AngleValue(RationalAngle(1, 3)));
    CHECK(third.is_exact_zero());
    CHECK(third.epsilon0 > 0);

    // from index 3 on, 10^(j-1) = 0 mod 4
    auto sched3 = FolnerSchedule::increasing(3);
    OmegaValue quarter = omega(g, sched3, AngleValue(RationalAngle(1, 4)));
    CHECK(quarter.is_finite());
    CHECK(quarter.value == Complex{1.0, 0.0});
    CHECK(quarter.j0 == 3);

    // numeric angles only ever truncate
    OmegaValue t = omega(g, sched, AngleValue(FixedPointAngle::golden(256)), 40);
    CHECK(t.is_truncated());
    CHECK(t.residual_bound <= 1.0);

    CHECK_THROWS_AS(
        omega(g, FolnerSchedule::explicit_windows({{1, 2}}), AngleValue(RationalAngle(1, 3))),
        UnsupportedSchedule);
}

TEST_CASE("truncated omega bound is nonincreasing in the horizon") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);
    AngleValue a(FixedPointAngle::golden(1024));
    double prev = 1.0;
    for (std::uint32_t N = 4; N <= 40; N += 4) {
        OmegaValue om = omega(g, sched, a, N);
        CHECK(om.residual_bound <= prev + 1e-15);
        prev = om.residual_bound;
    }
}

TEST_CASE("omega on finite lists past their end") {
    auto ones = GeneratorSequence::explicit_terms({BigInt(2), BigInt(4)});
    // window starts past the list: no factors at all, the product is 1
    auto om = omega(ones, FolnerSchedule::increasing(5), AngleValue(RationalAngle(1, 3)));
    CHECK(om.is_finite());
    CHECK(om.value == Complex{1.0, 0.0});
    // two distinct residues certify nothing: more terms are required
    CHECK_THROWS_AS(omega(ones, FolnerSchedule::increasing(1), AngleValue(RationalAngle(1, 3))),
                    PeriodNotFound);
    // a list whose residues stabilize at zero certifies a finite product
    auto stab = GeneratorSequence::explicit_terms(
        {BigInt(2), BigInt(4), BigInt(3), BigInt(6), BigInt(9), BigInt(12)});
    auto om2 = omega(stab, FolnerSchedule::increasing(1), AngleValue(RationalAngle(1, 3)));
    CHECK(om2.is_finite());
    CHECK(om2.j0 == 3);
}

TEST_CASE("convergence classification") {
    auto g = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);

    auto v1 = classify_convergence(g, sched, AngleValue(RationalAngle(0, 1)));
    CHECK(v1.tag == ConvergenceVerdict::Tag::ConvergesNonzero);
    CHECK(v1.limit == Complex{1.0, 0.0});

    auto v2 = classify_convergence(g, sched, AngleValue(RationalAngle(1, 3)));
    CHECK(v2.tag == ConvergenceVerdict::Tag::ConvergesToZero);

    auto v3 = classify_convergence(g, sched, AngleValue(FixedPointAngle::golden(256)));
    CHECK(v3.tag == ConvergenceVerdict::Tag::Inconclusive);

    // half turn: a factor vanishes exactly
    auto ones = GeneratorSequence::explicit_terms({BigInt(1), BigInt(1), BigInt(1)});
    auto vz = classify_convergence(ones, sched, AngleValue(RationalAngle(1, 2)));
    CHECK(vz.tag == ConvergenceVerdict::Tag::ConvergesToZero);
}

TEST_CASE("divergence witness construction and certification") {
    FixedPointAngle alpha = FixedPointAngle::from_radians(BigRat(1), 1024);
    auto gens = construct_divergence_witness(alpha, 50);
    const auto* wr = gens.witness_rule();
    REQUIRE(wr != nullptr);
    REQUIRE(wr->terms.size() == 50);
    CHECK(wr->terms[0] == 9);   // 9 - 2 pi in (2, pi)
    CHECK(wr->terms[1] == 14);  // 14 - 4 pi in (1, 1.5)

    // postcondition replay: theta_j in (1/j, 1/j + 1/j^2)
    for (std::size_t j = 1; j <= wr->terms.size(); ++j) {
        FixedPointAngle a = angle_scale(alpha, wr->terms[j - 1]);
        double theta = kPi * a.signed_turns_double();
        CHECK(theta > 1.0 / j);
        CHECK(theta < 1.0 / j + 1.0 / (double(j) * j));
    }

    auto verdict = classify_convergence(gens, FolnerSchedule::increasing(1),
                                        AngleValue(alpha));
    CHECK(verdict.tag == ConvergenceVerdict::Tag::Diverges);
    CHECK(verdict.argument_sum > 4.0);
    CHECK(verdict.norm_product_bound > 0.05);

    // harmonic lower bound and the square-sum upper bound
    double H = 0, sq_bound = 0;
    for (int j = 1; j <= 50; ++j) {
        H += 1.0 / j;
        double hi = 1.0 / j + 1.0 / (double(j) * j);
        sq_bound += hi * hi;
    }
    CHECK(verdict.argument_sum >= H);
    double sumsq = 0;
    for (double t : verdict.theta_trace) sumsq += t * t;
    CHECK(sumsq <= sq_bound);

    // near-rational angles are rejected
    CHECK_THROWS_AS(construct_divergence_witness(FixedPointAngle(BigInt(1) << 1022, 1024), 5),
                    std::invalid_argument);
}

TEST_CASE("spectrum membership decisions") {
    auto g10 = GeneratorSequence::geometric(10);
    CHECK(spectrum_contains(g10, RationalAngle(1, 8)).contains);   // 10^3 = 0 mod 8
    CHECK(!spectrum_contains(g10, RationalAngle(1, 3)).contains);  // 10^k = 1 mod 3
    CHECK(spectrum_contains(g10, RationalAngle(0, 1)).contains);

    // against the brute modular-period oracle for q <= 100
    for (long q = 1; q <= 100; ++q) {
        bool expected = true;  // exists m: 10^j = 0 mod q for j >= m
        long r = 1 % q;
        std::vector<long> seen;
        for (int j = 0; j < 2 * q + 4; ++j) {
            seen.push_back(r);
            r = (r * 10) % q;
        }
        expected = seen.back() == 0;
        auto dec = spectrum_contains(g10, RationalAngle(1, BigInt(q)));
        CHECK(dec.contains == expected);
    }

    // explicit lists too short to certify raise PeriodNotFound
    auto shortlist = GeneratorSequence::explicit_terms({BigInt(2), BigInt(4), BigInt(8)});
    CHECK_THROWS_AS(spectrum_contains(shortlist, RationalAngle(1, 7)), PeriodNotFound);
}

TEST_CASE("scaled sequences keep rational spectrum points rational") {
    // if a p/q is in the spectrum of (a n_j) then (a p mod q)/q is in the
    // spectrum of (n_j); checked for geometric bases 2..12, q <= 100, a <= 10
    for (long base = 2; base <= 12; ++base) {
        auto gens = GeneratorSequence::geometric(base);
        for (long a = 1; a <= 10; ++a) {
            auto scaled = gens.scaled(a);
            for (long q = 1; q <= 100; ++q) {
                auto dec = spectrum_contains(scaled, RationalAngle(1, q));
                if (dec.contains) {
                    RationalAngle image(a, q);
                    CHECK(spectrum_contains(gens, image).contains);
                }
            }
        }
    }
}

TEST_CASE("classification matches the dirac multiplier off the spectrum") {
    // for rational angles outside the generating set, the average converges
    // to the projection: the multiplier is delta_1
    auto g10 = GeneratorSequence::geometric(10);
    auto sched = FolnerSchedule::increasing(1);
    for (long q = 2; q <= 60; ++q) {
        RationalAngle a(1, q);
        if (spectrum_contains(g10, a).contains) continue;
        auto v = classify_convergence(g10, sched, AngleValue(a));
        CHECK(v.tag == ConvergenceVerdict::Tag::ConvergesToZero);
    }
    auto v1 = classify_convergence(g10, sched, AngleValue(RationalAngle(0, 1)));
    CHECK(v1.tag == ConvergenceVerdict::Tag::ConvergesNonzero);
    CHECK(v1.limit == Complex{1.0, 0.0});
}

TEST_CASE("rational spectrum certificate lists base primes") {
    auto c10 = rational_spectrum_certificate(GeneratorSequence::geometric(10));
    CHECK(c10.primes == std::vector<BigInt>{BigInt(2), BigInt(5)});
    auto c2 = rational_spectrum_certificate(GeneratorSequence::geometric(2));
    CHECK(c2.primes == std::vector<BigInt>{BigInt(2)});
    auto c12 = rational_spectrum_certificate(GeneratorSequence::geometric(12));
    CHECK(c12.primes == std::vector<BigInt>{BigInt(2), BigInt(3)});
    CHECK(spectrum_contains(GeneratorSequence::geometric(12), RationalAngle(1, 6)).contains);
}
