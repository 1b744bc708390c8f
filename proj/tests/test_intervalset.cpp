#include <catch2/catch_amalgamated.hpp>

#include "ipergo/intervalset.hpp"

using namespace ipergo;

namespace {
IntervalSet random_arcs(Rng& rng, int max_arcs) {
    std::vector<std::pair<BigRat, BigRat>> arcs;
    int n = 1 + static_cast<int>(rng.below(max_arcs));
    for (int i = 0; i < n; ++i) {
        long a = static_cast<long>(rng.below(1000));
        long len = 1 + static_cast<long>(rng.below(200));
        arcs.emplace_back(BigRat(a, 1000), BigRat(a + len, 1000));
    }
    return IntervalSet::from_arcs(arcs);
}
}  // namespace

TEST_CASE("interval set basics") {
    auto A = IntervalSet::from_arcs({{BigRat(1, 4), BigRat(1, 2)}, {BigRat(3, 4), BigRat(7, 8)}});
    CHECK(A.measure() == BigRat(3, 8));
    CHECK(A.contains(BigRat(1, 4)));
    CHECK(!A.contains(BigRat(1, 2)));  // half-open
    CHECK(A.contains(BigRat(13, 16)));

    // wrapping arc splits
    auto W = IntervalSet::from_arcs({{BigRat(7, 8), BigRat(1, 8)}});
    CHECK(W.measure() == BigRat(1, 4));
    CHECK(W.arcs().size() == 2);
    CHECK(W.contains(BigRat(0)));

    CHECK(IntervalSet::full().measure() == 1);
    CHECK(IntervalSet::empty_set().measure() == 0);

    // overlap merging
    auto M = IntervalSet::from_arcs({{BigRat(0), BigRat(1, 2)}, {BigRat(1, 4), BigRat(3, 4)}});
    CHECK(M.arcs().size() == 1);
    CHECK(M.measure() == BigRat(3, 4));
}

TEST_CASE("interval set algebra is exact") {
    Rng rng(77);
    for (int t = 0; t < 200; ++t) {
        IntervalSet A = random_arcs(rng, 4), B = random_arcs(rng, 4);
        // inclusion-exclusion
        CHECK(IntervalSet::intersect(A, B).measure() + IntervalSet::unite(A, B).measure() ==
              A.measure() + B.measure());
        // complement involution and measure
        CHECK(A.complement().complement() == A);
        CHECK(A.complement().measure() == 1 - A.measure());
        // translation invariance
        BigRat t1(static_cast<long>(rng.below(997)), 997);
        t1.canonicalize();
        CHECK(A.translate(t1).measure() == A.measure());
        CHECK(A.translate(t1).translate(-t1) == A);
    }
}

TEST_CASE("interval correlation") {
    auto quarter = IntervalSet::from_arcs({{BigRat(0), BigRat(1, 4)}});
    CHECK(interval_correlation(quarter, {BigRat(0)}) == BigRat(1, 4));

    auto half = IntervalSet::from_arcs({{BigRat(0), BigRat(1, 2)}});
    CHECK(interval_correlation(half, {BigRat(0), BigRat(1, 2)}) == 0);

    CHECK(interval_correlation(IntervalSet::full(),
                               {BigRat(1, 3), BigRat(2, 7), BigRat(1, 11)}) == 1);

    // A cap (A - t) for the quarter arc has measure (1/4 - t)+
    for (long k = 0; k <= 10; ++k) {
        BigRat t(k, 40);
        t.canonicalize();
        BigRat expect = t <= BigRat(1, 4) ? BigRat(1, 4) - t : BigRat(0);
        CHECK(interval_correlation(quarter, {BigRat(0), t}) == expect);
    }
}
