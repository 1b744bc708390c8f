#pragma once

// Exact interval correlations on the circle and the 2-torus, the Fourier
// route for the skew-product triple correlation, progression-free set
// construction, and the large-intersection density experiments.

#include <algorithm>
#include <functional>
#include <set>
#include <vector>

#include "intervalset.hpp"
#include "systems.hpp"

namespace ipergo {

// ---------------------------------------------------------------------------
// Sweep engine: integral over u in [0,1) of
//   measure( intersection_l ( B_l  -  s_l * u  -  c_l ) )
// for integer speeds s_l and exact offsets c_l. The integrand is piecewise
// linear in u; breakpoints occur where an endpoint of one moving system meets
// an endpoint of another, i.e. u = (e - e') / (s' - s) mod 1/|s'-s|. Between
// breakpoints the value at the midpoint times the width integrates the piece
// exactly.

struct MovingSet {
    const IntervalSet* set;
    long speed;
    BigRat offset;  // the set is translated by -(speed*u + offset)
};

inline BigRat sweep_integral(const std::vector<MovingSet>& systems) {
    if (systems.empty()) return BigRat(1);
    // collect endpoints of each system
    std::vector<std::vector<BigRat>> ends(systems.size());
    for (std::size_t i = 0; i < systems.size(); ++i) {
        for (const auto& a : systems[i].set->arcs()) {
            ends[i].push_back(a.lo);
            ends[i].push_back(a.hi);
        }
        if (ends[i].empty()) return BigRat(0);  // empty factor kills the intersection
    }
    std::set<BigRat> breaks;
    breaks.insert(BigRat(0));
    for (std::size_t i = 0; i < systems.size(); ++i)
        for (std::size_t j = i + 1; j < systems.size(); ++j) {
            long ds = systems[j].speed - systems[i].speed;
            if (ds == 0) continue;
            long ads = std::labs(ds);
            // (e_i - c_i) - s_i u  =  (e_j - c_j) - s_j u  (mod 1)
            //   =>  (s_j - s_i) u = (e_j - c_j) - (e_i - c_i) + k
            for (const auto& ei : ends[i])
                for (const auto& ej : ends[j]) {
                    BigRat base = (ej - systems[j].offset) - (ei - systems[i].offset);
                    for (long kk = 0; kk < ads; ++kk) {
                        BigRat u = (base + kk) / BigRat(ds);
                        breaks.insert(IntervalSet::mod1(u));
                    }
                }
        }
    std::vector<BigRat> pts(breaks.begin(), breaks.end());
    pts.push_back(BigRat(1));
    BigRat total(0);
    for (std::size_t p = 0; p + 1 < pts.size(); ++p) {
        BigRat width = pts[p + 1] - pts[p];
        if (width == 0) continue;
        BigRat mid = pts[p] + width / 2;
        IntervalSet acc = *systems[0].set;
        acc = acc.translate(-(BigRat(systems[0].speed) * mid + systems[0].offset));
        for (std::size_t i = 1; i < systems.size() && !acc.empty(); ++i) {
            IntervalSet ti = systems[i].set->translate(
                -(BigRat(systems[i].speed) * mid + systems[i].offset));
            acc = IntervalSet::intersect(acc, ti);
        }
        if (!acc.empty()) total += acc.measure() * width;
    }
    return total;
}

// ---------------------------------------------------------------------------
// mu( A cap T^{-l1 n} A cap T^{-l2 n} A [cap ...] ) on the skew product with
// A = T x B: substituting u = n x (measure preserving for n != 0) gives
//   integral over (u,y) of 1_B(y) prod_l 1_B(y + l u + c_l(n)),
// with c_l(n) = C(l n, 2) alpha mod 1 computed in exact big-integer
// arithmetic against the fixed-point angle.

inline BigRat skew_correlation_direct(const IntervalSet& B, const FixedPointAngle& alpha,
                                      const BigInt& n, const std::vector<long>& ells) {
    if (n == 0) throw std::invalid_argument("n must be nonzero");
    std::vector<BigRat> offsets;
    offsets.reserve(ells.size());
    for (long l : ells) {
        BigInt b2 = SkewProduct::binom2(BigInt(l) * n);
        FixedPointAngle c = angle_scale(alpha, b2);
        offsets.push_back(angle_turns_exact(AngleValue(c)));
    }
    // the factor 1_B(y + l u + c_l) is B translated by -(l u + c_l)
    std::vector<MovingSet> systems;
    systems.push_back({&B, 0, BigRat(0)});
    for (std::size_t i = 0; i < ells.size(); ++i) systems.push_back({&B, ells[i], offsets[i]});
    return sweep_integral(systems);
}

// Fourier coefficients of the indicator of B: a_m = sum over arcs of
// (e(-m lo) - e(-m hi)) / (2 pi i m), a_0 = mu(B).
inline Complex indicator_fourier(const IntervalSet& B, long m) {
    if (m == 0) return {B.measure_double(), 0.0};
    Complex acc{0, 0};
    for (const auto& a : B.arcs()) {
        double lo = a.lo.get_d(), hi = a.hi.get_d();
        Complex elo{std::cos(-2 * kPi * m * lo), std::sin(-2 * kPi * m * lo)};
        Complex ehi{std::cos(-2 * kPi * m * hi), std::sin(-2 * kPi * m * hi)};
        acc += (elo - ehi);
    }
    return acc / Complex{0.0, 2 * kPi * static_cast<double>(m)};
}

struct FourierCorrelation {
    Complex value{0, 0};
    double tail_bound = 0;  // rigorous bound on the dropped |m| > M/2 mass
    double partial_plim = 0;  // the phase-free sum (the p-lim value proxy)
};

// Triple correlation by Fourier series: the expansion of
// mu(A cap T^{-n}A cap T^{-2n}A) over modes (m, -2m, m) gives
//   sum_m a_m^2 conj(a_{2m}) e(m n^2 alpha),
// summed over |m| <= M/2 so that the a_{2m} factor stays within reach; the
// tail is bounded by the exact Parseval remainder times sup|a|.
inline FourierCorrelation skew_correlation_fourier(const IntervalSet& B, long M,
                                                   const FixedPointAngle& alpha, const BigInt& n) {
    if (n == 0) throw std::invalid_argument("n must be nonzero");
    if (M < 2) throw std::invalid_argument("mode cutoff must be >= 2");
    const long M0 = M / 2;
    std::vector<Complex> a(2 * M + 1);  // a[m + M]
    for (long m = -M; m <= M; ++m) a[m + M] = indicator_fourier(B, m);
    FourierCorrelation out;
    BigInt nsq = n * n;
    for (long m = -M0; m <= M0; ++m) {
        Complex term = a[m + M] * a[m + M] * std::conj(a[2 * m + M]);
        FixedPointAngle ph = angle_scale(alpha, BigInt(m) * nsq);
        double t = ph.signed_turns_double();
        out.value += term * Complex{std::cos(2 * kPi * t), std::sin(2 * kPi * t)};
        out.partial_plim += term.real();
    }
    double mu = B.measure_double();
    double inside = 0;
    for (long m = -M0; m <= M0; ++m) inside += std::norm(a[m + M]);
    double remainder = std::max(mu - inside, 0.0);  // sum_{|m|>M0} |a_m|^2, Parseval
    double supa = mu;
    out.tail_bound = remainder * supa + 1e-12;
    return out;
}

// integral over (t,s) of 1_B(t) 1_B(t+s) 1_B(t+2s): exact sweep with speeds
// (0,1,2); the Fourier side sum_m a_m^2 conj(a_{2m}) cross-validates it.
struct TripleApResult {
    BigRat exact;
    double fourier_partial = 0;
    double fourier_tail_bound = 0;
};

inline TripleApResult triple_ap_integral(const IntervalSet& B, long M = 400) {
    TripleApResult r{BigRat(0), 0, 0};
    std::vector<MovingSet> systems{{&B, 0, BigRat(0)}, {&B, 1, BigRat(0)}, {&B, 2, BigRat(0)}};
    r.exact = sweep_integral(systems);
    const long M0 = M / 2;
    double inside = 0;
    for (long m = -M0; m <= M0; ++m) {
        Complex am = indicator_fourier(B, m);
        Complex a2m = indicator_fourier(B, 2 * m);
        r.fourier_partial += (am * am * std::conj(a2m)).real();
        inside += std::norm(am);
    }
    double mu = B.measure_double();
    r.fourier_tail_bound = std::max(mu - inside, 0.0) * mu + 1e-12;
    return r;
}

// ---------------------------------------------------------------------------
// Density of good rotation times: fraction of n in IP_(Phi_N) with
// mu(A cap (A - l1 n alpha) cap (A - l2 n alpha)) > mu(A)^3 - eps.

inline DensityReport rotation_good_set_density(const IntervalSet& A, const FixedPointAngle& alpha,
                                               long l1, long l2, const GeneratorSequence& gens,
                                               const FolnerSchedule& schedule, double eps,
                                               std::uint32_t N_from, std::uint32_t N_to,
                                               const AverageMode& mode, unsigned threads = 1) {
    BigInt g;
    mpz_gcd(g.get_mpz_t(), BigInt(l1).get_mpz_t(), BigInt(l2).get_mpz_t());
    if (g != 1 && g != -1) throw std::invalid_argument("l1, l2 must be coprime");
    if (!gens.is_geometric())
        throw SpectrumObstruction("good-set density needs a rational-spectrum certificate");
    const double threshold = std::pow(A.measure_double(), 3) - eps;
    DensityReport rep;
    rep.sampled = std::holds_alternative<Sampled>(mode);
    for (std::uint32_t N = N_from; N <= N_to; ++N) {
        IPWindow w = window_clipped(gens, schedule, N);
        auto good = [&](const BigInt& n) {
            FixedPointAngle t1 = angle_scale(alpha, BigInt(l1) * n);
            FixedPointAngle t2 = angle_scale(alpha, BigInt(l2) * n);
            BigRat c = interval_correlation(
                A, {angle_turns_exact(AngleValue(t1)), angle_turns_exact(AngleValue(t2))});
            return c.get_d() > threshold;
        };
        auto me = ip_average(
            w, [&](const BigInt& n) { return Complex(good(n) ? 1.0 : 0.0, 0.0); }, mode, threads);
        rep.points.push_back({N, ip_cardinality(w), me.value.real(), me.stderr_of_mean});
    }
    finish_density_report(rep);
    return rep;
}

// ---------------------------------------------------------------------------
// Progression-free sets. The builder composes exhaustively-verified optimal
// seed blocks (B = A  union  (B0 + t) with t = max(2a, a+b) - 1 keeps
// freeness), confines the result to [0, floor(L/2)) so that no cyclic
// 3-term progression mod L can wrap, and then runs a deterministic seeded
// exchange search over the full cyclic domain to pack in further elements.
// Every output is re-verified 3-AP-free exhaustively.

struct BehrendSet {
    std::uint64_t range = 0;            // L
    std::vector<std::uint32_t> members; // sorted, in [0, L)
    std::string construction;           // parameters, for the report
};

namespace detail {

// exhaustively computed maximal 3-AP-free witnesses in [0, n); first n
// attaining each size (branch-and-bound results, re-verified at use)
inline const std::vector<std::pair<int, std::vector<int>>>& apfree_seeds() {
    static const std::vector<std::pair<int, std::vector<int>>> seeds = {
        {1, {0}},
        {2, {0, 1}},
        {4, {0, 1, 3}},
        {5, {0, 1, 3, 4}},
        {9, {0, 1, 3, 7, 8}},
        {11, {0, 1, 3, 4, 9, 10}},
        {13, {0, 1, 3, 4, 9, 10, 12}},
        {14, {0, 1, 3, 4, 9, 10, 12, 13}},
        {20, {0, 1, 5, 6, 8, 13, 14, 17, 19}},
        {24, {0, 1, 4, 6, 10, 15, 17, 18, 22, 23}},
        {26, {0, 1, 4, 6, 10, 15, 17, 18, 22, 23, 25}},
        {30, {0, 2, 3, 7, 8, 10, 19, 21, 22, 26, 27, 29}},
        {32, {0, 1, 3, 7, 8, 10, 18, 21, 22, 25, 27, 30, 31}},
        {36, {0, 1, 3, 7, 8, 12, 20, 22, 25, 26, 29, 31, 34, 35}},
        {40, {0, 1, 3, 4, 9, 10, 12, 13, 27, 28, 30, 31, 36, 37, 39}},
        {41, {0, 1, 3, 4, 9, 10, 12, 13, 27, 28, 30, 31, 36, 37, 39, 40}},
        {51, {0, 1, 3, 4, 9, 12, 13, 16, 30, 34, 36, 37, 39, 45, 46, 49, 50}},
        {54, {0, 1, 4, 5, 11, 13, 14, 16, 20, 30, 37, 38, 41, 42, 48, 50, 51, 53}},
        {58, {0, 1, 4, 5, 11, 13, 14, 16, 20, 30, 37, 38, 41, 42, 48, 50, 51, 53, 57}},
        {63, {0, 1, 4, 6, 10, 15, 17, 18, 23, 25, 37, 38, 41, 43, 47, 52, 54, 55, 60, 62}},
        {71, {0, 1, 4, 6, 9, 16, 19, 21, 25, 30, 40, 45, 47, 48, 52, 53, 62, 63, 67, 68, 70}},
        {74, {0, 1, 6, 8, 9, 13, 19, 21, 22, 24, 28, 45, 49, 51, 52, 54, 60, 64, 65, 67, 72, 73}},
        {82, {0, 1, 3, 7, 8, 10, 18, 21, 22, 25, 27, 30, 48, 56, 58, 61, 62, 65, 67, 70, 77, 80,
              81}},
        {84, {0, 2, 3, 7, 8, 15, 17, 20, 21, 24, 29, 36, 47, 54, 59, 62, 63, 66, 68, 75, 76, 80,
              81, 83}},
    };
    return seeds;
}

// block-composition DP: f(n) = max size of a 3-AP-free subset of [0, n)
// reachable from the seed blocks; returns the witness for span n
inline std::vector<std::uint32_t> apfree_composition(std::uint32_t span) {
    const auto& seeds = apfree_seeds();
    std::vector<int> f(span + 1, 0);
    // how[n]: (0, seed index) or (1, a, b, t)
    struct How {
        int tag = -1;
        int a = 0, b = 0;
        long t = 0;
    };
    std::vector<How> how(span + 1);
    for (std::uint32_t n = 1; n <= span; ++n) {
        f[n] = f[n - 1];
        how[n] = how[n - 1];
        for (std::size_t si = 0; si < seeds.size(); ++si)
            if (seeds[si].first <= static_cast<int>(n) &&
                static_cast<int>(seeds[si].second.size()) > f[n]) {
                f[n] = static_cast<int>(seeds[si].second.size());
                how[n] = {0, static_cast<int>(si), 0, 0};
            }
        for (std::uint32_t a = 1; a < n; ++a) {
            // t = max(2a, a+b) - 1; span = t + b
            long b1 = static_cast<long>(n) - 2 * a + 1;  // regime b <= a
            if (b1 >= 1 && b1 <= static_cast<long>(a) && f[a] + f[b1] > f[n]) {
                f[n] = f[a] + f[b1];
                how[n] = {1, static_cast<int>(a), static_cast<int>(b1), 2L * a - 1};
            }
            long b2 = (static_cast<long>(n) - a + 1) / 2;  // regime b >= a
            if (b2 >= static_cast<long>(a) && a + 2 * b2 - 1 <= static_cast<long>(n) &&
                f[a] + f[b2] > f[n]) {
                f[n] = f[a] + f[b2];
                how[n] = {1, static_cast<int>(a), static_cast<int>(b2),
                          static_cast<long>(a) + b2 - 1};
            }
        }
    }
    // rebuild the witness
    std::function<std::vector<std::uint32_t>(std::uint32_t)> build =
        [&](std::uint32_t n) -> std::vector<std::uint32_t> {
        if (n == 0 || how[n].tag == -1) return {};
        if (how[n].tag == 0) {
            std::vector<std::uint32_t> out;
            for (int v : seeds[how[n].a].second) out.push_back(v);
            return out;
        }
        auto A = build(how[n].a);
        auto B = build(how[n].b);
        std::vector<std::uint32_t> out = A;
        for (auto v : B) out.push_back(v + static_cast<std::uint32_t>(how[n].t));
        std::sort(out.begin(), out.end());
        return out;
    };
    return build(span);
}

// deterministic cyclic exchange search; conflict counts are maintained
// incrementally so a ruin-and-refill iteration costs O(|S| + L)
class CyclicApSearch {
  public:
    explicit CyclicApSearch(std::uint64_t L) : L_(L), member_(L, 0), cnt_(L, 0) {}

    const std::vector<std::uint32_t>& elems() const { return elems_; }
    bool blocked(std::uint32_t p) const { return member_[p] || cnt_[p] != 0; }

    void add(std::uint32_t e) {
        bump(e, +1);
        member_[e] = 1;
        elems_.push_back(e);
    }
    void remove_at(std::size_t idx) {
        std::uint32_t e = elems_[idx];
        elems_[idx] = elems_.back();
        elems_.pop_back();
        member_[e] = 0;
        bump(e, -1);
    }

    // ruin/recreate loop; returns the best multiset found (sorted)
    std::vector<std::uint32_t> run(std::vector<std::uint32_t> start, std::uint64_t seed,
                                   std::uint64_t iters, std::size_t target) {
        for (auto e : start)
            if (!blocked(e)) add(e);
        Rng rng(seed);
        std::vector<std::uint32_t> best = elems_;
        std::vector<std::uint32_t> cands;
        for (std::uint64_t it = 0; it < iters; ++it) {
            if (rng.below(2)) {
                std::uint32_t lo = static_cast<std::uint32_t>(rng.below(L_));
                std::uint32_t span = 50 + static_cast<std::uint32_t>(rng.below(500));
                for (std::size_t i = 0; i < elems_.size();) {
                    std::uint64_t d = (elems_[i] + L_ - lo) % L_;
                    if (d < span)
                        remove_at(i);
                    else
                        ++i;
                }
            } else {
                std::uint64_t rn = 1 + rng.below(12);
                for (std::uint64_t r = 0; r < rn && !elems_.empty(); ++r)
                    remove_at(rng.below(elems_.size()));
            }
            cands.clear();
            for (std::uint32_t p = 0; p < L_; ++p)
                if (!blocked(p)) cands.push_back(p);
            for (std::size_t i = cands.size(); i > 1; --i) {
                std::size_t j = rng.below(i);
                std::swap(cands[i - 1], cands[j]);
            }
            for (auto p : cands)
                if (!blocked(p)) add(p);
            if (elems_.size() >= best.size()) {
                best = elems_;
                if (best.size() >= target) break;
            } else {
                while (!elems_.empty()) remove_at(0);
                for (auto e : best) add(e);
            }
        }
        std::sort(best.begin(), best.end());
        return best;
    }

  private:
    // positions p with 2p = s (mod L)
    void half_positions(std::uint64_t s, std::uint32_t out[2], int& n) const {
        n = 0;
        if (L_ % 2 == 0) {
            if (s % 2 == 0) {
                out[n++] = static_cast<std::uint32_t>(s / 2);
                out[n++] = static_cast<std::uint32_t>(s / 2 + L_ / 2);
            }
        } else {
            out[n++] = static_cast<std::uint32_t>((s * ((L_ + 1) / 2)) % L_);
        }
    }
    void bump(std::uint32_t e, int d) {
        for (auto a : elems_) {
            cnt_[static_cast<std::size_t>((2 * static_cast<std::uint64_t>(e) + L_ - a) % L_)] += d;
            cnt_[static_cast<std::size_t>((2 * static_cast<std::uint64_t>(a) + L_ - e) % L_)] += d;
            std::uint32_t hp[2];
            int hn;
            half_positions((static_cast<std::uint64_t>(e) + a) % L_, hp, hn);
            for (int i = 0; i < hn; ++i)
                if (hp[i] != e && hp[i] != a) cnt_[hp[i]] += d;
        }
        std::uint32_t hp[2];
        int hn;
        half_positions((2 * static_cast<std::uint64_t>(e)) % L_, hp, hn);
        for (int i = 0; i < hn; ++i)
            if (hp[i] != e) cnt_[hp[i]] += d;
    }

    std::uint64_t L_;
    std::vector<std::uint32_t> elems_;
    std::vector<std::uint8_t> member_;
    std::vector<std::int32_t> cnt_;
};

}  // namespace detail

// exhaustive verification oracle: no three members in arithmetic progression
inline bool is_ap3_free(const std::vector<std::uint32_t>& s) {
    std::set<std::uint64_t> in(s.begin(), s.end());
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            std::uint64_t a = s[i], b = s[j];
            if ((a + b) % 2 == 0) {
                std::uint64_t mid = (a + b) / 2;
                if (mid != a && mid != b && in.count(mid)) return false;
            }
        }
    return true;
}

struct BehrendOptions {
    std::uint64_t polish_seed = 20250809;
    std::uint64_t polish_iters = 60000;
    std::size_t polish_target = 0;  // 0: derive from L (ratio 0.2 threshold)
};

inline BehrendSet behrend_build(std::uint64_t L, const BehrendOptions& opts = {}) {
    if (L < 8) throw std::invalid_argument("L must be >= 8");
    // confine to [0, L/2): i + k - 2j = +-L is then impossible, so mod-1
    // wraparound progressions between cells cannot occur
    std::uint32_t span = static_cast<std::uint32_t>(L / 2);
    auto base = detail::apfree_composition(span);
    std::size_t target = opts.polish_target;
    if (target == 0) {
        // size needed for the 0.2-ratio contrast plus nothing to spare:
        // ceil(sqrt(10 L))
        long double t = std::sqrt(static_cast<long double>(10.0) * L);
        target = static_cast<std::size_t>(std::ceil(t));
    }
    std::vector<std::uint32_t> members = base;
    if (members.size() < target && L <= 2000000) {
        detail::CyclicApSearch search(L);
        members = search.run(base, opts.polish_seed, opts.polish_iters, target);
    }
    std::sort(members.begin(), members.end());
    if (!is_ap3_free(members)) throw Error("progression-free construction failed verification");
    BehrendSet out;
    out.range = L;
    out.members = std::move(members);
    out.construction = "seeded block composition over [0," + std::to_string(span) +
                       ") + cyclic exchange search (seed " + std::to_string(opts.polish_seed) +
                       ", <=" + std::to_string(opts.polish_iters) + " iters)";
    return out;
}

// B = union over members s of [s/L, s/L + 1/(4L)); the quarter-cell width
// keeps distinct cells from touching and confines progression mass to the
// lattice relations checked above.
inline IntervalSet behrend_interval_set(const BehrendSet& S) {
    std::vector<std::pair<BigRat, BigRat>> arcs;
    BigRat L(static_cast<unsigned long>(S.range));
    for (auto s : S.members) {
        BigRat lo(static_cast<unsigned long>(s));
        lo /= L;
        arcs.emplace_back(lo, lo + BigRat(1) / (4 * L));
    }
    return IntervalSet::from_arcs(arcs);
}

// ---------------------------------------------------------------------------
// Integer-set window experiments: d* is estimated by the maximum sliding-
// window density at a declared window length w (reported with w; the true
// Banach density is not finitely computable).

class IntegerSetWindow {
  public:
    explicit IntegerSetWindow(std::uint64_t W) : W_(W), bits_((W + 63) / 64, 0) {
        if (W < 1) throw std::invalid_argument("window length must be >= 1");
    }
    static IntegerSetWindow multiples_of(std::uint64_t r, std::uint64_t W) {
        IntegerSetWindow e(W);
        for (std::uint64_t x = 0; x < W; x += r) e.insert(x);
        return e;
    }

    std::uint64_t window_length() const { return W_; }
    void insert(std::uint64_t x) {
        if (x < W_) bits_[x / 64] |= (std::uint64_t{1} << (x % 64));
    }
    bool contains(std::uint64_t x) const {
        return x < W_ && (bits_[x / 64] >> (x % 64)) & 1;
    }

    // E cap (E - s) restricted to [0, W - s)
    IntegerSetWindow intersect_shift(std::uint64_t s) const {
        IntegerSetWindow out(W_ >= s ? W_ - s : 1);
        for (std::uint64_t x = 0; x < out.W_; ++x)
            if (contains(x) && contains(x + s)) out.insert(x);
        return out;
    }

    // maximum density over all windows of length w inside [0, limit)
    double max_window_density(std::uint64_t w, std::uint64_t limit) const {
        if (limit > W_) limit = W_;
        if (w > limit || w == 0) throw WindowTooSmall("window length exceeds valid range");
        std::uint64_t count = 0;
        for (std::uint64_t x = 0; x < w; ++x) count += contains(x);
        std::uint64_t best = count;
        for (std::uint64_t x = w; x < limit; ++x) {
            count += contains(x);
            count -= contains(x - w);
            best = std::max(best, count);
        }
        return static_cast<double>(best) / static_cast<double>(w);
    }

  private:
    std::uint64_t W_;
    std::vector<std::uint64_t> bits_;
};

inline DensityReport integer_good_set_density(const IntegerSetWindow& E,
                                              const GeneratorSequence& gens,
                                              const FolnerSchedule& schedule, long l1, long l2,
                                              double eps, std::uint64_t w, std::uint32_t N_from,
                                              std::uint32_t N_to, bool include_l3,
                                              const AverageMode& mode, unsigned threads = 1) {
    BigInt g;
    mpz_gcd(g.get_mpz_t(), BigInt(l1).get_mpz_t(), BigInt(l2).get_mpz_t());
    if (g != 1 && g != -1) throw std::invalid_argument("l1, l2 must be coprime");
    const std::uint64_t W = E.window_length();
    if (!(w <= W / 2)) throw std::invalid_argument("need w <= W/2");
    std::vector<long> ells{l1, l2};
    if (include_l3) ells.push_back(l1 + l2);
    long lmax = *std::max_element(ells.begin(), ells.end());
    double dstar = E.max_window_density(w, W);
    const double threshold = std::pow(dstar, include_l3 ? 4 : 3) - eps;

    DensityReport rep;
    rep.sampled = std::holds_alternative<Sampled>(mode);
    for (std::uint32_t N = N_from; N <= N_to; ++N) {
        IPWindow win = window_clipped(gens, schedule, N);
        auto good = [&](const BigInt& n) -> bool {
            if (n == 0) return true;  // all intersections are E itself
            BigInt need = BigInt(lmax) * n;
            if (need >= static_cast<unsigned long>(W))
                throw WindowTooSmall("l_max * n >= W at n = " + n.get_str() +
                                     "; grow W with N");
            std::uint64_t nn = mpz_get_ui(n.get_mpz_t());
            std::uint64_t valid = W - static_cast<std::uint64_t>(lmax) * nn;
            // windowed density of E cap (E - l1 n) cap (E - l2 n)[ cap (E - l3 n)]
            IntegerSetWindow acc(valid);
            for (std::uint64_t x = 0; x < valid; ++x) {
                bool in = E.contains(x);
                for (long l : ells) in = in && E.contains(x + static_cast<std::uint64_t>(l) * nn);
                if (in) acc.insert(x);
            }
            if (w > valid) throw WindowTooSmall("valid region shorter than the density window");
            return acc.max_window_density(w, valid) > threshold;
        };
        auto me = ip_average(
            win, [&](const BigInt& n) { return Complex(good(n) ? 1.0 : 0.0, 0.0); }, mode,
            threads);
        rep.points.push_back({N, ip_cardinality(win), me.value.real(), me.stderr_of_mean});
    }
    finish_density_report(rep);
    return rep;
}

}  // namespace ipergo
