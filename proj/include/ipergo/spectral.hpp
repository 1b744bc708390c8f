#pragma once

// Product-formula character averages, the limit multiplier omega, convergence
// classification, spectrum membership decisions, and the divergence-witness
// constructor.
//
// omega(alpha) = lim_N prod_{j in Phi_N} (1 + alpha^{n_j})/2 is decided
// exactly for rational alpha with certifiably eventually-periodic residue
// orbits: either all residues vanish from some j0 on (Finite, the product of
// the finitely many non-unit factors) or infinitely many factors have modulus
// <= 1 - eps0 with eps0 = 1 - cos(pi/q) (ExactZero). Numeric fixed-point
// angles never certify ExactZero; they get a Truncated partial product whose
// modulus bounds |omega| from above (factors only shrink it).

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "circle.hpp"
#include "ipset.hpp"

namespace ipergo {

// E_{n in IP_Phi} alpha^n = prod_{j in Phi} (1 + alpha^{n_j})/2, computed in
// O(|Phi|) as a log-polar product, never by enumeration.
inline LogPolar character_average(const IPWindow& w, const AngleValue& alpha) {
    LogPolar acc = LogPolar::one();
    if (const auto* ra = std::get_if<RationalAngle>(&alpha)) {
        const BigInt& q = ra->den();
        for (auto j : w.indices) {
            BigInt r = w.gens.term_mod(j, q);
            LogPolar z = half_sum(RationalAngle(r * ra->num(), q));
            if (z.is_zero()) return LogPolar::zero();
            acc = logpolar_mul(acc, z);
        }
        return acc;
    }
    const auto& fa = std::get<FixedPointAngle>(alpha);
    for (auto j : w.indices) {
        LogPolar z = half_sum(angle_scale(fa, w.gens.term(j)));
        if (z.is_zero()) return LogPolar::zero();
        acc = logpolar_mul(acc, z);
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Residue periodicity of n_j mod q from a given start index.

struct ResiduePeriod {
    std::uint64_t preperiod = 0;  // residues are periodic for j >= start + preperiod
    std::uint64_t period = 1;
};

// Certified (preperiod, period) of j -> n_j mod q for j >= start, or nullopt
// when a finite explicit list is too short to certify one.
inline std::optional<ResiduePeriod> find_residue_period(const GeneratorSequence& gens,
                                                        const BigInt& q, std::uint64_t start) {
    if (q == 1) return ResiduePeriod{0, 1};
    if (gens.is_geometric()) {
        // state base^(j-1) mod q walks into a rho-shaped cycle within q steps
        std::map<BigInt, std::uint64_t> seen;
        BigInt state = 1;  // base^0
        const BigInt& base = gens.geometric_rule()->base;
        // advance to the start index
        BigInt e(start - 1), b = base % q;
        mpz_powm(state.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), q.get_mpz_t());
        for (std::uint64_t step = 0;; ++step) {
            auto it = seen.find(state);
            if (it != seen.end()) return ResiduePeriod{it->second, step - it->second};
            seen.emplace(state, step);
            state = (state * base) % q;
        }
    }
    auto len = gens.length();
    if (!len) return std::nullopt;
    if (start > *len) return ResiduePeriod{0, 1};  // empty tail
    std::vector<BigInt> rs;
    for (std::uint64_t j = start; j <= *len; ++j) rs.push_back(gens.term_mod(j, q));
    // certify (s, p) only if the list shows at least two full periods past s
    for (std::uint64_t s = 0; s < rs.size(); ++s) {
        for (std::uint64_t p = 1; s + 2 * p <= rs.size(); ++p) {
            bool ok = true;
            for (std::uint64_t i = s; i + p < rs.size() && ok; ++i)
                if (rs[i] != rs[i + p]) ok = false;
            if (ok) return ResiduePeriod{s, p};
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// OmegaValue.

struct OmegaValue {
    enum class Status { ExactZero, Finite, Truncated };
    Status status = Status::Finite;

    Complex value{1.0, 0.0};    // Finite: the exact limit (may be 0 if a factor vanishes)
    std::uint64_t j0 = 0;       // Finite: all factors with j >= j0 are exactly 1
    LogPolar partial;           // Truncated: product over the inspected window
    double residual_bound = 1.0;  // Truncated: |omega| <= this bound
    double epsilon0 = 0.0;      // ExactZero: infinitely many factors <= 1 - eps0
    std::optional<ResiduePeriod> certificate;

    bool is_exact_zero() const { return status == Status::ExactZero; }
    bool is_finite() const { return status == Status::Finite; }
    bool is_truncated() const { return status == Status::Truncated; }

    // the best available complex value (Truncated: the partial product)
    Complex best_value() const {
        switch (status) {
            case Status::ExactZero: return {0, 0};
            case Status::Finite: return value;
            default: return partial.value();
        }
    }
};

// horizon: window index used for Truncated numeric evaluation (and the cap on
// how far Finite tails are certified inside explicit lists).
inline OmegaValue omega(const GeneratorSequence& gens, const FolnerSchedule& schedule,
                        const AngleValue& alpha, std::uint32_t horizon = 64) {
    if (!schedule.is_increasing())
        throw UnsupportedSchedule("omega is defined along increasing Folner sequences only");
    const std::uint32_t start = schedule.start();

    if (const auto* ra = std::get_if<RationalAngle>(&alpha)) {
        const BigInt& q = ra->den();
        OmegaValue out;
        if (ra->is_one()) {
            out.status = OmegaValue::Status::Finite;
            out.value = {1.0, 0.0};
            out.j0 = start;
            return out;
        }
        auto rp = find_residue_period(gens, q, start);
        if (!rp)
            throw PeriodNotFound("cannot certify residue periodicity mod " + q.get_str() +
                                 "; provide more generator terms");
        out.certificate = rp;
        // indices past the end of a finite rule contribute no factors
        auto len = gens.length();
        auto in_range = [&](std::uint64_t j) { return !len || j <= *len; };
        // geometric rule: inspect one full cycle past the preperiod; finite
        // rules: inspect the whole list (period certified inside it)
        std::uint64_t tail_from = start + rp->preperiod;  // cycle begins here
        bool cycle_all_zero = true;
        for (std::uint64_t j = tail_from; j < tail_from + rp->period; ++j) {
            if (in_range(j) && gens.term_mod(j, q) != 0) {
                cycle_all_zero = false;
                break;
            }
        }
        if (!cycle_all_zero) {
            out.status = OmegaValue::Status::ExactZero;
            out.epsilon0 = 1.0 - std::cos(kPi / q.get_d());
            return out;
        }
        // finitely many non-unit factors live in [start, tail_from)
        out.status = OmegaValue::Status::Finite;
        LogPolar prod = LogPolar::one();
        for (std::uint64_t j = start; j < tail_from; ++j) {
            if (!in_range(j)) break;
            BigInt r = gens.term_mod(j, q);
            if (r == 0) continue;
            prod = logpolar_mul(prod, half_sum(RationalAngle(r * ra->num(), q)));
            if (prod.is_zero()) break;
        }
        out.value = prod.value();
        out.j0 = tail_from;
        return out;
    }

    // numeric fixed-point angle: truncated partial product over Phi_horizon
    OmegaValue out;
    out.status = OmegaValue::Status::Truncated;
    IPWindow w = IPWindow::from_schedule(gens, schedule, std::max(horizon, start));
    out.partial = character_average(w, alpha);
    out.residual_bound = out.partial.abs();
    return out;
}

// ---------------------------------------------------------------------------
// Convergence classification per the norm/argument trichotomy.

struct ConvergenceVerdict {
    enum class Tag { ConvergesToZero, ConvergesNonzero, Diverges, Inconclusive };
    Tag tag = Tag::Inconclusive;
    Complex limit{0.0, 0.0};          // ConvergesNonzero
    double norm_product_bound = 0.0;  // Diverges: lower bound on prod r_j
    double argument_sum = 0.0;        // Diverges: sum of theta_j over the list
    std::vector<double> theta_trace;  // per-j half arguments
};

namespace detail {
// theta_j of the witness list: arg((1+alpha^{n_j})/2) = arg(alpha^{n_j})/2
inline std::vector<double> witness_thetas(const GeneratorSequence::Witness& w) {
    std::vector<double> th;
    th.reserve(w.terms.size());
    for (const auto& n : w.terms) {
        FixedPointAngle a = angle_scale(w.alpha, n);
        th.push_back(kPi * a.signed_turns_double());
    }
    return th;
}
}  // namespace detail

inline ConvergenceVerdict classify_convergence(const GeneratorSequence& gens,
                                               const FolnerSchedule& schedule,
                                               const AngleValue& alpha,
                                               std::uint32_t horizon = 64) {
    if (!schedule.is_increasing())
        throw UnsupportedSchedule("classification needs an increasing Folner sequence");
    ConvergenceVerdict v;

    // a divergence witness certifies its own construction: theta_j in
    // (1/j, 1/j + 1/j^2) makes the argument sums grow like the harmonic
    // series while sum theta_j^2 stays bounded, so the norms do not vanish
    if (gens.is_witness() && std::holds_alternative<FixedPointAngle>(alpha) &&
        std::get<FixedPointAngle>(alpha) == gens.witness_rule()->alpha) {
        const auto* wr = gens.witness_rule();
        auto th = detail::witness_thetas(*wr);
        bool in_band = true;
        double sum = 0, sumsq = 0, thmax = 0;
        for (std::size_t j = 1; j <= th.size(); ++j) {
            double t = th[j - 1];
            if (!(t > 1.0 / j && t < 1.0 / j + 1.0 / (double(j) * j))) in_band = false;
            sum += t;
            sumsq += t * t;
            thmax = std::max(thmax, std::abs(t));
        }
        v.theta_trace = th;
        if (in_band) {
            v.tag = ConvergenceVerdict::Tag::Diverges;
            v.argument_sum = sum;
            // finite partial product of the factor moduli r_j = cos(theta_j);
            // it dominates the limit since every factor is <= 1
            double logprod = 0;
            for (double t : th) logprod += std::log(std::cos(t));
            v.norm_product_bound = std::exp(logprod);
            return v;
        }
        v.tag = ConvergenceVerdict::Tag::Inconclusive;
        return v;
    }

    OmegaValue om = omega(gens, schedule, alpha, horizon);
    switch (om.status) {
        case OmegaValue::Status::ExactZero:
            v.tag = ConvergenceVerdict::Tag::ConvergesToZero;
            return v;
        case OmegaValue::Status::Finite:
            if (om.value == Complex{0, 0}) {
                v.tag = ConvergenceVerdict::Tag::ConvergesToZero;
            } else {
                // tail factors are exactly 1: the argument sum is eventually
                // constant, so the product converges to the finite value
                v.tag = ConvergenceVerdict::Tag::ConvergesNonzero;
                v.limit = om.value;
            }
            return v;
        default: {
            v.tag = ConvergenceVerdict::Tag::Inconclusive;
            IPWindow w = IPWindow::from_schedule(gens, schedule, std::max(horizon, schedule.start()));
            const auto& fa = std::get<FixedPointAngle>(alpha);
            for (auto j : w.indices) {
                FixedPointAngle a = angle_scale(fa, w.gens.term(j));
                v.theta_trace.push_back(kPi * a.signed_turns_double());
            }
            return v;
        }
    }
}

// ---------------------------------------------------------------------------
// Spectrum membership for rational points: alpha = p/q belongs to the
// generating set of the spectrum iff n_j = 0 mod q for all j past some m,
// detected within one full period past the preperiod. Only generator rules
// with certifiable periodicity are decided; everything else raises
// PeriodNotFound rather than guessing.

struct SpectrumDecision {
    bool contains = false;
    ResiduePeriod certificate;
};

inline SpectrumDecision spectrum_contains(const GeneratorSequence& gens,
                                          const RationalAngle& alpha) {
    const BigInt& q = alpha.den();
    auto rp = find_residue_period(gens, q, 1);
    if (!rp)
        throw PeriodNotFound("explicit generator list too short to certify a period mod " +
                             q.get_str());
    SpectrumDecision d;
    d.certificate = *rp;
    if (alpha.is_one()) {
        d.contains = true;
        return d;
    }
    d.contains = true;
    for (std::uint64_t j = 1 + rp->preperiod; j < 1 + rp->preperiod + rp->period; ++j) {
        if (gens.term_mod(j, q) != 0) {
            d.contains = false;
            break;
        }
    }
    return d;
}

// For n_j = a^(j-1) the spectrum is generated by the rational points whose
// denominator has every prime factor dividing a.
struct RationalSpectrumCertificate {
    BigInt base;
    std::vector<BigInt> primes;  // prime divisors of the base
    std::string description;
};

inline std::vector<BigInt> prime_divisors(BigInt n) {
    std::vector<BigInt> ps;
    for (BigInt p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            ps.push_back(p);
            while (n % p == 0) n /= p;
        }
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

inline RationalSpectrumCertificate rational_spectrum_certificate(const GeneratorSequence& gens) {
    const auto* g = gens.geometric_rule();
    if (!g)
        throw std::invalid_argument(
            "rational spectrum certificates are issued for geometric rules only");
    RationalSpectrumCertificate c;
    c.base = g->base;
    c.primes = prime_divisors(g->base);
    c.description = "{ e^{2 pi i m / q} : every prime factor of q divides " + g->base.get_str() + " }";
    return c;
}

// ---------------------------------------------------------------------------
// Divergence witness: pick n_j with arg(alpha^{n_j}) in (2/j, 2/j + 2/j^2),
// i.e. theta_j in (1/j, 1/j + 1/j^2), by exhaustive search over n = 1, 2, ...
// The arc is additionally clipped so every factor keeps modulus
// cos(theta_j) >= 0.1: a factor too close to the zero at arg = pi would
// collapse the norm product that the construction must keep away from 0.

inline constexpr double kWitnessModulusFloor = 0.1;

inline GeneratorSequence construct_divergence_witness(const FixedPointAngle& alpha,
                                                      std::uint32_t J,
                                                      std::uint64_t search_bound = 10000000) {
    // reject angles with a small-denominator rational within 2^-P/2: walk the
    // continued fraction of frac/2^P and look at convergents
    {
        const unsigned P = alpha.bits();
        BigRat t(alpha.frac(), alpha.modulus());
        BigInt h0 = 0, h1 = 1, k0 = 1, k1 = 0;  // convergent recurrences
        BigRat x = t;
        BigInt qmax = BigInt(1) << (P / 4);
        mpf_class eps(0.5, 64);
        for (int it = 0; it < 10000; ++it) {
            BigInt a = x.get_num() / x.get_den();
            BigInt h2 = a * h1 + h0, k2 = a * k1 + k0;
            if (k2 > qmax) break;
            if (k2 > 0) {
                BigRat conv(h2, k2);
                conv.canonicalize();
                BigRat diff = t - conv;
                if (diff < 0) diff = -diff;
                // diff < 2^-(P/2) with a small denominator: too close to rational
                BigRat thr(BigInt(1), BigInt(1) << (P / 2));
                if (diff < thr)
                    throw std::invalid_argument(
                        "angle is within 2^-P/2 of a small-denominator rational");
            }
            h0 = h1; h1 = h2; k0 = k1; k1 = k2;
            BigRat fracpart = x - BigRat(a);
            if (fracpart == 0) break;
            x = BigRat(1) / fracpart;
        }
    }

    std::vector<BigInt> terms;
    BigInt frac = alpha.frac();
    const BigInt mod = alpha.modulus();
    const double arg_cap = 2.0 * std::acos(kWitnessModulusFloor);
    for (std::uint32_t j = 1; j <= J; ++j) {
        // target band for arg(alpha^n) in radians, clipped to the modulus floor
        double lo = 2.0 / j;
        double hi = std::min(2.0 / j + 2.0 / (double(j) * j), arg_cap);
        if (!(lo < hi))
            throw std::invalid_argument("target arc for j=" + std::to_string(j) +
                                        " does not meet (-pi, pi)");
        BigInt acc = 0;
        bool found = false;
        for (std::uint64_t n = 1; n <= search_bound; ++n) {
            acc += frac;
            if (acc >= mod) acc -= mod;
            FixedPointAngle a(acc, alpha.bits());
            double arg = 2 * kPi * a.signed_turns_double();
            if (arg > lo && arg < hi) {
                terms.push_back(BigInt(static_cast<unsigned long>(n)));
                found = true;
                break;
            }
        }
        if (!found)
            throw SearchBoundExceeded("no n <= " + std::to_string(search_bound) +
                                      " hits the arc for j=" + std::to_string(j));
    }
    return GeneratorSequence::witness(alpha, std::move(terms));
}

}  // namespace ipergo
