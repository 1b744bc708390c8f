#pragma once

// Finite-form van der Corput checks, fixed-input IP uniformity seminorms,
// cubic-measure integrals on computable systems, and the inequality chains
// connecting them.
//
// The supremum-form seminorms quantify over all rational-spectrum sequences
// and increasing Folner schedules; those are not computable. Here the inputs
// (gens, schedule) are FIXED and every reported value is arranged to be a
// certified lower bound of the supremum form, so the control inequalities
// keep their direction:
//   U^1 certified:  sum over modes with decidable omega of |omega|^2 |c|^2
//                   (dropped irrational-mode terms are nonnegative);
//   U^2 certified:  closed-form limit of E_{m1,m2} ||T^{m1}f conj(T^{m2}f)||^2
//                   with omega factors; on a torus this needs the geometric
//                   rational-spectrum certificate (the theorem kills the
//                   irrational-mode products in the limit).

#include <functional>
#include <optional>
#include <vector>

#include "systems.hpp"

namespace ipergo {

// ---------------------------------------------------------------------------
// van der Corput, finite Jensen step: exact at each (N, M), by enumeration.
//   lhs = || E_{n in IP_[1..N]} x_n ||^2
//   rhs = E_{n in IP_(M..N]} || E_{m in IP_[1..M]} x_{n+m} ||^2

struct VdcReport {
    double lhs = 0, rhs = 0;
    bool holds = false;
};

inline VdcReport vdc_finite_check(const std::function<std::vector<Complex>(const BigInt&)>& xs,
                                  const GeneratorSequence& gens, std::uint32_t N, std::uint32_t M,
                                  std::uint64_t cap = kDefaultEnumCap) {
    if (!(M < N)) throw std::invalid_argument("need M < N");
    std::vector<std::uint32_t> all, upper, lower;
    for (std::uint32_t j = 1; j <= N; ++j) {
        all.push_back(j);
        (j <= M ? lower : upper).push_back(j);
    }
    IPWindow wAll(gens, all), wUp(gens, upper), wLo(gens, lower);

    std::vector<Complex> mean_all;
    std::uint64_t count_all = 0;
    for_each_sum(wAll, cap, [&](const BigInt& s, std::uint64_t) {
        auto v = xs(s);
        if (mean_all.empty()) mean_all.assign(v.size(), Complex{0, 0});
        for (std::size_t i = 0; i < v.size(); ++i) mean_all[i] += v[i];
        ++count_all;
    });
    double lhs = 0;
    for (auto& c : mean_all) {
        c /= static_cast<double>(count_all);
        lhs += std::norm(c);
    }

    double rhs = 0;
    std::uint64_t count_up = 0;
    for_each_sum(wUp, cap, [&](const BigInt& n, std::uint64_t) {
        std::vector<Complex> inner;
        std::uint64_t count_lo = 0;
        for_each_sum(wLo, cap, [&](const BigInt& m, std::uint64_t) {
            auto v = xs(n + m);
            if (inner.empty()) inner.assign(v.size(), Complex{0, 0});
            for (std::size_t i = 0; i < v.size(); ++i) inner[i] += v[i];
            ++count_lo;
        });
        double nrm = 0;
        for (auto& c : inner) {
            c /= static_cast<double>(count_lo);
            nrm += std::norm(c);
        }
        rhs += nrm;
        ++count_up;
    });
    rhs /= static_cast<double>(count_up);
    return {lhs, rhs, lhs <= rhs + 1e-10};
}

// ---------------------------------------------------------------------------
// Spectral data shared by the seminorm and cubic computations: a list of
// (frequency key, coefficient, eigenvalue angle). Frequencies add; on Z/m
// they are reduced mod m.

namespace detail {

struct Mode {
    FreqVec freq;
    Complex coeff;
};

struct ModeAlgebra {
    // finite rotation: dim 0 marker, modulus > 0; torus: modulus == 0
    int modulus = 0;
    int dim = 1;
    const FiniteRotation* fin = nullptr;
    const TorusRotation* tor = nullptr;

    FreqVec add(const FreqVec& a, const FreqVec& b) const {
        FreqVec r(a);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
        if (modulus) r[0] = ((r[0] % modulus) + modulus) % modulus;
        return r;
    }
    FreqVec neg(const FreqVec& a) const {
        FreqVec r(a);
        for (auto& v : r) v = -v;
        if (modulus) r[0] = ((r[0] % modulus) + modulus) % modulus;
        return r;
    }
    bool is_trivial_char(const FreqVec& a) const {
        if (modulus) return a[0] % modulus == 0;
        for (auto v : a) if (v != 0) return false;
        return true;
    }
    AngleValue angle(const FreqVec& a) const {
        if (modulus) return AngleValue(fin->eigenvalue_angle(static_cast<int>(a[0])));
        return tor->eigenvalue_angle(a);
    }
    bool angle_rational(const FreqVec& a) const {
        if (modulus) return true;
        return tor->mode_angle_is_rational(a);
    }
};

inline std::vector<Mode> spectrum_of(const FiniteRotation& sys, const std::vector<Complex>& f,
                                     ModeAlgebra& alg) {
    alg.modulus = sys.modulus;
    alg.dim = 1;
    alg.fin = &sys;
    auto hat = sys.dft(f);
    std::vector<Mode> modes;
    for (int k = 0; k < sys.modulus; ++k)
        if (hat[k] != Complex{0, 0}) modes.push_back({FreqVec{k}, hat[k]});
    return modes;
}
inline std::vector<Mode> spectrum_of(const TorusRotation& sys, const TrigPolynomial& f,
                                     ModeAlgebra& alg) {
    alg.modulus = 0;
    alg.dim = sys.dim();
    alg.tor = &sys;
    std::vector<Mode> modes;
    for (const auto& [k, c] : f.coeffs()) modes.push_back({k, c});
    return modes;
}

// omega oracle: exact value where decidable, nullopt for irrational angles
// without a rational-spectrum certificate, 0-by-theorem with one.
struct OmegaOracle {
    const GeneratorSequence* gens;
    const FolnerSchedule* schedule;
    bool rational_spectrum_certified = false;

    std::optional<Complex> operator()(const AngleValue& a) const {
        if (std::holds_alternative<RationalAngle>(a))
            return omega(*gens, *schedule, a).best_value();
        if (rational_spectrum_certified) return Complex{0, 0};
        return std::nullopt;
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Cubic-measure integral: integral over X^[k] of tensor C^|eps| f d mu^[k],
// where mu^[k] is built by relatively independent joinings over the rational
// Kronecker factor. On a finite rotation every eigenvalue is rational, the
// joinings collapse to the diagonal, and the integral is the L^{2^k} norm to
// the 2^k-th power. On a torus the conditional expectation keeps exactly the
// tensor modes whose total eigenvalue angle is rational, which reduces the
// integral to a filtered sum over frequency tuples.

inline double cubic_integral(const FiniteRotation& sys, const std::vector<Complex>& f, int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("cubic level k must be in 1..3");
    double acc = 0;
    double e = std::pow(2.0, k);
    for (const auto& v : f) acc += std::pow(std::abs(v), e);
    return acc / sys.modulus;
}

inline double cubic_integral(const TorusRotation& sys, const TrigPolynomial& f, int k) {
    if (k < 1 || k > 3) throw std::invalid_argument("cubic level k must be in 1..3");
    detail::ModeAlgebra alg;
    auto modes = detail::spectrum_of(sys, f, alg);
    const std::size_t V = std::size_t{1} << k;
    if (modes.empty()) return 0.0;
    // odometer over the tuple (m_eps), eps in [0, 2^k)
    std::vector<std::size_t> pos(V, 0);
    Complex total{0, 0};
    while (true) {
        // coefficient: even |eps| -> hat f(m), odd -> conj(hat f(-m)) with the
        // vertex frequency being the negated one; iterate with that in mind
        Complex coeff{1, 0};
        std::vector<FreqVec> freq(V);
        for (std::size_t eps = 0; eps < V; ++eps) {
            const auto& md = modes[pos[eps]];
            int par = __builtin_popcountll(eps) & 1;
            if (par == 0) {
                coeff *= md.coeff;
                freq[eps] = md.freq;
            } else {
                coeff *= std::conj(md.coeff);
                freq[eps] = alg.neg(md.freq);
            }
        }
        // level conditions: split by the top coordinate, check both halves'
        // total angle rational, merge, recurse down to level 0
        bool ok = true;
        std::vector<FreqVec> cur = freq;
        for (int level = k; level >= 1 && ok; --level) {
            std::size_t half = std::size_t{1} << (level - 1);
            FreqVec sum0(alg.dim, 0), sum1(alg.dim, 0);
            for (std::size_t i = 0; i < half; ++i) sum0 = alg.add(sum0, cur[i]);
            for (std::size_t i = half; i < 2 * half; ++i) sum1 = alg.add(sum1, cur[i]);
            if (!alg.angle_rational(sum0) || !alg.angle_rational(sum1)) ok = false;
            if (!ok) break;
            std::vector<FreqVec> merged(half);
            for (std::size_t i = 0; i < half; ++i) merged[i] = alg.add(cur[i], cur[half + i]);
            cur.swap(merged);
        }
        if (ok && alg.is_trivial_char(cur[0])) total += coeff;
        // advance
        std::size_t i = 0;
        while (i < V) {
            if (++pos[i] < modes.size()) break;
            pos[i] = 0;
            ++i;
        }
        if (i == V) break;
    }
    if (std::abs(total.imag()) > 1e-9 * (1 + std::abs(total.real())))
        throw Error("cubic integral came out non-real; broken spectral data");
    return total.real();
}

// ---------------------------------------------------------------------------
// Fixed-input seminorms.

struct SeminormReport {
    int level = 1;
    double value = 0.0;       // certified lower bound of the sup-form seminorm
    std::uint32_t window = 0;
    std::vector<std::pair<std::uint32_t, double>> trace;  // finite-N values
    double truncation_leak = 0.0;  // bound on mass dropped at irrational modes
};

namespace detail {

// finite-N product multiplier A_N(angle), and its certified limit
inline Complex finiteN_multiplier(const GeneratorSequence& gens, const FolnerSchedule& schedule,
                                  std::uint32_t N, const AngleValue& a) {
    return character_average(window_clipped(gens, schedule, N), a).value();
}

// U1^2 with multiplier(angle) plugged in for |omega|^2; nullopt multipliers
// contribute `leak` instead of value
template <typename Mult>
double u1_squared(const std::vector<Mode>& modes, const ModeAlgebra& alg, Mult&& mult,
                  double* leak) {
    double acc = 0;
    for (const auto& md : modes) {
        std::optional<Complex> m = mult(alg.angle(md.freq));
        if (m)
            acc += std::norm(*m) * std::norm(md.coeff);
        else if (leak)
            *leak += std::norm(md.coeff);
    }
    return acc;
}

// memoizes a multiplier by frequency key (the angle is a function of it)
template <typename Mult>
struct CachedMult {
    const ModeAlgebra& alg;
    Mult mult;
    std::map<FreqVec, std::optional<Complex>> cache;
    std::optional<Complex> operator()(const FreqVec& k) {
        auto it = cache.find(k);
        if (it != cache.end()) return it->second;
        auto v = mult(alg.angle(k));
        cache.emplace(k, v);
        return v;
    }
};

// U2^4 = sum over (p,q,p',q') with p-q = p'-q' of
//   c_p conj(c_q) conj(c_p') c_q' * M(angle(p-p')) conj(M(angle(q-q')))
//   * |M(angle(p-q))|^2
// where M is the multiplier (A_N at finite N, omega in the certified limit).
template <typename Mult>
double u2_fourth(const std::vector<Mode>& modes, const ModeAlgebra& alg, Mult&& mult,
                 double* leak) {
    double acc = 0;
    const std::size_t n = modes.size();
    CachedMult<Mult&> cm{alg, mult, {}};
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q) {
            FreqVec s = alg.add(modes[p].freq, alg.neg(modes[q].freq));
            std::optional<Complex> ms = cm(s);
            for (std::size_t p2 = 0; p2 < n; ++p2)
                for (std::size_t q2 = 0; q2 < n; ++q2) {
                    FreqVec s2 = alg.add(modes[p2].freq, alg.neg(modes[q2].freq));
                    if (s2 != s) continue;
                    std::optional<Complex> mp =
                        cm(alg.add(modes[p].freq, alg.neg(modes[p2].freq)));
                    std::optional<Complex> mq =
                        cm(alg.add(modes[q].freq, alg.neg(modes[q2].freq)));
                    Complex coeff = modes[p].coeff * std::conj(modes[q].coeff) *
                                    std::conj(modes[p2].coeff) * modes[q2].coeff;
                    if (ms && mp && mq) {
                        Complex term = coeff * (*mp) * std::conj(*mq) * std::norm(*ms);
                        acc += term.real();
                    } else if (leak) {
                        *leak += std::abs(coeff);
                    }
                }
        }
    return std::max(acc, 0.0);
}

template <typename System, typename Obs>
SeminormReport fixed_seminorm_impl(const System& sys, const Obs& f, int k,
                                   const GeneratorSequence& gens, const FolnerSchedule& schedule,
                                   std::uint32_t N, bool with_trace) {
    if (k != 1 && k != 2) throw std::invalid_argument("fixed seminorms support k in {1, 2}");
    ModeAlgebra alg;
    auto modes = spectrum_of(sys, f, alg);
    OmegaOracle oracle{&gens, &schedule, gens.is_geometric()};
    if (!alg.modulus && k == 2 && !oracle.rational_spectrum_certified)
        throw SpectrumObstruction(
            "torus U^2 needs geometric generators (rational-spectrum certificate)");

    SeminormReport rep;
    rep.level = k;
    rep.window = N;
    auto omega_mult = [&](const AngleValue& a) { return oracle(a); };

    double leak = 0;
    if (k == 1) {
        rep.value = std::sqrt(u1_squared(modes, alg, omega_mult, &leak));
        for (std::uint32_t n = schedule.start(); with_trace && n <= N; ++n) {
            auto mult = [&](const AngleValue& a) -> std::optional<Complex> {
                return finiteN_multiplier(gens, schedule, n, a);
            };
            rep.trace.emplace_back(n, std::sqrt(u1_squared(modes, alg, mult, nullptr)));
        }
    } else {
        rep.value = std::pow(u2_fourth(modes, alg, omega_mult, &leak), 0.25);
        for (std::uint32_t n = schedule.start(); with_trace && n <= N; ++n) {
            auto mult = [&](const AngleValue& a) -> std::optional<Complex> {
                return finiteN_multiplier(gens, schedule, n, a);
            };
            rep.trace.emplace_back(n, std::pow(u2_fourth(modes, alg, mult, nullptr), 0.25));
        }
    }
    rep.truncation_leak = leak;
    return rep;
}

}  // namespace detail

inline SeminormReport fixed_seminorm(const FiniteRotation& sys, const std::vector<Complex>& f,
                                     int k, const GeneratorSequence& gens,
                                     const FolnerSchedule& schedule, std::uint32_t N,
                                     bool with_trace = true) {
    return detail::fixed_seminorm_impl(sys, f, k, gens, schedule, N, with_trace);
}
inline SeminormReport fixed_seminorm(const TorusRotation& sys, const TrigPolynomial& f, int k,
                                     const GeneratorSequence& gens, const FolnerSchedule& schedule,
                                     std::uint32_t N, bool with_trace = true) {
    return detail::fixed_seminorm_impl(sys, f, k, gens, schedule, N, with_trace);
}

// ---------------------------------------------------------------------------
// Inequality chains.

struct CheckReport {
    double lhs = 0, rhs = 0, tol = 0;
    bool holds = false;
};

// ||f||_{U^k,fixed}^{2^k} <= cubic integral. The left side is a certified
// lower bound of the supremum-form seminorm, so the inequality must survive
// the substitution; a violation is a build-stopping bug.
template <typename System, typename Obs>
CheckReport measurecontrol_check(const System& sys, const Obs& f, int k,
                                 const GeneratorSequence& gens, const FolnerSchedule& schedule,
                                 std::uint32_t N) {
    SeminormReport rep = fixed_seminorm(sys, f, k, gens, schedule, N, /*with_trace=*/false);
    double lhs = std::pow(rep.value, std::pow(2.0, k));
    double rhs = cubic_integral(sys, f, k);
    double tol = 1e-9;
    return {lhs, rhs, tol, lhs <= rhs + tol};
}

// || E_n prod_i T^{l_i n} f_i ||_{L^2} at window N against the cubic bound
// min_i cubic(f_i,k)^{1/2^k}; the tolerance is the computable finite-N leak
// (distance between the finite product multipliers and their limits).
inline CheckReport average_control_check(const TorusRotation& sys,
                                         const std::vector<TrigPolynomial>& fs,
                                         const std::vector<long>& ells,
                                         const GeneratorSequence& gens,
                                         const FolnerSchedule& schedule, std::uint32_t N) {
    if (!gens.is_geometric())
        throw SpectrumObstruction("average control needs the rational-spectrum certificate");
    const int k = static_cast<int>(fs.size());
    IPWindow w = window_clipped(gens, schedule, N);
    TrigPolynomial avg = torus_multiple_average_function(sys, fs, ells, w);
    double avg_norm = std::sqrt(avg.l2_norm_sq());

    double bound = std::numeric_limits<double>::infinity();
    for (const auto& f : fs)
        bound = std::min(bound, std::pow(cubic_integral(sys, f, k), std::pow(2.0, -k)));

    // leak: per-tuple |prod coeffs| * |A_N(angle) - limit(angle)|
    detail::OmegaOracle oracle{&gens, &schedule, true};
    double leak = 0;
    {
        std::vector<std::vector<std::pair<FreqVec, Complex>>> supp;
        for (const auto& f : fs) supp.emplace_back(f.coeffs().begin(), f.coeffs().end());
        bool any_empty = false;
        for (auto& s : supp) any_empty = any_empty || s.empty();
        if (!any_empty) {
            std::vector<std::size_t> pos(fs.size(), 0);
            while (true) {
                FreqVec phase(sys.dim(), 0);
                double mag = 1;
                for (std::size_t i = 0; i < fs.size(); ++i) {
                    const auto& [kk, c] = supp[i][pos[i]];
                    mag *= std::abs(c);
                    for (int t = 0; t < sys.dim(); ++t) phase[t] += ells[i] * kk[t];
                }
                AngleValue lam = sys.eigenvalue_angle(phase);
                Complex aN = character_average(w, lam).value();
                Complex lim = *oracle(lam);
                leak += mag * std::abs(aN - lim);
                std::size_t i = 0;
                while (i < pos.size()) {
                    if (++pos[i] < supp[i].size()) break;
                    pos[i] = 0;
                    ++i;
                }
                if (i == pos.size()) break;
            }
        }
    }
    double tol = leak + 1e-9;
    return {avg_norm, bound, tol, avg_norm <= bound + tol};
}

inline CheckReport average_control_check(const FiniteRotation& sys,
                                         const std::vector<std::vector<Complex>>& fs,
                                         const std::vector<long>& ells,
                                         const GeneratorSequence& gens,
                                         const FolnerSchedule& schedule, std::uint32_t N) {
    const int k = static_cast<int>(fs.size());
    IPWindow w = window_clipped(gens, schedule, N);
    auto avg = finite_multiple_average_function(sys, fs, ells, w);
    double avg_norm_sq = 0;
    for (const auto& v : avg) avg_norm_sq += std::norm(v);
    double avg_norm = std::sqrt(avg_norm_sq / sys.modulus);

    double bound = std::numeric_limits<double>::infinity();
    for (const auto& f : fs)
        bound = std::min(bound, std::pow(cubic_integral(sys, f, k), std::pow(2.0, -k)));

    double leak = 0;
    {
        const int m = sys.modulus;
        std::vector<std::vector<Complex>> hats;
        for (const auto& f : fs) hats.push_back(sys.dft(f));
        std::vector<int> pos(fs.size(), 0);
        while (true) {
            long phase = 0;
            double mag = 1;
            for (std::size_t i = 0; i < fs.size(); ++i) {
                mag *= std::abs(hats[i][pos[i]]);
                phase += ells[i] * pos[i];
            }
            if (mag != 0) {
                AngleValue lam(RationalAngle(BigInt(phase) * sys.step, BigInt(m)));
                Complex aN = character_average(w, lam).value();
                Complex lim = omega(gens, schedule, lam).best_value();
                leak += mag * std::abs(aN - lim);
            }
            std::size_t i = 0;
            while (i < pos.size()) {
                if (++pos[i] < m) break;
                pos[i] = 0;
                ++i;
            }
            if (i == pos.size()) break;
        }
    }
    double tol = leak + 1e-9;
    return {avg_norm, bound, tol, avg_norm <= bound + tol};
}

}  // namespace ipergo
