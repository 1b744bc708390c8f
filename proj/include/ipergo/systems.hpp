#pragma once

// Concrete measure-preserving systems: finite rotations, torus rotations and
// the 2-step skew product (x,y) -> (x+alpha, y+x), together with single,
// multiple, weighted and pointwise IP averages and their closed-form limits.
//
// Observables are restricted to exact-Fourier data: complex vectors on finite
// rotations, trigonometric polynomials on tori, and interval indicators on
// the 1-dimensional torus. Everything else adds nothing testable.

#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include "circle.hpp"
#include "intervalset.hpp"
#include "ipset.hpp"
#include "spectral.hpp"
#include "trigpoly.hpp"

namespace ipergo {

// ---------------------------------------------------------------------------
// FiniteRotation on Z/m by a fixed step. Functions are complex vectors of
// length m; the character chi_k(x) = e(kx/m) has eigenvalue angle
// (k*step mod m)/m, always a root of unity: the system is rational.

struct FiniteRotation {
    int modulus;
    int step;

    FiniteRotation(int m, int s) : modulus(m), step(((s % m) + m) % m) {
        if (m < 1) throw std::invalid_argument("modulus must be positive");
    }

    RationalAngle eigenvalue_angle(int k) const {
        return RationalAngle(BigInt(k) * step, BigInt(modulus));
    }

    // hat f(k) = (1/m) sum_x f(x) e(-kx/m)
    std::vector<Complex> dft(const std::vector<Complex>& f) const {
        const int m = modulus;
        std::vector<Complex> out(m);
        for (int k = 0; k < m; ++k) {
            Complex acc{0, 0};
            for (int x = 0; x < m; ++x) {
                double ph = -2 * kPi * k * x / m;
                acc += f[x] * Complex{std::cos(ph), std::sin(ph)};
            }
            out[k] = acc / static_cast<double>(m);
        }
        return out;
    }
    std::vector<Complex> idft(const std::vector<Complex>& hat) const {
        const int m = modulus;
        std::vector<Complex> out(m, Complex{0, 0});
        for (int x = 0; x < m; ++x)
            for (int k = 0; k < m; ++k) {
                double ph = 2 * kPi * k * x / m;
                out[x] += hat[k] * Complex{std::cos(ph), std::sin(ph)};
            }
        return out;
    }
};

// ---------------------------------------------------------------------------
// TorusRotation on T^d by a vector of angles. A RationalAngle coordinate is
// exactly rational; a FixedPointAngle coordinate is declared irrational (the
// P-bit value stands for an irrational target), so a mode's eigenvalue angle
// k.alpha is rational exactly when every fixed-point coordinate carries
// frequency 0.

struct TorusRotation {
    std::vector<AngleValue> alpha;

    int dim() const { return static_cast<int>(alpha.size()); }

    bool mode_angle_is_rational(const FreqVec& k) const {
        for (std::size_t i = 0; i < alpha.size(); ++i)
            if (k[i] != 0 && std::holds_alternative<FixedPointAngle>(alpha[i])) return false;
        return true;
    }

    // eigenvalue angle of mode k, exact; meaningful as a RationalAngle only
    // when mode_angle_is_rational(k)
    AngleValue eigenvalue_angle(const FreqVec& k) const {
        bool rational = mode_angle_is_rational(k);
        if (rational) {
            BigRat total(0);
            for (std::size_t i = 0; i < alpha.size(); ++i) {
                if (k[i] == 0) continue;
                total += BigRat(BigInt(k[i])) * std::get<RationalAngle>(alpha[i]).turns();
            }
            return RationalAngle(total);
        }
        // combine exactly at the largest precision present
        unsigned bits = 0;
        for (const auto& a : alpha)
            if (auto* f = std::get_if<FixedPointAngle>(&a)) bits = std::max(bits, f->bits());
        BigInt mod = BigInt(1) << bits;
        BigInt acc = 0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            if (k[i] == 0) continue;
            if (auto* f = std::get_if<FixedPointAngle>(&alpha[i])) {
                BigInt fr = f->frac() << (bits - f->bits());
                acc += BigInt(k[i]) * fr;
            } else {
                const auto& r = std::get<RationalAngle>(alpha[i]);
                acc += BigInt(k[i]) * (r.num() * mod) / r.den();  // floor; 2^-bits error
            }
        }
        return FixedPointAngle(acc, bits);
    }
};

// ---------------------------------------------------------------------------
// SkewProduct T(x,y) = (x+alpha, y+x) on T^2 with the exact iterate law
// T^n(x,y) = (x+n alpha, y+nx+C(n,2) alpha); C(n,2) is computed in exact
// big-integer arithmetic before reduction against the fixed-point angle.

struct SkewProduct {
    FixedPointAngle alpha;

    static BigInt binom2(const BigInt& n) { return n * (n - 1) / 2; }

    // T^n (x, y), exact at the angle precision
    std::pair<AngleValue, AngleValue> iterate(const AngleValue& x, const AngleValue& y,
                                              const BigInt& n) const {
        AngleValue xn = angle_add(x, angle_scale(AngleValue(alpha), n));
        AngleValue yn = angle_add(angle_add(y, angle_scale(x, n)),
                                  angle_scale(AngleValue(alpha), binom2(n)));
        return {xn, yn};
    }
};

using SystemModel = std::variant<FiniteRotation, TorusRotation, SkewProduct>;

// ---------------------------------------------------------------------------
// Window helper that clips increasing windows to the available generator
// terms for finite rules.

inline IPWindow window_clipped(const GeneratorSequence& gens, const FolnerSchedule& schedule,
                               std::uint32_t N) {
    auto idx = schedule.window(N);
    if (auto len = gens.length()) {
        idx.erase(std::remove_if(idx.begin(), idx.end(),
                                 [&](std::uint32_t j) { return j > *len; }),
                  idx.end());
    }
    return IPWindow(gens, std::move(idx));
}

// ---------------------------------------------------------------------------
// Mean ergodic limit on a finite rotation: sum_t omega(t) P_t f, with the
// omega values decided exactly. Pairs with finite-N empirical averages whose
// distance to the limit must decay.

inline std::vector<Complex> met_rational_limit(const FiniteRotation& sys,
                                               const std::vector<Complex>& f,
                                               const GeneratorSequence& gens,
                                               const FolnerSchedule& schedule) {
    auto hat = sys.dft(f);
    const int m = sys.modulus;
    std::vector<Complex> hat_out(m);
    for (int k = 0; k < m; ++k) {
        OmegaValue om = omega(gens, schedule, AngleValue(sys.eigenvalue_angle(k)));
        hat_out[k] = hat[k] * om.best_value();
    }
    return sys.idft(hat_out);
}

// Finite-N function-valued average E_{n in IP_N} T^n f on a finite rotation,
// computed exactly through characters (cost m^2 + m|Phi|).
inline std::vector<Complex> finite_rotation_average(const FiniteRotation& sys,
                                                    const std::vector<Complex>& f,
                                                    const IPWindow& w) {
    auto hat = sys.dft(f);
    const int m = sys.modulus;
    std::vector<Complex> hat_out(m);
    for (int k = 0; k < m; ++k)
        hat_out[k] = hat[k] * character_average(w, AngleValue(sys.eigenvalue_angle(k))).value();
    return sys.idft(hat_out);
}

// ---------------------------------------------------------------------------
// Pointwise / mean single averages.

struct PointwiseAt {
    std::vector<AngleValue> x;  // orbit start (finite rotation: single integer coordinate)
    long x_int = 0;             // used by FiniteRotation
};
struct MeanMode {};
using EvaluationMode = std::variant<PointwiseAt, MeanMode>;

// E_{n in IP_Phi} f(T^n x) for a trig polynomial on a torus rotation:
// exact per mode via the product formula (cost support x |Phi|).
inline MeanAndError torus_pointwise_average(const TorusRotation& sys, const TrigPolynomial& f,
                                            const std::vector<AngleValue>& x, const IPWindow& w) {
    Complex acc{0, 0};
    for (const auto& [k, c] : f.coeffs()) {
        AngleValue lam = sys.eigenvalue_angle(k);
        Complex avg = character_average(w, lam).value();
        // e(k.x) via the polynomial with a single mode
        TrigPolynomial mode = TrigPolynomial::character(k, Complex{1, 0});
        acc += c * mode.evaluate(x) * avg;
    }
    return {acc, 0.0};
}

// sampled pointwise average of an indicator observable on the 1-torus
inline MeanAndError torus_indicator_average(const TorusRotation& sys, const IntervalSet& A,
                                            const AngleValue& x, const IPWindow& w,
                                            const AverageMode& mode) {
    if (sys.dim() != 1) throw UnsupportedSystem("interval observables need d = 1");
    const AngleValue& a = sys.alpha[0];
    auto f = [&](const BigInt& n) {
        BigRat pos = angle_turns_exact(x) + angle_turns_exact(angle_scale(a, n));
        return Complex(A.contains(pos) ? 1.0 : 0.0, 0.0);
    };
    return ip_average(w, f, mode);
}

// sampled pointwise average on the skew product (no product formula: the
// binomial term is quadratic in n)
inline MeanAndError skew_pointwise_average(const SkewProduct& sys, const TrigPolynomial& f,
                                           const AngleValue& x, const AngleValue& y,
                                           const IPWindow& w, const AverageMode& mode) {
    if (f.dim() != 2) throw UnsupportedSystem("skew-product observables live on T^2");
    auto eval = [&](const BigInt& n) {
        auto [xn, yn] = sys.iterate(x, y, n);
        return f.evaluate({xn, yn});
    };
    return ip_average(w, eval, mode);
}

// ---------------------------------------------------------------------------
// Weyl-type equidistribution defect: |E_{n in IP_N} e(m alpha n)| for the
// mode-m character along geometric generators.

inline double equidistribution_defect(const TorusRotation& sys, long m_mode,
                                      const GeneratorSequence& gens,
                                      const FolnerSchedule& schedule, std::uint32_t N) {
    if (sys.dim() != 1) throw UnsupportedSystem("defect is defined on the 1-torus");
    IPWindow w = window_clipped(gens, schedule, N);
    AngleValue lam = angle_scale(sys.alpha[0], BigInt(m_mode));
    return character_average(w, lam).abs();
}

// ---------------------------------------------------------------------------
// Multiple averages E_{n} prod_i f_i(T^{l_i n} x) on rotations.
//
// The exact function-valued finite-N average on a torus rotation:
//   sum over tuples (m_1..m_k) of prod hat f_i(m_i) * A_N((sum l_i m_i).alpha)
// placed at output frequency sum m_i.

inline TrigPolynomial torus_multiple_average_function(const TorusRotation& sys,
                                                      const std::vector<TrigPolynomial>& fs,
                                                      const std::vector<long>& ells,
                                                      const IPWindow& w) {
    if (fs.size() != ells.size() || fs.empty())
        throw std::invalid_argument("need one shift per function");
    const int d = sys.dim();
    TrigPolynomial out(d);
    // iterate over the product of supports
    std::vector<std::vector<std::pair<FreqVec, Complex>>> supp;
    for (const auto& f : fs) {
        supp.emplace_back(f.coeffs().begin(), f.coeffs().end());
        if (supp.back().empty()) return out;  // zero function
    }
    std::vector<std::size_t> pos(fs.size(), 0);
    while (true) {
        FreqVec total(d, 0);
        FreqVec phase(d, 0);
        Complex coeff{1, 0};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const auto& [k, c] = supp[i][pos[i]];
            coeff *= c;
            for (int t = 0; t < d; ++t) {
                total[t] += k[t];
                phase[t] += ells[i] * k[t];
            }
        }
        AngleValue lam = sys.eigenvalue_angle(phase);
        out.add(total, coeff * character_average(w, lam).value());
        // advance the odometer
        std::size_t i = 0;
        while (i < pos.size()) {
            if (++pos[i] < supp[i].size()) break;
            pos[i] = 0;
            ++i;
        }
        if (i == pos.size()) break;
    }
    return out;
}

inline std::vector<Complex> finite_multiple_average_function(
    const FiniteRotation& sys, const std::vector<std::vector<Complex>>& fs,
    const std::vector<long>& ells, const IPWindow& w) {
    if (fs.size() != ells.size() || fs.empty())
        throw std::invalid_argument("need one shift per function");
    for (std::size_t i = 0; i < ells.size(); ++i)
        for (std::size_t j = i + 1; j < ells.size(); ++j)
            if (ells[i] == ells[j]) throw std::invalid_argument("shifts must be distinct");
    const int m = sys.modulus;
    std::vector<std::vector<Complex>> hats;
    for (const auto& f : fs) hats.push_back(sys.dft(f));
    std::vector<Complex> hat_out(m, Complex{0, 0});
    std::vector<int> pos(fs.size(), 0);
    while (true) {
        long total = 0, phase = 0;
        Complex coeff{1, 0};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            coeff *= hats[i][pos[i]];
            total += pos[i];
            phase += ells[i] * pos[i];
        }
        if (coeff != Complex{0, 0}) {
            RationalAngle lam(BigInt(phase) * sys.step, BigInt(m));
            hat_out[((total % m) + m) % m] += coeff * character_average(w, AngleValue(lam)).value();
        }
        std::size_t i = 0;
        while (i < pos.size()) {
            if (++pos[i] < m) break;
            pos[i] = 0;
            ++i;
        }
        if (i == pos.size()) break;
    }
    return sys.idft(hat_out);
}

// Pointwise or mean-mode multiple average; mean mode integrates the exact
// function-valued average (its mean Fourier coefficient), pointwise mode
// samples or enumerates the orbit.
inline MeanAndError torus_multiple_average(const TorusRotation& sys,
                                           const std::vector<TrigPolynomial>& fs,
                                           const std::vector<long>& ells,
                                           const EvaluationMode& eval, const IPWindow& w,
                                           const AverageMode& mode) {
    for (std::size_t i = 0; i < ells.size(); ++i)
        for (std::size_t j = i + 1; j < ells.size(); ++j)
            if (ells[i] == ells[j]) throw std::invalid_argument("shifts must be distinct");
    if (std::holds_alternative<MeanMode>(eval)) {
        TrigPolynomial avg = torus_multiple_average_function(sys, fs, ells, w);
        return {avg.mean(), 0.0};
    }
    const auto& pt = std::get<PointwiseAt>(eval);
    auto f = [&](const BigInt& n) {
        Complex prod{1, 0};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            std::vector<AngleValue> xi;
            for (int t = 0; t < sys.dim(); ++t)
                xi.push_back(angle_add(
                    pt.x[t], angle_scale(sys.alpha[t], BigInt(ells[i]) * n)));
            prod *= fs[i].evaluate(xi);
        }
        return prod;
    };
    return ip_average(w, f, mode);
}

// ---------------------------------------------------------------------------
// Kronecker limit formula on rotations whose eigenvalues avoid the sequence
// spectrum: the caller must pass the certificate explicitly; active modes are
// re-checked and any obstruction aborts.

struct SpectrumDisjointCertificate {
    GeneratorSequence gens;
    bool geometric_rational_spectrum = false;  // irrational modes die by the theorem
};

inline SpectrumDisjointCertificate certify_spectrum_disjoint(const GeneratorSequence& gens) {
    SpectrumDisjointCertificate c{gens, gens.is_geometric()};
    return c;
}

inline TrigPolynomial kronecker_limit_formula(const TorusRotation& sys,
                                              const std::vector<TrigPolynomial>& fs,
                                              const std::vector<long>& ells,
                                              const SpectrumDisjointCertificate& cert) {
    if (fs.size() != ells.size() || fs.empty())
        throw std::invalid_argument("need one shift per function");
    const int d = sys.dim();
    // verify the hypothesis on every active mode of the joint support
    for (const auto& f : fs) {
        for (const auto& [k, c] : f.coeffs()) {
            bool zero = true;
            for (auto v : k) zero = zero && v == 0;
            if (zero) continue;
            if (sys.mode_angle_is_rational(k)) {
                RationalAngle lam = std::get<RationalAngle>(sys.eigenvalue_angle(k));
                if (lam.is_one()) continue;
                auto dec = spectrum_contains(cert.gens, lam);
                if (dec.contains)
                    throw SpectrumObstruction("eigenvalue at a rational mode lies in the spectrum");
            } else if (!cert.geometric_rational_spectrum) {
                throw SpectrumObstruction(
                    "irrational modes need a rational-spectrum certificate (geometric rule)");
            }
        }
    }
    // limit = sum over tuples with sum l_i m_i = 0 of prod hat f_i(m_i) at
    // output frequency sum m_i
    TrigPolynomial out(d);
    std::vector<std::vector<std::pair<FreqVec, Complex>>> supp;
    for (const auto& f : fs) {
        supp.emplace_back(f.coeffs().begin(), f.coeffs().end());
        if (supp.back().empty()) return out;
    }
    std::vector<std::size_t> pos(fs.size(), 0);
    while (true) {
        FreqVec total(d, 0), phase(d, 0);
        Complex coeff{1, 0};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const auto& [k, c] = supp[i][pos[i]];
            coeff *= c;
            for (int t = 0; t < d; ++t) {
                total[t] += k[t];
                phase[t] += ells[i] * k[t];
            }
        }
        bool constraint = true;
        for (int t = 0; t < d; ++t) constraint = constraint && phase[t] == 0;
        if (constraint) out.add(total, coeff);
        std::size_t i = 0;
        while (i < pos.size()) {
            if (++pos[i] < supp[i].size()) break;
            pos[i] = 0;
            ++i;
        }
        if (i == pos.size()) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normalized divisibility weight 1_{r,Phi}: the indicator of r | n divided by
// its limiting IP mean (1/r) sum_i omega(xi_r^i).

struct IpWeight {
    BigInt r;
    double denominator = 1.0;

    double operator()(const BigInt& n) const {
        return (n % r == 0) ? 1.0 / denominator : 0.0;
    }
};

inline IpWeight weight_1rPhi(const GeneratorSequence& gens, const FolnerSchedule& schedule,
                             const BigInt& r, std::uint32_t horizon = 64) {
    if (r < 1) throw std::invalid_argument("r must be >= 1");
    Complex den{0, 0};
    for (BigInt i = 0; i < r; ++i) {
        OmegaValue om = omega(gens, schedule, AngleValue(RationalAngle(i, r)), horizon);
        den += om.best_value();
    }
    den /= r.get_d();
    double d = den.real();
    if (std::abs(den.imag()) > 1e-12)
        throw DegenerateWeight("weight denominator is not real: " + format_complex(den));
    if (std::abs(d) < 1e-12) throw DegenerateWeight("weight denominator vanishes");
    IpWeight w;
    w.r = r;
    w.denominator = d;
    return w;
}

// Weighted multiple average: empirical average of weight(n) * prod f_i(T^{l_i n} x).
inline MeanAndError torus_weighted_multiple_average(const TorusRotation& sys,
                                                    const std::vector<TrigPolynomial>& fs,
                                                    const std::vector<long>& ells,
                                                    const IpWeight& weight,
                                                    const EvaluationMode& eval, const IPWindow& w,
                                                    const AverageMode& mode) {
    if (std::holds_alternative<MeanMode>(eval)) {
        // E_n weight(n) * integral of the product along the orbit: integrate
        // the per-n exact product, weighted
        auto f = [&](const BigInt& n) {
            // integral over x of prod f_i(x + l_i n alpha): tuple constraint sum m_i = 0
            Complex acc{0, 0};
            std::vector<std::vector<std::pair<FreqVec, Complex>>> supp;
            for (const auto& fi : fs) supp.emplace_back(fi.coeffs().begin(), fi.coeffs().end());
            std::vector<std::size_t> pos(fs.size(), 0);
            bool any_empty = false;
            for (auto& s : supp) any_empty = any_empty || s.empty();
            if (any_empty) return Complex{0, 0};
            while (true) {
                FreqVec total(sys.dim(), 0);
                Complex coeff{1, 0};
                BigRat phase_turns(0);
                for (std::size_t i = 0; i < fs.size(); ++i) {
                    const auto& [k, c] = supp[i][pos[i]];
                    coeff *= c;
                    for (int t = 0; t < sys.dim(); ++t) {
                        total[t] += k[t];
                        if (k[t] != 0)
                            phase_turns += angle_turns_exact(
                                angle_scale(sys.alpha[t], BigInt(ells[i]) * k[t] * n));
                    }
                }
                bool zero_total = true;
                for (auto v : total) zero_total = zero_total && v == 0;
                if (zero_total) {
                    phase_turns = IntervalSet::mod1(phase_turns);
                    double t = phase_turns.get_d();
                    acc += coeff * Complex{std::cos(2 * kPi * t), std::sin(2 * kPi * t)};
                }
                std::size_t i = 0;
                while (i < pos.size()) {
                    if (++pos[i] < supp[i].size()) break;
                    pos[i] = 0;
                    ++i;
                }
                if (i == pos.size()) break;
            }
            return Complex(weight(n)) * acc;
        };
        return ip_average(w, f, mode);
    }
    const auto& pt = std::get<PointwiseAt>(eval);
    auto f = [&](const BigInt& n) {
        Complex prod{1, 0};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            std::vector<AngleValue> xi;
            for (int t = 0; t < sys.dim(); ++t)
                xi.push_back(angle_add(pt.x[t],
                                                     angle_scale(sys.alpha[t], BigInt(ells[i]) * n)));
            prod *= fs[i].evaluate(xi);
        }
        return Complex(weight(n)) * prod;
    };
    return ip_average(w, f, mode);
}

// finite-rotation weighted pointwise average (exact enumeration or sampled)
inline MeanAndError finite_weighted_multiple_average(const FiniteRotation& sys,
                                                     const std::vector<std::vector<Complex>>& fs,
                                                     const std::vector<long>& ells,
                                                     const IpWeight& weight, long x0,
                                                     const IPWindow& w, const AverageMode& mode) {
    const int m = sys.modulus;
    auto f = [&](const BigInt& n) {
        Complex prod{1, 0};
        for (std::size_t i = 0; i < fs.size(); ++i) {
            BigInt p = (BigInt(x0) + BigInt(ells[i]) * n * sys.step) % m;
            if (p < 0) p += m;
            prod *= fs[i][mpz_get_ui(p.get_mpz_t())];
        }
        return Complex(weight(n)) * prod;
    };
    return ip_average(w, f, mode);
}

}  // namespace ipergo
