#pragma once

// Generator sequences, Folner schedules, and the induced IP multisets of
// finite sums, with exact enumeration (Gray-code order), unbiased sampling,
// averaging, and density estimation.
//
// Multiset semantics throughout: repeated sums are counted with multiplicity
// and the empty sum 0 is always included. The product formula and the van der
// Corput bijection are false under set semantics, so no set mode exists.

#include <algorithm>
#include <atomic>
#include <functional>
#include <optional>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "circle.hpp"
#include "common.hpp"

namespace ipergo {

// ---------------------------------------------------------------------------
// GeneratorSequence: rule producing n_j (1-based), as big integers and
// modulo any q. An optional integer factor scales every term.

class GeneratorSequence {
  public:
    struct Geometric {
        BigInt base;  // n_j = base^(j-1), base >= 2
    };
    struct Explicit {
        std::vector<BigInt> terms;
    };
    // Built by the divergence-witness constructor: a finite list tied to the
    // angle it was built for.
    struct Witness {
        FixedPointAngle alpha;
        std::vector<BigInt> terms;
    };

    static GeneratorSequence geometric(const BigInt& base) {
        if (base < 2) throw std::invalid_argument("geometric base must be >= 2");
        GeneratorSequence g;
        g.rule_ = Geometric{base};
        return g;
    }
    static GeneratorSequence explicit_terms(std::vector<BigInt> terms) {
        for (const auto& t : terms)
            if (t < 1) throw std::invalid_argument("generators must be >= 1");
        GeneratorSequence g;
        g.rule_ = Explicit{std::move(terms)};
        return g;
    }
    static GeneratorSequence witness(FixedPointAngle alpha, std::vector<BigInt> terms) {
        GeneratorSequence g;
        g.rule_ = Witness{std::move(alpha), std::move(terms)};
        return g;
    }

    // the sequence (factor * n_j); used by the power-rationality lemma checks
    GeneratorSequence scaled(const BigInt& a) const {
        GeneratorSequence g = *this;
        g.factor_ *= a;
        return g;
    }

    const BigInt& factor() const { return factor_; }
    bool is_geometric() const { return std::holds_alternative<Geometric>(rule_); }
    bool is_witness() const { return std::holds_alternative<Witness>(rule_); }
    const Geometric* geometric_rule() const { return std::get_if<Geometric>(&rule_); }
    const Witness* witness_rule() const { return std::get_if<Witness>(&rule_); }

    // finite rules expose their length; geometric is unbounded
    std::optional<std::size_t> length() const {
        if (auto* e = std::get_if<Explicit>(&rule_)) return e->terms.size();
        if (auto* w = std::get_if<Witness>(&rule_)) return w->terms.size();
        return std::nullopt;
    }

    BigInt term(std::uint64_t j) const {  // 1-based
        if (j < 1) throw std::invalid_argument("generator index is 1-based");
        if (auto* g = std::get_if<Geometric>(&rule_)) {
            BigInt v;
            mpz_pow_ui(v.get_mpz_t(), g->base.get_mpz_t(), j - 1);
            return factor_ * v;
        }
        const auto& terms = finite_terms();
        if (j > terms.size()) throw std::out_of_range("generator index past end of explicit list");
        return factor_ * terms[j - 1];
    }

    BigInt term_mod(std::uint64_t j, const BigInt& q) const {
        if (q <= 0) throw std::invalid_argument("modulus must be positive");
        if (auto* g = std::get_if<Geometric>(&rule_)) {
            BigInt e(j - 1), r;
            mpz_powm(r.get_mpz_t(), g->base.get_mpz_t(), e.get_mpz_t(), q.get_mpz_t());
            r = (factor_ * r) % q;
            if (r < 0) r += q;
            return r;
        }
        BigInt r = term(j) % q;
        if (r < 0) r += q;
        return r;
    }

  private:
    const std::vector<BigInt>& finite_terms() const {
        if (auto* e = std::get_if<Explicit>(&rule_)) return e->terms;
        return std::get<Witness>(rule_).terms;
    }
    std::variant<Geometric, Explicit, Witness> rule_;
    BigInt factor_ = 1;
};

// ---------------------------------------------------------------------------
// FolnerSchedule. Increasing schedules are nested intervals [start, N]; the
// Folner property of explicit window lists is NOT checked.

class FolnerSchedule {
  public:
    static FolnerSchedule increasing(std::uint32_t start = 1) {
        FolnerSchedule s;
        s.kind_ = Increasing{start};
        return s;
    }
    static FolnerSchedule explicit_windows(std::vector<std::vector<std::uint32_t>> windows) {
        FolnerSchedule s;
        s.kind_ = Explicit{std::move(windows)};
        return s;
    }

    bool is_increasing() const { return std::holds_alternative<Increasing>(kind_); }
    std::uint32_t start() const {
        if (!is_increasing()) throw UnsupportedSchedule("schedule is not increasing");
        return std::get<Increasing>(kind_).start;
    }

    // indices of the N-th window (N is 1-based)
    std::vector<std::uint32_t> window(std::uint32_t N) const {
        if (auto* inc = std::get_if<Increasing>(&kind_)) {
            std::vector<std::uint32_t> idx;
            for (std::uint32_t j = inc->start; j <= N; ++j) idx.push_back(j);
            return idx;
        }
        const auto& ws = std::get<Explicit>(kind_).windows;
        if (N < 1 || N > ws.size()) throw std::out_of_range("window index out of range");
        return ws[N - 1];
    }

  private:
    struct Increasing {
        std::uint32_t start;
    };
    struct Explicit {
        std::vector<std::vector<std::uint32_t>> windows;
    };
    std::variant<Increasing, Explicit> kind_;
};

// ---------------------------------------------------------------------------
// IPWindow: a generator rule together with a finite index set Phi. The
// induced multiset IP_Phi has exactly 2^|Phi| members including the empty
// sum.

struct IPWindow {
    GeneratorSequence gens;
    std::vector<std::uint32_t> indices;

    IPWindow(GeneratorSequence g, std::vector<std::uint32_t> idx)
        : gens(std::move(g)), indices(std::move(idx)) {
        std::sort(indices.begin(), indices.end());
    }
    static IPWindow from_schedule(const GeneratorSequence& g, const FolnerSchedule& s,
                                  std::uint32_t N) {
        return IPWindow(g, s.window(N));
    }

    std::size_t size() const { return indices.size(); }
    std::vector<BigInt> generator_values() const {
        std::vector<BigInt> v;
        v.reserve(indices.size());
        for (auto j : indices) v.push_back(gens.term(j));
        return v;
    }
};

inline BigInt ip_cardinality(const IPWindow& w) {
    BigInt c = 1;
    c <<= w.size();
    return c;
}

// ---------------------------------------------------------------------------
// Exact enumeration in Gray-code order: consecutive subsets differ in one
// index, so each step is a single addition or subtraction of a generator.
// Visits every mask exactly once. Throws CapExceeded when 2^|Phi| > cap.

template <typename F>
void for_each_sum(const IPWindow& w, std::uint64_t cap, F&& visit) {
    const std::size_t k = w.size();
    if (k >= 63 || (std::uint64_t{1} << k) > cap)
        throw CapExceeded("enumeration of 2^" + std::to_string(k) + " sums exceeds cap " +
                          std::to_string(cap));
    const auto gen = w.generator_values();
    const std::uint64_t total = std::uint64_t{1} << k;
    BigInt sum = 0;
    std::uint64_t gray = 0;
    visit(static_cast<const BigInt&>(sum), std::uint64_t{0});
    for (std::uint64_t i = 1; i < total; ++i) {
        std::uint64_t next = i ^ (i >> 1);
        std::uint64_t changed = next ^ gray;
        int bit = __builtin_ctzll(changed);
        if (next & changed)
            sum += gen[bit];
        else
            sum -= gen[bit];
        gray = next;
        visit(static_cast<const BigInt&>(sum), gray);
    }
}

inline std::vector<BigInt> enumerate_sums(const IPWindow& w, std::uint64_t cap = kDefaultEnumCap) {
    std::vector<BigInt> out;
    out.reserve(std::size_t{1} << w.size());
    for_each_sum(w, cap, [&](const BigInt& s, std::uint64_t) { out.push_back(s); });
    return out;
}

// ---------------------------------------------------------------------------
// Unbiased sampling: one fair coin per index, which is exactly uniform over
// the multiset. Deterministic under a fixed seed.

template <typename F>
void for_each_sample(const IPWindow& w, std::uint64_t count, std::uint64_t seed, F&& visit) {
    const std::size_t k = w.size();
    if (k > 64) throw CapExceeded("sampling supports at most 64 indices per window");
    const auto gen = w.generator_values();
    Rng rng(seed);
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t mask = k == 64 ? rng.next() : (rng.next() & ((std::uint64_t{1} << k) - 1));
        BigInt sum = 0;
        for (std::size_t b = 0; b < k; ++b)
            if (mask >> b & 1) sum += gen[b];
        visit(static_cast<const BigInt&>(sum), mask);
    }
}

inline std::vector<BigInt> sample_sums(const IPWindow& w, std::uint64_t count,
                                       std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("sample count must be >= 1");
    std::vector<BigInt> out;
    out.reserve(count);
    for_each_sample(w, count, seed, [&](const BigInt& s, std::uint64_t) { out.push_back(s); });
    return out;
}

// ---------------------------------------------------------------------------
// Averaging modes.

struct Exact {
    std::uint64_t cap = kDefaultEnumCap;
};
struct Sampled {
    std::uint64_t count = 100000;
    std::uint64_t seed = 0;
};
using AverageMode = std::variant<Exact, Sampled>;

// Multiset mean of f over IP_Phi. Exact mode has stderr 0. Sampled draws are
// processed in fixed-size chunks with split seeds; chunk partials are reduced
// in chunk order, so the result is bit-identical for every thread count.
inline MeanAndError ip_average(const IPWindow& w, const std::function<Complex(const BigInt&)>& f,
                               const AverageMode& mode, unsigned threads = 1) {
    if (auto* ex = std::get_if<Exact>(&mode)) {
        Complex acc{0, 0};
        std::uint64_t n = 0;
        for_each_sum(w, ex->cap, [&](const BigInt& s, std::uint64_t) {
            acc += f(s);
            ++n;
        });
        return {acc / static_cast<double>(n), 0.0};
    }
    const auto& sm = std::get<Sampled>(mode);
    constexpr std::uint64_t kChunk = 65536;
    const std::uint64_t nchunks = (sm.count + kChunk - 1) / kChunk;
    struct Partial {
        Complex sum{0, 0};
        double sumsq = 0;
        std::uint64_t n = 0;
    };
    std::vector<Partial> parts(nchunks);
    Rng base(sm.seed);
    auto run_chunk = [&](std::uint64_t c) {
        std::uint64_t cnt = std::min(kChunk, sm.count - c * kChunk);
        Rng r = base.split(c);
        Partial p;
        for_each_sample(w, cnt, r.next(), [&](const BigInt& s, std::uint64_t) {
            Complex v = f(s);
            p.sum += v;
            p.sumsq += std::norm(v);
            ++p.n;
        });
        parts[c] = p;
    };
    if (threads <= 1 || nchunks == 1) {
        for (std::uint64_t c = 0; c < nchunks; ++c) run_chunk(c);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::thread> pool;
        unsigned nt = std::min<std::uint64_t>(threads, nchunks);
        for (unsigned t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (std::uint64_t c; (c = next.fetch_add(1)) < nchunks;) run_chunk(c);
            });
        for (auto& th : pool) th.join();
    }
    Complex sum{0, 0};
    double sumsq = 0;
    std::uint64_t n = 0;
    for (const auto& p : parts) {
        sum += p.sum;
        sumsq += p.sumsq;
        n += p.n;
    }
    Complex mean = sum / static_cast<double>(n);
    double var = n > 1 ? (sumsq - n * std::norm(mean)) / static_cast<double>(n - 1) : 0.0;
    if (var < 0) var = 0;
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

// ---------------------------------------------------------------------------
// Density of a predicate along the IP-Folner sequence. Reports per-N values
// and min/max over the tail half of the range as liminf/limsup proxies; the
// limits themselves are not finitely observable.

struct DensityPoint {
    std::uint32_t N = 0;
    BigInt window_cardinality;  // 2^|Phi_N|
    double density = 0.0;
    double stderr_of_mean = 0.0;
};

struct DensityReport {
    std::vector<DensityPoint> points;
    double tail_min = 0.0;  // liminf proxy over the tail half
    double tail_max = 0.0;  // limsup proxy over the tail half
    bool sampled = false;
};

inline void finish_density_report(DensityReport& r) {
    if (r.points.empty()) return;
    std::size_t from = r.points.size() / 2;
    double mn = r.points[from].density, mx = mn;
    for (std::size_t i = from; i < r.points.size(); ++i) {
        mn = std::min(mn, r.points[i].density);
        mx = std::max(mx, r.points[i].density);
    }
    r.tail_min = mn;
    r.tail_max = mx;
}

inline DensityReport ip_density(const GeneratorSequence& gens, const FolnerSchedule& schedule,
                                const std::function<bool(const BigInt&)>& predicate,
                                std::uint32_t N_from, std::uint32_t N_to,
                                const AverageMode& mode, unsigned threads = 1) {
    DensityReport rep;
    rep.sampled = std::holds_alternative<Sampled>(mode);
    for (std::uint32_t N = N_from; N <= N_to; ++N) {
        IPWindow w = IPWindow::from_schedule(gens, schedule, N);
        auto me = ip_average(
            w, [&](const BigInt& s) { return Complex(predicate(s) ? 1.0 : 0.0, 0.0); }, mode,
            threads);
        rep.points.push_back({N, ip_cardinality(w), me.value.real(), me.stderr_of_mean});
    }
    finish_density_report(rep);
    return rep;
}

}  // namespace ipergo
