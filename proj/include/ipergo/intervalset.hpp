#pragma once

// Finite unions of disjoint half-open arcs [lo, hi) on the circle of
// circumference 1, with exact rational endpoint arithmetic. Complement,
// translation, and intersection are closed and keep a canonical sorted,
// disjoint, non-wrapping representation (a wrapping arc is stored split).

#include <algorithm>
#include <vector>

#include "common.hpp"

namespace ipergo {

class IntervalSet {
  public:
    struct Arc {
        BigRat lo, hi;  // 0 <= lo < hi <= 1
    };

    IntervalSet() = default;

    // arcs given mod 1; wrapping arcs (lo > hi) are split, overlaps merged;
    // an arc of length >= 1 covers the circle
    static IntervalSet from_arcs(const std::vector<std::pair<BigRat, BigRat>>& raw) {
        std::vector<Arc> arcs;
        for (auto [lo, hi] : raw) {
            lo.canonicalize();
            hi.canonicalize();
            if (hi - lo >= 1) return full();
            lo = mod1(lo);
            hi = mod1(hi);
            if (lo == hi) continue;  // empty (full circle must be built via full())
            if (lo < hi)
                arcs.push_back({lo, hi});
            else {
                arcs.push_back({lo, BigRat(1)});
                if (hi > 0) arcs.push_back({BigRat(0), hi});
            }
        }
        return normalized(std::move(arcs));
    }

    static IntervalSet full() {
        IntervalSet s;
        s.arcs_.push_back({BigRat(0), BigRat(1)});
        return s;
    }
    static IntervalSet empty_set() { return IntervalSet(); }

    const std::vector<Arc>& arcs() const { return arcs_; }
    bool empty() const { return arcs_.empty(); }

    BigRat measure() const {
        BigRat m(0);
        for (const auto& a : arcs_) m += a.hi - a.lo;
        return m;
    }
    double measure_double() const { return measure().get_d(); }

    bool contains(const BigRat& x0) const {
        BigRat x = mod1(x0);
        for (const auto& a : arcs_) {
            if (a.lo <= x && x < a.hi) return true;
        }
        return false;
    }

    IntervalSet translate(const BigRat& t) const {
        std::vector<std::pair<BigRat, BigRat>> raw;
        raw.reserve(arcs_.size());
        for (const auto& a : arcs_) raw.emplace_back(a.lo + t, a.hi + t);
        // translation may wrap one arc; from_arcs re-normalizes
        return from_arcs(raw);
    }

    IntervalSet complement() const {
        IntervalSet out;
        BigRat cur(0);
        for (const auto& a : arcs_) {
            if (cur < a.lo) out.arcs_.push_back({cur, a.lo});
            cur = a.hi;
        }
        if (cur < 1) out.arcs_.push_back({cur, BigRat(1)});
        return out;
    }

    static IntervalSet intersect(const IntervalSet& x, const IntervalSet& y) {
        IntervalSet out;
        std::size_t i = 0, j = 0;
        while (i < x.arcs_.size() && j < y.arcs_.size()) {
            const Arc& a = x.arcs_[i];
            const Arc& b = y.arcs_[j];
            BigRat lo = std::max(a.lo, b.lo);
            BigRat hi = std::min(a.hi, b.hi);
            if (lo < hi) out.arcs_.push_back({lo, hi});
            if (a.hi < b.hi)
                ++i;
            else
                ++j;
        }
        return out;
    }

    static IntervalSet unite(const IntervalSet& x, const IntervalSet& y) {
        std::vector<Arc> arcs = x.arcs_;
        arcs.insert(arcs.end(), y.arcs_.begin(), y.arcs_.end());
        return normalized(std::move(arcs));
    }

    bool operator==(const IntervalSet& o) const {
        if (arcs_.size() != o.arcs_.size()) return false;
        for (std::size_t i = 0; i < arcs_.size(); ++i)
            if (arcs_[i].lo != o.arcs_[i].lo || arcs_[i].hi != o.arcs_[i].hi) return false;
        return true;
    }

    static BigRat mod1(const BigRat& x) {
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
        return x - q;
    }

  private:
    static IntervalSet normalized(std::vector<Arc> arcs) {
        std::sort(arcs.begin(), arcs.end(),
                  [](const Arc& a, const Arc& b) { return a.lo < b.lo; });
        IntervalSet out;
        for (auto& a : arcs) {
            if (!(a.lo < a.hi)) continue;
            if (!out.arcs_.empty() && a.lo <= out.arcs_.back().hi)
                out.arcs_.back().hi = std::max(out.arcs_.back().hi, a.hi);
            else
                out.arcs_.push_back(std::move(a));
        }
        return out;
    }

    std::vector<Arc> arcs_;
};

// Exact measure of the intersection of translates A - shift for each given
// shift (the integrand of the two-term limit formula at a fixed rotation).
inline BigRat interval_correlation(const IntervalSet& A, const std::vector<BigRat>& shifts) {
    if (shifts.empty()) return A.measure();
    IntervalSet acc = A.translate(-shifts[0]);
    for (std::size_t i = 1; i < shifts.size(); ++i) {
        acc = IntervalSet::intersect(acc, A.translate(-shifts[i]));
        if (acc.empty()) return BigRat(0);
    }
    return acc.measure();
}

}  // namespace ipergo
