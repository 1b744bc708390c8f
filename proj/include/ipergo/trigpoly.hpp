#pragma once

// Trigonometric polynomials with finite Fourier support over Z^d:
// f(x) = sum_k coeff(k) e(k . x), frequencies k integer vectors.

#include <map>
#include <vector>

#include "circle.hpp"
#include "common.hpp"

namespace ipergo {

using FreqVec = std::vector<long>;

class TrigPolynomial {
  public:
    explicit TrigPolynomial(int dim = 1) : dim_(dim) {}

    static TrigPolynomial constant(Complex c, int dim = 1) {
        TrigPolynomial p(dim);
        p.set(FreqVec(dim, 0), c);
        return p;
    }
    // the character e_k in one dimension
    static TrigPolynomial character(long k, Complex coeff = {1.0, 0.0}) {
        TrigPolynomial p(1);
        p.set({k}, coeff);
        return p;
    }
    static TrigPolynomial character(FreqVec k, Complex coeff = {1.0, 0.0}) {
        TrigPolynomial p(static_cast<int>(k.size()));
        p.set(std::move(k), coeff);
        return p;
    }

    int dim() const { return dim_; }
    const std::map<FreqVec, Complex>& coeffs() const { return coeffs_; }
    bool empty() const { return coeffs_.empty(); }

    Complex coeff(const FreqVec& k) const {
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? Complex{0, 0} : it->second;
    }

    void set(FreqVec k, Complex c) {
        if (static_cast<int>(k.size()) != dim_)
            throw std::invalid_argument("frequency dimension mismatch");
        if (c == Complex{0, 0})
            coeffs_.erase(k);
        else
            coeffs_[std::move(k)] = c;
    }
    void add(const FreqVec& k, Complex c) { set(k, coeff(k) + c); }

    // point given as angle coordinates (fractions of a turn)
    Complex evaluate(const std::vector<AngleValue>& x) const {
        if (static_cast<int>(x.size()) != dim_)
            throw std::invalid_argument("point dimension mismatch");
        Complex acc{0, 0};
        for (const auto& [k, c] : coeffs_) acc += c * point_at(k, x);
        return acc;
    }

    TrigPolynomial conjugate() const {
        TrigPolynomial out(dim_);
        for (const auto& [k, c] : coeffs_) {
            FreqVec nk(k);
            for (auto& v : nk) v = -v;
            out.set(std::move(nk), std::conj(c));
        }
        return out;
    }

    TrigPolynomial operator*(const TrigPolynomial& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
        TrigPolynomial out(dim_);
        for (const auto& [k1, c1] : coeffs_)
            for (const auto& [k2, c2] : o.coeffs_) {
                FreqVec k(k1);
                for (int i = 0; i < dim_; ++i) k[i] += k2[i];
                out.add(k, c1 * c2);
            }
        return out;
    }
    TrigPolynomial operator+(const TrigPolynomial& o) const {
        if (dim_ != o.dim_) throw std::invalid_argument("dimension mismatch");
        TrigPolynomial out = *this;
        for (const auto& [k, c] : o.coeffs_) out.add(k, c);
        return out;
    }
    TrigPolynomial operator*(Complex s) const {
        TrigPolynomial out(dim_);
        for (const auto& [k, c] : coeffs_) out.set(k, c * s);
        return out;
    }

    double sup_norm_bound() const {  // sum of |coefficients|
        double s = 0;
        for (const auto& [k, c] : coeffs_) s += std::abs(c);
        return s;
    }
    double l2_norm_sq() const {  // Parseval
        double s = 0;
        for (const auto& [k, c] : coeffs_) s += std::norm(c);
        return s;
    }
    Complex mean() const { return coeff(FreqVec(dim_, 0)); }

  private:
    static Complex point_at(const FreqVec& k, const std::vector<AngleValue>& x) {
        // e(k.x): accumulate k_i * x_i mod 1 exactly, then one cis
        BigRat total(0);
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (k[i] == 0) continue;
            AngleValue s = angle_scale(x[i], BigInt(k[i]));
            total += angle_turns_exact(s);
        }
        // reduce mod 1
        BigInt q;
        mpz_fdiv_q(q.get_mpz_t(), total.get_num().get_mpz_t(), total.get_den().get_mpz_t());
        total -= q;
        double t = total.get_d();
        return {std::cos(2 * kPi * t), std::sin(2 * kPi * t)};
    }

    int dim_;
    std::map<FreqVec, Complex> coeffs_;
};

}  // namespace ipergo
