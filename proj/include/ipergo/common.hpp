#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace ipergo {

using BigInt = mpz_class;
using BigRat = mpq_class;
using Complex = std::complex<double>;

inline constexpr unsigned kDefaultPrecisionBits = 1024;
inline constexpr std::uint64_t kDefaultEnumCap = std::uint64_t{1} << 24;
inline constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------------------
// Error conditions named by the operation contracts.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CapExceeded : Error {
    explicit CapExceeded(const std::string& what) : Error(what) {}
};
struct PeriodNotFound : Error {
    explicit PeriodNotFound(const std::string& what) : Error(what) {}
};
struct SearchBoundExceeded : Error {
    explicit SearchBoundExceeded(const std::string& what) : Error(what) {}
};
struct UnsupportedSchedule : Error {
    explicit UnsupportedSchedule(const std::string& what) : Error(what) {}
};
struct DegenerateWeight : Error {
    explicit DegenerateWeight(const std::string& what) : Error(what) {}
};
struct SpectrumObstruction : Error {
    explicit SpectrumObstruction(const std::string& what) : Error(what) {}
};
struct WindowTooSmall : Error {
    explicit WindowTooSmall(const std::string& what) : Error(what) {}
};
struct UnsupportedSystem : Error {
    explicit UnsupportedSystem(const std::string& what) : Error(what) {}
};

// ---------------------------------------------------------------------------
// Deterministic PRNG. splitmix64 is used everywhere so that seeded runs are
// bit-identical across platforms; std::uniform_* distributions are not.

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t below(std::uint64_t bound) { return next() % bound; }

    // uniform in [0,1) with 53 random bits
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // derive an independent stream (for parallel sampling chunks)
    Rng split(std::uint64_t salt) const {
        Rng r(state_ ^ (0x9e3779b97f4a7c15ULL * (salt + 0x632be59bd9b4e019ULL)));
        r.next();
        return r;
    }

  private:
    std::uint64_t state_;
};

// 64-bit mixing digest of a big integer, for seeding per-value random data.
inline std::uint64_t digest(const BigInt& n) {
    // largest 64-bit prime; collision risk is irrelevant for test data
    static const BigInt p("18446744073709551557");
    BigInt r = n % p;
    if (r < 0) r += p;
    std::uint64_t z = mpz_get_ui(r.get_mpz_t());
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------
// Formatting helpers (printf-based; stable across libstdc++ versions).

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_complex(Complex z) {
    return format_double(z.real()) + (z.imag() < 0 ? "" : "+") + format_double(z.imag()) + "i";
}

struct MeanAndError {
    Complex value{0.0, 0.0};
    double stderr_of_mean = 0.0;
};

// Sample mean and standard error of the mean for complex draws.
class StreamingMean {
  public:
    void add(Complex x) {
        ++n_;
        sum_ += x;
        sumsq_ += std::norm(x);
    }
    std::uint64_t count() const { return n_; }
    Complex mean() const { return n_ ? sum_ / static_cast<double>(n_) : Complex{0, 0}; }
    double stderr_of_mean() const {
        if (n_ < 2) return 0.0;
        double m2 = std::norm(mean());
        double var = (sumsq_ - static_cast<double>(n_) * m2) / static_cast<double>(n_ - 1);
        if (var < 0) var = 0;
        return std::sqrt(var / static_cast<double>(n_));
    }
    MeanAndError result() const { return {mean(), stderr_of_mean()}; }

  private:
    std::uint64_t n_ = 0;
    Complex sum_{0, 0};
    double sumsq_ = 0;
};

}  // namespace ipergo
