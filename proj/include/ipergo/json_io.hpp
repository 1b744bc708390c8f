#pragma once

// JSON (de)serialization for angles, generator rules, schedules, systems and
// observables, plus experiment-spec parsing for the CLI. Validation failures
// throw SpecError carrying the JSON path of the offending field.
//
// Angle wire forms:
//   {"rational": [num, den]}             numbers or decimal strings
//   {"fixed": "<hex>", "bits": P}        P-bit fraction of a turn
// plus constructor forms accepted on input:
//   {"sqrt": k, "bits": P}               angle sqrt(k) mod 1
//   {"golden": true, "bits": P}          (sqrt(5)-1)/2
//   {"radians": "p/q", "bits": P}        exact rational radian argument
//   {"turns": 0.25}                      double, low-precision convenience

#include <string>

#include <json.hpp>

#include "correlation.hpp"
#include "systems.hpp"

namespace ipergo {

using Json = nlohmann::ordered_json;

struct SpecError : Error {
    std::string path;
    SpecError(std::string p, const std::string& what) : Error(what + " at " + p), path(std::move(p)) {}
};

namespace jsonio {

// default precision for angles parsed without an explicit "bits" field;
// the CLI sets it from the spec-level "precision" entry
inline unsigned g_default_bits = kDefaultPrecisionBits;

inline BigInt parse_bigint(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return BigInt(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) return BigInt(j.get<std::string>());
    throw SpecError(path, "expected integer or decimal string");
}

inline Json bigint_to_json(const BigInt& v) {
    if (v.fits_slong_p()) return Json(v.get_si());
    return Json(v.get_str());
}

// ---- angles ---------------------------------------------------------------

inline AngleValue parse_angle(const Json& j, const std::string& path) {
    if (!j.is_object()) throw SpecError(path, "expected an angle object");
    unsigned bits = j.value("bits", g_default_bits);
    if (j.contains("rational")) {
        const Json& r = j["rational"];
        if (!r.is_array() || r.size() != 2) throw SpecError(path + ".rational", "expected [num, den]");
        return RationalAngle(parse_bigint(r[0], path + ".rational[0]"),
                             parse_bigint(r[1], path + ".rational[1]"));
    }
    if (j.contains("fixed")) {
        std::string hex = j["fixed"].get<std::string>();
        BigInt frac;
        if (mpz_set_str(frac.get_mpz_t(), hex.c_str(), 16) != 0)
            throw SpecError(path + ".fixed", "invalid hex string");
        return FixedPointAngle(frac, bits);
    }
    if (j.contains("sqrt")) return FixedPointAngle::from_sqrt(j["sqrt"].get<unsigned long>(), bits);
    if (j.contains("golden")) return FixedPointAngle::golden(bits);
    if (j.contains("radians")) {
        BigRat q(j["radians"].get<std::string>());
        q.canonicalize();
        return FixedPointAngle::from_radians(q, bits);
    }
    if (j.contains("turns"))
        return FixedPointAngle::from_turns_double(j["turns"].get<double>(), bits);
    throw SpecError(path, "unrecognized angle form");
}

inline Json angle_to_json(const AngleValue& a) {
    Json j;
    if (const auto* r = std::get_if<RationalAngle>(&a)) {
        j["rational"] = Json::array({bigint_to_json(r->num()), bigint_to_json(r->den())});
    } else {
        const auto& f = std::get<FixedPointAngle>(a);
        j["fixed"] = f.frac().get_str(16);
        j["bits"] = f.bits();
    }
    return j;
}

// ---- generators and schedules ----------------------------------------------

inline GeneratorSequence parse_gens(const Json& j, const std::string& path) {
    if (!j.is_object()) throw SpecError(path, "expected a generator object");
    GeneratorSequence out = [&] {
        if (j.contains("geometric"))
            return GeneratorSequence::geometric(parse_bigint(j["geometric"], path + ".geometric"));
        if (j.contains("explicit")) {
            const Json& t = j["explicit"];
            if (!t.is_array()) throw SpecError(path + ".explicit", "expected an array");
            std::vector<BigInt> terms;
            for (std::size_t i = 0; i < t.size(); ++i)
                terms.push_back(parse_bigint(t[i], path + ".explicit[" + std::to_string(i) + "]"));
            return GeneratorSequence::explicit_terms(std::move(terms));
        }
        if (j.contains("witness")) {
            const Json& w = j["witness"];
            AngleValue a = parse_angle(w.at("angle"), path + ".witness.angle");
            if (!std::holds_alternative<FixedPointAngle>(a))
                throw SpecError(path + ".witness.angle", "witness angles are fixed-point");
            std::uint32_t J = w.value("count", 50u);
            std::uint64_t bound = w.value("search_bound", std::uint64_t{10000000});
            return construct_divergence_witness(std::get<FixedPointAngle>(a), J, bound);
        }
        throw SpecError(path, "unrecognized generator rule");
    }();
    if (j.contains("scale")) out = out.scaled(parse_bigint(j["scale"], path + ".scale"));
    return out;
}

inline Json gens_to_json(const GeneratorSequence& g) {
    Json j;
    if (const auto* geo = g.geometric_rule()) {
        j["geometric"] = bigint_to_json(geo->base);
    } else if (const auto* w = g.witness_rule()) {
        Json terms = Json::array();
        for (const auto& t : w->terms) terms.push_back(bigint_to_json(t));
        j["witness_terms"] = terms;
        j["witness_angle"] = angle_to_json(AngleValue(w->alpha));
    } else {
        Json terms = Json::array();
        for (std::uint64_t i = 1; i <= *g.length(); ++i) terms.push_back(bigint_to_json(g.term(i)));
        j["explicit"] = terms;
    }
    if (g.factor() != 1) j["scale"] = bigint_to_json(g.factor());
    return j;
}

inline FolnerSchedule parse_schedule(const Json& j, const std::string& path) {
    if (j.is_null()) return FolnerSchedule::increasing(1);
    if (!j.is_object()) throw SpecError(path, "expected a schedule object");
    if (j.contains("increasing")) {
        const Json& inc = j["increasing"];
        return FolnerSchedule::increasing(inc.value("start", 1u));
    }
    if (j.contains("windows")) {
        std::vector<std::vector<std::uint32_t>> ws;
        for (const auto& w : j["windows"]) ws.push_back(w.get<std::vector<std::uint32_t>>());
        return FolnerSchedule::explicit_windows(std::move(ws));
    }
    throw SpecError(path, "unrecognized schedule");
}

// ---- interval sets ----------------------------------------------------------

inline BigRat parse_rat(const Json& j, const std::string& path) {
    if (j.is_number_integer()) return BigRat(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_string()) {
        BigRat q(j.get<std::string>());
        q.canonicalize();
        return q;
    }
    if (j.is_number_float()) {
        // exact dyadic from the double
        double v = j.get<double>();
        BigRat q;
        mpq_set_d(q.get_mpq_t(), v);
        return q;
    }
    throw SpecError(path, "expected rational (int, \"p/q\" string, or float)");
}

inline IntervalSet parse_interval_set(const Json& j, const std::string& path) {
    if (!j.is_array()) throw SpecError(path, "expected an array of [lo, hi) arcs");
    std::vector<std::pair<BigRat, BigRat>> arcs;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Json& a = j[i];
        if (!a.is_array() || a.size() != 2)
            throw SpecError(path + "[" + std::to_string(i) + "]", "expected [lo, hi]");
        arcs.emplace_back(parse_rat(a[0], path), parse_rat(a[1], path));
    }
    return IntervalSet::from_arcs(arcs);
}

inline Json interval_set_to_json(const IntervalSet& s) {
    Json out = Json::array();
    for (const auto& a : s.arcs())
        out.push_back(Json::array({a.lo.get_str(), a.hi.get_str()}));
    return out;
}

// ---- observables -------------------------------------------------------------

inline TrigPolynomial parse_trigpoly(const Json& j, int dim, const std::string& path) {
    // {"modes": [{"freq": [..], "re": x, "im": y}, ...]} or {"character": k}
    if (j.contains("character")) {
        if (dim == 1) return TrigPolynomial::character(j["character"].get<long>());
        return TrigPolynomial::character(j["character"].get<FreqVec>());
    }
    if (!j.contains("modes")) throw SpecError(path, "expected modes or character");
    TrigPolynomial p(dim);
    for (const auto& m : j["modes"]) {
        FreqVec k = m.at("freq").get<FreqVec>();
        p.add(k, Complex(m.value("re", 0.0), m.value("im", 0.0)));
    }
    return p;
}

inline std::vector<Complex> parse_finite_observable(const Json& j, int modulus,
                                                    const std::string& path) {
    // {"indicator": [residues]} or {"values": [[re,im],...]} or {"character": k}
    if (j.contains("indicator")) {
        std::vector<Complex> f(modulus, Complex{0, 0});
        for (auto r : j["indicator"]) f[((r.get<long>() % modulus) + modulus) % modulus] = 1.0;
        return f;
    }
    if (j.contains("character")) {
        long k = j["character"].get<long>();
        std::vector<Complex> f(modulus);
        for (int x = 0; x < modulus; ++x) {
            double ph = 2 * kPi * k * x / modulus;
            f[x] = {std::cos(ph), std::sin(ph)};
        }
        return f;
    }
    if (j.contains("values")) {
        std::vector<Complex> f;
        for (const auto& v : j["values"]) f.emplace_back(v.at(0).get<double>(), v.at(1).get<double>());
        if (static_cast<int>(f.size()) != modulus)
            throw SpecError(path + ".values", "length must equal the modulus");
        return f;
    }
    throw SpecError(path, "unrecognized finite observable");
}

inline AverageMode parse_mode(const Json& j, std::uint64_t default_seed) {
    if (j.is_null()) return Exact{kDefaultEnumCap};
    if (j.contains("exact")) {
        Exact e;
        e.cap = j["exact"].value("cap", kDefaultEnumCap);
        return e;
    }
    if (j.contains("sampled")) {
        Sampled s;
        s.count = j["sampled"].value("count", std::uint64_t{100000});
        s.seed = j["sampled"].value("seed", default_seed);
        return s;
    }
    return Exact{kDefaultEnumCap};
}

}  // namespace jsonio

}  // namespace ipergo
