// ipergo: experiment runner for IP-set ergodic averaging experiments.
//
//   ipergo <subcommand> --spec spec.json [--out DIR] [--threads K]
//
// Subcommands: omega, classify, spectrum, witness, average, equi, seminorm,
// cubic, control-check, vdc-check, correlate, density, behrend.
//
// Every run is reproducible from the spec: the seed, precision and caps are
// pinned in the report header. Reports are JSON; traces are CSV with the
// column sets documented per subcommand in --help. Exit status: 0 on
// success, 2 when an inequality check reports holds=false, 1 on errors.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ipergo/json_io.hpp"
#include "ipergo/uniformity.hpp"
#include "ipergo/version.hpp"

namespace fs = std::filesystem;
using namespace ipergo;
using jsonio::angle_to_json;
using jsonio::bigint_to_json;
using jsonio::gens_to_json;
using jsonio::parse_angle;
using jsonio::parse_gens;
using jsonio::parse_interval_set;
using jsonio::parse_mode;
using jsonio::parse_schedule;

namespace {

struct RunContext {
    Json spec;
    fs::path out_dir = ".";
    unsigned threads = 1;
    std::uint64_t seed = 0;
    int exit_code = 0;
};

const Json& need(const Json& j, const char* key, const std::string& parent = "") {
    if (!j.contains(key)) throw SpecError(parent + "." + key, "missing required field");
    return j[key];
}

Json report_header(const RunContext& ctx, const std::string& kind) {
    Json rep;
    rep["kind"] = kind;
    rep["version"] = kVersion;
    rep["seed"] = ctx.seed;
    rep["spec"] = ctx.spec;
    return rep;
}

void write_report(const RunContext& ctx, const std::string& name, const Json& rep) {
    fs::create_directories(ctx.out_dir);
    std::ofstream out(ctx.out_dir / (name + ".json"));
    out << rep.dump(2) << "\n";
}

void write_density_csv(const RunContext& ctx, const std::string& name, const DensityReport& rep,
                       const char* value_col) {
    fs::create_directories(ctx.out_dir);
    std::ofstream out(ctx.out_dir / (name + ".csv"));
    out << "N,window_size," << value_col << ",stderr,mode\n";
    for (const auto& p : rep.points)
        out << p.N << "," << p.window_cardinality.get_str() << "," << format_double(p.density)
            << "," << format_double(p.stderr_of_mean) << "," << (rep.sampled ? "sampled" : "exact")
            << "\n";
}

Json density_summary(const DensityReport& rep) {
    Json j;
    j["tail_min"] = rep.tail_min;
    j["tail_max"] = rep.tail_max;
    j["mode"] = rep.sampled ? "sampled" : "exact";
    j["note"] = "tail min/max over the last half of the N range; finite-N proxies, not limits";
    return j;
}

Json omega_to_json(const OmegaValue& om) {
    Json j;
    switch (om.status) {
        case OmegaValue::Status::ExactZero:
            j["status"] = "ExactZero";
            j["epsilon0"] = om.epsilon0;
            break;
        case OmegaValue::Status::Finite:
            j["status"] = "Finite";
            j["value_re"] = om.value.real();
            j["value_im"] = om.value.imag();
            j["j0"] = om.j0;
            break;
        case OmegaValue::Status::Truncated:
            j["status"] = "Truncated";
            j["partial_re"] = om.partial.value().real();
            j["partial_im"] = om.partial.value().imag();
            j["residual_bound"] = om.residual_bound;
            break;
    }
    if (om.certificate) {
        j["certificate"]["preperiod"] = om.certificate->preperiod;
        j["certificate"]["period"] = om.certificate->period;
    }
    return j;
}

// ---- subcommand bodies ------------------------------------------------------

int run_omega(RunContext& ctx) {
    auto gens = parse_gens(need(ctx.spec, "gens"), ".gens");
    auto sched = parse_schedule(ctx.spec.value("schedule", Json()), ".schedule");
    auto angle = parse_angle(need(ctx.spec, "angle"), ".angle");
    std::uint32_t horizon = ctx.spec.value("horizon", 64u);
    OmegaValue om = omega(gens, sched, angle, horizon);
    Json rep = report_header(ctx, "omega");
    rep["result"] = omega_to_json(om);
    write_report(ctx, "omega", rep);
    std::cout << rep["result"].dump() << "\n";
    return 0;
}

int run_classify(RunContext& ctx) {
    auto gens = parse_gens(need(ctx.spec, "gens"), ".gens");
    auto sched = parse_schedule(ctx.spec.value("schedule", Json()), ".schedule");
    AngleValue angle = gens.is_witness() && !ctx.spec.contains("angle")
                           ? AngleValue(gens.witness_rule()->alpha)
                           : parse_angle(need(ctx.spec, "angle"), ".angle");
    std::uint32_t horizon = ctx.spec.value("horizon", 64u);
    auto v = classify_convergence(gens, sched, angle, horizon);
    Json rep = report_header(ctx, "classify");
    Json r;
    switch (v.tag) {
        case ConvergenceVerdict::Tag::ConvergesToZero: r["verdict"] = "ConvergesToZero"; break;
        case ConvergenceVerdict::Tag::ConvergesNonzero:
            r["verdict"] = "ConvergesNonzero";
            r["limit_re"] = v.limit.real();
            r["limit_im"] = v.limit.imag();
            break;
        case ConvergenceVerdict::Tag::Diverges:
            r["verdict"] = "Diverges";
            r["argument_sum"] = v.argument_sum;
            r["norm_product_lower_bound"] = v.norm_product_bound;
            break;
        default: r["verdict"] = "Inconclusive"; break;
    }
    if (!v.theta_trace.empty()) {
        fs::create_directories(ctx.out_dir);
        std::ofstream csv(ctx.out_dir / "classify_theta.csv");
        csv << "j,theta\n";
        for (std::size_t j = 0; j < v.theta_trace.size(); ++j)
            csv << (j + 1) << "," << format_double(v.theta_trace[j]) << "\n";
        r["theta_trace_csv"] = "classify_theta.csv";
    }
    rep["result"] = r;
    write_report(ctx, "classify", rep);
    std::cout << r["verdict"].get<std::string>() << "\n";
    return 0;
}

int run_spectrum(RunContext& ctx) {
    auto gens = parse_gens(need(ctx.spec, "gens"), ".gens");
    auto angle = parse_angle(need(ctx.spec, "angle"), ".angle");
    if (!std::holds_alternative<RationalAngle>(angle))
        throw SpecError(".angle", "spectrum membership is decided for rational angles");
    auto dec = spectrum_contains(gens, std::get<RationalAngle>(angle));
    Json rep = report_header(ctx, "spectrum");
    rep["result"]["contains"] = dec.contains;
    rep["result"]["certificate"]["preperiod"] = dec.certificate.preperiod;
    rep["result"]["certificate"]["period"] = dec.certificate.period;
    if (gens.is_geometric()) {
        auto cert = rational_spectrum_certificate(gens);
        Json primes = Json::array();
        for (const auto& p : cert.primes) primes.push_back(bigint_to_json(p));
        rep["result"]["base_primes"] = primes;
        rep["result"]["spectrum"] = cert.description;
    }
    write_report(ctx, "spectrum", rep);
    std::cout << (dec.contains ? "true" : "false") << "\n";
    return 0;
}

int run_witness(RunContext& ctx) {
    auto angle = parse_angle(need(ctx.spec, "angle"), ".angle");
    if (!std::holds_alternative<FixedPointAngle>(angle))
        throw SpecError(".angle", "witness construction needs a fixed-point angle");
    std::uint32_t J = ctx.spec.value("count", 50u);
    std::uint64_t bound = ctx.spec.value("search_bound", std::uint64_t{10000000});
    auto gens = construct_divergence_witness(std::get<FixedPointAngle>(angle), J, bound);
    auto sched = FolnerSchedule::increasing(1);
    auto verdict = classify_convergence(gens, sched, angle);
    Json rep = report_header(ctx, "witness");
    Json terms = Json::array();
    const auto* w = gens.witness_rule();
    for (const auto& t : w->terms) terms.push_back(bigint_to_json(t));
    rep["result"]["terms"] = terms;
    rep["result"]["argument_sum"] = verdict.argument_sum;
    rep["result"]["norm_product_lower_bound"] = verdict.norm_product_bound;
    rep["result"]["verdict"] =
        verdict.tag == ConvergenceVerdict::Tag::Diverges ? "Diverges" : "Inconclusive";
    fs::create_directories(ctx.out_dir);
    std::ofstream csv(ctx.out_dir / "witness_theta.csv");
    csv << "j,n_j,theta\n";
    for (std::size_t j = 0; j < w->terms.size(); ++j)
        csv << (j + 1) << "," << w->terms[j].get_str() << ","
            << format_double(verdict.theta_trace[j]) << "\n";
    write_report(ctx, "witness", rep);
    std::cout << rep["result"]["verdict"].get<std::string>() << "\n";
    return 0;
}

int run_average(RunContext& ctx) {
    auto gens = parse_gens(need(ctx.spec, "gens"), ".gens");
    auto sched = parse_schedule(ctx.spec.value("schedule", Json()), ".schedule");
    auto mode = parse_mode(ctx.spec.value("mode", Json()), ctx.seed);
    std::uint32_t N_from = ctx.spec.value("N_from", ctx.spec.value("N", 10u));
    std::uint32_t N_to = ctx.spec.value("N_to", ctx.spec.value("N", 10u));
    const Json& sysj = need(ctx.spec, "system");
    std::string sys_kind = need(sysj, "kind", ".system").get<std::string>();

    std::vector<long> ells = ctx.spec.value("ells", std::vector<long>{1});
    std::optional<IpWeight> weight;

    Json rep = report_header(ctx, "average");
    fs::create_directories(ctx.out_dir);
    std::ofstream csv(ctx.out_dir / "average_trace.csv");
    csv << "N,value_re,value_im,stderr\n";
    MeanAndError last;

    auto emit = [&](std::uint32_t N, const MeanAndError& me) {
        csv << N << "," << format_double(me.value.real()) << "," << format_double(me.value.imag())
            << "," << format_double(me.stderr_of_mean) << "\n";
        last = me;
    };

    if (sys_kind == "finite_rotation") {
        FiniteRotation sys(need(sysj, "modulus", ".system").get<int>(), sysj.value("step", 1));
        std::vector<std::vector<Complex>> fs;
        for (const auto& fj : need(ctx.spec, "observables"))
            fs.push_back(jsonio::parse_finite_observable(fj, sys.modulus, ".observables"));
        if (ctx.spec.contains("weight_r"))
            weight = weight_1rPhi(gens, sched, jsonio::parse_bigint(ctx.spec["weight_r"], ".weight_r"));
        long x0 = ctx.spec.value("x0", 0);
        IpWeight wt = weight.value_or(IpWeight{BigInt(1), 1.0});
        for (std::uint32_t N = N_from; N <= N_to; ++N) {
            IPWindow w = window_clipped(gens, sched, N);
            emit(N, finite_weighted_multiple_average(sys, fs, ells, wt, x0, w, mode));
        }
    } else if (sys_kind == "torus_rotation") {
        TorusRotation sys;
        for (const auto& aj : need(sysj, "alpha", ".system")) sys.alpha.push_back(parse_angle(aj, ".system.alpha"));
        std::vector<TrigPolynomial> fs;
        for (const auto& fj : need(ctx.spec, "observables"))
            fs.push_back(jsonio::parse_trigpoly(fj, sys.dim(), ".observables"));
        EvaluationMode eval = MeanMode{};
        if (ctx.spec.contains("x")) {
            PointwiseAt pt;
            for (const auto& xj : ctx.spec["x"]) pt.x.push_back(parse_angle(xj, ".x"));
            eval = pt;
        }
        if (ctx.spec.contains("weight_r"))
            weight = weight_1rPhi(gens, sched, jsonio::parse_bigint(ctx.spec["weight_r"], ".weight_r"));
        for (std::uint32_t N = N_from; N <= N_to; ++N) {
            IPWindow w = window_clipped(gens, sched, N);
            if (weight)
                emit(N, torus_weighted_multiple_average(sys, fs, ells, *weight, eval, w, mode));
            else
                emit(N, torus_multiple_average(sys, fs, ells, eval, w, mode));
        }
    } else if (sys_kind == "skew_product") {
        auto a = parse_angle(need(sysj, "alpha", ".system"), ".system.alpha");
        SkewProduct sys{std::get<FixedPointAngle>(a)};
        TrigPolynomial f = jsonio::parse_trigpoly(need(ctx.spec, "observables").at(0), 2, ".observables");
        AngleValue x = parse_angle(need(ctx.spec, "x").at(0), ".x[0]");
        AngleValue y = parse_angle(need(ctx.spec, "x").at(1), ".x[1]");
        for (std::uint32_t N = N_from; N <= N_to; ++N) {
            IPWindow w = window_clipped(gens, sched, N);
            emit(N, skew_pointwise_average(sys, f, x, y, w, mode));
        }
    } else {
        throw SpecError(".system.kind", "unknown system kind");
    }
    rep["result"]["value_re"] = last.value.real();
    rep["result"]["value_im"] = last.value.imag();
    rep["result"]["stderr"] = last.stderr_of_mean;
    if (weight) rep["result"]["weight_denominator"] = weight->denominator;
    rep["result"]["trace_csv"] = "average_trace.csv";
    write_report(ctx, "average", rep);
    std::cout << format_complex(last.value) << "\n";
    return 0;
}

int run_equi(RunContext& ctx) {
    auto gens = parse_gens(need(ctx.spec, "gens"), ".gens");
    auto sched = parse_schedule(ctx.spec.value("schedule", Json()), ".schedule");
    auto angle = parse_angle(need(ctx.spec, "angle"), ".angle");
    long m = ctx.spec.value("m", 1);
    std::uint32_t N_from = ctx.spec.value("N_from", 1u);
    std::uint32_t N_to = ctx.spec.value("N_to", ctx.spec.value("N", 50u));
    TorusRotation sys;
    sys.alpha.push_back(angle);
    Json rep = report_header(ctx, "equi");
    fs::create_directories(ctx.out_dir);
    std::ofstream csv(ctx.out_dir / "equi_trace.csv");
    csv << "N,defect\n";
    double lastv = 1.0;
    for (std::uint32_t N = N_from; N <= N_to; ++N) {
        lastv = equidistribution_defect(sys, m, gens, sched, N);
        csv << N << "," << format_double(lastv) << "\n";
    }
    rep["result"]["defect"] = lastv;
    rep["result"]["N"] = N_to;
    rep["result"]["trace_csv"] = "equi_trace.csv";
    write_report(ctx, "equi", rep);
    std::cout << format_double(lastv) << "\n";
    return 0;
}

// shared loader for seminorm/cubic/control instances
struct UniformityInstance {
    std::optional<FiniteRotation> fin;
    std::optional<TorusRotation> tor;
    std::vector<std::vector<Complex>> fin_obs;
    std::vector<TrigPolynomial> tor_obs;
};

UniformityInstance load_uniformity_instance(const Json& spec) {
    UniformityInstance inst;
    const Json& sysj = need(spec, "system");
    std::string kind = need(sysj, "kind", ".system").get<std::string>();
    if (kind == "finite_rotation") {
        inst.fin.emplace(need(sysj, "modulus", ".system").get<int>(), sysj.value("step", 1));
        for (const auto& fj : need(spec, "observables"))
            inst.fin_obs.push_back(
                jsonio::parse_finite_observable(fj, inst.fin->modulus, ".observables"));
    } else if (kind == "torus_rotation") {
        inst.tor.emplace();
        for (const auto& aj : need(sysj, "alpha", ".system"))
            inst.tor->alpha.push_back(parse_angle(aj, ".system.alpha"));
        for (const auto& fj : need(spec, "observables"))
            inst.tor_obs.push_back(jsonio::parse_trigpoly(fj, inst.tor->dim(), ".observables"));
    } else {
        throw SpecError(".system.kind", "seminorm/cubic support rotations only");
    }
    return inst;
}

int run_seminorm(RunContext& ctx) {
    auto gens = parse_gens(need(ctx.spec, "gens"), ".gens");
    auto sched = parse_schedule(ctx.spec.value("schedule", Json()), ".schedule");
    int k = ctx.spec.value("k", 1);
    std::uint32_t N = ctx.spec.value("N", 16u);
    auto inst = load_uniformity_instance(ctx.spec);
    SeminormReport r = inst.fin ? fixed_seminorm(*inst.fin, inst.fin_obs.at(0), k, gens, sched, N)
                                : fixed_seminorm(*inst.tor, inst.tor_obs.at(0), k, gens, sched, N);
    Json rep = report_header(ctx, "seminorm");
    rep["result"]["level"] = r.level;
    rep["result"]["value"] = r.value;
    rep["result"]["semantics"] = "certified lower bound of the supremum-form seminorm";
    rep["result"]["truncation_leak"] = r.truncation_leak;
    fs::create_directories(ctx.out_dir);
    std::ofstream csv(ctx.out_dir / "seminorm_trace.csv");
    csv << "N,value\n";
    for (auto [n, v] : r.trace) csv << n << "," << format_double(v) << "\n";
    rep["result"]["trace_csv"] = "seminorm_trace.csv";
    write_report(ctx, "seminorm", rep);
    std::cout << format_double(r.value) << "\n";
    return 0;
}

int run_cubic(RunContext& ctx) {
    int k = ctx.spec.value("k", 1);
    auto inst = load_uniformity_instance(ctx.spec);
    double v = inst.fin ? cubic_integral(*inst.fin, inst.fin_obs.at(0), k)
                        : cubic_integral(*inst.tor, inst.tor_obs.at(0), k);
    Json rep = report_header(ctx, "cubic");
    rep["result"]["value"] = v;
    write_report(ctx, "cubic", rep);
    std::cout << format_double(v) << "\n";
    return 0;
}

int run_control_check(RunContext& ctx) {
    auto gens = parse_gens(need(ctx.spec, "gens"), ".gens");
    auto sched = parse_schedule(ctx.spec.value("schedule", Json()), ".schedule");
    int k = ctx.spec.value("k", 1);
    std::uint32_t N = ctx.spec.value("N", 16u);
    std::string which = ctx.spec.value("which", "measure");
    auto inst = load_uniformity_instance(ctx.spec);
    CheckReport r;
    if (which == "measure") {
        r = inst.fin ? measurecontrol_check(*inst.fin, inst.fin_obs.at(0), k, gens, sched, N)
                     : measurecontrol_check(*inst.tor, inst.tor_obs.at(0), k, gens, sched, N);
    } else if (which == "average") {
        std::vector<long> ells = need(ctx.spec, "ells").get<std::vector<long>>();
        r = inst.fin ? average_control_check(*inst.fin, inst.fin_obs, ells, gens, sched, N)
                     : average_control_check(*inst.tor, inst.tor_obs, ells, gens, sched, N);
    } else {
        throw SpecError(".which", "expected \"measure\" or \"average\"");
    }
    Json rep = report_header(ctx, "control-check");
    rep["result"]["which"] = which;
    rep["result"]["lhs"] = r.lhs;
    rep["result"]["rhs"] = r.rhs;
    rep["result"]["tol"] = r.tol;
    rep["result"]["holds"] = r.holds;
    write_report(ctx, "control-check", rep);
    std::cout << (r.holds ? "holds" : "VIOLATED") << "\n";
    return r.holds ? 0 : 2;
}

int run_vdc_check(RunContext& ctx) {
    auto gens = parse_gens(need(ctx.spec, "gens"), ".gens");
    std::uint32_t N = ctx.spec.value("N", 12u);
    std::uint32_t M = ctx.spec.value("M", 4u);
    int dim = ctx.spec.value("dim", 4);
    std::uint64_t count = ctx.spec.value("count", std::uint64_t{100});
    std::uint64_t seed = ctx.seed;
    std::uint64_t violations = 0;
    double worst_gap = 0;
    for (std::uint64_t t = 0; t < count; ++t) {
        std::uint64_t inst_seed = Rng(seed).split(t).next();
        auto xs = [&](const BigInt& n) {
            Rng r(inst_seed ^ digest(n));
            std::vector<Complex> v(dim);
            for (auto& c : v) c = {2 * r.uniform01() - 1, 2 * r.uniform01() - 1};
            return v;
        };
        auto rep = vdc_finite_check(xs, gens, N, M);
        if (!rep.holds) ++violations;
        worst_gap = std::max(worst_gap, rep.lhs - rep.rhs);
    }
    Json rep = report_header(ctx, "vdc-check");
    rep["result"]["instances"] = count;
    rep["result"]["violations"] = violations;
    rep["result"]["worst_gap"] = worst_gap;
    rep["result"]["holds"] = violations == 0;
    write_report(ctx, "vdc-check", rep);
    std::cout << (violations == 0 ? "holds" : "VIOLATED") << "\n";
    return violations == 0 ? 0 : 2;
}

int run_correlate(RunContext& ctx) {
    IntervalSet B = parse_interval_set(need(ctx.spec, "B"), ".B");
    auto angle = parse_angle(need(ctx.spec, "alpha"), ".alpha");
    if (!std::holds_alternative<FixedPointAngle>(angle))
        throw SpecError(".alpha", "skew correlations take a fixed-point angle");
    const auto& alpha = std::get<FixedPointAngle>(angle);
    BigInt n = jsonio::parse_bigint(need(ctx.spec, "n"), ".n");
    std::vector<long> ells = ctx.spec.value("ells", std::vector<long>{1, 2});
    long M = ctx.spec.value("M", 400);
    BigRat direct = skew_correlation_direct(B, alpha, n, ells);
    Json rep = report_header(ctx, "correlate");
    rep["result"]["direct"] = direct.get_d();
    rep["result"]["direct_exact"] = direct.get_str();
    if (ells == std::vector<long>{1, 2}) {
        auto f = skew_correlation_fourier(B, M, alpha, n);
        rep["result"]["fourier_re"] = f.value.real();
        rep["result"]["fourier_im"] = f.value.imag();
        rep["result"]["tail_bound"] = f.tail_bound;
        rep["result"]["agree"] = std::abs(f.value - Complex(direct.get_d(), 0)) <= f.tail_bound;
    }
    write_report(ctx, "correlate", rep);
    std::cout << format_double(direct.get_d()) << "\n";
    return 0;
}

int run_density(RunContext& ctx) {
    auto gens = parse_gens(need(ctx.spec, "gens"), ".gens");
    auto sched = parse_schedule(ctx.spec.value("schedule", Json()), ".schedule");
    auto mode = parse_mode(ctx.spec.value("mode", Json()), ctx.seed);
    std::uint32_t N_from = ctx.spec.value("N_from", 8u);
    std::uint32_t N_to = ctx.spec.value("N_to", 16u);
    std::string variant = ctx.spec.value("variant", "ip");
    Json rep = report_header(ctx, "density");
    DensityReport out;
    if (variant == "ip") {
        BigInt r = jsonio::parse_bigint(ctx.spec.value("divisor", Json(3)), ".divisor");
        out = ip_density(
            gens, sched, [&](const BigInt& n) { return n % r == 0; }, N_from, N_to, mode,
            ctx.threads);
        write_density_csv(ctx, "density_trace", out, "density");
    } else if (variant == "rotation") {
        IntervalSet A = parse_interval_set(need(ctx.spec, "A"), ".A");
        auto angle = parse_angle(need(ctx.spec, "alpha"), ".alpha");
        double eps = ctx.spec.value("eps", 0.01);
        std::vector<long> ells = ctx.spec.value("ells", std::vector<long>{1, 2});
        out = rotation_good_set_density(A, std::get<FixedPointAngle>(angle), ells.at(0),
                                        ells.at(1), gens, sched, eps, N_from, N_to, mode,
                                        ctx.threads);
        write_density_csv(ctx, "density_trace", out, "good_fraction");
    } else if (variant == "integer") {
        std::uint64_t W = ctx.spec.value("W", std::uint64_t{1000000});
        std::uint64_t w = ctx.spec.value("w", std::uint64_t{999});
        double eps = ctx.spec.value("eps", 0.01);
        std::vector<long> ells = ctx.spec.value("ells", std::vector<long>{1, 2});
        bool quad = ctx.spec.value("quadruple", false);
        IntegerSetWindow E(W);
        if (ctx.spec.contains("multiples_of"))
            E = IntegerSetWindow::multiples_of(ctx.spec["multiples_of"].get<std::uint64_t>(), W);
        else
            for (auto x : need(ctx.spec, "E")) E.insert(x.get<std::uint64_t>());
        out = integer_good_set_density(E, gens, sched, ells.at(0), ells.at(1), eps, w, N_from,
                                       N_to, quad, mode, ctx.threads);
        write_density_csv(ctx, "density_trace", out, "good_fraction");
    } else {
        throw SpecError(".variant", "expected ip | rotation | integer");
    }
    rep["result"] = density_summary(out);
    rep["result"]["trace_csv"] = "density_trace.csv";
    write_report(ctx, "density", rep);
    std::cout << "tail_min " << format_double(out.tail_min) << "\n";
    return 0;
}

int run_behrend(RunContext& ctx) {
    std::uint64_t L = ctx.spec.value("L", std::uint64_t{10000});
    BehrendOptions opts;
    opts.polish_seed = ctx.spec.value("polish_seed", opts.polish_seed);
    opts.polish_iters = ctx.spec.value("polish_iters", opts.polish_iters);
    BehrendSet S = behrend_build(L, opts);
    IntervalSet B = behrend_interval_set(S);
    bool free3 = is_ap3_free(S.members);
    Json rep = report_header(ctx, "behrend");
    rep["result"]["L"] = L;
    rep["result"]["size"] = S.members.size();
    rep["result"]["construction"] = S.construction;
    rep["result"]["ap3_free"] = free3;
    rep["result"]["mu"] = B.measure_double();
    if (ctx.spec.value("integral", true)) {
        auto t = triple_ap_integral(B);
        double mu3 = std::pow(B.measure_double(), 3);
        rep["result"]["triple_ap_integral"] = t.exact.get_d();
        rep["result"]["ratio_to_mu_cubed"] = t.exact.get_d() / mu3;
        rep["result"]["fourier_partial"] = t.fourier_partial;
        rep["result"]["fourier_tail_bound"] = t.fourier_tail_bound;
    }
    fs::create_directories(ctx.out_dir);
    std::ofstream csv(ctx.out_dir / "behrend_members.csv");
    csv << "member\n";
    for (auto m : S.members) csv << m << "\n";
    write_report(ctx, "behrend", rep);
    std::cout << "size " << S.members.size() << "\n";
    return free3 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ipergo: IP-set ergodic averaging laboratory"};
    app.require_subcommand(1);

    std::string spec_path, out_dir = ".";
    unsigned threads = 1;
    const char* env_prec = std::getenv("IPERGO_PRECISION");

    struct Sub {
        const char* name;
        const char* desc;
        int (*fn)(RunContext&);
    };
    const Sub subs[] = {
        {"omega", "limit multiplier omega at an angle; JSON status + certificate", run_omega},
        {"classify", "convergence trichotomy for (gens, schedule, angle)", run_classify},
        {"spectrum", "spectrum membership of a rational angle; CSV none", run_spectrum},
        {"witness", "build a divergence witness; CSV: j,n_j,theta", run_witness},
        {"average", "single/multiple/weighted averages; CSV: N,value_re,value_im,stderr",
         run_average},
        {"equi", "equidistribution defect trace; CSV: N,defect", run_equi},
        {"seminorm", "fixed-input uniformity seminorm; CSV: N,value", run_seminorm},
        {"cubic", "cubic-measure integral", run_cubic},
        {"control-check", "measure/average control inequality; exit 2 on violation",
         run_control_check},
        {"vdc-check", "van der Corput finite form on random instances; exit 2 on violation",
         run_vdc_check},
        {"correlate", "skew-product correlation, direct sweep vs Fourier", run_correlate},
        {"density",
         "density traces (ip | rotation | integer); CSV: N,window_size,value,stderr,mode",
         run_density},
        {"behrend", "progression-free set + interval-set contrast; CSV: member", run_behrend},
    };
    std::map<std::string, int (*)(RunContext&)> dispatch;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.desc);
        sub->add_option("--spec", spec_path, "experiment spec (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory for reports and traces");
        sub->add_option("--threads", threads,
                        "worker pool size; results are identical for every value");
        dispatch[s.name] = s.fn;
    }

    CLI11_PARSE(app, argc, argv);

    RunContext ctx;
    ctx.out_dir = out_dir;
    ctx.threads = threads;
    try {
        std::ifstream in(spec_path);
        if (!in) throw Error("cannot open spec file " + spec_path);
        ctx.spec = Json::parse(in);
        ctx.seed = ctx.spec.value("seed", std::uint64_t{0});
        if (!ctx.spec.contains("precision") && env_prec)
            ctx.spec["precision"] = std::stoul(env_prec);
        if (ctx.spec.contains("precision"))
            jsonio::g_default_bits = ctx.spec["precision"].get<unsigned>();
        return dispatch.at(app.get_subcommands().front()->get_name())(ctx);
    } catch (const SpecError& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
