#pragma once

// Experiment runner behind the `symlab` executable. Each subcommand reads a
// JSON config, writes CSV tables plus report.md into the output directory and
// returns an exit code: 0 ok, 1 library error, 2 config error.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "symlab/banach_limit.hpp"
#include "symlab/error.hpp"
#include "symlab/flows.hpp"
#include "symlab/hyperbolic_measure.hpp"
#include "symlab/koopman.hpp"
#include "symlab/sampling.hpp"
#include "symlab/serialization.hpp"
#include "symlab/symplectic_measure.hpp"

namespace symlab::cli {

using json = nlohmann::json;

enum exit_code : int { ok = 0, library_failure = 1, config_failure = 2 };

struct Options {
    std::optional<std::filesystem::path> config;
    std::optional<std::filesystem::path> out;
    std::uint64_t seed = 0;
    arithmetic_mode mode = arithmetic_mode::exact;
    std::vector<std::string> suites;
};

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// CSV table with a fixed header.
class Csv {
public:
    explicit Csv(std::vector<std::string> header) : header_(std::move(header)) {}

    void row(std::vector<std::string> cells) {
        if (cells.size() != header_.size()) throw error("csv row width does not match header");
        rows_.push_back(std::move(cells));
    }

    std::size_t size() const { return rows_.size(); }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw error("cannot write " + path.string());
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
            out << '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

class Report {
public:
    explicit Report(std::string title) { out_ << "# " << title << "\n\n"; }
    Report& line(const std::string& s) {
        out_ << s << "\n";
        return *this;
    }
    void write(const std::filesystem::path& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw error("cannot write " + path.string());
        f << out_.str();
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

/// Output directory and config shared by every subcommand.
struct Context {
    json config;
    io::Reader reader;
    std::filesystem::path out;
    std::uint64_t seed;

    std::filesystem::path file(const std::string& name) const { return out / name; }
};

inline std::vector<int> int_list(const json& j, const char* what) {
    std::vector<int> out;
    if (j.is_object() && j.contains("powers_of_two")) {
        const json& r = j["powers_of_two"];
        if (!r.is_array() || r.size() != 2) throw config_error("powers_of_two is [lo, hi]");
        for (int e = r[0].get<int>(); e <= r[1].get<int>(); ++e) {
            if (e < 0 || e > 30) throw config_error("powers_of_two exponent out of range");
            out.push_back(1 << e);
        }
        return out;
    }
    for (const auto& x : io::Reader::array(j, what)) {
        if (!x.is_number_integer() || x.get<int>() < 1) throw config_error(std::string(what) + " must hold positive integers");
        out.push_back(x.get<int>());
    }
    return out;
}

inline std::string join_numbers(const std::vector<Number>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + v[i].str();
    return s;
}

// ---------------------------------------------------------------------------
// measure

inline int run_measure(const Context& ctx) {
    Csv csv({"name", "type", "measure", "measure_float"});
    Report rep("Measure evaluation");
    for (const auto& item : io::Reader::array(io::Reader::field(ctx.config, "items"), "items")) {
        const std::string name = item.value("name", "item" + std::to_string(csv.size() + 1));
        const std::string type = io::Reader::field(item, "type").get<std::string>();
        const json& set = io::Reader::field(item, "set");
        Number m;
        if (type == "plane") m = ctx.reader.plane_set(set).area();
        else if (type == "ring") m = ring_measure(ctx.reader.ring_set(set));
        else if (type == "periodic") m = density(ctx.reader.periodic_set(set));
        else if (type == "radial") m = radial_weight(ctx.reader.intervals(set));
        else if (type == "hyperbolic") m = hyper_ring_measure(ctx.reader.hyperbolic_ring_set(set));
        else throw config_error("unknown item type '" + type + "'");
        csv.row({name, type, m.str(), fmt(m.to_double())});
        rep.line("- " + name + " (" + type + "): " + m.str());
    }
    csv.write(ctx.file("measures.csv"));
    rep.line("").line("Exercises: set algebra, inclusion-exclusion over porous bars, densities of eventually periodic sets.");
    rep.write(ctx.file("report.md"));
    return ok;
}

// ---------------------------------------------------------------------------
// invariance

inline RingSet prepare_for_flow(const RingSet& r, const BlockFlow& flow, const Time& t) {
    const auto moving = flow.nontrivial_indices(t);
    if (!moving) return r;
    return activate(r, *moving);
}

inline int run_invariance(const Context& ctx) {
    const json& cfg = ctx.config;
    Csv csv({"case", "t", "measure_before", "measure_after", "difference", "status"});
    Report rep("Invariance check");
    bool all = true;
    auto record = [&](const std::string& name, const Time& t, const Number& before, const Number& after) {
        const Number diff = after - before;
        const bool good = before.is_exact() && after.is_exact()
                              ? diff.is_zero()
                              : std::abs(diff.to_double()) <= 1e-9 * std::max(1.0, std::abs(before.to_double()));
        all = all && good;
        csv.row({name, t.str(), before.str(), after.str(), diff.str(), good ? "pass" : "fail"});
    };

    std::vector<Time> ts = cfg.contains("times") ? ctx.reader.times(cfg["times"]) : std::vector<Time>{Time::plain(Number(1))};
    if (cfg.contains("flow")) {
        const BlockFlow flow = ctx.reader.flow(cfg["flow"]);
        std::vector<std::pair<std::string, RingSet>> sets;
        if (cfg.contains("set")) sets.emplace_back("set", ctx.reader.ring_set(cfg["set"]));
        if (cfg.contains("random")) {
            sampling::Rng rng(ctx.seed);
            const int count = ctx.reader.integer(io::Reader::field(cfg["random"], "count"), "random.count");
            for (int i = 0; i < count; ++i) sets.emplace_back("random" + std::to_string(i + 1), sampling::ring_set(rng));
        }
        if (sets.empty()) throw config_error("invariance needs 'set' or 'random'");
        for (const auto& [name, r] : sets) {
            for (const auto& t : ts) {
                const RingSet prepared = prepare_for_flow(r, flow, t);
                record(name, t, prepared.measure(), pushforward(prepared, flow, t).measure());
            }
        }
    }
    if (cfg.contains("hyperbolic_set")) {
        const HyperbolicRingSet h = ctx.reader.hyperbolic_ring_set(cfg["hyperbolic_set"]);
        const FrequencySeq a = ctx.reader.frequency(io::Reader::field(cfg, "a"));
        for (const auto& t : ts) record("hyperbolic", t, hyper_ring_measure(h), hyper_ring_measure(hyper_pushforward(h, a, t)));
    }
    if (cfg.contains("periodic_set")) {
        const EventuallyPeriodicSet s = ctx.reader.periodic_set(cfg["periodic_set"]);
        for (const auto& h : io::Reader::array(io::Reader::field(cfg, "shifts"), "shifts")) {
            const Number shift = ctx.reader.number(h);
            record("periodic", Time(shift), density(s), density(translate_set(s, shift)));
        }
    }
    if (csv.size() == 0) throw config_error("invariance config has nothing to check");
    csv.write(ctx.file("invariance.csv"));
    rep.line(std::to_string(csv.size()) + " cases, " + (all ? "all preserved" : "VIOLATIONS FOUND"));
    rep.line("").line("Exercises: invariance of the bar measure under block flows, of the block measure under angle shifts, and of density under translation.");
    rep.write(ctx.file("report.md"));
    return all ? ok : library_failure;
}

// ---------------------------------------------------------------------------
// blowup

inline int run_blowup(const Context& ctx) {
    const json& cfg = ctx.config;
    const PhasePoint z0 = ctx.reader.phase_point(io::Reader::field(cfg, "point"));
    const FrequencySeq a = ctx.reader.frequency(io::Reader::field(cfg, "a"));
    const std::string kind_name = cfg.value("oscillator", "hyperbolic");
    OscillatorKind kind;
    if (kind_name == "hyperbolic") kind = OscillatorKind::hyperbolic;
    else if (kind_name == "harmonic") kind = OscillatorKind::harmonic;
    else throw config_error("oscillator must be hyperbolic or harmonic");
    std::vector<double> ts;
    for (const auto& t : ctx.reader.times(io::Reader::field(cfg, "times"))) ts.push_back(t.value());
    const std::vector<int> ns = int_list(io::Reader::field(cfg, "ns"), "ns");

    const ExistenceInterval iv = kind == OscillatorKind::hyperbolic ? existence_interval(z0, a) : ExistenceInterval{};
    const auto rows = energy_growth_table(z0, a, ts, ns, kind);
    Csv csv({"t", "N", "partial_sum", "log_partial_sum", "inside_interval", "energy_bound"});
    for (const auto& r : rows) {
        const bool inside = iv.contains(r.t);
        const double bound = kind == OscillatorKind::hyperbolic ? (inside ? energy_bound(z0, a, r.t) : kInf) : kInf;
        csv.row({fmt(r.t), std::to_string(r.n), fmt(r.partial_sum), fmt(r.log_partial_sum), inside ? "1" : "0", fmt(bound)});
    }
    csv.write(ctx.file("energy.csv"));

    Report rep("Blow-up analysis");
    rep.line("existence interval: (" + fmt(iv.lower) + ", " + fmt(iv.upper) + ")");
    rep.line(iv.is_whole_line() ? "solution exists for all time" : "endpoints are outside the interval; the trajectory leaves the phase space there");
    rep.line("frequency growth in l-infinity: " + std::string(a.in_l_infinity() ? "yes" : "no"));
    rep.line("").line("Exercises: existence interval of hyperbolic trajectories and divergence of the phase-space norm past it.");
    rep.write(ctx.file("report.md"));
    return ok;
}

// ---------------------------------------------------------------------------
// correlation

inline int run_correlation(const Context& ctx) {
    const json& cfg = ctx.config;
    Report rep("Correlation decay");
    bool wrote = false;
    if (cfg.contains("flow")) {
        const BlockFlow flow = ctx.reader.flow(cfg["flow"]);
        const PlaneSet factor = cfg.contains("factor") ? ctx.reader.plane_set(cfg["factor"]) : PlaneSet::unit_cell();
        const auto ts = ctx.reader.times(io::Reader::field(cfg, "times"));
        const auto ns = int_list(io::Reader::field(cfg, "ns"), "ns");
        const CorrelationTable table = correlation_study(flow, factor, ts, ns);
        Csv csv({"t", "N", "re_g", "im_g", "abs_g", "factor"});
        for (const auto& r : table.rows) {
            csv.row({r.t.str(), std::to_string(r.n), r.g.str(), "0", fmt(std::abs(r.g.to_double())), r.factor.str()});
        }
        csv.write(ctx.file("correlation.csv"));
        rep.line("g_N(t) = prod_{k<=N} area(M_k(t) B n B) / area(B), " + std::to_string(table.rows.size()) + " rows");
        wrote = true;
    }
    if (cfg.contains("hyperbolic")) {
        const json& h = cfg["hyperbolic"];
        const double a = ctx.reader.real(io::Reader::field(h, "a"));
        const double x = ctx.reader.real(io::Reader::field(h, "window"));
        Csv csv({"a", "t", "window", "re_g", "im_g", "abs_g", "bound"});
        for (const auto& t : ctx.reader.times(io::Reader::field(h, "times"))) {
            const BoundedValue g = hyperbolic_correlation(a, t.value(), x);
            csv.row({fmt(a), t.str(), fmt(x), fmt(g.value.real()), fmt(g.value.imag()), fmt(std::abs(g.value)), fmt(g.bound)});
        }
        csv.write(ctx.file("hyperbolic_correlation.csv"));
        rep.line("hyperbolic block correlation e^{i a^2 t^2} sin(2taX)/(2taX), window X = " + fmt(x));
        wrote = true;
    }
    if (!wrote) throw config_error("correlation config needs 'flow' or 'hyperbolic'");
    rep.line("").line("Exercises: strong continuity of the Koopman group (finite versus infinite frequency support).");
    rep.write(ctx.file("report.md"));
    return ok;
}

// ---------------------------------------------------------------------------
// spectrum

inline int run_spectrum(const Context& ctx) {
    const json& cfg = ctx.config;
    const FrequencySeq a = ctx.reader.frequency(io::Reader::field(cfg, "a"));
    const auto ts = ctx.reader.times(io::Reader::field(cfg, "times"));
    const HyperbolicFunction profile = HyperbolicFunction::indicator(
        cfg.contains("profile") ? ctx.reader.hyperbolic_ring_set(cfg["profile"]) : HyperbolicRingSet::from_bar(HyperbolicBar::full()));
    std::vector<EigenFunction> efs;
    for (const auto& m : io::Reader::array(io::Reader::field(cfg, "modes"), "modes")) {
        EigenFunction ef;
        for (const auto& x : io::Reader::array(m, "mode vector")) ef.m.push_back(ctx.reader.number(x));
        ef.radial_profile = profile;
        efs.push_back(std::move(ef));
    }
    Csv eig({"m", "t", "phase", "re", "im", "profile_fixed"});
    bool all = true;
    for (const auto& ef : efs) {
        for (const auto& t : ts) {
            const EigenApplication e = eigen_apply(a, t, ef);
            all = all && e.profile_fixed && e.phase_consistent;
            eig.row({join_numbers(ef.m), t.str(), e.phase.str(), fmt(e.eigenvalue.real()), fmt(e.eigenvalue.imag()),
                     e.profile_fixed && e.phase_consistent ? "1" : "0"});
        }
    }
    eig.write(ctx.file("eigenvalues.csv"));
    Report rep("Eigen-subspaces of the hyperbolic flow");
    rep.line("eigenvalue exp(i t sum_k m_k a_k) for " + std::to_string(efs.size()) + " mode vectors");
    if (cfg.contains("window")) {
        const double x = ctx.reader.real(cfg["window"]);
        Csv orth({"m1", "m2", "window", "re", "im", "factor_bound", "bound"});
        for (std::size_t i = 0; i < efs.size(); ++i) {
            for (std::size_t j = i + 1; j < efs.size(); ++j) {
                try {
                    const OrthogonalityEstimate o = eigen_orthogonality(efs[i], efs[j], x);
                    orth.row({join_numbers(efs[i].m), join_numbers(efs[j].m), fmt(x), fmt(o.estimate.real()),
                              fmt(o.estimate.imag()), fmt(o.factor_bound), fmt(o.bound)});
                } catch (const not_orthogonal&) {
                    rep.line("modes " + join_numbers(efs[i].m) + " and " + join_numbers(efs[j].m) + " coincide; skipped");
                }
            }
        }
        orth.write(ctx.file("orthogonality.csv"));
    }
    rep.line(all ? "all eigen relations hold" : "EIGEN RELATION FAILED");
    rep.line("").line("Exercises: invariant subspaces spanned by phase-weighted radial functions and their eigenvalue lattice.");
    rep.write(ctx.file("report.md"));
    return all ? ok : library_failure;
}

// ---------------------------------------------------------------------------
// separation

inline std::map<int, int> sigma_from(const json& j) {
    std::map<int, int> s;
    if (!j.is_object()) throw config_error("sigma maps pair index to -1 or 0");
    for (const auto& [key, v] : j.items()) {
        if (!v.is_number_integer() || (v.get<int>() != 0 && v.get<int>() != -1)) {
            throw config_error("sigma values must be -1 or 0");
        }
        s.emplace(io::Reader::index_key(key), v.get<int>());
    }
    return s;
}

inline int run_separation(const Context& ctx) {
    const json& cfg = ctx.config;
    std::vector<std::pair<std::map<int, int>, std::map<int, int>>> pairs;
    if (cfg.contains("pairs")) {
        for (const auto& p : io::Reader::array(cfg["pairs"], "pairs")) {
            if (!p.is_array() || p.size() != 2) throw config_error("a pair is [sigma1, sigma2]");
            pairs.emplace_back(sigma_from(p[0]), sigma_from(p[1]));
        }
    }
    if (cfg.contains("random")) {
        sampling::Rng rng(ctx.seed);
        const json& r = cfg["random"];
        const int count = ctx.reader.integer(io::Reader::field(r, "count"), "random.count");
        const int indices = r.contains("indices") ? ctx.reader.integer(r["indices"], "random.indices") : 6;
        for (int i = 0; i < count; ++i) {
            std::map<int, int> s1, s2;
            for (int k = 1; k <= indices; ++k) {
                s1[k] = -sampling::uniform_int(rng, 0, 1);
                s2[k] = -sampling::uniform_int(rng, 0, 1);
            }
            pairs.emplace_back(std::move(s1), std::move(s2));
        }
    }
    if (pairs.empty()) throw config_error("separation needs 'pairs' or 'random'");
    std::vector<int> ps;
    for (const auto& p : io::Reader::array(io::Reader::field(cfg, "p"), "p")) ps.push_back(ctx.reader.integer(p, "p"));

    Csv csv({"pair", "p", "norm_pow", "distance", "expected"});
    bool all = true;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const bool same = pairs[i].first == pairs[i].second;
        for (int p : ps) {
            const SeparationResult r = separation_witness(pairs[i].first, pairs[i].second, p);
            const Number expected(same ? 0 : 2);
            all = all && r.norm_pow == expected;
            csv.row({std::to_string(i + 1), std::to_string(p), r.norm_pow.str(), fmt(r.distance),
                     same ? "0" : "2^(1/" + std::to_string(p) + ")"});
        }
    }
    csv.write(ctx.file("separation.csv"));
    Report rep("Non-separability witness");
    rep.line(std::to_string(pairs.size()) + " sigma pairs; distinct pairs sit at distance 2^(1/p)");
    rep.line(all ? "all distances as expected" : "UNEXPECTED DISTANCE");
    rep.write(ctx.file("report.md"));
    return all ? ok : library_failure;
}

// ---------------------------------------------------------------------------
// verify

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
};

inline SuiteResult suite_measure_additivity(std::uint64_t seed) {
    SuiteResult r{"measure-additivity"};
    sampling::Rng rng(seed);
    for (int i = 0; i < 40; ++i, ++r.cases) {
        const RingSet a = sampling::ring_set(rng);
        const RingSet b = sampling::ring_set(rng);
        const Number ua = unite(a, b).measure() + intersect(a, b).measure();
        const Number split = subtract(a, b).measure() + intersect(a, b).measure();
        if (ua != a.measure() + b.measure() || split != a.measure()) ++r.failures;
    }
    return r;
}

inline SuiteResult suite_translation_invariance(std::uint64_t seed) {
    SuiteResult r{"translation-invariance"};
    sampling::Rng rng(seed);
    for (int i = 0; i < 40; ++i, ++r.cases) {
        const RingSet a = sampling::ring_set(rng);
        std::map<int, Vec2> shift;
        for (int k = 1; k <= 5; ++k) shift[k] = {sampling::rational(rng), sampling::rational(rng)};
        if (translate_ringset(a, shift).measure() != a.measure()) ++r.failures;
    }
    return r;
}

inline SuiteResult suite_symplectic_invariance(std::uint64_t seed) {
    SuiteResult r{"symplectic-invariance"};
    sampling::Rng rng(seed);
    const Matrix2 maps[] = {Matrix2::rotation(Number::ratio(3, 5), Number::ratio(4, 5)),
                            Matrix2::hyperbolic(Number::ratio(5, 4), Number::ratio(3, 4)), Matrix2::shear(Number::ratio(7, 3))};
    for (int i = 0; i < 30; ++i, ++r.cases) {
        const RingSet a = RingSet::from_bar(sampling::bar(rng, 4, true));
        std::map<int, Matrix2> blocks;
        for (int k = 1; k <= 4; ++k) blocks.emplace(k, maps[sampling::uniform_int(rng, 0, 2)]);
        const BlockFlow f = BlockFlow::custom(blocks);
        const RingSet prepared = activate(a, {1, 2, 3, 4});
        if (pushforward(prepared, f, Time::plain(Number(1))).measure() != a.measure()) ++r.failures;
    }
    return r;
}

inline SuiteResult suite_flow_group_law(std::uint64_t seed) {
    SuiteResult r{"flow-group-law"};
    sampling::Rng rng(seed);
    const FrequencySeq a = FrequencySeq::finite({Number(1), Number(2), Number(3)});
    for (int i = 0; i < 30; ++i, ++r.cases) {
        const Number s1 = sampling::rational(rng, 2, 1);
        const Number s2 = sampling::rational(rng, 2, 1);
        const Time t1 = Time::log(Number(2), s1), t2 = Time::log(Number(2), s2);
        const Time c1 = Time::angle(Number::ratio(3, 5), Number::ratio(4, 5), s1);
        const Time c2 = Time::angle(Number::ratio(3, 5), Number::ratio(4, 5), s2);
        const BlockFlow hyp = BlockFlow::hyperbolic(a), har = BlockFlow::harmonic(a);
        for (int k = 1; k <= 3; ++k) {
            if (hyp.block(k, t1 + t2).linear != hyp.block(k, t1).linear * hyp.block(k, t2).linear) ++r.failures;
            if (har.block(k, c1 + c2).linear != har.block(k, c1).linear * har.block(k, c2).linear) ++r.failures;
        }
    }
    return r;
}

inline SuiteResult suite_conservation(std::uint64_t seed) {
    SuiteResult r{"conservation"};
    sampling::Rng rng(seed);
    const FrequencySeq a = FrequencySeq::finite({Number(1), Number(2)});
    for (int i = 0; i < 30; ++i, ++r.cases) {
        const PhasePoint z({{sampling::rational(rng), sampling::rational(rng)}, {sampling::rational(rng), sampling::rational(rng)}});
        const Number s = sampling::rational(rng, 2, 1);
        const auto check = [&](const BlockFlow& f, const Time& t, OscillatorKind kind) {
            const PhasePoint zt = trajectory(f, z, t);
            for (int k = 1; k <= 2; ++k) {
                if (mode_energy(zt, k, kind, a) != mode_energy(z, k, kind, a)) ++r.failures;
            }
        };
        check(BlockFlow::hyperbolic(a), Time::log(Number(2), s), OscillatorKind::hyperbolic);
        check(BlockFlow::harmonic(a), Time::angle(Number::ratio(3, 5), Number::ratio(4, 5), s), OscillatorKind::harmonic);
    }
    return r;
}

inline SuiteResult suite_banach_density(std::uint64_t seed) {
    SuiteResult r{"banach-density"};
    sampling::Rng rng(seed);
    for (int i = 0; i < 30; ++i, ++r.cases) {
        const EventuallyPeriodicSet s = sampling::periodic_set(rng);
        const Number h = sampling::rational(rng);
        if (density(translate_set(s, h)) != density(s)) ++r.failures;
        const Number x(1000);
        const Number err = abs(s.window_average(x) - s.density());
        if (err > (s.period() + s.patch_span()) / x) ++r.failures;
        const EventuallyPeriodicSet b = sampling::periodic_set(rng, false);
        const EventuallyPeriodicSet rest = subtract(b, s);
        if (density(unite(s, rest)) != density(s) + density(rest)) ++r.failures;
    }
    return r;
}

inline SuiteResult suite_hyperbolic_invariance(std::uint64_t seed) {
    SuiteResult r{"hyperbolic-invariance"};
    sampling::Rng rng(seed);
    const FrequencySeq a = FrequencySeq::finite({Number(1), Number::ratio(2, 3), Number(3)});
    for (int i = 0; i < 30; ++i, ++r.cases) {
        const HyperbolicRingSet h = sampling::hyperbolic_ring_set(rng);
        if (hyper_ring_measure(hyper_pushforward(h, a, Time::plain(sampling::rational(rng)))) != hyper_ring_measure(h)) ++r.failures;
    }
    return r;
}

inline SuiteResult suite_koopman_unitarity(std::uint64_t seed) {
    SuiteResult r{"koopman-unitarity"};
    sampling::Rng rng(seed);
    const BlockFlow f = BlockFlow::hyperbolic(FrequencySeq::finite({Number(1), Number(1)}));
    for (int i = 0; i < 20; ++i, ++r.cases) {
        SymplecticFunction g;
        g.add(Coefficient(sampling::rational(rng), sampling::rational(rng)), activate(sampling::ring_set(rng, 3, 1), {1, 2}));
        g.add(Coefficient(sampling::rational(rng)), activate(RingSet::from_bar(sampling::bar(rng, 3)), {1, 2}));
        const Time t = Time::log(Number(2)), s = Time::log(Number(2), Number(-2));
        const auto ut = koopman_apply(f, t, g);
        if (lp_norm_pow(ut, 2) != lp_norm_pow(g, 2)) ++r.failures;
        if (!equivalent(koopman_apply(f, s, ut), koopman_apply(f, s + t, g))) ++r.failures;
    }
    return r;
}

inline SuiteResult suite_separation(std::uint64_t seed) {
    SuiteResult r{"separation"};
    sampling::Rng rng(seed);
    for (int i = 0; i < 20; ++i) {
        std::map<int, int> s1, s2;
        for (int k = 1; k <= 5; ++k) s1[k] = s2[k] = -sampling::uniform_int(rng, 0, 1);
        const int flip = sampling::uniform_int(rng, 1, 5);
        s2[flip] = -1 - s2[flip];
        for (int p : {1, 2, 4}) {
            ++r.cases;
            if (separation_witness(s1, s2, p).norm_pow != Number(2)) ++r.failures;
        }
    }
    return r;
}

inline const std::map<std::string, std::function<SuiteResult(std::uint64_t)>>& suites() {
    static const std::map<std::string, std::function<SuiteResult(std::uint64_t)>> table = {
        {"measure-additivity", suite_measure_additivity},
        {"translation-invariance", suite_translation_invariance},
        {"symplectic-invariance", suite_symplectic_invariance},
        {"flow-group-law", suite_flow_group_law},
        {"conservation", suite_conservation},
        {"banach-density", suite_banach_density},
        {"hyperbolic-invariance", suite_hyperbolic_invariance},
        {"koopman-unitarity", suite_koopman_unitarity},
        {"separation", suite_separation},
    };
    return table;
}

inline int run_verify(const Context& ctx, std::vector<std::string> names) {
    if (ctx.config.is_object() && ctx.config.contains("suites")) {
        for (const auto& s : io::Reader::array(ctx.config["suites"], "suites")) names.push_back(s.get<std::string>());
    }
    if (names.empty() || (names.size() == 1 && names[0] == "all")) {
        names.clear();
        for (const auto& [n, f] : suites()) names.push_back(n);
    }
    for (const auto& n : names) {
        if (!suites().contains(n)) throw config_error("unknown suite '" + n + "'");
    }
    Csv csv({"suite", "cases", "failures", "status"});
    Report rep("Property suites");
    bool all = true;
    for (const auto& n : names) {
        const SuiteResult r = suites().at(n)(ctx.seed);
        all = all && r.failures == 0;
        csv.row({r.name, std::to_string(r.cases), std::to_string(r.failures), r.failures == 0 ? "pass" : "fail"});
        rep.line("- " + r.name + ": " + (r.failures == 0 ? "pass" : "FAIL") + " (" + std::to_string(r.cases) + " cases)");
        std::cout << r.name << ": " << (r.failures == 0 ? "pass" : "FAIL") << '\n';
    }
    csv.write(ctx.file("verify.csv"));
    rep.write(ctx.file("report.md"));
    return all ? ok : library_failure;
}

// ---------------------------------------------------------------------------
// entry point

inline json load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw config_error(std::string("malformed config: ") + e.what());
    }
}

inline int dispatch(const std::string& command, const Options& opt) {
    json config = json::object();
    if (opt.config) config = load_config(*opt.config);
    else if (command != "verify") throw config_error("--config is required for " + command);
    if (config.contains("kind")) {
        const std::string kind = config["kind"].get<std::string>();
        const std::map<std::string, std::string> expected = {
            {"measure", "measure-check"}, {"invariance", "invariance-check"}, {"blowup", "blowup"},
            {"correlation", "correlation"}, {"spectrum", "spectrum"},          {"separation", "separation"},
            {"verify", "verify"}};
        if (kind != command && kind != expected.at(command)) {
            throw config_error("config kind '" + kind + "' does not match subcommand '" + command + "'");
        }
    }
    std::uint64_t seed = opt.seed;
    if (config.contains("seed") && opt.seed == 0) {
        if (!config["seed"].is_number_unsigned()) throw config_error("seed must be a nonnegative integer");
        seed = config["seed"].get<std::uint64_t>();
    }
    std::filesystem::path out = opt.out ? *opt.out : std::filesystem::path(config.value("output", "out"));
    std::filesystem::create_directories(out);
    Context ctx{config, io::Reader(opt.mode), out, seed};
    if (command == "measure") return run_measure(ctx);
    if (command == "invariance") return run_invariance(ctx);
    if (command == "blowup") return run_blowup(ctx);
    if (command == "correlation") return run_correlation(ctx);
    if (command == "spectrum") return run_spectrum(ctx);
    if (command == "separation") return run_separation(ctx);
    return run_verify(ctx, opt.suites);
}

/// Parses argv and runs one subcommand; never throws.
inline int main(int argc, char** argv) {
    CLI::App app{"Invariant measures, block flows and Koopman diagnostics"};
    app.require_subcommand(1);
    Options opt;
    std::string mode = "exact";
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"measure", "measures of plane, ring, periodic and block sets"},
        {"invariance", "measure before and after flows and shifts"},
        {"blowup", "energy partial sums against the existence interval"},
        {"correlation", "self-overlap of product sets under the flow"},
        {"spectrum", "eigenvalue phases and orthogonality bounds"},
        {"separation", "distances between product indicators"},
        {"verify", "randomized property suites"},
    };
    for (const auto& [n, help] : commands) {
        CLI::App* sub = app.add_subcommand(n, help);
        sub->add_option("--config", opt.config, "experiment config (JSON)");
        sub->add_option("--out", opt.out, "output directory");
        sub->add_option("--seed", opt.seed, "seed for randomized sweeps");
        sub->add_option("--mode", mode, "arithmetic mode")->check(CLI::IsMember({"exact", "float"}));
        if (n == "verify") sub->add_option("suite", opt.suites, "property suites to run (default: all)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return config_failure;
    }
    opt.mode = mode == "float" ? arithmetic_mode::approximate : arithmetic_mode::exact;
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return dispatch(command, opt);
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_failure;
    } catch (const error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return library_failure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return library_failure;
    }
}

} // namespace symlab::cli
