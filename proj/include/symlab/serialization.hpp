#pragma once

// JSON reading and writing for every library object that appears in
// experiment configs. Numbers are "p/q" strings (or plain JSON numbers);
// approximate mode converts everything parsed to double.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "symlab/banach_limit.hpp"
#include "symlab/error.hpp"
#include "symlab/flows.hpp"
#include "symlab/geometry2d.hpp"
#include "symlab/hyperbolic_measure.hpp"
#include "symlab/number.hpp"
#include "symlab/symplectic_measure.hpp"

namespace symlab::io {

using json = nlohmann::json;

class Reader {
public:
    explicit Reader(arithmetic_mode mode = arithmetic_mode::exact) : mode_(mode) {}

    arithmetic_mode mode() const { return mode_; }

    Number number(const json& j) const {
        Number n = raw_number(j);
        return mode_ == arithmetic_mode::approximate ? n.to_approx() : n;
    }

    double real(const json& j) const { return raw_number(j).to_double(); }

    int integer(const json& j, const char* what) const {
        if (!j.is_number_integer()) throw config_error(std::string(what) + " must be an integer");
        return j.get<int>();
    }

    static const json& field(const json& j, const char* key) {
        if (!j.is_object()) throw config_error(std::string("expected an object holding '") + key + "'");
        auto it = j.find(key);
        if (it == j.end()) throw config_error(std::string("missing field '") + key + "'");
        return *it;
    }

    static const json& array(const json& j, const char* what) {
        if (!j.is_array()) throw config_error(std::string(what) + " must be an array");
        return j;
    }

    static int index_key(const std::string& key) {
        try {
            std::size_t used = 0;
            const int k = std::stoi(key, &used);
            if (used != key.size() || k < 1) throw config_error("pair index must be a positive integer: " + key);
            return k;
        } catch (const std::logic_error&) {
            throw config_error("pair index must be a positive integer: " + key);
        }
    }

    // -- geometry ------------------------------------------------------------

    Point point(const json& j) const {
        if (!j.is_array() || j.size() != 2) throw config_error("a point is a pair [x, y]");
        return {number(j[0]), number(j[1])};
    }

    /// {"rect": [x0, y0, x1, y1]} or {"polygons": [[[x, y], ...], ...]}; the
    /// polygons are convex and their union is taken.
    PlaneSet plane_set(const json& j) const {
        if (j.contains("rect")) {
            const json& r = j["rect"];
            if (!r.is_array() || r.size() != 4) throw config_error("rect is [x0, y0, x1, y1]");
            return PlaneSet::rectangle(number(r[0]), number(r[1]), number(r[2]), number(r[3]));
        }
        if (j.contains("unit_cell")) return PlaneSet::unit_cell();
        PlaneSet out = PlaneSet::empty();
        for (const auto& poly : array(field(j, "polygons"), "polygons")) {
            Polygon pts;
            for (const auto& v : array(poly, "polygon")) pts.push_back(point(v));
            try {
                out = unite(out, PlaneSet::convex_polygon(std::move(pts)));
            } catch (const config_error&) {
                throw;
            } catch (const error& e) {
                throw config_error(e.what());
            }
        }
        return out;
    }

    Matrix2 matrix(const json& j) const {
        if (!j.is_array() || j.size() != 4) throw config_error("a matrix is [a, b, c, d]");
        return Matrix2(number(j[0]), number(j[1]), number(j[2]), number(j[3]));
    }

    // -- bars and ring sets --------------------------------------------------

    CylinderBar bar(const json& j) const {
        std::map<int, PlaneSet> f;
        const json& factors = field(j, "factors");
        if (!factors.is_object()) throw config_error("factors must map pair index to a plane set");
        for (const auto& [key, v] : factors.items()) f.emplace(index_key(key), plane_set(v));
        return CylinderBar(std::move(f));
    }

    PorousBar porous_bar(const json& j) const {
        std::vector<CylinderBar> holes;
        if (j.contains("holes")) {
            for (const auto& h : array(j["holes"], "holes")) holes.push_back(bar(h));
        }
        return PorousBar(bar(j.contains("base") ? j["base"] : j), std::move(holes));
    }

    /// {"pieces": [porous, ...]} (pairwise disjoint) or {"union": [bar, ...]}.
    RingSet ring_set(const json& j) const {
        if (j.contains("union")) {
            std::vector<CylinderBar> bars;
            for (const auto& b : array(j["union"], "union")) bars.push_back(bar(b));
            return RingSet::union_of(bars);
        }
        if (j.contains("pieces")) {
            std::vector<PorousBar> pieces;
            for (const auto& p : array(j["pieces"], "pieces")) pieces.push_back(porous_bar(p));
            try {
                return RingSet::from_pieces_checked(std::move(pieces));
            } catch (const not_disjoint& e) {
                throw config_error(e.what());
            }
        }
        return RingSet::from_porous(porous_bar(j));
    }

    // -- line sets -----------------------------------------------------------

    IntervalSet intervals(const json& j) const {
        std::vector<Interval> out;
        for (const auto& i : array(j, "interval list")) {
            if (!i.is_array() || i.size() != 2) throw config_error("an interval is [lo, hi]");
            out.push_back({number(i[0]), number(i[1])});
        }
        return IntervalSet::of(std::move(out));
    }

    /// {"period", "pattern", "added", "removed"} or {"period", "pattern", "patch"}
    /// with patch the symmetric difference; {"kind": "full"} or
    /// {"kind": "bounded", "intervals": [...]} are shorthands. Always read exactly.
    EventuallyPeriodicSet periodic_set(const json& j) const {
        if (mode_ == arithmetic_mode::approximate) return Reader().periodic_set(j);
        const std::string kind = j.value("kind", "eventually_periodic");
        if (kind == "full") return EventuallyPeriodicSet::full_line();
        if (kind == "bounded") return EventuallyPeriodicSet::bounded(intervals(field(j, "intervals")));
        if (kind != "eventually_periodic") {
            throw unsupported_set("set kind '" + kind + "' has no classical density");
        }
        const Number period = number(field(j, "period"));
        if (!period.is_exact()) throw config_error("period must be rational");
        if (period <= Number(0)) throw config_error("period must be positive");
        if (j.contains("patch")) {
            if (j.contains("added") || j.contains("removed")) throw config_error("'patch' excludes 'added' and 'removed'");
            return EventuallyPeriodicSet(period, intervals(field(j, "pattern")), intervals(j["patch"]));
        }
        const IntervalSet empty;
        return EventuallyPeriodicSet::with_perturbation(period, intervals(field(j, "pattern")),
                                                        j.contains("added") ? intervals(j["added"]) : empty,
                                                        j.contains("removed") ? intervals(j["removed"]) : empty);
    }

    HyperbolicCell hyperbolic_cell(const json& j) const {
        HyperbolicCell c = HyperbolicCell::tail();
        if (j.contains("radial")) c.radial = intervals(j["radial"]);
        if (j.contains("angle")) c.angle = periodic_set(j["angle"]);
        return c;
    }

    HyperbolicBar hyperbolic_bar(const json& j) const {
        std::map<int, HyperbolicCell> f;
        const json& factors = field(j, "factors");
        if (!factors.is_object()) throw config_error("factors must map pair index to a cell");
        for (const auto& [key, v] : factors.items()) f.emplace(index_key(key), hyperbolic_cell(v));
        return HyperbolicBar(std::move(f));
    }

    HyperbolicRingSet hyperbolic_ring_set(const json& j) const {
        if (j.contains("union")) {
            std::vector<HyperbolicBar> bars;
            for (const auto& b : array(j["union"], "union")) bars.push_back(hyperbolic_bar(b));
            return HyperbolicRingSet::union_of(bars);
        }
        std::vector<HyperbolicBar> holes;
        if (j.contains("holes")) {
            for (const auto& h : array(j["holes"], "holes")) holes.push_back(hyperbolic_bar(h));
        }
        return HyperbolicRingSet::from_porous(HyperbolicPorousBar(hyperbolic_bar(j.contains("base") ? j["base"] : j), holes));
    }

    // -- flows, times, points ------------------------------------------------

    FrequencySeq frequency(const json& j) const {
        const std::string form = field(j, "form").get<std::string>();
        if (form == "finite") {
            std::vector<Number> v;
            for (const auto& x : array(field(j, "values"), "values")) v.push_back(number(x));
            return FrequencySeq::finite(std::move(v));
        }
        if (form == "constant") return FrequencySeq::constant(number(field(j, "c")));
        if (form == "linear") return FrequencySeq::linear(number(field(j, "c")));
        if (form == "geometric") return FrequencySeq::geometric(number(field(j, "c")), number(field(j, "ratio")));
        if (form == "power") return FrequencySeq::power(number(field(j, "c")), number(field(j, "exponent")));
        throw config_error("unknown frequency form '" + form + "'");
    }

    /// "p/q" (plain), {"log": beta, "s": s} for s ln(beta), or
    /// {"angle": [c, sn], "s": s} for s times the angle of (c, sn).
    Time time(const json& j) const {
        if (!j.is_object()) {
            const Number s = number(j);
            return s.is_exact() ? Time::plain(s) : Time::approx(s.to_double());
        }
        const Number s = j.contains("s") ? number(j["s"]) : Number(1);
        try {
            if (j.contains("log")) return Time::log(number(j["log"]), s);
            if (j.contains("angle")) {
                const json& a = j["angle"];
                if (!a.is_array() || a.size() != 2) throw config_error("angle is [cos, sin]");
                return Time::angle(number(a[0]), number(a[1]), s);
            }
        } catch (const config_error&) {
            throw;
        } catch (const error& e) {
            throw config_error(e.what());
        }
        throw config_error("time object needs 'log' or 'angle'");
    }

    std::vector<Time> times(const json& j) const {
        std::vector<Time> out;
        if (j.is_object() && j.contains("from")) {
            const Number from = number(j["from"]);
            const Number to = number(field(j, "to"));
            const Number step = number(field(j, "step"));
            if (step <= Number(0)) throw config_error("time step must be positive");
            for (Number t = from; t <= to; t += step) out.push_back(t.is_exact() ? Time::plain(t) : Time::approx(t.to_double()));
            return out;
        }
        for (const auto& t : array(j, "times")) out.push_back(time(t));
        return out;
    }

    Envelope envelope(const json& j) const {
        const std::string shape = field(j, "shape").get<std::string>();
        Envelope e;
        if (shape == "zero") return Envelope::zero();
        if (shape == "unbounded") return Envelope::unbounded();
        if (shape == "exponential") e.shape = Envelope::Shape::exponential;
        else if (shape == "power") e.shape = Envelope::Shape::power;
        else throw config_error("unknown envelope shape '" + shape + "'");
        e.scale = j.contains("scale") ? real(j["scale"]) : 1.0;
        e.rate = real(field(j, "rate"));
        e.dq = j.contains("dq") ? real(j["dq"]) : 1.0;
        e.dp = j.contains("dp") ? real(j["dp"]) : 0.0;
        e.realized = j.value("realized", true);
        if (e.scale < 0) throw config_error("envelope scale must be nonnegative");
        return e;
    }

    PhasePoint phase_point(const json& j) const {
        std::vector<Mode> head;
        if (j.contains("head")) {
            for (const auto& m : array(j["head"], "head")) {
                const Point p = point(m);
                head.push_back({p.x, p.y});
            }
        }
        return PhasePoint(std::move(head), j.contains("tail") ? envelope(j["tail"]) : Envelope::zero());
    }

    FlowDomain domain(const json& j) const {
        const std::string d = j.value("domain", "extended");
        if (d == "extended") return FlowDomain::extended;
        if (d == "hilbert") return FlowDomain::hilbert;
        throw config_error("unknown flow domain '" + d + "'");
    }

    BlockFlow flow(const json& j) const {
        const std::string kind = field(j, "kind").get<std::string>();
        if (kind == "harmonic") return BlockFlow::harmonic(frequency(field(j, "a")), domain(j));
        if (kind == "hyperbolic") return BlockFlow::hyperbolic(frequency(field(j, "a")), domain(j));
        if (kind == "translation") return BlockFlow::translation(phase_point(field(j, "h")), domain(j));
        if (kind == "custom") {
            std::map<int, Matrix2> blocks;
            const json& b = field(j, "blocks");
            if (!b.is_object()) throw config_error("blocks must map pair index to a matrix");
            for (const auto& [key, v] : b.items()) {
                Matrix2 m = matrix(v);
                if (!m.is_symplectic()) throw config_error("block " + key + " is not symplectic (det != 1)");
                blocks.emplace(index_key(key), std::move(m));
            }
            return BlockFlow::custom(std::move(blocks));
        }
        throw config_error("unknown flow kind '" + kind + "'");
    }

private:
    static Number raw_number(const json& j) {
        if (j.is_string()) return parse_number(j.get<std::string>());
        if (j.is_number_integer()) return Number(j.get<long>());
        if (j.is_number_float()) return Number::approx(j.get<double>());
        throw config_error("expected a number or a \"p/q\" string, got " + j.dump());
    }

    arithmetic_mode mode_;
};

// -- writing ------------------------------------------------------------------

inline json to_json(const Number& n) { return n.str(); }

inline json to_json(const PlaneSet& s) {
    json polys = json::array();
    for (const auto& poly : s.polygons()) {
        json p = json::array();
        for (const auto& v : poly) p.push_back({to_json(v.x), to_json(v.y)});
        polys.push_back(std::move(p));
    }
    return {{"polygons", std::move(polys)}, {"mode", s.is_exact() ? "exact" : "float"}};
}

inline json to_json(const CylinderBar& b) {
    json f = json::object();
    for (const auto& [k, s] : b.active()) f[std::to_string(k)] = to_json(s);
    return {{"factors", std::move(f)}};
}

inline json to_json(const RingSet& r) {
    json pieces = json::array();
    for (const auto& p : r.pieces()) {
        json holes = json::array();
        for (const auto& h : p.holes()) holes.push_back(to_json(h));
        pieces.push_back({{"base", to_json(p.base())}, {"holes", std::move(holes)}});
    }
    return {{"pieces", std::move(pieces)}};
}

inline json to_json(const IntervalSet& s) {
    json out = json::array();
    for (const auto& i : s.pieces()) out.push_back({to_json(i.lo), to_json(i.hi)});
    return out;
}

inline json to_json(const EventuallyPeriodicSet& s) {
    return {{"period", to_json(s.period())}, {"pattern", to_json(s.pattern())}, {"patch", to_json(s.patch())}};
}

} // namespace symlab::io
