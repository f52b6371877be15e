#pragma once

// Product measure on hyperbolic blocks in action-angle coordinates (r_k, phi_k):
// a block constrains each pair to A_k x B_k with A_k a finite union of radial
// intervals and B_k an eventually periodic angle set. The factor measure is
// density(B_k) * int_{A_k} |r| dr; the default cell [-1, 1] x R has measure 1.

#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "symlab/banach_limit.hpp"
#include "symlab/error.hpp"
#include "symlab/flows.hpp"
#include "symlab/interval_set.hpp"
#include "symlab/number.hpp"
#include "symlab/ring.hpp"

namespace symlab {

using RadialSet = IntervalSet;

/// int_A |r| dr = sum over pieces [l, u] of (|u| u - |l| l) / 2.
inline Number radial_weight(const RadialSet& a) {
    Number w(0);
    for (const auto& i : a.pieces()) w += (abs(i.hi) * i.hi - abs(i.lo) * i.lo) / Number(2);
    return w;
}

struct HyperbolicCell {
    RadialSet radial;
    EventuallyPeriodicSet angle;

    /// The default cell [-1, 1] x R.
    static HyperbolicCell tail() {
        return {RadialSet::single(Number(-1), Number(1)), EventuallyPeriodicSet::full_line()};
    }

    Number measure() const {
        if (radial.is_empty()) return Number(0);
        return angle.density() * radial_weight(radial);
    }
};

namespace detail {
inline HyperbolicCell intersect_cells(const HyperbolicCell& a, const HyperbolicCell& b) {
    return {intersect(a.radial, b.radial), intersect(a.angle, b.angle)};
}
} // namespace detail

struct HyperbolicFactor {
    using factor_type = HyperbolicCell;
    static HyperbolicCell tail() { return HyperbolicCell::tail(); }
    static HyperbolicCell intersect(const HyperbolicCell& a, const HyperbolicCell& b) {
        return detail::intersect_cells(a, b);
    }
    static Number measure(const HyperbolicCell& c) { return c.measure(); }
};

using HyperbolicBar = BasicBar<HyperbolicFactor>;
using HyperbolicPorousBar = BasicPorousBar<HyperbolicFactor>;
using HyperbolicRingSet = BasicRingSet<HyperbolicFactor>;

inline Number hyper_bar_measure(const HyperbolicBar& b) { return b.measure(); }

inline Number hyper_ring_measure(const HyperbolicRingSet& r, std::size_t hole_limit = kDefaultHoleLimit) {
    return r.measure(hole_limit);
}

/// The angle shift a_k t; exact when t is a plain rational multiple.
inline Number angle_shift(const FrequencySeq& a, int k, const Time& t) {
    const Number ak = a(k);
    if (t.is_zero() || ak.is_zero()) return Number(0);
    if (t.unit() == Time::Unit::plain) return ak * t.multiplier();
    return Number::approx(ak.to_double() * t.value());
}

/// Image under the hyperbolic flow in action-angle form, phi_k -> phi_k + a_k t.
/// The default cell has B = R, so only active indices move.
inline HyperbolicRingSet hyper_pushforward(const HyperbolicRingSet& r, const FrequencySeq& a, const Time& t) {
    return r.transformed([&](int k, const HyperbolicCell& c) {
        const Number h = angle_shift(a, k, t);
        if (h.is_zero()) return c;
        return HyperbolicCell{c.radial, translate_set(c.angle, h)};
    });
}

/// Bar confining pair k to the degeneracy line r_k = 0.
inline HyperbolicBar degenerate_line_bar(int k) {
    return HyperbolicBar().with_factor(k, {RadialSet::single(Number(0), Number(0)), EventuallyPeriodicSet::full_line()});
}

/// Measure of the degeneracy line of pair k; zero.
inline Number degenerate_projection_measure(int k) { return hyper_bar_measure(degenerate_line_bar(k)); }

/// Lebesgue area of the chart image {(r ch phi, r sh phi) : r in A, phi in [phi_lo, phi_hi)},
/// using the Jacobian |r|.
inline Number chart_box_area(const RadialSet& a, const Number& phi_lo, const Number& phi_hi) {
    if (!(phi_lo < phi_hi)) return Number(0);
    return radial_weight(a) * (phi_hi - phi_lo);
}

} // namespace symlab
