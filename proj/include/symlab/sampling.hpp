#pragma once

// Seeded generators for randomized checks. Coordinates lie on a 1/8 grid so
// that rasterized reference computations at resolution 1/64 are exact.

#include <map>
#include <random>
#include <vector>

#include "symlab/banach_limit.hpp"
#include "symlab/geometry2d.hpp"
#include "symlab/hyperbolic_measure.hpp"
#include "symlab/number.hpp"
#include "symlab/symplectic_measure.hpp"

namespace symlab::sampling {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Number grid(Rng& rng, int lo, int hi, int den = 8) { return Number::ratio(uniform_int(rng, lo, hi), den); }

/// Rectangle with corners on the 1/8 grid inside [-1, 2]^2.
inline PlaneSet rectangle(Rng& rng) {
    const int x0 = uniform_int(rng, -8, 14);
    const int y0 = uniform_int(rng, -8, 14);
    const int x1 = uniform_int(rng, x0 + 1, 16);
    const int y1 = uniform_int(rng, y0 + 1, 16);
    return PlaneSet::rectangle(Number::ratio(x0, 8), Number::ratio(y0, 8), Number::ratio(x1, 8), Number::ratio(y1, 8));
}

/// Union of one or two grid rectangles.
inline PlaneSet plane_set(Rng& rng) {
    PlaneSet s = rectangle(rng);
    if (uniform_int(rng, 0, 1) == 1) s = unite(s, rectangle(rng));
    return s;
}

/// Triangle or quadrilateral with vertices on the 1/8 grid.
inline PlaneSet convex_polygon(Rng& rng) {
    for (;;) {
        Polygon pts;
        const int n = uniform_int(rng, 3, 4);
        for (int i = 0; i < n; ++i) pts.push_back({grid(rng, -8, 16), grid(rng, -8, 16)});
        try {
            PlaneSet s = PlaneSet::convex_polygon(pts);
            if (!s.area().is_zero()) return s;
        } catch (const error&) {
        }
    }
}

/// Bar with between one and `max_indices` active indices among 1..max_indices.
inline CylinderBar bar(Rng& rng, int max_indices = 4, bool polygons = false) {
    std::map<int, PlaneSet> f;
    const int count = uniform_int(rng, 1, max_indices);
    while (static_cast<int>(f.size()) < count) {
        const int k = uniform_int(rng, 1, max_indices);
        if (!f.contains(k)) f.emplace(k, polygons ? convex_polygon(rng) : plane_set(rng));
    }
    return CylinderBar(std::move(f));
}

inline PorousBar porous_bar(Rng& rng, int max_indices = 4, int max_holes = 3) {
    PorousBar p(bar(rng, max_indices));
    const int holes = uniform_int(rng, 0, max_holes);
    for (int i = 0; i < holes; ++i) p = p.with_hole(bar(rng, max_indices));
    return p;
}

/// Union of one or two porous bars.
inline RingSet ring_set(Rng& rng, int max_indices = 4, int max_holes = 3) {
    RingSet r = RingSet::from_porous(porous_bar(rng, max_indices, max_holes));
    if (uniform_int(rng, 0, 1) == 1) r = unite(r, RingSet::from_porous(porous_bar(rng, max_indices, 1)));
    return r;
}

/// Rational in [-range, range] with denominator up to `max_den`.
inline Number rational(Rng& rng, int range = 4, int max_den = 12) {
    const int den = uniform_int(rng, 1, max_den);
    return Number::ratio(uniform_int(rng, -range * den, range * den), den);
}

/// Period in {1/2, 1, 3/2, 2, 3}, pattern of up to three grid intervals, and
/// an optional bounded perturbation.
inline EventuallyPeriodicSet periodic_set(Rng& rng, bool perturb = true) {
    static const int periods_in_eighths[] = {4, 8, 12, 16, 24};
    const int l8 = periods_in_eighths[uniform_int(rng, 0, 4)];
    std::vector<Interval> pattern;
    const int pieces = uniform_int(rng, 1, 3);
    for (int i = 0; i < pieces; ++i) {
        const int a = uniform_int(rng, 0, l8 - 1);
        const int b = uniform_int(rng, a + 1, l8);
        pattern.push_back({Number::ratio(a, 8), Number::ratio(b, 8)});
    }
    IntervalSet added, removed;
    if (perturb && uniform_int(rng, 0, 1) == 1) {
        const int a = uniform_int(rng, -40, 40);
        added = IntervalSet::single(Number::ratio(a, 8), Number::ratio(a + uniform_int(rng, 1, 24), 8));
        const int c = uniform_int(rng, -40, 40);
        removed = IntervalSet::single(Number::ratio(c, 8), Number::ratio(c + uniform_int(rng, 1, 24), 8));
    }
    return EventuallyPeriodicSet::with_perturbation(Number::ratio(l8, 8), IntervalSet::of(pattern), added, removed);
}

inline RadialSet radial_set(Rng& rng) {
    std::vector<Interval> out;
    const int pieces = uniform_int(rng, 1, 2);
    for (int i = 0; i < pieces; ++i) {
        const int a = uniform_int(rng, -16, 15);
        out.push_back({Number::ratio(a, 8), Number::ratio(uniform_int(rng, a + 1, 16), 8)});
    }
    return IntervalSet::of(out);
}

inline HyperbolicBar hyperbolic_bar(Rng& rng, int max_indices = 3) {
    std::map<int, HyperbolicCell> f;
    const int count = uniform_int(rng, 1, max_indices);
    while (static_cast<int>(f.size()) < count) {
        const int k = uniform_int(rng, 1, max_indices);
        if (!f.contains(k)) f.emplace(k, HyperbolicCell{radial_set(rng), periodic_set(rng)});
    }
    return HyperbolicBar(std::move(f));
}

inline HyperbolicRingSet hyperbolic_ring_set(Rng& rng, int max_indices = 3, int max_holes = 2) {
    HyperbolicPorousBar p(hyperbolic_bar(rng, max_indices));
    const int holes = uniform_int(rng, 0, max_holes);
    for (int i = 0; i < holes; ++i) p = p.with_hole(hyperbolic_bar(rng, max_indices));
    return HyperbolicRingSet::from_porous(std::move(p));
}

} // namespace symlab::sampling
