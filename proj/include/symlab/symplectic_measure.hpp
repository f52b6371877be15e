#pragma once

// The translation- and symplectomorphism-invariant finitely additive measure
// on cylinder bars: a bar constrains each canonical pair (q_k, p_k) to a plane
// set B_k and has measure prod_k area(B_k). Inactive indices carry the unit
// cell [0,1)^2, so every concrete bar has finitely many nontrivial factors.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "symlab/error.hpp"
#include "symlab/flows.hpp"
#include "symlab/geometry2d.hpp"
#include "symlab/number.hpp"
#include "symlab/ring.hpp"

namespace symlab {

struct PlaneFactor {
    using factor_type = PlaneSet;
    static PlaneSet tail() { return PlaneSet::unit_cell(); }
    static PlaneSet intersect(const PlaneSet& a, const PlaneSet& b) { return symlab::intersect(a, b); }
    static Number measure(const PlaneSet& s) { return s.area(); }
};

using CylinderBar = BasicBar<PlaneFactor>;
using PorousBar = BasicPorousBar<PlaneFactor>;
using RingSet = BasicRingSet<PlaneFactor>;

inline Number bar_measure(const CylinderBar& b) { return b.measure(); }

/// Empty iff some active factor is the empty plane set.
inline bool is_empty(const CylinderBar& b) {
    for (const auto& [k, f] : b.active()) {
        if (f.is_empty()) return true;
    }
    return false;
}

inline Number ring_measure(const RingSet& r, std::size_t hole_limit = kDefaultHoleLimit) { return r.measure(hole_limit); }

/// Translation by a vector with finitely many nonzero plane components.
inline RingSet translate_ringset(const RingSet& r, const std::map<int, Vec2>& shift) {
    std::vector<int> extra;
    for (const auto& [k, v] : shift) {
        if (!v.x.is_zero() || !v.y.is_zero()) extra.push_back(k);
    }
    return r.transformed(
        [&](int k, const PlaneSet& f) {
            auto it = shift.find(k);
            return it == shift.end() ? f : translate(f, it->second);
        },
        extra);
}

/// Image of r under the time-t map of a block flow. Every index where the map
/// is nontrivial must already be active in r; otherwise the unit-cell tail
/// would not be preserved and tail_not_preserved is raised.
inline RingSet pushforward(const RingSet& r, const BlockFlow& flow, const Time& t) {
    const auto moving = flow.nontrivial_indices(t);
    if (!moving) {
        throw tail_not_preserved("flow acts nontrivially on infinitely many pair-indices at t = " + t.str());
    }
    for (const auto& piece : r.pieces()) {
        auto check = [&](const CylinderBar& b) {
            for (int k : *moving) {
                if (!b.active().contains(k)) {
                    throw tail_not_preserved("flow moves the unit-cell tail at inactive index " + std::to_string(k) +
                                             "; activate it explicitly");
                }
            }
        };
        check(piece.base());
        for (const auto& h : piece.holes()) check(h);
    }
    return r.transformed([&](int k, const PlaneSet& f) {
        const AffineBlock blk = flow.block(k, t);
        if (blk.is_identity()) return f;
        return translate(linear_image(f, blk.linear), blk.offset);
    });
}

/// Activates index k with the unit cell in every bar of r; the point set is
/// unchanged.
inline RingSet activate(const RingSet& r, const std::vector<int>& indices) {
    return r.transformed([](int, const PlaneSet& f) { return f; }, indices);
}

// ---------------------------------------------------------------------------
// Admissibility of infinite tails: sum_k ln+ s_k < inf, with s_k = area(B_k)

struct TailAreaProfile {
    struct Constant { double c; };                 // s_k = c
    struct Geometric { double c; double ratio; };  // s_k = c ratio^k
    struct Power { double c; double sigma; };      // s_k = c k^-sigma
    struct LogPower { double c; double sigma; };   // ln s_k = c k^-sigma
    std::variant<Constant, Geometric, Power, LogPower> form;

    double area(int k) const {
        return std::visit([k](const auto& f) -> double {
            using F = std::decay_t<decltype(f)>;
            if constexpr (std::is_same_v<F, Constant>) return f.c;
            else if constexpr (std::is_same_v<F, Geometric>) return f.c * std::pow(f.ratio, k);
            else if constexpr (std::is_same_v<F, Power>) return f.c * std::pow(double(k), -f.sigma);
            else return std::exp(f.c * std::pow(double(k), -f.sigma));
        }, form);
    }
};

enum class Admissibility { positive_product, zero_product, inadmissible };

struct AdmissibilityReport {
    Admissibility status;
    std::optional<double> product;  // infinite product value when admissible

    std::string label() const {
        switch (status) {
            case Admissibility::positive_product: return "admissible-with-positive-product";
            case Admissibility::zero_product: return "admissible-with-zero-product";
            case Admissibility::inadmissible: return "inadmissible";
        }
        return {};
    }
};

/// Closed-form series tests: admissible iff sum ln+ s_k converges; the product
/// is positive iff additionally sum |ln s_k| converges.
inline AdmissibilityReport admissibility(const TailAreaProfile& profile) {
    using R = AdmissibilityReport;
    return std::visit([](const auto& f) -> R {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, TailAreaProfile::Constant>) {
            if (f.c > 1) return {Admissibility::inadmissible, std::nullopt};
            if (f.c == 1) return {Admissibility::positive_product, 1.0};
            return {Admissibility::zero_product, 0.0};
        } else if constexpr (std::is_same_v<F, TailAreaProfile::Geometric>) {
            if (f.c <= 0) return {Admissibility::zero_product, 0.0};
            if (f.ratio > 1) return {Admissibility::inadmissible, std::nullopt};
            if (f.ratio == 1) {
                if (f.c > 1) return {Admissibility::inadmissible, std::nullopt};
                return f.c == 1 ? R{Admissibility::positive_product, 1.0} : R{Admissibility::zero_product, 0.0};
            }
            return {Admissibility::zero_product, 0.0};
        } else if constexpr (std::is_same_v<F, TailAreaProfile::Power>) {
            if (f.c <= 0) return {Admissibility::zero_product, 0.0};
            if (f.sigma < 0) return {Admissibility::inadmissible, std::nullopt};
            if (f.sigma == 0) {
                if (f.c > 1) return {Admissibility::inadmissible, std::nullopt};
                return f.c == 1 ? R{Admissibility::positive_product, 1.0} : R{Admissibility::zero_product, 0.0};
            }
            return {Admissibility::zero_product, 0.0};
        } else {
            if (f.c == 0) return {Admissibility::positive_product, 1.0};
            if (f.sigma > 1) return {Admissibility::positive_product, std::exp(f.c * std::riemann_zeta(f.sigma))};
            if (f.c > 0) return {Admissibility::inadmissible, std::nullopt};
            return {Admissibility::zero_product, 0.0};
        }
    }, profile.form);
}

} // namespace symlab
