#pragma once

// Cylinder bars, porous bars and the ring they generate, parameterized over
// the per-index factor type.
//
// A bar is a product over pair-indices k = 1, 2, ... of factor sets, with all
// but finitely many factors equal to a fixed tail cell of measure one. The
// product measure of a bar is therefore a finite product. A porous bar is a
// bar minus finitely many bars; a ring set is a finite disjoint union of
// porous bars. All set relations hold modulo null sets.
//
// FactorTraits must provide:
//   using factor_type;
//   static factor_type tail();
//   static factor_type intersect(const factor_type&, const factor_type&);
//   static Number measure(const factor_type&);

#include <concepts>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "symlab/error.hpp"
#include "symlab/number.hpp"

namespace symlab {

template <class T>
concept FactorTraits = requires(const typename T::factor_type& f) {
    { T::tail() } -> std::convertible_to<typename T::factor_type>;
    { T::intersect(f, f) } -> std::convertible_to<typename T::factor_type>;
    { T::measure(f) } -> std::convertible_to<Number>;
};

/// Hole count above which inclusion-exclusion refuses to run.
inline constexpr std::size_t kDefaultHoleLimit = 12;

template <FactorTraits Traits>
class BasicBar {
public:
    using factor_type = typename Traits::factor_type;

    BasicBar() = default;
    explicit BasicBar(std::map<int, factor_type> active) : active_(std::move(active)) {
        for (const auto& [k, f] : active_) {
            if (k < 1) throw error("pair indices are 1-based, got " + std::to_string(k));
        }
    }

    /// The whole space: every factor is the tail cell.
    static BasicBar full() { return {}; }

    const std::map<int, factor_type>& active() const { return active_; }

    const factor_type& factor(int k) const {
        static const factor_type tail_cell = Traits::tail();
        auto it = active_.find(k);
        return it == active_.end() ? tail_cell : it->second;
    }

    BasicBar with_factor(int k, factor_type f) const {
        BasicBar b = *this;
        if (k < 1) throw error("pair indices are 1-based, got " + std::to_string(k));
        b.active_[k] = std::move(f);
        return b;
    }

    /// Product of the active factor measures; the empty product is 1.
    Number measure() const {
        Number m(1);
        for (const auto& [k, f] : active_) {
            m *= Traits::measure(f);
            if (m.is_zero()) return Number(0);
        }
        return m;
    }

    bool is_null() const { return measure().is_zero(); }

    /// Applies `map(k, factor)` to every active index and to each index in
    /// `extra` (whose factor starts as the tail cell).
    template <class Fn>
    BasicBar transformed(Fn&& map, const std::vector<int>& extra = {}) const {
        std::map<int, factor_type> out;
        for (const auto& [k, f] : active_) out.emplace(k, map(k, f));
        for (int k : extra) {
            if (!out.contains(k)) out.emplace(k, map(k, Traits::tail()));
        }
        return BasicBar(std::move(out));
    }

private:
    std::map<int, factor_type> active_;
};

/// Per-index intersection; an inactive index meets the other bar's factor
/// intersected with the tail cell.
template <FactorTraits Traits>
BasicBar<Traits> intersect_bars(const BasicBar<Traits>& a, const BasicBar<Traits>& b) {
    using factor_type = typename Traits::factor_type;
    std::map<int, factor_type> out;
    std::set<int> keys;
    for (const auto& [k, f] : a.active()) keys.insert(k);
    for (const auto& [k, f] : b.active()) keys.insert(k);
    for (int k : keys) out.emplace(k, Traits::intersect(a.factor(k), b.factor(k)));
    return BasicBar<Traits>(std::move(out));
}

namespace detail {

/// Measure of a union of bars by inclusion-exclusion, pruning every branch
/// whose running intersection is null.
template <FactorTraits Traits>
void union_measure_dfs(const std::vector<BasicBar<Traits>>& bars, std::size_t start,
                       const BasicBar<Traits>& running, int depth, Number& acc) {
    for (std::size_t j = start; j < bars.size(); ++j) {
        BasicBar<Traits> next = depth == 0 ? bars[j] : intersect_bars(running, bars[j]);
        const Number m = next.measure();
        if (m.is_zero()) continue;
        if (depth % 2 == 0) acc += m; else acc -= m;
        union_measure_dfs(bars, j + 1, next, depth + 1, acc);
    }
}

} // namespace detail

template <FactorTraits Traits>
Number union_measure(const std::vector<BasicBar<Traits>>& bars, std::size_t hole_limit = kDefaultHoleLimit) {
    if (bars.size() > hole_limit) {
        throw hole_limit_exceeded("inclusion-exclusion over " + std::to_string(bars.size()) +
                                  " bars exceeds the limit of " + std::to_string(hole_limit));
    }
    Number acc(0);
    detail::union_measure_dfs(bars, 0, BasicBar<Traits>::full(), 0, acc);
    return acc;
}

template <FactorTraits Traits>
class BasicPorousBar {
public:
    using bar_type = BasicBar<Traits>;

    BasicPorousBar() = default;
    explicit BasicPorousBar(bar_type base, std::vector<bar_type> holes = {}) : base_(std::move(base)) {
        for (auto& h : holes) add_hole(std::move(h));
    }

    const bar_type& base() const { return base_; }
    const std::vector<bar_type>& holes() const { return holes_; }

    /// Base measure minus the measure of the union of holes.
    Number measure(std::size_t hole_limit = kDefaultHoleLimit) const {
        const Number b = base_.measure();
        if (b.is_zero() || holes_.empty()) return b;
        return b - union_measure(holes_, hole_limit);
    }

    bool base_is_null() const { return base_.is_null(); }

    BasicPorousBar with_hole(bar_type h) const {
        BasicPorousBar p = *this;
        p.add_hole(std::move(h));
        return p;
    }

    template <class Fn>
    BasicPorousBar transformed(Fn&& map, const std::vector<int>& extra = {}) const {
        BasicPorousBar p;
        p.base_ = base_.transformed(map, extra);
        for (const auto& h : holes_) p.holes_.push_back(h.transformed(map, extra));
        return p;
    }

private:
    /// Holes are clipped to the base; null holes are dropped.
    void add_hole(bar_type h) {
        bar_type clipped = intersect_bars(base_, h);
        if (!clipped.is_null()) holes_.push_back(std::move(clipped));
    }

    bar_type base_;
    std::vector<bar_type> holes_;
};

/// (P \ H) n (Q \ K) = (P n Q) \ (H u K).
template <FactorTraits Traits>
BasicPorousBar<Traits> intersect_porous(const BasicPorousBar<Traits>& a, const BasicPorousBar<Traits>& b) {
    BasicPorousBar<Traits> out(intersect_bars(a.base(), b.base()));
    for (const auto& h : a.holes()) out = out.with_hole(h);
    for (const auto& h : b.holes()) out = out.with_hole(h);
    return out;
}

/// (P \ H) \ (Q \ K) as disjoint porous bars:
///   P \ (H u Q)  and, for each j,  (P n Q n K_j) \ (H u K_1 u ... u K_{j-1}).
template <FactorTraits Traits>
std::vector<BasicPorousBar<Traits>> subtract_porous(const BasicPorousBar<Traits>& a, const BasicPorousBar<Traits>& b) {
    using porous = BasicPorousBar<Traits>;
    std::vector<porous> out;
    const auto pq = intersect_bars(a.base(), b.base());
    if (pq.is_null()) return {a};
    out.push_back(a.with_hole(b.base()));
    for (std::size_t j = 0; j < b.holes().size(); ++j) {
        porous piece(intersect_bars(pq, b.holes()[j]));
        if (piece.base_is_null()) continue;
        for (const auto& h : a.holes()) piece = piece.with_hole(h);
        for (std::size_t i = 0; i < j; ++i) piece = piece.with_hole(b.holes()[i]);
        out.push_back(std::move(piece));
    }
    std::erase_if(out, [](const porous& p) { return p.base_is_null(); });
    return out;
}

template <FactorTraits Traits>
class BasicRingSet {
public:
    using bar_type = BasicBar<Traits>;
    using porous_type = BasicPorousBar<Traits>;

    BasicRingSet() = default;

    static BasicRingSet empty() { return {}; }

    static BasicRingSet from_bar(bar_type b) {
        BasicRingSet r;
        r.push(porous_type(std::move(b)));
        return r;
    }

    static BasicRingSet from_porous(porous_type p) {
        BasicRingSet r;
        r.push(std::move(p));
        return r;
    }

    /// Pieces the caller asserts are pairwise disjoint. Use
    /// `from_pieces_checked` to certify that claim.
    static BasicRingSet from_pieces(std::vector<porous_type> pieces) {
        BasicRingSet r;
        for (auto& p : pieces) r.push(std::move(p));
        return r;
    }

    /// Throws not_disjoint unless every pairwise intersection is null.
    static BasicRingSet from_pieces_checked(std::vector<porous_type> pieces) {
        BasicRingSet r = from_pieces(std::move(pieces));
        if (!r.pieces_are_disjoint()) throw not_disjoint("ring set pieces overlap in positive measure");
        return r;
    }

    /// Union of arbitrary, possibly overlapping bars.
    static BasicRingSet union_of(const std::vector<bar_type>& bars) {
        BasicRingSet r;
        for (const auto& b : bars) r = unite(r, from_bar(b));
        return r;
    }

    const std::vector<porous_type>& pieces() const { return pieces_; }
    bool has_pieces() const { return !pieces_.empty(); }

    Number measure(std::size_t hole_limit = kDefaultHoleLimit) const {
        Number m(0);
        for (const auto& p : pieces_) m += p.measure(hole_limit);
        return m;
    }

    bool pieces_are_disjoint() const {
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
                if (!intersect_porous(pieces_[i], pieces_[j]).measure().is_zero()) return false;
            }
        }
        return true;
    }

    template <class Fn>
    BasicRingSet transformed(Fn&& map, const std::vector<int>& extra = {}) const {
        BasicRingSet r;
        for (const auto& p : pieces_) r.push(p.transformed(map, extra));
        return r;
    }

    /// Indices active in any base or hole.
    std::set<int> active_indices() const {
        std::set<int> out;
        for (const auto& p : pieces_) {
            for (const auto& [k, f] : p.base().active()) out.insert(k);
            for (const auto& h : p.holes()) {
                for (const auto& [k, f] : h.active()) out.insert(k);
            }
        }
        return out;
    }

    friend BasicRingSet intersect(const BasicRingSet& a, const BasicRingSet& b) {
        BasicRingSet r;
        for (const auto& p : a.pieces_) {
            for (const auto& q : b.pieces_) r.push(intersect_porous(p, q));
        }
        return r;
    }

    friend BasicRingSet subtract(const BasicRingSet& a, const BasicRingSet& b) {
        BasicRingSet r;
        for (const auto& p : a.pieces_) {
            std::vector<porous_type> rest{p};
            for (const auto& q : b.pieces_) {
                std::vector<porous_type> next;
                for (const auto& x : rest) {
                    for (auto& y : subtract_porous(x, q)) next.push_back(std::move(y));
                }
                rest = std::move(next);
                if (rest.empty()) break;
            }
            for (auto& x : rest) r.push(std::move(x));
        }
        return r;
    }

    friend BasicRingSet unite(const BasicRingSet& a, const BasicRingSet& b) {
        BasicRingSet r = a;
        for (auto& p : subtract(b, a).pieces_) r.push(std::move(p));
        return r;
    }

    /// Disjoint union: pieces of b appended without subtraction. The caller
    /// asserts a and b are disjoint.
    friend BasicRingSet disjoint_union(const BasicRingSet& a, const BasicRingSet& b) {
        BasicRingSet r = a;
        for (const auto& p : b.pieces_) r.push(p);
        return r;
    }

private:
    void push(porous_type p) {
        if (!p.base_is_null()) pieces_.push_back(std::move(p));
    }

    std::vector<porous_type> pieces_;
};

/// Measure of the symmetric difference; zero iff a and b agree modulo null sets.
template <FactorTraits Traits>
Number symmetric_difference_measure(const BasicRingSet<Traits>& a, const BasicRingSet<Traits>& b) {
    return subtract(a, b).measure() + subtract(b, a).measure();
}

} // namespace symlab
