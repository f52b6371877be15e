#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "symlab/error.hpp"
#include "symlab/number.hpp"

namespace symlab {

struct Interval {
    Number lo;
    Number hi;

    Number length() const { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of bounded intervals on the line, stored as sorted, pairwise
/// disjoint, non-touching [lo, hi) pieces of positive length. Endpoint
/// membership is not tracked.
class IntervalSet {
public:
    IntervalSet() = default;

    static IntervalSet of(std::vector<Interval> pieces) {
        IntervalSet s;
        s.pieces_ = std::move(pieces);
        s.normalize();
        return s;
    }

    static IntervalSet single(const Number& lo, const Number& hi) { return of({{lo, hi}}); }

    const std::vector<Interval>& pieces() const { return pieces_; }
    bool is_empty() const { return pieces_.empty(); }

    bool is_exact() const {
        return std::all_of(pieces_.begin(), pieces_.end(),
                           [](const Interval& i) { return i.lo.is_exact() && i.hi.is_exact(); });
    }

    Number measure() const {
        Number total(0);
        for (const auto& i : pieces_) total += i.length();
        return total;
    }

    std::optional<Interval> hull() const {
        if (pieces_.empty()) return std::nullopt;
        return Interval{pieces_.front().lo, pieces_.back().hi};
    }

    bool contains(const Number& x) const {
        for (const auto& i : pieces_) {
            if (i.lo <= x && x < i.hi) return true;
        }
        return false;
    }

    IntervalSet shifted(const Number& h) const {
        IntervalSet s;
        s.pieces_.reserve(pieces_.size());
        for (const auto& i : pieces_) s.pieces_.push_back({i.lo + h, i.hi + h});
        return s;
    }

    IntervalSet clipped(const Number& lo, const Number& hi) const { return intersect(*this, single(lo, hi)); }

    friend IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
        std::vector<Interval> all = a.pieces_;
        all.insert(all.end(), b.pieces_.begin(), b.pieces_.end());
        return of(std::move(all));
    }

    friend IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
        IntervalSet out;
        std::size_t i = 0, j = 0;
        while (i < a.pieces_.size() && j < b.pieces_.size()) {
            const Interval& x = a.pieces_[i];
            const Interval& y = b.pieces_[j];
            Number lo = max(x.lo, y.lo);
            Number hi = min(x.hi, y.hi);
            if (lo < hi) out.pieces_.push_back({std::move(lo), std::move(hi)});
            if (x.hi < y.hi) ++i; else ++j;
        }
        return out;
    }

    friend IntervalSet subtract(const IntervalSet& a, const IntervalSet& b) {
        IntervalSet out;
        std::size_t j = 0;
        for (const auto& x : a.pieces_) {
            Number cur = x.lo;
            while (j < b.pieces_.size() && b.pieces_[j].hi <= cur) ++j;
            std::size_t k = j;
            while (k < b.pieces_.size() && b.pieces_[k].lo < x.hi) {
                if (cur < b.pieces_[k].lo) out.pieces_.push_back({cur, b.pieces_[k].lo});
                cur = max(cur, b.pieces_[k].hi);
                ++k;
            }
            if (cur < x.hi) out.pieces_.push_back({cur, x.hi});
        }
        return out;
    }

    friend IntervalSet symmetric_difference(const IntervalSet& a, const IntervalSet& b) {
        return unite(subtract(a, b), subtract(b, a));
    }

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    void normalize() {
        std::erase_if(pieces_, [](const Interval& i) { return !(i.lo < i.hi); });
        std::sort(pieces_.begin(), pieces_.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
        std::vector<Interval> merged;
        for (auto& i : pieces_) {
            if (!merged.empty() && i.lo <= merged.back().hi) {
                if (merged.back().hi < i.hi) merged.back().hi = i.hi;
            } else {
                merged.push_back(std::move(i));
            }
        }
        pieces_ = std::move(merged);
    }

    std::vector<Interval> pieces_;
};

} // namespace symlab
