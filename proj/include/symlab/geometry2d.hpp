#pragma once

// Exact planar set algebra on finite unions of convex polygons.
//
// A PlaneSet is kept in normalized form: counterclockwise convex polygons with
// pairwise disjoint interiors and positive area. Boundaries are not tracked;
// every predicate here holds modulo null sets.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "symlab/error.hpp"
#include "symlab/number.hpp"

namespace symlab {

struct Point {
    Number x;
    Number y;

    friend Point operator+(const Point& a, const Point& b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(const Point& a, const Point& b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(const Number& s, const Point& p) { return {s * p.x, s * p.y}; }
    friend bool operator==(const Point&, const Point&) = default;

    bool is_exact() const { return x.is_exact() && y.is_exact(); }
};

using Vec2 = Point;

inline Number cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// 2x2 real matrix acting on column vectors (q, p).
class Matrix2 {
public:
    Matrix2() : Matrix2(Number(1), Number(0), Number(0), Number(1)) {}
    Matrix2(Number a, Number b, Number c, Number d)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), det_(a_ * d_ - b_ * c_) {}

    static Matrix2 identity() { return {}; }
    /// [[c, -s], [s, c]]
    static Matrix2 rotation(const Number& c, const Number& s) { return {c, -s, s, c}; }
    /// [[ch, sh], [sh, ch]]
    static Matrix2 hyperbolic(const Number& ch, const Number& sh) { return {ch, sh, sh, ch}; }
    /// [[1, k], [0, 1]]
    static Matrix2 shear(const Number& k) { return {Number(1), k, Number(0), Number(1)}; }

    const Number& a() const { return a_; }
    const Number& b() const { return b_; }
    const Number& c() const { return c_; }
    const Number& d() const { return d_; }
    const Number& det() const { return det_; }

    bool is_exact() const { return a_.is_exact() && b_.is_exact() && c_.is_exact() && d_.is_exact(); }

    bool is_symplectic() const {
        if (is_exact()) return det_ == Number(1);
        return std::abs(det_.to_double() - 1.0) <= 1e-12;
    }

    bool is_identity() const {
        return a_ == Number(1) && b_.is_zero() && c_.is_zero() && d_ == Number(1);
    }

    Point apply(const Point& v) const { return {a_ * v.x + b_ * v.y, c_ * v.x + d_ * v.y}; }

    Matrix2 inverse() const {
        if (det_.is_zero()) throw singular_matrix();
        return {d_ / det_, -b_ / det_, -c_ / det_, a_ / det_};
    }

    friend Matrix2 operator*(const Matrix2& m, const Matrix2& n) {
        return {m.a_ * n.a_ + m.b_ * n.c_, m.a_ * n.b_ + m.b_ * n.d_,
                m.c_ * n.a_ + m.d_ * n.c_, m.c_ * n.b_ + m.d_ * n.d_};
    }

    friend bool operator==(const Matrix2& m, const Matrix2& n) {
        return m.a_ == n.a_ && m.b_ == n.b_ && m.c_ == n.c_ && m.d_ == n.d_;
    }

private:
    Number a_, b_, c_, d_;
    Number det_;
};

/// Largest absolute entry difference; used for floating-mode comparisons.
inline double max_abs_diff(const Matrix2& m, const Matrix2& n) {
    return std::max({std::abs((m.a() - n.a()).to_double()), std::abs((m.b() - n.b()).to_double()),
                     std::abs((m.c() - n.c()).to_double()), std::abs((m.d() - n.d()).to_double())});
}

using Polygon = std::vector<Point>;

namespace detail {

inline Number signed_area2(const Polygon& poly) {
    Number twice(0);
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        twice += p.x * q.y - q.x * p.y;
    }
    return twice;
}

inline bool polygon_is_exact(const Polygon& poly) {
    return std::all_of(poly.begin(), poly.end(), [](const Point& p) { return p.is_exact(); });
}

inline double coordinate_scale(const Polygon& poly) {
    double s = 1.0;
    for (const auto& p : poly) s = std::max({s, std::abs(p.x.to_double()), std::abs(p.y.to_double())});
    return s;
}

/// Sign of cross(b - a, c - a) with a relative tolerance in floating mode.
inline int orientation(const Point& a, const Point& b, const Point& c) {
    const Vec2 u = b - a;
    const Vec2 v = c - a;
    const Number cr = cross(u, v);
    if (cr.is_exact()) return cr.sign();
    const double scale = (std::abs(u.x.to_double()) + std::abs(u.y.to_double())) *
                         (std::abs(v.x.to_double()) + std::abs(v.y.to_double()));
    const double d = cr.to_double();
    if (std::abs(d) <= 1e-12 * scale) return 0;
    return d > 0 ? 1 : -1;
}

/// Removes repeated and collinear vertices, orients counterclockwise, and
/// returns an empty polygon when nothing of positive area remains.
inline Polygon clean_polygon(Polygon poly) {
    if (poly.size() < 3) return {};
    Polygon dedup;
    dedup.reserve(poly.size());
    for (auto& p : poly) {
        if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(std::move(p));
    }
    while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
    bool changed = true;
    while (changed && dedup.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < dedup.size() && dedup.size() >= 3; ++i) {
            const std::size_t n = dedup.size();
            const Point& prev = dedup[(i + n - 1) % n];
            const Point& next = dedup[(i + 1) % n];
            if (orientation(prev, dedup[i], next) == 0) {
                dedup.erase(dedup.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                --i;
            }
        }
    }
    if (dedup.size() < 3) return {};
    const Number a2 = signed_area2(dedup);
    if (a2.is_zero()) return {};
    if (!a2.is_exact()) {
        const double s = coordinate_scale(dedup);
        if (std::abs(a2.to_double()) <= 1e-13 * s * s) return {};
    }
    if (a2.sign() < 0) std::reverse(dedup.begin(), dedup.end());
    return dedup;
}

/// Keeps the part of a convex polygon on the left of the directed line a->b
/// (keep_left) or on its right.
inline Polygon clip_halfplane(const Polygon& poly, const Point& a, const Point& b, bool keep_left) {
    Polygon out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 2);
    const Vec2 dir = b - a;
    auto side = [&](const Point& p) {
        const int o = orientation(a, b, p);
        return keep_left ? o : -o;
    };
    for (std::size_t i = 0; i < n; ++i) {
        const Point& cur = poly[i];
        const Point& nxt = poly[(i + 1) % n];
        const int sc = side(cur);
        const int sn = side(nxt);
        if (sc >= 0) out.push_back(cur);
        if ((sc > 0 && sn < 0) || (sc < 0 && sn > 0)) {
            const Number dc = cross(dir, cur - a);
            const Number dn = cross(dir, nxt - a);
            const Number s = dc / (dc - dn);
            out.push_back(cur + s * (nxt - cur));
        }
    }
    return clean_polygon(std::move(out));
}

inline Polygon intersect_convex(const Polygon& a, const Polygon& b) {
    Polygon cur = a;
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n && !cur.empty(); ++i) {
        cur = clip_halfplane(cur, b[i], b[(i + 1) % n], true);
    }
    return cur;
}

/// a \ b as disjoint convex pieces (b convex, counterclockwise).
inline std::vector<Polygon> subtract_convex(const Polygon& a, const Polygon& b) {
    std::vector<Polygon> pieces;
    Polygon rest = a;
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n && !rest.empty(); ++i) {
        Polygon outside = clip_halfplane(rest, b[i], b[(i + 1) % n], false);
        if (!outside.empty()) pieces.push_back(std::move(outside));
        rest = clip_halfplane(rest, b[i], b[(i + 1) % n], true);
    }
    return pieces;
}

inline bool is_convex_ccw(const Polygon& poly) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (orientation(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) < 0) return false;
    }
    return true;
}

} // namespace detail

/// Finite union of convex polygons with disjoint interiors.
class PlaneSet {
public:
    PlaneSet() = default;

    static PlaneSet empty() { return {}; }

    /// Axis-aligned box [x0, x1) x [y0, y1).
    static PlaneSet rectangle(const Number& x0, const Number& y0, const Number& x1, const Number& y1) {
        return convex_polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
    }

    /// The unit cell [0,1)^2.
    static PlaneSet unit_cell() { return rectangle(Number(0), Number(0), Number(1), Number(1)); }

    /// Single convex polygon given in either orientation. Throws on a
    /// non-convex vertex list.
    static PlaneSet convex_polygon(Polygon vertices) {
        PlaneSet s;
        Polygon cleaned = detail::clean_polygon(std::move(vertices));
        if (cleaned.empty()) return s;
        if (!detail::is_convex_ccw(cleaned)) throw error("polygon is not convex");
        s.mode_ = detail::polygon_is_exact(cleaned) ? arithmetic_mode::exact : arithmetic_mode::approximate;
        s.polygons_.push_back(std::move(cleaned));
        return s;
    }

    /// Builds a set from convex pieces that the caller asserts have disjoint
    /// interiors. Pieces are cleaned; degenerate ones dropped.
    static PlaneSet from_disjoint_pieces(std::vector<Polygon> pieces) {
        PlaneSet s;
        for (auto& p : pieces) s.push_piece(std::move(p));
        return s;
    }

    const std::vector<Polygon>& polygons() const { return polygons_; }
    bool is_empty() const { return polygons_.empty(); }
    arithmetic_mode mode() const { return mode_; }
    bool is_exact() const { return mode_ == arithmetic_mode::exact; }

    /// Sum of shoelace areas.
    Number area() const {
        Number total(0);
        for (const auto& p : polygons_) total += detail::signed_area2(p);
        if (!is_exact()) total = total.to_approx();
        return total / Number(2);
    }

    /// Closed containment test (boundary points count as members).
    bool contains(const Point& pt) const {
        for (const auto& poly : polygons_) {
            bool inside = true;
            const std::size_t n = poly.size();
            for (std::size_t i = 0; i < n && inside; ++i) {
                if (detail::orientation(poly[i], poly[(i + 1) % n], pt) < 0) inside = false;
            }
            if (inside) return true;
        }
        return false;
    }

    /// Same set as `*this`; renormalizes every piece. Idempotent.
    PlaneSet normalized() const { return from_disjoint_pieces(polygons_); }

    friend bool operator==(const PlaneSet&, const PlaneSet&) = default;

private:
    void push_piece(Polygon p) {
        Polygon cleaned = detail::clean_polygon(std::move(p));
        if (cleaned.empty()) return;
        if (!detail::polygon_is_exact(cleaned)) mode_ = arithmetic_mode::approximate;
        polygons_.push_back(std::move(cleaned));
    }

    friend PlaneSet intersect(const PlaneSet&, const PlaneSet&);
    friend PlaneSet subtract(const PlaneSet&, const PlaneSet&);
    friend PlaneSet linear_image(const PlaneSet&, const Matrix2&);
    friend PlaneSet translate(const PlaneSet&, const Vec2&);
    friend PlaneSet unite(const PlaneSet&, const PlaneSet&);

    std::vector<Polygon> polygons_;
    arithmetic_mode mode_ = arithmetic_mode::exact;
};

inline Number area(const PlaneSet& s) { return s.area(); }

inline PlaneSet intersect(const PlaneSet& a, const PlaneSet& b) {
    PlaneSet out;
    if (!a.is_exact() || !b.is_exact()) out.mode_ = arithmetic_mode::approximate;
    for (const auto& pa : a.polygons_) {
        for (const auto& pb : b.polygons_) out.push_piece(detail::intersect_convex(pa, pb));
    }
    return out;
}

inline PlaneSet subtract(const PlaneSet& a, const PlaneSet& b) {
    PlaneSet out;
    if (!a.is_exact() || !b.is_exact()) out.mode_ = arithmetic_mode::approximate;
    for (const auto& pa : a.polygons_) {
        std::vector<Polygon> rest{pa};
        for (const auto& pb : b.polygons_) {
            std::vector<Polygon> next;
            for (const auto& r : rest) {
                auto pieces = detail::subtract_convex(r, pb);
                for (auto& piece : pieces) next.push_back(std::move(piece));
            }
            rest = std::move(next);
            if (rest.empty()) break;
        }
        for (auto& r : rest) out.push_piece(std::move(r));
    }
    return out;
}

inline PlaneSet unite(const PlaneSet& a, const PlaneSet& b) {
    PlaneSet out = a;
    if (!b.is_exact()) out.mode_ = arithmetic_mode::approximate;
    for (const auto& p : subtract(b, a).polygons_) out.push_piece(p);
    return out;
}

inline PlaneSet linear_image(const PlaneSet& s, const Matrix2& m) {
    if (m.det().is_zero()) throw singular_matrix();
    PlaneSet out;
    if (!s.is_exact() || !m.is_exact()) out.mode_ = arithmetic_mode::approximate;
    for (const auto& poly : s.polygons_) {
        Polygon mapped;
        mapped.reserve(poly.size());
        for (const auto& v : poly) mapped.push_back(m.apply(v));
        out.push_piece(std::move(mapped));
    }
    return out;
}

inline PlaneSet translate(const PlaneSet& s, const Vec2& v) {
    PlaneSet out;
    if (!s.is_exact() || !v.is_exact()) out.mode_ = arithmetic_mode::approximate;
    for (const auto& poly : s.polygons_) {
        Polygon moved;
        moved.reserve(poly.size());
        for (const auto& p : poly) moved.push_back(p + v);
        out.push_piece(std::move(moved));
    }
    return out;
}

/// Area of the symmetric difference; zero iff the sets agree modulo null sets.
inline Number symmetric_difference_area(const PlaneSet& a, const PlaneSet& b) {
    return subtract(a, b).area() + subtract(b, a).area();
}

} // namespace symlab
