#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "symlab/geometry2d.hpp"
#include "symlab/number.hpp"

using namespace symlab;

namespace {

Number q(long n, long d = 1) { return Number::ratio(n, d); }

PlaneSet rect(Number x0, Number y0, Number x1, Number y1) { return PlaneSet::rectangle(x0, y0, x1, y1); }

/// Monte-Carlo area over [-4, 4]^2 from a membership predicate.
double monte_carlo_area(const PlaneSet& s, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-4, 4);
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
        if (s.contains({Number::approx(u(rng)), Number::approx(u(rng))})) ++hits;
    }
    return 64.0 * hits / samples;
}

} // namespace

TEST(Number, ParsesRationalStrings) {
    EXPECT_EQ(parse_number("3/6"), q(1, 2));
    EXPECT_EQ(parse_number("-7"), q(-7));
    EXPECT_EQ(parse_number("0.125"), q(1, 8));
    EXPECT_FALSE(parse_number("1e-3").is_exact());
    EXPECT_THROW(parse_number("1/0"), config_error);
    EXPECT_THROW(parse_number("abc"), config_error);
    EXPECT_THROW(parse_number(""), config_error);
}

TEST(Number, MixedArithmeticDegradesToFloat) {
    const Number a = q(1, 3) + Number::approx(0.5);
    EXPECT_FALSE(a.is_exact());
    EXPECT_NEAR(a.to_double(), 5.0 / 6.0, 1e-15);
    EXPECT_TRUE((Number(0) * Number::approx(2.5)).is_exact());
    EXPECT_EQ(q(2, 3).str(), "2/3");
}

TEST(Area, Examples) {
    EXPECT_EQ(PlaneSet::unit_cell().area(), Number(1));
    EXPECT_EQ(PlaneSet::empty().area(), Number(0));
    const PlaneSet r = rect(q(0), q(0), q(2), q(1, 2));
    EXPECT_EQ(r.area(), Number(1));
    EXPECT_NEAR(monte_carlo_area(r, 400000, 7), 1.0, 0.03);
}

TEST(Intersect, Examples) {
    EXPECT_TRUE(intersect(PlaneSet::unit_cell(), rect(q(1), q(0), q(2), q(1))).is_empty());
    EXPECT_EQ(intersect(PlaneSet::unit_cell(), PlaneSet::unit_cell()).area(), Number(1));
    const Number a = intersect(rect(q(0), q(0), q(2), q(1)), rect(q(1), q(0), q(3), q(1))).area();
    EXPECT_EQ(a, Number(1));
    const oracle::RawBar x = {{1, {{0, 0, 16, 8}}}}, y = {{1, {{8, 0, 24, 8}}}};
    EXPECT_EQ(oracle::plane_measure({x, y}, [](unsigned m) { return m == 3; }), mpq_class(1));
}

TEST(Subtract, Examples) {
    EXPECT_TRUE(subtract(PlaneSet::unit_cell(), PlaneSet::unit_cell()).is_empty());
    EXPECT_EQ(subtract(rect(q(0), q(0), q(2), q(1)), PlaneSet::unit_cell()).area(), Number(1));
    const PlaneSet a = rect(q(-1, 3), q(0), q(5, 7), q(2));
    EXPECT_EQ(subtract(a, PlaneSet::empty()), a.normalized());
}

TEST(LinearImage, Examples) {
    const PlaneSet u = PlaneSet::unit_cell();
    EXPECT_EQ(linear_image(u, Matrix2::identity()).area(), Number(1));
    const PlaneSet rot = linear_image(u, Matrix2::rotation(q(3, 5), q(4, 5)));
    EXPECT_EQ(rot.area(), Number(1));
    EXPECT_TRUE(rot.is_exact());
    // shoelace on the mapped vertices, computed independently
    const mpq_class c(3, 5), s(4, 5);
    EXPECT_EQ(oracle::shoelace({{0, 0}, {c, s}, {c - s, s + c}, {-s, c}}), mpq_class(1));
    EXPECT_EQ(linear_image(u, Matrix2::hyperbolic(q(5, 4), q(3, 4))).area(), Number(1));
    EXPECT_THROW(linear_image(u, Matrix2(q(1), q(2), q(2), q(4))), singular_matrix);
}

TEST(LinearImage, FloatingRotationWithinTolerance) {
    const double th = 0.7;
    const PlaneSet r = linear_image(rect(q(0), q(0), q(2), q(1)),
                                    Matrix2::rotation(Number::approx(std::cos(th)), Number::approx(std::sin(th))));
    EXPECT_FALSE(r.is_exact());
    EXPECT_NEAR(r.area().to_double(), 2.0, 1e-9);
}

TEST(LinearImage, ScalesByDeterminant) {
    EXPECT_EQ(linear_image(PlaneSet::unit_cell(), Matrix2(q(2), q(1), q(0), q(3))).area(), Number(6));
}

TEST(Translate, Examples) {
    EXPECT_EQ(translate(PlaneSet::unit_cell(), {q(5), q(7)}).area(), Number(1));
    EXPECT_TRUE(translate(PlaneSet::empty(), {q(1), q(1)}).is_empty());
    const PlaneSet tri = PlaneSet::convex_polygon({{q(0), q(0)}, {q(2), q(0)}, {q(0), q(3)}});
    EXPECT_EQ(translate(tri, {q(-1, 3), q(2, 3)}).area(), tri.area());
    EXPECT_EQ(tri.area(), Number(3));
}

TEST(PlaneSet, RejectsNonConvexPolygon) {
    EXPECT_THROW(PlaneSet::convex_polygon({{q(0), q(0)}, {q(2), q(0)}, {q(1), q(1, 4)}, {q(1), q(2)}}), error);
}

TEST(PlaneSet, NormalizationIsIdempotent) {
    const PlaneSet s = unite(rect(q(0), q(0), q(2), q(1)), rect(q(1), q(0), q(3), q(2)));
    EXPECT_EQ(s.normalized(), s.normalized().normalized());
}

TEST(Matrix2, SymplecticFlag) {
    EXPECT_TRUE(Matrix2::hyperbolic(q(5, 4), q(3, 4)).is_symplectic());
    EXPECT_FALSE(Matrix2(q(2), q(0), q(0), q(1)).is_symplectic());
    EXPECT_TRUE(Matrix2::rotation(Number::approx(std::cos(1.0)), Number::approx(std::sin(1.0))).is_symplectic());
}

TEST(AreaProperties, InclusionExclusionOnRandomSets) {
    oracle::Rng rng(11);
    for (int i = 0; i < 60; ++i) {
        const auto ra = std::vector<oracle::Rect>{oracle::random_rect(rng), oracle::random_rect(rng)};
        const auto rb = std::vector<oracle::Rect>{oracle::random_rect(rng)};
        const PlaneSet a = oracle::to_plane_set(ra), b = oracle::to_plane_set(rb);
        EXPECT_EQ(unite(a, b).area() + intersect(a, b).area(), a.area() + b.area());
        EXPECT_EQ(subtract(a, b).area(), a.area() - intersect(a, b).area());
        const oracle::RawBar x = {{1, ra}}, y = {{1, rb}};
        EXPECT_EQ(a.area().rational(), oracle::plane_measure({x}, [](unsigned m) { return m == 1; }));
        EXPECT_EQ(intersect(a, b).area().rational(), oracle::plane_measure({x, y}, [](unsigned m) { return m == 3; }));
        const Vec2 v{oracle::rational(rng), oracle::rational(rng)};
        EXPECT_EQ(translate(a, v).area(), a.area());
    }
}
